use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bdp_ldp_cli::commands::{self, CliError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bdp-ldp", version, about = "Tube probabilities and large-deviation checks for birth-death processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print I(f) = ∫ f^{l∨m} and its quadrature error estimate.
    RateFunctional(Common),
    /// Tabulate r(T) = φ ln φ / (T V(φ)) and give a verdict.
    CheckScaling(Common),
    /// Estimate the tube probability at the configured horizon (JSON).
    Estimate(Common),
    /// Sweep the configured horizons and write the normalized estimates (CSV).
    VerifyLdp(Common),
    /// Poisson product lower bound with an optional reference-walk check.
    LowerBound(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; `estimate` and `verify-ldp` write their data here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let (Command::RateFunctional(c)
    | Command::CheckScaling(c)
    | Command::Estimate(c)
    | Command::VerifyLdp(c)
    | Command::LowerBound(c)) = &cli.command;
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let mut exp = commands::load(&c.config)?;
    if let Some(seed) = c.seed {
        exp = exp.with_seed(seed);
    }
    let out = c.out.as_deref();
    let text_to = |text: String, out: Option<&Path>| -> Result<String, CliError> {
        match out {
            Some(path) => {
                commands::write_file(path, &text)?;
                Ok(text)
            }
            None => Ok(text),
        }
    };
    match &cli.command {
        Command::RateFunctional(_) => text_to(commands::cmd_rate_functional(&exp)?, out),
        Command::CheckScaling(_) => text_to(commands::cmd_check_scaling(&exp)?, out),
        Command::Estimate(_) => commands::cmd_estimate(&exp, out),
        Command::VerifyLdp(_) => commands::cmd_verify_ldp(&exp, out),
        Command::LowerBound(_) => text_to(commands::cmd_lower_bound(&exp)?, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
