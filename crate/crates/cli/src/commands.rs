//! The five subcommands. Each returns the text meant for standard output
//! and writes its data file, if any.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bdp_ldp::estimate::{estimate, reference_frequency, run_sweep, EstimateRecord, McOptions, WithJumpLimit};
use bdp_ldp::ldp::{
    check_phi_condition, decompose_bv, default_partition, delta_of_eps, interpolate_target, normalizer_psi,
    poisson_tube_lower_bound, rate_functional, rate_functional_error, theta_from_parts, theta_threshold,
};
use bdp_ldp::pathspace::Tube;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::config::{ConfigError, Experiment};

/// Frozen column order of the sweep CSV.
pub const SWEEP_HEADER: &str =
    "T,phi,psi,method,n,hits,ess,log_p_hat,stderr_log,normalized,neg_rate,delta_eps,theta";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    fn config(field: &str, message: impl std::fmt::Display) -> Self {
        CliError::Config(ConfigError {
            field: field.to_string(),
            line: None,
            message: message.to_string(),
        })
    }
}

pub fn load(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Experiment::from_json(&text)?)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Shortest round-trip form of `x`: plain decimal for moderate magnitudes,
/// exponent notation below 1e-4 or from 1e16 up, and `nan`, `inf`, `-inf`
/// for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x != 0.0 && !(1e-4..1e16).contains(&x.abs()) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::String(num(x))
    }
}

#[derive(Serialize)]
struct EstimateJson {
    method: String,
    p_hat: Value,
    log_p_hat: Value,
    stderr: Value,
    n: u64,
    hits: u64,
    truncated: u64,
    ess: Value,
    seed: u64,
}

/// JSON document for an estimate; non-finite numbers become strings.
pub fn estimate_json(record: &EstimateRecord, seed: u64) -> String {
    let doc = EstimateJson {
        method: record.method.as_str().to_string(),
        p_hat: json_num(record.p_hat),
        log_p_hat: json_num(record.log_p_hat),
        stderr: json_num(record.stderr),
        n: record.n,
        hits: record.hits,
        truncated: record.truncated,
        ess: json_num(record.ess),
        seed,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("estimate serializes");
    s.push('\n');
    s
}

pub fn cmd_rate_functional(exp: &Experiment) -> Result<String, CliError> {
    let k = exp.model.max_exponent();
    let value = rate_functional(&exp.target, k, exp.quad);
    let error = rate_functional_error(&exp.target, k, exp.quad);
    let mut out = String::new();
    writeln!(out, "I(f) = {}", num(value)).unwrap();
    writeln!(out, "l∨m = {}", num(k)).unwrap();
    if exp.model.is_pure_birth() {
        writeln!(out, "model: pure birth (mu ≡ 0), exponent l").unwrap();
    }
    writeln!(out, "quadrature: Simpson, {} panels", exp.quad.panels()).unwrap();
    writeln!(out, "quadrature error estimate = {}", num(error)).unwrap();
    Ok(out)
}

pub fn cmd_check_scaling(exp: &Experiment) -> Result<String, CliError> {
    let grid = &exp.config.scaling_grid;
    let report = check_phi_condition(&exp.config.scaling, &exp.model, grid);
    let mut out = String::from("T\tphi\tV\tpsi\tr\ttheta\tnote\n");
    for row in &report.rows {
        let theta = theta_from_parts(row.horizon, row.phi, row.v).unwrap_or(f64::NAN);
        let note = if row.flagged { "phi<=1" } else { "" };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            num(row.horizon),
            num(row.phi),
            num(row.v),
            num(row.psi),
            num(row.ratio),
            num(theta),
            note
        )
        .unwrap();
    }
    writeln!(out, "shortcut: {}", report.shortcut).unwrap();
    writeln!(out, "verdict: {}", report.verdict).unwrap();
    Ok(out)
}

/// Runs the configured estimator at `horizon` and writes the JSON record to
/// `out` when given; without `out` the JSON is the returned text.
pub fn cmd_estimate(exp: &Experiment, out: Option<&Path>) -> Result<String, CliError> {
    let horizon = exp.horizon()?;
    let problem = exp.problem(horizon);
    let record = estimate(&problem, exp.config.method, exp.mc_options(), exp.guide_options())
        .map_err(|e| CliError::config("guide", e))?;
    let json = estimate_json(&record, exp.config.seed);
    match out.map(Path::to_path_buf).or_else(|| exp.config.output.estimate.clone()) {
        Some(path) => {
            write_file(&path, &json)?;
            Ok(format!(
                "{} T={} phi={} p_hat={} log_p_hat={} stderr={} hits={}/{} truncated={} ess={}\n",
                record.method,
                num(horizon),
                num(problem.phi()),
                num(record.p_hat),
                num(record.log_p_hat),
                num(record.stderr),
                record.hits,
                record.n,
                record.truncated,
                num(record.ess),
            ))
        }
        None => Ok(json),
    }
}

/// Sweep CSV over `t_list`.
pub fn sweep_csv(exp: &Experiment) -> Result<String, CliError> {
    let horizons = exp.t_list()?;
    let problem = exp.problem(horizons[0]);
    let points = run_sweep(
        &problem,
        horizons,
        exp.config.method,
        exp.mc_options(),
        exp.guide_options(),
        exp.quad,
    )
    .map_err(|e| CliError::config("guide", e))?;
    let delta = delta_of_eps(&exp.target, exp.config.epsilon, exp.config.tube_resolution);
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for pt in &points {
        let theta = theta_threshold(&exp.config.scaling, &exp.model, pt.horizon).unwrap_or(f64::NAN);
        let r = &pt.estimate;
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(pt.horizon),
            num(pt.phi),
            num(pt.psi),
            r.method,
            r.n,
            r.hits,
            num(r.ess),
            num(r.log_p_hat),
            num(r.stderr_log),
            num(pt.normalized),
            num(pt.neg_rate),
            num(delta),
            num(theta),
        )
        .unwrap();
    }
    Ok(csv)
}

/// Writes the sweep CSV to `out` (or the configured path) and returns a
/// one-line note; without a destination the CSV is the returned text.
pub fn cmd_verify_ldp(exp: &Experiment, out: Option<&Path>) -> Result<String, CliError> {
    let csv = sweep_csv(exp)?;
    match out.map(Path::to_path_buf).or_else(|| exp.config.output.sweep.clone()) {
        Some(path) => {
            write_file(&path, &csv)?;
            Ok(format!("wrote {} rows to {}\n", csv.lines().count() - 1, path.display()))
        }
        None => Ok(csv),
    }
}

/// One horizon of the lower-bound table.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub horizon: f64,
    pub phi: f64,
    pub psi: f64,
    pub cells: usize,
    pub log_plus: f64,
    pub log_minus: f64,
    pub log_bound: f64,
    /// Frequency of `{ζ_{φ,T} ∈ U_ε(f), N_T ≤ ⌊Cφ⌋}` under the reference walk.
    pub frequency: Option<EstimateRecord>,
}

impl LowerBoundRow {
    pub fn normalized(&self) -> f64 {
        self.log_bound / self.psi
    }
}

pub fn lower_bound_rows(exp: &Experiment) -> Result<Vec<LowerBoundRow>, CliError> {
    let horizons: Vec<f64> = if exp.config.t_list.is_empty() {
        vec![exp.horizon()?]
    } else {
        exp.config.t_list.clone()
    };
    let eps = exp.config.epsilon;
    let g = interpolate_target(&exp.target, eps / 2.0, exp.config.tube_resolution);
    let decomp = decompose_bv(&g).map_err(|e| CliError::config("target", e))?;
    let partition = default_partition(&decomp, eps).map_err(|e| CliError::config("epsilon", e))?;
    let c = decomp.total_variation();
    horizons
        .iter()
        .map(|&horizon| {
            let phi = exp.config.scaling.phi(horizon);
            let bound = poisson_tube_lower_bound(&decomp, horizon, phi, &partition)
                .map_err(|e| CliError::config("target", e))?;
            let frequency = (exp.config.lower_bound_samples > 0).then(|| {
                let event = WithJumpLimit {
                    event: Tube::new(exp.target.clone(), phi, eps),
                    max_jumps: (c * phi).floor() as usize,
                };
                let opts = McOptions::new(exp.config.lower_bound_samples, exp.config.seed)
                    .with_max_jumps(exp.config.max_jumps);
                reference_frequency(horizon, &event, opts)
            });
            Ok(LowerBoundRow {
                horizon,
                phi,
                psi: normalizer_psi(&exp.config.scaling, &exp.model, horizon),
                cells: partition.len() - 1,
                log_plus: bound.log_plus,
                log_minus: bound.log_minus,
                log_bound: bound.total(),
                frequency,
            })
        })
        .collect()
}

pub fn cmd_lower_bound(exp: &Experiment) -> Result<String, CliError> {
    let rows = lower_bound_rows(exp)?;
    let mut out = String::from("T\tphi\tpsi\tK\tlog_P1\tlog_P2\tlog_bound\tbound_over_psi\tfrequency\tstderr\n");
    for r in &rows {
        let (freq, se) = r
            .frequency
            .as_ref()
            .map_or((f64::NAN, f64::NAN), |f| (f.p_hat, f.stderr));
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            num(r.horizon),
            num(r.phi),
            num(r.psi),
            r.cells,
            num(r.log_plus),
            num(r.log_minus),
            num(r.log_bound),
            num(r.normalized()),
            num(freq),
            num(se)
        )
        .unwrap();
    }
    if rows.len() > 1 {
        let shrinking = rows
            .windows(2)
            .all(|w| w[1].normalized().abs() < w[0].normalized().abs());
        writeln!(out, "|bound/psi| decreasing along T: {}", if shrinking { "yes" } else { "no" }).unwrap();
    }
    Ok(out)
}
