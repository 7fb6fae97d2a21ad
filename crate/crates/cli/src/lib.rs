//! Experiment driver: JSON configuration and the subcommands behind the
//! `bdp-ldp` binary.

pub mod commands;
pub mod config;

pub use commands::{
    cmd_check_scaling, cmd_estimate, cmd_lower_bound, cmd_rate_functional, cmd_verify_ldp, CliError, SWEEP_HEADER,
};
pub use config::{ConfigError, Experiment, ExperimentConfig};
