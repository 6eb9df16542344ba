//! Experiment runner for `ppt-geometry`: JSON configs in, JSON records and
//! CSV rows out.
//!
//! Every experiment is a plain library call ([`experiments::run`]); the
//! binary only parses arguments, persists records and maps errors to exit
//! codes.

#![forbid(unsafe_code)]

pub mod config;
pub mod experiments;
pub mod record;
pub mod report;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind, Overrides};
pub use record::{execute, persist, ResultRecord};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ACCEPTANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] ppt_geometry::Error),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) | RunError::Io(_) => EXIT_NUMERICAL,
        }
    }
}

/// Loads, overrides, runs and persists one config. Returns the record and
/// the exit code it maps to.
pub fn run_config_file(
    path: &std::path::Path,
    overrides: &Overrides,
    force: Option<ExperimentKind>,
) -> Result<(ResultRecord, i32), RunError> {
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(overrides);
    if let Some(kind) = force {
        if cfg.experiment != kind {
            return Err(ConfigError::new("experiment", format!("expected `{kind}`, got `{}`", cfg.experiment)).into());
        }
    }
    cfg.validate()?;
    let record = execute(&cfg)?;
    persist(&record)?;
    let code = if record.pass { EXIT_PASS } else { EXIT_ACCEPTANCE };
    Ok((record, code))
}
