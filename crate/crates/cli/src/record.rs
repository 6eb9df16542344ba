use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::experiments::{self, Check};
use crate::RunError;

/// Column order of the results CSV. Treated as a stable interface.
pub const CSV_COLUMNS: [&str; 15] = [
    "timestamp",
    "config_hash",
    "experiment",
    "shape",
    "field",
    "n_samples",
    "seed",
    "shards",
    "check",
    "value",
    "stderr",
    "target",
    "sigma_deviation",
    "pass",
    "wall_time_s",
];

/// Persisted outcome of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub experiment: ExperimentKind,
    pub library_version: String,
    pub timestamp: String,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub details: serde_json::Value,
}

impl ResultRecord {
    /// The fields that must be reproducible: everything but the timestamp
    /// and wall time.
    pub fn numeric_payload(&self) -> String {
        serde_json::to_string(&(&self.config_hash, &self.checks, &self.details)).expect("record serializes")
    }

    pub fn summary_line(&self) -> String {
        let shape = self.config.shape.as_deref().unwrap_or("-");
        let head = self
            .checks
            .first()
            .map(|c| {
                let mut s = format!("{} = {:.6}", c.name, c.value);
                if let Some(se) = c.stderr {
                    s += &format!(" ± {se:.2e}");
                }
                if let (Some(t), Some(d)) = (c.target, c.sigma_deviation) {
                    s += &format!(" (target {t}, {d:.2} sigma)");
                }
                s
            })
            .unwrap_or_default();
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        format!(
            "{} {} {}: {} [{}/{} checks pass] {}",
            self.experiment,
            shape,
            self.config.field,
            head,
            self.checks.len() - failed,
            self.checks.len(),
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    format!("{:x}", Sha256::digest(cfg.canonical_json().as_bytes()))
}

/// Runs the experiment and assembles its record without touching the disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<ResultRecord, RunError> {
    let start = Instant::now();
    let outcome = experiments::run(cfg)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    Ok(ResultRecord {
        config_hash: config_hash(cfg),
        experiment: cfg.experiment,
        library_version: ppt_geometry::VERSION.to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        wall_time_s,
        config: cfg.clone(),
        pass: outcome.checks.iter().all(|c| c.pass),
        checks: outcome.checks,
        details: outcome.details,
    })
}

/// The CSV file that collects rows of every record written to `dir`.
pub fn csv_path(json_path: &Path) -> PathBuf {
    json_path.parent().unwrap_or(Path::new(".")).join("results.csv")
}

/// Writes the JSON record atomically (temp file + rename) and appends one
/// CSV row per check.
pub fn persist(record: &ResultRecord) -> Result<(), RunError> {
    let path = &record.config.output_path;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    serde_json::to_writer_pretty(&mut tmp, record).map_err(std::io::Error::other)?;
    tmp.write_all(b"\n")?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;

    let csv_file = csv_path(path);
    let fresh = !csv_file.exists() || std::fs::metadata(&csv_file)?.len() == 0;
    let file = OpenOptions::new().create(true).append(true).open(&csv_file)?;
    let mut w = csv::Writer::from_writer(file);
    let io = |e: csv::Error| RunError::Io(std::io::Error::other(e));
    if fresh {
        w.write_record(CSV_COLUMNS).map_err(io)?;
    }
    let cfg = &record.config;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for c in &record.checks {
        w.write_record([
            record.timestamp.clone(),
            record.config_hash.clone(),
            record.experiment.to_string(),
            cfg.shape.clone().unwrap_or_default(),
            cfg.field.to_string(),
            cfg.n_samples.to_string(),
            cfg.seed.to_string(),
            cfg.shards.to_string(),
            c.name.clone(),
            c.value.to_string(),
            opt(c.stderr),
            opt(c.target),
            opt(c.sigma_deviation),
            c.pass.to_string(),
            record.wall_time_s.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
