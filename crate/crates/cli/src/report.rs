use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ExperimentKind;
use crate::record::ResultRecord;

/// One table row: a single check of a single record.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub file: String,
    pub experiment: ExperimentKind,
    pub shape: String,
    pub field: String,
    pub check: String,
    pub value: f64,
    pub stderr: Option<f64>,
    pub target: Option<f64>,
    pub sigma_deviation: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Files that could not be parsed, with the reason.
    pub errors: Vec<(String, String)>,
    pub records: usize,
}

impl Report {
    /// True when there were record files and none of them parsed.
    pub fn all_failed(&self) -> bool {
        self.records == 0 && !self.errors.is_empty()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("# Results\n");
        let mut groups: BTreeMap<ExperimentKind, Vec<&ReportRow>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry(r.experiment).or_default().push(r);
        }
        if groups.is_empty() {
            out += "\n| experiment | shape | field | check | estimate | target | deviation | pass |\n";
            out += "|---|---|---|---|---|---|---|---|\n";
        }
        for (kind, rows) in groups {
            let _ = write!(out, "\n## {kind}\n\n");
            out += "| experiment | shape | field | check | estimate | target | deviation | pass |\n";
            out += "|---|---|---|---|---|---|---|---|\n";
            for r in rows {
                let est = match r.stderr {
                    Some(se) => format!("{} ± {:.3e}", r.value, se),
                    None => format!("{}", r.value),
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.experiment,
                    r.shape,
                    r.field,
                    r.check,
                    est,
                    r.target.map(|t| t.to_string()).unwrap_or_else(|| "-".into()),
                    r.sigma_deviation.map(|d| format!("{d:.2}σ")).unwrap_or_else(|| "-".into()),
                    if r.pass { "pass" } else { "FAIL" }
                );
            }
        }
        if !self.errors.is_empty() {
            out += "\n## Errors\n\n";
            for (file, msg) in &self.errors {
                let _ = writeln!(out, "- `{file}`: {msg}");
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(std::io::Error::other)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            "file", "experiment", "shape", "field", "check", "value", "stderr", "target", "sigma_deviation", "pass",
        ])
        .map_err(std::io::Error::other)?;
        for r in &self.rows {
            w.write_record([
                r.file.clone(),
                r.experiment.to_string(),
                r.shape.clone(),
                r.field.clone(),
                r.check.clone(),
                r.value.to_string(),
                opt(r.stderr),
                opt(r.target),
                opt(r.sigma_deviation),
                r.pass.to_string(),
            ])
            .map_err(std::io::Error::other)?;
        }
        w.flush()
    }
}

fn record_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Reads every `*.json` record in `dir` (sorted by name).
pub fn collect(dir: &Path) -> std::io::Result<Report> {
    let mut report = Report::default();
    for path in record_files(dir)? {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let parsed = std::fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<ResultRecord>(&t).map_err(|e| e.to_string()));
        match parsed {
            Ok(rec) => {
                report.records += 1;
                for c in &rec.checks {
                    report.rows.push(ReportRow {
                        file: name.clone(),
                        experiment: rec.experiment,
                        shape: rec.config.shape.clone().unwrap_or_else(|| "-".into()),
                        field: rec.config.field.to_string(),
                        check: c.name.clone(),
                        value: c.value,
                        stderr: c.stderr,
                        target: c.target,
                        sigma_deviation: c.sigma_deviation,
                        pass: c.pass,
                    });
                }
            }
            Err(msg) => report.errors.push((name, msg)),
        }
    }
    Ok(report)
}

/// Builds the report and writes `summary.md` and `summary.csv` into `dir`.
pub fn write_report(dir: &Path) -> std::io::Result<Report> {
    let report = collect(dir)?;
    std::fs::write(dir.join("summary.md"), report.to_markdown())?;
    report.write_csv(&dir.join("summary.csv"))?;
    Ok(report)
}
