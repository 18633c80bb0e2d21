use std::fs;
use std::path::Path;

use hsl_core::analytics::LimitLaw;
use hsl_core::harness::{CovarianceEntry, LcltRow, MonteCarloSummary, TestReport};
use serde_json::{json, Value};

use crate::CliError;

/// 17 significant digits: round-trips every `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>, CliError> {
    fs::create_dir_all(dir)?;
    Ok(csv::Writer::from_path(dir.join(name))?)
}

pub fn write_fdl_samples(dir: &Path, summary: &MonteCarloSummary) -> Result<(), CliError> {
    let mut w = writer(dir, "fdl_samples.csv")?;
    w.write_record(["replication", "time", "value"])?;
    for r in 0..summary.replications as usize {
        for (j, &t) in summary.times.iter().enumerate() {
            w.write_record([r.to_string(), float(t), float(summary.samples[j][r])])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_covariance(dir: &Path, entries: &[CovarianceEntry]) -> Result<(), CliError> {
    let mut w = writer(dir, "covariance.csv")?;
    w.write_record(["row", "col", "empirical", "target", "deviation"])?;
    for e in entries {
        w.write_record([
            e.row.to_string(),
            e.col.to_string(),
            float(e.empirical),
            float(e.target),
            float(e.deviation),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_decay(dir: &Path, summary: &MonteCarloSummary, law: &LimitLaw) -> Result<(), CliError> {
    let mut w = writer(dir, "decay.csv")?;
    w.write_record(["t", "empirical_mean", "target_mean"])?;
    for (j, &t) in summary.times.iter().enumerate() {
        w.write_record([float(t), float(summary.means[j]), float(law.mean(t))])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_lclt(dir: &Path, rows: &[LcltRow]) -> Result<(), CliError> {
    let mut w = writer(dir, "lclt.csv")?;
    w.write_record(["N", "sup_error", "argmax_m"])?;
    for r in rows {
        w.write_record([r.n.to_string(), float(r.sup_error), r.argmax_m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn test_json(r: &TestReport) -> Value {
    let mut v = json!({
        "name": r.name,
        "statistic": r.statistic,
        "target": r.criterion.target(),
        "tolerance": r.criterion.tolerance(),
        "comparison": r.criterion.as_str(),
        "pass": r.pass(),
        "replications": r.replications,
    });
    if let Some(p) = r.p_value {
        v["p_value"] = json!(p);
    }
    if !r.notes.is_empty() {
        v["notes"] = json!(r.notes);
    }
    v
}

pub struct ReportHeader {
    pub config: Value,
    pub seed: Option<u64>,
    pub regime: Option<&'static str>,
}

pub fn write_report(
    dir: &Path,
    header: &ReportHeader,
    reports: &[TestReport],
    runtime_seconds: Option<f64>,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let doc = json!({
        "config": header.config,
        "seed": header.seed,
        "regime": header.regime,
        "tests": reports.iter().map(test_json).collect::<Vec<_>>(),
        "runtime_seconds": runtime_seconds,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    Ok(())
}
