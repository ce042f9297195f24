//! Trajectory CSV and run-summary JSON writers.
//!
//! CSV schema: `iteration,value,seconds`, one row per iteration, with values
//! serialized at 17 significant digits so identical runs are byte-identical
//! up to the timing column.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;

use submax::report::SolveReport;

/// `f64` at 17 significant digits, enough to round-trip exactly.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory_csv(path: &Path, report: &SolveReport<f64>) -> Result<()> {
    let mut out = String::from("iteration,value,seconds\n");
    for point in &report.trajectory {
        out.push_str(&format!(
            "{},{},{:.6}\n",
            point.iteration,
            format_value(point.value),
            point.seconds
        ));
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// One summary entry per solver run: final value, solution, configuration
/// echo, and any inner-solve certificates.
pub fn summary_entry(report: &SolveReport<f64>, seed: u64, csv_path: &Path) -> serde_json::Value {
    json!({
        "solver": report.solver,
        "final_value": report.value,
        "solution": report.solution.as_slice(),
        "config": report.config_echo,
        "seed": seed,
        "trajectory_csv": csv_path.display().to_string(),
        "inner_gap_certificates": report.inner_gaps,
        "estimated_lipschitz": report.estimated_lipschitz,
        "choices": {
            "window_tie_break": "lowest iteration index",
            "mirror_map": "euclidean",
        },
    })
}

pub fn write_summary(dir: &Path, entries: Vec<serde_json::Value>) -> Result<PathBuf> {
    let path = dir.join("summary.json");
    let body = serde_json::to_string_pretty(&json!({ "runs": entries }))?;
    fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
