use std::io::Write;

use serde::Serialize;

use crate::checks::Check;
use crate::sweep::{Series, SweepRecord};

pub const CSV_HEADER: [&str; 7] = ["param", "gme_upper", "reference", "deviation", "iterations", "restart_index", "wall_ms"];

/// Shortest round-trip representation, switching to exponent notation for
/// very small or large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, records: &[SweepRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            format_float(r.param),
            format_float(r.gme_upper),
            opt(r.reference),
            opt(r.deviation),
            r.iterations.to_string(),
            r.restart_index.to_string(),
            r.wall_ms.map(|m| m.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Settings echoed into every JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub epsilon: f64,
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config: ConfigEcho,
    pub series: Vec<Series>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        crate::checks::all_passed(&self.checks)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
