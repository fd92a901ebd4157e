//! Pass/fail checks embedded in the validation subcommands. A failing check
//! makes the CLI exit with status 3.

use serde::Serialize;

use crate::runs::{isotropic_threshold, xx_low_temperature_limit, TwoQubitValidation, XxMode, XX_COUPLING};
use crate::sweep::{Series, SweepRecord};

pub const TWO_QUBIT_TOL: f64 = 1e-8;
pub const SEPARABLE_TOL: f64 = 1e-6;
pub const PURE_REFERENCE_TOL: f64 = 1e-6;
pub const MONOTONE_TOL: f64 = 1e-6;
pub const NEAR_GHZ_RANGE: (f64, f64) = (0.48, 0.50);
pub const LOW_T: f64 = 0.05;
pub const LOW_T_TOL: f64 = 0.02;
pub const ADDITIVITY_RANGE: (f64, f64) = (-1e-9, 1e-4);
/// Allowed fidelity decrease between iterations.
pub const ITERATION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn at(records: &[SweepRecord], x: f64) -> Option<&SweepRecord> {
    records.iter().find(|r| (r.param - x).abs() < 1e-9)
}

/// Range and per-iteration monotonicity of every record.
pub fn sanity(records: &[SweepRecord]) -> Vec<Check> {
    let in_range = records.iter().all(|r| (0.0..=1.0).contains(&r.gme_upper));
    let worst = records.iter().map(|r| r.stats.max_decrease).fold(0.0, f64::max);
    vec![
        Check::new("gme_upper in [0, 1]", in_range, format!("{} records", records.len())),
        Check::new("fidelity non-decreasing", worst <= ITERATION_SLACK, format!("largest decrease {worst:.3e}")),
    ]
}

pub fn two_qubit(v: &TwoQubitValidation) -> Vec<Check> {
    let mut checks = vec![Check::new(
        "two-qubit closed-form agreement",
        v.max_deviation <= TWO_QUBIT_TOL,
        format!("max |deviation| {:.3e} (tol {TWO_QUBIT_TOL:e}), mean iterations {:.1}", v.max_deviation, v.mean_iterations),
    )];
    checks.extend(sanity(&v.records));
    checks
}

pub fn isotropic_table(d: usize, records: &[SweepRecord]) -> Vec<Check> {
    let threshold = isotropic_threshold(d);
    let sep: Vec<&SweepRecord> = records.iter().filter(|r| r.param <= threshold + 1e-12).collect();
    let worst_sep = sep.iter().map(|r| r.gme_upper).fold(0.0, f64::max);
    let mut checks = Vec::new();
    if !sep.is_empty() {
        checks.push(Check::new(
            "separable points vanish",
            worst_sep <= SEPARABLE_TOL,
            format!("max gme_upper {worst_sep:.3e} over {} points with p <= {threshold:.4}", sep.len()),
        ));
    }
    if d == 2 {
        let ent: Vec<&SweepRecord> = records.iter().filter(|r| r.param > threshold + 1e-12).collect();
        let worst = ent.iter().filter_map(|r| r.deviation).fold(0.0_f64, |m, x| m.max(x.abs()));
        checks.push(Check::new(
            "entangled points match closed form",
            worst <= TWO_QUBIT_TOL,
            format!("max |deviation| {worst:.3e} over {} points", ent.len()),
        ));
    }
    checks.extend(sanity(records));
    checks
}

pub fn four_qubit(records: &[SweepRecord]) -> Vec<Check> {
    let mut checks = Vec::new();
    if let Some(r) = at(records, 0.0) {
        let dev = r.deviation.unwrap_or(f64::NAN);
        checks.push(Check::new(
            "pure endpoint matches known GME",
            dev.abs() <= PURE_REFERENCE_TOL,
            format!("gme_upper {:.9} deviation {dev:.3e}", r.gme_upper),
        ));
    }
    checks.extend(sanity(records));
    checks
}

pub fn isotropic3(records: &[SweepRecord]) -> Vec<Check> {
    let mut checks = Vec::new();
    if let Some(r) = at(records, 0.2) {
        checks.push(Check::new(
            "separability threshold p = 0.2",
            r.gme_upper <= SEPARABLE_TOL,
            format!("gme_upper {:.3e}", r.gme_upper),
        ));
    }
    if let Some(r) = at(records, 0.99) {
        let (lo, hi) = NEAR_GHZ_RANGE;
        checks.push(Check::new(
            "near-GHZ value p = 0.99",
            (lo..=hi).contains(&r.gme_upper),
            format!("gme_upper {:.6} (expected [{lo}, {hi}])", r.gme_upper),
        ));
    }
    let mut sorted: Vec<&SweepRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.param.total_cmp(&b.param));
    let worst_drop = sorted.windows(2).map(|w| w[0].gme_upper - w[1].gme_upper).fold(0.0, f64::max);
    checks.push(Check::new(
        "curve non-decreasing in p",
        worst_drop <= MONOTONE_TOL,
        format!("largest drop {worst_drop:.3e}"),
    ));
    checks.extend(sanity(records));
    checks
}

/// Low-temperature regime checks: in temperature mode the point `T = 0.05`
/// of every field series, in field mode the regime fields of the `T = 0.05`
/// series.
pub fn xx(mode: XxMode, series: &[Series]) -> Vec<Check> {
    let mut checks = Vec::new();
    for s in series {
        let Some(fixed) = &s.fixed else { continue };
        let points: Vec<(f64, &SweepRecord)> = match mode {
            XxMode::Temperature => at(&s.records, LOW_T).map(|r| (fixed.value, r)).into_iter().collect(),
            XxMode::Field if (fixed.value - LOW_T).abs() < 1e-12 => {
                [0.0, 0.5, 1.0, 1.5].iter().filter_map(|&b| at(&s.records, b).map(|r| (b, r))).collect()
            }
            XxMode::Field => Vec::new(),
        };
        for (field, r) in points {
            let expected = xx_low_temperature_limit(field, XX_COUPLING);
            let ok = if expected == 0.0 { r.gme_upper <= LOW_T_TOL } else { (r.gme_upper - expected).abs() <= LOW_T_TOL };
            checks.push(Check::new(
                format!("low-temperature regime B = {field}"),
                ok,
                format!("gme_upper {:.4} expected {expected:.4} +- {LOW_T_TOL}", r.gme_upper),
            ));
        }
        checks.extend(sanity(&s.records));
    }
    checks
}

pub fn additivity(records: &[SweepRecord]) -> Vec<Check> {
    let (lo, hi) = ADDITIVITY_RANGE;
    let gaps: Vec<f64> = records.iter().filter_map(|r| r.deviation).collect();
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut checks = vec![Check::new(
        "additivity gap",
        gaps.iter().all(|g| (lo..=hi).contains(g)),
        format!("gaps in [{min:.3e}, {max:.3e}], allowed [{lo:e}, {hi:e}]"),
    )];
    checks.extend(sanity(records));
    checks
}
