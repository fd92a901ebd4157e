use std::time::Instant;

use gme_core::mixed::Diagnostics;
use gme_core::rng::derive_seed;
use gme_core::{gme_mixed, AlgorithmConfig, DensityOperator, GmeError, Partition, Result};
use serde::Serialize;

/// State family a sweep runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    TwoQubitRandom,
    IsotropicDxd,
    FourQubitDecay,
    Isotropic3q,
    XxTemperature,
    XxField,
    Additivity,
}

impl Family {
    /// Name of the swept parameter, used as the plot axis label.
    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::TwoQubitRandom | Family::Additivity => "index",
            Family::IsotropicDxd | Family::Isotropic3q => "p",
            Family::FourQubitDecay => "t",
            Family::XxTemperature => "T",
            Family::XxField => "B",
        }
    }

    fn contains(self, x: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        match self {
            Family::TwoQubitRandom | Family::Additivity => x >= 0.0 && x.fract() == 0.0,
            Family::IsotropicDxd | Family::Isotropic3q => (0.0..=1.0).contains(&x),
            Family::FourQubitDecay | Family::XxField => x >= 0.0,
            Family::XxTemperature => x > 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: Family,
    pub grid: Vec<f64>,
    pub config: AlgorithmConfig,
    /// Record wall-clock time per point. Off by default so that reruns with
    /// the same seed produce identical output.
    pub timing: bool,
}

impl SweepSpec {
    pub fn new(family: Family, grid: Vec<f64>, config: AlgorithmConfig) -> Result<Self> {
        let spec = SweepSpec { family, grid, config, timing: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(GmeError::InvalidArgument("sweep grid is empty".into()));
        }
        if let Some(x) = self.grid.iter().find(|&&x| !self.family.contains(x)) {
            return Err(GmeError::InvalidArgument(format!(
                "grid value {x} is outside the domain of {:?}",
                self.family
            )));
        }
        self.config.validate()
    }

    /// Config for grid point `index`, with its own derived seed.
    pub fn point_config(&self, index: usize) -> AlgorithmConfig {
        AlgorithmConfig { seed: derive_seed(self.config.seed, index as u64), ..self.config.clone() }
    }
}

/// Iteration statistics aggregated over all restarts of one point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub converged: bool,
    /// Largest fidelity decrease between consecutive iterations.
    pub max_decrease: f64,
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub param: f64,
    pub gme_upper: f64,
    pub reference: Option<f64>,
    /// `gme_upper - reference` when a reference exists.
    pub deviation: Option<f64>,
    pub iterations: usize,
    pub restart_index: usize,
    pub wall_ms: Option<u64>,
    /// Companion curve drawn next to the result (not part of the CSV).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<f64>,
    pub stats: RunStats,
}

impl SweepRecord {
    pub fn with_reference(mut self, reference: Option<f64>) -> Self {
        self.reference = reference;
        self.deviation = reference.map(|r| self.gme_upper - r);
        self
    }
}

/// One curve of a sweep; multi-curve sweeps hold one series per fixed value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed: Option<FixedValue>,
    pub records: Vec<SweepRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedValue {
    pub name: String,
    pub value: f64,
}

/// Runs the mixed-state solver on one point and packs the outcome.
pub fn evaluate(rho: &DensityOperator, cut: &Partition, config: &AlgorithmConfig, param: f64, timing: bool) -> Result<SweepRecord> {
    let start = Instant::now();
    let est = gme_mixed(rho, cut, config)?;
    let wall_ms = timing.then(|| start.elapsed().as_millis() as u64);
    let diagnostics = config.track_invariants.then(|| {
        est.restarts.iter().filter_map(|r| r.diagnostics).fold(Diagnostics::default(), |acc, d| Diagnostics {
            max_rho_residual: acc.max_rho_residual.max(d.max_rho_residual),
            max_polar_residual: acc.max_polar_residual.max(d.max_polar_residual),
            max_unitarity_residual: acc.max_unitarity_residual.max(d.max_unitarity_residual),
        })
    });
    Ok(SweepRecord {
        param,
        gme_upper: est.gme_upper.clamp(0.0, 1.0),
        reference: None,
        deviation: None,
        iterations: est.iterations,
        restart_index: est.restart_index,
        wall_ms,
        comparison: None,
        stats: RunStats { converged: est.converged, max_decrease: est.max_decrease(), diagnostics },
    })
}

/// Evenly spaced grid `start, start + step, ...` up to and including `stop`.
/// Values are rounded to 12 decimals so that `0.15` prints as `0.15`.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(GmeError::InvalidArgument(format!("grid step must be > 0, got {step}")));
    }
    if !(stop >= start) {
        return Err(GmeError::InvalidArgument(format!("empty grid [{start}, {stop}]")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| round12(start + k as f64 * step)).collect())
}

pub(crate) fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}
