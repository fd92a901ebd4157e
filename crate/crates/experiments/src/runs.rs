//! The sweeps behind each CLI subcommand.
//!
//! Every grid point gets its own seed derived from the master seed and the
//! point index, so a point can be recomputed in isolation. Points run on the
//! rayon pool and are collected in grid order.

use gme_core::rng::{child_rng, derive_seed};
use gme_core::states::{self, XXParams};
use gme_core::{AlgorithmConfig, DensityOperator, GmeError, HilbertStructure, Partition, PureState, Result};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::sweep::{evaluate, round12, Family, FixedValue, Series, SweepRecord, SweepSpec};

/// Coupling of the XX ring in every sweep.
pub const XX_COUPLING: f64 = 0.5;

/// Random two-qubit density matrix: rank uniform in `1..=4`, then a
/// Ginibre-type draw of that rank.
pub fn random_two_qubit_state<R: Rng + ?Sized>(rng: &mut R) -> Result<DensityOperator> {
    let rank = rng.random_range(1..=4);
    states::random_density(&HilbertStructure::qubits(2), rank, rng)
}

fn point_rng(spec: &SweepSpec, index: usize) -> gme_core::rng::GmeRng {
    // stream 1 of the point seed; stream 0 seeds the solver restarts
    child_rng(derive_seed(spec.config.seed, index as u64), 1)
}

fn run_points<F>(spec: &SweepSpec, point: F) -> Result<Vec<SweepRecord>>
where
    F: Fn(usize, f64, &AlgorithmConfig) -> Result<SweepRecord> + Sync,
{
    spec.validate()?;
    spec.grid
        .par_iter()
        .enumerate()
        .map(|(k, &x)| point(k, x, &spec.point_config(k)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoQubitValidation {
    pub records: Vec<SweepRecord>,
    pub max_deviation: f64,
    pub mean_iterations: f64,
}

/// Compares the solver against the two-qubit closed form on `count` random
/// states.
pub fn run_two_qubit_validation(count: usize, config: &AlgorithmConfig, timing: bool) -> Result<TwoQubitValidation> {
    if count == 0 {
        return Err(GmeError::InvalidArgument("count must be >= 1".into()));
    }
    let mut spec = SweepSpec::new(Family::TwoQubitRandom, (0..count).map(|k| k as f64).collect(), config.clone())?;
    spec.timing = timing;
    let records = run_points(&spec, |k, x, cfg| {
        let rho = random_two_qubit_state(&mut point_rng(&spec, k))?;
        let exact = states::two_qubit_eg(&rho)?;
        Ok(evaluate(&rho, &Partition::parties(2), cfg, x, spec.timing)?.with_reference(Some(exact)))
    })?;
    Ok(summarize_validation(records))
}

fn summarize_validation(records: Vec<SweepRecord>) -> TwoQubitValidation {
    let max_deviation = records.iter().filter_map(|r| r.deviation).fold(0.0_f64, |m, d| m.max(d.abs()));
    let mean_iterations = records.iter().map(|r| r.iterations as f64).sum::<f64>() / records.len() as f64;
    TwoQubitValidation { records, max_deviation, mean_iterations }
}

/// Largest `p` at which the `d x d` isotropic state is separable.
pub fn isotropic_threshold(d: usize) -> f64 {
    1.0 / (d as f64 + 1.0)
}

/// Isotropic `d x d` sweep. References: the concurrence formula for `d = 2`,
/// zero on the separable interval otherwise. For `d = 4` only entangled
/// points (`p > 0.2`) are kept.
pub fn run_isotropic_table(d: usize, grid: &[f64], config: &AlgorithmConfig, timing: bool) -> Result<Vec<SweepRecord>> {
    if !(2..=4).contains(&d) {
        return Err(GmeError::InvalidArgument(format!("isotropic table supports d in 2..=4, got {d}")));
    }
    let grid: Vec<f64> = if d == 4 { grid.iter().copied().filter(|&p| p > 0.2).collect() } else { grid.to_vec() };
    let mut spec = SweepSpec::new(Family::IsotropicDxd, grid, config.clone())?;
    spec.timing = timing;
    run_points(&spec, |_, p, cfg| {
        let rho = states::isotropic(d, p)?;
        let reference = if d == 2 {
            Some(states::two_qubit_eg(&rho)?)
        } else if p <= isotropic_threshold(d) {
            Some(0.0)
        } else {
            None
        };
        Ok(evaluate(&rho, &Partition::parties(2), cfg, p, timing)?.with_reference(reference))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FourQubitState {
    Cl4,
    W4,
    D4,
}

impl FourQubitState {
    pub fn state(self) -> PureState {
        match self {
            FourQubitState::Cl4 => states::cluster4(),
            FourQubitState::W4 => states::w4(),
            FourQubitState::D4 => states::dicke4(),
        }
    }

    /// GME of the undamped pure state (`1/4`, `27/64` and `3/8` maximal
    /// product overlaps).
    pub fn pure_gme(self) -> f64 {
        match self {
            FourQubitState::Cl4 => 0.75,
            FourQubitState::W4 => 37.0 / 64.0,
            FourQubitState::D4 => 5.0 / 8.0,
        }
    }
}

/// Dephasing sweep `rho(t)` started from a four-qubit pure state. The pure
/// endpoint `t = 0` carries the known GME as reference.
pub fn run_four_qubit_table(family: FourQubitState, grid: &[f64], config: &AlgorithmConfig, timing: bool) -> Result<Vec<SweepRecord>> {
    let mut spec = SweepSpec::new(Family::FourQubitDecay, grid.to_vec(), config.clone())?;
    spec.timing = timing;
    let pure = family.state().density();
    run_points(&spec, |_, t, cfg| {
        let rho = states::decay(&pure, t)?;
        let reference = (t == 0.0).then(|| family.pure_gme());
        Ok(evaluate(&rho, &Partition::parties(4), cfg, t, timing)?.with_reference(reference))
    })
}

/// Three-qubit GHZ-isotropic curve with the two-qubit isotropic curve as
/// comparison. Reference is zero on the separable interval `p <= 1/5` and
/// `1/2` at the GHZ endpoint.
pub fn run_isotropic3_curve(grid: &[f64], config: &AlgorithmConfig, timing: bool) -> Result<Vec<SweepRecord>> {
    let mut spec = SweepSpec::new(Family::Isotropic3q, grid.to_vec(), config.clone())?;
    spec.timing = timing;
    run_points(&spec, |_, p, cfg| {
        let rho = states::isotropic3(p)?;
        let reference = if p <= 0.2 {
            Some(0.0)
        } else if p == 1.0 {
            Some(0.5)
        } else {
            None
        };
        let mut rec = evaluate(&rho, &Partition::parties(3), cfg, p, timing)?.with_reference(reference);
        rec.comparison = Some(states::two_qubit_eg(&states::isotropic(2, p)?)?);
        Ok(rec)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XxMode {
    /// Sweep `T` at fixed fields.
    Temperature,
    /// Sweep `B` at fixed temperatures.
    Field,
}

/// Thermal XX-ring sweeps, one series per fixed value.
pub fn run_xx_sweeps(mode: XxMode, fixed: &[f64], grid: &[f64], config: &AlgorithmConfig, timing: bool) -> Result<Vec<Series>> {
    if fixed.is_empty() {
        return Err(GmeError::InvalidArgument("no fixed values given".into()));
    }
    let (family, fixed_name) = match mode {
        XxMode::Temperature => (Family::XxTemperature, "B"),
        XxMode::Field => (Family::XxField, "T"),
    };
    fixed
        .iter()
        .enumerate()
        .map(|(s, &value)| {
            let valid = match mode {
                XxMode::Temperature => value.is_finite() && value >= 0.0,
                XxMode::Field => value.is_finite() && value > 0.0,
            };
            if !valid {
                return Err(GmeError::InvalidArgument(format!("invalid fixed {fixed_name} = {value}")));
            }
            let cfg = AlgorithmConfig { seed: derive_seed(config.seed, 1 << 32 | s as u64), ..config.clone() };
            let mut spec = SweepSpec::new(family, grid.to_vec(), cfg)?;
            spec.timing = timing;
            let records = run_points(&spec, |_, x, cfg| {
                let params = match mode {
                    XxMode::Temperature => XXParams { field: value, coupling: XX_COUPLING, temperature: x },
                    XxMode::Field => XXParams { field: x, coupling: XX_COUPLING, temperature: value },
                };
                let rho = params.density()?;
                evaluate(&rho, &Partition::parties(3), cfg, x, timing)
            })?;
            Ok(Series {
                label: format!("{fixed_name}={}", round12(value)),
                fixed: Some(FixedValue { name: fixed_name.into(), value }),
                records,
            })
        })
        .collect()
}

/// Ground-state GME of the XX ring in the zero-temperature limit.
pub fn xx_low_temperature_limit(field: f64, coupling: f64) -> f64 {
    let critical = 2.0 * coupling;
    if field == 0.0 {
        0.25
    } else if (field - critical).abs() < 1e-12 {
        0.116
    } else if field < critical {
        1.0 / 3.0
    } else {
        0.0
    }
}

/// `rho (x) sigma` for random two-qubit pairs, regrouped to the `AA'|BB'`
/// cut. `gme_upper` is `1 - F~(rho (x) sigma)`, the reference is
/// `1 - F(rho) F(sigma)`, and the deviation is therefore
/// `F(rho) F(sigma) - F~(rho (x) sigma)`.
pub fn run_additivity_study(pairs: usize, config: &AlgorithmConfig, timing: bool) -> Result<Vec<SweepRecord>> {
    if pairs == 0 {
        return Err(GmeError::InvalidArgument("pairs must be >= 1".into()));
    }
    let mut spec = SweepSpec::new(Family::Additivity, (0..pairs).map(|k| k as f64).collect(), config.clone())?;
    spec.timing = timing;
    let cut = Partition::new(4, vec![vec![0, 2], vec![1, 3]])?;
    run_points(&spec, |k, x, cfg| {
        let mut rng = point_rng(&spec, k);
        let rho = random_two_qubit_state(&mut rng)?;
        let sigma = random_two_qubit_state(&mut rng)?;
        let product = states::two_qubit_fs(&rho)? * states::two_qubit_fs(&sigma)?;
        additivity_point(&rho, &sigma, &cut, cfg, x, product, timing)
    })
}

fn additivity_point(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    cut: &Partition,
    cfg: &AlgorithmConfig,
    param: f64,
    product: f64,
    timing: bool,
) -> Result<SweepRecord> {
    let joint = rho.tensor(sigma);
    Ok(evaluate(&joint, cut, cfg, param, timing)?.with_reference(Some(1.0 - product)))
}

/// Additivity gap for one explicit pair.
pub fn additivity_gap(rho: &DensityOperator, sigma: &DensityOperator, config: &AlgorithmConfig) -> Result<f64> {
    let cut = Partition::new(4, vec![vec![0, 2], vec![1, 3]])?;
    let product = states::two_qubit_fs(rho)? * states::two_qubit_fs(sigma)?;
    let rec = additivity_point(rho, sigma, &cut, config, 0.0, product, false)?;
    Ok(rec.deviation.expect("reference is set"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use gme_core::rng::rng_from_seed;

    fn quick() -> AlgorithmConfig {
        AlgorithmConfig { epsilon: 1e-10, restarts: 2, ..Default::default() }
    }

    #[test]
    fn validation_on_small_sample() {
        let v = run_two_qubit_validation(3, &quick(), false).unwrap();
        assert_eq!(v.records.len(), 3);
        assert!(v.max_deviation < 1e-6);
        assert!(run_two_qubit_validation(0, &quick(), false).is_err());
    }

    #[test]
    fn validation_is_deterministic() {
        let a = run_two_qubit_validation(2, &quick(), false).unwrap();
        let b = run_two_qubit_validation(2, &quick(), false).unwrap();
        assert_eq!(a.records, b.records);
    }

    #[test]
    fn isotropic_d4_keeps_entangled_points() {
        let cfg = AlgorithmConfig { ensemble_size: Some(16), restarts: 1, epsilon: 1e-6, ..Default::default() };
        let recs = run_isotropic_table(4, &[0.1, 0.2, 0.9], &cfg, false).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].param, 0.9);
        assert!(run_isotropic_table(5, &[0.5], &cfg, false).is_err());
    }

    #[test]
    fn low_temperature_regimes() {
        assert_eq!(xx_low_temperature_limit(0.0, 0.5), 0.25);
        assert_eq!(xx_low_temperature_limit(0.5, 0.5), 1.0 / 3.0);
        assert_eq!(xx_low_temperature_limit(1.0, 0.5), 0.116);
        assert_eq!(xx_low_temperature_limit(1.5, 0.5), 0.0);
    }

    #[test]
    fn xx_series_labels() {
        let cfg = AlgorithmConfig { restarts: 1, ensemble_size: Some(8), epsilon: 1e-5, ..Default::default() };
        let s = run_xx_sweeps(XxMode::Field, &[0.5], &[0.0, 1.0], &cfg, false).unwrap();
        assert_eq!(s[0].label, "T=0.5");
        assert_eq!(s[0].records.len(), 2);
        assert!(run_xx_sweeps(XxMode::Field, &[0.0], &[0.0], &cfg, false).is_err());
    }

    #[test]
    fn additivity_of_product_states_is_exact() {
        let st = HilbertStructure::qubits(2);
        let mut rng = rng_from_seed(1);
        let a = gme_core::ProductState::random(&st, &mut rng).to_pure().density();
        let b = gme_core::ProductState::random(&st, &mut rng).to_pure().density();
        let cfg = AlgorithmConfig { restarts: 1, ensemble_size: Some(4), ..Default::default() };
        let gap = additivity_gap(&a, &b, &cfg).unwrap();
        assert!(gap.abs() <= 1e-9, "gap {gap}");
    }

    #[test]
    fn additivity_of_bell_pair() {
        // F(Bell) = 1/2, so the product is 1/4 and the joint value may not fall below it
        let bell = states::isotropic(2, 1.0).unwrap();
        let cfg = AlgorithmConfig { restarts: 2, ensemble_size: Some(16), epsilon: 1e-9, ..Default::default() };
        let gap = additivity_gap(&bell, &bell, &cfg).unwrap();
        assert!((-1e-9..=1e-4).contains(&gap), "gap {gap}");
    }
}
