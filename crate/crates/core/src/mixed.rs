//! Upper bound on the geometric measure of entanglement of a mixed state.
//!
//! The GME of `rho` equals `1 - max F(rho, sigma)` over separable `sigma`,
//! and by Uhlmann's theorem the fidelity is the maximal squared overlap of
//! purifications. Write the purifications as
//!
//! ```text
//! |psi> = sum_i sqrt(p_i) |psi_i> (x) |i>
//! |phi> = sum_j sqrt(q_j) |phi_j> (x) U^dagger |j>
//! ```
//!
//! with `{p_i, psi_i}` a decomposition of `rho` and `{q_j, phi_j}` a product
//! ensemble. Each iteration maximizes `|<psi|phi>|` over `U` (polar
//! decomposition of the coupling matrix), then over the product states, then
//! over the weights `q`. None of these steps can decrease the overlap, so the
//! fidelity sequence is non-decreasing and `1 - F` is an upper bound that
//! only improves.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, GmeError, Result};
use crate::linalg::{self, hermitian_eig, svd};
use crate::pure::{bipartite_pure_gme, closest_product_iterate, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};
use crate::rng::{child_rng, GmeRng};
use crate::tensor::{
    fidelity, DensityOperator, Ensemble, HilbertStructure, Member, Partition, ProductState, PureState, Regroup,
};
use crate::{CMatrix, CVector};

/// Members of the rho-ensemble with weight below this are carried with
/// weight zero and excluded from the product-state update.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-14;
/// Eigenvalues of `rho` at or below this do not count towards its rank.
pub const RANK_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    /// Stop once the fidelity gain of an iteration is at most this.
    pub epsilon: f64,
    /// Ensemble size `m`; `None` means `(total dimension)^2`.
    pub ensemble_size: Option<usize>,
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Sweep-gain tolerance of the inner closest-product iteration.
    pub inner_tol: f64,
    pub inner_max_sweeps: usize,
    /// Record ensemble reconstruction and polar-identity residuals at every
    /// iteration (costs an extra matrix product per step).
    pub track_invariants: bool,
}

impl Default for AlgorithmConfig {
    fn default() -> Self {
        AlgorithmConfig {
            epsilon: 1e-7,
            ensemble_size: None,
            max_iterations: 50_000,
            restarts: 5,
            seed: 0,
            inner_tol: DEFAULT_TOL,
            inner_max_sweeps: DEFAULT_MAX_SWEEPS,
            track_invariants: false,
        }
    }
}

impl AlgorithmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return invalid("epsilon must be > 0");
        }
        if self.ensemble_size == Some(0) {
            return invalid("ensemble size must be >= 1");
        }
        if self.restarts == 0 {
            return invalid("restarts must be >= 1");
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be >= 1");
        }
        Ok(())
    }

    pub fn ensemble_size_for(&self, structure: &HilbertStructure) -> usize {
        self.ensemble_size.unwrap_or_else(|| structure.total_dim().pow(2))
    }

    fn inner(&self) -> InnerConfig {
        InnerConfig { tol: self.inner_tol, max_sweeps: self.inner_max_sweeps }
    }
}

/// Settings for the pure-state closest-product updates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerConfig {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for InnerConfig {
    fn default() -> Self {
        InnerConfig { tol: DEFAULT_TOL, max_sweeps: DEFAULT_MAX_SWEEPS }
    }
}

/// Pair of ensembles together with the derived coupling matrix.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub rho_ensemble: Ensemble<PureState>,
    pub sep_ensemble: Ensemble<ProductState>,
    /// `A_ij = sqrt(p_i q_j) <phi_j|psi_i>`.
    pub coupling_matrix: CMatrix,
    /// Ancilla unitary of the current purification of the separable state.
    pub mixing_unitary: CMatrix,
    /// `|<psi|phi>|^2` for the current purifications.
    pub overlap_sq: f64,
}

impl IterationState {
    /// Starts with `U = I`.
    pub fn new(rho_ensemble: Ensemble<PureState>, sep_ensemble: Ensemble<ProductState>) -> Result<Self> {
        if rho_ensemble.len() != sep_ensemble.len() {
            return invalid("both ensembles must have the same number of members");
        }
        if rho_ensemble.structure() != sep_ensemble.structure() {
            return invalid("ensemble structures differ");
        }
        let coupling_matrix = coupling_matrix(&rho_ensemble, &sep_ensemble);
        let m = rho_ensemble.len();
        let overlap_sq = coupling_matrix.trace().norm_sqr();
        Ok(IterationState {
            rho_ensemble,
            sep_ensemble,
            coupling_matrix,
            mixing_unitary: CMatrix::identity(m, m),
            overlap_sq,
        })
    }
}

fn columns<S>(members: &[Member<S>], f: impl Fn(&S) -> CVector, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d, members.len());
    for (k, m) in members.iter().enumerate() {
        out.set_column(k, &f(&m.state));
    }
    out
}

fn coupling_matrix(rho: &Ensemble<PureState>, sep: &Ensemble<ProductState>) -> CMatrix {
    let d = rho.structure().total_dim();
    let psi = columns(rho.members(), |s| s.amplitudes().clone(), d);
    let phi = columns(sep.members(), ProductState::to_vector, d);
    let mut a = psi.transpose() * phi.conjugate();
    let sp: Vec<f64> = rho.weights().iter().map(|p| p.sqrt()).collect();
    let sq: Vec<f64> = sep.weights().iter().map(|q| q.sqrt()).collect();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            a[(i, j)] *= sp[i] * sq[j];
        }
    }
    a
}

/// Result of maximizing the purification overlap over the ancilla unitary.
#[derive(Debug, Clone)]
pub struct PolarStep {
    /// `U = W^dagger V^dagger` for `A = V D W`.
    pub unitary: CMatrix,
    pub singular_values: Vec<f64>,
    /// `Tr D`, the maximal overlap `|<psi|phi>|`.
    pub overlap: f64,
    v: CMatrix,
}

impl PolarStep {
    /// `|A - sqrt(A A^dagger) U^dagger|_F`.
    pub fn identity_residual(&self, a: &CMatrix) -> f64 {
        let mut vd = self.v.clone();
        for (k, s) in self.singular_values.iter().enumerate() {
            vd.column_mut(k).scale_mut(*s);
        }
        let root = vd * self.v.adjoint();
        (a - root * self.unitary.adjoint()).norm()
    }
}

pub fn polar_step(state: &IterationState) -> PolarStep {
    let dec = svd(&state.coupling_matrix);
    let unitary = dec.w.adjoint() * dec.v.adjoint();
    let overlap = dec.d.iter().sum();
    PolarStep { unitary, singular_values: dec.d, overlap, v: dec.v }
}

/// New decomposition of `rho` and improved product states for fixed `U`.
#[derive(Debug, Clone)]
pub struct StateUpdate {
    /// `{p_i', psi_i'}`; members below [`NEGLIGIBLE_WEIGHT`] carry weight 0.
    pub rho_ensemble: Ensemble<PureState>,
    /// `phi_i'`, one per member.
    pub products: Vec<ProductState>,
    /// `|<psi_i'|phi_i'>|^2`.
    pub overlaps_sq: Vec<f64>,
}

/// `alpha_i = sum_j u_ij sqrt(p_j) psi_j`, `p_i' = |alpha_i|^2`,
/// `psi_i' = alpha_i / sqrt(p_i')`, then a closest-product update of every
/// `phi_i` against `psi_i'` (closed form for two-block structures, otherwise
/// the alternating iteration started from the previous `phi_i`).
pub fn state_update_step(
    u: &CMatrix,
    rho_ensemble: &Ensemble<PureState>,
    sep_ensemble: &Ensemble<ProductState>,
    inner: &InnerConfig,
) -> Result<StateUpdate> {
    let m = rho_ensemble.len();
    if u.shape() != (m, m) || sep_ensemble.len() != m {
        return invalid("state_update_step: unitary and ensembles disagree in size");
    }
    let st = rho_ensemble.structure().clone();
    let d = st.total_dim();
    let mut scaled = columns(rho_ensemble.members(), |s| s.amplitudes().clone(), d);
    for (k, w) in rho_ensemble.weights().iter().enumerate() {
        scaled.column_mut(k).scale_mut(w.sqrt());
    }
    let alpha = scaled * u.transpose();

    let bipartite = st.n_parties() == 2;
    let mut members = Vec::with_capacity(m);
    let mut products = Vec::with_capacity(m);
    let mut overlaps_sq = Vec::with_capacity(m);
    for i in 0..m {
        let a: CVector = alpha.column(i).into_owned();
        let p = a.norm_squared();
        let prev_phi = &sep_ensemble.members()[i].state;
        if p < NEGLIGIBLE_WEIGHT {
            let placeholder = rho_ensemble.members()[i].state.clone();
            overlaps_sq.push(prev_phi.overlap(&placeholder).norm_sqr());
            members.push(Member { weight: 0.0, state: placeholder });
            products.push(prev_phi.clone());
            continue;
        }
        let psi = PureState::normalized(st.clone(), a)?;
        let best = if bipartite {
            bipartite_pure_gme(&psi, &[0])?
        } else {
            closest_product_iterate(&psi, prev_phi, inner.max_sweeps, inner.tol)?
        };
        overlaps_sq.push(best.overlap_sq);
        products.push(best.closest_product);
        members.push(Member { weight: p, state: psi });
    }
    Ok(StateUpdate { rho_ensemble: Ensemble::from_parts(st, members), products, overlaps_sq })
}

/// Optimal weights `q_i' ∝ p_i' |<psi_i'|phi_i'>|^2`.
pub fn probability_step(weights: &[f64], states: &[PureState], products: &[ProductState]) -> Result<Vec<f64>> {
    if weights.len() != states.len() || states.len() != products.len() {
        return invalid("probability_step: length mismatch");
    }
    let overlaps: Vec<f64> = states.iter().zip(products).map(|(s, p)| p.overlap(s).norm_sqr()).collect();
    weights_from_overlaps(weights, &overlaps)
}

pub fn weights_from_overlaps(weights: &[f64], overlaps_sq: &[f64]) -> Result<Vec<f64>> {
    let raw: Vec<f64> = weights.iter().zip(overlaps_sq).map(|(p, o)| p * o).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(GmeError::DegenerateInput(
            "every weighted overlap vanished; the state is orthogonal to all product candidates".into(),
        ));
    }
    Ok(raw.into_iter().map(|r| r / total).collect())
}

/// Random decomposition of `rho` into `m` pure states: the eigen-ensemble
/// mixed by the first `rank` columns of a Haar unitary.
pub fn random_rho_decomposition<R: Rng + ?Sized>(rho: &DensityOperator, m: usize, rng: &mut R) -> Result<Ensemble<PureState>> {
    let eig = hermitian_eig(rho.matrix())?;
    let support: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > RANK_TOL).collect();
    let r = support.len();
    if m < r {
        return invalid(format!("ensemble size {m} is below the rank {r} of rho"));
    }
    let st = rho.structure().clone();
    let d = st.total_dim();
    let mut scaled = CMatrix::zeros(d, r);
    for (c, &k) in support.iter().enumerate() {
        scaled.set_column(c, &eig.vectors.column(k).scale(eig.values[k].sqrt()));
    }
    for _ in 0..100 {
        let haar = linalg::haar_unitary(m, rng);
        let iso = haar.columns(0, r);
        let alpha = &scaled * iso.transpose();
        let weights: Vec<f64> = alpha.column_iter().map(|c| c.norm_squared()).collect();
        if weights.iter().all(|&w| w > NEGLIGIBLE_WEIGHT) {
            let members = alpha
                .column_iter()
                .zip(weights)
                .map(|(c, w)| Member { weight: w, state: PureState::from_parts(st.clone(), c.unscale(w.sqrt())) })
                .collect();
            return Ok(Ensemble::from_parts(st, members));
        }
    }
    Err(GmeError::DegenerateInput("could not draw a decomposition with strictly positive weights".into()))
}

/// `m` random product states with flat-Dirichlet weights.
pub fn random_separable_ensemble<R: Rng + ?Sized>(structure: &HilbertStructure, m: usize, rng: &mut R) -> Result<Ensemble<ProductState>> {
    if m == 0 {
        return invalid("ensemble size must be >= 1");
    }
    let raw: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1).max(f64::MIN_POSITIVE)).collect();
    let total: f64 = raw.iter().sum();
    let members = raw
        .into_iter()
        .map(|w| Member { weight: w / total, state: ProductState::random(structure, rng) })
        .collect();
    Ok(Ensemble::from_parts(structure.clone(), members))
}

/// Worst invariant violations seen during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// `max |sum_i p_i |psi_i><psi_i| - rho|_F` over all iterations.
    pub max_rho_residual: f64,
    /// `max |A - sqrt(A A^dagger) U^dagger|_F`.
    pub max_polar_residual: f64,
    /// `max |U U^dagger - I|_F`.
    pub max_unitarity_residual: f64,
}

/// Outcome of one restart.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub fidelity: f64,
    pub state: IterationState,
    /// Fidelity after each polar step.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub final_gain: f64,
    pub diagnostics: Option<Diagnostics>,
}

impl RunOutcome {
    /// Number of update rounds performed.
    pub fn iterations(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }

    /// Largest drop between consecutive fidelities (0 for a monotone trace).
    pub fn max_decrease(&self) -> f64 {
        self.trace.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }
}

/// Runs the fixed-point iteration from a given pair of ensembles.
pub fn iterate_from(rho: &DensityOperator, init: IterationState, config: &AlgorithmConfig) -> Result<RunOutcome> {
    config.validate()?;
    if init.rho_ensemble.structure() != rho.structure() {
        return invalid("initial ensembles do not match the structure of rho");
    }
    let inner = config.inner();
    let mut state = init;
    let mut trace = Vec::new();
    let mut diag = config.track_invariants.then(Diagnostics::default);
    if let Some(dg) = diag.as_mut() {
        dg.max_rho_residual = (state.rho_ensemble.mixture() - rho.matrix()).norm();
    }
    let mut converged = false;
    let mut final_gain = f64::INFINITY;

    loop {
        let polar = polar_step(&state);
        let f = polar.overlap * polar.overlap;
        if let Some(dg) = diag.as_mut() {
            dg.max_polar_residual = dg.max_polar_residual.max(polar.identity_residual(&state.coupling_matrix));
            dg.max_unitarity_residual = dg.max_unitarity_residual.max(linalg::unitarity_defect(&polar.unitary));
        }
        state.mixing_unitary = polar.unitary.clone();
        state.overlap_sq = f;
        if let Some(&prev) = trace.last() {
            final_gain = f - prev;
        }
        trace.push(f);
        if trace.len() >= 2 && final_gain <= config.epsilon {
            converged = true;
            break;
        }
        if trace.len() > config.max_iterations {
            break;
        }

        let update = state_update_step(&polar.unitary, &state.rho_ensemble, &state.sep_ensemble, &inner)?;
        if let Some(dg) = diag.as_mut() {
            let r = (update.rho_ensemble.mixture() - rho.matrix()).norm();
            dg.max_rho_residual = dg.max_rho_residual.max(r);
        }
        let q = weights_from_overlaps(&update.rho_ensemble.weights(), &update.overlaps_sq)?;
        let st = rho.structure().clone();
        let sep = Ensemble::from_parts(
            st,
            q.into_iter().zip(update.products).map(|(weight, state)| Member { weight, state }).collect(),
        );
        state = IterationState::new(update.rho_ensemble, sep)?;
    }

    Ok(RunOutcome {
        fidelity: *trace.last().expect("at least one polar step"),
        state,
        trace,
        converged,
        final_gain,
        diagnostics: diag,
    })
}

fn run_restart(rho: &DensityOperator, m: usize, config: &AlgorithmConfig, rng: &mut GmeRng) -> Result<RunOutcome> {
    let rho_ens = random_rho_decomposition(rho, m, rng)?;
    let sep_ens = random_separable_ensemble(rho.structure(), m, rng)?;
    iterate_from(rho, IterationState::new(rho_ens, sep_ens)?, config)
}

#[derive(Debug, Clone, Serialize)]
pub struct RestartSummary {
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_gain: f64,
    pub max_decrease: f64,
    pub diagnostics: Option<Diagnostics>,
    /// Error message when the restart failed (degenerate draw).
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GmEstimate {
    /// `1 - fidelity`; an upper bound on the GME across the cut.
    pub gme_upper: f64,
    /// `F(rho, sigma')` from the purification overlap.
    pub fidelity: f64,
    /// `F(rho, sigma')` recomputed from the matrices.
    pub direct_fidelity: f64,
    /// Product ensemble defining `sigma'`, on the block structure of the cut
    /// (one party per block, blocks in partition order).
    pub closest_separable: Ensemble<ProductState>,
    /// Number of update rounds of the winning restart.
    pub iterations: usize,
    /// Fidelity after every polar step of the winning restart.
    pub trace: Vec<f64>,
    pub converged: bool,
    pub final_gain: f64,
    pub restart_index: usize,
    pub restarts: Vec<RestartSummary>,
    cut: Partition,
    original: HilbertStructure,
}

impl GmEstimate {
    /// `sigma'` expressed on the original parties of `rho`.
    pub fn closest_separable_density(&self) -> DensityOperator {
        let grouped = self.closest_separable.to_density();
        if self.cut.is_trivial() {
            return grouped;
        }
        let ungrouped = DensityOperator::from_parts(self.original.select(&self.cut.permutation()), grouped.into_matrix());
        let perm = self.cut.permutation();
        let mut inverse = vec![0; perm.len()];
        for (j, &p) in perm.iter().enumerate() {
            inverse[p] = j;
        }
        ungrouped
            .permute_and_group(&inverse, &vec![1; perm.len()])
            .expect("inverse of a valid permutation")
    }

    /// Largest fidelity decrease over every restart.
    pub fn max_decrease(&self) -> f64 {
        self.restarts.iter().map(|r| r.max_decrease).fold(0.0, f64::max)
    }
}

/// Upper bound on the GME of `rho` with respect to the partition `cut`.
///
/// Every restart draws a random decomposition of `rho` and a random product
/// ensemble from its own seed stream; the restart with the largest fidelity
/// wins. Failed restarts (degenerate draws) are skipped unless all fail.
pub fn gme_mixed(rho: &DensityOperator, cut: &Partition, config: &AlgorithmConfig) -> Result<GmEstimate> {
    config.validate()?;
    if cut.n_blocks() < 2 {
        return invalid("cut must have at least two blocks");
    }
    let n = rho.structure().n_parties();
    if cut.blocks().iter().flatten().count() != n || cut.blocks().iter().flatten().any(|&p| p >= n) {
        return invalid("cut does not partition the parties of rho");
    }
    let grouped = if cut.is_trivial() {
        rho.clone()
    } else {
        rho.permute_and_group(&cut.permutation(), &cut.block_sizes())?
    };
    let m = config.ensemble_size_for(grouped.structure());

    let outcomes: Vec<Result<RunOutcome>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(&grouped, m, config, &mut child_rng(config.seed, r as u64)))
        .collect();

    let summaries: Vec<RestartSummary> = outcomes
        .iter()
        .map(|o| match o {
            Ok(o) => RestartSummary {
                fidelity: o.fidelity,
                iterations: o.iterations(),
                converged: o.converged,
                final_gain: o.final_gain,
                max_decrease: o.max_decrease(),
                diagnostics: o.diagnostics,
                error: None,
            },
            Err(e) => RestartSummary {
                fidelity: f64::NAN,
                iterations: 0,
                converged: false,
                final_gain: f64::NAN,
                max_decrease: 0.0,
                diagnostics: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let mut best: Option<(usize, RunOutcome)> = None;
    let mut first_err = None;
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(o) => {
                if best.as_ref().is_none_or(|(_, b)| o.fidelity > b.fidelity) {
                    best = Some((k, o));
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let Some((restart_index, run)) = best else {
        return Err(first_err.expect("no outcome without an error"));
    };
    let sigma = run.state.sep_ensemble.to_density();
    let direct_fidelity = fidelity(&grouped, &sigma)?;
    let fid = run.fidelity.min(1.0);
    Ok(GmEstimate {
        gme_upper: 1.0 - fid,
        fidelity: fid,
        direct_fidelity,
        iterations: run.iterations(),
        converged: run.converged,
        final_gain: run.final_gain,
        closest_separable: run.state.sep_ensemble,
        trace: run.trace,
        restart_index,
        restarts: summaries,
        cut: cut.clone(),
        original: rho.structure().clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use crate::states;
    use crate::Complex64;

    fn random_state_2q(seed: u64) -> DensityOperator {
        states::random_density(&HilbertStructure::qubits(2), 4, &mut rng_from_seed(seed)).unwrap()
    }

    fn initial(rho: &DensityOperator, m: usize, seed: u64) -> IterationState {
        let mut rng = rng_from_seed(seed);
        let a = random_rho_decomposition(rho, m, &mut rng).unwrap();
        let b = random_separable_ensemble(rho.structure(), m, &mut rng).unwrap();
        IterationState::new(a, b).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(AlgorithmConfig::default().validate().is_ok());
        assert!(AlgorithmConfig { epsilon: 0.0, ..Default::default() }.validate().is_err());
        assert!(AlgorithmConfig { restarts: 0, ..Default::default() }.validate().is_err());
        assert!(AlgorithmConfig { ensemble_size: Some(0), ..Default::default() }.validate().is_err());
    }

    #[test]
    fn decomposition_of_pure_state() {
        let psi = states::ghz(3);
        let ens = random_rho_decomposition(&psi.density(), 1, &mut rng_from_seed(1)).unwrap();
        assert_eq!(ens.len(), 1);
        assert!((ens.members()[0].state.inner(&psi).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_reproduces_rho() {
        let st = HilbertStructure::qubits(1);
        let mixed = DensityOperator::maximally_mixed(st);
        let ens = random_rho_decomposition(&mixed, 4, &mut rng_from_seed(2)).unwrap();
        assert!((ens.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((ens.mixture() - mixed.matrix()).norm() < 1e-10);

        let iso = states::isotropic3(0.5).unwrap();
        let ens = random_rho_decomposition(&iso, 64, &mut rng_from_seed(3)).unwrap();
        assert!(ens.weights().iter().all(|&w| w > 0.0));
        assert!((ens.mixture() - iso.matrix()).norm() < 1e-10);
    }

    #[test]
    fn decomposition_below_rank_fails() {
        let iso = states::isotropic3(0.5).unwrap();
        assert!(random_rho_decomposition(&iso, 7, &mut rng_from_seed(3)).is_err());
    }

    #[test]
    fn separable_ensemble_properties() {
        let st = HilbertStructure::qubits(3);
        let one = random_separable_ensemble(&st, 1, &mut rng_from_seed(1)).unwrap();
        assert_eq!(one.weights(), vec![1.0]);
        let ens = random_separable_ensemble(&st, 64, &mut rng_from_seed(4)).unwrap();
        assert!(ens.weights().iter().all(|&w| w > 0.0));
        assert!((ens.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let again = random_separable_ensemble(&st, 64, &mut rng_from_seed(4)).unwrap();
        assert_eq!(ens, again);
    }

    #[test]
    fn polar_of_psd_coupling_is_identity() {
        // rho = |00><00| with both ensembles the single state |00>
        let st = HilbertStructure::qubits(2);
        let psi = PureState::basis(st.clone(), &[0, 0]).unwrap();
        let phi = ProductState::basis(st.clone(), &[0, 0]).unwrap();
        let state = IterationState::new(
            Ensemble::new(st.clone(), vec![Member { weight: 1.0, state: psi }]).unwrap(),
            Ensemble::new(st, vec![Member { weight: 1.0, state: phi }]).unwrap(),
        )
        .unwrap();
        let p = polar_step(&state);
        assert!((p.unitary[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((p.overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polar_of_diagonal() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)]));
        let dec = svd(&a);
        let u = dec.w.adjoint() * dec.v.adjoint();
        assert!((u - CMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn polar_overlap_matches_fidelity() {
        for seed in 0..5 {
            let rho = random_state_2q(seed);
            let state = initial(&rho, 16, 100 + seed);
            let p = polar_step(&state);
            let sigma = state.sep_ensemble.to_density();
            let f = fidelity(&rho, &sigma).unwrap();
            assert!((p.overlap * p.overlap - f).abs() < 1e-8);
            assert!(p.identity_residual(&state.coupling_matrix) < 1e-8);
        }
    }

    #[test]
    fn polar_beats_random_unitaries() {
        let rho = random_state_2q(9);
        let state = initial(&rho, 16, 10);
        let p = polar_step(&state);
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let u = linalg::haar_unitary(16, &mut rng);
            let ov = (&state.coupling_matrix * u).trace().norm();
            assert!(ov <= p.overlap + 1e-10);
        }
    }

    #[test]
    fn identity_update_keeps_states() {
        let rho = random_state_2q(1);
        let state = initial(&rho, 16, 2);
        let upd = state_update_step(&CMatrix::identity(16, 16), &state.rho_ensemble, &state.sep_ensemble, &InnerConfig::default()).unwrap();
        for (a, b) in upd.rho_ensemble.members().iter().zip(state.rho_ensemble.members()) {
            assert!((a.weight - b.weight).abs() < 1e-14);
            assert!((a.state.inner(&b.state).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn update_preserves_mixture() {
        let rho = random_state_2q(3);
        let state = initial(&rho, 16, 4);
        let u = linalg::haar_unitary(16, &mut rng_from_seed(5));
        let upd = state_update_step(&u, &state.rho_ensemble, &state.sep_ensemble, &InnerConfig::default()).unwrap();
        assert!((upd.rho_ensemble.mixture() - rho.matrix()).norm() < 1e-10);
    }

    #[test]
    fn update_on_product_state_reaches_overlap_one() {
        let st = HilbertStructure::qubits(3);
        let prod = ProductState::random(&st, &mut rng_from_seed(6)).to_pure();
        let state = initial(&prod.density(), 4, 7);
        let u = linalg::haar_unitary(4, &mut rng_from_seed(8));
        let upd = state_update_step(&u, &state.rho_ensemble, &state.sep_ensemble, &InnerConfig::default()).unwrap();
        for (m, o) in upd.rho_ensemble.members().iter().zip(&upd.overlaps_sq) {
            if m.weight > 0.0 {
                assert!((o - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn probability_examples() {
        assert_eq!(weights_from_overlaps(&[1.0], &[0.3]).unwrap(), vec![1.0]);
        assert_eq!(weights_from_overlaps(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let q = weights_from_overlaps(&[0.5, 0.5], &[0.5, 0.25]).unwrap();
        assert!((q[0] - 2.0 / 3.0).abs() < 1e-15 && (q[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(weights_from_overlaps(&[0.5, 0.5], &[0.0, 0.0]), Err(GmeError::DegenerateInput(_))));
    }

    #[test]
    fn probability_step_is_optimal() {
        // overlap sum_i sqrt(q_i p_i) |<phi_i|psi_i>| is maximized by q
        let mut rng = rng_from_seed(20);
        let p = [0.2, 0.5, 0.3];
        let o = [0.9, 0.4, 0.7];
        let q = weights_from_overlaps(&p, &o).unwrap();
        let value = |q: &[f64]| q.iter().zip(&p).zip(&o).map(|((q, p), o)| (q * p * o).sqrt()).sum::<f64>();
        let best = value(&q);
        for _ in 0..200 {
            let raw: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let alt: Vec<f64> = raw.iter().map(|r| r / s).collect();
            assert!(value(&alt) <= best + 1e-15);
        }
    }

    #[test]
    fn probability_step_from_states() {
        let st = HilbertStructure::qubits(2);
        let s = vec![PureState::basis(st.clone(), &[0, 0]).unwrap(), PureState::basis(st.clone(), &[1, 1]).unwrap()];
        let prods = vec![ProductState::basis(st.clone(), &[0, 0]).unwrap(), ProductState::basis(st, &[0, 1]).unwrap()];
        assert_eq!(probability_step(&[0.5, 0.5], &s, &prods).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn product_state_has_zero_gme() {
        let st = HilbertStructure::qubits(2);
        let prod = ProductState::random(&st, &mut rng_from_seed(1)).to_pure().density();
        let cfg = AlgorithmConfig { restarts: 1, ..Default::default() };
        let est = gme_mixed(&prod, &Partition::parties(2), &cfg).unwrap();
        assert!(est.gme_upper <= 1e-10);
    }

    #[test]
    fn trace_is_monotone_and_tracked() {
        let rho = random_state_2q(30);
        let cfg = AlgorithmConfig { epsilon: 1e-13, restarts: 2, track_invariants: true, ..Default::default() };
        let est = gme_mixed(&rho, &Partition::parties(2), &cfg).unwrap();
        assert!(est.max_decrease() <= 1e-12);
        for r in &est.restarts {
            let d = r.diagnostics.unwrap();
            assert!(d.max_rho_residual <= 1e-10);
            assert!(d.max_polar_residual <= 1e-8);
        }
        assert!((est.direct_fidelity - est.fidelity).abs() < 1e-7);
        let exact = states::two_qubit_eg(&rho).unwrap();
        assert!(est.gme_upper >= exact - 1e-8);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let rho = random_state_2q(31);
        let cfg = AlgorithmConfig { restarts: 2, seed: 5, ..Default::default() };
        let a = gme_mixed(&rho, &Partition::parties(2), &cfg).unwrap();
        let b = gme_mixed(&rho, &Partition::parties(2), &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.closest_separable, b.closest_separable);
    }

    #[test]
    fn nontrivial_cut_density_is_on_original_parties() {
        let st = HilbertStructure::qubits(3);
        let rho = states::random_density(&st, 2, &mut rng_from_seed(40)).unwrap();
        let cut = Partition::new(3, vec![vec![1], vec![0, 2]]).unwrap();
        let cfg = AlgorithmConfig { restarts: 1, ensemble_size: Some(8), epsilon: 1e-9, ..Default::default() };
        let est = gme_mixed(&rho, &cut, &cfg).unwrap();
        let sigma = est.closest_separable_density();
        assert_eq!(sigma.structure(), rho.structure());
        assert!((fidelity(&rho, &sigma).unwrap() - est.fidelity).abs() < 1e-7);
    }

    #[test]
    fn single_block_cut_is_rejected() {
        let rho = random_state_2q(1);
        let cut = Partition::new(2, vec![vec![0, 1]]).unwrap();
        assert!(gme_mixed(&rho, &cut, &AlgorithmConfig::default()).is_err());
    }
}
