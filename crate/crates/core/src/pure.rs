//! Geometric measure of entanglement for pure states.
//!
//! Bipartite states have a closed form through the largest Schmidt
//! coefficient. For more parties the closest product state is approached by
//! cyclic single-party updates: with all other local vectors fixed, the best
//! local vector is the normalized contraction of the state against them.
//! The fixed point of that iteration also yields a generalized Schmidt
//! decomposition.

use crate::error::{invalid, Result};
use crate::linalg::hermitian_eig;
use crate::rng::child_rng;
use crate::tensor::{contract_all_but, partial_trace, Partition, ProductState, PureState, Regroup};
use crate::{CMatrix, CVector, HilbertStructure};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: usize = 10_000;
/// Contractions with norm below this leave the local vector unchanged.
pub const ZERO_CONTRACTION: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct PureGmResult {
    /// `1 - overlap_sq`.
    pub gme: f64,
    pub closest_product: ProductState,
    /// `|<phi|psi>|^2` for the returned product state.
    pub overlap_sq: f64,
    /// Full sweeps performed (zero for the closed-form bipartite answer).
    pub iterations: usize,
    /// Norm of the single-excitation overlaps at the returned product state;
    /// zero exactly at a fixed point of the iteration.
    pub residual: f64,
    /// `overlap_sq` after each sweep.
    pub history: Vec<f64>,
}

fn stationarity_residual(amps: &CVector, dims: &[usize], locals: &[CVector]) -> f64 {
    let mut acc = 0.0;
    for k in 0..dims.len() {
        let c = contract_all_but(amps, dims, locals, k);
        let along = locals[k].dotc(&c);
        acc += (c - &locals[k] * along).norm_squared();
    }
    acc.sqrt()
}

/// One ascending sweep of local updates. Returns `|<phi|psi>|^2` afterwards.
fn sweep(amps: &CVector, dims: &[usize], locals: &mut [CVector]) -> f64 {
    for k in 0..dims.len() {
        let c = contract_all_but(amps, dims, locals, k);
        let norm = c.norm();
        if norm > ZERO_CONTRACTION {
            locals[k] = c.unscale(norm);
        }
    }
    let last = dims.len() - 1;
    locals[last].dotc(&contract_all_but(amps, dims, locals, last)).norm_sqr()
}

fn overlap_sq(amps: &CVector, dims: &[usize], locals: &[CVector]) -> f64 {
    let last = dims.len() - 1;
    locals[last].dotc(&contract_all_but(amps, dims, locals, last)).norm_sqr()
}

/// Closed-form GME of a pure state across the cut `block_a | rest`.
///
/// `gme = 1 - lambda_max^2` with `lambda_max` the largest Schmidt coefficient.
/// The returned product state lives on the two-block structure (block A
/// first, parties in the order listed, then the rest ascending).
pub fn bipartite_pure_gme(psi: &PureState, block_a: &[usize]) -> Result<PureGmResult> {
    let n = psi.structure().n_parties();
    let cut = Partition::bipartition(n, block_a)?;
    let grouped = psi.permute_and_group(&cut.permutation(), &cut.block_sizes())?;
    let dims = grouped.structure().dims().to_vec();
    let (da, db) = (dims[0], dims[1]);
    let m = CMatrix::from_row_slice(da, db, grouped.amplitudes().as_slice());

    let rho_a = &m * m.adjoint();
    let eig = hermitian_eig(&rho_a)?;
    let phi_a: CVector = eig.vectors.column(0).into_owned();
    // <phi_a| psi> on block B; its norm is the largest Schmidt coefficient
    let c = m.transpose() * phi_a.conjugate();
    let norm = c.norm();
    let phi_b = if norm > ZERO_CONTRACTION {
        c.unscale(norm)
    } else {
        eig.vectors.column(0).into_owned().resize_vertically(db, num_complex::Complex64::new(0.0, 0.0))
    };
    let locals = vec![phi_a, phi_b];
    let residual = stationarity_residual(grouped.amplitudes(), &dims, &locals);
    let ov = (norm * norm).min(1.0);
    Ok(PureGmResult {
        gme: 1.0 - ov,
        closest_product: ProductState::from_parts(grouped.structure().clone(), locals),
        overlap_sq: ov,
        iterations: 0,
        residual,
        history: vec![],
    })
}

/// Alternating closest-product-state iteration from `init`.
///
/// Parties are updated in ascending order; a sweep is one pass over all
/// parties. Iteration stops once the overlap gain of a sweep drops below
/// `tol` or after `max_sweeps` sweeps.
pub fn closest_product_iterate(
    psi: &PureState,
    init: &ProductState,
    max_sweeps: usize,
    tol: f64,
) -> Result<PureGmResult> {
    if init.structure() != psi.structure() {
        return invalid("closest_product_iterate: initial product state has a different structure");
    }
    let dims = psi.structure().dims().to_vec();
    let amps = psi.amplitudes();
    let mut locals = init.locals().to_vec();
    let mut prev = overlap_sq(amps, &dims, &locals);
    let mut history = Vec::new();
    for _ in 0..max_sweeps.max(1) {
        let ov = sweep(amps, &dims, &mut locals);
        history.push(ov);
        if ov - prev < tol {
            break;
        }
        prev = ov;
    }
    let ov = history.last().copied().unwrap_or(prev).min(1.0);
    Ok(PureGmResult {
        gme: 1.0 - ov,
        residual: stationarity_residual(amps, &dims, &locals),
        closest_product: ProductState::from_parts(psi.structure().clone(), locals),
        overlap_sq: ov,
        iterations: history.len(),
        history,
    })
}

/// Best of `restarts` iterations from random product states. For two-party
/// states the closed-form answer is included as an extra candidate.
pub fn pure_gme_multirestart(
    psi: &PureState,
    restarts: usize,
    seed: u64,
    tol: f64,
    max_sweeps: usize,
) -> Result<PureGmResult> {
    if restarts == 0 {
        return invalid("pure_gme_multirestart: restarts must be >= 1");
    }
    let mut best: Option<PureGmResult> = None;
    if psi.structure().n_parties() == 2 {
        best = Some(bipartite_pure_gme(psi, &[0])?);
    }
    for r in 0..restarts {
        let mut rng = child_rng(seed, r as u64);
        let init = ProductState::random(psi.structure(), &mut rng);
        let res = closest_product_iterate(psi, &init, max_sweeps, tol)?;
        if best.as_ref().is_none_or(|b| res.overlap_sq > b.overlap_sq) {
            best = Some(res);
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Product-basis expansion with every single-excitation coefficient removed.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub structure: HilbertStructure,
    /// Per party, an orthonormal basis stored as matrix columns; column 0 is
    /// the local vector of the converged closest product state.
    pub local_bases: Vec<CMatrix>,
    /// Coefficients over the product basis (row-major multi-index), scaled
    /// to unit norm.
    pub coefficients: CVector,
    /// Norm of the retained coefficients before rescaling.
    pub normalization: f64,
    /// Trace distance between the input and the reconstructed state.
    pub distance: f64,
    /// Largest modulus among the removed (zero-pattern) overlaps.
    pub max_pattern_overlap: f64,
    pub sweeps: usize,
    pub converged: bool,
}

impl SchmidtDecomposition {
    pub fn coefficient(&self, idx: &[usize]) -> num_complex::Complex64 {
        self.coefficients[self.structure.linear_index(idx)]
    }

    /// Whether `idx` is forced to zero: all entries equal some `i` except
    /// exactly one entry `j > i`.
    pub fn is_zero_pattern(idx: &[usize]) -> bool {
        let Some(&min) = idx.iter().min() else { return false };
        idx.len() >= 2 && idx.iter().filter(|&&x| x != min).count() == 1
    }

    pub fn reconstruct(&self) -> PureState {
        let amps = apply_local(&self.coefficients, self.structure.dims(), &self.local_bases);
        PureState::normalized(self.structure.clone(), amps).expect("nonzero coefficients")
    }
}

/// Applies `ops[k]` to party `k` of a row-major tensor.
fn apply_local(amps: &CVector, dims: &[usize], ops: &[CMatrix]) -> CVector {
    let mut cur = amps.clone();
    let total: usize = dims.iter().product();
    for (k, op) in ops.iter().enumerate() {
        let d = dims[k];
        let right: usize = dims[k + 1..].iter().product();
        let left = total / (d * right);
        let mut next = CVector::zeros(total);
        for l in 0..left {
            for r in 0..right {
                for a in 0..d {
                    let mut acc = num_complex::Complex64::new(0.0, 0.0);
                    for b in 0..d {
                        acc += op[(a, b)] * cur[(l * d + b) * right + r];
                    }
                    next[(l * d + a) * right + r] = acc;
                }
            }
        }
        cur = next;
    }
    cur
}

/// Top eigenvector of each single-party reduced state; a deterministic
/// starting point for the Schmidt iterations.
fn dominant_locals(psi: &PureState) -> Result<Vec<CVector>> {
    let rho = psi.density();
    (0..psi.structure().n_parties())
        .map(|k| Ok(hermitian_eig(partial_trace(&rho, &[k])?.matrix())?.vectors.column(0).into_owned()))
        .collect()
}

/// Sweeps until the stationarity residual drops to `target` (or the sweep
/// budget is exhausted). Returns the achieved residual and sweep count.
fn converge_residual(amps: &CVector, dims: &[usize], locals: &mut [CVector], target: f64, max_sweeps: usize) -> (f64, usize) {
    let mut residual = stationarity_residual(amps, dims, locals);
    let mut sweeps = 0;
    while residual > target && sweeps < max_sweeps {
        sweep(amps, dims, locals);
        sweeps += 1;
        residual = stationarity_residual(amps, dims, locals);
    }
    (residual, sweeps)
}

/// Extends orthonormal `vectors` in `C^d` to a full basis by Gram-Schmidt
/// against canonical basis vectors, taking the best-conditioned one each time.
fn complete_basis(mut vectors: Vec<CVector>, d: usize) -> CMatrix {
    while vectors.len() < d {
        let mut best: Option<(f64, CVector)> = None;
        for e in 0..d {
            let mut v = CVector::zeros(d);
            v[e] = num_complex::Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for u in &vectors {
                    let proj = u.dotc(&v);
                    v -= u * proj;
                }
            }
            let n = v.norm();
            if best.as_ref().is_none_or(|b| n > b.0 + 1e-12) {
                best = Some((n, v));
            }
        }
        let (n, v) = best.expect("d > 0");
        vectors.push(v.unscale(n));
    }
    let mut m = CMatrix::zeros(d, d);
    for (k, v) in vectors.iter().enumerate() {
        m.set_column(k, v);
    }
    m
}

fn finish_decomposition(psi: &PureState, bases: Vec<Vec<CVector>>, sweeps: usize, tol: f64) -> SchmidtDecomposition {
    let st = psi.structure().clone();
    let local_bases: Vec<CMatrix> = bases.into_iter().zip(st.dims()).map(|(b, &d)| complete_basis(b, d)).collect();
    let adjoints: Vec<CMatrix> = local_bases.iter().map(|b| b.adjoint()).collect();
    let mut coeffs = apply_local(psi.amplitudes(), st.dims(), &adjoints);

    let mut removed = 0.0;
    let mut max_pattern: f64 = 0.0;
    for k in 0..coeffs.len() {
        if SchmidtDecomposition::is_zero_pattern(&st.multi_index(k)) {
            removed += coeffs[k].norm_sqr();
            max_pattern = max_pattern.max(coeffs[k].norm());
            coeffs[k] = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    let normalization = coeffs.norm();
    let distance = removed.sqrt();
    SchmidtDecomposition {
        structure: st,
        local_bases,
        coefficients: coeffs.unscale(normalization),
        normalization,
        distance,
        max_pattern_overlap: max_pattern,
        sweeps,
        converged: distance <= tol,
    }
}

/// Generalized Schmidt decomposition of a multi-qubit state to trace-distance
/// precision `tol`.
pub fn generalized_schmidt(psi: &PureState, tol: f64, max_sweeps: usize) -> Result<SchmidtDecomposition> {
    if psi.structure().dims().iter().any(|&d| d != 2) {
        return invalid("generalized_schmidt: all parties must be qubits, use generalized_schmidt_qudit");
    }
    let dims = psi.structure().dims().to_vec();
    let mut locals = dominant_locals(psi)?;
    let (_, sweeps) = converge_residual(psi.amplitudes(), &dims, &mut locals, tol, max_sweeps);
    let bases = locals.into_iter().map(|v| vec![v]).collect();
    Ok(finish_decomposition(psi, bases, sweeps, tol))
}

/// Generalized Schmidt decomposition for arbitrary local dimensions.
///
/// The `|0>` vectors come from the closest-product iteration on the state.
/// Each further level removes the span of the basis vectors found so far from
/// every party (the full-product, pairwise and single-party overlaps are
/// subtracted in turn) and reruns the iteration on what is left, which fixes
/// the next basis vector of every party.
pub fn generalized_schmidt_qudit(psi: &PureState, tol: f64, max_sweeps: usize) -> Result<SchmidtDecomposition> {
    let st = psi.structure().clone();
    let dims = st.dims().to_vec();
    let n = dims.len();
    let max_dim = *dims.iter().max().expect("nonempty");
    let level_target = tol / ((max_dim - 1) as f64).sqrt();

    let mut locals = dominant_locals(psi)?;
    let (_, mut sweeps) = converge_residual(psi.amplitudes(), &dims, &mut locals, level_target, max_sweeps);
    let mut bases: Vec<Vec<CVector>> = locals.into_iter().map(|v| vec![v]).collect();

    loop {
        let remaining: Vec<usize> = (0..n).map(|k| dims[k] - bases[k].len()).collect();
        // once a party is exhausted no further full-rank level exists; when
        // every complement is one-dimensional the next vectors are forced
        if remaining.contains(&0) || remaining.iter().all(|&r| r == 1) {
            break;
        }
        let residual_state = project_out(psi.amplitudes(), &dims, &bases);
        let scale = residual_state.norm();
        if scale < 1e-14 {
            break;
        }
        let level_state = PureState::normalized(st.clone(), residual_state)?;
        let mut level_locals = dominant_locals(&level_state)?;
        let (_, s) = converge_residual(level_state.amplitudes(), &dims, &mut level_locals, level_target / scale, max_sweeps);
        sweeps += s;
        for (b, v) in bases.iter_mut().zip(level_locals) {
            // re-orthogonalize against rounding drift
            let mut v = v;
            for u in b.iter() {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
            let norm = v.norm();
            b.push(v.unscale(norm));
        }
    }
    Ok(finish_decomposition(psi, bases, sweeps, tol))
}

/// `prod_k (I - P_k) psi` where `P_k` projects party `k` onto the span of
/// `bases[k]`.
fn project_out(amps: &CVector, dims: &[usize], bases: &[Vec<CVector>]) -> CVector {
    let ops: Vec<CMatrix> = bases
        .iter()
        .zip(dims)
        .map(|(b, &d)| {
            let mut p = CMatrix::identity(d, d);
            for v in b {
                p -= v * v.adjoint();
            }
            p
        })
        .collect();
    apply_local(amps, dims, &ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use crate::rng::rng_from_seed;
    use crate::tensor::pure_trace_distance;
    use num_complex::Complex64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn state(dims: Vec<usize>, entries: &[(usize, f64)]) -> PureState {
        let st = HilbertStructure::new(dims).unwrap();
        let mut a = CVector::zeros(st.total_dim());
        for &(k, v) in entries {
            a[k] = c(v);
        }
        PureState::normalized(st, a).unwrap()
    }

    fn random_state(dims: Vec<usize>, seed: u64) -> PureState {
        let st = HilbertStructure::new(dims).unwrap();
        let mut rng = rng_from_seed(seed);
        let a = CVector::from_fn(st.total_dim(), |_, _| complex_gaussian(&mut rng));
        PureState::normalized(st, a).unwrap()
    }

    #[test]
    fn bipartite_examples() {
        let prod = state(vec![2, 2], &[(1, 1.0)]);
        assert!(bipartite_pure_gme(&prod, &[0]).unwrap().gme.abs() < 1e-14);

        let bell = state(vec![2, 2], &[(0, 1.0), (3, 1.0)]);
        let r = bipartite_pure_gme(&bell, &[0]).unwrap();
        assert!((r.gme - 0.5).abs() < 1e-14);
        assert!((r.closest_product.overlap(&bell).norm_sqr() - 0.5).abs() < 1e-14);

        let skew = state(vec![2, 2], &[(0, 0.9f64.sqrt()), (3, 0.1f64.sqrt())]);
        let r = bipartite_pure_gme(&skew, &[0]).unwrap();
        assert!((r.gme - 0.1).abs() < 1e-14);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn bipartite_rejects_trivial_cut() {
        let bell = state(vec![2, 2], &[(0, 1.0), (3, 1.0)]);
        assert!(bipartite_pure_gme(&bell, &[0, 1]).is_err());
        assert!(bipartite_pure_gme(&bell, &[]).is_err());
    }

    #[test]
    fn bipartite_matches_singular_values() {
        let psi = random_state(vec![3, 4], 17);
        let m = CMatrix::from_row_slice(3, 4, psi.amplitudes().as_slice());
        let top = crate::linalg::svd(&m).d[0];
        let r = bipartite_pure_gme(&psi, &[0]).unwrap();
        assert!((r.overlap_sq - top * top).abs() < 1e-12);
        assert!(r.residual < 1e-10);
    }

    #[test]
    fn product_state_converges_in_one_sweep() {
        let mut rng = rng_from_seed(2);
        let st = HilbertStructure::qubits(3);
        let p = ProductState::random(&st, &mut rng);
        let r = closest_product_iterate(&p.to_pure(), &p, 100, DEFAULT_TOL).unwrap();
        assert!(r.gme.abs() < 1e-14);
        assert_eq!(r.iterations, 1);
    }

    #[test]
    fn ghz_from_near_000() {
        let ghz = state(vec![2, 2, 2], &[(0, 1.0), (7, 1.0)]);
        let tilt = |_: usize| CVector::from_vec(vec![c(0.99), c(0.01)]).normalize();
        let init = ProductState::new(HilbertStructure::qubits(3), (0..3).map(tilt).collect()).unwrap();
        let r = closest_product_iterate(&ghz, &init, 1000, DEFAULT_TOL).unwrap();
        assert!((r.gme - 0.5).abs() < 1e-10);
    }

    #[test]
    fn zero_contraction_keeps_local() {
        // <1 1| on parties 1,2 kills |000>; the party-0 vector must be kept
        let psi = state(vec![2, 2, 2], &[(0, 1.0)]);
        let init = ProductState::basis(HilbertStructure::qubits(3), &[0, 1, 1]).unwrap();
        let r = closest_product_iterate(&psi, &init, 5, DEFAULT_TOL).unwrap();
        assert!(r.overlap_sq >= 0.0);
        assert!(r.closest_product.locals().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sweeps_are_monotone() {
        for seed in 0..10 {
            let psi = random_state(vec![2, 2, 2, 2], 100 + seed);
            let init = ProductState::random(psi.structure(), &mut rng_from_seed(seed));
            let r = closest_product_iterate(&psi, &init, 5000, 1e-14).unwrap();
            assert!(r.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }

    #[test]
    fn multirestart_includes_exact_bipartite_candidate() {
        let psi = random_state(vec![2, 3], 5);
        let exact = bipartite_pure_gme(&psi, &[0]).unwrap();
        let best = pure_gme_multirestart(&psi, 3, 1, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert!((best.gme - exact.gme).abs() < 1e-10);
        assert!(pure_gme_multirestart(&psi, 0, 1, DEFAULT_TOL, 10).is_err());
    }

    #[test]
    fn multirestart_is_deterministic() {
        let psi = random_state(vec![2, 2, 2], 6);
        let a = pure_gme_multirestart(&psi, 4, 9, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        let b = pure_gme_multirestart(&psi, 4, 9, DEFAULT_TOL, DEFAULT_MAX_SWEEPS).unwrap();
        assert_eq!(a.overlap_sq, b.overlap_sq);
        assert_eq!(a.closest_product, b.closest_product);
    }

    #[test]
    fn zero_pattern_classification() {
        assert!(SchmidtDecomposition::is_zero_pattern(&[1, 0, 0]));
        assert!(SchmidtDecomposition::is_zero_pattern(&[0, 0, 1]));
        assert!(SchmidtDecomposition::is_zero_pattern(&[1, 2, 1]));
        assert!(SchmidtDecomposition::is_zero_pattern(&[0, 2, 0]));
        assert!(!SchmidtDecomposition::is_zero_pattern(&[1, 1, 0]));
        assert!(!SchmidtDecomposition::is_zero_pattern(&[0, 0, 0]));
        assert!(!SchmidtDecomposition::is_zero_pattern(&[0, 1, 2]));
    }

    #[test]
    fn schmidt_of_basis_state() {
        let psi = state(vec![2, 2, 2], &[(0, 1.0)]);
        let s = generalized_schmidt(&psi, 1e-10, 100).unwrap();
        assert!((s.coefficient(&[0, 0, 0]).norm() - 1.0).abs() < 1e-12);
        assert!(s.coefficients.iter().skip(1).all(|z| z.norm() < 1e-12));
        assert!(s.converged);
    }

    #[test]
    fn schmidt_of_ghz() {
        let psi = state(vec![2, 2, 2], &[(0, 1.0), (7, 1.0)]);
        let s = generalized_schmidt(&psi, 1e-10, 1000).unwrap();
        assert!(s.converged);
        let mags: Vec<f64> = s.coefficients.iter().map(|z| z.norm()).filter(|&m| m > 1e-8).collect();
        assert_eq!(mags.len(), 2);
        assert!(mags.iter().all(|m| (m - FRAC_1_SQRT_2).abs() < 1e-8));
        assert!(pure_trace_distance(&psi, &s.reconstruct()).unwrap() <= 1e-10);
    }

    #[test]
    fn schmidt_rejects_qutrits() {
        let psi = state(vec![3, 3, 3], &[(0, 1.0)]);
        assert!(generalized_schmidt(&psi, 1e-8, 10).is_err());
    }

    #[test]
    fn schmidt_random_three_qubit() {
        for seed in 0..5 {
            let psi = random_state(vec![2, 2, 2], 40 + seed);
            let s = generalized_schmidt(&psi, 1e-8, DEFAULT_MAX_SWEEPS).unwrap();
            assert!(s.converged, "seed {seed}: distance {}", s.distance);
            assert!(s.max_pattern_overlap <= 1e-8);
            let d = pure_trace_distance(&psi, &s.reconstruct()).unwrap();
            assert!(d <= 1e-8 && (d - s.distance).abs() < 1e-9, "seed {seed}: d {d:e} distance {:e}", s.distance);
            let total: f64 = s.coefficients.iter().map(|z| z.norm_sqr()).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for b in &s.local_bases {
                assert!(crate::linalg::unitarity_defect(b) < 1e-10);
            }
        }
    }

    #[test]
    fn qudit_matches_qubit_version() {
        let psi = random_state(vec![2, 2, 2], 77);
        let a = generalized_schmidt(&psi, 1e-9, DEFAULT_MAX_SWEEPS).unwrap();
        let b = generalized_schmidt_qudit(&psi, 1e-9, DEFAULT_MAX_SWEEPS).unwrap();
        assert!((a.coefficients.clone() - b.coefficients.clone()).norm() < 1e-10);
        for (x, y) in a.local_bases.iter().zip(&b.local_bases) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn qudit_product_state_has_single_coefficient() {
        let mut rng = rng_from_seed(3);
        let st = HilbertStructure::new(vec![3, 3, 3]).unwrap();
        let p = ProductState::random(&st, &mut rng).to_pure();
        let s = generalized_schmidt_qudit(&p, 1e-10, 100).unwrap();
        let nonzero = s.coefficients.iter().filter(|z| z.norm() > 1e-8).count();
        assert_eq!(nonzero, 1);
        assert!((s.coefficient(&[0, 0, 0]).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn qudit_random_three_qutrit() {
        let psi = random_state(vec![3, 3, 3], 88);
        let s = generalized_schmidt_qudit(&psi, 1e-6, DEFAULT_MAX_SWEEPS).unwrap();
        assert!(s.converged, "distance {}", s.distance);
        assert!(pure_trace_distance(&psi, &s.reconstruct()).unwrap() <= 1e-6);
        for b in &s.local_bases {
            assert!(crate::linalg::unitarity_defect(b) < 1e-10);
        }
    }
}
