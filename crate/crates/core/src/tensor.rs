//! Multipartite states and index arithmetic.
//!
//! Amplitudes and matrix entries are stored row-major over party indices with
//! the leftmost party varying slowest, so for dims `[d0, d1, d2]` the basis
//! state `|i j k>` lives at `i*d1*d2 + j*d2 + k`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::linalg::{self, hermitian_eig};
use crate::{CMatrix, CVector};

/// Tolerance on state normalization and ensemble weight sums.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance on Hermiticity, trace and positivity of density operators.
pub const DENSITY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertStructure {
    dims: Vec<usize>,
}

impl HilbertStructure {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return invalid("Hilbert structure needs at least one party");
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return invalid(format!("local dimension {d} < 2"));
        }
        Ok(HilbertStructure { dims })
    }

    pub fn qubits(n: usize) -> Self {
        HilbertStructure { dims: vec![2; n.max(1)] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Linear-index stride of each party.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn multi_index(&self, mut linear: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            idx[k] = linear % self.dims[k];
            linear /= self.dims[k];
        }
        idx
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    /// Structure of the listed parties, in the order given.
    pub fn select(&self, parties: &[usize]) -> HilbertStructure {
        HilbertStructure { dims: parties.iter().map(|&p| self.dims[p]).collect() }
    }

    /// Permuted structure: new party `j` is old party `perm[j]`.
    fn permuted(&self, perm: &[usize]) -> HilbertStructure {
        self.select(perm)
    }

    fn grouped(&self, blocks: &[usize]) -> HilbertStructure {
        let mut dims = Vec::with_capacity(blocks.len());
        let mut start = 0;
        for &b in blocks {
            dims.push(self.dims[start..start + b].iter().product());
            start += b;
        }
        HilbertStructure { dims }
    }
}

/// Common surface of anything carrying a state vector.
pub trait StateVector {
    fn structure(&self) -> &HilbertStructure;
    fn amplitudes(&self) -> CVector;
}

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    structure: HilbertStructure,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(structure: HilbertStructure, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != structure.total_dim() {
            return invalid(format!(
                "amplitude vector has length {}, structure needs {}",
                amplitudes.len(),
                structure.total_dim()
            ));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return invalid(format!("state not normalized (norm {norm})"));
        }
        Ok(PureState { structure, amplitudes })
    }

    /// Normalizes `amplitudes`; fails on the zero vector.
    pub fn normalized(structure: HilbertStructure, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != structure.total_dim() {
            return invalid("amplitude vector length does not match structure");
        }
        let norm = amplitudes.norm();
        if norm <= 1e-300 || !norm.is_finite() {
            return invalid("cannot normalize zero vector");
        }
        Ok(PureState { structure, amplitudes: amplitudes.unscale(norm) })
    }

    /// Computational basis state `|idx>`.
    pub fn basis(structure: HilbertStructure, idx: &[usize]) -> Result<Self> {
        if idx.len() != structure.n_parties() || idx.iter().zip(structure.dims()).any(|(&i, &d)| i >= d) {
            return invalid("basis index out of range");
        }
        let mut amps = CVector::zeros(structure.total_dim());
        amps[structure.linear_index(idx)] = ONE;
        Ok(PureState { structure, amplitudes: amps })
    }

    pub(crate) fn from_parts(structure: HilbertStructure, amplitudes: CVector) -> Self {
        debug_assert_eq!(amplitudes.len(), structure.total_dim());
        PureState { structure, amplitudes }
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, idx: &[usize]) -> Complex64 {
        self.amplitudes[self.structure.linear_index(idx)]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_parts(self.structure.clone(), self.projector())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.structure.dims.clone();
        dims.extend_from_slice(&other.structure.dims);
        PureState {
            structure: HilbertStructure { dims },
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }
}

impl StateVector for PureState {
    fn structure(&self) -> &HilbertStructure {
        &self.structure
    }
    fn amplitudes(&self) -> CVector {
        self.amplitudes.clone()
    }
}

/// Intermediate vector that is not required to be normalized, such as the
/// result of contracting a state against local vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct UnnormalizedState {
    pub structure: HilbertStructure,
    pub amplitudes: CVector,
}

impl UnnormalizedState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `None` when the vector is (numerically) zero.
    pub fn normalize(&self) -> Option<PureState> {
        let n = self.norm();
        (n > 1e-150).then(|| PureState::from_parts(self.structure.clone(), self.amplitudes.unscale(n)))
    }
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    structure: HilbertStructure,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(structure: HilbertStructure, matrix: CMatrix) -> Result<Self> {
        let d = structure.total_dim();
        if matrix.shape() != (d, d) {
            return invalid(format!("matrix is {:?}, structure needs {d}x{d}", matrix.shape()));
        }
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > DENSITY_TOL {
            return invalid(format!("density matrix not Hermitian (defect {defect:.3e})"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return invalid(format!("density matrix trace {tr} != 1"));
        }
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        let min_eig = hermitian_eig(&sym)?.values.last().copied().unwrap_or(0.0);
        if min_eig < -DENSITY_TOL {
            return invalid(format!("density matrix has negative eigenvalue {min_eig:.3e}"));
        }
        Ok(DensityOperator { structure, matrix: sym })
    }

    /// Symmetrizes and rescales a PSD matrix to unit trace, then validates.
    pub fn from_unnormalized(structure: HilbertStructure, matrix: CMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return invalid("matrix has non-positive trace");
        }
        let m = (&matrix + matrix.adjoint()).scale(0.5 / tr);
        Self::new(structure, m)
    }

    pub(crate) fn from_parts(structure: HilbertStructure, matrix: CMatrix) -> Self {
        DensityOperator { structure, matrix }
    }

    pub fn maximally_mixed(structure: HilbertStructure) -> Self {
        let d = structure.total_dim();
        DensityOperator { structure, matrix: CMatrix::identity(d, d).unscale(d as f64) }
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.structure.dims.clone();
        dims.extend_from_slice(&other.structure.dims);
        DensityOperator {
            structure: HilbertStructure { dims },
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        hermitian_eig(&self.matrix)
            .map(|e| e.values.iter().filter(|&&v| v > tol).count())
            .unwrap_or(0)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Fully product pure state, one unit vector per party.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    structure: HilbertStructure,
    locals: Vec<CVector>,
}

impl ProductState {
    pub fn new(structure: HilbertStructure, locals: Vec<CVector>) -> Result<Self> {
        if locals.len() != structure.n_parties() {
            return invalid("one local vector per party required");
        }
        for (k, (v, &d)) in locals.iter().zip(structure.dims()).enumerate() {
            if v.len() != d {
                return invalid(format!("local vector {k} has length {}, expected {d}", v.len()));
            }
            if (v.norm() - 1.0).abs() > NORM_TOL {
                return invalid(format!("local vector {k} not normalized"));
            }
        }
        Ok(ProductState { structure, locals })
    }

    pub(crate) fn from_parts(structure: HilbertStructure, locals: Vec<CVector>) -> Self {
        ProductState { structure, locals }
    }

    /// Computational basis product state.
    pub fn basis(structure: HilbertStructure, idx: &[usize]) -> Result<Self> {
        if idx.len() != structure.n_parties() || idx.iter().zip(structure.dims()).any(|(&i, &d)| i >= d) {
            return invalid("basis index out of range");
        }
        let locals = idx
            .iter()
            .zip(structure.dims())
            .map(|(&i, &d)| {
                let mut v = CVector::zeros(d);
                v[i] = ONE;
                v
            })
            .collect();
        Ok(ProductState { structure, locals })
    }

    pub fn random<R: rand::Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> Self {
        let locals = structure.dims().iter().map(|&d| linalg::random_unit_vector(d, rng)).collect();
        ProductState { structure: structure.clone(), locals }
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn locals(&self) -> &[CVector] {
        &self.locals
    }

    pub fn local(&self, party: usize) -> &CVector {
        &self.locals[party]
    }

    /// Full tensor-product amplitude vector.
    pub fn to_vector(&self) -> CVector {
        let mut v = CVector::from_element(1, ONE);
        for l in &self.locals {
            v = v.kronecker(l);
        }
        v
    }

    pub fn to_pure(&self) -> PureState {
        PureState::from_parts(self.structure.clone(), self.to_vector())
    }

    /// `<self|psi>`.
    pub fn overlap(&self, psi: &PureState) -> Complex64 {
        self.to_vector().dotc(psi.amplitudes())
    }
}

impl StateVector for ProductState {
    fn structure(&self) -> &HilbertStructure {
        &self.structure
    }
    fn amplitudes(&self) -> CVector {
        self.to_vector()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member<S> {
    pub weight: f64,
    pub state: S,
}

/// Weighted list of pure states with nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<S> {
    structure: HilbertStructure,
    members: Vec<Member<S>>,
}

impl<S: StateVector> Ensemble<S> {
    pub fn new(structure: HilbertStructure, members: Vec<Member<S>>) -> Result<Self> {
        if members.is_empty() {
            return invalid("ensemble must have at least one member");
        }
        if members.iter().any(|m| m.state.structure() != &structure) {
            return invalid("ensemble member structure mismatch");
        }
        if members.iter().any(|m| !(m.weight >= 0.0)) {
            return invalid("ensemble weights must be nonnegative");
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return invalid(format!("ensemble weights sum to {total}"));
        }
        Ok(Ensemble { structure, members })
    }

    pub(crate) fn from_parts(structure: HilbertStructure, members: Vec<Member<S>>) -> Self {
        Ensemble { structure, members }
    }

    pub fn structure(&self) -> &HilbertStructure {
        &self.structure
    }

    pub fn members(&self) -> &[Member<S>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.weight).collect()
    }

    /// `sum_i w_i |s_i><s_i|`.
    pub fn mixture(&self) -> CMatrix {
        let d = self.structure.total_dim();
        let mut rho = CMatrix::zeros(d, d);
        for m in &self.members {
            if m.weight == 0.0 {
                continue;
            }
            let v = m.state.amplitudes();
            rho.gerc(Complex64::new(m.weight, 0.0), &v, &v, ONE);
        }
        rho
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = self.mixture();
        DensityOperator::from_parts(self.structure.clone(), (&m + m.adjoint()).scale(0.5))
    }
}

/// Partition of parties into blocks; each block acts as one party when
/// deciding separability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n_parties: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n_parties];
        for b in &blocks {
            if b.is_empty() {
                return invalid("empty block in partition");
            }
            for &p in b {
                if p >= n_parties || seen[p] {
                    return invalid(format!("party {p} out of range or repeated in partition"));
                }
                seen[p] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return invalid("partition does not cover every party");
        }
        Ok(Partition { blocks })
    }

    /// Every party its own block (full separability).
    pub fn parties(n_parties: usize) -> Self {
        Partition { blocks: (0..n_parties).map(|p| vec![p]).collect() }
    }

    /// `block_a` versus the remaining parties.
    pub fn bipartition(n_parties: usize, block_a: &[usize]) -> Result<Self> {
        let rest: Vec<usize> = (0..n_parties).filter(|p| !block_a.contains(p)).collect();
        let p = Self::new(n_parties, vec![block_a.to_vec(), rest])?;
        if p.blocks.iter().any(|b| b.is_empty()) {
            return invalid("trivial bipartition");
        }
        Ok(p)
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn permutation(&self) -> Vec<usize> {
        self.blocks.concat()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// True when no reordering or grouping is needed.
    pub fn is_trivial(&self) -> bool {
        self.blocks.iter().enumerate().all(|(k, b)| b.len() == 1 && b[0] == k)
    }
}

/// `out[k]` is the new linear index of old linear index `k` after the party
/// permutation `perm` (new party `j` = old party `perm[j]`).
fn index_permutation(structure: &HilbertStructure, perm: &[usize]) -> Result<Vec<usize>> {
    let n = structure.n_parties();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return invalid("permutation length does not match number of parties");
    }
    for &p in perm {
        if p >= n || seen[p] {
            return invalid("permutation is not a bijection on parties");
        }
        seen[p] = true;
    }
    let new_structure = structure.permuted(perm);
    let new_strides = new_structure.strides();
    // stride, in the new layout, of each old party
    let mut stride_of_old = vec![0; n];
    for (j, &p) in perm.iter().enumerate() {
        stride_of_old[p] = new_strides[j];
    }
    Ok((0..structure.total_dim())
        .map(|k| {
            structure
                .multi_index(k)
                .iter()
                .zip(&stride_of_old)
                .map(|(i, s)| i * s)
                .sum()
        })
        .collect())
}

fn regrouped_structure(structure: &HilbertStructure, perm: &[usize], blocks: &[usize]) -> Result<HilbertStructure> {
    if blocks.is_empty() || blocks.contains(&0) || blocks.iter().sum::<usize>() != structure.n_parties() {
        return invalid("grouping must split the parties into nonempty contiguous blocks");
    }
    Ok(structure.permuted(perm).grouped(blocks))
}

/// Reordering of parties followed by merging contiguous runs into blocks.
pub trait Regroup: Sized {
    fn permute_and_group(&self, perm: &[usize], blocks: &[usize]) -> Result<Self>;
}

impl Regroup for PureState {
    fn permute_and_group(&self, perm: &[usize], blocks: &[usize]) -> Result<Self> {
        let map = index_permutation(&self.structure, perm)?;
        let structure = regrouped_structure(&self.structure, perm, blocks)?;
        let mut amps = CVector::zeros(self.amplitudes.len());
        for (old, &new) in map.iter().enumerate() {
            amps[new] = self.amplitudes[old];
        }
        Ok(PureState { structure, amplitudes: amps })
    }
}

impl Regroup for DensityOperator {
    fn permute_and_group(&self, perm: &[usize], blocks: &[usize]) -> Result<Self> {
        let map = index_permutation(&self.structure, perm)?;
        let structure = regrouped_structure(&self.structure, perm, blocks)?;
        let d = map.len();
        let mut m = CMatrix::zeros(d, d);
        for (c_old, &c_new) in map.iter().enumerate() {
            for (r_old, &r_new) in map.iter().enumerate() {
                m[(r_new, c_new)] = self.matrix[(r_old, c_old)];
            }
        }
        Ok(DensityOperator { structure, matrix: m })
    }
}

pub fn permute_and_group<T: Regroup>(x: &T, perm: &[usize], blocks: &[usize]) -> Result<T> {
    x.permute_and_group(perm, blocks)
}

/// Reduced operator on the parties in `keep` (output party order ascending).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let st = rho.structure();
    let n = st.n_parties();
    if keep.is_empty() {
        return invalid("partial_trace: keep-set is empty");
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.iter().any(|&p| p >= n) {
        return invalid("partial_trace: party index out of range");
    }
    let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let strides = st.strides();
    let offsets = |parties: &[usize]| -> Vec<usize> {
        let sub = st.select(parties);
        (0..sub.total_dim())
            .map(|k| sub.multi_index(k).iter().zip(parties).map(|(i, &p)| i * strides[p]).sum())
            .collect()
    };
    let keep_off = offsets(&kept);
    let trace_off: Vec<usize> = if traced.is_empty() { vec![0] } else { offsets(&traced) };

    let dk = keep_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for (a, &oa) in keep_off.iter().enumerate() {
        for (b, &ob) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += rho.matrix()[(oa + t, ob + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityOperator::from_parts(st.select(&kept), out))
}

/// Contracts `psi` with `<v_p|` on every party `p` in `fixed`, leaving an
/// unnormalized vector on the remaining parties (ascending order).
pub fn partial_contract(psi: &PureState, fixed: &BTreeMap<usize, CVector>) -> Result<UnnormalizedState> {
    let st = psi.structure();
    let n = st.n_parties();
    if fixed.len() >= n {
        return invalid("partial_contract: all parties fixed, use an overlap instead");
    }
    for (&p, v) in fixed {
        if p >= n {
            return invalid(format!("partial_contract: party {p} out of range"));
        }
        if v.len() != st.dims()[p] {
            return invalid(format!("partial_contract: vector for party {p} has wrong length"));
        }
    }
    let free: Vec<usize> = (0..n).filter(|p| !fixed.contains_key(p)).collect();
    let out_structure = st.select(&free);
    let mut out = CVector::zeros(out_structure.total_dim());
    for (g, &amp) in psi.amplitudes().iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let idx = st.multi_index(g);
        let mut w = amp;
        for (&p, v) in fixed {
            w *= v[idx[p]].conj();
        }
        let o = free.iter().fold(0, |acc, &p| acc * st.dims()[p] + idx[p]);
        out[o] += w;
    }
    Ok(UnnormalizedState { structure: out_structure, amplitudes: out })
}

/// `<locals except party k| psi>` as a vector on party `k`.
pub(crate) fn contract_all_but(amps: &CVector, dims: &[usize], locals: &[CVector], k: usize) -> CVector {
    let n = dims.len();
    let mut out = CVector::zeros(dims[k]);
    let mut idx = vec![0usize; n];
    for amp in amps.iter() {
        let mut w = *amp;
        for p in 0..n {
            if p != k {
                w *= locals[p][idx[p]].conj();
            }
        }
        out[idx[k]] += w;
        // odometer, last party fastest
        for p in (0..n).rev() {
            idx[p] += 1;
            if idx[p] < dims[p] {
                break;
            }
            idx[p] = 0;
        }
    }
    out
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`, evaluated as the
/// squared sum of singular values of `sqrt(rho) sqrt(sigma)`.
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.structure().total_dim() != sigma.structure().total_dim() {
        return invalid("fidelity: dimension mismatch");
    }
    let a = linalg::sqrt_psd(rho.matrix())?;
    let b = linalg::sqrt_psd(sigma.matrix())?;
    let s: f64 = linalg::svd(&(a * b)).d.iter().sum();
    Ok((s * s).clamp(0.0, 1.0))
}

/// `sqrt(1 - |<psi|phi>|^2)`.
pub fn pure_trace_distance(psi: &PureState, phi: &PureState) -> Result<f64> {
    if psi.amplitudes().len() != phi.amplitudes().len() {
        return invalid("pure_trace_distance: dimension mismatch");
    }
    // |psi - <phi|psi> phi| equals sqrt(1 - |<phi|psi>|^2) without the cancellation
    let ov = phi.inner(psi);
    let perp = psi.amplitudes() - phi.amplitudes() * ov;
    Ok(perp.norm().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_gaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ghz3() -> PureState {
        let mut a = CVector::zeros(8);
        a[0] = c(FRAC_1_SQRT_2);
        a[7] = c(FRAC_1_SQRT_2);
        PureState::new(HilbertStructure::qubits(3), a).unwrap()
    }

    fn bell() -> PureState {
        let mut a = CVector::zeros(4);
        a[0] = c(FRAC_1_SQRT_2);
        a[3] = c(FRAC_1_SQRT_2);
        PureState::new(HilbertStructure::qubits(2), a).unwrap()
    }

    fn ket(v: &[f64]) -> CVector {
        CVector::from_iterator(v.len(), v.iter().map(|&x| c(x)))
    }

    fn random_density(d: usize, seed: u64) -> DensityOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(&mut rng));
        DensityOperator::from_unnormalized(HilbertStructure::new(vec![d]).unwrap(), &g * g.adjoint()).unwrap()
    }

    #[test]
    fn structure_index_roundtrip() {
        let st = HilbertStructure::new(vec![2, 3, 4]).unwrap();
        assert_eq!(st.total_dim(), 24);
        assert_eq!(st.strides(), vec![12, 4, 1]);
        for k in 0..24 {
            assert_eq!(st.linear_index(&st.multi_index(k)), k);
        }
        assert!(HilbertStructure::new(vec![2, 1]).is_err());
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let r = partial_trace(&bell().density(), &[0]).unwrap();
        assert!((r.matrix() - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = random_density(2, 1);
        let b = random_density(3, 2);
        let ab = a.tensor(&b);
        let ra = partial_trace(&ab, &[0]).unwrap();
        assert!((ra.matrix() - a.matrix()).norm() < 1e-14);
        let rb = partial_trace(&ab, &[1]).unwrap();
        assert!((rb.matrix() - b.matrix()).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_ghz() {
        let r = partial_trace(&ghz3().density(), &[0]).unwrap();
        let expected = CMatrix::from_diagonal(&ket(&[0.5, 0.5]));
        assert!((r.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_keep() {
        assert!(partial_trace(&bell().density(), &[]).is_err());
        assert!(partial_trace(&bell().density(), &[2]).is_err());
    }

    #[test]
    fn contract_product_and_ghz() {
        let st = HilbertStructure::qubits(3);
        let zero = ket(&[1.0, 0.0]);
        let one = ket(&[0.0, 1.0]);
        let fixed: BTreeMap<_, _> = [(1, zero.clone()), (2, zero.clone())].into();

        let p = PureState::basis(st.clone(), &[0, 0, 0]).unwrap();
        let r = partial_contract(&p, &fixed).unwrap();
        assert!((r.amplitudes.clone() - zero.clone()).norm() < 1e-15);

        let r = partial_contract(&ghz3(), &fixed).unwrap();
        assert!((r.amplitudes.clone() - ket(&[FRAC_1_SQRT_2, 0.0])).norm() < 1e-15);

        let fixed01: BTreeMap<_, _> = [(1, zero.clone()), (2, one)].into();
        let r = partial_contract(&ghz3(), &fixed01).unwrap();
        assert!(r.norm() < 1e-15);
        assert!(r.normalize().is_none());

        let all: BTreeMap<_, _> = [(0, zero.clone()), (1, zero.clone()), (2, zero)].into();
        assert!(partial_contract(&ghz3(), &all).is_err());
    }

    #[test]
    fn contract_all_but_matches_general_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let st = HilbertStructure::new(vec![2, 3, 2]).unwrap();
        let psi = PureState::normalized(st.clone(), CVector::from_fn(12, |_, _| complex_gaussian(&mut rng))).unwrap();
        let prod = ProductState::random(&st, &mut rng);
        for k in 0..3 {
            let fixed: BTreeMap<_, _> = (0..3).filter(|&p| p != k).map(|p| (p, prod.local(p).clone())).collect();
            let general = partial_contract(&psi, &fixed).unwrap();
            let fast = contract_all_but(psi.amplitudes(), st.dims(), prod.locals(), k);
            assert!((general.amplitudes - fast).norm() < 1e-14);
        }
    }

    #[test]
    fn fidelity_examples() {
        let st = HilbertStructure::qubits(1);
        let zero = PureState::basis(st.clone(), &[0]).unwrap().density();
        let one = PureState::basis(st.clone(), &[1]).unwrap().density();
        let mixed = DensityOperator::maximally_mixed(st);
        assert!((fidelity(&zero, &zero).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&zero, &one).unwrap() < 1e-12);
        assert!((fidelity(&zero, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fidelity_symmetric_and_self_one() {
        let a = random_density(4, 10);
        let b = random_density(4, 11);
        let fab = fidelity(&a, &b).unwrap();
        let fba = fidelity(&b, &a).unwrap();
        assert!((fab - fba).abs() < 1e-10);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        assert!(fidelity(&random_density(2, 1), &random_density(3, 1)).is_err());
    }

    #[test]
    fn permute_identity_and_swap() {
        let st = HilbertStructure::qubits(2);
        let s01 = PureState::basis(st.clone(), &[0, 1]).unwrap();
        assert_eq!(s01.permute_and_group(&[0, 1], &[1, 1]).unwrap(), s01);
        let swapped = s01.permute_and_group(&[1, 0], &[1, 1]).unwrap();
        assert_eq!(swapped, PureState::basis(st, &[1, 0]).unwrap());
        assert!(s01.permute_and_group(&[0, 0], &[1, 1]).is_err());
        assert!(s01.permute_and_group(&[0, 1], &[1]).is_err());
    }

    #[test]
    fn regroup_tensor_product_marginals() {
        // rho on (A,B), sigma on (A',B'); reorder to A,A',B,B' and group pairs
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mk = |rng: &mut ChaCha8Rng| {
            let g = CMatrix::from_fn(4, 4, |_, _| complex_gaussian(rng));
            DensityOperator::from_unnormalized(HilbertStructure::qubits(2), &g * g.adjoint()).unwrap()
        };
        let rho = mk(&mut rng);
        let sigma = mk(&mut rng);
        let joint = rho.tensor(&sigma);
        let grouped = joint.permute_and_group(&[0, 2, 1, 3], &[2, 2]).unwrap();
        assert_eq!(grouped.structure().dims(), &[4, 4]);
        let left = partial_trace(&grouped, &[0]).unwrap();
        let expected = partial_trace(&rho, &[0]).unwrap().tensor(&partial_trace(&sigma, &[0]).unwrap());
        assert!((left.matrix() - expected.matrix()).norm() < 1e-14);
    }

    #[test]
    fn trace_distance_examples() {
        let st = HilbertStructure::qubits(1);
        let zero = PureState::basis(st.clone(), &[0]).unwrap();
        let one = PureState::basis(st.clone(), &[1]).unwrap();
        let plus = PureState::new(st, ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        assert!(pure_trace_distance(&zero, &zero).unwrap() < 1e-15);
        assert!((pure_trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((pure_trace_distance(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let st = HilbertStructure::qubits(1);
        assert!(DensityOperator::new(st.clone(), CMatrix::identity(2, 2)).is_err());
        let neg = CMatrix::from_diagonal(&ket(&[1.5, -0.5]));
        assert!(DensityOperator::new(st.clone(), neg).is_err());
        let mut m = CMatrix::identity(2, 2).scale(0.5);
        m[(0, 1)] = c(0.1);
        assert!(DensityOperator::new(st, m).is_err());
    }

    #[test]
    fn ensemble_validation_and_mixture() {
        let st = HilbertStructure::qubits(1);
        let zero = PureState::basis(st.clone(), &[0]).unwrap();
        let one = PureState::basis(st.clone(), &[1]).unwrap();
        let ens = Ensemble::new(
            st.clone(),
            vec![Member { weight: 0.5, state: zero.clone() }, Member { weight: 0.5, state: one.clone() }],
        )
        .unwrap();
        assert!((ens.mixture() - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-15);
        assert!(Ensemble::new(st.clone(), vec![Member { weight: 0.7, state: zero }]).is_err());
        assert!(Ensemble::new(st, vec![Member { weight: -0.1, state: one.clone() }, Member { weight: 1.1, state: one }]).is_err());
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![2]]).is_ok());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::bipartition(2, &[0, 1]).is_err());
        assert!(Partition::parties(3).is_trivial());
        assert_eq!(Partition::bipartition(4, &[0, 2]).unwrap().permutation(), vec![0, 2, 1, 3]);
    }

    #[test]
    fn product_state_overlap_matches_vector() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let st = HilbertStructure::new(vec![2, 3]).unwrap();
        let p = ProductState::random(&st, &mut rng);
        assert!((p.to_vector().norm() - 1.0).abs() < 1e-14);
        let psi = p.to_pure();
        assert!((p.overlap(&psi).norm() - 1.0).abs() < 1e-14);
    }
}
