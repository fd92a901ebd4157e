//! Benchmark state families and two-qubit closed-form references.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::linalg::{complex_gaussian, hermitian_eig, sqrt_psd, svd};
use crate::tensor::{DensityOperator, HilbertStructure, PureState};
use crate::{CMatrix, CVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("mixing parameter p = {p} outside [0, 1]"));
    }
    Ok(())
}

/// `p |Phi+><Phi+| + (1-p)/d^2 * I` on `C^d (x) C^d`, with
/// `|Phi+> = sum_{i<d} |ii> / sqrt(d)`.
pub fn isotropic(d: usize, p: f64) -> Result<DensityOperator> {
    check_probability(p)?;
    let st = HilbertStructure::new(vec![d, d])?;
    let mut phi = CVector::zeros(d * d);
    for i in 0..d {
        phi[i * d + i] = real(1.0 / (d as f64).sqrt());
    }
    let dd = (d * d) as f64;
    let m = (&phi * phi.adjoint()).scale(p) + CMatrix::identity(d * d, d * d).scale((1.0 - p) / dd);
    DensityOperator::new(st, m)
}

/// `p |GHZ><GHZ| + (1-p)/8 * I` on three qubits. Fully separable iff `p <= 1/5`.
pub fn isotropic3(p: f64) -> Result<DensityOperator> {
    check_probability(p)?;
    let g = ghz(3);
    let m = g.projector().scale(p) + CMatrix::identity(8, 8).scale((1.0 - p) / 8.0);
    DensityOperator::new(HilbertStructure::qubits(3), m)
}

fn qubit_state(n: usize, terms: &[(&str, f64)]) -> PureState {
    let st = HilbertStructure::qubits(n);
    let mut a = CVector::zeros(st.total_dim());
    for (bits, amp) in terms {
        let k = usize::from_str_radix(bits, 2).expect("binary string");
        a[k] = real(*amp);
    }
    PureState::normalized(st, a).expect("nonzero amplitudes")
}

/// `(|0...0> + |1...1>) / sqrt(2)` on `n >= 2` qubits.
pub fn ghz(n: usize) -> PureState {
    let n = n.max(2);
    let st = HilbertStructure::qubits(n);
    let mut a = CVector::zeros(st.total_dim());
    a[0] = real(std::f64::consts::FRAC_1_SQRT_2);
    a[st.total_dim() - 1] = real(std::f64::consts::FRAC_1_SQRT_2);
    PureState::normalized(st, a).expect("nonzero")
}

pub fn w4() -> PureState {
    qubit_state(4, &[("0001", 0.5), ("0010", 0.5), ("0100", 0.5), ("1000", 0.5)])
}

/// Symmetric Dicke state with two excitations on four qubits.
pub fn dicke4() -> PureState {
    let a = 1.0 / 6f64.sqrt();
    qubit_state(
        4,
        &[("0011", a), ("0101", a), ("1001", a), ("1100", a), ("0110", a), ("1010", a)],
    )
}

/// Four-qubit cluster state `(|0000> + |0011> + |1100> - |1111>) / 2`.
pub fn cluster4() -> PureState {
    qubit_state(4, &[("0000", 0.5), ("0011", 0.5), ("1100", 0.5), ("1111", -0.5)])
}

/// Off-diagonal entries damped by `exp(-t)`, diagonal untouched.
pub fn decay(rho: &DensityOperator, t: f64) -> Result<DensityOperator> {
    if !(t >= 0.0) {
        return invalid(format!("decay time t = {t} must be >= 0"));
    }
    let f = (-t).exp();
    let mut m = rho.matrix().clone();
    let d = m.nrows();
    for r in 0..d {
        for c in 0..d {
            if r != c {
                m[(r, c)] *= f;
            }
        }
    }
    DensityOperator::new(rho.structure().clone(), m)
}

fn pauli(which: char) -> CMatrix {
    match which {
        'x' => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        'y' => CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        'z' => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => CMatrix::identity(2, 2),
    }
}

/// Operator acting as `ops[k]` on site `k` of a three-site chain (identity
/// elsewhere).
fn on_sites(ops: &[(usize, char)]) -> CMatrix {
    let mut m = CMatrix::identity(1, 1);
    for site in 0..3 {
        let local = ops.iter().find(|(s, _)| *s == site).map_or('i', |(_, c)| *c);
        m = m.kronecker(&pauli(local));
    }
    m
}

/// Parameters of the thermal three-qubit XX ring. Boltzmann's constant is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XXParams {
    pub field: f64,
    pub coupling: f64,
    pub temperature: f64,
}

impl XXParams {
    pub fn new(field: f64, temperature: f64) -> Self {
        XXParams { field, coupling: 0.5, temperature }
    }

    pub fn density(&self) -> Result<DensityOperator> {
        gibbs(&HilbertStructure::qubits(3), &xx_hamiltonian(self.field, self.coupling), self.temperature)
    }
}

/// `H = B/2 sum_i Z_i + J sum_i (X_i X_{i+1} + Y_i Y_{i+1})` on a periodic
/// ring of three qubits.
pub fn xx_hamiltonian(field: f64, coupling: f64) -> CMatrix {
    let mut h = CMatrix::zeros(8, 8);
    for i in 0..3 {
        h += on_sites(&[(i, 'z')]).scale(field / 2.0);
        let j = (i + 1) % 3;
        h += (on_sites(&[(i, 'x'), (j, 'x')]) + on_sites(&[(i, 'y'), (j, 'y')])).scale(coupling);
    }
    h
}

/// Thermal state `exp(-H/T) / Z`.
pub fn gibbs(structure: &HilbertStructure, h: &CMatrix, temperature: f64) -> Result<DensityOperator> {
    if !(temperature > 0.0) {
        return invalid(format!("temperature {temperature} must be > 0"));
    }
    if h.shape() != (structure.total_dim(), structure.total_dim()) {
        return invalid("Hamiltonian dimension does not match structure");
    }
    let eig = hermitian_eig(h)?;
    let ground = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig.values.iter().map(|e| (-(e - ground) / temperature).exp()).collect();
    let z: f64 = weights.iter().sum();
    let mut scaled = eig.vectors.clone();
    for (k, w) in weights.iter().enumerate() {
        scaled.column_mut(k).scale_mut(w / z);
    }
    let m = scaled * eig.vectors.adjoint();
    DensityOperator::new(structure.clone(), (&m + m.adjoint()).scale(0.5))
}

fn require_two_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.structure().dims() != [2, 2] {
        return invalid("two-qubit state required");
    }
    Ok(())
}

/// Wootters concurrence.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = pauli('y').kronecker(&pauli('y'));
    // sqrt(eig(rho rho~)) are the singular values of sqrt(rho) YY conj(sqrt(rho))
    let s = sqrt_psd(rho.matrix())?;
    let lambdas = svd(&(&s * yy * s.conjugate())).d;
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0))
}

/// `1 - sqrt(1 - C^2)`, evaluated without cancellation for small `C`.
/// `C` within a few ulps of 1 is treated as 1, since the square root would
/// amplify that rounding to about `1e-8`.
fn one_minus_root(c: f64) -> f64 {
    let gap = if 1.0 - c <= 8.0 * f64::EPSILON { 0.0 } else { (1.0 - c) * (1.0 + c) };
    c * c / (1.0 + gap.sqrt())
}

/// Closed-form GME of a two-qubit state, `(1 - sqrt(1 - C^2)) / 2`.
pub fn two_qubit_eg(rho: &DensityOperator) -> Result<f64> {
    Ok(0.5 * one_minus_root(concurrence(rho)?))
}

/// Maximal fidelity with a separable state, `1 - E_G`.
pub fn two_qubit_fs(rho: &DensityOperator) -> Result<f64> {
    Ok(1.0 - two_qubit_eg(rho)?)
}

/// Entanglement of formation, `h(1/2 + sqrt(1 - C^2)/2)` with binary entropy `h`.
pub fn two_qubit_ef(rho: &DensityOperator) -> Result<f64> {
    let c = concurrence(rho)?;
    Ok(binary_entropy(0.5 + 0.5 * (1.0 - one_minus_root(c))))
}

/// Base-2 binary entropy.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// `-log2(F_s)`.
pub fn log_entanglement_from_fs(fs: f64) -> Result<f64> {
    if !(fs > 0.0 && fs <= 1.0 + 1e-12) {
        return invalid(format!("separable fidelity {fs} outside (0, 1]"));
    }
    Ok((-fs.min(1.0).log2()).max(0.0))
}

/// `G G^dagger / Tr(G G^dagger)` for a `d x rank` complex Ginibre matrix `G`.
pub fn random_density<R: Rng + ?Sized>(structure: &HilbertStructure, rank: usize, rng: &mut R) -> Result<DensityOperator> {
    let d = structure.total_dim();
    if rank == 0 || rank > d {
        return invalid(format!("rank {rank} outside 1..={d}"));
    }
    let g = CMatrix::from_fn(d, rank, |_, _| complex_gaussian(rng));
    DensityOperator::from_unnormalized(structure.clone(), &g * g.adjoint())
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(structure: &HilbertStructure, rng: &mut R) -> PureState {
    let v = crate::linalg::random_unit_vector(structure.total_dim(), rng);
    PureState::normalized(structure.clone(), v).expect("unit vector")
}
