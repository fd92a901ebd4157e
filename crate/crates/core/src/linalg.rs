//! Dense complex linear algebra: Hermitian eigendecomposition, SVD and the
//! helpers built on them (PSD square roots, Haar unitaries).
//!
//! Matrices are `nalgebra` types; the eigen and singular value solvers are
//! `faer`'s. This module fixes ordering, phase and tie-breaking conventions
//! so that callers get deterministic output for a fixed input.

use faer::{Mat, Side};
use nalgebra::QR;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, GmeError, Result};
use crate::{CMatrix, CVector};

/// Tolerance for accepting a matrix as Hermitian, relative to `max(1, |M|_max)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this are clamped to zero when taking PSD square roots.
pub const PSD_CLAMP: f64 = 1e-12;
/// Eigenvalues closer than this are treated as degenerate when ordering.
pub const DEGENERACY_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Deviation from Hermiticity, `max |M - M^dagger|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: CMatrix,
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted descending.
///
/// Each eigenvector is rephased so that its first non-negligible component is
/// real and positive; eigenvectors of (numerically) equal eigenvalues are
/// ordered lexicographically on their rounded entries.
pub fn hermitian_eig(m: &CMatrix) -> Result<HermitianEig> {
    if !m.is_square() {
        return invalid(format!("hermitian_eig: matrix is {}x{}", m.nrows(), m.ncols()));
    }
    let scale = max_abs(m).max(1.0);
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL * scale {
        return invalid(format!("hermitian_eig: matrix not Hermitian (defect {defect:.3e})"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEig { values: vec![], vectors: CMatrix::zeros(0, 0) });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| GmeError::DegenerateInput(format!("hermitian_eig: solver failed ({e:?})")))?;
    let vals = eig.S().column_vector();
    let vecs = from_faer(eig.U());

    let mut pairs: Vec<(f64, CVector)> = (0..n)
        .map(|k| (vals[k].re, rephase(vecs.column(k).into_owned())))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    // secondary sort inside degenerate groups
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end - 1].0 - pairs[end].0) <= DEGENERACY_TOL * pairs[start].0.abs().max(1.0) {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lex_key(&b.1).partial_cmp(&lex_key(&a.1)).unwrap_or(std::cmp::Ordering::Equal));
        }
        start = end;
    }

    let values = pairs.iter().map(|p| p.0).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (k, (_, v)) in pairs.iter().enumerate() {
        vectors.set_column(k, v);
    }
    Ok(HermitianEig { values, vectors })
}

fn rephase(mut v: CVector) -> CVector {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
    }
    v
}

fn lex_key(v: &CVector) -> Vec<i64> {
    v.iter()
        .flat_map(|z| [(z.re * 1e10).round() as i64, (z.im * 1e10).round() as i64])
        .collect()
}

/// Singular value decomposition `M = V * diag(D) * W`.
///
/// For an `r x c` input with `k = min(r, c)`, `V` is `r x k` and `W` is
/// `k x c`; both are unitary when `M` is square. Singular values are
/// returned in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub v: CMatrix,
    pub d: Vec<f64>,
    pub w: CMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> CMatrix {
        let mut vd = self.v.clone();
        for (k, s) in self.d.iter().enumerate() {
            vd.column_mut(k).scale_mut(*s);
        }
        vd * &self.w
    }
}

pub fn svd(m: &CMatrix) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd { v: CMatrix::zeros(r, 0), d: vec![], w: CMatrix::zeros(0, c) };
    }
    if m.iter().all(|z| *z == ZERO) {
        return Svd {
            v: CMatrix::identity(r, k),
            d: vec![0.0; k],
            w: CMatrix::identity(k, c),
        };
    }
    let fm = to_faer(m);
    let dec = fm.thin_svd().expect("thin svd of a finite matrix");
    let sv: Vec<f64> = dec.S().column_vector().iter().map(|z| z.re).collect();
    let u = from_faer(dec.U());
    let vt = from_faer(dec.V()).adjoint();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let mut v = CMatrix::zeros(r, k);
    let mut w = CMatrix::zeros(k, c);
    let mut d = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        v.set_column(dst, &u.column(src));
        w.set_row(dst, &vt.row(src));
        d.push(sv[src].max(0.0));
    }
    Svd { v, d, w }
}

fn to_faer(m: &CMatrix) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues below [`PSD_CLAMP`] are treated as zero.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    Ok(spectral_map(&eig, |x| if x < PSD_CLAMP { 0.0 } else { x.sqrt() }))
}

/// `V f(Lambda) V^dagger` for a computed eigendecomposition.
pub fn spectral_map(eig: &HermitianEig, f: impl Fn(f64) -> f64) -> CMatrix {
    let mut scaled = eig.vectors.clone();
    for (k, &lambda) in eig.values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(f(lambda));
    }
    scaled * eig.vectors.adjoint()
}

/// Haar-distributed `n x n` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal absorbed into `Q`).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = QR::new(g);
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        q.column_mut(k).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Uniformly random unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 1e-300 {
            return v.unscale(norm);
        }
    }
}

/// Frobenius norm of `M M^dagger - I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    (u * u.adjoint() - CMatrix::identity(u.nrows(), u.nrows())).norm()
}
