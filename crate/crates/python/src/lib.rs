//! Python module `gme`: state constructors, the pure and mixed GME solvers
//! and the two-qubit closed forms.
//!
//! Matrices cross the boundary as lists of rows of Python `complex`, state
//! vectors as flat lists in row-major party order.

use gme_core::{
    mixed, pure, states, AlgorithmConfig, CMatrix, CVector, Complex64, GmeError, HilbertStructure, Partition,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: GmeError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix, String> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("expected a square matrix with {n} columns per row"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn structure(dims: Vec<usize>) -> PyResult<HilbertStructure> {
    HilbertStructure::new(dims).map_err(py_err)
}

/// Mixed state on a tensor product of local spaces.
#[pyclass(module = "gme", skip_from_py_object)]
#[derive(Clone)]
pub struct DensityOperator {
    inner: gme_core::DensityOperator,
}

#[pymethods]
impl DensityOperator {
    #[new]
    fn new(dims: Vec<usize>, matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = matrix_from_rows(&matrix).map_err(PyValueError::new_err)?;
        let inner = gme_core::DensityOperator::new(structure(dims)?, m).map_err(py_err)?;
        Ok(DensityOperator { inner })
    }

    #[staticmethod]
    fn maximally_mixed(dims: Vec<usize>) -> PyResult<Self> {
        Ok(DensityOperator { inner: gme_core::DensityOperator::maximally_mixed(structure(dims)?) })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.structure().dims().to_vec()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_rows(self.inner.matrix())
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    #[pyo3(signature = (tol = 1e-12))]
    fn rank(&self, tol: f64) -> usize {
        self.inner.rank(tol)
    }

    fn tensor(&self, other: &DensityOperator) -> Self {
        DensityOperator { inner: self.inner.tensor(&other.inner) }
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(DensityOperator { inner: gme_core::partial_trace(&self.inner, &keep).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("DensityOperator(dims={:?})", self.inner.structure().dims())
    }
}

/// Normalized pure state.
#[pyclass(module = "gme", skip_from_py_object)]
#[derive(Clone)]
pub struct PureState {
    inner: gme_core::PureState,
}

#[pymethods]
impl PureState {
    /// Normalizes `amplitudes` unless `normalize` is false, in which case
    /// they must already have unit norm.
    #[new]
    #[pyo3(signature = (dims, amplitudes, normalize = true))]
    fn new(dims: Vec<usize>, amplitudes: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let s = structure(dims)?;
        let v = CVector::from_vec(amplitudes);
        let inner = if normalize { gme_core::PureState::normalized(s, v) } else { gme_core::PureState::new(s, v) };
        Ok(PureState { inner: inner.map_err(py_err)? })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.structure().dims().to_vec()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().iter().copied().collect()
    }

    fn inner_product(&self, other: &PureState) -> Complex64 {
        self.inner.inner(&other.inner)
    }

    fn density(&self) -> DensityOperator {
        DensityOperator { inner: self.inner.density() }
    }

    fn __repr__(&self) -> String {
        format!("PureState(dims={:?})", self.inner.structure().dims())
    }
}

/// Solver settings for [`gme_mixed`].
#[pyclass(module = "gme", get_all, set_all, from_py_object)]
#[derive(Clone)]
pub struct Config {
    epsilon: f64,
    ensemble_size: Option<usize>,
    max_iterations: usize,
    restarts: usize,
    seed: u64,
}

#[pymethods]
impl Config {
    #[new]
    #[pyo3(signature = (epsilon = 1e-7, ensemble_size = None, max_iterations = 50_000, restarts = 5, seed = 0))]
    fn new(epsilon: f64, ensemble_size: Option<usize>, max_iterations: usize, restarts: usize, seed: u64) -> Self {
        Config { epsilon, ensemble_size, max_iterations, restarts, seed }
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(epsilon={:e}, ensemble_size={:?}, max_iterations={}, restarts={}, seed={})",
            self.epsilon, self.ensemble_size, self.max_iterations, self.restarts, self.seed
        )
    }
}

impl Config {
    fn to_core(&self) -> AlgorithmConfig {
        AlgorithmConfig {
            epsilon: self.epsilon,
            ensemble_size: self.ensemble_size,
            max_iterations: self.max_iterations,
            restarts: self.restarts,
            seed: self.seed,
            ..AlgorithmConfig::default()
        }
    }
}

/// Result of [`gme_mixed`].
#[pyclass(module = "gme", get_all)]
pub struct GmEstimate {
    gme_upper: f64,
    fidelity: f64,
    direct_fidelity: f64,
    iterations: usize,
    converged: bool,
    final_gain: f64,
    restart_index: usize,
    /// Fidelity after every polar step of the winning restart.
    trace: Vec<f64>,
    closest_separable: DensityOperator,
}

#[pymethods]
impl GmEstimate {
    fn __repr__(&self) -> String {
        format!("GmEstimate(gme_upper={}, iterations={}, converged={})", self.gme_upper, self.iterations, self.converged)
    }
}

/// Result of the pure-state solvers.
#[pyclass(module = "gme", get_all)]
pub struct PureEstimate {
    gme: f64,
    overlap_sq: f64,
    iterations: usize,
    residual: f64,
    history: Vec<f64>,
    /// Local vectors of the closest product state, one per party.
    closest_product: Vec<Vec<Complex64>>,
}

#[pymethods]
impl PureEstimate {
    fn __repr__(&self) -> String {
        format!("PureEstimate(gme={}, iterations={})", self.gme, self.iterations)
    }
}

impl From<pure::PureGmResult> for PureEstimate {
    fn from(r: pure::PureGmResult) -> Self {
        PureEstimate {
            gme: r.gme,
            overlap_sq: r.overlap_sq,
            iterations: r.iterations,
            residual: r.residual,
            closest_product: r.closest_product.locals().iter().map(|v| v.iter().copied().collect()).collect(),
            history: r.history,
        }
    }
}

/// Upper bound on the GME of `rho`. `blocks` groups parties into the parts
/// of the cut; by default every party is its own part.
#[pyfunction]
#[pyo3(signature = (rho, blocks = None, config = None))]
fn gme_mixed(py: Python<'_>, rho: &DensityOperator, blocks: Option<Vec<Vec<usize>>>, config: Option<Config>) -> PyResult<GmEstimate> {
    let n = rho.inner.structure().n_parties();
    let cut = match blocks {
        Some(b) => Partition::new(n, b).map_err(py_err)?,
        None => Partition::parties(n),
    };
    let cfg = config.unwrap_or_else(|| Config::new(1e-7, None, 50_000, 5, 0)).to_core();
    let rho = rho.inner.clone();
    let est = py.detach(move || mixed::gme_mixed(&rho, &cut, &cfg)).map_err(py_err)?;
    Ok(GmEstimate {
        gme_upper: est.gme_upper,
        fidelity: est.fidelity,
        direct_fidelity: est.direct_fidelity,
        iterations: est.iterations,
        converged: est.converged,
        final_gain: est.final_gain,
        restart_index: est.restart_index,
        closest_separable: DensityOperator { inner: est.closest_separable_density() },
        trace: est.trace,
    })
}

/// GME of a pure state: best of `restarts` alternating iterations.
#[pyfunction]
#[pyo3(signature = (psi, restarts = 20, seed = 0, tol = 1e-12, max_sweeps = 10_000))]
fn pure_gme(psi: &PureState, restarts: usize, seed: u64, tol: f64, max_sweeps: usize) -> PyResult<PureEstimate> {
    pure::pure_gme_multirestart(&psi.inner, restarts, seed, tol, max_sweeps).map(Into::into).map_err(py_err)
}

/// Exact GME of a pure state across the cut `block_a | rest`.
#[pyfunction]
fn bipartite_pure_gme(psi: &PureState, block_a: Vec<usize>) -> PyResult<PureEstimate> {
    pure::bipartite_pure_gme(&psi.inner, &block_a).map(Into::into).map_err(py_err)
}

/// Generalized Schmidt decomposition of a multi-qubit (or, with `qudit`,
/// equal-dimension qudit) pure state. Returns `(coefficients, distance,
/// max_pattern_overlap)`.
#[pyfunction]
#[pyo3(signature = (psi, qudit = false, tol = 1e-12, max_sweeps = 10_000))]
fn generalized_schmidt(psi: &PureState, qudit: bool, tol: f64, max_sweeps: usize) -> PyResult<(Vec<Complex64>, f64, f64)> {
    let d = if qudit {
        pure::generalized_schmidt_qudit(&psi.inner, tol, max_sweeps)
    } else {
        pure::generalized_schmidt(&psi.inner, tol, max_sweeps)
    }
    .map_err(py_err)?;
    Ok((d.coefficients.iter().copied().collect(), d.distance, d.max_pattern_overlap))
}

#[pyfunction]
fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> PyResult<f64> {
    gme_core::fidelity(&rho.inner, &sigma.inner).map_err(py_err)
}

#[pyfunction]
fn isotropic(d: usize, p: f64) -> PyResult<DensityOperator> {
    Ok(DensityOperator { inner: states::isotropic(d, p).map_err(py_err)? })
}

#[pyfunction]
fn isotropic3(p: f64) -> PyResult<DensityOperator> {
    Ok(DensityOperator { inner: states::isotropic3(p).map_err(py_err)? })
}

#[pyfunction]
fn ghz(n: usize) -> PureState {
    PureState { inner: states::ghz(n) }
}

#[pyfunction]
fn w4() -> PureState {
    PureState { inner: states::w4() }
}

#[pyfunction]
fn dicke4() -> PureState {
    PureState { inner: states::dicke4() }
}

#[pyfunction]
fn cluster4() -> PureState {
    PureState { inner: states::cluster4() }
}

/// Off-diagonal entries scaled by `exp(-t)`.
#[pyfunction]
fn decay(rho: &DensityOperator, t: f64) -> PyResult<DensityOperator> {
    Ok(DensityOperator { inner: states::decay(&rho.inner, t).map_err(py_err)? })
}

/// Thermal state of the three-qubit XX ring.
#[pyfunction]
#[pyo3(signature = (field, temperature, coupling = 0.5))]
fn xx_gibbs(field: f64, temperature: f64, coupling: f64) -> PyResult<DensityOperator> {
    let params = states::XXParams { field, coupling, temperature };
    Ok(DensityOperator { inner: params.density().map_err(py_err)? })
}

#[pyfunction]
fn concurrence(rho: &DensityOperator) -> PyResult<f64> {
    states::concurrence(&rho.inner).map_err(py_err)
}

#[pyfunction]
fn two_qubit_eg(rho: &DensityOperator) -> PyResult<f64> {
    states::two_qubit_eg(&rho.inner).map_err(py_err)
}

#[pyfunction]
fn two_qubit_fs(rho: &DensityOperator) -> PyResult<f64> {
    states::two_qubit_fs(&rho.inner).map_err(py_err)
}

#[pyfunction]
fn two_qubit_ef(rho: &DensityOperator) -> PyResult<f64> {
    states::two_qubit_ef(&rho.inner).map_err(py_err)
}

#[pymodule]
fn gme(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<DensityOperator>()?;
    m.add_class::<PureState>()?;
    m.add_class::<Config>()?;
    m.add_class::<GmEstimate>()?;
    m.add_class::<PureEstimate>()?;
    m.add_function(wrap_pyfunction!(gme_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(pure_gme, m)?)?;
    m.add_function(wrap_pyfunction!(bipartite_pure_gme, m)?)?;
    m.add_function(wrap_pyfunction!(generalized_schmidt, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(isotropic3, m)?)?;
    m.add_function(wrap_pyfunction!(ghz, m)?)?;
    m.add_function(wrap_pyfunction!(w4, m)?)?;
    m.add_function(wrap_pyfunction!(dicke4, m)?)?;
    m.add_function(wrap_pyfunction!(cluster4, m)?)?;
    m.add_function(wrap_pyfunction!(decay, m)?)?;
    m.add_function(wrap_pyfunction!(xx_gibbs, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(two_qubit_eg, m)?)?;
    m.add_function(wrap_pyfunction!(two_qubit_fs, m)?)?;
    m.add_function(wrap_pyfunction!(two_qubit_ef, m)?)?;
    Ok(())
}
