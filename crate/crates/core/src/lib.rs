//! Upper-bound approximation of the geometric measure of entanglement (GME).
//!
//! For a pure state the GME is `1 - max |<phi|psi>|^2` over fully product
//! states `phi`; for mixed states it is the convex roof of that quantity,
//! which equals `1 - max F(rho, sigma)` over separable `sigma`.
//!
//! The crate is organised as
//!
//! * [`tensor`] and [`linalg`]: multipartite index arithmetic and the dense
//!   complex kernel (Hermitian eigensolver, SVD, fidelity).
//! * [`pure`]: bipartite closed form, the alternating closest-product-state
//!   iteration and generalized Schmidt decompositions.
//! * [`mixed`]: the purification/polar-decomposition fixed point iteration
//!   for arbitrary mixed states.
//! * [`states`]: constructors for the benchmark families and the two-qubit
//!   closed-form references.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod mixed;
pub mod pure;
pub mod rng;
pub mod states;
pub mod tensor;

pub use error::{GmeError, Result};
pub use mixed::{gme_mixed, AlgorithmConfig, GmEstimate};
pub use num_complex::Complex64;
pub use pure::{
    bipartite_pure_gme, closest_product_iterate, generalized_schmidt, generalized_schmidt_qudit,
    pure_gme_multirestart, PureGmResult, SchmidtDecomposition,
};
pub use tensor::{
    fidelity, partial_contract, partial_trace, permute_and_group, pure_trace_distance,
    DensityOperator, Ensemble, HilbertStructure, Member, Partition, ProductState, PureState,
    UnnormalizedState,
};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
