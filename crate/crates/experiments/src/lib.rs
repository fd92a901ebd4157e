//! Parameter sweeps, validation tables and the `gme` command-line tool.
//!
//! [`runs`] holds one function per sweep family, [`checks`] the pass/fail
//! criteria embedded in the validation commands, and [`output`]/[`svg`] the
//! CSV, JSON and plot writers.

// negated comparisons reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod output;
pub mod runs;
pub mod svg;
pub mod sweep;

pub use runs::{
    run_additivity_study, run_four_qubit_table, run_isotropic3_curve, run_isotropic_table, run_two_qubit_validation,
    run_xx_sweeps,
};
pub use sweep::{Family, Series, SweepRecord, SweepSpec};
