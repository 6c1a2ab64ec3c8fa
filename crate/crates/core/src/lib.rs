//! Nonlinear gauge transformations of wave functions and density matrices.
//!
//! The crate implements the map
//! `psi -> |psi| exp(i lambda arg psi + i gamma ln|psi|)` in its pointwise,
//! branch-tracked and hydrodynamic forms, its extension to density matrices
//! with a complex `gamma`, a Crank-Nicolson solver for the linear 1D
//! Schrodinger equation, and residual tools showing that gauge-transformed
//! linear solutions satisfy the nonlinear Doebner-Goldin equation.
//!
//! The `ngt` binary runs the named experiments in [`harness`]; the crate's
//! `examples/` directory has one runnable program per capability.

// Validation uses `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod gauge;
pub mod grid;
pub mod harness;
pub mod io;
pub mod residual;
pub mod schrodinger;
pub mod thresholds;

pub use error::{Error, Result};
pub use num_complex::Complex64;
