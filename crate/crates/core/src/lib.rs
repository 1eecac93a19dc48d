//! Numerical and symbolic workbench for the derivative nonlinear Schrödinger
//! equation u_t = i u_xx + ∂ₓ(|u|²u) and its gauge family.

// Guards are written as !(x > 0.0) so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod density;
pub mod diagnostics;
pub mod error;
pub mod example;
pub mod fields;
pub mod functionals;
pub mod gauge;
pub mod integrator;
pub mod linalg;
pub mod solitons;
pub mod spectral;
pub mod suites;
pub mod variational;

pub use error::{Error, Result};
