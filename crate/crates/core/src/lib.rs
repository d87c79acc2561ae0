//! Smooth functions of Hermitian matrices and their Fréchet derivatives of
//! every order.
//!
//! The crate provides
//!
//! * dense complex matrices with a Jacobi eigensolver ([`linalg`]),
//! * exact derivatives of `x ↦ x^k` and of power series ([`poly_deriv`]),
//! * derivatives of the matrix exponential in closed form and by simplex
//!   Monte Carlo ([`exp_deriv`]),
//! * spectral calculus `g(x)` for smooth scalar `g`, with derivatives by
//!   divided differences and by Fourier synthesis ([`spectral`], [`fourier`]),
//! * explicit seminorm bounds and a stochastic probe of the actual seminorms
//!   ([`bounds`]),
//! * independent reference computations used by the test suites ([`oracle`]).

pub mod bounds;
pub mod combinatorics;
pub mod derivative;
pub mod divided_diff;
pub mod error;
pub mod exp_deriv;
pub mod fourier;
pub mod linalg;
pub mod oracle;
pub mod poly_deriv;
pub mod rng;
pub mod scalar_fn;
pub mod selftest;
pub mod spectral;
pub mod summation;

pub use derivative::{DerivativeMethod, MultilinearDerivative};
pub use error::{Error, Result};
pub use linalg::{eig, matmul, op_norm, ComplexMatrix, Eigendecomposition, HermitianMatrix};
pub use num_complex::Complex64;
pub use scalar_fn::ScalarFunction;

/// Crate version recorded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
