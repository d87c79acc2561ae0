//! Dense complex matrices, Hermitian eigendecomposition and operator norms.

mod eigen;
mod hermitian;
mod matrix;

pub use eigen::{eig, op_norm, Eigendecomposition, JACOBI_MAX_SWEEPS, JACOBI_REL_TOL};
pub use hermitian::{HermitianMatrix, HERMITIAN_REJECT_TOL};
pub use matrix::{matmul, ComplexMatrix};
