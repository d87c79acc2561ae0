use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// How a multilinear derivative value was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum DerivativeMethod {
    /// Eigenbasis evaluation with divided differences.
    DividedDifference,
    /// Uniform sampling of the simplex.
    MonteCarlo { samples: usize, seed: u64 },
    /// Quadrature over a tabulated Fourier transform.
    Fourier {
        s_max: f64,
        ds: f64,
        nodes: usize,
        radius: f64,
    },
    /// Sum of power-function derivatives (non-commutative expansion).
    PowerExpansion { terms: usize },
}

/// `⟨D^n f(x), v_1 ⊗ … ⊗ v_n⟩` with metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearDerivative {
    pub value: ComplexMatrix,
    pub order: usize,
    pub method: DerivativeMethod,
    /// Per-entry standard error (row-major), Monte Carlo only.
    pub std_error: Option<Vec<f64>>,
}

impl MultilinearDerivative {
    pub fn exact(value: ComplexMatrix, order: usize, method: DerivativeMethod) -> Self {
        MultilinearDerivative {
            value,
            order,
            method,
            std_error: None,
        }
    }
}

/// Checks that `dirs` holds `n` matrices of dimension `dim`.
pub(crate) fn check_directions<M: AsRef<ComplexMatrix>>(
    dim: usize,
    dirs: &[M],
    expected: Option<usize>,
) -> Result<()> {
    if let Some(n) = expected {
        if dirs.len() != n {
            return Err(Error::DirectionCount {
                expected: n,
                found: dirs.len(),
            });
        }
    }
    for d in dirs {
        if d.as_ref().dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: d.as_ref().dim(),
            });
        }
    }
    Ok(())
}

impl AsRef<ComplexMatrix> for ComplexMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        self
    }
}
