use super::eigen::{eig, Eigendecomposition};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest symmetrization correction, relative to `‖M‖_F`, accepted by
/// [`HermitianMatrix::new`].
pub const HERMITIAN_REJECT_TOL: f64 = 1e-8;

/// A complex matrix equal to its own conjugate transpose.
///
/// Construction replaces the input by `(M + M*)/2` and records the Frobenius
/// norm of the discarded anti-Hermitian part.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
    correction: f64,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = m.dim();
        let scale = m.frobenius_norm();
        let mut sym = m.clone();
        let mut anti = 0.0;
        for i in 0..n {
            for j in i..n {
                let a = m[(i, j)];
                let b = m[(j, i)];
                let avg = (a + b.conj()) * 0.5;
                let diff = (a - b.conj()) * 0.5;
                anti += if i == j {
                    diff.norm_sqr()
                } else {
                    2.0 * diff.norm_sqr()
                };
                sym[(i, j)] = avg;
                sym[(j, i)] = avg.conj();
            }
        }
        let correction = anti.sqrt();
        let tolerance = HERMITIAN_REJECT_TOL * scale;
        if correction > tolerance {
            return Err(Error::NotHermitian {
                correction,
                tolerance,
            });
        }
        Ok(HermitianMatrix {
            inner: sym,
            correction,
        })
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::from_diag(values),
            correction: 0.0,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::zeros(dim),
            correction: 0.0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix {
            inner: ComplexMatrix::identity(dim),
            correction: 0.0,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    /// Frobenius norm of the anti-Hermitian part removed at construction.
    pub fn correction(&self) -> f64 {
        self.correction
    }

    pub fn eig(&self) -> Result<Eigendecomposition> {
        eig(self)
    }

    /// `a*self + b*other` for real `a`, `b`.
    pub fn combine(&self, a: f64, other: &HermitianMatrix, b: f64) -> HermitianMatrix {
        let m = &self.inner.scale_real(a) + &other.inner.scale_real(b);
        HermitianMatrix {
            inner: m,
            correction: 0.0,
        }
    }

    pub fn scale(&self, factor: f64) -> HermitianMatrix {
        HermitianMatrix {
            inner: self.inner.scale_real(factor),
            correction: 0.0,
        }
    }

    pub(crate) fn from_trusted(inner: ComplexMatrix) -> Self {
        debug_assert!(inner.is_exactly_hermitian());
        HermitianMatrix {
            inner,
            correction: 0.0,
        }
    }
}

impl AsRef<ComplexMatrix> for HermitianMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.inner
    }
}

impl TryFrom<ComplexMatrix> for HermitianMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        HermitianMatrix::new(m)
    }
}
