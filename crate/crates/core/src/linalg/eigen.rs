//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq = |a_pq| e^{iφ}`
//! and then applies a real Jacobi rotation, so the combined unitary on the
//! `(p, q)` plane is
//!
//! ```text
//! [  c           s e^{iφ} ]
//! [ -s e^{-iφ}   c        ]
//! ```
//!
//! Sweeps continue until the off-diagonal Frobenius norm drops below
//! `JACOBI_REL_TOL * ‖A‖_F`, or until a sweep finds every pivot negligible
//! against its diagonal entries.

use num_complex::Complex64;

use super::hermitian::HermitianMatrix;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_REL_TOL: f64 = 1e-14;

/// Real spectrum (ascending) and unitary eigenvectors (as columns).
#[derive(Clone, Debug, PartialEq)]
pub struct Eigendecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Eigendecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(values) U*`.
    pub fn synthesize(&self, values: &[Complex64]) -> ComplexMatrix {
        let u = &self.eigenvectors;
        u.mul_diag_right(values).mul_unchecked(&u.adjoint())
    }

    /// `U diag(f(λ)) U*`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.synthesize(&values)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    /// `U* M U`: expresses `m` in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.eigenvectors;
        u.adjoint().mul_unchecked(m).mul_unchecked(u)
    }

    /// `U M U*`: maps an eigenbasis matrix back to the original basis.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = &self.eigenvectors;
        u.mul_unchecked(m).mul_unchecked(&u.adjoint())
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn eig(h: &HermitianMatrix) -> Result<Eigendecomposition> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_REL_TOL * a.frobenius_norm();

    let mut converged = n == 1;
    let mut sweeps = 0;
    while !converged && sweeps < JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Pivot is below the rounding level of both diagonal entries.
                let g = 100.0 * mag;
                if sweeps > 4 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, apq, mag, app, aqq);
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence {
            dim: n,
            sweeps,
            off_norm: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Eigendecomposition {
        eigenvalues,
        eigenvectors,
    })
}

#[allow(clippy::too_many_arguments)]
fn rotate(
    a: &mut ComplexMatrix,
    v: &mut ComplexMatrix,
    p: usize,
    q: usize,
    apq: Complex64,
    mag: f64,
    app: f64,
    aqq: f64,
) {
    let n = a.dim();
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_phase = phase * s; // s e^{iφ}
    let s_phase_conj = s_phase.conj(); // s e^{-iφ}

    // A <- A U (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * s_phase_conj;
        a[(k, q)] = akp * s_phase + akq * c;
    }
    // A <- U* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * s_phase;
        a[(q, k)] = apk * s_phase_conj + aqk * c;
    }
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);

    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * s_phase_conj;
        v[(k, q)] = vkp * s_phase + vkq * c;
    }
}

/// Spectral norm: the largest singular value.
///
/// Exactly Hermitian inputs use their own spectrum; anything else goes
/// through the eigenvalues of `M* M`.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_exactly_hermitian() {
        let h = HermitianMatrix::from_trusted(m.clone());
        return eig(&h)
            .map(|e| e.spectral_radius())
            .unwrap_or_else(|_| m.frobenius_norm());
    }
    let gram = m.adjoint().mul_unchecked(m);
    let h = HermitianMatrix::new(gram).expect("M*M is Hermitian up to rounding");
    let top = eig(&h)
        .map(|e| e.spectral_radius())
        .unwrap_or_else(|_| m.frobenius_norm().powi(2));
    top.max(0.0).sqrt()
}
