//! Matrix exponential and its higher derivatives.
//!
//! The n-th derivative of `exp` at `x` in directions `v_1, …, v_n` is the
//! sum over permutations `φ` of the simplex integrals
//!
//! ```text
//! ∫_{Δ_n} exp(t_0 x) v_{φ(1)} exp(t_1 x) ⋯ v_{φ(n)} exp(t_n x) dλ_n(t),
//! ```
//!
//! where `λ_n` gives the simplex `Δ_n` mass `1/n!`. For Hermitian `x` the
//! integrals have a closed form through divided differences of `exp` over
//! the spectrum ([`exp_derivative_dd`]); [`exp_derivative_mc`] estimates the
//! same integrals by uniform sampling of the simplex, using
//! `∫ F dλ_n = E_uniform[F] / n!`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::combinatorics::factorial;
use crate::derivative::{check_directions, DerivativeMethod, MultilinearDerivative};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::rng::{draw_rng, streams};
use crate::scalar_fn::ScalarFunction;
use crate::spectral::{check_dd_caps, gstar_derivative_with_eig, hermitize, EigenbasisDirections};
use crate::summation::{pairwise_sum, Summand};

/// Largest `|Re(t)|·‖x‖` accepted before `exp` would overflow doubles.
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;

/// Largest simplex dimension for [`simplex_volume_mc`].
pub const MAX_VOLUME_ORDER: usize = 8;

/// Samples per work unit in the Monte Carlo loops. Fixed so the summation
/// tree is the same for any number of workers.
const CHUNK: usize = 1024;

/// `exp(t·x)`.
///
/// Hermitian `x` with real or purely imaginary `t` goes through the
/// eigendecomposition; everything else through scaling and squaring of the
/// Taylor series.
pub fn mat_exp(x: &ComplexMatrix, t: Complex64) -> Result<ComplexMatrix> {
    if x.is_exactly_hermitian() && (t.im == 0.0 || t.re == 0.0) {
        let h = HermitianMatrix::new(x.clone())?;
        let eig = h.eig()?;
        let growth = t.re.abs() * eig.spectral_radius();
        if growth > EXP_OVERFLOW_LIMIT {
            return Err(Error::Overflow {
                scale: growth,
                limit: EXP_OVERFLOW_LIMIT,
            });
        }
        let mut out = eig.map(|l| (t * l).exp());
        if t.im == 0.0 {
            hermitize(&mut out);
        }
        return Ok(out);
    }
    let scaled = x.scale(t);
    let norm = scaled.frobenius_norm();
    if norm > EXP_OVERFLOW_LIMIT {
        return Err(Error::Overflow {
            scale: norm,
            limit: EXP_OVERFLOW_LIMIT,
        });
    }
    Ok(series_exp(&scaled))
}

fn series_exp(y: &ComplexMatrix) -> ComplexMatrix {
    let norm = y.frobenius_norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let small = y.scale_real(0.5f64.powi(squarings as i32));
    let dim = y.dim();
    let mut term = ComplexMatrix::identity(dim);
    let mut sum = ComplexMatrix::identity(dim);
    for k in 1..=20 {
        term = term.mul_unchecked(&small).scale_real(1.0 / k as f64);
        sum.add_assign_ref(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul_unchecked(&sum);
    }
    sum
}

/// `⟨D^n exp(x), v_1 ⊗ … ⊗ v_n⟩` in closed form.
pub fn exp_derivative_dd(x: &HermitianMatrix, dirs: &[ComplexMatrix]) -> Result<MultilinearDerivative> {
    exp_scaled_derivative_dd(x, Complex64::new(1.0, 0.0), dirs)
}

/// `⟨D^n [y ↦ exp(z·y)](x), v_1 ⊗ … ⊗ v_n⟩ = z^n ⟨D^n exp(zx), v_1 ⊗ … ⊗ v_n⟩`.
///
/// With `z = is` this is the n-th derivative of `x ↦ exp(isx)`, whose norm is
/// at most `|s|^n Π‖v_i‖`.
pub fn exp_scaled_derivative_dd(
    x: &HermitianMatrix,
    z: Complex64,
    dirs: &[ComplexMatrix],
) -> Result<MultilinearDerivative> {
    let dim = x.dim();
    check_directions(dim, dirs, None)?;
    check_dd_caps(dim, dirs.len())?;
    let eig = x.eig()?;
    let growth = z.re.abs() * eig.spectral_radius();
    if growth > EXP_OVERFLOW_LIMIT {
        return Err(Error::Overflow {
            scale: growth,
            limit: EXP_OVERFLOW_LIMIT,
        });
    }
    let rotated = EigenbasisDirections::new(&eig, dirs)?;
    let f = if z == Complex64::new(1.0, 0.0) {
        ScalarFunction::Exp
    } else {
        ScalarFunction::ExpScaled(z)
    };
    let mut value = gstar_derivative_with_eig(&f, &eig, &rotated)?;
    if z.im == 0.0 && dirs.iter().all(ComplexMatrix::is_exactly_hermitian) {
        hermitize(&mut value);
    }
    Ok(MultilinearDerivative::exact(
        value,
        dirs.len(),
        DerivativeMethod::DividedDifference,
    ))
}

/// A point `(t_0, …, t_n)` of the standard simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexSample {
    pub weights: Vec<f64>,
}

/// Draw `index` of the uniform law on `Δ_n`: normalized i.i.d. standard
/// exponentials (a flat Dirichlet).
pub fn sample_simplex(n: usize, seed: u64, index: u64) -> SimplexSample {
    let mut rng = draw_rng(seed, streams::SIMPLEX, index);
    simplex_from_rng(&mut rng, n)
}

fn simplex_from_rng<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SimplexSample {
    if n == 0 {
        return SimplexSample { weights: vec![1.0] };
    }
    let mut weights: Vec<f64> = (0..=n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    SimplexSample { weights }
}

/// Per-chunk sums for the Monte Carlo estimator, shifted by a reference
/// sample to limit cancellation in the variance.
#[derive(Clone)]
struct MomentSums {
    sum: ComplexMatrix,
    sum_sq: Vec<f64>,
}

impl Summand for MomentSums {
    fn add_assign_ref(&mut self, other: &Self) {
        self.sum.add_assign_ref(&other.sum);
        self.sum_sq.add_assign_ref(&other.sum_sq);
    }
}

/// Monte Carlo estimate of the exponential derivative with per-entry
/// standard errors.
pub fn exp_derivative_mc(
    x: &HermitianMatrix,
    dirs: &[ComplexMatrix],
    samples: usize,
    seed: u64,
) -> Result<MultilinearDerivative> {
    let dim = x.dim();
    let n = dirs.len();
    check_directions(dim, dirs, None)?;
    check_dd_caps(dim, n)?;
    if samples < 2 {
        return Err(Error::invalid("samples", "at least two samples required"));
    }
    let eig = x.eig()?;
    if eig.spectral_radius() > EXP_OVERFLOW_LIMIT {
        return Err(Error::Overflow {
            scale: eig.spectral_radius(),
            limit: EXP_OVERFLOW_LIMIT,
        });
    }
    let basis = EigenbasisDirections::new(&eig, dirs)?;
    let lambda = &eig.eigenvalues;

    let integrand = |t: &SimplexSample| -> ComplexMatrix {
        let diags: Vec<Vec<Complex64>> = t
            .weights
            .iter()
            .map(|&tj| lambda.iter().map(|&l| Complex64::new((tj * l).exp(), 0.0)).collect())
            .collect();
        if n == 0 {
            return eig.from_eigenbasis(&ComplexMatrix::from_complex_diag(&diags[0]));
        }
        let mut total = ComplexMatrix::zeros(dim);
        for phi in &basis.perms {
            let mut m = basis.rotated[phi.apply(0)]
                .mul_diag_left(&diags[0])
                .mul_diag_right(&diags[1]);
            for slot in 1..n {
                m = m
                    .mul_unchecked(&basis.rotated[phi.apply(slot)])
                    .mul_diag_right(&diags[slot + 1]);
            }
            total.add_assign_ref(&m);
        }
        eig.from_eigenbasis(&total)
    };

    let reference = integrand(&sample_simplex(n, seed, 0));
    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<MomentSums> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(samples);
            let mut sum = ComplexMatrix::zeros(dim);
            let mut sum_sq = vec![0.0; dim * dim];
            for i in start..end {
                let f = integrand(&sample_simplex(n, seed, i as u64));
                let shifted = &f - &reference;
                for (sq, z) in sum_sq.iter_mut().zip(shifted.as_slice()) {
                    *sq += z.norm_sqr();
                }
                sum.add_assign_ref(&shifted);
            }
            MomentSums { sum, sum_sq }
        })
        .collect();
    let totals = pairwise_sum(partials).expect("at least one chunk");

    let count = samples as f64;
    let inv_volume = 1.0 / factorial(n as u64).expect("n <= 4") as f64;
    let mean_shift = totals.sum.scale_real(1.0 / count);
    let value = (&mean_shift + &reference).scale_real(inv_volume);
    let std_error = totals
        .sum_sq
        .iter()
        .zip(mean_shift.as_slice())
        .map(|(sq, m)| {
            let var = ((sq / count - m.norm_sqr()) * count / (count - 1.0)).max(0.0);
            (var / count).sqrt() * inv_volume
        })
        .collect();
    Ok(MultilinearDerivative {
        value,
        order: n,
        method: DerivativeMethod::MonteCarlo { samples, seed },
        std_error: Some(std_error),
    })
}

/// Estimate of a simplex volume with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Hit-rate estimate of the simplex volume: points uniform on `[0, 1]^n`
/// fall in `{Σ t_i ≤ 1}` with probability `1/n!`.
pub fn simplex_volume_mc(n: usize, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if n > MAX_VOLUME_ORDER {
        return Err(Error::CapExceeded {
            what: "simplex dimension",
            value: n,
            cap: MAX_VOLUME_ORDER,
        });
    }
    if samples == 0 {
        return Err(Error::invalid("samples", "must be positive"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(samples);
            (start..end)
                .filter(|&i| {
                    let mut rng = draw_rng(seed, streams::VOLUME, i as u64);
                    let s: f64 = (0..n).map(|_| rng.random::<f64>()).sum();
                    s <= 1.0
                })
                .count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}
