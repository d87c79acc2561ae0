//! Exact Fréchet derivatives of `x ↦ x^k` and of truncated power series.
//!
//! The n-th derivative of `x^k` in directions `v_1, …, v_n` is the sum over
//! permutations `φ` and weak compositions `α` of `k - n` into `n + 1` parts of
//! the words `x^{α_0} v_{φ(1)} x^{α_1} ⋯ v_{φ(n)} x^{α_n}`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::combinatorics::{binomial, enum_compositions, enum_permutations, factorial};
use crate::derivative::check_directions;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::summation::{pairwise_sum, PairwiseSum};

pub const MAX_POWER_ORDER: usize = 5;

/// Largest number of `(φ, α)` terms, i.e. `5! · C(12, 5)`.
pub const MAX_POWER_TERMS: usize = 95_040;

/// Number of terms `n! · C(k, n)` in the expansion (0 when `k < n`).
pub fn power_term_count(k: usize, n: usize) -> Option<usize> {
    if k < n {
        return Some(0);
    }
    let perms = factorial(n as u64)?;
    let comps = binomial(k as u64, n as u64)?;
    perms.checked_mul(comps).map(|t| t as usize)
}

/// `⟨D^n(x^k), v_1 ⊗ … ⊗ v_n⟩`.
pub fn power_derivative(
    k: usize,
    n: usize,
    x: &ComplexMatrix,
    dirs: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    let dim = x.dim();
    check_directions(dim, dirs, Some(n))?;
    if n > MAX_POWER_ORDER {
        return Err(Error::CapExceeded {
            what: "derivative order",
            value: n,
            cap: MAX_POWER_ORDER,
        });
    }
    let terms = power_term_count(k, n).unwrap_or(usize::MAX);
    if terms > MAX_POWER_TERMS {
        return Err(Error::CapExceeded {
            what: "expansion terms",
            value: terms,
            cap: MAX_POWER_TERMS,
        });
    }
    if k < n {
        return Ok(ComplexMatrix::zeros(dim));
    }

    let free = k - n;
    let mut powers = Vec::with_capacity(free + 1);
    powers.push(ComplexMatrix::identity(dim));
    for p in 1..=free {
        let next = powers[p - 1].mul_unchecked(x);
        powers.push(next);
    }
    let compositions = enum_compositions(n, free as i64);
    let perms = enum_permutations(n)?;

    let per_perm: Vec<ComplexMatrix> = perms
        .par_iter()
        .map(|phi| {
            let mut acc = PairwiseSum::new();
            for alpha in &compositions {
                let parts = alpha.parts();
                let mut word = powers[parts[0]].clone();
                for (slot, &a) in parts[1..].iter().enumerate() {
                    word = word.mul_unchecked(&dirs[phi.apply(slot)]);
                    if a > 0 {
                        word = word.mul_unchecked(&powers[a]);
                    }
                }
                acc.push(word);
            }
            acc.finish().expect("at least one composition")
        })
        .collect();
    Ok(pairwise_sum(per_perm).expect("at least one permutation"))
}

/// Truncated power series `Σ_{k=0}^{K} a_k z^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<Complex64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        PowerSeries { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        PowerSeries {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
        }
    }

    /// Taylor series of `exp` truncated at degree `order`.
    pub fn exp(order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = 1.0;
        for k in 0..=order {
            if k > 0 {
                c /= k as f64;
            }
            coeffs.push(Complex64::new(c, 0.0));
        }
        PowerSeries { coeffs }
    }

    /// Default truncation for exp-like series: `max(25, 3 k_max)`.
    pub fn default_exp_order(k_max: usize) -> usize {
        25.max(3 * k_max)
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Bound `r^{K+1}/(K+1)!` on the first omitted exp term for `‖x‖ ≤ r`.
    pub fn exp_tail_bound(order: usize, r: f64) -> f64 {
        let mut term = 1.0;
        for k in 1..=order + 1 {
            term *= r / k as f64;
        }
        term
    }
}

/// `Σ_k a_k ⟨D^n(x^k), v_1 ⊗ … ⊗ v_n⟩` over the stored coefficients.
pub fn series_derivative(
    series: &PowerSeries,
    n: usize,
    x: &ComplexMatrix,
    dirs: &[ComplexMatrix],
) -> Result<ComplexMatrix> {
    check_directions(x.dim(), dirs, Some(n))?;
    let mut acc = ComplexMatrix::zeros(x.dim());
    for (k, &a) in series.coeffs.iter().enumerate() {
        if k < n || a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let term = power_derivative(k, n, x, dirs)?;
        acc.add_assign_scaled(&term, a);
    }
    Ok(acc)
}
