//! Reference computations that share no code path with the derivative
//! formulas: nested central differences, Simpson quadrature of the
//! first-derivative integral of `exp`, and brute-force word expansion of
//! `(x + Σ s_i v_i)^k`.

use num_complex::Complex64;

use crate::derivative::check_directions;
use crate::error::{Error, Result};
use crate::exp_deriv::mat_exp;
use crate::linalg::{op_norm, ComplexMatrix};

/// Nested central-difference configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct FdConfig {
    /// Step `h_i` for each direction.
    pub steps: Vec<f64>,
    /// Stencil points must satisfy `‖x + Σ ±h_i v_i‖ ≤ radius` when set.
    pub validity_radius: Option<f64>,
}

impl FdConfig {
    /// Default step for order `n`: 1e-4, 1e-3 and 5e-3 for n = 1, 2, 3.
    pub fn default_step(n: usize) -> f64 {
        match n {
            0 | 1 => 1e-4,
            2 => 1e-3,
            _ => 5e-3,
        }
    }

    pub fn for_order(n: usize) -> Self {
        Self::uniform(n, Self::default_step(n))
    }

    pub fn uniform(n: usize, h: f64) -> Self {
        FdConfig {
            steps: vec![h; n],
            validity_radius: None,
        }
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.validity_radius = Some(radius);
        self
    }
}

/// `Π_i (E_{+h_i} - E_{-h_i}) / (2 h_i)` applied to `f(x + Σ s_i v_i)` at
/// `s = 0`; truncation error `O(Σ h_i²)`.
pub fn fd_derivative<F>(
    f: F,
    x: &ComplexMatrix,
    dirs: &[ComplexMatrix],
    cfg: &FdConfig,
) -> Result<ComplexMatrix>
where
    F: Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let n = dirs.len();
    check_directions(x.dim(), dirs, Some(cfg.steps.len()))?;
    if let Some(bad) = cfg.steps.iter().find(|h| !(**h > 0.0)) {
        return Err(Error::invalid("steps", format!("step {bad} is not positive")));
    }
    let mut acc = ComplexMatrix::zeros(x.dim());
    for mask in 0u32..(1u32 << n) {
        let mut point = x.clone();
        let mut sign = 1.0;
        for (i, (v, &h)) in dirs.iter().zip(&cfg.steps).enumerate() {
            let s = if mask & (1 << i) != 0 { -h } else { h };
            if s < 0.0 {
                sign = -sign;
            }
            point.add_assign_scaled(v, Complex64::new(s, 0.0));
        }
        if let Some(radius) = cfg.validity_radius {
            let norm = op_norm(&point);
            if norm > radius {
                return Err(Error::StencilOutsideBall { norm, radius });
            }
        }
        acc.add_assign_scaled(&f(&point)?, Complex64::new(sign, 0.0));
    }
    let denom: f64 = cfg.steps.iter().map(|h| 2.0 * h).product();
    Ok(acc.scale_real(1.0 / denom))
}

/// Composite Simpson estimate of `∫_0^s exp(t x) v exp((s - t) x) dt`.
pub fn exp_integral_quadrature(x: &ComplexMatrix, v: &ComplexMatrix, s: f64, nodes: usize) -> Result<ComplexMatrix> {
    if nodes < 3 || nodes.is_multiple_of(2) {
        return Err(Error::invalid("nodes", "must be odd and at least 3"));
    }
    check_directions(x.dim(), std::slice::from_ref(v), None)?;
    if s == 0.0 {
        return Ok(ComplexMatrix::zeros(x.dim()));
    }
    let h = s / (nodes - 1) as f64;
    let mut acc = ComplexMatrix::zeros(x.dim());
    for i in 0..nodes {
        let t = h * i as f64;
        let left = mat_exp(x, Complex64::new(t, 0.0))?;
        let right = mat_exp(x, Complex64::new(s - t, 0.0))?;
        let w = if i == 0 || i == nodes - 1 {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let term = left.mul_unchecked(v).mul_unchecked(&right);
        acc.add_assign_scaled(&term, Complex64::new(w, 0.0));
    }
    Ok(acc.scale_real(h / 3.0))
}

pub const SYMBOLIC_MAX_POWER: usize = 5;
pub const SYMBOLIC_MAX_ORDER: usize = 3;

/// Coefficient of `s_1 s_2 ⋯ s_n` in `(x + Σ s_i v_i)^k`, found by
/// enumerating every word of length `k` over `{x, v_1, …, v_n}` and keeping
/// those that use each `v_i` exactly once.
pub fn symbolic_power_expand(k: usize, x: &ComplexMatrix, dirs: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let n = dirs.len();
    check_directions(x.dim(), dirs, None)?;
    if k > SYMBOLIC_MAX_POWER {
        return Err(Error::CapExceeded {
            what: "power",
            value: k,
            cap: SYMBOLIC_MAX_POWER,
        });
    }
    if n > SYMBOLIC_MAX_ORDER {
        return Err(Error::CapExceeded {
            what: "derivative order",
            value: n,
            cap: SYMBOLIC_MAX_ORDER,
        });
    }
    let alphabet = n + 1;
    let letter = |c: usize| if c == 0 { x } else { &dirs[c - 1] };
    let mut acc = ComplexMatrix::zeros(x.dim());
    let mut word = vec![0usize; k];
    let total = alphabet.pow(k as u32);
    for code in 0..total {
        let mut rest = code;
        for slot in word.iter_mut().rev() {
            *slot = rest % alphabet;
            rest /= alphabet;
        }
        let mut counts = vec![0usize; alphabet];
        for &c in &word {
            counts[c] += 1;
        }
        if counts[1..].iter().any(|&c| c != 1) {
            continue;
        }
        let mut product = match word.first() {
            Some(&c) => letter(c).clone(),
            None => ComplexMatrix::identity(x.dim()),
        };
        for &c in word.iter().skip(1) {
            product = &product * letter(c);
        }
        acc = &acc + &product;
    }
    Ok(acc)
}
