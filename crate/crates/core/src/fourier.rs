//! Fourier synthesis of `g_*` and its derivatives.
//!
//! `g` is first multiplied by a smooth cutoff `χ` that equals 1 on `[-r, r]`
//! and vanishes outside `[-r-1, r+1]`, giving `g_1 = g χ`. Its transform
//!
//! ```text
//! ĝ(s) = 1/(2π) ∫ e^{-ist} g_1(t) dt
//! ```
//!
//! is tabulated on a uniform s-grid, and for `‖x‖ ≤ r`
//!
//! ```text
//! D^n g_*(x)[v_1..v_n] = ∫ ĝ(s) D^n (e^{is·})_*(x)[v_1..v_n] ds
//! ```
//!
//! where `D^n (e^{is·})_*(x) = (is)^n D^n exp|_{isx}`. Both integrals use
//! composite Simpson. The cutoff uses the `C^∞` transition
//! `ψ(u) = f(1-u) / (f(1-u) + f(u))`, `f(z) = e^{-1/z}`, so `ĝ` decays faster
//! than any power of `s`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::derivative::{check_directions, DerivativeMethod, MultilinearDerivative};
use crate::divided_diff::DividedDiffTable;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::scalar_fn::ScalarFunction;
use crate::spectral::{check_dd_caps, derivative_in_eigenbasis, hermitize, EigenbasisDirections};

/// Tail mass `∫_{|s|>s_max} |s|^n |ĝ|` allowed relative to the whole.
pub const TAIL_REL_TOL: f64 = 1e-8;
/// Largest frequency tabulated by default.
pub const DEFAULT_S_LIMIT: f64 = 600.0;
/// Points on `[-r, r]` used to measure the reconstruction residual.
const RESIDUAL_POINTS: usize = 201;
/// s-grid points per parallel accumulation chunk.
const S_CHUNK: usize = 64;

/// Grid parameters for [`fourier_table`].
#[derive(Clone, Debug, PartialEq)]
pub struct FourierParams {
    /// Highest derivative order the s-range must support.
    pub order: usize,
    /// Transform is computed on `[-s_limit, s_limit]` before truncation.
    pub s_limit: f64,
    /// s-step; defaults to `π / (4 (r + 1))`.
    pub ds: Option<f64>,
    /// Odd number of t-nodes on `[-r-1, r+1]`; defaults to a spacing of
    /// `π / (4 s_limit)`.
    pub t_nodes: Option<usize>,
    pub tail_tolerance: f64,
}

impl Default for FourierParams {
    fn default() -> Self {
        FourierParams {
            order: 2,
            s_limit: DEFAULT_S_LIMIT,
            ds: None,
            t_nodes: None,
            tail_tolerance: TAIL_REL_TOL,
        }
    }
}

impl FourierParams {
    pub fn for_order(order: usize) -> Self {
        FourierParams {
            order,
            ..Self::default()
        }
    }
}

/// Samples of `ĝ` on the symmetric grid `s_k = k Δs`, `|k| ≤ K`.
#[derive(Clone, Debug)]
pub struct FourierTable {
    pub s_min: f64,
    pub s_max: f64,
    pub ds: f64,
    /// `values[k + K] = ĝ(k Δs)`.
    pub values: Vec<Complex64>,
    pub mollifier_radius: f64,
    /// Max `|Σ_k w_k ĝ(s_k) e^{i s_k t} - g(t)|` over sampled `t ∈ [-r, r]`.
    pub residual: f64,
    /// Estimated relative tail mass at the table's order.
    pub tail: f64,
    pub order: usize,
    pub t_nodes: usize,
    real: bool,
}

impl FourierTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn half(&self) -> usize {
        self.values.len() / 2
    }

    pub fn s(&self, idx: usize) -> f64 {
        (idx as f64 - self.half() as f64) * self.ds
    }

    /// `ĝ(-s) = conj ĝ(s)` holds exactly by construction when true.
    pub fn is_real(&self) -> bool {
        self.real
    }

    fn weights(&self) -> Vec<f64> {
        simpson_weights(self.values.len(), self.ds)
    }

    /// Inversion quadrature `Σ_k w_k ĝ(s_k) e^{i s_k t}`.
    pub fn reconstruct(&self, t: f64) -> Complex64 {
        reconstruct_with(&self.values, &self.weights(), self.ds, self.half(), t)
    }
}

fn reconstruct_with(values: &[Complex64], weights: &[f64], ds: f64, half: usize, t: f64) -> Complex64 {
    values
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(k, (v, w))| {
            let s = (k as f64 - half as f64) * ds;
            v * Complex64::cis(s * t) * *w
        })
        .sum()
}

/// Composite Simpson weights for `len` (odd) equally spaced nodes.
fn simpson_weights(len: usize, h: f64) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let w = if i == 0 || i + 1 == len {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

fn bump(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        (-1.0 / z).exp()
    }
}

/// Smooth cutoff: 1 on `[-r, r]`, 0 outside `[-r-1, r+1]`.
pub fn cutoff(t: f64, r: f64) -> f64 {
    let u = t.abs() - r;
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let a = bump(1.0 - u);
        a / (a + bump(u))
    }
}

/// Tabulates `ĝ` for `g χ` with cutoff radius `r`.
pub fn fourier_table(g: &ScalarFunction, r: f64, params: &FourierParams) -> Result<FourierTable> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("radius", "must be positive and finite"));
    }
    if !(params.s_limit > 0.0) || !params.s_limit.is_finite() {
        return Err(Error::invalid("s_limit", "must be positive and finite"));
    }
    let support = r + 1.0;
    let ds = params.ds.unwrap_or(PI / (4.0 * support));
    if !(ds > 0.0) || ds > PI / (4.0 * support) * (1.0 + 1e-12) {
        return Err(Error::invalid("ds", format!("must lie in (0, π/(4(r+1))] = (0, {}]", PI / (4.0 * support))));
    }
    let t_nodes = match params.t_nodes {
        Some(m) if m < 3 || m % 2 == 0 => return Err(Error::invalid("t_nodes", "must be odd and at least 3")),
        Some(m) => m,
        None => {
            let intervals = (2.0 * support / (PI / (4.0 * params.s_limit))).ceil() as usize;
            intervals + intervals % 2 + 1
        }
    };
    let real = g.is_real();

    // Simpson-weighted samples of g_1 / (2π) on the t-grid.
    let ht = 2.0 * support / (t_nodes - 1) as f64;
    let tw = simpson_weights(t_nodes, ht);
    let samples: Vec<(f64, Complex64)> = (0..t_nodes)
        .filter_map(|j| {
            let t = -support + j as f64 * ht;
            let c = cutoff(t, r);
            (c > 0.0).then(|| (t, g.value(t) * (c * tw[j] / (2.0 * PI))))
        })
        .collect();
    if samples.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::invalid("function", "not finite on the cutoff support"));
    }

    let k_limit = (params.s_limit / ds).floor() as usize;
    let transform = |s: f64| -> Complex64 { samples.iter().map(|(t, v)| v * Complex64::cis(-s * t)).sum() };
    let positive: Vec<Complex64> = (0..=k_limit).into_par_iter().map(|k| transform(k as f64 * ds)).collect();
    let negative: Vec<Complex64> = if real {
        positive.iter().map(|v| v.conj()).collect()
    } else {
        (0..=k_limit).into_par_iter().map(|k| transform(-(k as f64) * ds)).collect()
    };

    // mass[k] = |s|^n (|ĝ(s)| + |ĝ(-s)|) ds at s = k Δs.
    let n = params.order as i32;
    let mass: Vec<f64> = (0..=k_limit)
        .map(|k| {
            let s = k as f64 * ds;
            let m = s.powi(n) * (positive[k].norm() + negative[k].norm()) * ds;
            if k == 0 {
                m / 2.0
            } else {
                m
            }
        })
        .collect();
    let total: f64 = mass.iter().sum();
    let band_start = (0.9 * k_limit as f64).ceil() as usize;
    let beyond = if total > 0.0 {
        mass[band_start..].iter().sum::<f64>() / total
    } else {
        0.0
    };
    if beyond > params.tail_tolerance {
        return Err(Error::FourierTail {
            tail: beyond,
            tolerance: params.tail_tolerance,
            s_max: params.s_limit,
        });
    }
    // Smallest K whose discarded mass (plus the unseen tail estimate) is within tolerance.
    let mut k_max = k_limit;
    let mut dropped = 0.0;
    while k_max > 1 {
        let next = dropped + mass[k_max];
        if total > 0.0 && (next / total + beyond) > params.tail_tolerance {
            break;
        }
        dropped = next;
        k_max -= 1;
    }
    let tail = if total > 0.0 { dropped / total + beyond } else { 0.0 };

    let mut values = Vec::with_capacity(2 * k_max + 1);
    values.extend(negative[1..=k_max].iter().rev().copied());
    values.extend(positive[..=k_max].iter().copied());
    let weights = simpson_weights(values.len(), ds);
    let residual = (0..RESIDUAL_POINTS)
        .into_par_iter()
        .map(|i| {
            let t = -r + 2.0 * r * i as f64 / (RESIDUAL_POINTS - 1) as f64;
            (reconstruct_with(&values, &weights, ds, k_max, t) - g.value(t)).norm()
        })
        .reduce(|| 0.0, f64::max);

    Ok(FourierTable {
        s_min: -(k_max as f64) * ds,
        s_max: k_max as f64 * ds,
        ds,
        values,
        mollifier_radius: r,
        residual,
        tail,
        order: params.order,
        t_nodes,
        real,
    })
}

/// `⟨D^n g_*(x), v_1 ⊗ … ⊗ v_n⟩` by quadrature over the tabulated transform.
///
/// The chain contraction is linear in the divided differences, so the
/// s-quadrature is carried out on the divided differences of `e^{is·}` and a
/// single contraction follows.
pub fn gstar_derivative_fourier(
    table: &FourierTable,
    x: &HermitianMatrix,
    dirs: &[ComplexMatrix],
) -> Result<MultilinearDerivative> {
    let dim = x.dim();
    let n = dirs.len();
    check_directions(dim, dirs, None)?;
    check_dd_caps(dim, n)?;
    if n > table.order {
        return Err(Error::invalid(
            "order",
            format!("table was built for order ≤ {}, requested {n}", table.order),
        ));
    }
    let eig = x.eig()?;
    let norm = eig.spectral_radius();
    if norm > table.mollifier_radius * (1.0 + 1e-12) {
        return Err(Error::OutsideRadius {
            norm,
            radius: table.mollifier_radius,
        });
    }
    let rotated = EigenbasisDirections::new(&eig, dirs)?;
    let weights = table.weights();
    let skeleton = DividedDiffTable::build(&ScalarFunction::imaginary_exp(0.0), &eig.eigenvalues, n)?.zeroed();

    let indices: Vec<usize> = (0..table.len()).collect();
    let partials: Vec<DividedDiffTable> = indices
        .par_chunks(S_CHUNK)
        .map(|chunk| -> Result<DividedDiffTable> {
            let mut acc = skeleton.clone();
            for &k in chunk {
                let w = table.values[k] * weights[k];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let f = ScalarFunction::imaginary_exp(table.s(k));
                let dd = DividedDiffTable::build(&f, &eig.eigenvalues, n)?;
                acc.add_scaled(w, &dd);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = skeleton;
    let one = Complex64::new(1.0, 0.0);
    for p in &partials {
        total.add_scaled(one, p);
    }

    let mut value = eig.from_eigenbasis(&derivative_in_eigenbasis(&total, &rotated));
    if table.real && dirs.iter().all(ComplexMatrix::is_exactly_hermitian) {
        hermitize(&mut value);
    }
    Ok(MultilinearDerivative::exact(
        value,
        n,
        DerivativeMethod::Fourier {
            s_max: table.s_max,
            ds: table.ds,
            nodes: table.len(),
            radius: table.mollifier_radius,
        },
    ))
}
