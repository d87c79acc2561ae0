//! Explicit seminorm bounds and a stochastic probe of the seminorms
//! `ρ_{n,r}(g_*) = sup_{‖x‖<r} ‖D^n g_*(x)‖`.
//!
//! The probe only ever produces lower bounds, so comparing it against an
//! explicit bound is a one-sided check.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix, HermitianMatrix};
use crate::rng::{draw_rng, random_hermitian_with_norm, streams};
use crate::scalar_fn::ScalarFunction;
use crate::spectral::gstar_derivative_dd;

/// Simpson nodes for the Sobolev integral.
pub const SOBOLEV_NODES: usize = 4097;
/// Hill-climb steps applied to each record candidate.
pub const REFINE_STEPS: usize = 50;
/// Fraction of random candidates placed on the sphere `‖x‖ = r`.
pub const BOUNDARY_FRACTION: f64 = 0.7;
/// Scalar candidates `x = c I` tried before the random ones.
const SCALAR_CANDIDATES: [f64; 5] = [1.0, -1.0, 0.5, -0.5, 0.0];

/// `|g^{(n)}(0)| + √(8r) · ((1/2π) ∫_{-r}^{r} |g^{(n+1)}(t)|² dt)^{1/2}`.
pub fn sobolev_bound(g: &ScalarFunction, n: usize, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::invalid("radius", "must be nonnegative and finite"));
    }
    if g.max_order() < n + 1 {
        return Err(Error::InsufficientOrder {
            kind: g.kind_name().to_string(),
            max_order: g.max_order(),
            requested: n + 1,
        });
    }
    let head = g.eval(0.0, n)?.norm();
    if r == 0.0 {
        return Ok(head);
    }
    let m = SOBOLEV_NODES;
    let h = 2.0 * r / (m - 1) as f64;
    let mut integral = 0.0;
    for i in 0..m {
        let t = -r + h * i as f64;
        let w = if i == 0 || i + 1 == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        integral += w * g.eval(t, n + 1)?.norm_sqr();
    }
    integral *= h / 3.0;
    Ok(head + (8.0 * r).sqrt() * (integral / (2.0 * PI)).sqrt())
}

/// `k!/(k-n)! · r^{k-n}`, zero when `n > k`.
pub fn monomial_bound(k: usize, n: usize, r: f64) -> f64 {
    if n > k {
        return 0.0;
    }
    let falling: f64 = ((k - n + 1)..=k).map(|i| i as f64).product();
    falling * r.powi((k - n) as i32)
}

/// Best lower bound for `ρ_{n,r}` found by the probe, with its witness.
#[derive(Clone, Debug)]
pub struct SeminormEstimate {
    pub n: usize,
    pub r: f64,
    pub dim: usize,
    pub value: f64,
    pub witness_x: HermitianMatrix,
    /// Unit operator norm Hermitian directions.
    pub witness_dirs: Vec<ComplexMatrix>,
    /// Derivative evaluations spent, refinement included.
    pub samples_used: usize,
    pub seed: u64,
}

/// `‖D^n g_*(x)[v_1..v_n]‖ / Π ‖v_i‖`.
pub fn derivative_ratio(g: &ScalarFunction, x: &HermitianMatrix, dirs: &[ComplexMatrix]) -> Result<f64> {
    let d = gstar_derivative_dd(g, x, dirs)?;
    let denom: f64 = dirs.iter().map(op_norm).product();
    Ok(op_norm(&d.value) / denom)
}

struct Candidate {
    x: HermitianMatrix,
    dirs: Vec<ComplexMatrix>,
}

fn unit_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    random_hermitian_with_norm(rng, dim, 1.0).into_matrix()
}

/// Candidate `index` of the probe sequence; independent of the budget.
fn candidate(n: usize, r: f64, dim: usize, seed: u64, index: usize) -> Candidate {
    if let Some(&c) = SCALAR_CANDIDATES.get(index) {
        return Candidate {
            x: HermitianMatrix::identity(dim).scale(c * r),
            dirs: vec![ComplexMatrix::identity(dim); n],
        };
    }
    let mut rng = draw_rng(seed, streams::PROBE, index as u64);
    let norm = if rng.random::<f64>() < BOUNDARY_FRACTION {
        r
    } else {
        r * rng.random::<f64>()
    };
    let x = random_hermitian_with_norm(&mut rng, dim, norm);
    let dirs = (0..n).map(|_| unit_hermitian(&mut rng, dim)).collect();
    Candidate { x, dirs }
}

/// Adds `δ` to one Hermitian coordinate pair `(i, j)`, `(j, i)`.
fn perturb_coordinate<R: Rng + ?Sized>(rng: &mut R, m: &ComplexMatrix, step: f64) -> ComplexMatrix {
    let dim = m.dim();
    let i = rng.random_range(0..dim);
    let j = rng.random_range(0..dim);
    let mut out = m.clone();
    let re = step * (2.0 * rng.random::<f64>() - 1.0);
    if i == j {
        out[(i, i)] += Complex64::new(re, 0.0);
    } else {
        let delta = Complex64::new(re, step * (2.0 * rng.random::<f64>() - 1.0));
        out[(i, j)] += delta;
        out[(j, i)] += delta.conj();
    }
    out
}

fn rescale_into(m: ComplexMatrix, target: f64, only_if_larger: bool) -> Option<ComplexMatrix> {
    let norm = op_norm(&m);
    if norm == 0.0 {
        return None;
    }
    if only_if_larger && norm <= target {
        return Some(m);
    }
    Some(m.scale_real(target / norm))
}

/// Coordinate hill-climb from a record candidate; returns the best point
/// reached, its ratio and the number of evaluations spent.
fn refine(
    g: &ScalarFunction,
    r: f64,
    start: Candidate,
    start_value: f64,
    seed: u64,
    record: usize,
) -> Result<(Candidate, f64, usize)> {
    let mut rng = draw_rng(seed, streams::PROBE_REFINE, record as u64);
    let mut best = start;
    let mut best_value = start_value;
    let mut step = 0.1 * r.max(1e-3);
    let mut evals = 0;
    let slots = best.dirs.len() + 1;
    for _ in 0..REFINE_STEPS {
        let slot = rng.random_range(0..slots);
        let mut trial_x = best.x.clone();
        let mut trial_dirs = best.dirs.clone();
        if slot == 0 {
            let moved = perturb_coordinate(&mut rng, best.x.matrix(), step);
            match rescale_into(moved, r, true) {
                Some(m) => trial_x = HermitianMatrix::new(m)?,
                None => continue,
            }
        } else {
            let moved = perturb_coordinate(&mut rng, &best.dirs[slot - 1], step);
            match rescale_into(moved, 1.0, false) {
                Some(m) => trial_dirs[slot - 1] = m,
                None => continue,
            }
        }
        let value = derivative_ratio(g, &trial_x, &trial_dirs)?;
        evals += 1;
        if value > best_value {
            best_value = value;
            best = Candidate {
                x: trial_x,
                dirs: trial_dirs,
            };
        } else {
            step *= 0.7;
        }
    }
    Ok((best, best_value, evals))
}

/// Stochastic lower bound of `ρ_{n,r}(g_*)` on `dim × dim` Hermitian
/// matrices.
///
/// Candidates are the scalar points `x = cI` followed by random Hermitian
/// `x` (on the sphere `‖x‖ = r` with probability 0.7, otherwise with norm
/// uniform in `(0, r)`) and random unit Hermitian directions. Every
/// candidate that sets a new running maximum is refined by a coordinate
/// hill-climb, so the result never decreases as the budget grows.
pub fn probe_seminorm(
    g: &ScalarFunction,
    n: usize,
    r: f64,
    dim: usize,
    budget: usize,
    seed: u64,
) -> Result<SeminormEstimate> {
    if budget == 0 {
        return Err(Error::invalid("budget", "must be at least 1"));
    }
    if dim == 0 {
        return Err(Error::invalid("dim", "must be positive"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid("radius", "must be positive and finite"));
    }
    let values: Vec<f64> = (0..budget)
        .into_par_iter()
        .map(|i| {
            let c = candidate(n, r, dim, seed, i);
            derivative_ratio(g, &c.x, &c.dirs)
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > running {
            running = v;
            records.push(i);
        }
    }
    let refined: Vec<(usize, Candidate, f64, usize)> = records
        .par_iter()
        .map(|&i| {
            let (c, v, evals) = refine(g, r, candidate(n, r, dim, seed, i), values[i], seed, i)?;
            Ok((i, c, v, evals))
        })
        .collect::<Result<_>>()?;

    let mut samples_used = budget;
    let mut best: Option<(Candidate, f64)> = None;
    for (_, c, v, evals) in refined {
        samples_used += evals;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((c, v));
        }
    }
    let (witness, value) = best.expect("budget ≥ 1 yields a record");
    Ok(SeminormEstimate {
        n,
        r,
        dim,
        value,
        witness_x: witness.x,
        witness_dirs: witness.dirs,
        samples_used,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Monomial,
    Sobolev,
}

/// Explicit bound for `g`: the monomial bound for `t^k`, otherwise the
/// Sobolev-type bound.
pub fn explicit_bound(g: &ScalarFunction, n: usize, r: f64) -> Result<(f64, BoundMethod)> {
    match g {
        ScalarFunction::Monomial(k) => Ok((monomial_bound(*k as usize, n, r), BoundMethod::Monomial)),
        _ => Ok((sobolev_bound(g, n, r)?, BoundMethod::Sobolev)),
    }
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub g_kind: String,
    pub bound: f64,
    pub empirical: SeminormEstimate,
    pub slack: f64,
    pub method: BoundMethod,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "g_kind,n,r,d,bound,empirical,slack,samples,seed";

    pub fn new(g: &ScalarFunction, empirical: SeminormEstimate) -> Result<Self> {
        let (bound, method) = explicit_bound(g, empirical.n, empirical.r)?;
        Ok(BoundReport {
            g_kind: g.kind_name().to_string(),
            bound,
            slack: bound - empirical.value,
            empirical,
            method,
        })
    }

    /// True unless the probe exceeded the bound beyond round-off.
    pub fn holds(&self) -> bool {
        self.slack >= -1e-9
    }

    pub fn csv_row(&self) -> String {
        let e = &self.empirical;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.g_kind, e.n, e.r, e.dim, self.bound, e.value, self.slack, e.samples_used, e.seed
        )
    }
}
