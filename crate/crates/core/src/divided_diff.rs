//! Divided differences `g[λ_0, …, λ_m]` over a fixed set of real nodes.
//!
//! Differences are symmetric in their arguments, so a table for nodes
//! `λ_0 ≤ … ≤ λ_{d-1}` stores one value per multiset of node indices. When
//! the nodes of a multiset span less than the clustering tolerance the value
//! comes from a Taylor expansion about their mean,
//!
//! ```text
//! g[ν_0, …, ν_m] = Σ_j g^{(m+j)}(c) / (m+j)! · h_j(ν_0 - c, …, ν_m - c)
//! ```
//!
//! with `h_j` the complete homogeneous symmetric polynomial; otherwise the
//! usual recurrence `(g[ν_1..ν_m] - g[ν_0..ν_{m-1}]) / (ν_m - ν_0)` is used.

use num_complex::Complex64;

use crate::combinatorics::{for_each_multiset, multiset_count, multiset_rank};
use crate::error::{Error, Result};
use crate::scalar_fn::ScalarFunction;

/// Relative clustering tolerance: nodes closer than
/// `CLUSTER_REL_TOL · (1 + max|λ|)` are treated as confluent.
pub const CLUSTER_REL_TOL: f64 = 1e-6;

/// Extra Taylor terms beyond the leading one in the confluent branch.
const TAYLOR_EXTRA_TERMS: usize = 3;

pub fn cluster_tolerance(nodes: &[f64]) -> f64 {
    let scale = nodes.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    CLUSTER_REL_TOL * (1.0 + scale)
}

/// Divided differences of one function over all index multisets up to a
/// given order.
#[derive(Clone, Debug)]
pub struct DividedDiffTable {
    nodes: Vec<f64>,
    order: usize,
    tolerance: f64,
    /// `levels[m]` holds the order-`m` differences indexed by multiset rank.
    levels: Vec<Vec<Complex64>>,
}

impl DividedDiffTable {
    /// `nodes` must be sorted ascending (eigenvalues already are).
    pub fn build(f: &ScalarFunction, nodes: &[f64], order: usize) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::invalid("nodes", "at least one node required"));
        }
        if nodes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("nodes", "must be sorted ascending"));
        }
        let d = nodes.len();
        let tolerance = cluster_tolerance(nodes);
        let mut levels: Vec<Vec<Complex64>> = Vec::with_capacity(order + 1);
        levels.push(nodes.iter().map(|&l| f.value(l)).collect());

        for m in 1..=order {
            let mut level = vec![Complex64::new(0.0, 0.0); multiset_count(d, m + 1)];
            let prev = &levels[m - 1];
            let mut failure = None;
            for_each_multiset(d, m + 1, |idx| {
                if failure.is_some() {
                    return;
                }
                let lo = nodes[idx[0]];
                let hi = nodes[idx[m]];
                let spread = hi - lo;
                let value = if spread <= tolerance {
                    match confluent(f, idx.iter().map(|&i| nodes[i]), m) {
                        Ok(v) => v,
                        Err(e) => {
                            failure = Some(e);
                            return;
                        }
                    }
                } else {
                    let upper = prev[multiset_rank(&idx[1..])];
                    let lower = prev[multiset_rank(&idx[..m])];
                    (upper - lower) / spread
                };
                level[multiset_rank(idx)] = value;
            });
            if let Some(e) = failure {
                return Err(e);
            }
            levels.push(level);
        }
        Ok(DividedDiffTable {
            nodes: nodes.to_vec(),
            order,
            tolerance,
            levels,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `g[λ_{i_0}, …, λ_{i_m}]` for indices already in nondecreasing order.
    #[inline]
    pub fn get_sorted(&self, sorted: &[usize]) -> Complex64 {
        self.levels[sorted.len() - 1][multiset_rank(sorted)]
    }

    /// `self += w · other`; both tables must share nodes and order.
    pub(crate) fn add_scaled(&mut self, w: Complex64, other: &DividedDiffTable) {
        debug_assert_eq!(self.nodes, other.nodes);
        for (mine, theirs) in self.levels.iter_mut().zip(&other.levels) {
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a += w * b;
            }
        }
    }

    pub(crate) fn zeroed(&self) -> DividedDiffTable {
        let mut out = self.clone();
        for level in &mut out.levels {
            level.fill(Complex64::new(0.0, 0.0));
        }
        out
    }

    /// `g[λ_{i_0}, …, λ_{i_m}]` for indices in any order.
    pub fn get(&self, indices: &[usize]) -> Complex64 {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        self.get_sorted(&sorted)
    }
}

fn confluent(f: &ScalarFunction, nodes: impl Iterator<Item = f64> + Clone, m: usize) -> Result<Complex64> {
    let count = (m + 1) as f64;
    let center = nodes.clone().sum::<f64>() / count;
    let max_order = f.max_order();
    if max_order < m {
        return Err(Error::InsufficientOrder {
            kind: f.kind_name().to_string(),
            max_order,
            requested: m,
        });
    }
    let extra = TAYLOR_EXTRA_TERMS.min(max_order - m);
    let mut h = vec![0.0; extra + 1];
    h[0] = 1.0;
    for node in nodes {
        let delta = node - center;
        for j in 1..=extra {
            h[j] += delta * h[j - 1];
        }
    }
    let mut inv_fact: f64 = (1..=m).map(|i| 1.0 / i as f64).product();
    let mut total = Complex64::new(0.0, 0.0);
    for (j, hj) in h.iter().enumerate() {
        if j > 0 {
            inv_fact /= (m + j) as f64;
        }
        if *hj == 0.0 && j > 0 {
            continue;
        }
        total += f.eval(center, m + j)? * (inv_fact * hj);
    }
    Ok(total)
}

/// Divided difference of `f` over arbitrary (unsorted, possibly repeated) nodes.
pub fn divided_difference(f: &ScalarFunction, nodes: &[f64]) -> Result<Complex64> {
    let mut sorted = nodes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let table = DividedDiffTable::build(f, &sorted, nodes.len() - 1)?;
    let all: Vec<usize> = (0..sorted.len()).collect();
    Ok(table.get_sorted(&all))
}
