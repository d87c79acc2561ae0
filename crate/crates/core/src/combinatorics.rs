//! Permutations of `{1, …, n}` and weak compositions `α = (α_0, …, α_n)`
//! with `Σ α_i = k`, the index sets of the power and exponential
//! derivative expansions.

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enum_permutations`].
pub const MAX_PERMUTATION_ORDER: usize = 10;

/// Weak composition of `total` into `parts.len()` nonnegative parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
}

/// Bijection of `{0, …, n-1}` (zero-based images).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn from_mapping(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() || seen[m] {
                return Err(Error::invalid("mapping", "not a bijection"));
            }
            seen[m] = true;
        }
        Ok(Permutation { mapping })
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Zero-based image of position `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// Images in the conventional one-based notation.
    pub fn one_based(&self) -> Vec<usize> {
        self.mapping.iter().map(|m| m + 1).collect()
    }
}

/// All weak compositions of `k` into `n + 1` parts, in lexicographic order.
///
/// Returns an empty list for negative `k`.
pub fn enum_compositions(n: usize, k: i64) -> Vec<Composition> {
    if k < 0 {
        return Vec::new();
    }
    let k = k as usize;
    let mut out = Vec::new();
    let mut parts = vec![0usize; n + 1];
    fill_compositions(&mut parts, 0, k, &mut out);
    out
}

fn fill_compositions(parts: &mut [usize], idx: usize, remaining: usize, out: &mut Vec<Composition>) {
    if idx + 1 == parts.len() {
        parts[idx] = remaining;
        out.push(Composition {
            parts: parts.to_vec(),
        });
        return;
    }
    for v in 0..=remaining {
        parts[idx] = v;
        fill_compositions(parts, idx + 1, remaining - v, out);
    }
}

/// All `n!` permutations in lexicographic order; `n = 0` yields the single
/// empty permutation.
pub fn enum_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n > MAX_PERMUTATION_ORDER {
        return Err(Error::CapExceeded {
            what: "permutation order",
            value: n,
            cap: MAX_PERMUTATION_ORDER,
        });
    }
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![Permutation {
        mapping: current.clone(),
    }];
    while next_permutation(&mut current) {
        out.push(Permutation {
            mapping: current.clone(),
        });
    }
    Ok(out)
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Exact binomial coefficient; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).ok()
}

pub fn factorial(n: u64) -> Option<u64> {
    (1..=n).try_fold(1u64, |acc, i| acc.checked_mul(i))
}

/// Multisets of size `len` drawn from `{0, …, d-1}`, each listed in
/// nondecreasing order, indexed by colexicographic rank.
///
/// Used to store symmetric tables (divided differences) compactly.
pub(crate) fn multiset_rank(sorted: &[usize]) -> usize {
    // (a_0 <= … <= a_m) -> strictly increasing b_j = a_j + j, ranked in colex.
    sorted
        .iter()
        .enumerate()
        .map(|(j, &a)| binomial((a + j) as u64, (j + 1) as u64).unwrap() as usize)
        .sum()
}

pub(crate) fn multiset_count(d: usize, len: usize) -> usize {
    if len == 0 {
        return 1;
    }
    binomial((d + len - 1) as u64, len as u64).unwrap() as usize
}

/// Visits all nondecreasing index tuples of length `len` over `{0, …, d-1}`.
pub(crate) fn for_each_multiset(d: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len == 0 {
        f(&[]);
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        // advance like an odometer keeping idx nondecreasing
        let mut pos = len;
        while pos > 0 {
            pos -= 1;
            if idx[pos] + 1 < d {
                idx[pos] += 1;
                let v = idx[pos];
                for slot in idx.iter_mut().skip(pos + 1) {
                    *slot = v;
                }
                break;
            }
            if pos == 0 {
                return;
            }
        }
    }
}
