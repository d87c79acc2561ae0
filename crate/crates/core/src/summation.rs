//! Fixed-order pairwise summation.
//!
//! Items are combined as a balanced binary tree determined only by their
//! position in the input sequence, so the rounding pattern does not depend on
//! how the items were produced (sequentially or by a thread pool).

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

/// Values that can be added in place.
pub trait Summand: Clone {
    fn add_assign_ref(&mut self, other: &Self);
}

impl Summand for f64 {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
}

impl Summand for Complex64 {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += *other;
    }
}

impl Summand for ComplexMatrix {
    fn add_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.as_mut_slice().iter_mut().zip(other.as_slice()) {
            *a += b;
        }
    }
}

impl Summand for Vec<f64> {
    fn add_assign_ref(&mut self, other: &Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

/// Streaming pairwise accumulator (binary-counter merge), `O(log n)` memory.
#[derive(Debug, Clone)]
pub struct PairwiseSum<T> {
    stack: Vec<(u32, T)>,
}

impl<T: Summand> Default for PairwiseSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Summand> PairwiseSum<T> {
    pub fn new() -> Self {
        PairwiseSum { stack: Vec::new() }
    }

    pub fn push(&mut self, item: T) {
        let mut level = 0u32;
        let mut acc = item;
        while let Some((top_level, _)) = self.stack.last() {
            if *top_level != level {
                break;
            }
            let (_, mut left) = self.stack.pop().unwrap();
            left.add_assign_ref(&acc);
            acc = left;
            level += 1;
        }
        self.stack.push((level, acc));
    }

    /// Combined total, or `None` when nothing was pushed.
    pub fn finish(self) -> Option<T> {
        let mut iter = self.stack.into_iter().rev();
        let (_, mut acc) = iter.next()?;
        for (_, mut left) in iter {
            left.add_assign_ref(&acc);
            acc = left;
        }
        Some(acc)
    }
}

pub fn pairwise_sum<T: Summand>(items: impl IntoIterator<Item = T>) -> Option<T> {
    let mut acc = PairwiseSum::new();
    for item in items {
        acc.push(item);
    }
    acc.finish()
}
