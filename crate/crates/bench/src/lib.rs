//! Deterministic inputs shared by the benchmarks.

use hermcalc::rng::{draw_rng, random_hermitian_with_norm, random_matrix};
use hermcalc::{ComplexMatrix, HermitianMatrix};

/// A Hermitian point of norm `radius` and `order` random directions.
pub fn instance(dim: usize, order: usize, radius: f64, seed: u64) -> (HermitianMatrix, Vec<ComplexMatrix>) {
    let mut rng = draw_rng(seed, 0, 0);
    let x = random_hermitian_with_norm(&mut rng, dim, radius);
    let dirs = (0..order).map(|_| random_matrix(&mut rng, dim)).collect();
    (x, dirs)
}
