//! Counter-based random streams and random test matrices.
//!
//! Draw `index` of stream `stream` under `seed` always comes from the same
//! block of the ChaCha keystream, so Monte Carlo results do not depend on how
//! many workers evaluate the draws or in what order.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{op_norm, ComplexMatrix, HermitianMatrix};

/// 32-bit words reserved per draw; no single draw consumes more.
const WORDS_PER_DRAW: u128 = 1 << 20;

/// Stream identifiers for the different consumers of randomness.
pub mod streams {
    pub const SIMPLEX: u64 = 1;
    pub const VOLUME: u64 = 2;
    pub const PROBE: u64 = 3;
    pub const PROBE_REFINE: u64 = 4;
    pub const TEST_INSTANCES: u64 = 5;
}

/// Generator positioned at the start of the block for `(seed, stream, index)`.
pub fn draw_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(index as u128 * WORDS_PER_DRAW);
    rng
}

pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Gaussian matrix with independent complex normal entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let data = (0..dim * dim).map(|_| standard_complex(rng)).collect();
    ComplexMatrix::from_vec(dim, data).expect("finite Gaussian samples")
}

/// GUE-like Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let m = random_matrix(rng, dim);
    let sum = &m + &m.adjoint();
    HermitianMatrix::new(sum.scale_real(0.5)).expect("symmetrized matrix is Hermitian")
}

/// Random Hermitian matrix rescaled to the given operator norm.
pub fn random_hermitian_with_norm<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    norm: f64,
) -> HermitianMatrix {
    loop {
        let h = random_hermitian(rng, dim);
        let current = op_norm(h.matrix());
        if current > 1e-8 {
            return h.scale(norm / current);
        }
    }
}

/// Random matrix rescaled to the given operator norm.
pub fn random_matrix_with_norm<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> ComplexMatrix {
    loop {
        let m = random_matrix(rng, dim);
        let current = op_norm(&m);
        if current > 1e-8 {
            return m.scale_real(norm / current);
        }
    }
}
