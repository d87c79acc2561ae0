//! Spectral calculus on Hermitian matrices.
//!
//! `g(x) = U diag(g(λ)) U*`, and in the eigenbasis of `x` the n-th derivative
//! of `g_*` applied to `W_j = U* v_j U` has entries
//!
//! ```text
//! Σ_φ Σ_{i_1..i_{n-1}} W_{φ(1)}[a, i_1] W_{φ(2)}[i_1, i_2] ⋯ W_{φ(n)}[i_{n-1}, b]
//!                       · g[λ_a, λ_{i_1}, …, λ_{i_{n-1}}, λ_b]
//! ```
//!
//! which for `g = exp` is the closed form of the simplex integrals of the
//! exponential derivative formula.

use num_complex::Complex64;

use crate::combinatorics::{enum_permutations, Permutation};
use crate::derivative::{check_directions, DerivativeMethod, MultilinearDerivative};
use crate::divided_diff::DividedDiffTable;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Eigendecomposition, HermitianMatrix};
use crate::scalar_fn::ScalarFunction;
use crate::summation::PairwiseSum;

/// Largest derivative order for the eigenbasis paths.
pub const MAX_DD_ORDER: usize = 4;
/// Largest matrix dimension for the eigenbasis paths.
pub const MAX_DD_DIM: usize = 32;

/// `g(x)` by spectral calculus.
pub fn apply_function(g: &ScalarFunction, x: &HermitianMatrix) -> Result<ComplexMatrix> {
    // Polynomials are evaluated directly, which is exact for the identity.
    let coeffs = match g {
        ScalarFunction::Polynomial(c) => Some(c.clone()),
        ScalarFunction::Monomial(k) => {
            let mut c = vec![0.0; *k as usize + 1];
            c[*k as usize] = 1.0;
            Some(c)
        }
        _ => None,
    };
    if let Some(c) = coeffs {
        return Ok(horner(&c, x.matrix()));
    }
    let eig = x.eig()?;
    Ok(apply_with_eig(g, &eig))
}

pub(crate) fn apply_with_eig(g: &ScalarFunction, eig: &Eigendecomposition) -> ComplexMatrix {
    let mut out = eig.map(|l| g.value(l));
    if g.is_real() {
        hermitize(&mut out);
    }
    out
}

fn horner(coeffs: &[f64], x: &ComplexMatrix) -> ComplexMatrix {
    let dim = x.dim();
    let mut acc = ComplexMatrix::zeros(dim);
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if i + 1 < coeffs.len() {
            acc = &acc * x;
        }
        for j in 0..dim {
            acc[(j, j)] += c;
        }
    }
    hermitize(&mut acc);
    acc
}

/// Replaces `m` by its Hermitian part; used where the exact result is
/// Hermitian and only rounding breaks the symmetry.
pub(crate) fn hermitize(m: &mut ComplexMatrix) {
    let n = m.dim();
    for i in 0..n {
        for j in i..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

pub(crate) fn check_dd_caps(dim: usize, n: usize) -> Result<()> {
    if n > MAX_DD_ORDER {
        return Err(Error::CapExceeded {
            what: "derivative order",
            value: n,
            cap: MAX_DD_ORDER,
        });
    }
    if dim > MAX_DD_DIM {
        return Err(Error::CapExceeded {
            what: "matrix dimension",
            value: dim,
            cap: MAX_DD_DIM,
        });
    }
    Ok(())
}

/// Directions rotated into the eigenbasis of `x`, with the permutation list
/// for their order. Reused across many functions of the same `x`.
pub(crate) struct EigenbasisDirections {
    pub rotated: Vec<ComplexMatrix>,
    pub perms: Vec<Permutation>,
}

impl EigenbasisDirections {
    pub fn new(eig: &Eigendecomposition, dirs: &[ComplexMatrix]) -> Result<Self> {
        Ok(EigenbasisDirections {
            rotated: dirs.iter().map(|v| eig.to_eigenbasis(v)).collect(),
            perms: enum_permutations(dirs.len())?,
        })
    }

    pub fn order(&self) -> usize {
        self.rotated.len()
    }
}

/// Derivative in the eigenbasis: sum over permutations of the chain
/// contractions against the divided-difference table.
pub(crate) fn derivative_in_eigenbasis(
    table: &DividedDiffTable,
    dirs: &EigenbasisDirections,
) -> ComplexMatrix {
    let d = table.nodes().len();
    let n = dirs.order();
    if n == 0 {
        let diag: Vec<Complex64> = (0..d).map(|i| table.get_sorted(&[i])).collect();
        return ComplexMatrix::from_complex_diag(&diag);
    }
    let mut acc = PairwiseSum::new();
    let mut chain: Vec<&ComplexMatrix> = Vec::with_capacity(n);
    for phi in &dirs.perms {
        chain.clear();
        chain.extend((0..n).map(|slot| &dirs.rotated[phi.apply(slot)]));
        acc.push(contract_chain(table, &chain));
    }
    acc.finish().expect("at least one permutation")
}

/// `R[a, b] = Σ W_1[a, i_1] ⋯ W_n[i_{n-1}, b] · g[λ_a, λ_{i_1}, …, λ_b]`.
fn contract_chain(table: &DividedDiffTable, chain: &[&ComplexMatrix]) -> ComplexMatrix {
    let d = table.nodes().len();
    let n = chain.len();
    let mut out = ComplexMatrix::zeros(d);
    if n == 1 {
        let w = chain[0];
        for a in 0..d {
            for b in 0..d {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                out[(a, b)] = w[(a, b)] * table.get_sorted(&[lo, hi]);
            }
        }
        return out;
    }
    let mut path = vec![0usize; n + 1];
    let mut sorted = vec![0usize; n + 1];
    for a in 0..d {
        path[0] = a;
        walk(
            table,
            chain,
            1,
            Complex64::new(1.0, 0.0),
            &mut path,
            &mut sorted,
            &mut out,
        );
    }
    out
}

fn walk(
    table: &DividedDiffTable,
    chain: &[&ComplexMatrix],
    depth: usize,
    weight: Complex64,
    path: &mut [usize],
    sorted: &mut [usize],
    out: &mut ComplexMatrix,
) {
    let d = table.nodes().len();
    let n = chain.len();
    let prev = path[depth - 1];
    let w = chain[depth - 1];
    for next in 0..d {
        let entry = w[(prev, next)];
        if entry.re == 0.0 && entry.im == 0.0 {
            continue;
        }
        let product = weight * entry;
        path[depth] = next;
        if depth == n {
            sorted.copy_from_slice(path);
            sorted.sort_unstable();
            out[(path[0], next)] += product * table.get_sorted(sorted);
        } else {
            walk(table, chain, depth + 1, product, path, sorted, out);
        }
    }
}

/// `⟨D^n g_*(x), v_1 ⊗ … ⊗ v_n⟩` from an existing eigendecomposition.
pub(crate) fn gstar_derivative_with_eig(
    g: &ScalarFunction,
    eig: &Eigendecomposition,
    dirs: &EigenbasisDirections,
) -> Result<ComplexMatrix> {
    let table = DividedDiffTable::build(g, &eig.eigenvalues, dirs.order())?;
    Ok(eig.from_eigenbasis(&derivative_in_eigenbasis(&table, dirs)))
}

/// `⟨D^n g_*(x), v_1 ⊗ … ⊗ v_n⟩` via divided differences of `g` over the
/// spectrum of `x`.
pub fn gstar_derivative_dd(
    g: &ScalarFunction,
    x: &HermitianMatrix,
    dirs: &[ComplexMatrix],
) -> Result<MultilinearDerivative> {
    let dim = x.dim();
    check_directions(dim, dirs, None)?;
    check_dd_caps(dim, dirs.len())?;
    let eig = x.eig()?;
    let rotated = EigenbasisDirections::new(&eig, dirs)?;
    let mut value = gstar_derivative_with_eig(g, &eig, &rotated)?;
    if g.is_real() && dirs.iter().all(ComplexMatrix::is_exactly_hermitian) {
        hermitize(&mut value);
    }
    Ok(MultilinearDerivative::exact(
        value,
        dirs.len(),
        DerivativeMethod::DividedDifference,
    ))
}
