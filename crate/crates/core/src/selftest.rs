//! Invariant suite behind `hermcalc selftest`.
//!
//! Every check draws its instances from the counter-based generator, so a
//! report depends only on the seed and the size preset. Reports carry no
//! timings and serialize to identical bytes on every run.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::bounds::{monomial_bound, probe_seminorm, sobolev_bound};
use crate::combinatorics::{binomial, enum_compositions};
use crate::error::Result;
use crate::exp_deriv::{exp_derivative_dd, exp_derivative_mc, exp_scaled_derivative_dd, mat_exp, simplex_volume_mc};
use crate::fourier::{fourier_table, gstar_derivative_fourier, FourierParams};
use crate::linalg::{op_norm, ComplexMatrix};
use crate::oracle::{fd_derivative, exp_integral_quadrature, symbolic_power_expand, FdConfig};
use crate::poly_deriv::power_derivative;
use crate::rng::{draw_rng, random_hermitian_with_norm, random_matrix, streams};
use crate::scalar_fn::ScalarFunction;
use crate::spectral::{apply_function, gstar_derivative_dd};

#[derive(Clone, Debug, Default)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Smaller instance counts and sample sizes.
    pub quick: bool,
    /// Negative control: scales the reference simplex volume by 1.05 so
    /// that `simplex_volume` must fail.
    pub corrupt_volume_constant: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
    pub instances: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub version: &'static str,
    pub seed: u64,
    pub quick: bool,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Ctx {
    seed: u64,
    quick: bool,
}

impl Ctx {
    fn count(&self, quick: usize, full: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }

    fn rng(&self, check: u64, instance: usize) -> rand_chacha::ChaCha8Rng {
        draw_rng(self.seed, streams::TEST_INSTANCES, (check << 32) | instance as u64)
    }
}

/// Worst error seen across the instances of one check.
struct Worst {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    instances: usize,
    failures: usize,
}

impl Worst {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Worst {
            name,
            tolerance,
            worst: 0.0,
            instances: 0,
            failures: 0,
        }
    }

    fn record(&mut self, error: f64, ok: bool) {
        self.instances += 1;
        if error > self.worst || error.is_nan() {
            self.worst = error;
        }
        if !ok || error.is_nan() {
            self.failures += 1;
        }
    }

    fn check(&mut self, error: f64) {
        self.record(error, error <= self.tolerance);
    }

    fn finish(self, detail: impl Into<String>) -> CheckResult {
        CheckResult {
            name: self.name,
            passed: self.failures == 0 && self.instances > 0,
            worst: self.worst,
            tolerance: self.tolerance,
            instances: self.instances,
            detail: format!("{} failures; {}", self.failures, detail.into()),
        }
    }
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.max_abs_diff(b) / (b.max_abs() + 1e-12)
}

fn simplex_volume(ctx: &Ctx, corrupt: bool) -> Result<CheckResult> {
    let samples = ctx.count(200_000, 1_000_000);
    let mut w = Worst::new("simplex_volume", 3.0);
    let mut factorial = 1.0;
    for n in 1..=5usize {
        factorial *= n as f64;
        let mut reference = 1.0 / factorial;
        if corrupt {
            reference *= 1.05;
        }
        let est = simplex_volume_mc(n, samples, ctx.seed)?;
        let dev = (est.estimate - reference).abs();
        let sigmas = if est.std_error > 0.0 {
            dev / est.std_error
        } else if dev == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        w.check(sigmas);
    }
    Ok(w.finish(format!("|estimate - 1/n!| in standard errors, n = 1..5, {samples} samples")))
}

fn unitary_exp(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("unitary_exp", 1e-12);
    for i in 0..ctx.count(20, 100) {
        let mut rng = ctx.rng(1, i);
        let dim = rng.random_range(1..=6);
        let norm = rng.random_range(0.1..3.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let s = rng.random_range(-10.0..10.0);
        let u = mat_exp(x.matrix(), Complex64::new(0.0, s))?;
        w.check((op_norm(&u) - 1.0).abs());
    }
    Ok(w.finish("|‖exp(isx)‖ - 1|"))
}

fn commuting_exp(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("commuting_exp", 1e-11);
    for i in 0..ctx.count(10, 50) {
        let mut rng = ctx.rng(2, i);
        let dim = rng.random_range(2..=6);
        let h = random_hermitian_with_norm(&mut rng, dim, 1.0);
        let (a, b, c) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let h2 = h.matrix() * h.matrix();
        let x = &h.matrix().scale_real(a) + &h2.scale_real(b);
        let y = &h.matrix().scale_real(c) + &ComplexMatrix::identity(dim).scale_real(b - a);
        let one = Complex64::new(1.0, 0.0);
        let lhs = mat_exp(&(&x + &y), one)?;
        let rhs = &mat_exp(&x, one)? * &mat_exp(&y, one)?;
        w.check(lhs.max_abs_diff(&rhs) / rhs.max_abs().max(1.0));
    }
    Ok(w.finish("exp(x + y) vs exp(x) exp(y) for commuting x, y"))
}

fn exp_flow(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("exp_flow", 1e-8);
    for i in 0..ctx.count(10, 30) {
        let mut rng = ctx.rng(3, i);
        let dim = rng.random_range(2..=5);
        let norm = rng.random_range(0.2..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let t = rng.random_range(-1.0..1.0);
        let h = 1e-5;
        let plus = mat_exp(x.matrix(), Complex64::new(t + h, 0.0))?;
        let minus = mat_exp(x.matrix(), Complex64::new(t - h, 0.0))?;
        let fd = (&plus - &minus).scale_real(0.5 / h);
        let e = mat_exp(x.matrix(), Complex64::new(t, 0.0))?;
        let left = x.matrix() * &e;
        let right = &e * x.matrix();
        w.check(rel(&fd, &left).max(rel(&right, &left)));
    }
    Ok(w.finish("d/dt exp(tx) vs x exp(tx) and exp(tx) x"))
}

fn power_words(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("power_words", 1e-12);
    for i in 0..ctx.count(20, 100) {
        let mut rng = ctx.rng(4, i);
        let dim = rng.random_range(1..=6);
        let k = rng.random_range(0..=5);
        let n = rng.random_range(0..=3);
        let x = random_matrix(&mut rng, dim);
        let dirs: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, dim)).collect();
        let a = power_derivative(k, n, &x, &dirs)?;
        let b = symbolic_power_expand(k, &x, &dirs)?;
        w.check(a.max_abs_diff(&b) / b.max_abs().max(1.0));
    }
    Ok(w.finish("power_derivative vs word expansion"))
}

fn exp_dd_vs_mc(ctx: &Ctx) -> Result<CheckResult> {
    let samples = ctx.count(20_000, 100_000);
    let mut total = 0usize;
    let mut inside = 0usize;
    let instances = ctx.count(4, 12);
    for i in 0..instances {
        let mut rng = ctx.rng(5, i);
        let dim = rng.random_range(2..=6);
        let n = 1 + i % 3;
        let norm = rng.random_range(0.2..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let dirs: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, dim)).collect();
        let dd = exp_derivative_dd(&x, &dirs)?.value;
        let mc = exp_derivative_mc(&x, &dirs, samples, ctx.seed.wrapping_add(i as u64))?;
        let se = mc.std_error.expect("monte carlo reports errors");
        let scale = dd.max_abs();
        for ((a, b), s) in dd.as_slice().iter().zip(mc.value.as_slice()).zip(&se) {
            total += 1;
            if (a - b).norm() <= 3.0 * s + 1e-12 * scale {
                inside += 1;
            }
        }
    }
    let fraction = inside as f64 / total as f64;
    Ok(CheckResult {
        name: "exp_dd_vs_mc",
        passed: fraction >= 0.95,
        worst: fraction,
        tolerance: 0.95,
        instances,
        detail: format!("fraction of entries within 3 standard errors, {samples} samples"),
    })
}

fn exp_integral(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("exp_integral", 1e-9);
    for i in 0..ctx.count(10, 50) {
        let mut rng = ctx.rng(6, i);
        let dim = rng.random_range(1..=6);
        let norm = rng.random_range(0.0..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let v = random_matrix(&mut rng, dim);
        let q = exp_integral_quadrature(x.matrix(), &v, 1.0, 201)?;
        let dd = exp_derivative_dd(&x, std::slice::from_ref(&v))?.value;
        w.check(rel(&q, &dd));
    }
    Ok(w.finish("Simpson(201) integral vs closed-form first derivative"))
}

fn fd_oracle(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("fd_oracle", 1e-7);
    let exp = |m: &ComplexMatrix| mat_exp(m, Complex64::new(1.0, 0.0));
    for i in 0..ctx.count(5, 20) {
        let mut rng = ctx.rng(7, i);
        let dim = rng.random_range(2..=5);
        let norm = rng.random_range(0.2..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let v = random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix();
        let fd = fd_derivative(exp, x.matrix(), std::slice::from_ref(&v), &FdConfig::for_order(1))?;
        let dd = exp_derivative_dd(&x, std::slice::from_ref(&v))?.value;
        w.check(rel(&fd, &dd));
    }
    Ok(w.finish("central difference (h = 1e-4) vs closed form, n = 1"))
}

fn derivative_bound(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("exp_is_bound", 1e-9);
    for i in 0..ctx.count(20, 60) {
        let mut rng = ctx.rng(8, i);
        let dim = rng.random_range(1..=5);
        let n = i % 4;
        let norm = rng.random_range(0.0..3.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let s: f64 = rng.random_range(-5.0..5.0);
        let dirs: Vec<_> = (0..n).map(|_| random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix()).collect();
        let d = exp_scaled_derivative_dd(&x, Complex64::new(0.0, s), &dirs)?.value;
        let bound = s.abs().powi(n as i32);
        w.check(((op_norm(&d) - bound) / bound.max(1e-300)).max(0.0));
    }
    Ok(w.finish("excess of ‖D^n exp(isx)‖ over |s|^n"))
}

fn fourier_vs_dd(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("fourier_vs_dd", 1e-5);
    let per_function = ctx.count(2, 6);
    for (gi, g) in [ScalarFunction::Gaussian, ScalarFunction::Sin].iter().enumerate() {
        let table = fourier_table(g, 2.0, &FourierParams::for_order(2))?;
        for i in 0..per_function {
            let mut rng = ctx.rng(9, gi * 1000 + i);
            let dim = rng.random_range(1..=5);
            let norm = rng.random_range(0.0..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
            let n = i % 3;
            let dirs: Vec<_> = (0..n).map(|_| random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix()).collect();
            let f = gstar_derivative_fourier(&table, &x, &dirs)?.value;
            let dd = gstar_derivative_dd(g, &x, &dirs)?.value;
            w.check(rel(&f, &dd));
            if n == 0 {
                let direct = apply_function(g, &x)?;
                let err = f.max_abs_diff(&direct);
                w.record(err, err <= 1e-6);
            }
        }
    }
    Ok(w.finish("Fourier synthesis vs divided differences, ‖x‖ ≤ 2, n ≤ 2"))
}

fn check_monomial_bound(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("monomial_bound", 1e-9);
    let budget = ctx.count(8, 24);
    let mut tight = 0.0;
    for k in 0..=6u32 {
        for n in 0..=3usize {
            let r = [0.5, 1.0, 2.0][(k as usize + n) % 3];
            let g = ScalarFunction::Monomial(k);
            let est = probe_seminorm(&g, n, r, 3, budget, ctx.seed)?;
            let bound = monomial_bound(k as usize, n, r);
            w.check((est.value - bound).max(0.0) / bound.max(1.0));
            if k == 2 && n == 1 {
                tight = est.value / bound;
            }
        }
    }
    let ok = tight >= 0.999;
    w.record(0.0, ok);
    Ok(w.finish(format!("probe excess over k!/(k-n)! r^(k-n); tightness at k=2, n=1: {tight}")))
}

fn check_sobolev_bound(ctx: &Ctx) -> Result<CheckResult> {
    let mut w = Worst::new("sobolev_bound", 1e-9);
    let budget = ctx.count(8, 24);
    let functions = [ScalarFunction::Exp, ScalarFunction::Sin, ScalarFunction::Gaussian, ScalarFunction::Monomial(3)];
    for (gi, g) in functions.iter().enumerate() {
        for n in 0..=2usize {
            let r = [0.5, 1.0, 2.0][(gi + n) % 3];
            let dim = [2, 4][(gi + n) % 2];
            let est = probe_seminorm(g, n, r, dim, budget, ctx.seed)?;
            let bound = sobolev_bound(g, n, r)?;
            w.check((est.value - bound).max(0.0));
        }
    }
    Ok(w.finish("probe excess over the Sobolev-type bound"))
}

fn compositions() -> CheckResult {
    let mut w = Worst::new("compositions", 0.0);
    for n in 0..=8usize {
        for k in 0..=8i64 {
            let count = enum_compositions(n, k).len() as u64;
            let want = binomial((n as u64) + k as u64, n as u64).expect("small");
            w.check(count.abs_diff(want) as f64);
        }
    }
    w.finish("|count - C(n+k, n)| for n, k ≤ 8")
}

fn guarded(name: &'static str, result: Result<CheckResult>) -> CheckResult {
    result.unwrap_or_else(|e| CheckResult {
        name,
        passed: false,
        worst: f64::NAN,
        tolerance: f64::NAN,
        instances: 0,
        detail: format!("error: {e}"),
    })
}

/// Runs every check; never panics on numerical errors, which are reported as
/// failed checks.
pub fn run(config: &SelftestConfig) -> SelftestReport {
    let ctx = Ctx {
        seed: config.seed,
        quick: config.quick,
    };
    let checks = vec![
        guarded("simplex_volume", simplex_volume(&ctx, config.corrupt_volume_constant)),
        guarded("unitary_exp", unitary_exp(&ctx)),
        guarded("commuting_exp", commuting_exp(&ctx)),
        guarded("exp_flow", exp_flow(&ctx)),
        guarded("power_words", power_words(&ctx)),
        guarded("exp_dd_vs_mc", exp_dd_vs_mc(&ctx)),
        guarded("exp_integral", exp_integral(&ctx)),
        guarded("fd_oracle", fd_oracle(&ctx)),
        guarded("exp_is_bound", derivative_bound(&ctx)),
        guarded("fourier_vs_dd", fourier_vs_dd(&ctx)),
        guarded("monomial_bound", check_monomial_bound(&ctx)),
        guarded("sobolev_bound", check_sobolev_bound(&ctx)),
        compositions(),
    ];
    SelftestReport {
        version: crate::VERSION,
        seed: config.seed,
        quick: config.quick,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
