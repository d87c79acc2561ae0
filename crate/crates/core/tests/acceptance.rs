//! Acceptance suite: one PASS/FAIL line per check, nonzero exit on failure.
//!
//! Run alone with `cargo test -p hermcalc-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hermcalc::bounds::{monomial_bound, probe_seminorm, sobolev_bound};
use hermcalc::combinatorics::{binomial, enum_compositions};
use hermcalc::exp_deriv::{
    exp_derivative_dd, exp_derivative_mc, exp_scaled_derivative_dd, mat_exp, simplex_volume_mc,
};
use hermcalc::fourier::{fourier_table, gstar_derivative_fourier, FourierParams};
use hermcalc::oracle::{fd_derivative, exp_integral_quadrature, symbolic_power_expand, FdConfig};
use hermcalc::poly_deriv::power_derivative;
use hermcalc::rng::{draw_rng, random_hermitian_with_norm, random_matrix, streams};
use hermcalc::selftest::{self, SelftestConfig};
use hermcalc::spectral::{apply_function, gstar_derivative_dd};
use hermcalc::{op_norm, Complex64, ComplexMatrix, HermitianMatrix, ScalarFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

fn instance_rng(check: u64, i: usize) -> ChaCha8Rng {
    draw_rng(SEED, streams::TEST_INSTANCES, (check << 32) | i as u64)
}

fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.max_abs_diff(b) / (b.max_abs() + 1e-12)
}

fn within_budget(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

fn simplex_volume() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut fact = 1.0;
    for n in 1..=5 {
        fact *= n as f64;
        let est = simplex_volume_mc(n, 1_000_000, SEED).unwrap();
        let dev = (est.estimate - 1.0 / fact).abs();
        let sigmas = if dev == 0.0 { 0.0 } else { dev / est.std_error };
        worst = worst.max(sigmas);
    }
    let t = start.elapsed();
    outcome(
        worst <= 3.0 && within_budget(t, Duration::from_secs(10)),
        format!("max |estimate - 1/n!| = {worst:.2} standard errors, n = 1..5, {t:.2?}"),
    )
}

fn composition_count() -> Outcome {
    let start = Instant::now();
    let mut bad = 0;
    for n in 0..=8usize {
        for k in 0..=8i64 {
            let want = binomial((n as u64) + k as u64, n as u64).unwrap();
            if enum_compositions(n, k).len() as u64 != want {
                bad += 1;
            }
        }
    }
    let t = start.elapsed();
    outcome(
        bad == 0 && within_budget(t, Duration::from_secs(1)),
        format!("{bad} mismatches over n, k ≤ 8, {t:.2?}"),
    )
}

fn power_derivative_exact() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let mut rng = instance_rng(3, i);
        let dim = rng.random_range(1..=6);
        let k = rng.random_range(0..=5);
        let n = rng.random_range(0..=3);
        let x = random_matrix(&mut rng, dim);
        let dirs: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, dim)).collect();
        let a = power_derivative(k, n, &x, &dirs).unwrap();
        let b = symbolic_power_expand(k, &x, &dirs).unwrap();
        worst = worst.max(a.max_abs_diff(&b) / b.max_abs().max(1.0));
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && within_budget(t, Duration::from_secs(30)),
        format!("max scaled deviation {worst:.2e} over 100 instances, {t:.2?}"),
    )
}

fn exp_dd_vs_mc() -> Outcome {
    let start = Instant::now();
    let (mut inside, mut total) = (0usize, 0usize);
    for i in 0..50 {
        let mut rng = instance_rng(4, i);
        let dim = rng.random_range(1..=8);
        let n = i % 4;
        let norm = rng.random_range(0.1..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let dirs: Vec<_> = (0..n).map(|_| random_matrix(&mut rng, dim)).collect();
        let dd = exp_derivative_dd(&x, &dirs).unwrap().value;
        let mc = exp_derivative_mc(&x, &dirs, 100_000, SEED + i as u64).unwrap();
        let se = mc.std_error.unwrap();
        let scale = dd.max_abs();
        for ((a, b), s) in dd.as_slice().iter().zip(mc.value.as_slice()).zip(&se) {
            total += 1;
            if (a - b).norm() <= 3.0 * s + 1e-12 * scale {
                inside += 1;
            }
        }
    }
    let t = start.elapsed();
    let fraction = inside as f64 / total as f64;
    outcome(
        fraction >= 0.95 && within_budget(t, Duration::from_secs(120)),
        format!("{:.2}% of {total} entries within 3σ, 50 instances, {t:.2?}", 100.0 * fraction),
    )
}

/// Least-squares slope of log(err) against log(h).
fn loglog_slope(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn fd_convergence() -> Outcome {
    let exp = |m: &ComplexMatrix| mat_exp(m, Complex64::new(1.0, 0.0));
    let sin = |m: &ComplexMatrix| apply_function(&ScalarFunction::Sin, &HermitianMatrix::new(m.clone())?);
    let mut slopes = Vec::new();
    let mut slopes2 = Vec::new();
    let mut agree1: f64 = 0.0;
    let mut agree2: f64 = 0.0;
    for i in 0..5 {
        let mut rng = instance_rng(5, i);
        let dim = rng.random_range(2..=5);
        let norm = rng.random_range(0.5..2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let v = random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix();
        let w = random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix();

        let one = [v.clone()];
        let two = [v.clone(), w.clone()];
        let exact_exp1 = exp_derivative_dd(&x, &one).unwrap().value;
        let exact_sin1 = gstar_derivative_dd(&ScalarFunction::Sin, &x, &one).unwrap().value;
        let exact_exp2 = exp_derivative_dd(&x, &two).unwrap().value;
        let exact_sin2 = gstar_derivative_dd(&ScalarFunction::Sin, &x, &two).unwrap().value;

        let hs = [1e-2, 1e-3, 1e-4];
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| rel(&fd_derivative(exp, x.matrix(), &one, &FdConfig::uniform(1, h)).unwrap(), &exact_exp1))
            .collect();
        slopes.push(loglog_slope(&hs, &errs));
        let errs: Vec<f64> = hs
            .iter()
            .map(|&h| rel(&fd_derivative(sin, x.matrix(), &one, &FdConfig::uniform(1, h)).unwrap(), &exact_sin1))
            .collect();
        slopes.push(loglog_slope(&hs, &errs));

        // Second order: h = 1e-4 is dominated by cancellation (eps / h² ≈ 1e-8),
        // so the slope is measured one decade up.
        let hs2 = [1e-1, 1e-2, 1e-3];
        for (f, exact) in [(&exp as &dyn Fn(&ComplexMatrix) -> _, &exact_exp2), (&sin, &exact_sin2)] {
            let errs: Vec<f64> = hs2
                .iter()
                .map(|&h| rel(&fd_derivative(f, x.matrix(), &two, &FdConfig::uniform(2, h)).unwrap(), exact))
                .collect();
            slopes2.push(loglog_slope(&hs2, &errs));
        }

        agree1 = agree1.max(errs[2]);
        agree1 = agree1.max(rel(
            &fd_derivative(exp, x.matrix(), &one, &FdConfig::uniform(1, 1e-4)).unwrap(),
            &exact_exp1,
        ));
        for (f, exact) in [(&exp as &dyn Fn(&ComplexMatrix) -> _, &exact_exp2), (&sin, &exact_sin2)] {
            let fd = fd_derivative(f, x.matrix(), &two, &FdConfig::uniform(2, 1e-3)).unwrap();
            agree2 = agree2.max(rel(&fd, exact));
        }
    }
    let range = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(*s), b.max(*s)));
    let (lo, hi) = range(&slopes);
    let (lo2, hi2) = range(&slopes2);
    outcome(
        lo >= 1.9 && hi <= 2.1 && lo2 >= 1.9 && hi2 <= 2.1 && agree1 <= 1e-7 && agree2 <= 1e-4,
        format!(
            "n=1 slopes in [{lo:.3}, {hi:.3}] over h = 1e-2..1e-4; n=2 slopes in [{lo2:.3}, {hi2:.3}] over h = 1e-1..1e-3; \
             n=1 rel err {agree1:.2e} at h=1e-4; n=2 rel err {agree2:.2e} at h=1e-3"
        ),
    )
}

fn integral_quadrature() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let mut rng = instance_rng(6, i);
        let dim = rng.random_range(1..=6);
        let norm = rng.random_range(0.0..=2.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let v = random_matrix(&mut rng, dim);
        let q = exp_integral_quadrature(x.matrix(), &v, 1.0, 201).unwrap();
        let dd = exp_derivative_dd(&x, std::slice::from_ref(&v)).unwrap().value;
        worst = worst.max(rel(&q, &dd));
    }
    outcome(worst <= 1e-9, format!("max relative error {worst:.2e}, 201 nodes, 50 instances"))
}

fn unitary_exp() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let mut rng = instance_rng(7, i);
        let dim = rng.random_range(1..=8);
        let norm = rng.random_range(0.0..4.0);
        let x = random_hermitian_with_norm(&mut rng, dim, norm);
        let s = rng.random_range(-10.0..=10.0);
        let u = mat_exp(x.matrix(), Complex64::new(0.0, s)).unwrap();
        worst = worst.max((op_norm(&u) - 1.0).abs());
    }
    outcome(worst <= 1e-12, format!("max |‖exp(isx)‖ - 1| = {worst:.2e}, 100 instances"))
}

fn commuting_exp() -> Outcome {
    let mut worst: f64 = 0.0;
    let one = Complex64::new(1.0, 0.0);
    for i in 0..50 {
        let mut rng = instance_rng(8, i);
        let dim = rng.random_range(1..=6);
        let seed_norm = rng.random_range(0.2..1.5);
        let h = random_hermitian_with_norm(&mut rng, dim, seed_norm).into_matrix();
        let h2 = &h * &h;
        let h3 = &h2 * &h;
        let c: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = &(&h.scale_real(c[0]) + &h2.scale_real(c[1])) + &h3.scale_real(c[2]);
        let y = &(&ComplexMatrix::identity(dim).scale_real(c[3]) + &h.scale_real(c[4])) + &h2.scale_real(c[5]);
        let lhs = mat_exp(&(&x + &y), one).unwrap();
        let rhs = &mat_exp(&x, one).unwrap() * &mat_exp(&y, one).unwrap();
        worst = worst.max(lhs.max_abs_diff(&rhs) / rhs.max_abs().max(1.0));
    }
    outcome(worst <= 1e-11, format!("max scaled ‖exp(x+y) - exp(x)exp(y)‖ = {worst:.2e}, 50 pairs"))
}

fn exp_is_derivative_bound() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut samples = 0;
    for i in 0..200 {
        let mut rng = instance_rng(9, i);
        let dim = rng.random_range(1..=6);
        let n = i % 4;
        let s: f64 = rng.random_range(-10.0..10.0);
        let (x, dirs) = if i % 5 == 0 {
            // Scalar point with identity directions attains |s|^n.
            let c = rng.random_range(-2.0..2.0);
            (HermitianMatrix::identity(dim).scale(c), vec![ComplexMatrix::identity(dim); n])
        } else {
            let norm = rng.random_range(0.0..3.0);
            let x = random_hermitian_with_norm(&mut rng, dim, norm);
            let dirs = (0..n)
                .map(|j| {
                    if (i + j) % 2 == 0 {
                        random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix()
                    } else {
                        random_matrix(&mut rng, dim)
                    }
                })
                .collect();
            (x, dirs)
        };
        let d = exp_scaled_derivative_dd(&x, Complex64::new(0.0, s), &dirs).unwrap().value;
        let denom: f64 = dirs.iter().map(op_norm).product();
        let ratio = op_norm(&d) / denom / s.abs().powi(n as i32);
        worst = worst.max(ratio);
        samples += 1;
    }
    outcome(
        worst <= 1.0 + 1e-9,
        format!("max ‖D^n exp(isx)‖ / (|s|^n Π‖v_i‖) = {worst:.12}, {samples} samples, n ≤ 3"),
    )
}

fn monomial_bound_check() -> Outcome {
    let start = Instant::now();
    let mut worst = f64::NEG_INFINITY;
    let mut tight = f64::INFINITY;
    for k in 0..=6u32 {
        for n in 0..=3usize {
            for r in [0.5, 1.0, 2.0] {
                let est = probe_seminorm(&ScalarFunction::Monomial(k), n, r, 3, 30, SEED).unwrap();
                let bound = monomial_bound(k as usize, n, r);
                worst = worst.max((est.value - bound) / bound.max(1.0));
                if k == 2 && n == 1 {
                    tight = tight.min(est.value / bound);
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && tight >= 0.999,
        format!("max scaled excess {worst:.2e}; probe/bound at k=2, n=1: {tight:.6}; {t:.2?}"),
    )
}

fn sobolev_bound_check() -> Outcome {
    let start = Instant::now();
    let functions = [
        ScalarFunction::Exp,
        ScalarFunction::Sin,
        ScalarFunction::Gaussian,
        ScalarFunction::Monomial(3),
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for g in &functions {
        for n in 0..=2usize {
            for r in [0.5, 1.0, 2.0] {
                let bound = sobolev_bound(g, n, r).unwrap();
                for dim in [2, 4, 8] {
                    let est = probe_seminorm(g, n, r, dim, 30, SEED).unwrap();
                    worst = worst.max(est.value - bound);
                    cases += 1;
                }
            }
        }
    }
    let bound = sobolev_bound(&ScalarFunction::Exp, 0, 1.0).unwrap();
    let est = probe_seminorm(&ScalarFunction::Exp, 0, 1.0, 4, 30, SEED).unwrap();
    let slack = bound - est.value;
    let t = start.elapsed();
    outcome(
        worst <= 1e-9 && (bound - 3.149).abs() < 1e-3 && (est.value - std::f64::consts::E).abs() < 1e-6 && (slack - 0.43).abs() < 0.01,
        format!(
            "max excess {worst:.2e} over {cases} cases; exp, n=0, r=1: bound {bound:.4}, empirical {:.6}, slack {slack:.4}; {t:.2?}",
            est.value
        ),
    )
}

fn fourier_vs_dd() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst0: f64 = 0.0;
    let mut count = 0;
    for (gi, g) in [ScalarFunction::Gaussian, ScalarFunction::Sin].iter().enumerate() {
        let table = fourier_table(g, 2.0, &FourierParams::for_order(2)).unwrap();
        for i in 0..30 {
            let mut rng = instance_rng(12, gi * 1000 + i);
            let dim = rng.random_range(1..=6);
            let n = i % 3;
            let norm = rng.random_range(0.0..=2.0);
            let x = random_hermitian_with_norm(&mut rng, dim, norm);
            let dirs: Vec<_> = (0..n)
                .map(|_| random_hermitian_with_norm(&mut rng, dim, 1.0).into_matrix())
                .collect();
            let f = gstar_derivative_fourier(&table, &x, &dirs).unwrap().value;
            let dd = gstar_derivative_dd(g, &x, &dirs).unwrap().value;
            worst = worst.max(rel(&f, &dd));
            if n == 0 {
                worst0 = worst0.max(f.max_abs_diff(&apply_function(g, &x).unwrap()));
            }
            count += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-5 && worst0 <= 1e-6 && within_budget(t, Duration::from_secs(120)),
        format!("max relative deviation {worst:.2e} over {count} instances; n=0 vs direct {worst0:.2e}; {t:.2?}"),
    )
}

fn selftest_determinism() -> Outcome {
    let start = Instant::now();
    let cfg = SelftestConfig {
        seed: 42,
        quick: false,
        corrupt_volume_constant: false,
    };
    let first = selftest::run(&cfg);
    let once = start.elapsed();
    let second = selftest::run(&cfg);
    let same = first.to_json() == second.to_json();
    outcome(
        same && first.passed && within_budget(once, Duration::from_secs(300)),
        format!(
            "identical reports: {same}; all checks passed: {} (failed: {:?}); one run {once:.2?}",
            first.passed,
            first.failed()
        ),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 13] = [
        ("simplex volume", simplex_volume),
        ("composition count", composition_count),
        ("power derivative exactness", power_derivative_exact),
        ("exp derivative: closed form vs Monte Carlo", exp_dd_vs_mc),
        ("finite-difference convergence", fd_convergence),
        ("first-derivative integral quadrature", integral_quadrature),
        ("exp(isx) is unitary", unitary_exp),
        ("exp of commuting sum", commuting_exp),
        ("derivatives of exp(isx) bounded by |s|^n", exp_is_derivative_bound),
        ("monomial seminorm bound", monomial_bound_check),
        ("Sobolev-type seminorm bound", sobolev_bound_check),
        ("Fourier synthesis vs divided differences", fourier_vs_dd),
        ("selftest determinism", selftest_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = check();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, result.summary);
        if !result.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", checks.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
