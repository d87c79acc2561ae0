use std::path::{Path, PathBuf};

use hermcalc::bounds::{monomial_bound, probe_seminorm, sobolev_bound, BoundReport};
use hermcalc::divided_diff::CLUSTER_REL_TOL;
use hermcalc::exp_deriv::{exp_derivative_dd, exp_derivative_mc, simplex_volume_mc};
use hermcalc::fourier::{fourier_table, gstar_derivative_fourier, FourierParams, TAIL_REL_TOL};
use hermcalc::linalg::{HERMITIAN_REJECT_TOL, JACOBI_REL_TOL};
use hermcalc::selftest::{self, SelftestConfig};
use hermcalc::spectral::{apply_function, gstar_derivative_dd};
use hermcalc::{op_norm, ComplexMatrix, HermitianMatrix, MultilinearDerivative, ScalarFunction};
use serde_json::{json, Value};

use crate::io::{csv_meta, emit, load_function, load_matrices, load_matrix, meta, to_pretty, CliError};
use crate::{Format, Method};

/// Slack below which a probe counts as a bound violation.
const SLACK_TOL: f64 = -1e-9;

pub struct Context {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub command_line: Vec<String>,
}

impl Context {
    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

pub struct DerivArgs {
    pub matrix: PathBuf,
    pub dirs: Vec<PathBuf>,
    pub function: String,
    pub order: usize,
    pub method: Method,
    pub samples: usize,
    pub radius: Option<f64>,
}

fn spectral_tolerances() -> Value {
    json!({
        "cluster_rel_tol": CLUSTER_REL_TOL,
        "jacobi_rel_tol": JACOBI_REL_TOL,
        "hermitian_reject_tol": HERMITIAN_REJECT_TOL,
    })
}

fn load_hermitian(path: &Path) -> Result<HermitianMatrix, CliError> {
    Ok(HermitianMatrix::new(load_matrix(path, "--matrix")?)?)
}

fn matrix_csv(m: &ComplexMatrix, std_error: Option<&[f64]>) -> String {
    let mut out = String::from("row,col,re,im,std_error\n");
    let d = m.dim();
    for i in 0..d {
        for j in 0..d {
            let z = m[(i, j)];
            let se = std_error.map(|s| s[i * d + j].to_string()).unwrap_or_default();
            out.push_str(&format!("{i},{j},{},{},{se}\n", z.re + 0.0, z.im + 0.0));
        }
    }
    out
}

pub fn apply(ctx: &Context, matrix: &Path, function: &str) -> Result<(), CliError> {
    let x = load_hermitian(matrix)?;
    let g = load_function(function)?;
    let eig = x.eig()?;
    let gx = apply_function(&g, &x)?;
    let header = meta(&ctx.command_line, ctx.seed, spectral_tolerances());
    let mut summary = json!({
        "schema": 1,
        "meta": header,
        "function": g.to_json_value(),
        "norm": op_norm(&gx),
        "spectrum": eig.eigenvalues,
    });
    match ctx.out() {
        // The result file holds only the matrix so it can be read back as input.
        Some(path) => {
            let text = match ctx.format_or(Format::Json) {
                Format::Json => gx.to_json(),
                Format::Csv => matrix_csv(&gx, None),
            };
            emit(Some(path), &text)?;
            summary["output"] = json!(path.display().to_string());
        }
        None => summary["result"] = serde_json::to_value(&gx).expect("matrices serialize"),
    }
    emit(None, &to_pretty(&summary))
}

pub fn deriv(ctx: &Context, args: &DerivArgs) -> Result<(), CliError> {
    let x = load_hermitian(&args.matrix)?;
    let dirs = load_matrices(&args.dirs, "--dir")?;
    if dirs.len() != args.order {
        return Err(CliError::Parse(format!(
            "--order {} needs {} --dir files, got {}",
            args.order,
            args.order,
            dirs.len()
        )));
    }
    let g = load_function(&args.function)?;
    let mut tolerances = spectral_tolerances();
    let mut extra = json!({});
    let result: MultilinearDerivative = match args.method {
        Method::Dd if matches!(g, ScalarFunction::Exp) => exp_derivative_dd(&x, &dirs)?,
        Method::Dd => gstar_derivative_dd(&g, &x, &dirs)?,
        Method::Mc => {
            if !matches!(g, ScalarFunction::Exp) {
                return Err(CliError::Parse(format!(
                    "--method mc supports only the exp function, got `{}`",
                    g.kind_name()
                )));
            }
            exp_derivative_mc(&x, &dirs, args.samples, ctx.seed)?
        }
        Method::Fourier => {
            let norm = op_norm(x.matrix());
            let radius = args.radius.unwrap_or(norm + 1.0);
            if norm > radius {
                return Err(CliError::Domain(format!("‖x‖ = {norm} exceeds --radius {radius}")));
            }
            let table = fourier_table(&g, radius, &FourierParams::for_order(args.order))?;
            tolerances["tail_rel_tol"] = json!(TAIL_REL_TOL);
            extra = json!({
                "residual": table.residual,
                "tail": table.tail,
                "t_nodes": table.t_nodes,
            });
            gstar_derivative_fourier(&table, &x, &dirs)?
        }
    };
    let header = meta(&ctx.command_line, ctx.seed, tolerances);
    let text = match ctx.format_or(Format::Json) {
        Format::Json => to_pretty(&json!({
            "schema": 1,
            "meta": header,
            "function": g.to_json_value(),
            "order": result.order,
            "method": result.method,
            "value": result.value,
            "std_error": result.std_error,
            "fourier": extra,
        })),
        Format::Csv => csv_meta(&header) + &matrix_csv(&result.value, result.std_error.as_deref()),
    };
    emit(ctx.out(), &text)
}

pub fn bound(ctx: &Context, function: &str, order: usize, radius: f64) -> Result<(), CliError> {
    let g = load_function(function)?;
    let value = sobolev_bound(&g, order, radius)?;
    let header = meta(&ctx.command_line, ctx.seed, json!({ "simpson_nodes": hermcalc::bounds::SOBOLEV_NODES }));
    let text = match ctx.format_or(Format::Json) {
        Format::Json => {
            let mut doc = json!({
                "schema": 1,
                "meta": header,
                "function": g.to_json_value(),
                "n": order,
                "r": radius,
                "bound": value,
                "method": "sobolev",
            });
            if let ScalarFunction::Monomial(k) = g {
                doc["monomial_bound"] = json!(monomial_bound(k as usize, order, radius));
            }
            to_pretty(&doc)
        }
        Format::Csv => csv_meta(&header) + &format!("g_kind,n,r,bound\n{},{order},{radius},{value}\n", g.kind_name()),
    };
    emit(ctx.out(), &text)
}

pub fn probe(
    ctx: &Context,
    function: &str,
    order: usize,
    radius: f64,
    samples: usize,
    dim: usize,
) -> Result<(), CliError> {
    let g = load_function(function)?;
    let est = probe_seminorm(&g, order, radius, dim, samples, ctx.seed)?;
    let report = BoundReport::new(&g, est)?;
    let header = meta(&ctx.command_line, ctx.seed, json!({ "slack_tol": SLACK_TOL }));
    let text = match ctx.format_or(Format::Csv) {
        Format::Csv => format!("{}{}\n{}\n", csv_meta(&header), BoundReport::CSV_HEADER, report.csv_row()),
        Format::Json => {
            let e = &report.empirical;
            to_pretty(&json!({
                "schema": 1,
                "meta": header,
                "function": g.to_json_value(),
                "g_kind": report.g_kind,
                "n": e.n,
                "r": e.r,
                "d": e.dim,
                "bound": report.bound,
                "bound_method": report.method,
                "empirical": e.value,
                "slack": report.slack,
                "samples": e.samples_used,
                "seed": e.seed,
                "witness": {
                    "x": e.witness_x.matrix(),
                    "dirs": e.witness_dirs,
                },
            }))
        }
    };
    emit(ctx.out(), &text)?;
    if report.slack < SLACK_TOL {
        return Err(CliError::Invariant(format!(
            "probe value {} exceeds bound {} (slack {})",
            report.empirical.value, report.bound, report.slack
        )));
    }
    Ok(())
}

pub fn volume(ctx: &Context, order: usize, samples: usize) -> Result<(), CliError> {
    let est = simplex_volume_mc(order, samples, ctx.seed)?;
    let expected = 1.0 / (1..=order).map(|i| i as f64).product::<f64>();
    let header = meta(&ctx.command_line, ctx.seed, json!({ "sigma_tol": 3.0 }));
    let sigmas = if est.std_error > 0.0 {
        (est.estimate - expected).abs() / est.std_error
    } else {
        0.0
    };
    let text = match ctx.format_or(Format::Json) {
        Format::Json => to_pretty(&json!({
            "schema": 1,
            "meta": header,
            "n": order,
            "samples": est.samples,
            "estimate": est.estimate,
            "std_error": est.std_error,
            "expected": expected,
            "deviation_sigmas": sigmas,
        })),
        Format::Csv => {
            csv_meta(&header)
                + &format!(
                    "n,samples,estimate,std_error,expected\n{order},{},{},{},{expected}\n",
                    est.samples, est.estimate, est.std_error
                )
        }
    };
    emit(ctx.out(), &text)
}

pub fn selftest(ctx: &Context, quick: bool, corrupt_volume_constant: bool) -> Result<(), CliError> {
    let report = selftest::run(&SelftestConfig {
        seed: ctx.seed,
        quick,
        corrupt_volume_constant,
    });
    let header = meta(&ctx.command_line, ctx.seed, json!({}));
    let text = match ctx.format_or(Format::Json) {
        Format::Json => to_pretty(&json!({
            "schema": 1,
            "meta": header,
            "report": report,
        })),
        Format::Csv => {
            let mut s = csv_meta(&header) + "check,passed,worst,tolerance,instances\n";
            for c in &report.checks {
                s.push_str(&format!("{},{},{},{},{}\n", c.name, c.passed, c.worst, c.tolerance, c.instances));
            }
            s
        }
    };
    emit(ctx.out(), &text)?;
    let failed = report.failed();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}
