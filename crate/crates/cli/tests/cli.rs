use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hermcalc::oracle::symbolic_power_expand;
use hermcalc::ComplexMatrix;
use serde_json::Value;
use tempfile::TempDir;

fn hermcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermcalc"))
        .args(args)
        .env_remove("HERMCALC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_matrix(dir: &TempDir, name: &str, rows: &[&[f64]]) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, ComplexMatrix::from_real_rows(rows).unwrap().to_json()).unwrap();
    path
}

fn read_matrix(path: &Path) -> ComplexMatrix {
    ComplexMatrix::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn apply_exp_of_zero_is_identity() {
    let dir = TempDir::new().unwrap();
    let zero = write_matrix(&dir, "zero.json", &[&[0.0, 0.0], &[0.0, 0.0]]);
    let out = dir.path().join("out.json");
    let res = hermcalc(&["apply", "--function", r#"{"kind":"exp"}"#, "--matrix", s(&zero), "--out", s(&out)]);
    assert!(res.status.success());
    assert_eq!(read_matrix(&out), ComplexMatrix::identity(2));
    let summary = stdout_json(&res);
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["norm"], 1.0);
    assert_eq!(summary["meta"]["version"], hermcalc::VERSION);
}

#[test]
fn apply_identity_round_trips_bytes() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.5, -1.25], &[-1.25, 2.0]]);
    let out = dir.path().join("out.json");
    assert!(hermcalc(&["apply", "--function", "identity", "--matrix", s(&x), "--out", s(&out)]).status.success());
    assert_eq!(std::fs::read(&x).unwrap(), std::fs::read(&out).unwrap());
}

#[test]
fn apply_gaussian_on_diagonal() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "diag01.json", &[&[0.0, 0.0], &[0.0, 1.0]]);
    let out = dir.path().join("out.json");
    assert!(hermcalc(&["apply", "--function", "gaussian", "--matrix", s(&x), "--out", s(&out)]).status.success());
    let want = ComplexMatrix::from_diag(&[1.0, (-0.5f64).exp()]);
    assert!(read_matrix(&out).max_abs_diff(&want) < 1e-15);
}

#[test]
fn deriv_order_zero_matches_apply() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.3, 0.7], &[0.7, -0.4]]);
    let applied = dir.path().join("applied.json");
    assert!(hermcalc(&["apply", "--function", "sin", "--matrix", s(&x), "--out", s(&applied)]).status.success());
    let res = hermcalc(&["deriv", "--function", "sin", "--matrix", s(&x), "--order", "0"]);
    assert!(res.status.success());
    let value: ComplexMatrix = serde_json::from_value(stdout_json(&res)["value"].clone()).unwrap();
    assert_eq!(value, read_matrix(&applied));
}

#[test]
fn deriv_dd_and_mc_agree_within_three_sigma() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.2, 0.5, 0.0], &[0.5, -0.3, 0.1], &[0.0, 0.1, 0.6]]);
    let v = write_matrix(&dir, "v.json", &[&[1.0, 0.0, 0.5], &[0.0, 0.0, 1.0], &[0.5, 1.0, -1.0]]);
    let dd = hermcalc(&["deriv", "--matrix", s(&x), "--dir", s(&v), "--order", "1", "--method", "dd"]);
    let mc = hermcalc(&[
        "deriv", "--matrix", s(&x), "--dir", s(&v), "--order", "1", "--method", "mc", "--samples", "50000", "--seed", "9",
    ]);
    assert!(dd.status.success() && mc.status.success());
    let (dd, mc) = (stdout_json(&dd), stdout_json(&mc));
    let a: ComplexMatrix = serde_json::from_value(dd["value"].clone()).unwrap();
    let b: ComplexMatrix = serde_json::from_value(mc["value"].clone()).unwrap();
    let se: Vec<f64> = serde_json::from_value(mc["std_error"].clone()).unwrap();
    assert_eq!(mc["method"]["method"], "monte_carlo");
    for ((p, q), e) in a.as_slice().iter().zip(b.as_slice()).zip(&se) {
        assert!((p - q).norm() <= 3.0 * e + 1e-12);
    }
}

#[test]
fn deriv_monomial_matches_word_expansion() {
    let dir = TempDir::new().unwrap();
    let rows_x: [&[f64]; 2] = [&[0.4, -0.2], &[-0.2, 1.1]];
    let x = write_matrix(&dir, "x.json", &rows_x);
    let v = write_matrix(&dir, "v.json", &[&[0.0, 1.0], &[1.0, 0.0]]);
    let w = write_matrix(&dir, "w.json", &[&[1.0, 0.3], &[0.3, -2.0]]);
    let res = hermcalc(&[
        "deriv", "--function", r#"{"kind":"monomial","k":3}"#, "--matrix", s(&x), "--dir", s(&v), "--dir", s(&w),
        "--order", "2",
    ]);
    assert!(res.status.success());
    let got: ComplexMatrix = serde_json::from_value(stdout_json(&res)["value"].clone()).unwrap();
    let want = symbolic_power_expand(3, &read_matrix(&x), &[read_matrix(&v), read_matrix(&w)]).unwrap();
    assert!(got.max_abs_diff(&want) < 1e-12);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.2, 0.5], &[0.5, -0.3]]);
    let v = write_matrix(&dir, "v.json", &[&[1.0, 0.0], &[0.0, -1.0]]);
    let args = ["deriv", "--matrix", s(&x), "--dir", s(&v), "--method", "mc", "--samples", "5000", "--seed", "4"];
    let a = hermcalc(&args);
    let b = hermcalc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let res = Command::new(env!("CARGO_BIN_EXE_hermcalc"))
        .args(["volume", "--order", "2", "--samples", "1000"])
        .env("HERMCALC_SEED", "17")
        .output()
        .unwrap();
    assert!(res.status.success());
    assert_eq!(stdout_json(&res)["meta"]["seed"], 17);
}

#[test]
fn fourier_radius_violation_exits_4() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[2.0, 0.0], &[0.0, 0.0]]);
    let v = write_matrix(&dir, "v.json", &[&[0.0, 1.0], &[1.0, 0.0]]);
    let res = hermcalc(&[
        "deriv", "--function", "sin", "--matrix", s(&x), "--dir", s(&v), "--method", "fourier", "--radius", "1",
    ]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn fourier_agrees_with_divided_differences() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.2, 0.5], &[0.5, -0.3]]);
    let v = write_matrix(&dir, "v.json", &[&[1.0, 0.0], &[0.0, -1.0]]);
    let run = |method: &str| {
        let res = hermcalc(&["deriv", "--function", "gaussian", "--matrix", s(&x), "--dir", s(&v), "--method", method]);
        assert!(res.status.success());
        serde_json::from_value::<ComplexMatrix>(stdout_json(&res)["value"].clone()).unwrap()
    };
    let (a, b) = (run("fourier"), run("dd"));
    assert!(a.max_abs_diff(&b) <= 1e-5 * b.max_abs());
}

#[test]
fn bound_of_linear_function_is_one() {
    let res = hermcalc(&["bound", "--function", r#"{"kind":"poly","coeffs":[0,1]}"#, "--order", "1", "--radius", "2"]);
    assert!(res.status.success());
    assert_eq!(stdout_json(&res)["bound"], 1.0);
}

fn probe_row(args: &[&str]) -> Vec<String> {
    let res = hermcalc(args);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8(res.stdout).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next().unwrap(), "g_kind,n,r,d,bound,empirical,slack,samples,seed");
    lines.next().unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn probe_exp_reports_positive_slack() {
    let row = probe_row(&["probe", "--function", "exp", "--order", "0", "--radius", "1", "--samples", "2000"]);
    let bound: f64 = row[4].parse().unwrap();
    let empirical: f64 = row[5].parse().unwrap();
    let slack: f64 = row[6].parse().unwrap();
    assert!(empirical >= 2.71);
    assert!((bound - 3.149).abs() < 1e-3);
    assert!(slack > 0.0);
}

#[test]
fn probe_monomial_is_tight() {
    let row = probe_row(&["probe", "--function", r#"{"kind":"monomial","k":2}"#, "--order", "1", "--radius", "1"]);
    let bound: f64 = row[4].parse().unwrap();
    let empirical: f64 = row[5].parse().unwrap();
    assert_eq!(bound, 2.0);
    assert!(empirical >= 0.999 * bound && empirical <= bound + 1e-9);
}

#[test]
fn selftest_quick_is_deterministic() {
    let a = hermcalc(&["selftest", "--quick", "--seed", "42"]);
    let b = hermcalc(&["selftest", "--quick", "--seed", "42"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["report"]["passed"], true);
}

#[test]
fn corrupted_volume_constant_fails() {
    let res = hermcalc(&["selftest", "--quick", "--corrupt-volume-constant"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("simplex_volume"));
}

#[test]
fn parse_errors_exit_2_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":2,"entries":[[1,0]]}"#).unwrap();
    let res = hermcalc(&["apply", "--matrix", s(&bad)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("entries"));

    let x = write_matrix(&dir, "x.json", &[&[1.0]]);
    let res = hermcalc(&["apply", "--matrix", s(&x), "--function", r#"{"kind":"nope"}"#]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("kind"));
}

#[test]
fn non_hermitian_input_is_a_domain_violation() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.0, 1.0], &[0.0, 0.0]]);
    assert_eq!(hermcalc(&["apply", "--matrix", s(&x)]).status.code(), Some(4));
}

#[test]
fn csv_output_is_written_to_file() {
    let dir = TempDir::new().unwrap();
    let x = write_matrix(&dir, "x.json", &[&[0.0, 0.0], &[0.0, 1.0]]);
    let v = write_matrix(&dir, "v.json", &[&[0.0, 1.0], &[1.0, 0.0]]);
    let out = dir.path().join("d.csv");
    let res = hermcalc(&["deriv", "--matrix", s(&x), "--dir", s(&v), "--format", "csv", "--out", s(&out)]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# hermcalc "));
    assert!(text.contains("row,col,re,im,std_error\n"));
    assert!(text.contains(&format!("0,1,{},0,", std::f64::consts::E - 1.0)));
}
