use std::fmt;
use std::path::{Path, PathBuf};

use hermcalc::{ComplexMatrix, Error, ScalarFunction};
use serde_json::{json, Value};

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// An invariant or bound check failed (exit 1).
    Invariant(String),
    /// Bad input or arguments (exit 2).
    Parse(String),
    /// A numerical routine failed (exit 3).
    Numeric(String),
    /// Input outside the domain of the requested computation (exit 4).
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Domain(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invariant(m) => write!(f, "invariant failure: {m}"),
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Domain(m) => write!(f, "domain violation: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Parse { .. }
            | Error::InvalidArgument { .. }
            | Error::DimensionMismatch { .. }
            | Error::DirectionCount { .. }
            | Error::NonFinite { .. } => CliError::Parse(msg),
            Error::NoConvergence { .. } | Error::Overflow { .. } | Error::FourierTail { .. } => CliError::Numeric(msg),
            Error::NotHermitian { .. }
            | Error::CapExceeded { .. }
            | Error::InsufficientOrder { .. }
            | Error::OutsideRadius { .. }
            | Error::StencilOutsideBall { .. } => CliError::Domain(msg),
        }
    }
}

fn read_text(path: &Path, field: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{field} `{}`: {e}", path.display())))
}

pub fn load_matrix(path: &Path, field: &str) -> Result<ComplexMatrix, CliError> {
    let text = read_text(path, field)?;
    ComplexMatrix::from_json(&text).map_err(|e| CliError::Parse(format!("{field} `{}`: {e}", path.display())))
}

pub fn load_matrices(paths: &[PathBuf], field: &str) -> Result<Vec<ComplexMatrix>, CliError> {
    paths.iter().map(|p| load_matrix(p, field)).collect()
}

/// Inline JSON, a JSON file, or a bare kind name.
pub fn load_function(spec: &str) -> Result<ScalarFunction, CliError> {
    let trimmed = spec.trim();
    let text = if !trimmed.starts_with('{') && Path::new(trimmed).is_file() {
        read_text(Path::new(trimmed), "--function")?
    } else {
        trimmed.to_string()
    };
    ScalarFunction::parse(&text).map_err(|e| CliError::Parse(format!("--function: {e}")))
}

/// Run header embedded in every artifact.
pub fn meta(command_line: &[String], seed: u64, tolerances: Value) -> Value {
    json!({
        "version": hermcalc::VERSION,
        "command_line": command_line,
        "seed": seed,
        "tolerances": tolerances,
    })
}

/// Same header as `#` comment lines for CSV artifacts.
pub fn csv_meta(meta: &Value) -> String {
    let mut out = String::new();
    out.push_str(&format!("# hermcalc {}\n", hermcalc::VERSION));
    out.push_str(&format!("# command_line: {}\n", meta["command_line"]));
    out.push_str(&format!("# seed: {}\n", meta["seed"]));
    out.push_str(&format!("# tolerances: {}\n", meta["tolerances"]));
    out
}

pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes to `out` if given, otherwise standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Parse(format!("--out `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
