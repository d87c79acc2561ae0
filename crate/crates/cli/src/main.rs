//! `hermcalc`: apply smooth functions to Hermitian matrices, differentiate
//! them, and check seminorm bounds.

mod commands;
mod io;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::CliError;

#[derive(Parser, Debug)]
#[command(name = "hermcalc", version, about, long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random draw; falls back to HERMCALC_SEED, then 0.
    #[arg(long, global = true, env = "HERMCALC_SEED")]
    seed: Option<u64>,

    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Eigenbasis divided differences.
    Dd,
    /// Simplex Monte Carlo (exp only).
    Mc,
    /// Fourier synthesis over a mollified transform.
    Fourier,
}

#[derive(Args, Debug)]
pub struct FunctionArg {
    /// Scalar function: inline JSON, a path to a JSON file, or a kind name
    /// (exp, sin, cos, gaussian, identity).
    #[arg(long, default_value = "exp")]
    function: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute g(x) by spectral calculus.
    Apply {
        #[arg(long)]
        matrix: std::path::PathBuf,
        #[command(flatten)]
        function: FunctionArg,
    },
    /// Compute the order-n derivative of g at x along the given directions.
    ///
    /// CSV output has columns row,col,re,im,std_error.
    Deriv {
        #[arg(long)]
        matrix: std::path::PathBuf,
        /// Direction matrix file; repeat once per order.
        #[arg(long = "dir")]
        dirs: Vec<std::path::PathBuf>,
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, value_enum, default_value_t = Method::Dd)]
        method: Method,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Cutoff radius for the Fourier method (default ‖x‖ + 1).
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Print the Sobolev-type bound |g^(n)(0)| + √(8r)·‖g^(n+1)‖ on [-r, r].
    Bound {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
    /// Probe the seminorm sup_{‖x‖<r} ‖D^n g(x)‖ and compare with the bound.
    ///
    /// CSV output has columns g_kind,n,r,d,bound,empirical,slack,samples,seed.
    /// Monomials are compared with k!/(k-n)! r^(k-n), everything else with
    /// the Sobolev-type bound. Exits 1 if the probe exceeds the bound.
    Probe {
        #[command(flatten)]
        function: FunctionArg,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Number of random candidates.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Matrix dimension of the probe.
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
    /// Estimate the volume of the unit simplex in n dimensions.
    Volume {
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
    },
    /// Run the invariant suite; exit 0 iff every check passes.
    Selftest {
        /// Smaller instance counts.
        #[arg(long)]
        quick: bool,
        /// Negative control: corrupt the reference simplex volume.
        #[arg(long, hide = true)]
        corrupt_volume_constant: bool,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Parse(format!("--threads: {e}")))?;
    }
    let ctx = commands::Context {
        seed: cli.seed.unwrap_or(0),
        out: cli.out,
        format: cli.format,
        command_line: std::iter::once("hermcalc".to_string()).chain(std::env::args().skip(1)).collect(),
    };
    match cli.command {
        Command::Apply { matrix, function } => commands::apply(&ctx, &matrix, &function.function),
        Command::Deriv {
            matrix,
            dirs,
            function,
            order,
            method,
            samples,
            radius,
        } => commands::deriv(
            &ctx,
            &commands::DerivArgs {
                matrix,
                dirs,
                function: function.function,
                order,
                method,
                samples,
                radius,
            },
        ),
        Command::Bound {
            function,
            order,
            radius,
        } => commands::bound(&ctx, &function.function, order, radius),
        Command::Probe {
            function,
            order,
            radius,
            samples,
            dim,
        } => commands::probe(&ctx, &function.function, order, radius, samples, dim),
        Command::Volume { order, samples } => commands::volume(&ctx, order, samples),
        Command::Selftest {
            quick,
            corrupt_volume_constant,
        } => commands::selftest(&ctx, quick, corrupt_volume_constant),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hermcalc: {e}");
            ExitCode::from(e.code())
        }
    }
}
