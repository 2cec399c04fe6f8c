//! `deautoconv` command-line tool.
//!
//! Exit codes: 0 success, 1 data error, 2 usage error, 3 solved but the
//! returned point fails the Kuhn-Tucker check.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use deautoconv::io::DataFormat;
use deautoconv::{Error, InitPolicy};

pub const EXIT_DATA: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_KT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "deautoconv", about = "Nonnegative deautoconvolution by I-divergence minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit x >= 0 so that x*x approximates the data y.
    Solve(SolveArgs),
    /// Generate synthetic data for the reference experiments.
    Simulate(SimulateArgs),
    /// Evaluate the objective, derivatives and optimality at a candidate x.
    Check(CheckArgs),
    /// Print the autoconvolution x*x of a vector.
    Autoconv(AutoconvArgs),
    /// Print the version.
    Version,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Auto,
}

impl FormatArg {
    fn resolve(self) -> Option<DataFormat> {
        match self {
            FormatArg::Csv => Some(DataFormat::CsvColumn),
            FormatArg::Json => Some(DataFormat::JsonObject),
            FormatArg::Auto => None,
        }
    }
}

/// `--init` value before any file is read.
#[derive(Clone, Debug)]
enum InitArg {
    Uniform(f64, f64),
    Flat,
    File(PathBuf),
}

fn parse_init(s: &str) -> Result<InitArg, String> {
    if s == "flat" {
        return Ok(InitArg::Flat);
    }
    if let Some(path) = s.strip_prefix("file:") {
        return Ok(InitArg::File(PathBuf::from(path)));
    }
    if let Some(rest) = s.strip_prefix("uniform:") {
        let (lo, hi) = rest
            .split_once(':')
            .ok_or_else(|| format!("expected uniform:LO:HI, got {s:?}"))?;
        let lo: f64 = lo.parse().map_err(|_| format!("bad LO in {s:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad HI in {s:?}"))?;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(format!("uniform initialization needs 0 < LO < HI, got {s:?}"));
        }
        return Ok(InitArg::Uniform(lo, hi));
    }
    Err(format!("expected uniform:LO:HI, flat or file:PATH, got {s:?}"))
}

impl InitArg {
    fn into_policy(self) -> Result<InitPolicy, Error> {
        Ok(match self {
            InitArg::Uniform(lo, hi) => InitPolicy::UniformRandom { lo, hi },
            InitArg::Flat => InitPolicy::Flat,
            InitArg::File(path) => InitPolicy::Given {
                x: deautoconv::io::read_vector(&path, None)?,
            },
        })
    }
}

#[derive(clap::Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Step tolerance, relative to c = sqrt(sum y).
    #[arg(long, default_value_t = 1e-14)]
    tol_step: f64,
    /// Kuhn-Tucker gradient tolerance, relative to 1 + 2c.
    #[arg(long, default_value_t = 1e-6)]
    tol_grad: f64,
    #[arg(long, default_value_t = 1)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// uniform:LO:HI, flat, or file:PATH
    #[arg(long, default_value = "uniform:0.1:0.2", value_parser = parse_init)]
    init: InitArg,
    /// Write the per-iteration trace of the best run as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Add the iterates to the trace.
    #[arg(long)]
    snapshots: bool,
    /// Report destination; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Compute the Hessian spectrum at the returned point.
    #[arg(long)]
    hessian: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Random,
}

#[derive(clap::Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CheckArgs {
    /// Data file with y.
    #[arg(long)]
    input: PathBuf,
    /// Candidate x.
    #[arg(long)]
    x: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
    #[arg(long, default_value_t = 1e-6)]
    tol_grad: f64,
}

#[derive(clap::Args)]
struct AutoconvArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    format: FormatArg,
}

fn exit_code_for(err: &Error) -> u8 {
    if err.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_DATA
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Check(args) => commands::check(args),
        Command::Autoconv(args) => commands::autoconv(args),
        Command::Version => {
            println!("deautoconv {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
