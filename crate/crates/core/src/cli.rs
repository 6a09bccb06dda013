//! Command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or configuration
//! error, 3 missing prerequisite (the problem has no exact solution).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{convergence_study, decompose, AnalysisError};
use crate::format::sig17;
use crate::problem::{ODEProblem, ProblemError};
use crate::solver::{solve, Method, SolveError};

/// Relative tolerance of the decomposition identity check.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "rk3gl2", version, about = "RK3GL2 solver and error-propagation analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem and write the trajectory.
    Solve(SolveArgs),
    /// Solve at a doubling sequence of N and fit observed orders.
    Convergence(ConvergenceArgs),
    /// Rebuild the endpoint error from local errors and write the report.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct ProblemSource {
    /// Built-in problem: expgrow, riccati, logistic or forced.
    #[arg(long, value_name = "NAME")]
    pub problem: Option<String>,
    /// JSON problem description with keys f, exact, a, b, y0, name.
    #[arg(long = "problem-file", value_name = "PATH")]
    pub problem_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rkgl,
    Rk3,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Rkgl => Method::Rkgl,
            MethodArg::Rk3 => Method::Rk3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: ProblemSource,
    /// Subinterval count; rk3 takes 3N steps.
    #[arg(long = "N", value_name = "INT", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    #[arg(long, value_enum, default_value = "rkgl")]
    pub method: MethodArg,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub source: ProblemSource,
    /// Comma-separated subinterval counts, each double the previous.
    #[arg(long = "N-list", value_name = "INTS", value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long, value_enum, default_value = "rkgl")]
    pub method: MethodArg,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: ProblemSource,
    #[arg(long = "N", value_name = "INT", value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Only rkgl is supported.
    #[arg(long, value_enum, default_value = "rkgl")]
    pub method: MethodArg,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0}")]
    MissingExact(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solve(SolveError::NonFinite { .. }) => 1,
            CliError::MissingExact(_) => 3,
            CliError::Output { .. } => 1,
            CliError::Config(_) | CliError::Problem(_) | CliError::Solve(_) => 2,
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::MissingExact(_) => CliError::MissingExact(e.to_string()),
            AnalysisError::Solve(s) => CliError::Solve(s),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn load_problem(source: &ProblemSource) -> Result<ODEProblem, CliError> {
    match (&source.problem, &source.problem_file) {
        (Some(name), None) => Ok(ODEProblem::builtin(name)?),
        (None, Some(path)) => Ok(ODEProblem::from_config_file(path)?),
        _ => Err(CliError::Config("give exactly one of --problem or --problem-file".into())),
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn run_solve(args: &SolveArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let problem = load_problem(&args.source)?;
    let method = Method::from(args.method);
    let trajectory = solve(&problem, method, args.n as usize)?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => trajectory.write_csv(&mut buf),
        Format::Json => trajectory.write_json(&mut buf),
    }
    .expect("writing to memory");
    write_output(&args.out, &buf)?;

    let _ = writeln!(
        log,
        "solve: problem={} method={} N={} nodes={}",
        problem.name,
        method.as_str(),
        args.n,
        trajectory.w.len()
    );
    if let Some(end) = trajectory.end_error() {
        let _ = writeln!(log, "global error at b: {}", sig17(end));
    }
    let _ = writeln!(log, "wrote {}", args.out.display());
    Ok(())
}

fn run_convergence(args: &ConvergenceArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let problem = load_problem(&args.source)?;
    if args.n_list.len() < 2 || args.n_list[0] == 0 || args.n_list.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(CliError::Config(format!(
            "--N-list must hold at least two positive counts, each double the previous (got {:?})",
            args.n_list
        )));
    }
    if !problem.has_exact() {
        return Err(CliError::MissingExact(format!(
            "problem `{}` has no exact solution; convergence needs one",
            problem.name
        )));
    }
    let method = Method::from(args.method);
    let table = convergence_study(&problem, method, &args.n_list)?;
    let mut buf = Vec::new();
    match args.format {
        Format::Csv => table.write_csv(&mut buf),
        Format::Json => table.write_json(&mut buf),
    }
    .expect("writing to memory");
    write_output(&args.out, &buf)?;

    let _ = writeln!(log, "convergence: problem={} method={}", problem.name, method.as_str());
    let _ = writeln!(log, "{:>6} {:>24} {:>24} {:>10}", "N", "h", "E", "order");
    for row in &table.rows {
        let order = row.observed_order.map(|o| format!("{o:.4}")).unwrap_or_default();
        let _ = writeln!(log, "{:>6} {:>24} {:>24} {:>10}", row.n, sig17(row.h), sig17(row.error), order);
    }
    let _ = writeln!(log, "wrote {}", args.out.display());
    match table.mean_order() {
        Some(mean) => {
            let _ = writeln!(log, "mean observed order: {mean:.6}");
        }
        None => {
            let reason = table.estimate.as_ref().err().map(ToString::to_string).unwrap_or_default();
            let _ = writeln!(log, "mean observed order: none ({reason})");
        }
    }
    Ok(())
}

fn run_decompose(args: &DecomposeArgs, log: &mut dyn Write) -> Result<(), CliError> {
    if args.method != MethodArg::Rkgl {
        return Err(CliError::Config("decompose requires --method rkgl".into()));
    }
    if args.format != Format::Json {
        return Err(CliError::Config("decompose writes JSON only".into()));
    }
    let problem = load_problem(&args.source)?;
    if !problem.has_exact() {
        return Err(CliError::MissingExact(format!(
            "problem `{}` has no exact solution; decomposition needs one",
            problem.name
        )));
    }
    let trajectory = solve(&problem, Method::Rkgl, args.n as usize)?;
    let report = decompose(&problem, &trajectory)?;
    let mut buf = Vec::new();
    report.write_json(&mut buf).expect("writing to memory");
    write_output(&args.out, &buf)?;

    let verdict = if report.residual_within(IDENTITY_TOL) { "PASS" } else { "FAIL" };
    let _ = writeln!(log, "decompose: problem={} N={}", problem.name, args.n);
    let _ = writeln!(log, "delta_end      {}", sig17(report.delta_end));
    let _ = writeln!(log, "eps_gl_sum     {}", sig17(report.eps_gl_sum));
    let _ = writeln!(log, "A_part         {}", sig17(report.a_part));
    let _ = writeln!(log, "B_part         {}", sig17(report.b_part));
    let _ = writeln!(log, "reconstruction {}", sig17(report.reconstruction));
    let _ = writeln!(log, "wrote {}", args.out.display());
    let _ = writeln!(log, "residual = {} {verdict}", sig17(report.residual.abs()));
    Ok(())
}

pub fn execute(cli: &Cli, log: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => run_solve(args, log),
        Command::Convergence(args) => run_convergence(args, log),
        Command::Decompose(args) => run_decompose(args, log),
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I, log: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(log, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli, log) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
