//! Command-line front end: problem files, trace output and the `convexopt`
//! subcommands.

pub mod points;
pub mod problem;
pub mod trace;

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use convexopt::geometry::{self, GeometryError};
use convexopt::linalg;
use convexopt::model::{self, ConvexProblem, ScalarField};
use convexopt::solver::{self, BarrierConfig, PhaseOneResult, SolveError, SolveReport, SolveStatus};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

pub use problem::{parse_problem, serialize_problem, LoadedProblem, ProblemFile};
pub use trace::{format_number, trace_rows, write_trace, TraceRow, TRACE_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid problem: {0}")]
    Validation(String),
    #[error("{file}:{line}: {message}")]
    Points {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::Solver(_) | CliError::Write { .. } => EXIT_SOLVER,
            _ => EXIT_INPUT,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InvalidConfig(msg) => CliError::Usage(msg),
            SolveError::NotStrictlyFeasible { .. }
            | SolveError::InfeasibleStart { .. }
            | SolveError::OutOfDomain => CliError::Usage(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::Solve(inner) => inner.into(),
            GeometryError::Empty
            | GeometryError::Dimension(_)
            | GeometryError::DegeneratePoint { .. }
            | GeometryError::Model(_) => CliError::Usage(e.to_string()),
            GeometryError::NotSeparable { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

/// A comma-separated vector argument.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvVector(pub Vec<f64>);

impl FromStr for CsvVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        points::parse_csv_vector(s).map(CsvVector)
    }
}

#[derive(Debug, Parser)]
#[command(name = "convexopt", version, about = "Logarithmic-barrier convex solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Barrier method, with phase I when the start is absent or not strictly feasible.
    Solve(SolveArgs),
    /// A single centering at t = m/eps.
    Preliminary(SolveArgs),
    /// Phase I alone: find a strictly feasible point or certify infeasibility.
    Phase1(SolveArgs),
    /// Smallest ball enclosing the points.
    Chebyshev(PointArgs),
    /// Voronoi cell of the first point against the others, one `g,h` row per line.
    Voronoi(PointArgs),
    /// Hyperplane separating the hulls of two point sets.
    Separate(SeparateArgs),
    /// Derivative and sampled-convexity diagnostics for a problem file.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Tuning {
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 10.0)]
    pub mu: f64,
    /// Newton iteration cap per centering.
    #[arg(long)]
    pub max_newton: Option<usize>,
}

impl Tuning {
    pub fn config(&self) -> BarrierConfig {
        let mut cfg = BarrierConfig {
            t0: self.t0,
            mu: self.mu,
            eps: self.eps,
            ..BarrierConfig::default()
        };
        if let Some(k) = self.max_newton {
            cfg.newton.max_iter = k;
        }
        cfg
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
    /// Starting point; overrides the problem file's.
    #[arg(long)]
    pub start: Option<CsvVector>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
pub struct SeparateArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub points2: PathBuf,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_problem(path: &Path) -> Result<LoadedProblem, CliError> {
    parse_problem(&read(path)?)
}

fn load_points(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    points::parse_points(&read(path)?, &path.display().to_string())
}

fn join(x: &[f64]) -> String {
    x.iter().map(|v| format_number(*v)).collect::<Vec<_>>().join(",")
}

/// Projects `x` onto `{Ax = b}`.
fn project_equalities(prob: &ConvexProblem, x: &[f64]) -> Result<Vec<f64>, CliError> {
    if prob.p() == 0 {
        return Ok(x.to_vec());
    }
    let r = linalg::sub(prob.eq_b(), &prob.eq_a().mul_vec(x));
    let dx = linalg::least_norm_solution(prob.eq_a(), &r)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    Ok(x.iter().zip(&dx).map(|(a, d)| a + d).collect())
}

fn requested_start(args: &SolveArgs, loaded: &LoadedProblem) -> Result<Option<Vec<f64>>, CliError> {
    let start = match &args.start {
        Some(CsvVector(v)) => Some(v.clone()),
        None => loaded.start().map(<[f64]>::to_vec),
    };
    if let Some(s) = &start {
        if s.len() != loaded.problem.n() {
            return Err(CliError::Usage(format!(
                "start has {} coordinates, problem has {}",
                s.len(),
                loaded.problem.n()
            )));
        }
    }
    Ok(start)
}

/// Runs phase I from the projection of `start` (or of the origin) onto the
/// equality constraints.
fn find_strictly_feasible(
    prob: &ConvexProblem,
    start: Option<&[f64]>,
    cfg: &BarrierConfig,
) -> Result<Vec<f64>, CliError> {
    let origin = vec![0.0; prob.n()];
    let x0 = project_equalities(prob, start.unwrap_or(&origin))?;
    match solver::phase1(prob, &x0, cfg)? {
        PhaseOneResult::Feasible(x) => Ok(x),
        PhaseOneResult::Infeasible { lower_bound, .. } => Err(CliError::Infeasible(format!(
            "no strictly feasible point (phase I optimum >= {})",
            format_number(lower_bound)
        ))),
    }
}

fn strictly_feasible_start(
    args: &SolveArgs,
    loaded: &LoadedProblem,
    cfg: &BarrierConfig,
) -> Result<Vec<f64>, CliError> {
    let start = requested_start(args, loaded)?;
    match start {
        Some(s) if loaded.problem.is_strictly_feasible(&s) => Ok(s),
        other => find_strictly_feasible(&loaded.problem, other.as_deref(), cfg),
    }
}

fn emit_trace(path: &Path, prob: &ConvexProblem, report: &SolveReport) -> Result<(), CliError> {
    let write_err = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(write_err)?;
    let mut sink = BufWriter::new(file);
    write_trace(&trace_rows(prob, report), &mut sink).map_err(write_err)?;
    Ok(())
}

fn report_solution(
    out: &mut dyn Write,
    prob: &ConvexProblem,
    report: &SolveReport,
) -> Result<(), CliError> {
    let lines = [
        format!("centerings={}", report.centerings()),
        format!("newton_iterations={}", report.total_newton_iterations()),
        format!("f0={}", format_number(report.f0)),
        format!("lambda={}", join(&report.dual.lambda)),
        format!("v={}", join(&report.dual.v)),
        format!("x={} gap_bound={}", join(&report.x), format_number(report.gap_bound())),
    ];
    debug_assert_eq!(report.x.len(), prob.n());
    write_lines(out, &lines)
}

fn write_lines(out: &mut dyn Write, lines: &[String]) -> Result<(), CliError> {
    let stdout_err = |source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    };
    for line in lines {
        writeln!(out, "{line}").map_err(stdout_err)?;
    }
    out.flush().map_err(stdout_err)
}

fn finish_solve(
    args: &SolveArgs,
    prob: &ConvexProblem,
    report: &SolveReport,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if let Some(path) = &args.trace {
        emit_trace(path, prob, report)?;
    }
    match report.status {
        SolveStatus::Optimal => report_solution(out, prob, report),
        SolveStatus::MaxIterations => Err(CliError::Solver(format!(
            "iteration limit reached after {} centerings",
            report.centerings()
        ))),
        SolveStatus::Infeasible => Err(CliError::Infeasible("problem is infeasible".into())),
    }
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_problem(&args.problem)?;
    let cfg = args.tuning.config();
    cfg.validate()?;
    let x0 = strictly_feasible_start(args, &loaded, &cfg)?;
    let report = solver::solve_barrier(&loaded.problem, &x0, &cfg)?;
    finish_solve(args, &loaded.problem, &report, out)
}

fn cmd_preliminary(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_problem(&args.problem)?;
    let cfg = args.tuning.config();
    cfg.validate()?;
    let x0 = strictly_feasible_start(args, &loaded, &cfg)?;
    let report = solver::solve_preliminary(&loaded.problem, &x0, cfg.eps, &cfg.newton)?;
    finish_solve(args, &loaded.problem, &report, out)
}

fn cmd_phase1(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_problem(&args.problem)?;
    let cfg = args.tuning.config();
    cfg.validate()?;
    let start = requested_start(args, &loaded)?;
    let x = find_strictly_feasible(&loaded.problem, start.as_deref(), &cfg)?;
    write_lines(
        out,
        &[
            format!("max_inequality={}", format_number(loaded.problem.max_inequality(&x))),
            format!("x={}", join(&x)),
        ],
    )
}

fn cmd_chebyshev(args: &PointArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let pts = load_points(&args.points)?;
    let cfg = args.tuning.config();
    cfg.validate()?;
    let (center, radius) = geometry::chebyshev_center(&pts, &cfg)?;
    write_lines(
        out,
        &[format!("center={} radius={}", join(&center), format_number(radius))],
    )
}

fn cmd_voronoi(args: &PointArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let pts = load_points(&args.points)?;
    let cell = geometry::voronoi_polyhedron(&pts[0], &pts[1..])?;
    let lines: Vec<String> = cell
        .g
        .to_rows()
        .iter()
        .zip(&cell.h)
        .map(|(row, h)| format!("{},{}", join(row), format_number(*h)))
        .collect();
    write_lines(out, &lines)
}

fn cmd_separate(args: &SeparateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = load_points(&args.points)?;
    let d = load_points(&args.points2)?;
    let cfg = args.tuning.config();
    cfg.validate()?;
    let plane = geometry::separating_hyperplane(&c, &d, &cfg)?;
    write_lines(
        out,
        &[format!("a={} b={}", join(&plane.a), format_number(plane.b))],
    )
}

const CHECK_SAMPLES: usize = 100;
const CHECK_TOL: f64 = 1e-5;

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load_problem(&args.problem)?;
    let prob = &loaded.problem;
    let n = prob.n();
    let center = loaded.start().map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
    let spread = 1.0 + linalg::norm_inf(&center);
    let mut rng = StdRng::seed_from_u64(args.seed);
    let mut sample = move || -> Vec<f64> {
        center
            .iter()
            .map(|c| c + spread * rng.random_range(-1.0..1.0))
            .collect()
    };

    let mut fields: Vec<(String, &dyn ScalarField)> = vec![("objective".into(), prob.objective().as_ref())];
    for (i, f) in prob.inequalities().iter().enumerate() {
        fields.push((format!("inequality {i}"), f.as_ref()));
    }
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for (name, f) in fields {
        let mut report = model::DerivativeReport::default();
        for _ in 0..CHECK_SAMPLES {
            let x = sample();
            let h = model::default_fd_step(&x);
            let r = model::check_derivatives(f, &x, h).map_err(|e| CliError::Solver(e.to_string()))?;
            report = report.merge(r);
        }
        let convexity = geometry::check_convexity_sampled(f, &mut sample, CHECK_SAMPLES)?;
        let ok = report.within(CHECK_TOL) && convexity.is_consistent();
        lines.push(format!(
            "{name}: gradient_error={} hessian_error={} convexity_violations={} {}",
            format_number(report.gradient_error),
            format_number(report.hessian_error),
            convexity.violations.len(),
            if ok { "ok" } else { "FAIL" }
        ));
        if !ok {
            failed.push(name);
        }
    }
    write_lines(out, &lines)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(format!("diagnostics failed for {}", failed.join(", "))))
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Preliminary(a) => cmd_preliminary(a, out),
        Command::Phase1(a) => cmd_phase1(a, out),
        Command::Chebyshev(a) => cmd_chebyshev(a, out),
        Command::Voronoi(a) => cmd_voronoi(a, out),
        Command::Separate(a) => cmd_separate(a, out),
        Command::Check(a) => cmd_check(a, out),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Results go to `out`; failures produce one line on `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "convexopt: {}", first.trim_start_matches("error: "));
            return EXIT_INPUT;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "convexopt: {msg}");
            e.exit_code()
        }
    }
}
