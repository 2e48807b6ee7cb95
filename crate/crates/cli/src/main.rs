//! `poincare`: command-line front end for the determinant, symbol and Hill
//! routines. Results go to stdout (JSON, or CSV for scan tables); timing and
//! errors go to stderr. Exit status: 0 success, 2 undecided, 1 error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod input;
mod output;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use poincare_core::hill::{existence_test, extract_null_solution, hill_ladder, spectral_shift_scan, RootKind, ScanRoot};
use poincare_core::l1_algebra::{poincare_determinant, poincare_trace};
use poincare_core::lattice::{MultiIndex, TruncationWindow};
use poincare_core::toroidal::{l1_membership_check, strong_ellipticity_check, symbol_order_diagnostic, symbol_to_matrix};
use poincare_core::{DeterminantOptions, Existence, TailKind, TailModel};
use serde::Serialize;

use output::{write_json, write_scan_csv, Complex, Limit};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] poincare_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "poincare", version, about = "Poincaré determinants, toroidal symbols and Hill's method on the torus")]
struct Cli {
    /// Target certified error.
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive_real)]
    tol: f64,
    /// Largest truncation window radius.
    #[arg(long, global = true, default_value_t = 64, value_parser = positive_int)]
    max_radius: usize,
    /// Grid size per axis (power of two); sets the x-sampling of `diagnose`.
    #[arg(long, global = true, default_value_t = 256, value_parser = power_of_two)]
    grid: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Det(I + A) of a matrix file.
    Det { file: PathBuf },
    /// Tr A of a matrix file.
    Trace { file: PathBuf },
    /// Matrix entries of a symbol on a window, with truncated norms.
    #[command(name = "symbol2matrix")]
    Symbol2Matrix {
        file: PathBuf,
        #[arg(long, value_parser = positive_int)]
        radius: usize,
    },
    /// Ellipticity, order and l1-membership report for a symbol file.
    Diagnose { file: PathBuf },
    /// Fractional Hill problems (-Δ)^{ν/2} u + Q u = 0.
    #[command(subcommand)]
    Hill(HillCommand),
}

#[derive(Debug, Subcommand)]
enum HillCommand {
    /// Existence decision, determinants and a null-vector candidate.
    Check { file: PathBuf },
    /// Determinant scan over the problem's `scan` grid.
    Scan { file: PathBuf },
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("expected a positive real, got `{s}`")),
    }
}

fn positive_int(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

fn power_of_two(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n.is_power_of_two() => Ok(n),
        _ => Err(format!("grid size must be a power of two, got `{s}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Success,
    Undecided,
}

struct Run {
    tol: f64,
    max_radius: usize,
    grid: usize,
    format: Format,
}

impl Run {
    fn opts(&self) -> DeterminantOptions<f64> {
        DeterminantOptions::with_tol(self.tol).max_radius(self.max_radius)
    }

    fn json_only(&self, what: &str) -> Result<(), CliError> {
        match self.format {
            Format::Json => Ok(()),
            Format::Csv => Err(CliError::Usage(format!("{what}: csv output is only available for `hill scan`"))),
        }
    }
}

fn tail_kind(t: &TailModel<f64>) -> &'static str {
    match t.kind() {
        TailKind::ExactFinite => "exact",
        TailKind::UserBound => "user_bound",
        TailKind::Estimated => "estimated",
        TailKind::NotSummable => "not_summable",
    }
}

#[derive(Serialize)]
struct LimitDoc {
    command: &'static str,
    tol: f64,
    max_radius: usize,
    tail_kind: &'static str,
    #[serde(flatten)]
    result: Limit,
}

fn det_or_trace(run: &Run, file: &Path, trace: bool, out: &mut impl Write) -> Result<Status, CliError> {
    let command = if trace { "trace" } else { "det" };
    run.json_only(command)?;
    let (a, tail) = input::load_matrix(file)?;
    let r = if trace { poincare_trace(&a, &tail, &run.opts())? } else { poincare_determinant(&a, &tail, &run.opts())? };
    let doc = LimitDoc { command, tol: run.tol, max_radius: run.max_radius, tail_kind: tail_kind(&tail), result: (&r).into() };
    write_json(out, &doc)?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct EntryOut {
    row: Vec<i64>,
    col: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct NormOut {
    radius: usize,
    l1_norm: f64,
}

#[derive(Serialize)]
struct MatrixDoc {
    command: &'static str,
    dimension: usize,
    radius: usize,
    l1_norm: f64,
    tail_kind: &'static str,
    tail_note: Option<String>,
    ladder_norms: Vec<NormOut>,
    entries: Vec<EntryOut>,
}

fn doubling(first: usize, last: usize) -> Vec<usize> {
    let mut r = first.min(last);
    let mut out = vec![r];
    while r < last {
        r = (2 * r).max(1).min(last);
        out.push(r);
    }
    out
}

fn symbol2matrix(run: &Run, file: &Path, radius: usize, out: &mut impl Write) -> Result<Status, CliError> {
    run.json_only("symbol2matrix")?;
    let sigma = input::load_symbol(file)?;
    let (a, tail) = symbol_to_matrix(&sigma, TruncationWindow::new(sigma.dim(), radius))?;
    let doc = MatrixDoc {
        command: "symbol2matrix",
        dimension: sigma.dim(),
        radius,
        l1_norm: a.l1_norm(),
        tail_kind: tail_kind(&tail),
        tail_note: tail.note().map(str::to_string),
        ladder_norms: doubling(1, radius)
            .into_iter()
            .map(|r| NormOut { radius: r, l1_norm: a.restrict(TruncationWindow::new(sigma.dim(), r)).l1_norm() })
            .collect(),
        entries: a
            .entries()
            .map(|(r, c, v)| EntryOut { row: r.coords().to_vec(), col: c.coords().to_vec(), re: v.re, im: v.im })
            .collect(),
    };
    write_json(out, &doc)?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct WitnessOut {
    x: Vec<f64>,
    k: Vec<i64>,
    ratio: f64,
}

#[derive(Serialize)]
struct EllipticityOut {
    order: f64,
    passed: bool,
    c0: f64,
    n0: usize,
    worst: Option<WitnessOut>,
}

#[derive(Serialize)]
struct FitOut {
    alpha: Vec<i64>,
    exponent: Option<f64>,
    constant: f64,
    vanishing: bool,
}

#[derive(Serialize)]
struct OrderOut {
    order: Option<f64>,
    shells: (usize, usize),
    fits: Vec<FitOut>,
}

#[derive(Serialize)]
struct MembershipOut {
    in_l1: bool,
    order: Option<f64>,
    ladder: Vec<NormOut>,
    limit: Option<f64>,
    discrepancy: Option<f64>,
    warning: Option<String>,
}

#[derive(Serialize)]
struct DiagnoseDoc {
    command: &'static str,
    dimension: usize,
    window_radius: usize,
    x_grid: usize,
    declared_order: Option<f64>,
    ellipticity: Option<EllipticityOut>,
    order_fit: Option<OrderOut>,
    order_fit_error: Option<String>,
    l1_membership: MembershipOut,
}

/// Keeps `x_grid^n` at most 1024 samples.
fn x_grid(grid: usize, dim: usize) -> usize {
    let mut g = grid;
    while g > 1 && g.checked_pow(dim as u32).is_none_or(|t| t > 1024) {
        g /= 2;
    }
    g
}

fn diagnose(run: &Run, file: &Path, out: &mut impl Write) -> Result<Status, CliError> {
    run.json_only("diagnose")?;
    let sigma = input::load_symbol(file)?;
    let dim = sigma.dim();
    let radius = if dim == 1 { run.max_radius } else { run.max_radius.min(32) };
    let w = TruncationWindow::new(dim, radius);
    let xg = x_grid(run.grid, dim);

    let ellipticity = sigma.order().map(|m| {
        let r = strong_ellipticity_check(&sigma, m, w, xg);
        EllipticityOut {
            order: m,
            passed: r.passed,
            c0: r.c0,
            n0: r.n0,
            worst: r.worst.map(|w| WitnessOut { x: w.x, k: w.k.coords().to_vec(), ratio: w.ratio }),
        }
    });
    let mut alpha = vec![0i64; dim];
    alpha[0] = 2;
    let (order_fit, order_fit_error) = match symbol_order_diagnostic(&sigma, &MultiIndex::new(alpha), w, xg) {
        Ok(r) => (
            Some(OrderOut {
                order: r.order,
                shells: r.shells,
                fits: r
                    .fits
                    .into_iter()
                    .map(|f| FitOut {
                        alpha: f.alpha.coords().to_vec(),
                        exponent: f.exponent,
                        constant: f.constant,
                        vanishing: f.vanishing,
                    })
                    .collect(),
            }),
            None,
        ),
        Err(e) => (None, Some(e.to_string())),
    };
    let m = l1_membership_check(&sigma, &doubling(4, radius.max(4)), run.tol)?;
    let doc = DiagnoseDoc {
        command: "diagnose",
        dimension: dim,
        window_radius: radius,
        x_grid: xg,
        declared_order: sigma.order(),
        ellipticity,
        order_fit,
        order_fit_error,
        l1_membership: MembershipOut {
            in_l1: m.in_l1,
            order: m.order,
            ladder: m.ladder.into_iter().map(|(radius, l1_norm)| NormOut { radius, l1_norm }).collect(),
            limit: m.limit,
            discrepancy: m.discrepancy,
            warning: m.warning,
        },
    };
    write_json(out, &doc)?;
    Ok(Status::Success)
}

#[derive(Serialize)]
struct CoeffOut {
    index: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct SolutionOut {
    window_radius: usize,
    sigma_min: f64,
    residual: f64,
    regularity_mass: f64,
    regularity_bound: f64,
    coefficients: Vec<CoeffOut>,
}

#[derive(Serialize)]
struct CheckDoc {
    command: &'static str,
    dimension: usize,
    nu: f64,
    tol: f64,
    decision: &'static str,
    /// Zero exactly when the equation has a nontrivial solution.
    equation_determinant: Limit,
    /// Determinant of the damped matrix `g_{k−m}/((2π)^ν|k|^ν + 1)` as stated.
    hill_determinant: Limit,
    solution: Option<SolutionOut>,
    solution_error: Option<String>,
}

/// Largest radius within `max_radius` whose section has at most 1200 rows.
fn section_radius(dim: usize, max_radius: usize) -> usize {
    let mut r = 0;
    while r < max_radius && (2 * (r + 1) + 1).checked_pow(dim as u32).is_some_and(|m| m <= 1200) {
        r += 1;
    }
    r
}

fn hill_check(run: &Run, file: &Path, out: &mut impl Write) -> Result<Status, CliError> {
    run.json_only("hill check")?;
    let p = input::load_hill(file)?.problem;
    let opts = run.opts();
    let report = existence_test(&p, &opts)?;
    let literal = hill_ladder(&p, &opts)?;
    let (decision, status) = match report.decision {
        Existence::NontrivialSolution => ("nontrivial-solution", Status::Success),
        Existence::OnlyTrivial => ("only-trivial", Status::Success),
        Existence::Undecided => ("undecided", Status::Undecided),
    };
    let (solution, solution_error) = if report.decision == Existence::OnlyTrivial {
        (None, None)
    } else {
        let w = TruncationWindow::new(p.dim(), section_radius(p.dim(), run.max_radius));
        match extract_null_solution(&p, w, run.tol.sqrt()) {
            Ok(c) => (
                Some(SolutionOut {
                    window_radius: c.window.radius,
                    sigma_min: c.sigma_min,
                    residual: c.residual,
                    regularity_mass: c.regularity_mass,
                    regularity_bound: c.regularity_bound,
                    coefficients: c
                        .b
                        .iter()
                        .map(|(k, v)| CoeffOut { index: k.coords().to_vec(), re: v.re, im: v.im })
                        .collect(),
                }),
                None,
            ),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let doc = CheckDoc {
        command: "hill check",
        dimension: p.dim(),
        nu: p.nu(),
        tol: run.tol,
        decision,
        equation_determinant: (&report.determinant).into(),
        hill_determinant: (&literal).into(),
        solution,
        solution_error,
    };
    write_json(out, &doc)?;
    Ok(status)
}

#[derive(Serialize)]
struct GridRow {
    lambda: f64,
    det: Complex,
    certified_error: f64,
}

#[derive(Serialize)]
struct RootOut {
    lambda: f64,
    det_abs: f64,
    certified_error: f64,
    bracket: (f64, f64),
    kind: &'static str,
}

impl From<&ScanRoot<f64>> for RootOut {
    fn from(r: &ScanRoot<f64>) -> Self {
        let kind = match r.kind {
            RootKind::GridPoint => "grid_point",
            RootKind::SignChange => "sign_change",
            RootKind::Dip => "dip",
        };
        RootOut { lambda: r.lambda, det_abs: r.det_abs, certified_error: r.certified_error, bracket: r.bracket, kind }
    }
}

#[derive(Serialize)]
struct ScanDoc {
    command: &'static str,
    tol: f64,
    max_radius: usize,
    roots: Vec<RootOut>,
    rejected: Vec<RootOut>,
    grid: Vec<GridRow>,
}

fn hill_scan(run: &Run, file: &Path, out: &mut impl Write) -> Result<Status, CliError> {
    let input = input::load_hill(file)?;
    let spec = input.scan.ok_or_else(|| CliError::Validation("hill scan: problem file has no `scan` section".into()))?;
    let s = spectral_shift_scan(&input.problem, &spec.grid()?, &run.opts())?;
    match run.format {
        Format::Csv => write_scan_csv(&mut *out, &s.lambdas, &s.dets, &s.certified_errors)
            .map_err(|e| CliError::Output(e.to_string()))?,
        Format::Json => {
            let doc = ScanDoc {
                command: "hill scan",
                tol: run.tol,
                max_radius: run.max_radius,
                roots: s.roots.iter().map(RootOut::from).collect(),
                rejected: s.rejected.iter().map(RootOut::from).collect(),
                grid: s
                    .lambdas
                    .iter()
                    .zip(&s.dets)
                    .zip(&s.certified_errors)
                    .map(|((l, d), e)| GridRow { lambda: *l, det: (*d).into(), certified_error: *e })
                    .collect(),
            };
            write_json(out, &doc)?;
        }
    }
    Ok(if s.rejected.is_empty() { Status::Success } else { Status::Undecided })
}

fn dispatch(cli: Cli, out: &mut impl Write) -> Result<Status, CliError> {
    let run = Run { tol: cli.tol, max_radius: cli.max_radius, grid: cli.grid, format: cli.format };
    match cli.command {
        Command::Det { file } => det_or_trace(&run, &file, false, out),
        Command::Trace { file } => det_or_trace(&run, &file, true, out),
        Command::Symbol2Matrix { file, radius } => symbol2matrix(&run, &file, radius, out),
        Command::Diagnose { file } => diagnose(&run, &file, out),
        Command::Hill(HillCommand::Check { file }) => hill_check(&run, &file, out),
        Command::Hill(HillCommand::Scan { file }) => hill_scan(&run, &file, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let mut stdout = io::stdout().lock();
    let result = dispatch(cli, &mut stdout);
    let _ = stdout.flush();
    eprintln!("elapsed: {:.3} ms", start.elapsed().as_secs_f64() * 1e3);
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Undecided) => {
            eprintln!("result undecided");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
