//! `rqet`: phase sets, sign and polar runs, realizability checks and
//! coherent-error sweeps from the command line.
//!
//! Exit codes: 0 success, 2 bad input, 3 domain precondition, 4 numeric
//! failure (including a run that ends above its target accuracy).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rqet_core::io::{self, PhaseFile};
use rqet_core::linalg::{hermitian_eig, operator_norm};
use rqet_core::poly::{check_qet_conditions, pade, DEFAULT_GRID, DEFAULT_OUTER_LIMIT};
use rqet_core::qsp::pade_phases;
use rqet_core::random::{random_contraction, random_gapped_hermitian, seeded_rng};
use rqet_core::rqet::{self, distinct_angles, flattened_phases, perturb_sweep, run_structure, SignConfig, SignMode};
use rqet_core::rqsvt::run_polar;
use rqet_core::{tol, ComplexMatrix, Error, ErrorKind, Execution, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rqet", version, about = "Recursive QET/QSVT phase factors and matrix-function runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Base Padé phases and their n-level flattened composition (JSON).
    Phases {
        #[arg(long = "pade-l", default_value_t = 2)]
        pade_l: usize,
        /// Number of nested levels to flatten.
        #[arg(long, default_value_t = 1)]
        iters: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matrix sign function by r-QET (CSV iteration report).
    SignRun {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value = "recursive")]
        mode: String,
    },
    /// Polar decomposition by r-QSVT (CSV iteration report).
    PolarRun {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Realizability report for a polynomial (JSON).
    Conditions {
        /// Polynomial JSON file.
        #[arg(long, conflicts_with = "pade_l", required_unless_present = "pade_l")]
        poly: Option<PathBuf>,
        /// Check the Padé polynomial p_l instead of a file.
        #[arg(long = "pade-l")]
        pade_l: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coherent phase-error sweep φ → φ(1+δ) over a log grid (CSV).
    Perturb {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long = "pade-l", default_value_t = 2)]
        pade_l: usize,
        /// Number of r-QET levels per grid point.
        #[arg(long, default_value_t = 1)]
        iters: usize,
        /// Log-spaced grid `lo:hi:count` of positive δ values.
        #[arg(long = "delta-grid", default_value = "1e-6:1e-2:9")]
        delta_grid: String,
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Matrix JSON file.
    #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
    matrix: Option<PathBuf>,
    /// Seed for a generated input; needs --dim and --gap.
    #[arg(long, requires_all = ["dim", "gap"])]
    seed: Option<u64>,
    #[arg(long)]
    dim: Option<usize>,
    /// Spectral gap Δ (singular-value floor for polar-run). Read from the
    /// matrix when omitted with --matrix.
    #[arg(long)]
    gap: Option<f64>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    #[arg(long = "pade-l", default_value_t = 2)]
    pade_l: usize,
    /// Override the iteration count derived from Δ and ε.
    #[arg(long)]
    iters: Option<usize>,
    /// Divide the input by its operator norm first.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Kind {
    Hermitian,
    General,
}

/// The input matrix, its gap, and the normalization factor applied.
fn load_input(input: &InputArgs, kind: Kind, normalize: bool) -> Result<(ComplexMatrix, f64, f64)> {
    let raw = match (&input.matrix, input.seed) {
        (Some(path), _) => io::parse_matrix(&io::read_file(path)?)?,
        (None, Some(seed)) => {
            let dim = input.dim.ok_or_else(|| Error::Input("--seed needs --dim".into()))?;
            let gap = input.gap.ok_or_else(|| Error::Input("--seed needs --gap".into()))?;
            if dim == 0 || dim > 64 {
                return Err(Error::Input(format!("--dim must lie in 1..=64, got {dim}")));
            }
            if !(gap > 0.0 && gap < 1.0) {
                return Err(Error::Input(format!("--gap must lie in (0, 1), got {gap}")));
            }
            let mut rng = seeded_rng(seed);
            match kind {
                Kind::Hermitian => random_gapped_hermitian(&mut rng, dim, gap),
                Kind::General => random_contraction(&mut rng, dim, gap, 1.0),
            }
        }
        (None, None) => return Err(Error::Input("give --matrix PATH or --seed N --dim D --gap G".into())),
    };
    let (m, factor) = if normalize { rqet_core::blockenc::normalize(&raw) } else { (raw, 1.0) };
    let gap = match input.gap {
        Some(g) => g,
        None => match kind {
            Kind::Hermitian => hermitian_eig(&m)?.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min),
            Kind::General => rqet_core::linalg::polar_oracle(&m)?.sigma_min,
        },
    };
    Ok((m, gap.min(1.0 - f64::EPSILON), factor))
}

fn check_l(l: usize) -> Result<()> {
    if l == 0 || !l.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "p_{l} is not QET-realizable: it has degree {} but |p_{l}(x)| < 1 for some |x| > 1, violating condition (ii); only even l is allowed",
            2 * l + 1
        )));
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => io::write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_phases(l: usize, iters: usize, out: Option<&Path>) -> Result<ExitCode> {
    check_l(l)?;
    let base = pade_phases(l)?;
    let flat = flattened_phases(&base, iters)?;
    let distinct = distinct_angles(&flat);
    let runs = run_structure(&flat, &base);
    let doc = json!({
        "pade_l": l,
        "levels": iters,
        "tolerance": tol::comparison(),
        "base": PhaseFile::from(&base),
        "flattened": {
            "degree": flat.degree(),
            "queries": rqet::query_count(iters, l)?.to_string(),
            "distinct_nonzero_angles": distinct,
            "distinct_count": distinct.len(),
            "forward_runs": runs.as_ref().map(|r| r.forward_runs),
            "adjoint_runs": runs.as_ref().map(|r| r.adjoint_runs),
            "phases": PhaseFile::from(&flat),
        },
    });
    emit(out, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn converged_code(ok: bool, err: f64, eps: f64) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("final error {err:.3e} exceeds epsilon {eps:e}");
        ExitCode::from(4)
    }
}

fn cmd_sign_run(input: &InputArgs, run: &RunArgs, mode: &str) -> Result<ExitCode> {
    check_l(run.pade_l)?;
    let mode: SignMode = mode.parse()?;
    let (a, gap, factor) = load_input(input, Kind::Hermitian, run.normalize)?;
    let mut cfg = SignConfig::new(gap, run.epsilon).with_l(run.pade_l).with_mode(mode);
    if let Some(n) = run.iters {
        cfg = cfg.with_iterations(n);
    }
    let (_, mut report) = rqet::run_sign(&a, &cfg)?;
    report.normalization = factor;
    if run.normalize {
        eprintln!("normalization factor {}", io::fmt_f64(factor));
    }
    emit(run.out.as_deref(), &io::report_csv(&report.rows))?;
    Ok(converged_code(report.converged(), report.final_error(), run.epsilon))
}

fn cmd_polar_run(input: &InputArgs, run: &RunArgs) -> Result<ExitCode> {
    if run.pade_l != 2 {
        return Err(Error::Input("polar-run uses p_2 only".into()));
    }
    let (a, gap, factor) = load_input(input, Kind::General, run.normalize)?;
    let (_, mut report) = run_polar(&a, gap, run.epsilon, run.iters, Execution::default())?;
    report.normalization = factor;
    if run.normalize {
        eprintln!("normalization factor {}", io::fmt_f64(factor));
    }
    emit(run.out.as_deref(), &io::report_csv(&report.rows))?;
    Ok(converged_code(report.converged(), report.final_error(), run.epsilon))
}

fn cmd_conditions(poly: Option<&Path>, l: Option<usize>, grid: usize, out: Option<&Path>) -> Result<ExitCode> {
    let p = match (poly, l) {
        (Some(path), _) => io::parse_polynomial(&io::read_file(path)?)?,
        (None, Some(l)) => pade(l),
        (None, None) => return Err(Error::Input("give --poly PATH or --pade-l L".into())),
    };
    let report = check_qet_conditions(&p, grid, DEFAULT_OUTER_LIMIT);
    let mut doc = serde_json::to_value(&report).expect("json");
    doc["accepted"] = json!(report.accepted());
    emit(out, &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

/// `lo:hi:count`, log-spaced and ascending.
fn parse_delta_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Input(format!("--delta-grid expects lo:hi:count with 0 < lo <= hi, got '{spec}'"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let count: usize = count.parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.log10(), hi.log10());
    let last = count - 1;
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            i if i == last => hi,
            i => 10f64.powf(a + (b - a) * i as f64 / last as f64),
        })
        .collect())
}

fn cmd_perturb(
    input: &InputArgs,
    l: usize,
    iters: usize,
    grid: &str,
    normalize: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    check_l(l)?;
    let mut deltas = vec![0.0];
    deltas.extend(parse_delta_grid(grid)?);
    let (a, _, factor) = load_input(input, Kind::Hermitian, normalize)?;
    if normalize {
        eprintln!("normalization factor {}", io::fmt_f64(factor));
    }
    if operator_norm(&a) > 1.0 + rqet_core::blockenc::NORM_SLACK {
        return Err(Error::NormTooLarge { norm: operator_norm(&a) });
    }
    let rows = perturb_sweep(Execution::default(), &a, &pade_phases(l)?, iters, &deltas)?;
    emit(out, &io::perturb_csv(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Phases { pade_l, iters, out } => cmd_phases(*pade_l, *iters, out.as_deref()),
        Command::SignRun { input, run, mode } => cmd_sign_run(input, run, mode),
        Command::PolarRun { input, run } => cmd_polar_run(input, run),
        Command::Conditions { poly, pade_l, grid, out } => cmd_conditions(poly.as_deref(), *pade_l, *grid, out.as_deref()),
        Command::Perturb { input, pade_l, iters, delta_grid, normalize, out } => {
            cmd_perturb(input, *pade_l, *iters, delta_grid, *normalize, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Numeric => 4,
            })
        }
    }
}
