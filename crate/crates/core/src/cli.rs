//! Command-line front end.
//!
//! Exit codes: 0 success, 1 assertion failure (`--check`,
//! `--assert-alternation`), 2 usage or input error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::energy::expectation;
use crate::entangle::{concurrence_pure, concurrence_wootters};
use crate::error::Error;
use crate::evolve::{evolve_first_order, trajectory};
use crate::export::{
    fmt_g, write_contours_csv, write_field_csv, write_heatmap_pgm, write_loci_csv, write_sites_csv,
};
use crate::model::{
    build_h0, build_potential, initial_state, Family, FreeHamiltonianSpec, PotentialSpec,
};
use crate::qmath::{partial_trace, ComplexVector};
use crate::scenarios::{
    amplitude_pairs, run_nonlocal, run_phase_copy_repeated, run_pulse, ScenarioReport,
};
use crate::topo::{
    alternation_check, contour_numeric, lattice_sites, sweep, zero_loci, Axis, Grid, LatticeSite,
    Locus, MIN_RESOLUTION, SITE_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Number of nonzero expectation levels written to `contours.csv`.
const CONTOUR_LEVELS: usize = 9;

#[derive(Parser, Debug)]
#[command(
    name = "qtopo",
    version,
    about = "Qubit interaction potentials, entanglement and correlation topology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Concurrence field, zero-expectation loci and lattice sites over (η, κ)
    Sweep(SweepArgs),
    /// Energy-violating short pulse that produces a Bell state
    Pulse(PulseArgs),
    /// Entangled pair with its second qubit coupled to a third qubit
    Nonlocal(TimedArgs),
    /// Phase copying between two qubits under the diagonal potential
    Phasecopy(PhaseCopyArgs),
    /// Trajectory of the canonical initial state under any potential
    Evolve(EvolveArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepFamily {
    #[value(name = "general_diag")]
    GeneralDiag,
    #[value(name = "general_flip")]
    GeneralFlip,
}

impl From<SweepFamily> for Family {
    fn from(f: SweepFamily) -> Family {
        match f {
            SweepFamily::GeneralDiag => Family::GeneralDiag,
            SweepFamily::GeneralFlip => Family::GeneralFlip,
        }
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse::<Grid>().map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: SweepFamily,
    /// Dimensionless phase x = v0·dt
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    /// emin,emax,kmin,kmax,ne,nk
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<Grid>,
    /// Potential amplitude used for the expectation surface
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    v0: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Locus samples per 2π when scanning for lattice sites
    #[arg(long, default_value_t = MIN_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value_t = SITE_TOL)]
    tol: f64,
    /// Exit 1 if any locus fails the alternation check
    #[arg(long)]
    assert_alternation: bool,
}

#[derive(Args, Debug)]
struct PulseArgs {
    #[arg(long, allow_hyphen_values = true)]
    eps: f64,
    #[arg(long, allow_hyphen_values = true)]
    v0: f64,
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct TimedArgs {
    #[arg(long, allow_hyphen_values = true)]
    v0: f64,
    #[arg(long, allow_hyphen_values = true)]
    dt: f64,
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
struct PhaseCopyArgs {
    #[command(flatten)]
    timed: TimedArgs,
    /// Number of successive interactions
    #[arg(long, default_value_t = 1)]
    repeat: usize,
}

#[derive(Args, Debug)]
struct EvolveArgs {
    /// Potential in text form, e.g. "family=general_flip v0=1 eta=1.5708 kappa=1.5708"
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    potential: Option<String>,
    /// File with one potential per line; runs each as a separate job
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    dt: f64,
    #[arg(long, default_value_t = 1)]
    steps: usize,
    /// Use the renormalized first-order propagator instead of the exact one
    #[arg(long)]
    first_order: bool,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eps1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eps2: f64,
}

#[derive(Debug)]
enum CliError {
    Input(Error),
    Usage(String),
    Io(io::Error),
    Json(serde_json::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Pulse(a) => run_pulse(a.eps, a.v0)
            .map_err(CliError::from)
            .and_then(|r| emit_report(&r, a.check, out)),
        Command::Nonlocal(a) => run_nonlocal(a.v0, a.dt)
            .map_err(CliError::from)
            .and_then(|r| emit_report(&r, a.check, out)),
        Command::Phasecopy(a) => cmd_phasecopy(&a, out),
        Command::Evolve(a) => cmd_evolve(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Input(Error::Factorization { lambda2 })) => {
            eprintln!("error: evolved state is not a product state (schmidt λ2 = {lambda2:e})");
            EXIT_ASSERTION
        }
        Err(CliError::Input(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_ASSERTION
        }
        Err(CliError::Json(e)) => {
            eprintln!("error: {e}");
            EXIT_ASSERTION
        }
    }
}

/// Re-expresses every float at 12 significant digits.
fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let v = n.as_f64().expect("f64 number");
            let rounded: f64 = fmt_g(v).parse().unwrap_or(v);
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn to_json_line(value: &impl Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string(&round_floats(serde_json::to_value(
        value,
    )?))?)
}

fn emit_report(report: &ScenarioReport, check: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    writeln!(out, "{}", to_json_line(report)?)?;
    if check {
        let violations = report.violations();
        if !violations.is_empty() {
            eprintln!("check failed: {}", violations.join(", "));
            return Ok(EXIT_ASSERTION);
        }
    }
    Ok(EXIT_OK)
}

fn cmd_phasecopy(a: &PhaseCopyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = run_phase_copy_repeated(a.timed.v0, a.timed.dt, a.repeat)?;
    emit_report(&report, a.timed.check, out)
}

#[derive(Serialize)]
struct LocusAlternation {
    locus: String,
    fixed: Axis,
    value: f64,
    pass: bool,
    vacuous: bool,
    n_separable: usize,
    n_maximal: usize,
    violation: Option<(usize, usize)>,
}

#[derive(Serialize)]
struct SweepSummary {
    family: Family,
    x: f64,
    v0: f64,
    rows: usize,
    loci: usize,
    sites: usize,
    alternation_pass: bool,
    out: String,
}

fn create(dir: &Path, name: &str) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let family = Family::from(a.family);
    let grid = a.grid.unwrap_or_default();
    let field = sweep(family, a.x, a.v0, &grid)?;
    let loci = zero_loci(family, &grid)?;
    let per_locus: Vec<(Locus, Vec<LatticeSite>)> = loci
        .iter()
        .map(|l| lattice_sites(family, a.x, l, a.resolution, a.tol).map(|s| (*l, s)))
        .collect::<Result<_, _>>()?;
    let alternation: Vec<LocusAlternation> = per_locus
        .iter()
        .map(|(l, sites)| {
            let r = alternation_check(sites);
            LocusAlternation {
                locus: l.label(),
                fixed: l.fixed,
                value: l.value,
                pass: r.pass,
                vacuous: r.vacuous,
                n_separable: r.n_separable,
                n_maximal: r.n_maximal,
                violation: r.violation,
            }
        })
        .collect();

    let (lo, hi) = field
        .vbar
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let levels: Vec<(f64, Vec<_>)> = (1..=CONTOUR_LEVELS)
        .map(|k| lo + (hi - lo) * k as f64 / (CONTOUR_LEVELS + 1) as f64)
        .filter(|level| level.abs() > 1e-12 && hi > lo)
        .map(|level| (level, contour_numeric(&field, level)))
        .collect();

    fs::create_dir_all(&a.out)?;
    let mut w = create(&a.out, "field.csv")?;
    write_field_csv(&field, &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "heatmap.pgm")?;
    write_heatmap_pgm(&field, &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "loci.csv")?;
    write_loci_csv(&loci, grid.n_eta.max(grid.n_kappa), &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "sites.csv")?;
    write_sites_csv(&per_locus, &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "contours.csv")?;
    write_contours_csv(&levels, &mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "alternation.json")?;
    writeln!(w, "{}", to_json_line(&alternation)?)?;
    w.flush()?;

    let all_pass = alternation.iter().all(|r| r.pass);
    let summary = SweepSummary {
        family,
        x: a.x,
        v0: a.v0,
        rows: grid.n_eta * grid.n_kappa,
        loci: loci.len(),
        sites: per_locus.iter().map(|(_, s)| s.len()).sum(),
        alternation_pass: all_pass,
        out: a.out.display().to_string(),
    };
    writeln!(out, "{}", to_json_line(&summary)?)?;
    if a.assert_alternation && !all_pass {
        eprintln!("alternation check failed on at least one locus");
        return Ok(EXIT_ASSERTION);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Sample {
    #[serde(skip_serializing_if = "Option::is_none")]
    job: Option<usize>,
    t: f64,
    amplitudes: Vec<[f64; 2]>,
    concurrence: f64,
    energy: f64,
}

/// Concurrence of the first two qubits: pure-state formula for two qubits,
/// Wootters on the reduced state for three.
fn pair_concurrence(state: &ComplexVector) -> crate::Result<f64> {
    match state.dim() {
        4 => concurrence_pure(state),
        _ => concurrence_wootters(&partial_trace(&state.outer(), &[2, 2, 2], &[0, 1])?),
    }
}

fn cmd_evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let jobs: Vec<PotentialSpec> = match (&a.potential, &a.config) {
        (Some(text), _) => vec![text.parse()?],
        (None, Some(path)) => fs::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.parse::<PotentialSpec>())
            .collect::<Result<_, _>>()?,
        (None, None) => {
            return Err(CliError::Usage(
                "either --potential or --config is required".into(),
            ))
        }
    };
    let batch = a.config.is_some();

    for (index, spec) in jobs.iter().enumerate() {
        let v = build_potential(spec)?;
        let n_qubits = spec.family.n_qubits();
        let h0 = build_h0(&FreeHamiltonianSpec::new(a.eps1, a.eps2), n_qubits)?;
        let s0 = initial_state(v.dim())?;
        let samples: Vec<(f64, ComplexVector)> = if a.first_order {
            let exact_times = trajectory(&s0, &h0, &v, a.dt, a.steps)?;
            exact_times
                .iter()
                .map(|(t, _)| Ok((*t, evolve_first_order(&s0, &h0, &v, *t)?)))
                .collect::<crate::Result<_>>()?
        } else {
            trajectory(&s0, &h0, &v, a.dt, a.steps)?
        };
        for (t, state) in samples {
            let sample = Sample {
                job: batch.then_some(index),
                t,
                amplitudes: amplitude_pairs(&state),
                concurrence: pair_concurrence(&state)?,
                energy: expectation(&v, &state)?,
            };
            writeln!(out, "{}", to_json_line(&sample)?)?;
        }
    }
    Ok(EXIT_OK)
}
