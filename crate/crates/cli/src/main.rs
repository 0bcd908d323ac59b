//! `potalg`: bound-state spectra from potential algebras, on the command line.

mod output;

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use potalg::ladder::{self, Bounds};
use potalg::oracle::{self, Grid, Scheme, Tolerances, VerificationReport, VerifyOptions, DEFAULT_POINTS};
use potalg::representation::{self, Dimension, Region, SpectrumLine};
use potalg::{Error, Family, HalfInteger, ModelParams, RepClass, RepKind, SpectrumMode, SpectrumReport};

use output::{emit, float, json_bytes, opt_float, Envelope, Format, Table, SCHEMA_VERSION};

const EXIT_IO: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "potalg", version, about = "Bound-state spectra from potential algebras, checked numerically")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify representations of the family's algebra.
    Classify(ClassifyArgs),
    /// Bound-state energies from the representation theory.
    Spectrum(SpectrumArgs),
    /// Sample the eigenfunction of one level.
    Wavefunction(WavefunctionArgs),
    /// Sample the potential together with its level lines.
    Potential(PotentialArgs),
    /// Compare the algebraic spectrum with the numerical oracle.
    Verify(VerifyArgs),
    /// Run classify, spectrum or verify over a range of g or j.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Output format (sweep defaults to csv, everything else to json).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add run metadata (version, timing) to the output.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args, Debug)]
struct Model {
    /// flat | spherical | hyperbolic | rosen-morse
    #[arg(long)]
    family: Family,
    /// Angular parameter, as "p/2" or a decimal.
    #[arg(long, allow_hyphen_values = true)]
    j: String,
    /// Coupling constant.
    #[arg(long, allow_hyphen_values = true)]
    g: f64,
}

impl Model {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::parse(self.family, &self.j, self.g)
    }

    fn echo(&self) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("family".into(), json!(self.family.cli_name()));
        m.insert("j".into(), json!(self.j));
        m.insert("g".into(), json!(self.g));
        m
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Extended,
}

impl From<Mode> for SpectrumMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => SpectrumMode::Strict,
            Mode::Extended => SpectrumMode::Extended,
        }
    }
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Strict => "strict",
            Mode::Extended => "extended",
        }
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// flat | spherical | hyperbolic | rosen-morse
    #[arg(long)]
    family: Family,
    /// Coupling constant.
    #[arg(long, allow_hyphen_values = true)]
    g: f64,
    /// Classify a single label.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["nu_range", "nu_max"])]
    nu: Option<String>,
    /// Classify every label of a range "lo:hi:count".
    #[arg(long, allow_hyphen_values = true, conflicts_with = "nu_max")]
    nu_range: Option<String>,
    /// Largest finite label to list (required for flat and spherical).
    #[arg(long)]
    nu_max: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    model: Model,
    /// Highest level index (required for flat and spherical).
    #[arg(long)]
    n_max: Option<usize>,
    /// strict needs j in {1/2, 3/2, ...}; extended applies the closed form at any j.
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct WavefunctionArgs {
    #[command(flatten)]
    model: Model,
    /// Level index.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Sample grid "a,b,n": n interior points plus both ends; n must be odd.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Scale to unit Simpson norm over the emitted samples.
    #[arg(long)]
    normalize: bool,
    /// strict needs j in {1/2, 3/2, ...}; extended applies the closed form at any j.
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct PotentialArgs {
    #[command(flatten)]
    model: Model,
    /// Sample grid "a,b,n": the n interior points are emitted.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Highest level line (flat and spherical draw none without it).
    #[arg(long)]
    n_max: Option<usize>,
    /// strict needs j in {1/2, 3/2, ...}; extended applies the closed form at any j.
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    /// Central differences.
    Fd,
    /// Weighted linear elements.
    Fe,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Fd => Scheme::CentralDifference,
            SchemeArg::Fe => Scheme::WeightedElement,
        }
    }
}

#[derive(Args, Debug)]
struct Oracle {
    /// Relative tolerance per level.
    #[arg(long, env = "SPECALG_DEFAULT_TOL", default_value_t = oracle::DEFAULT_REL_TOL)]
    tol_rel: f64,
    /// Interior points of the default oracle grid (raised if the ground state needs more).
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    /// Discretization (defaults to fe for singular families, fd for rosen-morse).
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Skip the grid-halving convergence check.
    #[arg(long)]
    no_convergence: bool,
    /// strict needs j in {1/2, 3/2, ...}; extended applies the closed form at any j.
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
}

impl Oracle {
    fn options(&self, grid: Option<Grid>) -> Result<VerifyOptions, Error> {
        if !(self.tol_rel.is_finite() && self.tol_rel > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tol_rel)));
        }
        Ok(VerifyOptions {
            tolerances: Tolerances {
                rel: self.tol_rel,
                check_convergence: !self.no_convergence,
                ..Tolerances::default()
            },
            points: self.points,
            mode: self.mode.into(),
            scheme: self.scheme.map(Into::into),
            grid,
        })
    }

    fn echo(&self, m: &mut serde_json::Map<String, Value>) {
        m.insert("tol_rel".into(), json!(self.tol_rel));
        m.insert("points".into(), json!(self.points));
        m.insert("convergence".into(), json!(!self.no_convergence));
        m.insert("mode".into(), json!(self.mode.name()));
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    model: Model,
    /// Levels to compare (default 3 for flat and spherical, all otherwise).
    #[arg(long)]
    levels: Option<usize>,
    /// Count oracle bound states where the algebra predicts none.
    #[arg(long)]
    probe_excluded: bool,
    /// Oracle grid "a,b,n".
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[command(flatten)]
    oracle: Oracle,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Quantity {
    /// Every discrete representation at each point.
    Reps,
    /// The representation labelled by j (or --nu).
    Classify,
    /// Bound-state energies.
    Spectrum,
    /// Oracle verification summary.
    Verify,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// flat | spherical | hyperbolic | rosen-morse
    #[arg(long)]
    family: Family,
    /// Fixed coupling when sweeping j.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "g_range")]
    g: Option<f64>,
    /// Fixed j when sweeping g.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "j_range")]
    j: Option<String>,
    /// Coupling range "lo:hi:count".
    #[arg(long, allow_hyphen_values = true, required_unless_present = "j_range")]
    g_range: Option<String>,
    /// j range "lo:hi:count".
    #[arg(long, allow_hyphen_values = true)]
    j_range: Option<String>,
    #[arg(long, value_enum, default_value = "reps")]
    quantity: Quantity,
    /// Label for --quantity classify (defaults to j).
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
    /// Largest finite label for --quantity reps.
    #[arg(long)]
    nu_max: Option<String>,
    /// Highest level index for --quantity spectrum.
    #[arg(long)]
    n_max: Option<usize>,
    /// Levels to compare for --quantity verify.
    #[arg(long)]
    levels: Option<usize>,
    #[command(flatten)]
    oracle: Oracle,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<bool, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// A real number, written either as "p/2" or as a decimal.
fn parse_real(s: &str) -> Result<f64, Failure> {
    if let Ok(h) = s.parse::<HalfInteger>() {
        return Ok(h.value());
    }
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(format!("cannot parse {s:?} as a number")))
}

/// Largest half-integer not above `s`.
fn parse_limit(s: &str) -> Result<HalfInteger, Failure> {
    let v = parse_real(s)?;
    Ok(HalfInteger::from_twice((2.0 * v).floor() as i64))
}

/// `lo:hi:count`, inclusive of both ends; a count of zero gives no points.
fn parse_range(s: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(invalid(format!("range must be \"lo:hi:count\", got {s:?}")));
    }
    let lo = parse_real(parts[0])?;
    let hi = parse_real(parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| invalid(format!("bad point count {:?} in range {s:?}", parts[2])))?;
    Ok(match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 })
            .collect(),
    })
}

fn parse_grid(spec: Option<&str>, family: Family) -> Result<Option<Grid>, Failure> {
    let Some(spec) = spec else { return Ok(None) };
    let grid = Grid::parse(spec)?;
    grid.check_within(family)?;
    Ok(Some(grid))
}

/// Kebab-case name of a serializable unit enum.
fn name_of<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn dim_text(d: Option<Dimension>) -> String {
    match d {
        Some(Dimension::Finite(n)) => n.to_string(),
        Some(Dimension::Infinite) => "infinite".into(),
        None => String::new(),
    }
}

struct Emitter<'a> {
    command: &'a str,
    common: &'a Common,
    default_format: Format,
    started: Instant,
}

impl Emitter<'_> {
    fn format(&self) -> Format {
        self.common.format.unwrap_or(self.default_format)
    }

    fn finish<P: Serialize>(
        &self,
        params: serde_json::Map<String, Value>,
        payload: P,
        warnings: Vec<String>,
        table: impl FnOnce(&P) -> Table,
    ) -> Result<(), Failure> {
        let run = self.common.verbose.then(|| {
            json!({
                "version": env!("CARGO_PKG_VERSION"),
                "elapsed_ms": self.started.elapsed().as_secs_f64() * 1e3,
                "threads": rayon::current_num_threads(),
            })
        });
        let bytes = match self.format() {
            Format::Json => json_bytes(&Envelope {
                schema_version: SCHEMA_VERSION,
                command: self.command,
                params: Value::Object(params),
                payload,
                warnings,
                run,
            })?,
            Format::Csv => {
                for w in &warnings {
                    eprintln!("warning: {w}");
                }
                if let Some(run) = run {
                    eprintln!("run: {run}");
                }
                table(&payload).to_bytes()?
            }
        };
        emit(&bytes, self.common.out.as_deref())?;
        Ok(())
    }
}

#[derive(Serialize)]
struct ClassifyPayload {
    representations: Vec<RepClass>,
    regions: Vec<Region>,
}

fn rep_row(r: &RepClass) -> Vec<String> {
    vec![
        name_of(&r.kind),
        float(r.nu),
        dim_text(r.dim),
        opt_float(r.energy),
        r.orbit.iter().map(|v| float(*v)).collect::<Vec<_>>().join(" "),
        r.orbit_truncated.to_string(),
        r.note.clone().unwrap_or_default(),
    ]
}

fn cmd_classify(a: &ClassifyArgs, out: &Emitter) -> CmdResult {
    // classification only reads the family and g
    let params = ModelParams::new(a.family, 0.5, a.g)?;
    let mut echo = serde_json::Map::new();
    echo.insert("family".into(), json!(a.family.cli_name()));
    echo.insert("g".into(), json!(a.g));
    let representations = if let Some(nu) = &a.nu {
        echo.insert("nu".into(), json!(nu));
        vec![representation::classify(&params, parse_real(nu)?)?]
    } else if let Some(range) = &a.nu_range {
        echo.insert("nu_range".into(), json!(range));
        parse_range(range)?
            .into_iter()
            .map(|nu| representation::classify(&params, nu))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let limit = a.nu_max.as_deref().map(parse_limit).transpose()?;
        if let Some(m) = &a.nu_max {
            echo.insert("nu_max".into(), json!(m));
        }
        representation::enumerate_discrete(&params, limit)?
    };
    let payload = ClassifyPayload {
        representations,
        regions: representation::regions(&params)?,
    };
    out.finish(echo, payload, Vec::new(), |p| {
        let mut t = Table::new(["kind", "nu", "dim", "energy", "orbit", "orbit_truncated", "note"]);
        for r in &p.representations {
            t.push(rep_row(r));
        }
        t
    })?;
    Ok(true)
}

fn spectrum_table(report: &SpectrumReport) -> Table {
    let mut t = Table::new(["n", "energy", "j_end"]);
    for l in &report.lines {
        t.push(vec![l.n.to_string(), float(l.energy), float(l.j_end)]);
    }
    t
}

fn spectrum_warnings(report: &SpectrumReport) -> Vec<String> {
    let mut w = Vec::new();
    if report.extension {
        w.push("extended mode: closed form applied away from quantized j".into());
    }
    if let (Some(top), Some(max)) = (report.n_top, report.n_max) {
        if max > top {
            w.push(format!("only {} bound states exist", top + 1));
        }
    }
    w
}

fn cmd_spectrum(a: &SpectrumArgs, out: &Emitter) -> CmdResult {
    let params = a.model.params()?;
    let report = representation::spectrum(&params, a.n_max, a.mode.into())?;
    let mut echo = a.model.echo();
    echo.insert("n_max".into(), json!(a.n_max));
    echo.insert("mode".into(), json!(a.mode.name()));
    let warnings = spectrum_warnings(&report);
    out.finish(echo, report, warnings, spectrum_table)?;
    Ok(true)
}

#[derive(Serialize)]
struct WavefunctionPayload {
    level: SpectrumLine,
    normalized: bool,
    /// Simpson norm of the emitted samples before any scaling.
    norm: f64,
    x: Vec<f64>,
    psi: Vec<f64>,
}

const WAVEFUNCTION_SAMPLES: usize = 1001;

fn cmd_wavefunction(a: &WavefunctionArgs, out: &Emitter) -> CmdResult {
    let params = a.model.params()?;
    let report = representation::spectrum(&params, Some(a.n), a.mode.into())?;
    let level = *report.lines.get(a.n).ok_or_else(|| {
        invalid(format!(
            "level n = {} does not exist; the last bound state is n = {}",
            a.n,
            report.lines.len().saturating_sub(1)
        ))
    })?;
    let bounds = match parse_grid(a.grid.as_deref(), params.family)? {
        Some(g) => {
            if g.n % 2 == 0 {
                return Err(invalid(format!(
                    "grid needs an odd interior count so the {} samples admit Simpson's rule",
                    g.n + 2
                )));
            }
            Bounds { a: g.a, b: g.b, points: g.n + 2 }
        }
        None => {
            let b = Bounds::for_levels(&params, a.n + 1)?;
            Bounds { points: WAVEFUNCTION_SAMPLES, ..b }
        }
    };
    let psi = ladder::rodrigues_chain(&params, a.n)?;
    let (psi, norm) = ladder::normalize(&psi, &bounds)?;
    let psi = if a.normalize { psi } else { psi.scaled(norm) };
    let (x, values) = ladder::sample(&psi, &bounds)?;
    let mut echo = a.model.echo();
    echo.insert("n".into(), json!(a.n));
    echo.insert("grid".into(), json!(a.grid));
    echo.insert("normalize".into(), json!(a.normalize));
    echo.insert("mode".into(), json!(a.mode.name()));
    let payload = WavefunctionPayload {
        level,
        normalized: a.normalize,
        norm,
        x,
        psi: values,
    };
    out.finish(echo, payload, spectrum_warnings(&report), |p| {
        let mut t = Table::new(["x", "psi"]);
        for (x, y) in p.x.iter().zip(&p.psi) {
            t.push(vec![float(*x), float(*y)]);
        }
        t
    })?;
    Ok(true)
}

#[derive(Serialize)]
struct PotentialPayload {
    x: Vec<f64>,
    potential: Vec<f64>,
    levels: Vec<SpectrumLine>,
}

const POTENTIAL_POINTS: usize = 400;

/// Default plotting window. The Rosen-Morse window is symmetric with
/// spacing 1/8 so that `x = 0` is a sample.
fn potential_grid(params: &ModelParams, levels: usize) -> Result<Grid, Failure> {
    let b = Bounds::for_levels(params, levels.max(1))?;
    Ok(match params.family {
        Family::RosenMorse => {
            let half = b.a.abs().max(b.b).min(40.0).ceil();
            Grid::new(-half, half, (16.0 * half) as usize - 1)?
        }
        _ => Grid::new(b.a, b.b, POTENTIAL_POINTS)?,
    })
}

fn cmd_potential(a: &PotentialArgs, out: &Emitter) -> CmdResult {
    let params = a.model.params()?;
    let mut warnings = Vec::new();
    let infinite = matches!(params.family, Family::FlatKepler | Family::SphericalKepler);
    let levels = if infinite && a.n_max.is_none() {
        warnings.push("no --n-max given: level lines omitted".to_string());
        Vec::new()
    } else {
        match representation::spectrum(&params, a.n_max, a.mode.into()) {
            Ok(r) => {
                warnings.extend(spectrum_warnings(&r));
                r.lines
            }
            Err(e) => {
                warnings.push(format!("no level lines: {e}"));
                Vec::new()
            }
        }
    };
    let grid = match parse_grid(a.grid.as_deref(), params.family)? {
        Some(g) => g,
        None => potential_grid(&params, levels.len())?,
    };
    let x: Vec<f64> = grid.interior().collect();
    let potential = x.iter().map(|&x| params.potential(x)).collect::<Result<Vec<_>, _>>()?;
    let mut echo = a.model.echo();
    echo.insert("grid".into(), json!(a.grid));
    echo.insert("n_max".into(), json!(a.n_max));
    echo.insert("mode".into(), json!(a.mode.name()));
    let payload = PotentialPayload { x, potential, levels };
    out.finish(echo, payload, warnings, |p| {
        let mut header = vec!["x".to_string(), "potential".to_string()];
        header.extend(p.levels.iter().map(|l| format!("E_{}", l.n)));
        let mut t = Table::new(header);
        for (x, v) in p.x.iter().zip(&p.potential) {
            let mut row = vec![float(*x), float(*v)];
            row.extend(p.levels.iter().map(|l| float(l.energy)));
            t.push(row);
        }
        t
    })?;
    Ok(true)
}

fn default_levels(family: Family, levels: Option<usize>) -> Option<usize> {
    match family {
        Family::FlatKepler | Family::SphericalKepler => Some(levels.unwrap_or(3)),
        _ => levels,
    }
}

fn max_rel_delta(r: &VerificationReport) -> Option<f64> {
    r.levels.iter().filter_map(|l| l.rel_delta).reduce(f64::max)
}

fn verify_table(r: &VerificationReport) -> Table {
    let mut t = Table::new(["check", "n", "algebraic", "numeric", "abs_delta", "rel_delta", "ratio", "pass"]);
    for l in &r.levels {
        let ratio = r.convergence.iter().find(|c| c.n == l.n).map(|c| c.ratio);
        t.push(vec![
            "level".into(),
            l.n.to_string(),
            float(l.algebraic),
            opt_float(l.numeric),
            opt_float(l.abs_delta),
            opt_float(l.rel_delta),
            opt_float(ratio),
            l.pass.to_string(),
        ]);
    }
    if let Some(c) = &r.count {
        t.push(vec![
            "count".into(),
            String::new(),
            c.algebraic.to_string(),
            c.numeric.to_string(),
            String::new(),
            String::new(),
            String::new(),
            c.pass.to_string(),
        ]);
    }
    t
}

fn cmd_verify(a: &VerifyArgs, out: &Emitter) -> CmdResult {
    let params = a.model.params()?;
    let grid = parse_grid(a.grid.as_deref(), params.family)?;
    let opts = a.oracle.options(grid)?;
    let report = if a.probe_excluded {
        oracle::verify_excluded(&params, &opts)?
    } else {
        oracle::verify(&params, default_levels(params.family, a.levels), &opts)?
    };
    let mut echo = a.model.echo();
    echo.insert("levels".into(), json!(a.levels));
    echo.insert("probe_excluded".into(), json!(a.probe_excluded));
    echo.insert("grid".into(), json!(a.grid));
    a.oracle.echo(&mut echo);
    let pass = report.pass;
    let warnings = report.warnings.clone();
    out.finish(echo, report, warnings, verify_table)?;
    Ok(pass)
}

#[derive(Debug, Clone, Default, Serialize)]
struct SweepRow {
    g: f64,
    j: Option<f64>,
    kind: Option<RepKind>,
    nu: Option<f64>,
    dim: Option<Dimension>,
    n: Option<usize>,
    energy: Option<f64>,
    pass: Option<bool>,
    max_rel_delta: Option<f64>,
    status: String,
}

impl SweepRow {
    fn at(g: f64, j: Option<f64>) -> Self {
        Self { g, j, status: "ok".into(), ..Self::default() }
    }

    fn from_rep(g: f64, j: Option<f64>, r: &RepClass) -> Self {
        Self {
            kind: Some(r.kind),
            nu: Some(r.nu),
            dim: r.dim,
            energy: r.energy,
            ..Self::at(g, j)
        }
    }

    fn cells(&self) -> Vec<String> {
        vec![
            float(self.g),
            opt_float(self.j),
            self.kind.map(|k| name_of(&k)).unwrap_or_default(),
            opt_float(self.nu),
            dim_text(self.dim),
            self.n.map(|n| n.to_string()).unwrap_or_default(),
            opt_float(self.energy),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
            opt_float(self.max_rel_delta),
            self.status.clone(),
        ]
    }
}

const SWEEP_HEADER: [&str; 10] = ["g", "j", "kind", "nu", "dim", "n", "energy", "pass", "max_rel_delta", "status"];

/// Exact half-integer backing when the swept value lands on one.
fn sweep_params(family: Family, j: f64, g: f64) -> Result<ModelParams, Error> {
    match HalfInteger::from_f64_exact(j) {
        Some(h) => ModelParams::with_half_integer(family, h, g),
        None => ModelParams::new(family, j, g),
    }
}

struct SweepPlan {
    family: Family,
    quantity: Quantity,
    nu: Option<f64>,
    nu_max: Option<HalfInteger>,
    n_max: Option<usize>,
    levels: Option<usize>,
    mode: SpectrumMode,
    opts: VerifyOptions,
}

impl SweepPlan {
    /// Every point yields at least one row; failures land in `status`.
    fn rows(&self, g: f64, j: Option<f64>) -> Vec<SweepRow> {
        match self.try_rows(g, j) {
            Ok(rows) if rows.is_empty() => {
                vec![SweepRow { status: "no discrete representation".into(), ..SweepRow::at(g, j) }]
            }
            Ok(rows) => rows,
            Err(e) => vec![SweepRow { status: e.to_string(), ..SweepRow::at(g, j) }],
        }
    }

    fn try_rows(&self, g: f64, j: Option<f64>) -> Result<Vec<SweepRow>, Error> {
        let params = sweep_params(self.family, j.unwrap_or(0.5), g)?;
        Ok(match self.quantity {
            Quantity::Reps => representation::enumerate_discrete(&params, self.nu_max)?
                .iter()
                .map(|r| SweepRow::from_rep(g, j, r))
                .collect(),
            Quantity::Classify => {
                let nu = self.nu.unwrap_or(params.j);
                vec![SweepRow::from_rep(g, j, &representation::classify(&params, nu)?)]
            }
            Quantity::Spectrum => representation::spectrum(&params, self.n_max, self.mode)?
                .lines
                .iter()
                .map(|l| SweepRow { n: Some(l.n), energy: Some(l.energy), ..SweepRow::at(g, j) })
                .collect(),
            Quantity::Verify => {
                let r = oracle::verify(&params, self.levels, &self.opts)?;
                vec![SweepRow {
                    n: Some(r.levels.len()),
                    pass: Some(r.pass),
                    max_rel_delta: max_rel_delta(&r),
                    ..SweepRow::at(g, j)
                }]
            }
        })
    }
}

fn cmd_sweep(a: &SweepArgs, out: &Emitter) -> CmdResult {
    let infinite = matches!(a.family, Family::FlatKepler | Family::SphericalKepler);
    match a.quantity {
        Quantity::Reps if infinite && a.nu_max.is_none() => {
            return Err(invalid(format!("{} has infinitely many representations; give --nu-max", a.family)));
        }
        Quantity::Spectrum if infinite && a.n_max.is_none() => {
            return Err(invalid(format!("{} has infinitely many levels; give --n-max", a.family)));
        }
        _ => {}
    }
    let needs_j = matches!(a.quantity, Quantity::Spectrum | Quantity::Verify)
        || (a.quantity == Quantity::Classify && a.nu.is_none());
    let points: Vec<(f64, Option<f64>)> = match (&a.g_range, &a.j_range) {
        (Some(_), Some(_)) => return Err(invalid("give either --g-range or --j-range, not both")),
        (Some(range), None) => {
            let j = a.j.as_deref().map(parse_real).transpose()?;
            if needs_j && j.is_none() {
                return Err(invalid("--j is required for this quantity"));
            }
            parse_range(range)?.into_iter().map(|g| (g, j)).collect()
        }
        (None, Some(range)) => {
            let g = a.g.ok_or_else(|| invalid("--g is required with --j-range"))?;
            parse_range(range)?.into_iter().map(|j| (g, Some(j))).collect()
        }
        (None, None) => return Err(invalid("give --g-range or --j-range")),
    };
    let plan = SweepPlan {
        family: a.family,
        quantity: a.quantity,
        nu: a.nu.as_deref().map(parse_real).transpose()?,
        nu_max: a.nu_max.as_deref().map(parse_limit).transpose()?,
        n_max: a.n_max,
        levels: default_levels(a.family, a.levels),
        mode: a.oracle.mode.into(),
        opts: a.oracle.options(None)?,
    };
    let rows: Vec<SweepRow> = points
        .par_iter()
        .map(|&(g, j)| plan.rows(g, j))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let pass = rows.iter().all(|r| r.pass != Some(false));

    let mut echo = serde_json::Map::new();
    echo.insert("family".into(), json!(a.family.cli_name()));
    echo.insert("g".into(), json!(a.g));
    echo.insert("j".into(), json!(a.j));
    echo.insert("g_range".into(), json!(a.g_range));
    echo.insert("j_range".into(), json!(a.j_range));
    echo.insert("quantity".into(), json!(name_of(&QuantityName(a.quantity))));
    if a.quantity == Quantity::Verify {
        a.oracle.echo(&mut echo);
    }
    out.finish(echo, rows, Vec::new(), |rows| {
        let mut t = Table::new(SWEEP_HEADER);
        for r in rows {
            t.push(r.cells());
        }
        t
    })?;
    Ok(pass)
}

struct QuantityName(Quantity);

impl Serialize for QuantityName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0.to_possible_value().expect("no skipped variants");
        s.serialize_str(v.get_name())
    }
}

fn run(cli: &Cli) -> CmdResult {
    let started = Instant::now();
    let emitter = |command, common, default_format| Emitter { command, common, default_format, started };
    match &cli.command {
        Command::Classify(a) => cmd_classify(a, &emitter("classify", &a.common, Format::Json)),
        Command::Spectrum(a) => cmd_spectrum(a, &emitter("spectrum", &a.common, Format::Json)),
        Command::Wavefunction(a) => cmd_wavefunction(a, &emitter("wavefunction", &a.common, Format::Json)),
        Command::Potential(a) => cmd_potential(a, &emitter("potential", &a.common, Format::Json)),
        Command::Verify(a) => cmd_verify(a, &emitter("verify", &a.common, Format::Json)),
        Command::Sweep(a) => cmd_sweep(a, &emitter("sweep", &a.common, Format::Csv)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("potalg: verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("potalg: error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        // a closed downstream pipe (e.g. `| head`) is not an error
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("potalg: i/o error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}
