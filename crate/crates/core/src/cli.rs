//! Command-line front end: verification suites, simulations, densities.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or config error, 3 numerical
//! failure (NaN or blow-up where the run forbids it).

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::density::generate_densities;
use crate::diagnostics::{profile_report, write_profile_csv};
use crate::error::{Error, Result};
use crate::example::{build_example, ExampleParams};
use crate::functionals::conserved;
use crate::gauge::gauge_transform;
use crate::integrator::{simulate, write_snapshot, Equation, SimConfig, Termination, TimeStep, DEFAULT_CFL};
use crate::solitons::{standing_wave, SolitonParams};
use crate::spectral::{Grid, GridFunction};
use crate::suites::{self, Check, Suite};

pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Parser)]
#[command(name = "dnls", version, about = "Derivative NLS verification workbench")]
pub struct Cli {
    /// Directory for manifest, CSV and JSON output (created fresh).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Integrate the equation from a key-value config file.
    Simulate { config: PathBuf },
    /// Print Z(1) … Z(N) in canonical text form.
    Densities {
        #[arg(value_parser = clap::value_parser!(u64).range(1..=15))]
        n: u64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Serialize)]
struct Summary<'a, T: Serialize> {
    suite: &'a str,
    checks: &'a [Check],
    wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<T>,
}

/// Output directory written under a temporary name and renamed into place
/// once complete.
struct Output {
    staging: PathBuf,
    target: PathBuf,
}

impl Output {
    fn open(target: &Path, manifest: &RunManifest) -> Result<Self> {
        if target.exists() {
            return Err(Error::Config(format!("output directory {} already exists", target.display())));
        }
        let name = target.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
        let staging = target.with_file_name(format!(".{name}.partial-{}", std::process::id()));
        fs::create_dir_all(&staging)?;
        let out = Self { staging, target: target.to_path_buf() };
        out.write("manifest.json", |w| serde_json::to_writer_pretty(w, manifest).map_err(json_err))?;
        Ok(out)
    }

    fn write(&self, name: &str, body: impl FnOnce(&mut BufWriter<fs::File>) -> Result<()>) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(self.staging.join(name))?);
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn commit(self) -> Result<()> {
        fs::rename(&self.staging, &self.target)?;
        Ok(())
    }
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn manifest(cli: &Cli, subcommand: &str, config: Option<PathBuf>) -> RunManifest {
    RunManifest {
        subcommand: subcommand.to_string(),
        config,
        output_dir: cli.out.clone(),
        seed: cli.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parameter(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

/// Runs the parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Verify { suite } => cmd_verify(&cli, *suite),
        Command::Simulate { config } => cmd_simulate(&cli, config),
        Command::Densities { n } => cmd_densities(&cli, *n as usize),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn cmd_verify(cli: &Cli, suite: Suite) -> Result<i32> {
    let out = cli.out.as_deref().map(|d| Output::open(d, &manifest(cli, "verify", None))).transpose()?;
    let report = suites::run(suite, cli.seed)?;
    for c in &report.checks {
        println!("{c}");
    }
    let passed = report.checks.iter().filter(|c| c.pass).count();
    println!("{}: {passed}/{} checks passed in {:.2} s", suite, report.checks.len(), report.wall_time);
    if let Some(out) = out {
        let summary = Summary { suite: suite.name(), checks: &report.checks, wall_time: report.wall_time, details: report.details.as_ref() };
        out.write("summary.json", |w| serde_json::to_writer_pretty(w, &summary).map_err(json_err))?;
        out.commit()?;
    }
    Ok(if report.passed() {
        0
    } else if report.numerical_failure() {
        3
    } else {
        1
    })
}

pub fn cmd_densities(cli: &Cli, n: usize) -> Result<i32> {
    if n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    let out = cli.out.as_deref().map(|d| Output::open(d, &manifest(cli, "densities", None))).transpose()?;
    let z = generate_densities(n)?;
    let text: String = z.iter().map(|d| format!("{d}\n")).collect();
    print!("{text}");
    if let Some(out) = out {
        out.write("densities.txt", |w| Ok(w.write_all(text.as_bytes())?))?;
        out.commit()?;
    }
    Ok(0)
}

/// Flat `section.key = value` map from an INI-like file.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(s) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = s.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {raw:?}", i + 1)))?;
            let key = if section.is_empty() { k.trim().to_string() } else { format!("{section}.{}", k.trim()) };
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {key}", i + 1)));
            }
        }
        Ok(Self { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}"))))
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.num(key)?.ok_or_else(|| Error::Config(format!("missing key {key}")))
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(Error::Config(format!("{key}: expected a boolean, got {v:?}"))),
        }
    }
}

/// Initial data: constructor name followed by `key=value` parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Soliton { omega: f64, c: f64 },
    Algebraic { c: f64 },
    GaugedSoliton { nu: f64, omega: f64, c: f64 },
    Example { k: u32, eps0: f64 },
    File { path: PathBuf },
}

impl InitialData {
    pub fn parse(spec: &str) -> Result<Self> {
        let mut tokens = spec.split_whitespace();
        let name = tokens.next().ok_or_else(|| Error::Config("empty initial data".into()))?;
        let mut params = BTreeMap::new();
        for t in tokens {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::Config(format!("initial data parameter {t:?} is not key=value")))?;
            params.insert(k.to_string(), v.to_string());
        }
        let take = |k: &str| -> Result<f64> {
            params
                .get(k)
                .ok_or_else(|| Error::Config(format!("initial data {name} needs {k}")))?
                .parse()
                .map_err(|_| Error::Config(format!("initial data {name}: bad {k}")))
        };
        let data = match name {
            "soliton" => InitialData::Soliton { omega: take("omega")?, c: take("c")? },
            "algebraic" => InitialData::Algebraic { c: take("c")? },
            "gauged-soliton" => InitialData::GaugedSoliton { nu: take("nu")?, omega: take("omega")?, c: take("c")? },
            "example" => InitialData::Example { k: take("k")? as u32, eps0: take("eps0")? },
            "file" => InitialData::File {
                path: params.get("path").ok_or_else(|| Error::Config("initial data file needs path".into()))?.into(),
            },
            other => return Err(Error::Config(format!("unknown initial data constructor {other:?}"))),
        };
        Ok(data)
    }

    pub fn build(&self, grid: &Grid, base: &Path) -> Result<GridFunction> {
        match self {
            InitialData::Soliton { omega, c } => standing_wave(SolitonParams::new(*omega, *c)?, 0.0, grid),
            InitialData::Algebraic { c } => standing_wave(SolitonParams::algebraic(*c)?, 0.0, grid),
            InitialData::GaugedSoliton { nu, omega, c } => {
                gauge_transform(&standing_wave(SolitonParams::new(*omega, *c)?, 0.0, grid)?, *nu)
            }
            InitialData::Example { k, eps0 } => Ok(build_example(ExampleParams::new(*k, *eps0)?, grid)?.0),
            InitialData::File { path } => read_snapshot(&base.join(path), grid),
        }
    }
}

/// Reads the `x,re,im` columns written by [`write_snapshot`].
pub fn read_snapshot(path: &Path, grid: &Grid) -> Result<GridFunction> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Config(format!("{}: line {} is not numeric", path.display(), i + 1)))?;
        if cols.len() != 3 {
            return Err(Error::Config(format!("{}: line {} needs 3 columns", path.display(), i + 1)));
        }
        values.push(Complex64::new(cols[1], cols[2]));
    }
    if values.len() != grid.len() {
        return Err(Error::Config(format!("{}: {} samples for a grid of {}", path.display(), values.len(), grid.len())));
    }
    GridFunction::new(grid.clone(), values)
}

/// A parsed simulation config.
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    pub sim: SimConfig,
    pub initial: InitialData,
    pub drift_tolerance: f64,
    /// Wave speed c for the profile diagnostics, if requested.
    pub profile: Option<f64>,
}

impl SimulationSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        let grid = Grid::new(kv.required("grid.half_width")?, kv.required("grid.points")?)?;
        let equation = match kv.get("equation.kind").unwrap_or("original") {
            "original" => Equation::Original,
            "gauged" => Equation::Gauged(kv.required("equation.nu")?),
            other => return Err(Error::Config(format!("equation.kind: unknown {other:?}"))),
        };
        let t_end: f64 = kv.required("run.t_end")?;
        let dt = match kv.get("run.dt") {
            Some("adaptive") => TimeStep::Adaptive {
                dt_max: kv.required("run.dt_max")?,
                cfl: kv.num("run.cfl")?.unwrap_or(DEFAULT_CFL),
            },
            Some(_) => TimeStep::Fixed(kv.required("run.dt")?),
            None => return Err(Error::Config("missing key run.dt".into())),
        };
        let mut sim = SimConfig::new(equation, grid, 1.0, t_end);
        sim.dt = dt;
        sim.record_every = kv.num("run.record_every")?.unwrap_or(sim.record_every);
        sim.blowup_threshold = kv.num("run.blowup_threshold")?;
        sim.dealias = kv.flag("run.dealias", true)?;
        sim.track_densities = kv.num("run.track_densities")?.unwrap_or(0);
        let profile = if kv.flag("diagnostics.profile", false)? { Some(kv.num("diagnostics.c")?.unwrap_or(1.0)) } else { None };
        sim.keep_snapshots = profile.is_some();
        let initial = InitialData::parse(kv.get("initial.data").ok_or_else(|| Error::Config("missing initial-data spec (initial.data)".into()))?)?;
        sim.validate()?;
        Ok(Self { sim, initial, drift_tolerance: kv.num("run.drift_tolerance")?.unwrap_or(1e-7), profile })
    }
}

#[derive(Debug, Clone, Serialize)]
struct SimulationDetails {
    termination: Termination,
    steps: usize,
    final_time: f64,
    max_drift: [f64; 5],
    p1_initial: f64,
}

pub fn cmd_simulate(cli: &Cli, config: &Path) -> Result<i32> {
    let text = fs::read_to_string(config).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
    let spec = SimulationSpec::parse(&text)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let initial = spec.initial.build(&spec.sim.grid, base)?;
    let out = cli.out.as_deref().map(|d| Output::open(d, &manifest(cli, "simulate", Some(config.to_path_buf())))).transpose()?;

    let start = Instant::now();
    let traj = simulate(&spec.sim, &initial)?;
    let wall_time = start.elapsed().as_secs_f64();

    let names = ["mass", "E1", "P1", "E2", "P2"];
    let drift = traj.max_drift();
    let mut checks: Vec<Check> =
        names.iter().zip(drift).map(|(n, d)| Check::new(format!("drift {n}"), d, 0.0, spec.drift_tolerance, suites::Tolerance::Upper)).collect();
    let first = &traj.frames[0].report.values;
    if let InitialData::Example { k, eps0 } = spec.initial {
        let (_, r) = build_example(ExampleParams::new(k, eps0)?, &spec.sim.grid)?;
        checks.push(Check::abs("P1 at t = 0 against the example builder", first.p1, r.p1_grid, 1e-10));
    }
    if matches!(spec.sim.equation, Equation::Original) {
        checks.push(Check::abs("P1 at t = 0 recomputed", first.p1, conserved(&initial).p1, 0.0));
    }
    for c in &checks {
        println!("{c}");
    }
    let last = traj.frames.last().map(|f| f.time).unwrap_or(0.0);
    println!("termination {:?} after {} steps, t = {last}, wall time {wall_time:.2} s", traj.termination, traj.steps);

    if let Some(out) = out {
        out.write("trajectory.csv", |w| traj.write_csv(w))?;
        out.write("final_state.csv", |w| write_snapshot(&traj.last_state, w))?;
        if let Some(c) = spec.profile {
            let records = profile_report(&traj, c);
            out.write("profile.csv", |w| write_profile_csv(&records, w))?;
        }
        let details = SimulationDetails {
            termination: traj.termination,
            steps: traj.steps,
            final_time: last,
            max_drift: drift,
            p1_initial: first.p1,
        };
        let summary = Summary { suite: "simulate", checks: &checks, wall_time, details: Some(details) };
        out.write("summary.json", |w| serde_json::to_writer_pretty(w, &summary).map_err(json_err))?;
        out.commit()?;
    }
    if !matches!(traj.termination, Termination::Completed) {
        return Ok(3);
    }
    Ok(if checks.iter().all(|c| c.pass) { 0 } else { 1 })
}
