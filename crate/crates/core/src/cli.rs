//! Command-line front end. Every command is a thin wrapper over the library;
//! [`run`] is what the binary calls and what the tests drive in-process.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bound::error_bound;
use crate::error::{Error, Result};
use crate::experiment::{
    summarize, write_csv, DataSynthesis, Experiment, ProfileKind, TruthProfile,
};
use crate::forward::{fd_oracle_solve, solve_forward};
use crate::grid::{default_mode_count, l2_norm, ProblemConfig, SampledFunction, TimeGrid};
use crate::operator::{assemble_operator, OperatorMatrix};
use crate::tikhonov::{DiscrepancyOptions, TikhonovSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Everything a command may need. Loaded from a config file, then
/// overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub x0: f64,
    pub t0: f64,
    pub m: usize,
    /// Mode count; the grid-dependent default when absent.
    pub n_modes: Option<usize>,
    pub r1: f64,
    pub profile: ProfileKind,
    pub fraction: f64,
    /// Sweep noise levels, relative to the clean data norm.
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Generate clean data with the finite-difference solver.
    pub oracle_forward: bool,
    pub fd_space_steps: usize,
    pub out: Option<PathBuf>,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self {
            x0: 0.5,
            t0: 1.0,
            m: 800,
            n_modes: None,
            r1: 1.0,
            profile: ProfileKind::PolyBump,
            fraction: 1.0,
            deltas: vec![1e-1, 1e-2, 1e-3, 1e-4],
            seeds: vec![0, 1, 2, 3, 4],
            oracle_forward: false,
            fd_space_steps: 400,
            out: None,
        }
    }
}

impl CliConfig {
    pub fn problem(&self) -> Result<ProblemConfig> {
        let grid = TimeGrid::new(self.t0, self.m)?;
        let cfg = ProblemConfig {
            x0: self.x0,
            t0: self.t0,
            m: self.m,
            n_modes: self
                .n_modes
                .unwrap_or_else(|| default_mode_count(grid.dt())),
            r1: self.r1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn truth_profile(&self) -> Result<TruthProfile> {
        TruthProfile::new(self.profile, self.fraction)
    }

    pub fn synthesis(&self) -> DataSynthesis {
        if self.oracle_forward {
            DataSynthesis::FiniteDifference {
                space_steps: self.fd_space_steps,
            }
        } else {
            DataSynthesis::RefinedSeries
        }
    }

    /// Parses either JSON (text starting with `{`) or `key = value` lines.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text)
                .map_err(|e| Error::InvalidParameter(format!("config: {e}")));
        }
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("config line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| Error::InvalidParameter(format!("config line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("cannot parse '{v}'"))
        }
        fn list<T: std::str::FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
            v.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| num(s.trim()))
                .collect()
        }
        match key {
            "x0" => self.x0 = num(value)?,
            "t0" => self.t0 = num(value)?,
            "m" => self.m = num(value)?,
            "n_modes" => {
                self.n_modes = if value.is_empty() {
                    None
                } else {
                    Some(num(value)?)
                }
            }
            "r1" => self.r1 = num(value)?,
            "profile" => self.profile = value.parse().map_err(|e: Error| e.to_string())?,
            "fraction" => self.fraction = num(value)?,
            "deltas" => self.deltas = list(value)?,
            "seeds" => self.seeds = list(value)?,
            "oracle_forward" => self.oracle_forward = num(value)?,
            "fd_space_steps" => self.fd_space_steps = num(value)?,
            "out" => {
                self.out = if value.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// `key = value` rendering; floats use the shortest round-tripping form.
    pub fn to_key_value(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        s += &format!("x0 = {:?}\n", self.x0);
        s += &format!("t0 = {:?}\n", self.t0);
        s += &format!("m = {}\n", self.m);
        s += &format!(
            "n_modes = {}\n",
            self.n_modes.map(|n| n.to_string()).unwrap_or_default()
        );
        s += &format!("r1 = {:?}\n", self.r1);
        s += &format!("profile = {}\n", self.profile);
        s += &format!("fraction = {:?}\n", self.fraction);
        s += &format!(
            "deltas = {}\n",
            join(self.deltas.iter().map(|d| format!("{d:?}")).collect())
        );
        s += &format!(
            "seeds = {}\n",
            join(self.seeds.iter().map(|d| d.to_string()).collect())
        );
        s += &format!("oracle_forward = {}\n", self.oracle_forward);
        s += &format!("fd_space_steps = {}\n", self.fd_space_steps);
        s += &format!(
            "out = {}\n",
            self.out
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        );
        s
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "heatback",
    version,
    about = "Reconstruct a boundary temperature history from an interior sensor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the temperature trace at one location
    Forward {
        #[command(flatten)]
        common: Common,
        /// Boundary history CSV (t,value); the configured profile if absent
        #[arg(long)]
        input: Option<PathBuf>,
        /// Location, defaults to the sensor position
        #[arg(long)]
        x: Option<f64>,
    },
    /// Reconstruct the boundary history from sensor data
    Invert {
        #[command(flatten)]
        common: Common,
        /// Sensor data CSV (t,value)
        #[arg(long)]
        input: PathBuf,
        /// Absolute noise level
        #[arg(long)]
        delta: f64,
        /// Operator cache written by dump-operator
        #[arg(long)]
        operator: Option<PathBuf>,
    },
    /// Print the a-priori error estimate as JSON
    Bound {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        r1: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        x0: f64,
    },
    /// Run a reconstruction sweep over noise levels and seeds
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Single relative noise level, replacing the configured list
        #[arg(long)]
        delta: Option<f64>,
        /// Single seed, replacing the configured list
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        operator: Option<PathBuf>,
    },
    /// Write the assembled operator matrix cache
    DumpOperator {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Config file, key = value lines or JSON
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n_modes: Option<usize>,
    #[arg(long)]
    r1: Option<f64>,
    #[arg(long)]
    profile: Option<ProfileKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generate clean data with the finite-difference solver
    #[arg(long)]
    oracle_forward: bool,
}

impl Common {
    fn resolve(&self) -> Result<CliConfig> {
        let mut cfg = match &self.config {
            Some(p) => CliConfig::load(p)?,
            None => CliConfig::default(),
        };
        if let Some(v) = self.x0 {
            cfg.x0 = v;
        }
        if let Some(v) = self.t0 {
            cfg.t0 = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if self.n_modes.is_some() {
            cfg.n_modes = self.n_modes;
        }
        if let Some(v) = self.r1 {
            cfg.r1 = v;
        }
        if let Some(v) = self.profile {
            cfg.profile = v;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        cfg.oracle_forward |= self.oracle_forward;
        Ok(cfg)
    }
}

impl clap::ValueEnum for ProfileKind {
    fn value_variants<'a>() -> &'a [Self] {
        &Self::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::InvalidParameter(_)
        | Error::Domain { .. }
        | Error::GridTooCoarse { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidMode(_)
        | Error::BadCache(_) => EXIT_USAGE,
        Error::KernelSingularity(_)
        | Error::NonPositiveAlpha(_)
        | Error::Singular(_)
        | Error::NoiseDominates { .. }
        | Error::ResidualFloor { .. }
        | Error::BracketingFailed(_) => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    configure_threads(stderr);
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads(stderr: &mut dyn Write) {
    if let Ok(v) = std::env::var("HEATBACK_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // fails harmlessly if the pool is already up
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                let _ = writeln!(stderr, "warning: ignoring HEATBACK_THREADS={v}");
            }
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Forward { common, input, x } => {
            cmd_forward(&common.resolve()?, input.as_deref(), x, stdout)
        }
        Command::Invert {
            common,
            input,
            delta,
            operator,
        } => cmd_invert(
            &common.resolve()?,
            &input,
            delta,
            operator.as_deref(),
            stdout,
            stderr,
        ),
        Command::Bound { delta, r1, x0 } => cmd_bound(delta, r1, x0, stdout),
        Command::Sweep {
            common,
            delta,
            seed,
            operator,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(d) = delta {
                cfg.deltas = vec![d];
            }
            if let Some(s) = seed {
                cfg.seeds = vec![s];
            }
            cmd_sweep(&cfg, operator.as_deref(), stdout)
        }
        Command::DumpOperator { common } => cmd_dump_operator(&common.resolve()?),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Runs `body` against the configured output file, or `stdout` if none.
fn with_output(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| io_err(p, e))?);
            body(&mut w)?;
            w.flush().map_err(|e| io_err(p, e))
        }
        None => body(stdout),
    }
}

/// Writes `t,value` rows with round-tripping precision.
pub fn write_series(f: &SampledFunction, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "t,value")?;
    for (i, v) in f.values().iter().enumerate() {
        writeln!(out, "{:.16e},{:.16e}", f.grid().t(i), v)?;
    }
    Ok(())
}

/// Reads `t,value` rows (optional header) and checks them against `grid`.
pub fn parse_series(text: &str, grid: TimeGrid) -> Result<SampledFunction> {
    let bad = |n: usize, what: &str| Error::InvalidParameter(format!("CSV line {n}: {what}"));
    let mut values = Vec::with_capacity(grid.len());
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (k == 0 && line.eq_ignore_ascii_case("t,value")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(bad(k + 1, "expected two columns"));
        }
        let t: f64 = cols[0].parse().map_err(|_| bad(k + 1, "bad time"))?;
        let v: f64 = cols[1].parse().map_err(|_| bad(k + 1, "bad value"))?;
        let i = values.len();
        if i >= grid.len() || (t - grid.t(i)).abs() > 1e-9 * grid.t0() {
            return Err(bad(k + 1, "time does not match the configured grid"));
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    SampledFunction::new(grid, values)
}

fn read_series(path: &Path, grid: TimeGrid) -> Result<SampledFunction> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_series(&text, grid)
}

fn load_operator(path: Option<&Path>, cfg: &ProblemConfig) -> Result<OperatorMatrix> {
    match path {
        Some(p) => OperatorMatrix::read_cache(
            BufReader::new(File::open(p).map_err(|e| io_err(p, e))?),
            cfg,
        ),
        None => assemble_operator(cfg),
    }
}

pub fn cmd_forward(
    cfg: &CliConfig,
    input: Option<&Path>,
    x: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let problem = cfg.problem()?;
    let h = match input {
        Some(p) => read_series(p, problem.grid())?,
        None => crate::experiment::generate_truth(&cfg.truth_profile()?, &problem)?,
    };
    let x = x.unwrap_or(problem.x0);
    let trace = if cfg.oracle_forward {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                value: x,
                domain: "0 <= x <= 1",
            });
        }
        fd_oracle_solve(&h, cfg.fd_space_steps, &problem)?.trace_at(x)?
    } else {
        solve_forward(&h, x, &problem)?
    };
    with_output(cfg.out.as_deref(), stdout, |w| write_series(&trace, w))?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionSummary {
    pub delta: f64,
    pub alpha: Option<f64>,
    pub residual: Option<f64>,
    pub bound: f64,
    pub asymptotic_valid: bool,
    pub converged: bool,
    pub warning: Option<String>,
}

pub fn cmd_invert(
    cfg: &CliConfig,
    input: &Path,
    delta: f64,
    operator: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let problem = cfg.problem()?;
    let f = read_series(input, problem.grid())?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            value: delta,
            domain: "delta > 0",
        });
    }
    let bound = error_bound(delta, problem.r1, problem.x0)?;
    let op = load_operator(operator, &problem)?;
    let sys = TikhonovSystem::new(&op)?;
    let (h, summary, code) = match sys.select_alpha(&f, delta, &DiscrepancyOptions::default()) {
        Ok(sol) => (
            sol.h,
            InversionSummary {
                delta,
                alpha: Some(sol.alpha),
                residual: Some(sol.residual),
                bound: bound.bound,
                asymptotic_valid: bound.asymptotic_valid,
                converged: sol.converged,
                warning: None,
            },
            EXIT_OK,
        ),
        Err(e @ Error::NoiseDominates { .. }) => {
            writeln!(stderr, "warning: {e}; writing the zero reconstruction")?;
            (
                SampledFunction::zeros(problem.grid()),
                InversionSummary {
                    delta,
                    alpha: None,
                    residual: None,
                    bound: bound.bound,
                    asymptotic_valid: bound.asymptotic_valid,
                    converged: false,
                    warning: Some(e.to_string()),
                },
                EXIT_NUMERICAL,
            )
        }
        Err(e) => return Err(e),
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    match cfg.out.as_deref() {
        Some(p) => {
            with_output(Some(p), stdout, |w| write_series(&h, w))?;
            writeln!(stdout, "{json}")?;
        }
        None => {
            write_series(&h, stdout)?;
            writeln!(stderr, "{json}")?;
        }
    }
    Ok(code)
}

pub fn cmd_bound(delta: f64, r1: f64, x0: f64, stdout: &mut dyn Write) -> Result<i32> {
    let report = error_bound(delta, r1, x0)?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    writeln!(stdout, "{json}")?;
    Ok(EXIT_OK)
}

/// Path of the summary written next to a sweep CSV.
pub fn summary_path(csv: &Path) -> PathBuf {
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv.with_file_name(format!("{stem}.summary.json"))
}

pub fn cmd_sweep(cfg: &CliConfig, operator: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    if cfg.deltas.is_empty() || cfg.seeds.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one delta and one seed".into(),
        ));
    }
    let problem = cfg.problem()?;
    let op = load_operator(operator, &problem)?;
    let exp = Experiment::with_operator(&problem, &cfg.truth_profile()?, cfg.synthesis(), op)?;
    let scale = l2_norm(exp.clean_data());
    let deltas: Vec<f64> = cfg.deltas.iter().map(|d| d * scale).collect();
    let records = exp.sweep(&deltas, &cfg.seeds)?;
    let summary = summarize(&records);
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    match cfg.out.as_deref() {
        Some(p) => {
            with_output(Some(p), stdout, |w| write_csv(&records, w))?;
            let sp = summary_path(p);
            fs::write(&sp, format!("{json}\n")).map_err(|e| io_err(&sp, e))?;
        }
        None => write_csv(&records, stdout)?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_dump_operator(cfg: &CliConfig) -> Result<i32> {
    let path = cfg
        .out
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("dump-operator needs --out".into()))?;
    let op = assemble_operator(&cfg.problem()?)?;
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
    op.write_cache(&mut w)?;
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_value_round_trip() {
        let mut c = CliConfig {
            x0: 0.3,
            t0: 2.5,
            m: 123,
            n_modes: Some(321),
            r1: 1.0 / 3.0,
            profile: ProfileKind::SineBump,
            fraction: 0.7,
            deltas: vec![1e-2, 3.3e-5],
            seeds: vec![9, 1],
            oracle_forward: true,
            fd_space_steps: 64,
            out: Some(PathBuf::from("runs/a.csv")),
        };
        assert_eq!(CliConfig::parse(&c.to_key_value()).unwrap(), c);
        c.n_modes = None;
        c.out = None;
        assert_eq!(CliConfig::parse(&c.to_key_value()).unwrap(), c);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(CliConfig::parse(&json).unwrap(), c);
    }

    #[test]
    fn partial_config_keeps_defaults() {
        let c =
            CliConfig::parse("# comment\nm = 50\n\nprofile = double_bump # trailing\n").unwrap();
        assert_eq!(c.m, 50);
        assert_eq!(c.profile, ProfileKind::DoubleBump);
        assert_eq!(c.x0, CliConfig::default().x0);
    }

    #[test]
    fn bad_config_lines() {
        assert!(CliConfig::parse("m 50").is_err());
        assert!(CliConfig::parse("speed = 3").is_err());
        assert!(CliConfig::parse("m = fifty").is_err());
        assert!(CliConfig::parse("profile = blob").is_err());
        assert!(CliConfig::parse("{\"m\": 10, \"bogus\": 1}").is_err());
    }

    #[test]
    fn series_csv_round_trip() {
        let g = TimeGrid::new(1.0, 10).unwrap();
        let f = SampledFunction::from_fn(g, |t| (3.0 * t).sin() / 7.0).unwrap();
        let mut buf = Vec::new();
        write_series(&f, &mut buf).unwrap();
        let back = parse_series(std::str::from_utf8(&buf).unwrap(), g).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn series_csv_rejects_malformed() {
        let g = TimeGrid::new(1.0, 2).unwrap();
        assert!(parse_series("0,1\n0.5\n1,0\n", g).is_err());
        assert!(parse_series("0,1\n0.5,x\n1,0\n", g).is_err());
        assert!(parse_series("0,1\n0.6,1\n1,0\n", g).is_err());
        assert!(matches!(
            parse_series("0,1\n0.5,1\n", g),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn summary_next_to_csv() {
        assert_eq!(
            summary_path(Path::new("out/run.csv")),
            PathBuf::from("out/run.summary.json")
        );
    }

    #[test]
    fn exit_code_classes() {
        assert_eq!(exit_code(&Error::Io("x".into())), EXIT_IO);
        assert_eq!(exit_code(&Error::InvalidParameter("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::NoiseDominates {
                data_norm: 1.0,
                delta: 2.0
            }),
            EXIT_NUMERICAL
        );
    }
}
