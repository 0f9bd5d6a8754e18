//! Synthetic reconstruction experiments: pick a smooth boundary history,
//! simulate the sensor trace, perturb it, reconstruct and compare against the
//! a-priori estimate.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bound::{
    default_tau_grid, error_bound_with, inverse_multiplier_bound_check, MultiplierBoundReport,
};
use crate::error::{Error, Result};
use crate::forward::{fd_oracle_solve, series_trace};
use crate::grid::{
    default_mode_count, h2_seminorm_pair, l2_norm, ProblemConfig, SampledFunction, TimeGrid,
};
use crate::operator::{assemble_operator, OperatorMatrix};
use crate::tikhonov::{DiscrepancyOptions, TikhonovSystem};

/// Shape of the synthetic boundary history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// `t^2 (t0 - t)^2`.
    PolyBump,
    /// `sin^2(pi t / t0) sin(2 pi t / t0)`.
    SineBump,
    /// Two overlapping polynomial bumps.
    DoubleBump,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 3] = [Self::PolyBump, Self::SineBump, Self::DoubleBump];

    pub fn name(self) -> &'static str {
        match self {
            Self::PolyBump => "poly_bump",
            Self::SineBump => "sine_bump",
            Self::DoubleBump => "double_bump",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown profile '{s}'")))
    }
}

/// Truth profile scaled so that `||h||^2 + ||h''||^2 = (fraction * r1)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruthProfile {
    pub kind: ProfileKind,
    pub scale_to_r1_fraction: f64,
}

impl TruthProfile {
    pub fn new(kind: ProfileKind, scale_to_r1_fraction: f64) -> Result<Self> {
        if !(scale_to_r1_fraction > 0.0 && scale_to_r1_fraction.is_finite()) {
            return Err(Error::Domain {
                value: scale_to_r1_fraction,
                domain: "fraction > 0",
            });
        }
        Ok(Self {
            kind,
            scale_to_r1_fraction,
        })
    }

    /// Unscaled shape value at `t`.
    pub fn shape(&self, t: f64, t0: f64) -> f64 {
        let s = t / t0;
        match self.kind {
            ProfileKind::PolyBump => t * t * (t0 - t) * (t0 - t),
            ProfileKind::SineBump => {
                let p = (std::f64::consts::PI * s).sin();
                p * p * (2.0 * std::f64::consts::PI * s).sin()
            }
            ProfileKind::DoubleBump => local_bump(s, 0.05, 0.55) + 0.7 * local_bump(s, 0.35, 0.95),
        }
    }

    /// Analytic derivative of the unscaled shape.
    pub fn shape_derivative(&self, t: f64, t0: f64) -> f64 {
        let s = t / t0;
        match self.kind {
            ProfileKind::PolyBump => 2.0 * t * (t0 - t) * (t0 - 2.0 * t),
            ProfileKind::SineBump => {
                let w = std::f64::consts::PI / t0;
                let (p, c) = (w * t).sin_cos();
                let (q, d) = (2.0 * w * t).sin_cos();
                2.0 * w * p * c * q + 2.0 * w * p * p * d
            }
            ProfileKind::DoubleBump => {
                (local_bump_derivative(s, 0.05, 0.55) + 0.7 * local_bump_derivative(s, 0.35, 0.95))
                    / t0
            }
        }
    }

    /// Amplitude that puts the sampled shape at the requested class norm on
    /// the grid of `cfg`.
    pub fn amplitude(&self, cfg: &ProblemConfig) -> Result<f64> {
        let grid = cfg.grid();
        let shape = SampledFunction::from_fn(grid, |t| self.shape(t, grid.t0()))?;
        let (a, b) = h2_seminorm_pair(&shape)?;
        Ok(self.scale_to_r1_fraction * cfg.r1 / (a + b).sqrt())
    }

    /// Scaled truth sampled on an arbitrary grid, sharing the amplitude
    /// fixed on the grid of `cfg`.
    pub fn sample(&self, cfg: &ProblemConfig, grid: TimeGrid) -> Result<SampledFunction> {
        let c = self.amplitude(cfg)?;
        let t0 = grid.t0();
        let mut h = SampledFunction::from_fn(grid, |t| c * self.shape(t, t0))?.into_values();
        // endpoints vanish analytically; strip rounding residue
        h[0] = 0.0;
        let last = h.len() - 1;
        h[last] = 0.0;
        SampledFunction::new(grid, h)
    }
}

fn local_bump(s: f64, a: f64, b: f64) -> f64 {
    if s <= a || s >= b {
        return 0.0;
    }
    let w = b - a;
    16.0 * ((s - a) * (b - s)).powi(2) / w.powi(4)
}

fn local_bump_derivative(s: f64, a: f64, b: f64) -> f64 {
    if s <= a || s >= b {
        return 0.0;
    }
    let w = b - a;
    32.0 * (s - a) * (b - s) * (a + b - 2.0 * s) / w.powi(4)
}

/// Truth history on the grid of `cfg`.
pub fn generate_truth(profile: &TruthProfile, cfg: &ProblemConfig) -> Result<SampledFunction> {
    cfg.validate()?;
    profile.sample(cfg, cfg.grid())
}

/// `f0 + eta` with Gaussian `eta` rescaled to `||eta|| = delta` exactly.
/// `delta = 0` returns `f0` unchanged.
pub fn add_noise(f0: &SampledFunction, delta: f64, seed: u64) -> Result<SampledFunction> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            value: delta,
            domain: "delta >= 0",
        });
    }
    if delta == 0.0 {
        return Ok(f0.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..f0.len())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let eta = SampledFunction::new(*f0.grid(), raw)?;
    let norm = l2_norm(&eta);
    f0.combine(1.0, &eta, delta / norm)
}

/// How the exact sensor data is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSynthesis {
    /// Series solution on the twice-refined time grid, restricted back.
    #[default]
    RefinedSeries,
    /// Crank–Nicolson on the problem's time grid with the given number of
    /// space intervals.
    FiniteDifference { space_steps: usize },
}

/// One reconstruction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: ProblemConfig,
    pub profile: TruthProfile,
    pub delta: f64,
    pub seed: u64,
    pub alpha: f64,
    pub measured_error: f64,
    /// Twice the modulus bound at `delta`.
    pub bound2omega: f64,
    pub residual: f64,
    /// `sqrt(||h0||^2 + ||h0''||^2)`, the radius used in the bound.
    pub class_radius: f64,
    pub truth_norm: f64,
    pub asymptotic_valid: bool,
    pub converged: bool,
    pub wall_time: Duration,
}

impl ExperimentRecord {
    pub fn violates_bound(&self) -> bool {
        self.measured_error > self.bound2omega
    }
}

/// Truth, exact data and operator for one configuration, shared by every
/// run at that configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    cfg: ProblemConfig,
    profile: TruthProfile,
    truth: SampledFunction,
    clean: SampledFunction,
    op: OperatorMatrix,
    class_radius: f64,
    multiplier: MultiplierBoundReport,
    options: DiscrepancyOptions,
}

impl Experiment {
    pub fn prepare(
        cfg: &ProblemConfig,
        profile: &TruthProfile,
        synthesis: DataSynthesis,
    ) -> Result<Self> {
        let op = assemble_operator(cfg)?;
        Self::with_operator(cfg, profile, synthesis, op)
    }

    /// Like [`Experiment::prepare`] but with a prebuilt (e.g. cached)
    /// operator.
    pub fn with_operator(
        cfg: &ProblemConfig,
        profile: &TruthProfile,
        synthesis: DataSynthesis,
        op: OperatorMatrix,
    ) -> Result<Self> {
        cfg.validate()?;
        if *op.grid() != cfg.grid() || op.x0() != cfg.x0 {
            return Err(Error::InvalidParameter(
                "operator was built for a different configuration".into(),
            ));
        }
        let truth = generate_truth(profile, cfg)?;
        let (a, b) = h2_seminorm_pair(&truth)?;
        let clean = synthesize(profile, cfg, &truth, synthesis)?;
        let multiplier = inverse_multiplier_bound_check(cfg.x0, &default_tau_grid())?;
        Ok(Self {
            cfg: *cfg,
            profile: *profile,
            truth,
            clean,
            op,
            class_radius: (a + b).sqrt(),
            multiplier,
            options: DiscrepancyOptions::default(),
        })
    }

    pub fn config(&self) -> &ProblemConfig {
        &self.cfg
    }

    pub fn truth(&self) -> &SampledFunction {
        &self.truth
    }

    pub fn clean_data(&self) -> &SampledFunction {
        &self.clean
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn class_radius(&self) -> f64 {
        self.class_radius
    }

    pub fn multiplier_check(&self) -> &MultiplierBoundReport {
        &self.multiplier
    }

    pub fn run(&self, delta: f64, seed: u64) -> Result<ExperimentRecord> {
        let sys = TikhonovSystem::new(&self.op)?;
        self.run_with(&sys, delta, seed)
    }

    fn run_with(
        &self,
        sys: &TikhonovSystem<'_>,
        delta: f64,
        seed: u64,
    ) -> Result<ExperimentRecord> {
        let start = Instant::now();
        let f_delta = add_noise(&self.clean, delta, seed)?;
        let sol = sys.select_alpha(&f_delta, delta, &self.options)?;
        let measured_error = l2_norm(&sol.h.sub(&self.truth)?);
        let bound = error_bound_with(delta, self.class_radius, &self.multiplier)?;
        Ok(ExperimentRecord {
            config: self.cfg,
            profile: self.profile,
            delta,
            seed,
            alpha: sol.alpha,
            measured_error,
            bound2omega: bound.guarantee,
            residual: sol.residual,
            class_radius: self.class_radius,
            truth_norm: l2_norm(&self.truth),
            asymptotic_valid: bound.asymptotic_valid,
            converged: sol.converged,
            wall_time: start.elapsed(),
        })
    }

    /// Every `(delta, seed)` pair, run in parallel and returned ordered by
    /// delta then seed.
    pub fn sweep(&self, deltas: &[f64], seeds: &[u64]) -> Result<Vec<ExperimentRecord>> {
        let sys = TikhonovSystem::new(&self.op)?;
        let jobs: Vec<(f64, u64)> = deltas
            .iter()
            .flat_map(|&d| seeds.iter().map(move |&s| (d, s)))
            .collect();
        let mut records = jobs
            .par_iter()
            .map(|&(d, s)| self.run_with(&sys, d, s))
            .collect::<Result<Vec<_>>>()?;
        records.sort_by(|a, b| a.delta.total_cmp(&b.delta).then(a.seed.cmp(&b.seed)));
        Ok(records)
    }
}

fn synthesize(
    profile: &TruthProfile,
    cfg: &ProblemConfig,
    truth: &SampledFunction,
    synthesis: DataSynthesis,
) -> Result<SampledFunction> {
    let grid = cfg.grid();
    match synthesis {
        DataSynthesis::RefinedSeries => {
            let fine = grid.refined(2)?;
            let h = profile.sample(cfg, fine)?;
            let modes = cfg.n_modes.max(default_mode_count(fine.dt()));
            let u = series_trace(h.values(), fine.dt(), cfg.x0, modes);
            SampledFunction::new(grid, u.into_iter().step_by(2).collect())
        }
        DataSynthesis::FiniteDifference { space_steps } => {
            fd_oracle_solve(truth, space_steps, cfg)?.trace_at(cfg.x0)
        }
    }
}

/// Single run with the default data synthesis.
pub fn run_experiment(
    cfg: &ProblemConfig,
    profile: &TruthProfile,
    delta: f64,
    seed: u64,
) -> Result<ExperimentRecord> {
    Experiment::prepare(cfg, profile, DataSynthesis::default())?.run(delta, seed)
}

/// Sweep with the default data synthesis; the setup is shared across runs.
pub fn sweep(
    cfg: &ProblemConfig,
    profile: &TruthProfile,
    deltas: &[f64],
    seeds: &[u64],
) -> Result<Vec<ExperimentRecord>> {
    Experiment::prepare(cfg, profile, DataSynthesis::default())?.sweep(deltas, seeds)
}

pub const CSV_HEADER: &str = "x0,t0,m,n_modes,r1,profile,fraction,delta,seed,alpha,measured_error,\
bound2omega,residual,class_radius,truth_norm,asymptotic_valid,converged,wall_time_s";

/// Writes records as CSV with full-precision floats.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let c = &r.config;
        writeln!(
            out,
            "{:.16e},{:.16e},{},{},{:.16e},{},{:.16e},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.6e}",
            c.x0,
            c.t0,
            c.m,
            c.n_modes,
            c.r1,
            r.profile.kind,
            r.profile.scale_to_r1_fraction,
            r.delta,
            r.seed,
            r.alpha,
            r.measured_error,
            r.bound2omega,
            r.residual,
            r.class_radius,
            r.truth_norm,
            r.asymptotic_valid,
            r.converged,
            r.wall_time.as_secs_f64(),
        )?;
    }
    Ok(())
}

/// Per-noise-level aggregate of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSummary {
    pub delta: f64,
    pub runs: usize,
    pub median_error: f64,
    pub median_alpha: f64,
    pub bound2omega: f64,
    pub median_error_to_bound: f64,
    pub asymptotic_valid: bool,
    /// Runs with error above the bound, counted over all runs.
    pub exceedances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub levels: Vec<DeltaSummary>,
    /// Exceedances among runs where the bound is applicable.
    pub violations: usize,
    pub runs: usize,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn summarize(records: &[ExperimentRecord]) -> SweepSummary {
    let mut deltas: Vec<f64> = records.iter().map(|r| r.delta).collect();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let levels = deltas
        .into_iter()
        .map(|d| {
            let rs: Vec<_> = records.iter().filter(|r| r.delta == d).collect();
            DeltaSummary {
                delta: d,
                runs: rs.len(),
                median_error: median(rs.iter().map(|r| r.measured_error).collect()),
                median_alpha: median(rs.iter().map(|r| r.alpha).collect()),
                bound2omega: rs[0].bound2omega,
                median_error_to_bound: median(
                    rs.iter()
                        .map(|r| r.measured_error / r.bound2omega)
                        .collect(),
                ),
                asymptotic_valid: rs[0].asymptotic_valid,
                exceedances: rs.iter().filter(|r| r.violates_bound()).count(),
            }
        })
        .collect();
    SweepSummary {
        levels,
        violations: records
            .iter()
            .filter(|r| r.asymptotic_valid && r.violates_bound())
            .count(),
        runs: records.len(),
    }
}
