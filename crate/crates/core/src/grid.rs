//! Uniform time grids, sampled functions on them, and the discrete norms used
//! throughout the crate.
//!
//! Integrals over `[0, t0]` are approximated with the composite trapezoid rule,
//! which is exact for the piecewise-linear interpolant of the samples' squares
//! at second order.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform partition of `[0, t0]` into `m` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    m: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(t0: f64, m: usize) -> Result<Self> {
        if !(t0.is_finite() && t0 > 0.0) {
            return Err(Error::Domain {
                value: t0,
                domain: "t0 > 0",
            });
        }
        if m < 2 {
            return Err(Error::GridTooCoarse {
                required: 2,
                actual: m,
            });
        }
        Ok(Self {
            t0,
            m,
            dt: t0 / m as f64,
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Number of intervals.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of nodes, `m + 1`.
    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node `i`; the last node is pinned to `t0` exactly.
    pub fn t(&self, i: usize) -> f64 {
        if i == self.m {
            self.t0
        } else {
            i as f64 * self.dt
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.m).map(move |i| self.t(i))
    }

    /// Trapezoid weights: `dt/2` at both ends, `dt` elsewhere.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        trapezoid_weights(self.m + 1, self.dt)
    }

    /// Grid with `factor` times as many intervals over the same horizon.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.t0, self.m * factor)
    }
}

pub(crate) fn trapezoid_weights(nodes: usize, dt: f64) -> Vec<f64> {
    let mut w = vec![dt; nodes];
    if let Some(first) = w.first_mut() {
        *first = 0.5 * dt;
    }
    if let Some(last) = w.last_mut() {
        *last = 0.5 * dt;
    }
    w
}

/// Real samples of a function at the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample value {bad} is not finite"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SampledFunction, b: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    /// Weighted inner product `sum_i w_i f_i g_i` with trapezoid weights.
    pub fn inner(&self, other: &SampledFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(weighted_dot(&self.values, &other.values, self.grid.dt))
    }

    pub(crate) fn check_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(
                "sampled functions live on different grids".into(),
            ));
        }
        Ok(())
    }
}

fn weighted_dot(f: &[f64], g: &[f64], dt: f64) -> f64 {
    let n = f.len();
    let interior: f64 = f[1..n - 1]
        .iter()
        .zip(&g[1..n - 1])
        .map(|(a, b)| a * b)
        .sum();
    dt * (interior + 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]))
}

/// Discrete `L2[0, t0]` norm with trapezoid weights.
pub fn l2_norm(f: &SampledFunction) -> f64 {
    weighted_dot(&f.values, &f.values, f.grid.dt).sqrt()
}

/// Returns `(||h||^2, ||h''||^2)`.
///
/// `h''` is the second central difference on interior nodes `1..m-1`; its
/// square is integrated by trapezoid over `[t_1, t_{m-1}]`.
pub fn h2_seminorm_pair(h: &SampledFunction) -> Result<(f64, f64)> {
    let grid = h.grid;
    if grid.m < 4 {
        return Err(Error::GridTooCoarse {
            required: 4,
            actual: grid.m,
        });
    }
    let l2 = weighted_dot(&h.values, &h.values, grid.dt);
    let d2 = second_difference(&h.values, grid.dt);
    let curv = weighted_dot(&d2, &d2, grid.dt);
    Ok((l2, curv))
}

/// `(h[i-1] - 2 h[i] + h[i+1]) / dt^2` for `i = 1..len-1`.
pub(crate) fn second_difference(h: &[f64], dt: f64) -> Vec<f64> {
    let inv = 1.0 / (dt * dt);
    h.windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]) * inv)
        .collect()
}

/// Parameters of one inverse-problem instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    /// Sensor location in `(0, 1)`.
    pub x0: f64,
    /// Final time.
    pub t0: f64,
    /// Number of time intervals.
    pub m: usize,
    /// Number of retained sine modes.
    pub n_modes: usize,
    /// Radius of the a-priori smoothness ball `||h||^2 + ||h''||^2 <= r1^2`.
    pub r1: f64,
}

impl ProblemConfig {
    /// Builds a validated config with the default mode count.
    pub fn new(x0: f64, t0: f64, m: usize, r1: f64) -> Result<Self> {
        let grid = TimeGrid::new(t0, m)?;
        let cfg = Self {
            x0,
            t0,
            m,
            n_modes: default_mode_count(grid.dt()),
            r1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_modes(mut self, n_modes: usize) -> Result<Self> {
        self.n_modes = n_modes;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x0 > 0.0 && self.x0 < 1.0) {
            return Err(Error::Domain {
                value: self.x0,
                domain: "0 < x0 < 1",
            });
        }
        TimeGrid::new(self.t0, self.m)?;
        if self.n_modes < 1 {
            return Err(Error::InvalidParameter("n_modes must be at least 1".into()));
        }
        if !(self.r1.is_finite() && self.r1 > 0.0) {
            return Err(Error::Domain {
                value: self.r1,
                domain: "r1 > 0",
            });
        }
        Ok(())
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid::new(self.t0, self.m).expect("validated config")
    }
}

/// `max(400, ceil(4 / (pi sqrt(dt))))`. The second term puts
/// `exp(-(pi N)^2 dt)` below `1e-12`; the floor bounds the algebraic
/// `1/N^2` tail of the quasi-static modes.
pub fn default_mode_count(dt: f64) -> usize {
    let n = (4.0 / (PI * dt.sqrt())).ceil() as usize;
    n.max(400)
}
