//! Direct problem: temperature in the unit rod with prescribed history `h(t)`
//! at `x = 0`, zero temperature at `x = 1` and zero initial data.
//!
//! The solution is split as `u = (1 - x) h(t) + sum_n v_n(t) sin(pi n x)`,
//! where each mode obeys `v_n' + (pi n)^2 v_n = -(2 / (pi n)) h'(t)`,
//! `v_n(0) = 0`. With `h` piecewise linear on the grid, `h'` is constant on
//! each interval and the mode equation is integrated exactly per step.
//!
//! A Crank–Nicolson finite-difference solver of the same problem is provided
//! as an independent cross-check.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{ProblemConfig, SampledFunction, TimeGrid};

/// Time history of one sine-mode amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients {
    pub n: usize,
    pub v: SampledFunction,
}

/// Per-step constants of the exact exponential update for mode `n`:
/// `v_{i+1} = decay * v_i + gain * h'_i`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ModeStep {
    pub decay: f64,
    pub gain: f64,
}

impl ModeStep {
    pub(crate) fn new(n: usize, dt: f64) -> Self {
        let k = PI * n as f64;
        let lambda = k * k;
        let decay = (-lambda * dt).exp();
        // 1 - exp(-lambda dt), accurate for small lambda dt
        let one_minus = -(-lambda * dt).exp_m1();
        Self {
            decay,
            gain: -2.0 / (k * lambda) * one_minus,
        }
    }
}

fn mode_history(n: usize, h: &[f64], dt: f64) -> Vec<f64> {
    let step = ModeStep::new(n, dt);
    let mut v = Vec::with_capacity(h.len());
    let mut current = 0.0;
    v.push(current);
    for w in h.windows(2) {
        let slope = (w[1] - w[0]) / dt;
        current = step.decay * current + step.gain * slope;
        v.push(current);
    }
    v
}

/// Evolves mode `n` driven by the boundary history `h`.
///
/// `h` must start at zero, since the initial temperature vanishes.
pub fn evolve_mode(n: usize, h: &SampledFunction) -> Result<ModeCoefficients> {
    if n < 1 {
        return Err(Error::InvalidMode(n));
    }
    let scale = h.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if h.values()[0].abs() > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "boundary history must start at zero, got h(0) = {}",
            h.values()[0]
        )));
    }
    let v = mode_history(n, h.values(), h.grid().dt());
    Ok(ModeCoefficients {
        n,
        v: SampledFunction::new(*h.grid(), v)?,
    })
}

/// Series trace without endpoint checks; linear in `h`.
pub(crate) fn series_trace(h: &[f64], dt: f64, x: f64, n_modes: usize) -> Vec<f64> {
    let mut u: Vec<f64> = h.iter().map(|hv| (1.0 - x) * hv).collect();
    for n in 1..=n_modes {
        let s = (PI * n as f64 * x).sin();
        let v = mode_history(n, h, dt);
        for (ui, vi) in u.iter_mut().zip(&v) {
            *ui += s * vi;
        }
    }
    u
}

/// Temperature trace `u(x, .)` from the truncated sine series with
/// `cfg.n_modes` modes.
pub fn solve_forward(h: &SampledFunction, x: f64, cfg: &ProblemConfig) -> Result<SampledFunction> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            value: x,
            domain: "0 <= x <= 1",
        });
    }
    check_grid(h, cfg)?;
    let vals = h.values();
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * scale;
    if vals[0].abs() > tol || vals[vals.len() - 1].abs() > tol {
        return Err(Error::InvalidParameter(
            "boundary history must vanish at t = 0 and t = t0".into(),
        ));
    }
    let u = series_trace(vals, h.grid().dt(), x, cfg.n_modes);
    SampledFunction::new(*h.grid(), u)
}

fn check_grid(h: &SampledFunction, cfg: &ProblemConfig) -> Result<()> {
    let grid = cfg.grid();
    if h.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: h.len(),
        });
    }
    if *h.grid() != grid {
        return Err(Error::InvalidParameter(
            "boundary history grid differs from the configured grid".into(),
        ));
    }
    Ok(())
}

/// Space–time temperature field on a uniform `x` grid.
#[derive(Debug, Clone)]
pub struct TemperatureField {
    pub xgrid: Vec<f64>,
    pub tgrid: TimeGrid,
    /// `values[(j, i)]` is `u(x_j, t_i)`.
    pub values: DMatrix<f64>,
}

impl TemperatureField {
    /// Time trace at `x`, linearly interpolated between space nodes.
    pub fn trace_at(&self, x: f64) -> Result<SampledFunction> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                value: x,
                domain: "0 <= x <= 1",
            });
        }
        let steps = self.xgrid.len() - 1;
        let pos = x * steps as f64;
        let j = (pos.floor() as usize).min(steps - 1);
        let frac = pos - j as f64;
        let row_lo = self.values.row(j);
        let row_hi = self.values.row(j + 1);
        let vals = row_lo
            .iter()
            .zip(row_hi.iter())
            .map(|(a, b)| {
                if frac == 0.0 {
                    *a
                } else {
                    (1.0 - frac) * a + frac * b
                }
            })
            .collect();
        SampledFunction::new(self.tgrid, vals)
    }
}

/// Crank–Nicolson solution of `u_t = u_xx` with `u(0,t) = h(t)`,
/// `u(1,t) = 0`, `u(x,0) = 0` on `space_steps` uniform intervals in `x` and
/// the time grid of `h`.
pub fn fd_oracle_solve(
    h: &SampledFunction,
    space_steps: usize,
    cfg: &ProblemConfig,
) -> Result<TemperatureField> {
    if space_steps < 8 {
        return Err(Error::GridTooCoarse {
            required: 8,
            actual: space_steps,
        });
    }
    check_grid(h, cfg)?;
    let tgrid = *h.grid();
    let hv = h.values();
    let nt = tgrid.len();
    let nx = space_steps + 1;
    let dx = 1.0 / space_steps as f64;
    let r = tgrid.dt() / (dx * dx);
    let interior = space_steps - 1;

    // Constant tridiagonal (1 + r) on the diagonal, -r/2 off it; forward
    // elimination factors computed once.
    let diag = 1.0 + r;
    let off = -0.5 * r;
    let mut cprime = vec![0.0; interior];
    let mut denom = vec![0.0; interior];
    denom[0] = diag;
    cprime[0] = off / diag;
    for k in 1..interior {
        denom[k] = diag - off * cprime[k - 1];
        cprime[k] = off / denom[k];
    }

    let mut values = DMatrix::zeros(nx, nt);
    values[(0, 0)] = hv[0];
    let mut u = vec![0.0; interior];
    let mut rhs = vec![0.0; interior];
    for i in 1..nt {
        let left_old = hv[i - 1];
        let left_new = hv[i];
        for k in 0..interior {
            let west = if k == 0 { left_old } else { u[k - 1] };
            let east = if k + 1 == interior { 0.0 } else { u[k + 1] };
            rhs[k] = (1.0 - r) * u[k] + 0.5 * r * (west + east);
        }
        rhs[0] += 0.5 * r * left_new;

        // Thomas sweep
        rhs[0] /= denom[0];
        for k in 1..interior {
            rhs[k] = (rhs[k] - off * rhs[k - 1]) / denom[k];
        }
        u[interior - 1] = rhs[interior - 1];
        for k in (0..interior - 1).rev() {
            u[k] = rhs[k] - cprime[k] * u[k + 1];
        }

        values[(0, i)] = left_new;
        for k in 0..interior {
            values[(k + 1, i)] = u[k];
        }
    }

    Ok(TemperatureField {
        xgrid: (0..nx).map(|j| j as f64 * dx).collect(),
        tgrid,
        values,
    })
}
