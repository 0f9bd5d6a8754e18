//! Discrete measurement operator mapping boundary samples `h` to the sensor
//! trace `f = u(x0, .)`.
//!
//! Column `j` of the matrix is the series response at `x0` to the
//! piecewise-linear hat function at node `j`. The mode update is
//! time-invariant, so every hat response is a shift of the response to a
//! unit slope on a single interval; the matrix is assembled from that one
//! sequence instead of `m + 1` separate forward solves.

use std::f64::consts::PI;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forward::ModeStep;
use crate::grid::{ProblemConfig, SampledFunction, TimeGrid};

const CACHE_MAGIC: &[u8; 4] = b"HBA1";

/// Partial sum `sum_{n=1}^{n_terms} pi n exp(-(pi n)^2 (t - tau)) sin(pi n x0)`
/// of the measurement kernel.
pub fn kernel_partial_sum(t: f64, tau: f64, x0: f64, n_terms: usize) -> Result<f64> {
    let lag = t - tau;
    if lag.is_nan() || lag <= 0.0 {
        return Err(Error::KernelSingularity(lag));
    }
    if n_terms < 1 {
        return Err(Error::InvalidParameter("n_terms must be at least 1".into()));
    }
    Ok((1..=n_terms).map(|n| kernel_term(n, lag, x0)).sum())
}

fn kernel_term(n: usize, lag: f64, x0: f64) -> f64 {
    let k = PI * n as f64;
    k * (-k * k * lag).exp() * (k * x0).sin()
}

/// Kernel summed until the term envelope `pi n exp(-(pi n)^2 lag)` has peaked
/// and dropped below `1e-14`. Returns the value and the number of terms used.
pub fn kernel_converged(t: f64, tau: f64, x0: f64) -> Result<(f64, usize)> {
    let lag = t - tau;
    if lag.is_nan() || lag <= 0.0 {
        return Err(Error::KernelSingularity(lag));
    }
    // envelope maximum sits at pi n = 1 / sqrt(2 lag)
    let peak = (1.0 / (PI * (2.0 * lag).sqrt())).ceil() as usize;
    let mut sum = 0.0;
    let mut n = 1;
    loop {
        sum += kernel_term(n, lag, x0);
        let k = PI * n as f64;
        if n >= peak && k * (-k * k * lag).exp() < 1e-14 {
            return Ok((sum, n));
        }
        n += 1;
    }
}

/// Dense lower-triangular matrix of the discrete measurement operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    a: DMatrix<f64>,
    grid: TimeGrid,
    x0: f64,
    quad_weights: Vec<f64>,
}

/// Response of the mode sum at `x0` to a unit slope of `h` on one interval,
/// sampled `q + 1` nodes after the interval start: `sum_n sin(pi n x0) gain_n decay_n^q`.
fn unit_slope_response(x0: f64, dt: f64, n_modes: usize, len: usize) -> Vec<f64> {
    let mut s = vec![0.0; len];
    for n in 1..=n_modes {
        let step = ModeStep::new(n, dt);
        let mut amp = (PI * n as f64 * x0).sin() * step.gain;
        for sq in s.iter_mut() {
            if amp == 0.0 {
                break;
            }
            *sq += amp;
            amp *= step.decay;
        }
    }
    s
}

/// Assembles the operator for `cfg`.
pub fn assemble_operator(cfg: &ProblemConfig) -> Result<OperatorMatrix> {
    cfg.validate()?;
    let grid = cfg.grid();
    let m = grid.m();
    let dt = grid.dt();
    let s = unit_slope_response(cfg.x0, dt, cfg.n_modes, m);
    let mut a = DMatrix::zeros(m + 1, m + 1);
    let direct = 1.0 - cfg.x0;
    for j in 0..=m {
        a[(j, j)] = direct;
        for i in j..=m {
            // hat j rises on interval j-1 and falls on interval j
            let mut v = 0.0;
            if j >= 1 {
                v += s[i - j];
            }
            if j < m && i > j {
                v -= s[i - j - 1];
            }
            a[(i, j)] += v / dt;
        }
    }
    Ok(OperatorMatrix {
        a,
        grid,
        x0: cfg.x0,
        quad_weights: grid.trapezoid_weights(),
    })
}

impl OperatorMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    fn check(&self, h: &SampledFunction) -> Result<()> {
        if h.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: h.len(),
            });
        }
        if *h.grid() != self.grid {
            return Err(Error::InvalidParameter(
                "sampled function grid differs from the operator grid".into(),
            ));
        }
        Ok(())
    }

    /// Condition number `sigma_max / sigma_min` of the plain matrix.
    pub fn condition_number(&self) -> f64 {
        let sv = self.a.singular_values();
        sv.max() / sv.min()
    }

    /// Singular values of `W^{1/2} A W^{-1/2}` restricted to admissible
    /// histories (`h(0) = h(t0) = 0`, i.e. interior columns), sorted
    /// descending.
    ///
    /// The endpoint hats are excluded: a nonzero `h(0)` is an initial state
    /// incompatible with zero initial temperature.
    pub fn weighted_singular_values(&self) -> Vec<f64> {
        let n = self.grid.len();
        let sq: Vec<f64> = self.quad_weights.iter().map(|w| w.sqrt()).collect();
        let b = DMatrix::from_fn(n, n - 2, |i, j| sq[i] * self.a[(i, j + 1)] / sq[j + 1]);
        let mut sv: Vec<f64> = b.singular_values().iter().copied().collect();
        sv.sort_by(|x, y| y.total_cmp(x));
        sv
    }

    /// Writes the cache format: `"HBA1"`, `u32` m, two reserved `u32` words
    /// (zero), then the `(m+1)^2` entries row-major; all little-endian.
    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        let m = u32::try_from(self.grid.m())
            .map_err(|_| Error::InvalidParameter("grid too large for cache".into()))?;
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&m.to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        out.write_all(&0u32.to_le_bytes())?;
        let n = self.grid.len();
        let mut buf = Vec::with_capacity(n * n * 8);
        for i in 0..n {
            for j in 0..n {
                buf.extend_from_slice(&self.a[(i, j)].to_le_bytes());
            }
        }
        out.write_all(&buf)?;
        out.flush()?;
        Ok(())
    }

    /// Reads a cache written by [`write_cache`](Self::write_cache). The
    /// header carries only `m`, so `cfg` supplies the rest and must agree.
    pub fn read_cache<R: Read>(mut input: R, cfg: &ProblemConfig) -> Result<Self> {
        cfg.validate()?;
        let mut header = [0u8; 16];
        input
            .read_exact(&mut header)
            .map_err(|e| Error::BadCache(format!("short header: {e}")))?;
        if &header[..4] != CACHE_MAGIC {
            return Err(Error::BadCache("bad magic".into()));
        }
        let m = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        if m != cfg.m {
            return Err(Error::BadCache(format!(
                "cache holds m = {m}, config asks for m = {}",
                cfg.m
            )));
        }
        let n = m + 1;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() != n * n * 8 {
            return Err(Error::BadCache(format!(
                "expected {} payload bytes, found {}",
                n * n * 8,
                body.len()
            )));
        }
        let a = DMatrix::from_row_iterator(
            n,
            n,
            body.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap())),
        );
        let grid = cfg.grid();
        Ok(Self {
            a,
            grid,
            x0: cfg.x0,
            quad_weights: grid.trapezoid_weights(),
        })
    }
}

/// `A h`.
pub fn apply_operator(op: &OperatorMatrix, h: &SampledFunction) -> Result<SampledFunction> {
    op.check(h)?;
    let hv = DVector::from_column_slice(h.values());
    let f = &op.a * hv;
    SampledFunction::new(op.grid, f.as_slice().to_vec())
}

/// Adjoint for the trapezoid inner product: `A* = W^{-1} A^T W`.
pub fn apply_adjoint(op: &OperatorMatrix, g: &SampledFunction) -> Result<SampledFunction> {
    op.check(g)?;
    let w = &op.quad_weights;
    let wg = DVector::from_iterator(g.len(), g.values().iter().zip(w).map(|(v, wi)| v * wi));
    let atwg = op.a.tr_mul(&wg);
    SampledFunction::new(op.grid, atwg.iter().zip(w).map(|(v, wi)| v / wi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{series_trace, solve_forward};
    use crate::grid::l2_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(m: usize) -> ProblemConfig {
        ProblemConfig::new(0.5, 1.0, m, 1.0).unwrap()
    }

    #[test]
    fn kernel_single_term() {
        let v = kernel_partial_sum(1.3, 0.2, 0.3, 1).unwrap();
        let expected = PI * (-PI * PI * 1.1f64).exp() * (PI * 0.3f64).sin();
        assert_eq!(v, expected);
    }

    #[test]
    fn kernel_diagonal_is_singular() {
        assert!(matches!(
            kernel_partial_sum(0.5, 0.5, 0.3, 10),
            Err(Error::KernelSingularity(_))
        ));
        assert!(kernel_converged(0.4, 0.5, 0.3).is_err());
    }

    #[test]
    fn kernel_unit_lag_converges_in_three_terms() {
        let (full, _) = kernel_converged(1.0, 0.0, 0.5).unwrap();
        let three = kernel_partial_sum(1.0, 0.0, 0.5, 3).unwrap();
        assert!((full - three).abs() <= 1e-12);
    }

    #[test]
    fn kernel_vanishes_at_long_lag() {
        let lags = [0.5, 1.0, 2.0, 4.0];
        let vals: Vec<f64> = lags
            .iter()
            .map(|&l| kernel_converged(l, 0.0, 0.3).unwrap().0)
            .collect();
        assert!(vals.windows(2).all(|w| w[1].abs() < w[0].abs()));
        assert!(vals[3].abs() < 1e-15);
    }

    #[test]
    fn columns_are_hat_responses() {
        let c = cfg(60);
        let op = assemble_operator(&c).unwrap();
        let g = c.grid();
        for j in [0, 1, 17, 59, 60] {
            let mut e = vec![0.0; g.len()];
            e[j] = 1.0;
            let col = series_trace(&e, g.dt(), c.x0, c.n_modes);
            let scale = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for (i, c) in col.iter().enumerate() {
                assert!(
                    (op.matrix()[(i, j)] - c).abs() <= 1e-12 * scale,
                    "j={j} i={i}"
                );
            }
        }
    }

    #[test]
    fn operator_is_lower_triangular() {
        let op = assemble_operator(&cfg(80)).unwrap();
        let a = op.matrix();
        for i in 0..a.nrows() {
            for j in i + 1..a.ncols() {
                assert!(a[(i, j)].abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn operator_matches_forward_solver() {
        let c = cfg(300);
        let op = assemble_operator(&c).unwrap();
        let h =
            SampledFunction::from_fn(c.grid(), |t| (PI * t).sin().powi(2) * (2.0 * PI * t).sin())
                .unwrap();
        let f = apply_operator(&op, &h).unwrap();
        let u = solve_forward(&h, c.x0, &c).unwrap();
        assert!(l2_norm(&f.sub(&u).unwrap()) <= 1e-12 * l2_norm(&u));
        let zero = apply_operator(&op, &SampledFunction::zeros(c.grid())).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let twice = apply_operator(&op, &h.scaled(2.0)).unwrap();
        assert!(l2_norm(&twice.sub(&f.scaled(2.0)).unwrap()) <= 1e-14 * l2_norm(&f));
    }

    #[test]
    fn adjoint_identity() {
        let c = cfg(50);
        let op = assemble_operator(&c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let h = SampledFunction::new(
                c.grid(),
                (0..51).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let g = SampledFunction::new(
                c.grid(),
                (0..51).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )
            .unwrap();
            let lhs = apply_operator(&op, &h).unwrap().inner(&g).unwrap();
            let rhs = h.inner(&apply_adjoint(&op, &g).unwrap()).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * l2_norm(&h) * l2_norm(&g));
        }
        let z = apply_adjoint(&op, &SampledFunction::zeros(c.grid())).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adjoint_is_anticausal() {
        let c = cfg(40);
        let op = assemble_operator(&c).unwrap();
        // impulse at node k: adjoint output vanishes after k
        let k = 25;
        let mut e = vec![0.0; 41];
        e[k] = 1.0;
        let out = apply_adjoint(&op, &SampledFunction::new(c.grid(), e).unwrap()).unwrap();
        assert!(out.values()[k + 1..].iter().all(|v| v.abs() <= 1e-14));
        assert!(out.values()[..k].iter().any(|v| v.abs() > 1e-6));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let op = assemble_operator(&cfg(20)).unwrap();
        let h = SampledFunction::zeros(TimeGrid::new(1.0, 21).unwrap());
        assert!(matches!(
            apply_operator(&op, &h),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            apply_adjoint(&op, &h),
            Err(Error::DimensionMismatch { .. })
        ));
        let h = SampledFunction::zeros(TimeGrid::new(2.0, 20).unwrap());
        assert!(apply_operator(&op, &h).is_err());
    }

    #[test]
    fn operator_is_ill_conditioned() {
        let op = assemble_operator(&cfg(200)).unwrap();
        assert!(op.condition_number() > 1e6);
    }

    #[test]
    fn weighted_norm_stays_below_one() {
        let op = assemble_operator(&cfg(200)).unwrap();
        let sv = op.weighted_singular_values();
        assert!(sv[0] <= 1.05, "sigma_max = {}", sv[0]);
    }

    #[test]
    fn cache_round_trip_and_rejects() {
        let c = cfg(30);
        let op = assemble_operator(&c).unwrap();
        let mut buf = Vec::new();
        op.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"HBA1");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 30);
        assert_eq!(buf.len(), 16 + 31 * 31 * 8);
        let back = OperatorMatrix::read_cache(&buf[..], &c).unwrap();
        assert_eq!(back, op);

        let other = cfg(31);
        assert!(matches!(
            OperatorMatrix::read_cache(&buf[..], &other),
            Err(Error::BadCache(_))
        ));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(OperatorMatrix::read_cache(&bad[..], &c).is_err());
        assert!(OperatorMatrix::read_cache(&buf[..100], &c).is_err());
    }
}
