//! Second-order Tikhonov regularization with the discrepancy principle.
//!
//! For fixed `alpha` the reconstruction minimizes
//!
//! ```text
//! J(h) = ||A h - f||_W^2 + alpha * h^T P h,   h(0) = h(t0) = 0,
//! ```
//!
//! where `P = W + D2^T W2 D2` is the discrete form of `||h||^2 + ||h''||^2`.
//! The endpoint constraints are imposed by dropping the first and last
//! unknowns; the remaining normal equations are symmetric positive definite
//! and solved by Cholesky. `alpha` is chosen by bisection in `log10(alpha)`
//! so that the residual matches the noise level.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{l2_norm, trapezoid_weights, SampledFunction, TimeGrid};
use crate::operator::{apply_adjoint, apply_operator, OperatorMatrix};

/// Dense symmetric matrix of the stabilizer `||h||^2 + ||h''||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyMatrix {
    p: DMatrix<f64>,
    grid: TimeGrid,
}

impl PenaltyMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// `h^T P h`.
    pub fn quadratic_form(&self, h: &SampledFunction) -> Result<f64> {
        if h.len() != self.grid.len() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                actual: h.len(),
            });
        }
        let v = DVector::from_column_slice(h.values());
        Ok(v.dot(&(&self.p * &v)))
    }
}

/// `P = W + D2^T W2 D2` on `grid`.
pub fn assemble_penalty(grid: &TimeGrid) -> Result<PenaltyMatrix> {
    let m = grid.m();
    if m < 4 {
        return Err(Error::GridTooCoarse {
            required: 4,
            actual: m,
        });
    }
    let dt = grid.dt();
    let n = m + 1;
    let mut p = DMatrix::zeros(n, n);
    for (i, w) in grid.trapezoid_weights().into_iter().enumerate() {
        p[(i, i)] = w;
    }
    let stencil = [1.0, -2.0, 1.0].map(|c| c / (dt * dt));
    let w2 = trapezoid_weights(m - 1, dt);
    for (row, w) in w2.iter().enumerate() {
        // second difference centred at node row + 1
        for (a, ca) in stencil.iter().enumerate() {
            for (b, cb) in stencil.iter().enumerate() {
                p[(row + a, row + b)] += w * (ca * cb);
            }
        }
    }
    Ok(PenaltyMatrix { p, grid: *grid })
}

/// One residual evaluation logged during the parameter search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEvaluation {
    pub alpha: f64,
    pub residual: f64,
}

/// Reconstruction chosen by the discrepancy principle.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizedSolution {
    pub h: SampledFunction,
    pub alpha: f64,
    /// `||A h - f_delta||`.
    pub residual: f64,
    pub bisection_steps: usize,
    pub converged: bool,
    /// Every residual evaluation, in the order performed.
    pub evaluations: Vec<AlphaEvaluation>,
}

/// Normal equations of the regularized problem restricted to interior
/// unknowns, built once per operator and reused across `alpha` values.
#[derive(Debug, Clone)]
pub struct TikhonovSystem<'a> {
    op: &'a OperatorMatrix,
    penalty: PenaltyMatrix,
    /// `A_I^T W A_I` with `A_I` the interior columns of `A`.
    gram: DMatrix<f64>,
    /// `W A_I`.
    weighted_cols: DMatrix<f64>,
}

impl<'a> TikhonovSystem<'a> {
    pub fn new(op: &'a OperatorMatrix) -> Result<Self> {
        let penalty = assemble_penalty(op.grid())?;
        let n = op.grid().len();
        let inner = n - 2;
        let a_int = op.matrix().columns(1, inner).into_owned();
        let mut weighted_cols = a_int.clone();
        for (i, w) in op.quad_weights().iter().enumerate() {
            weighted_cols.row_mut(i).scale_mut(*w);
        }
        let gram = a_int.tr_mul(&weighted_cols);
        Ok(Self {
            op,
            penalty,
            gram,
            weighted_cols,
        })
    }

    pub fn operator(&self) -> &OperatorMatrix {
        self.op
    }

    pub fn penalty(&self) -> &PenaltyMatrix {
        &self.penalty
    }

    fn inner(&self) -> usize {
        self.op.grid().len() - 2
    }

    fn system_matrix(&self, alpha: f64) -> DMatrix<f64> {
        let k = self.inner();
        let mut sys = self.gram.clone();
        sys += self.penalty.p.view((1, 1), (k, k)) * alpha;
        sys
    }

    fn rhs(&self, f: &SampledFunction) -> DVector<f64> {
        self.weighted_cols
            .tr_mul(&DVector::from_column_slice(f.values()))
    }

    fn check_data(&self, f: &SampledFunction) -> Result<()> {
        let grid = self.op.grid();
        if f.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                actual: f.len(),
            });
        }
        if f.grid() != grid {
            return Err(Error::InvalidParameter(
                "data grid differs from the operator grid".into(),
            ));
        }
        Ok(())
    }

    fn embed(&self, z: &DVector<f64>) -> Result<SampledFunction> {
        let mut vals = Vec::with_capacity(z.len() + 2);
        vals.push(0.0);
        vals.extend(z.iter());
        vals.push(0.0);
        SampledFunction::new(*self.op.grid(), vals)
    }

    /// Minimizer of the regularized functional for fixed `alpha`.
    pub fn solve(&self, f_delta: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::NonPositiveAlpha(alpha));
        }
        self.check_data(f_delta)?;
        let sys = self.system_matrix(alpha);
        let b = self.rhs(f_delta);
        let chol = Cholesky::new(sys.clone()).ok_or(Error::Singular(alpha))?;
        let mut z = chol.solve(&b);
        refine(&chol, &sys, &b, &mut z);
        self.embed(&z)
    }

    /// `||A h_alpha - f_delta||`.
    pub fn residual(&self, f_delta: &SampledFunction, alpha: f64) -> Result<f64> {
        let h = self.solve(f_delta, alpha)?;
        residual_norm(self.op, &h, f_delta)
    }

    /// `J(h) = ||A h - f||^2 + alpha h^T P h`.
    pub fn objective(
        &self,
        f_delta: &SampledFunction,
        alpha: f64,
        h: &SampledFunction,
    ) -> Result<f64> {
        let r = apply_operator(self.op, h)?.sub(f_delta)?;
        let n = l2_norm(&r);
        Ok(n * n + alpha * self.penalty.quadratic_form(h)?)
    }

    /// Euclidean gradient of [`objective`](Self::objective) with respect to
    /// the interior samples `h_1 .. h_{m-1}`.
    pub fn objective_gradient(
        &self,
        f_delta: &SampledFunction,
        alpha: f64,
        h: &SampledFunction,
    ) -> Result<Vec<f64>> {
        let r = apply_operator(self.op, h)?.sub(f_delta)?;
        let data = self
            .weighted_cols
            .tr_mul(&DVector::from_column_slice(r.values()));
        let hv = DVector::from_column_slice(h.values());
        let reg = &self.penalty.p * hv;
        Ok(data
            .iter()
            .enumerate()
            .map(|(k, d)| 2.0 * (d + alpha * reg[k + 1]))
            .collect())
    }

    /// Gradient in operator form, `2 (A*(A h - f) + alpha W^{-1} P h)`, on
    /// interior nodes (endpoints set to zero).
    pub fn operator_gradient(
        &self,
        f_delta: &SampledFunction,
        alpha: f64,
        h: &SampledFunction,
    ) -> Result<SampledFunction> {
        let euclid = self.objective_gradient(f_delta, alpha, h)?;
        let w = self.op.quad_weights();
        let mut vals = vec![0.0; w.len()];
        for (k, g) in euclid.iter().enumerate() {
            vals[k + 1] = g / w[k + 1];
        }
        SampledFunction::new(*self.op.grid(), vals)
    }

    /// Chooses `alpha` so that `|residual - delta| <= rtol * delta`.
    pub fn select_alpha(
        &self,
        f_delta: &SampledFunction,
        delta: f64,
        opts: &DiscrepancyOptions,
    ) -> Result<RegularizedSolution> {
        self.check_data(f_delta)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain {
                value: delta,
                domain: "delta > 0",
            });
        }
        let data_norm = l2_norm(f_delta);
        if data_norm <= delta {
            return Err(Error::NoiseDominates { data_norm, delta });
        }

        let tol = opts.rtol * delta;
        let mut evaluations = Vec::new();
        let mut eval = |log_alpha: f64| -> Result<(SampledFunction, f64)> {
            let alpha = 10f64.powf(log_alpha);
            let h = self.solve(f_delta, alpha)?;
            let residual = residual_norm(self.op, &h, f_delta)?;
            evaluations.push(AlphaEvaluation { alpha, residual });
            Ok((h, residual))
        };
        let finish =
            |h, log_alpha: f64, residual, steps, converged, evaluations| RegularizedSolution {
                h,
                alpha: 10f64.powf(log_alpha),
                residual,
                bisection_steps: steps,
                converged,
                evaluations,
            };

        let (mut lo, mut hi) = (opts.log_alpha_min, opts.log_alpha_max);
        let (h_lo, mut r_lo) = eval(lo)?;
        if (r_lo - delta).abs() <= tol {
            return Ok(finish(h_lo, lo, r_lo, 0, true, evaluations));
        }
        let (h_hi, mut r_hi) = eval(hi)?;
        if (r_hi - delta).abs() <= tol {
            return Ok(finish(h_hi, hi, r_hi, 0, true, evaluations));
        }

        let mut step = 1.0;
        let mut expansions = 0;
        while r_lo > delta || r_hi < delta {
            if expansions == opts.max_expansions {
                return Err(Error::BracketingFailed(expansions));
            }
            expansions += 1;
            if r_lo > delta {
                lo -= step;
                let (h, r) = match eval(lo) {
                    Err(Error::Singular(_) | Error::NonPositiveAlpha(_)) => {
                        return Err(Error::ResidualFloor {
                            residual: r_lo,
                            delta,
                        })
                    }
                    other => other?,
                };
                r_lo = r;
                if (r - delta).abs() <= tol {
                    return Ok(finish(h, lo, r, 0, true, evaluations));
                }
            } else {
                hi += step;
                let (h, r) = eval(hi)?;
                r_hi = r;
                if (r - delta).abs() <= tol {
                    return Ok(finish(h, hi, r, 0, true, evaluations));
                }
            }
            step *= 2.0;
        }

        let mut best: Option<(SampledFunction, f64, f64)> = None;
        for steps in 1..=opts.max_bisections {
            let mid = 0.5 * (lo + hi);
            let (h, r) = eval(mid)?;
            if (r - delta).abs() <= tol {
                return Ok(finish(h, mid, r, steps, true, evaluations));
            }
            let better = best
                .as_ref()
                .is_none_or(|(_, _, rb)| (r - delta).abs() < (rb - delta).abs());
            if r < delta {
                lo = mid;
            } else {
                hi = mid;
            }
            if better {
                best = Some((h, mid, r));
            }
            if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
                break;
            }
        }
        let (h, la, r) = best.expect("at least one bisection step");
        let steps = evaluations.len();
        Ok(finish(h, la, r, steps, false, evaluations))
    }
}

/// Tuning of the discrepancy search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyOptions {
    /// Accept when `|residual - delta| <= rtol * delta`.
    pub rtol: f64,
    pub log_alpha_min: f64,
    pub log_alpha_max: f64,
    pub max_expansions: usize,
    pub max_bisections: usize,
}

impl Default for DiscrepancyOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-3,
            log_alpha_min: -14.0,
            log_alpha_max: 2.0,
            max_expansions: 60,
            max_bisections: 200,
        }
    }
}

fn refine(chol: &Cholesky<f64, Dyn>, sys: &DMatrix<f64>, b: &DVector<f64>, z: &mut DVector<f64>) {
    let r = b - sys * &*z;
    *z += chol.solve(&r);
}

fn residual_norm(op: &OperatorMatrix, h: &SampledFunction, f: &SampledFunction) -> Result<f64> {
    Ok(l2_norm(&apply_operator(op, h)?.sub(f)?))
}

/// Minimizer of `||A h - f||^2 + alpha (||h||^2 + ||h''||^2)` with
/// `h(0) = h(t0) = 0`.
pub fn solve_regularized(
    op: &OperatorMatrix,
    f_delta: &SampledFunction,
    alpha: f64,
) -> Result<SampledFunction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::NonPositiveAlpha(alpha));
    }
    TikhonovSystem::new(op)?.solve(f_delta, alpha)
}

/// Residual norm of the regularized solution at `alpha`.
pub fn residual_at(op: &OperatorMatrix, f_delta: &SampledFunction, alpha: f64) -> Result<f64> {
    TikhonovSystem::new(op)?.residual(f_delta, alpha)
}

/// Discrepancy-principle reconstruction with default search options.
pub fn select_alpha_discrepancy(
    op: &OperatorMatrix,
    f_delta: &SampledFunction,
    delta: f64,
) -> Result<RegularizedSolution> {
    TikhonovSystem::new(op)?.select_alpha(f_delta, delta, &DiscrepancyOptions::default())
}

/// True when residuals are nondecreasing once the evaluations are sorted by
/// `alpha`.
pub fn residuals_monotone(evaluations: &[AlphaEvaluation]) -> bool {
    let mut sorted = evaluations.to_vec();
    sorted.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    sorted.windows(2).all(|w| w[1].residual >= w[0].residual)
}

/// `||A* f||` for the gradient tolerance scale.
pub fn adjoint_data_norm(op: &OperatorMatrix, f: &SampledFunction) -> Result<f64> {
    Ok(l2_norm(&apply_adjoint(op, f)?))
}
