//! Fourier-side description of the measurement operator and the a-priori
//! error estimate for the discrepancy-principle reconstruction.
//!
//! On the half-line the operator acts as multiplication by
//! `sinh(mu (1 - x0) sqrt(tau)) / sinh(mu sqrt(tau))`, `mu = (1 + i) / sqrt(2)`.
//! The estimate is `||h_delta - h_0|| <= 2 r1 / sqrt(1 + tau_bar^4)` with
//! `tau_bar = ln^2(r1 / (9 delta)) / (2 x0^2)`, valid once `tau_bar` is past
//! the threshold where the multiplier bounds take effect.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multiplier value at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierPoint {
    pub tau: f64,
    pub value: Complex64,
    pub magnitude: f64,
    /// `ln((1 - x0) / magnitude)`, computed without cancellation so it stays
    /// informative where `magnitude` is within an ulp of `1 - x0`.
    pub attenuation: f64,
}

// ln(sinh w / w) = sum_k c_k w^(2k)
const LOG_SINHC: [f64; 5] = [
    1.0 / 6.0,
    -1.0 / 180.0,
    1.0 / 2835.0,
    -1.0 / 37800.0,
    1.0 / 467775.0,
];
const SERIES_LIMIT: f64 = 1e-2;
const DIRECT_LIMIT: f64 = 30.0;

fn check_x0(x0: f64) -> Result<()> {
    if x0 > 0.0 && x0 < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            value: x0,
            domain: "0 < x0 < 1",
        })
    }
}

/// Evaluates the operator symbol at frequency `tau`.
pub fn spectral_multiplier(tau: f64, x0: f64) -> Result<MultiplierPoint> {
    check_x0(x0)?;
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::Domain {
            value: tau,
            domain: "tau >= 0",
        });
    }
    let a = 1.0 - x0;
    let mu = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);

    if tau == 0.0 {
        return Ok(MultiplierPoint {
            tau,
            value: Complex64::new(a, 0.0),
            magnitude: a,
            attenuation: 0.0,
        });
    }

    if tau < SERIES_LIMIT {
        // ratio = a * exp(L(a z) - L(z)), z^2 = i tau
        let w = Complex64::new(0.0, tau);
        let mut wk = Complex64::new(1.0, 0.0);
        let mut a2k = 1.0;
        let mut log_ratio = Complex64::new(0.0, 0.0);
        for c in LOG_SINHC {
            wk *= w;
            a2k *= a * a;
            log_ratio += wk * (c * (a2k - 1.0));
        }
        let value = log_ratio.exp() * a;
        return Ok(MultiplierPoint {
            tau,
            value,
            magnitude: a * log_ratio.re.exp(),
            attenuation: -log_ratio.re,
        });
    }

    let s = tau.sqrt();
    if s <= DIRECT_LIMIT {
        let value = (mu * (a * s)).sinh() / (mu * s).sinh();
        let magnitude = value.norm();
        return Ok(MultiplierPoint {
            tau,
            value,
            magnitude,
            attenuation: a.ln() - magnitude.ln(),
        });
    }

    // sinh w = e^w (1 - e^{-2w}) / 2; factor the dominant exponentials
    let num = Complex64::new(1.0, 0.0) - (-mu * (2.0 * a * s)).exp();
    let den = Complex64::new(1.0, 0.0) - (-mu * (2.0 * s)).exp();
    let log_mag = (a - 1.0) * s * FRAC_1_SQRT_2 + num.norm().ln() - den.norm().ln();
    let phase = (a - 1.0) * s * FRAC_1_SQRT_2 + num.arg() - den.arg();
    let magnitude = log_mag.exp();
    Ok(MultiplierPoint {
        tau,
        value: Complex64::from_polar(magnitude, phase),
        magnitude,
        attenuation: a.ln() - log_mag,
    })
}

/// `ln |sinh(mu sqrt(tau)) / sinh(mu (1 - x0) sqrt(tau))|`, the log of the
/// inverse multiplier, finite even where the magnitude underflows.
pub fn log_inverse_multiplier(tau: f64, x0: f64) -> Result<f64> {
    let p = spectral_multiplier(tau, x0)?;
    Ok(p.attenuation - (1.0 - x0).ln())
}

/// 2000 log-spaced frequencies on `[1e-6, 1e4]`.
pub fn default_tau_grid() -> Vec<f64> {
    log_spaced(1e-6, 1e4, 2000)
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// A grid point where `|inverse multiplier| <= C exp(x0 sqrt(tau/2))` fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundViolation {
    pub tau: f64,
    pub log_ratio: f64,
    pub log_bound: f64,
}

/// Numerical verification of the inverse-multiplier bounds on a frequency
/// grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierBoundReport {
    pub x0: f64,
    /// Max of the inverse multiplier over `[0, 2]`.
    pub r2: f64,
    /// Smallest grid `tau >= 2` with `exp(x0 sqrt(tau/2)) >= r2`.
    pub tau0: Option<f64>,
    /// Smallest grid `tau >= tau0` from which `tau^2 <= exp(x0 sqrt(tau/2))`
    /// holds at every later grid point. `tau_bar` past this value makes the
    /// error estimate applicable.
    pub tau_threshold: Option<f64>,
    /// Grid points `tau >= 2` violating `ratio <= 8 exp(x0 sqrt(tau/2))`.
    pub violations_factor8: Vec<BoundViolation>,
    /// Grid points `tau >= tau0` violating `ratio <= 9 exp(x0 sqrt(tau/2))`.
    pub violations_factor9: Vec<BoundViolation>,
    /// Largest `ratio / exp(x0 sqrt(tau/2))` seen for `tau >= 2`.
    pub max_normalized_ratio: f64,
    pub points_checked: usize,
}

/// Scans `tau_grid` for the constants of the inverse-multiplier bounds.
pub fn inverse_multiplier_bound_check(x0: f64, tau_grid: &[f64]) -> Result<MultiplierBoundReport> {
    check_x0(x0)?;
    if let Some(bad) = tau_grid.iter().find(|t| !(**t >= 0.0 && **t <= 1e4)) {
        return Err(Error::Domain {
            value: *bad,
            domain: "0 <= tau <= 1e4",
        });
    }
    let mut grid = tau_grid.to_vec();
    grid.sort_by(f64::total_cmp);

    let growth = |tau: f64| x0 * (tau / 2.0).sqrt();

    // r2 over [0, 2], endpoints always included
    let mut log_r2 = log_inverse_multiplier(0.0, x0)?;
    for &tau in grid.iter().filter(|t| **t <= 2.0).chain([2.0].iter()) {
        log_r2 = log_r2.max(log_inverse_multiplier(tau, x0)?);
    }
    let r2 = log_r2.exp();

    let mut violations_factor8 = Vec::new();
    let mut violations_factor9 = Vec::new();
    let mut max_normalized: f64 = 0.0;
    let mut tau0 = None;
    let mut last_poly_failure = None;
    let mut tail: Vec<f64> = Vec::new();
    for &tau in grid.iter().filter(|t| **t >= 2.0) {
        let lr = log_inverse_multiplier(tau, x0)?;
        let g = growth(tau);
        max_normalized = max_normalized.max((lr - g).exp());
        let log8 = 3.0 * LN_2 + g;
        if lr > log8 {
            violations_factor8.push(BoundViolation {
                tau,
                log_ratio: lr,
                log_bound: log8,
            });
        }
        if tau0.is_none() && g >= log_r2 {
            tau0 = Some(tau);
        }
        if tau0.is_some() {
            let log9 = 9f64.ln() + g;
            if lr > log9 {
                violations_factor9.push(BoundViolation {
                    tau,
                    log_ratio: lr,
                    log_bound: log9,
                });
            }
            tail.push(tau);
            if 2.0 * tau.ln() > g {
                last_poly_failure = Some(tail.len() - 1);
            }
        }
    }
    let tau_threshold = match last_poly_failure {
        None => tail.first().copied(),
        Some(k) => tail.get(k + 1).copied(),
    };

    Ok(MultiplierBoundReport {
        x0,
        r2,
        tau0,
        tau_threshold,
        violations_factor8,
        violations_factor9,
        max_normalized_ratio: max_normalized,
        points_checked: grid.len(),
    })
}

/// `ln^2(r1 / (9 delta)) / (2 x0^2)`, or zero when `r1 <= 9 delta`.
pub fn tau_bar(delta: f64, r1: f64, x0: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain {
            value: delta,
            domain: "delta > 0",
        });
    }
    if !(r1 > 0.0 && r1.is_finite()) {
        return Err(Error::Domain {
            value: r1,
            domain: "r1 > 0",
        });
    }
    check_x0(x0)?;
    let l = (r1 / (9.0 * delta)).ln();
    if l <= 0.0 {
        return Ok(0.0);
    }
    Ok(l * l / (2.0 * x0 * x0))
}

/// Result of the a-priori error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundReport {
    pub delta: f64,
    pub r1: f64,
    pub x0: f64,
    pub tau_bar: f64,
    /// `r1 / sqrt(1 + tau_bar^4)`, the bound on the continuity modulus.
    pub bound: f64,
    /// `2 * bound`, the guaranteed reconstruction error.
    pub guarantee: f64,
    /// `tau_bar` has passed `tau_threshold`.
    pub asymptotic_valid: bool,
    pub tau0: Option<f64>,
    pub tau_threshold: Option<f64>,
    pub r2: f64,
    /// `r1 / sqrt(1 + ln^8(r1 / (9 delta)) / (16 x0^2))`: the same estimate
    /// with `x0^2` where substituting `tau_bar` gives `x0^8`. Reported for
    /// comparison only.
    pub variant_bound: f64,
}

/// Error estimate using the default frequency grid for the validity check.
pub fn error_bound(delta: f64, r1: f64, x0: f64) -> Result<ErrorBoundReport> {
    let check = inverse_multiplier_bound_check(x0, &default_tau_grid())?;
    error_bound_with(delta, r1, &check)
}

/// Error estimate reusing a precomputed multiplier scan.
pub fn error_bound_with(
    delta: f64,
    r1: f64,
    check: &MultiplierBoundReport,
) -> Result<ErrorBoundReport> {
    let x0 = check.x0;
    let tb = tau_bar(delta, r1, x0)?;
    let bound = r1 / (1.0 + tb.powi(4)).sqrt();
    let l = (r1 / (9.0 * delta)).ln().max(0.0);
    let variant_bound = r1 / (1.0 + l.powi(8) / (16.0 * x0 * x0)).sqrt();
    Ok(ErrorBoundReport {
        delta,
        r1,
        x0,
        tau_bar: tb,
        bound,
        guarantee: 2.0 * bound,
        asymptotic_valid: check.tau_threshold.is_some_and(|th| tb >= th),
        tau0: check.tau0,
        tau_threshold: check.tau_threshold,
        r2: check.r2,
        variant_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// sinh by its Taylor series, independent of the library routine.
    fn sinh_taylor(z: Complex64) -> Complex64 {
        let mut term = z;
        let mut sum = z;
        let z2 = z * z;
        for k in 1..200 {
            let k = k as f64;
            term = term * z2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
        }
        sum
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(spectral_multiplier(1.0, 0.0).is_err());
        assert!(spectral_multiplier(1.0, 1.0).is_err());
        assert!(spectral_multiplier(-1.0, 0.5).is_err());
        assert!(tau_bar(0.0, 1.0, 0.5).is_err());
        assert!(tau_bar(1e-3, -1.0, 0.5).is_err());
        assert!(error_bound(-1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn zero_frequency_limit() {
        for x0 in [0.1, 0.5, 0.9] {
            let p = spectral_multiplier(0.0, x0).unwrap();
            assert_eq!(p.magnitude, 1.0 - x0);
            let near = spectral_multiplier(1e-9, x0).unwrap();
            assert!((near.magnitude - (1.0 - x0)).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_taylor_oracle() {
        let mu = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let (tau, x0) = (4.0f64, 0.3);
        let s = tau.sqrt();
        let oracle = sinh_taylor(mu * ((1.0 - x0) * s)) / sinh_taylor(mu * s);
        let p = spectral_multiplier(tau, x0).unwrap();
        assert!((p.magnitude - oracle.norm()).abs() <= 1e-12);
        assert!((p.value - oracle).norm() <= 1e-12);
    }

    #[test]
    fn branches_agree_at_switch_points() {
        for x0 in [0.2, 0.5, 0.8] {
            let mu = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
            // series vs direct just below the series cut
            let tau = 0.999 * SERIES_LIMIT;
            let s = tau.sqrt();
            let direct = (mu * ((1.0 - x0) * s)).sinh() / (mu * s).sinh();
            let p = spectral_multiplier(tau, x0).unwrap();
            assert!((p.value - direct).norm() <= 1e-14);
            // factored vs direct just above the direct cut
            let tau = (1.001 * DIRECT_LIMIT).powi(2);
            let s = tau.sqrt();
            let direct = (mu * ((1.0 - x0) * s)).sinh() / (mu * s).sinh();
            let p = spectral_multiplier(tau, x0).unwrap();
            assert!((p.value - direct).norm() <= 1e-12 * direct.norm());
        }
    }

    #[test]
    fn large_frequency_asymptotics() {
        let x0 = 0.5;
        for tau in [50.0, 200.0, 1e3, 1e4] {
            let p = spectral_multiplier(tau, x0).unwrap();
            let approx = (-x0 * (tau / 2.0).sqrt()).exp();
            let ratio = p.magnitude / approx;
            assert!((0.5..=2.0).contains(&ratio), "tau {tau}: {ratio}");
        }
    }

    #[test]
    fn finite_far_out() {
        for tau in [1e5, 1e6, 1e7, 1e8] {
            let p = spectral_multiplier(tau, 0.3).unwrap();
            assert!(p.magnitude.is_finite() && p.value.re.is_finite() && p.value.im.is_finite());
            assert!(p.attenuation.is_finite());
        }
    }

    #[test]
    fn monotone_on_default_grid() {
        let grid = default_tau_grid();
        for x0 in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let pts: Vec<_> = grid
                .iter()
                .map(|&t| spectral_multiplier(t, x0).unwrap())
                .collect();
            for w in pts.windows(2) {
                assert!(
                    w[1].attenuation > w[0].attenuation,
                    "x0 {x0} tau {}",
                    w[1].tau
                );
                assert!(w[1].magnitude <= w[0].magnitude);
            }
        }
    }

    #[test]
    fn r2_scan_starts_at_reciprocal_limit() {
        let x0 = 0.4;
        let check = inverse_multiplier_bound_check(x0, &[0.0]).unwrap();
        assert!(check.r2 >= 1.0 / (1.0 - x0));
        assert!((log_inverse_multiplier(0.0, x0).unwrap().exp() - 1.0 / (1.0 - x0)).abs() < 1e-15);
    }

    #[test]
    fn no_violations_for_midpoint_sensor() {
        let grid: Vec<f64> = (0..20_000)
            .map(|i| 2.0 + i as f64 * 998.0 / 19_999.0)
            .collect();
        let check = inverse_multiplier_bound_check(0.5, &grid).unwrap();
        assert!(check.violations_factor8.is_empty());
        assert!(check.violations_factor9.is_empty());
    }

    #[test]
    fn tau0_is_first_admissible_point() {
        let x0 = 0.5;
        let grid = default_tau_grid();
        let check = inverse_multiplier_bound_check(x0, &grid).unwrap();
        let tau0 = check.tau0.unwrap();
        assert!((x0 * (tau0 / 2.0).sqrt()).exp() >= check.r2);
        let idx = grid.iter().position(|&t| t == tau0).unwrap();
        let prev = grid[idx - 1];
        assert!(prev < 2.0 || (x0 * (prev / 2.0).sqrt()).exp() < check.r2);
        let th = check.tau_threshold.unwrap();
        assert!(th >= tau0);
        assert!(th * th <= (x0 * (th / 2.0).sqrt()).exp());
    }

    #[test]
    fn tau_bar_examples() {
        assert_eq!(tau_bar(1.0 / 9.0, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(tau_bar(1.0, 1.0, 0.5).unwrap(), 0.0);
        let v = tau_bar(1e-4, 1.0, 0.5).unwrap();
        assert!((v - 98.3675862981).abs() < 1e-2);
        assert!(tau_bar(0.5e-4, 1.0, 0.5).unwrap() > v);
    }

    #[test]
    fn bound_examples() {
        let degenerate = error_bound(1.0 / 9.0, 1.0, 0.5).unwrap();
        assert_eq!(degenerate.bound, 1.0);
        assert!(!degenerate.asymptotic_valid);
        let r = error_bound(1e-4, 1.0, 0.5).unwrap();
        assert!((r.bound / 1.03346546307e-4 - 1.0).abs() < 1e-6);
        assert_eq!(r.guarantee, 2.0 * r.bound);
        assert!(error_bound(1e-5, 1.0, 0.5).unwrap().bound < r.bound);
        assert!(r.bound <= r.r1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn magnitude_in_unit_interval(tau in 0.0f64..1e4, x0 in 0.01f64..0.99) {
                let p = spectral_multiplier(tau, x0).unwrap();
                prop_assert!(p.magnitude >= 0.0 && p.magnitude <= 1.0);
                prop_assert!((p.magnitude - p.value.norm()).abs() <= 1e-14);
            }

            #[test]
            fn decreasing_in_sensor_depth(tau in 1e-3f64..1e3, x0 in 0.05f64..0.9, dx in 0.01f64..0.09) {
                let a = spectral_multiplier(tau, x0).unwrap().magnitude;
                let b = spectral_multiplier(tau, x0 + dx).unwrap().magnitude;
                prop_assert!(b < a);
            }

            #[test]
            fn bound_shrinks_with_noise(delta in 1e-12f64..1e-2, x0 in 0.1f64..0.9) {
                let a = error_bound_with(delta, 1.0, &dummy_check(x0)).unwrap();
                let b = error_bound_with(delta / 10.0, 1.0, &dummy_check(x0)).unwrap();
                prop_assert!(b.bound < a.bound);
                prop_assert!(a.bound <= 1.0);
            }
        }

        fn dummy_check(x0: f64) -> MultiplierBoundReport {
            MultiplierBoundReport {
                x0,
                r2: 1.0,
                tau0: None,
                tau_threshold: None,
                violations_factor8: vec![],
                violations_factor9: vec![],
                max_normalized_ratio: 0.0,
                points_checked: 0,
            }
        }
    }
}
