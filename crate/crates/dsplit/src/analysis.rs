//! Run traces and verification metrics.
//!
//! Holds the sampled time series produced by the drivers
//! ([`IntegrationTrace`]), the error functionals the experiments report
//! (relative solution error and norm drift), least-squares estimation of
//! empirical convergence order with a round-off-floor exclusion rule, and
//! energy-drift profiling.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::state::StateVector;

/// One sampled step of an integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Time at the end of the step (start time for a rejected attempt is
    /// implied by `t` of the previous accepted row).
    pub t: f64,
    /// Step size used (0 for the initial row).
    pub h: f64,
    /// Embedded error estimate, when the method provides one.
    pub err_est: Option<f64>,
    /// False for rejected adaptive attempts.
    pub accepted: bool,
    /// Cumulative field evaluations at the time of the sample.
    pub nfev: u64,
    /// Euclidean norm of the state at the sample.
    pub state_norm: f64,
}

/// Sampled time series of an integration run.
#[derive(Debug, Clone, Default)]
pub struct IntegrationTrace {
    rows: Vec<TraceRow>,
}

impl IntegrationTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Rows that advanced the solution.
    pub fn accepted_rows(&self) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(|r| r.accepted)
    }
}

/// `‖approx − exact‖ / ‖exact‖`.
pub fn relative_error<S: Scalar>(approx: &StateVector<S>, exact: &StateVector<S>) -> Result<f64> {
    exact.check_len(approx.len())?;
    let scale = exact.norm_l2();
    if scale == 0.0 {
        return Err(Error::Config(
            "relative error needs a reference with nonzero norm".into(),
        ));
    }
    Ok(approx.distance_l2(exact) / scale)
}

/// `|‖u_final‖ − ‖u_initial‖| / ‖u_initial‖` — drift of a conserved norm.
pub fn norm_error<S: Scalar>(u_final: &StateVector<S>, u_initial: &StateVector<S>) -> Result<f64> {
    let scale = u_initial.norm_l2();
    if scale == 0.0 {
        return Err(Error::Config(
            "norm drift needs an initial state with nonzero norm".into(),
        ));
    }
    Ok((u_final.norm_l2() - scale).abs() / scale)
}

/// Least-squares fit of `log err` against `log h`.
#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    /// Fitted convergence order.
    pub slope: f64,
    /// Fitted `log` intercept (the constant's logarithm).
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual_rms: f64,
    /// Points that survived the round-off-floor exclusion.
    pub points_used: usize,
}

/// Minimum usable points for a convergence fit.
pub const SLOPE_FIT_MIN_POINTS: usize = 3;

/// Error floor multiplier: points with `err < 100·ε·scale` are excluded.
pub const SLOPE_FLOOR_EPS_MULTIPLE: f64 = 100.0;

/// Fits the convergence order of `errs` against step sizes `hs`.
///
/// `scale` sets the round-off floor `100·ε·scale`; points at or below the
/// floor (and non-finite or non-positive entries) are excluded so a
/// machine-precision plateau cannot flatten the fit. Fewer than
/// [`SLOPE_FIT_MIN_POINTS`] surviving points is an error.
pub fn convergence_slope_scaled(hs: &[f64], errs: &[f64], scale: f64) -> Result<SlopeFit> {
    if hs.len() != errs.len() {
        return Err(Error::DimensionMismatch {
            expected: hs.len(),
            got: errs.len(),
        });
    }
    let floor = SLOPE_FLOOR_EPS_MULTIPLE * f64::EPSILON * scale.abs();
    let points: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|&(&h, &e)| h > 0.0 && h.is_finite() && e.is_finite() && e > floor)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    if points.len() < SLOPE_FIT_MIN_POINTS {
        return Err(Error::InsufficientData {
            have: points.len(),
            need: SLOPE_FIT_MIN_POINTS,
        });
    }
    let (slope, intercept, residual_rms) = line_fit(&points);
    Ok(SlopeFit {
        slope,
        intercept,
        residual_rms,
        points_used: points.len(),
    })
}

/// [`convergence_slope_scaled`] with unit scale, for relative errors.
pub fn convergence_slope(hs: &[f64], errs: &[f64]) -> Result<SlopeFit> {
    convergence_slope_scaled(hs, errs, 1.0)
}

/// Least-squares line through `(x, y)` pairs: slope, intercept, RMS residual.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData {
            have: xs.len(),
            need: 2,
        });
    }
    let points: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    Ok(line_fit(&points))
}

fn line_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    (slope, intercept, (ss_res / n).sqrt())
}

/// Per-sample absolute drift `|H(t) − H(t₀)|` of an observed functional.
pub fn energy_drift(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let Some(&(_, h0)) = samples.first() else {
        return Vec::new();
    };
    samples.iter().map(|&(t, h)| (t, (h - h0).abs())).collect()
}
