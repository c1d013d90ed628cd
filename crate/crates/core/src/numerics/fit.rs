//! Power-law fitting by ordinary least squares on log-log axes.

use crate::{LabError, Result};

/// Result of a log-log regression `y ≈ amplitude · t^exponent` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    pub amplitude: f64,
    /// RMS of log-residuals over the fit window.
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Fit `|y| = A t^p` over `t ∈ [window.0, window.1]`.
///
/// Requires at least `min_points` strictly positive samples in the window.
pub fn fit_power_law(
    ts: &[f64],
    ys: &[f64],
    window: (f64, f64),
    min_points: usize,
) -> Result<FitResult> {
    if ts.len() != ys.len() {
        return Err(LabError::Data("t/y length mismatch".into()));
    }
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for (&t, &y) in ts.iter().zip(ys) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(t > 0.0) || !y.is_finite() {
            return Err(LabError::Data(format!("non-positive abscissa or bad value at t={t}")));
        }
        if y == 0.0 {
            return Err(LabError::Data(format!("zero value at t={t}; cannot log-fit")));
        }
        lx.push(t.ln());
        ly.push(y.abs().ln());
    }
    let n = lx.len();
    if n < min_points {
        return Err(LabError::Data(format!(
            "need at least {min_points} points in fit window, found {n}"
        )));
    }
    let nf = n as f64;
    let mx = lx.iter().sum::<f64>() / nf;
    let my = ly.iter().sum::<f64>() / nf;
    let sxx: f64 = lx.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(&x, &y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / nf)
        .sqrt();
    Ok(FitResult {
        exponent: slope,
        amplitude: intercept.exp(),
        residual_rms: rms,
        window,
        n_points: n,
    })
}
