use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Least-squares fit of `ln e = intercept + slope ln T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
    pub used: usize,
    /// Points dropped because their error was zero.
    pub excluded: usize,
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept, max |residual|)`.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return Err(Error::InsufficientPoints {
            usable: points.len(),
            excluded: 0,
        });
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("points", "need at least two distinct abscissae"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    Ok((slope, intercept, max_residual))
}

/// Fit an empirical convergence rate on log-log axes.
///
/// Points with zero error are excluded and counted; the fit needs two
/// usable points with distinct budgets.
pub fn fit_rate_slope(points: &[(f64, f64)]) -> Result<RateFit> {
    let mut logs = Vec::with_capacity(points.len());
    let mut excluded = 0;
    for &(t, e) in points {
        if !(t >= 2.0 && t.is_finite()) {
            return Err(invalid("budget", format!("{t} must be a finite value >= 2")));
        }
        if !(e >= 0.0 && e.is_finite()) {
            return Err(invalid("error", format!("{e} must be finite and non-negative")));
        }
        if e == 0.0 {
            excluded += 1;
        } else {
            logs.push((t.ln(), e.ln()));
        }
    }
    if logs.len() < 2 {
        return Err(Error::InsufficientPoints {
            usable: logs.len(),
            excluded,
        });
    }
    let (slope, intercept, max_residual) = least_squares(&logs)?;
    Ok(RateFit {
        slope,
        intercept,
        max_residual,
        used: logs.len(),
        excluded,
    })
}
