use super::quadrature::{adaptive_simpson, QUADRATURE_MAX_DEPTH, QUADRATURE_TOLERANCE};
use crate::error::Result;
use crate::problems::TncProblem;

/// Excess classification risk of the threshold classifier at `estimate`
/// under the uniform marginal: the integral of `|2 eta - 1|` between the
/// estimate and the true threshold.
///
/// With `D = |estimate - t|` and clamp distance `d_c`, the integrand is
/// `2 mu u^(k-1)` up to `d_c` and `2 cap` beyond, giving
/// `2 mu min(D, d_c)^k / k + 2 cap (D - d_c)^+`.
pub fn excess_risk(problem: &TncProblem, estimate: f64) -> Result<f64> {
    problem.interval().check(estimate)?;
    let dist = (estimate - problem.threshold()).abs();
    let (k, mu, cap) = (problem.k(), problem.mu(), problem.cap());
    if k == 1.0 {
        return Ok(2.0 * mu.min(cap) * dist);
    }
    let clamp = problem.clamp_distance();
    let power = dist.min(clamp);
    Ok(2.0 * mu * power.powf(k) / k + 2.0 * cap * (dist - clamp).max(0.0))
}

/// The same quantity by adaptive Simpson quadrature of `|2 eta - 1|`.
pub fn excess_risk_quadrature(problem: &TncProblem, estimate: f64) -> Result<f64> {
    problem.interval().check(estimate)?;
    let t = problem.threshold();
    let (a, b) = if estimate < t { (estimate, t) } else { (t, estimate) };
    Ok(adaptive_simpson(
        |x| (2.0 * problem.eta_unchecked(x) - 1.0).abs(),
        a,
        b,
        QUADRATURE_TOLERANCE,
        QUADRATURE_MAX_DEPTH,
    ))
}
