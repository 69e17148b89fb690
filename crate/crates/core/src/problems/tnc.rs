use serde::{Deserialize, Serialize};

use super::Interval;
use crate::error::{invalid, Error, Result};

/// Largest TNC exponent accepted; larger exponents underflow `|x - t|^(k-1)`.
pub const MAX_TNC_EXPONENT: f64 = 8.0;

/// Which side of the threshold carries the `+` label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    PositiveRight,
    PositiveLeft,
}

impl Orientation {
    /// `+1` for points on the positive side of `t`, `-1` on the other, `0` at `t`.
    pub fn side(self, x: f64, t: f64) -> f64 {
        let s = if x > t {
            1.0
        } else if x < t {
            -1.0
        } else {
            0.0
        };
        match self {
            Orientation::PositiveRight => s,
            Orientation::PositiveLeft => -s,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::PositiveRight => Orientation::PositiveLeft,
            Orientation::PositiveLeft => Orientation::PositiveRight,
        }
    }
}

/// A one-dimensional threshold problem whose regression function follows a
/// clamped power law around the threshold:
///
/// ```text
/// eta(x) = 1/2 + s(x) * min(mu * |x - t|^(k-1), cap)
/// ```
///
/// The lower and upper Tsybakov constants coincide (`M = mu`), and `cap`
/// bounds the margin away from the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TncProblem {
    interval: Interval,
    threshold: f64,
    k: f64,
    mu: f64,
    cap: f64,
    orientation: Orientation,
}

impl TncProblem {
    pub fn new(
        interval: Interval,
        threshold: f64,
        k: f64,
        mu: f64,
        cap: f64,
        orientation: Orientation,
    ) -> Result<Self> {
        if !interval.contains(threshold) {
            return Err(Error::ThresholdOutsideInterval {
                t: threshold,
                lo: interval.lo(),
                hi: interval.hi(),
            });
        }
        if !(1.0..=MAX_TNC_EXPONENT).contains(&k) {
            return Err(invalid("k", format!("{k} not in [1, {MAX_TNC_EXPONENT}]")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("{mu} must be positive")));
        }
        if !(cap > 0.0 && cap <= 0.5) {
            return Err(invalid("cap", format!("{cap} not in (0, 1/2]")));
        }
        Ok(Self {
            interval,
            threshold,
            k,
            mu,
            cap,
            orientation,
        })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// `|eta(x) - 1/2|` as a function of the distance to the threshold.
    pub fn margin(&self, distance: f64) -> f64 {
        if distance == 0.0 {
            return 0.0;
        }
        (self.mu * distance.abs().powf(self.k - 1.0)).min(self.cap)
    }

    /// Distance from the threshold at which the margin reaches `cap`.
    ///
    /// Infinite when the margin never saturates (k = 1 with mu <= cap), zero
    /// when it saturates immediately (k = 1 with mu > cap).
    pub fn clamp_distance(&self) -> f64 {
        if self.k == 1.0 {
            if self.mu <= self.cap {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            (self.cap / self.mu).powf(1.0 / (self.k - 1.0))
        }
    }

    pub fn eta_at(&self, x: f64) -> Result<f64> {
        self.interval.check(x)?;
        Ok(self.eta_unchecked(x))
    }

    pub(crate) fn eta_unchecked(&self, x: f64) -> f64 {
        let s = self.orientation.side(x, self.threshold);
        0.5 + s * self.margin(x - self.threshold)
    }
}

pub fn make_tnc_problem(
    interval: Interval,
    t: f64,
    k: f64,
    mu: f64,
    cap: f64,
    orientation: Orientation,
) -> Result<TncProblem> {
    TncProblem::new(interval, t, k, mu, cap, orientation)
}

pub fn eta_at(problem: &TncProblem, x: f64) -> Result<f64> {
    problem.eta_at(x)
}
