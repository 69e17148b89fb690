use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use super::label::{check_budget, Label};
use crate::error::{invalid, Result};
use crate::problems::UcFunction;

/// Symmetric, zero-mean noise with positive density at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "kebab-case")]
pub enum NoiseDist {
    Gaussian { sigma: f64 },
    Uniform { halfwidth: f64 },
}

/// How a sign oracle turns the true coordinate derivative into a bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SignMode {
    /// `sign(g + z)` for `z` drawn from the noise distribution.
    AdditiveNoise(NoiseDist),
    /// `+` with probability `clamp(1/2 + slope g, 1/2 - cap, 1/2 + cap)`.
    DirectBernoulli { slope: f64, cap: f64 },
    /// `sign(g)`.
    Exact,
    /// `sign` of `g` rounded to `decimals` places; never flips a nonzero sign.
    Quantized { decimals: u32 },
}

impl SignMode {
    pub fn gaussian(sigma: f64) -> Self {
        SignMode::AdditiveNoise(NoiseDist::Gaussian { sigma })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SignMode::AdditiveNoise(NoiseDist::Gaussian { sigma }) if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(invalid("sigma", format!("{sigma} must be positive")))
            }
            SignMode::AdditiveNoise(NoiseDist::Uniform { halfwidth })
                if !(halfwidth > 0.0 && halfwidth.is_finite()) =>
            {
                Err(invalid("halfwidth", format!("{halfwidth} must be positive")))
            }
            SignMode::DirectBernoulli { slope, .. } if !(slope > 0.0 && slope.is_finite()) => {
                Err(invalid("slope", format!("{slope} must be positive")))
            }
            SignMode::DirectBernoulli { cap, .. } if !(cap > 0.0 && cap <= 0.5) => {
                Err(invalid("cap", format!("{cap} not in (0, 1/2]")))
            }
            _ => Ok(()),
        }
    }

    /// `|P(+) - 1/2|` given the true derivative `g`, without cancellation.
    pub fn margin(&self, g: f64) -> f64 {
        if g == 0.0 {
            return 0.0;
        }
        let a = g.abs();
        match *self {
            SignMode::AdditiveNoise(NoiseDist::Gaussian { sigma }) => {
                0.5 * libm::erf(a / (sigma * std::f64::consts::SQRT_2))
            }
            SignMode::AdditiveNoise(NoiseDist::Uniform { halfwidth }) => (a / (2.0 * halfwidth)).min(0.5),
            SignMode::DirectBernoulli { slope, cap } => (slope * a).min(cap),
            SignMode::Exact | SignMode::Quantized { .. } => 0.5,
        }
    }

    /// `P(+)` given the true derivative `g`.
    pub fn prob_positive(&self, g: f64) -> f64 {
        0.5 + g.signum() * self.margin(g)
    }

    /// True when the mode never reports the wrong sign of a nonzero derivative.
    pub fn is_sign_preserving(&self) -> bool {
        matches!(self, SignMode::Exact | SignMode::Quantized { .. })
    }

    fn draw(&self, g: f64, rng: &mut ChaCha8Rng) -> Label {
        match *self {
            SignMode::AdditiveNoise(dist) => {
                let z = match dist {
                    NoiseDist::Gaussian { sigma } => Normal::new(0.0, sigma).expect("validated sigma").sample(rng),
                    NoiseDist::Uniform { halfwidth } => Uniform::new_inclusive(-halfwidth, halfwidth)
                        .expect("validated halfwidth")
                        .sample(rng),
                };
                sign_or_coin(g + z, rng)
            }
            SignMode::DirectBernoulli { .. } => Label::from_positive(rng.random::<f64>() < self.prob_positive(g)),
            SignMode::Exact => sign_or_coin(g, rng),
            SignMode::Quantized { decimals } => {
                let scale = 10f64.powi(decimals as i32);
                let q = g.signum() * (g.abs() * scale).round() / scale;
                if q == 0.0 {
                    sign_or_coin(g, rng)
                } else {
                    Label::from_positive(q > 0.0)
                }
            }
        }
    }
}

fn sign_or_coin(v: f64, rng: &mut ChaCha8Rng) -> Label {
    if v > 0.0 {
        Label::Plus
    } else if v < 0.0 {
        Label::Minus
    } else {
        Label::from_positive(rng.random::<bool>())
    }
}

/// A source of noisy gradient-coordinate signs for a function.
pub trait SignSource {
    fn function(&self) -> &UcFunction;

    fn queries_used(&self) -> u64;

    /// One query at a point whose `j`-th partial derivative is `g`.
    ///
    /// Callers that already know the derivative (line adapters, cached
    /// residuals) use this to skip re-evaluating the gradient.
    fn sign_of_derivative(&mut self, g: f64) -> Result<Label>;

    fn sign(&mut self, x: &[f64], j: usize) -> Result<Label> {
        let g = self.function().grad_coord(x, j)?;
        self.sign_of_derivative(g)
    }
}

impl<S: SignSource + ?Sized> SignSource for &mut S {
    fn function(&self) -> &UcFunction {
        (**self).function()
    }

    fn queries_used(&self) -> u64 {
        (**self).queries_used()
    }

    fn sign_of_derivative(&mut self, g: f64) -> Result<Label> {
        (**self).sign_of_derivative(g)
    }
}

#[derive(Debug, Clone)]
pub struct SignOracle<'f> {
    function: &'f UcFunction,
    mode: SignMode,
    rng: ChaCha8Rng,
    queries_used: u64,
    budget: Option<u64>,
}

impl<'f> SignOracle<'f> {
    pub fn new(function: &'f UcFunction, mode: SignMode, rng: ChaCha8Rng) -> Result<Self> {
        mode.validate()?;
        Ok(Self {
            function,
            mode,
            rng,
            queries_used: 0,
            budget: None,
        })
    }

    pub fn with_budget_limit(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn mode(&self) -> SignMode {
        self.mode
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn sign_sample(&mut self, x: &[f64], j: usize) -> Result<Label> {
        self.sign(x, j)
    }
}

impl SignSource for SignOracle<'_> {
    fn function(&self) -> &UcFunction {
        self.function
    }

    fn queries_used(&self) -> u64 {
        self.queries_used
    }

    fn sign_of_derivative(&mut self, g: f64) -> Result<Label> {
        check_budget(self.queries_used, self.budget)?;
        self.queries_used += 1;
        Ok(self.mode.draw(g, &mut self.rng))
    }

    fn sign(&mut self, x: &[f64], j: usize) -> Result<Label> {
        check_budget(self.queries_used, self.budget)?;
        let g = self.function.grad_coord(x, j)?;
        self.sign_of_derivative(g)
    }
}

pub fn sign_sample(oracle: &mut SignOracle<'_>, x: &[f64], j: usize) -> Result<Label> {
    oracle.sign_sample(x, j)
}
