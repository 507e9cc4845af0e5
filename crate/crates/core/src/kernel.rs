//! Reinforcement kernel.
//!
//! `f(0) = 0` and `f(x) = ln x + g(x; mu, sigma)` for `x > 1`, where `g` is the
//! Log-Cauchy density. The density enters as a deterministic value; all
//! per-agent variation comes from the choice of `mu` and `sigma`.

use core::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KernelError {
    #[error("kernel argument {x} is outside the domain (expected 0 or a value greater than 1)")]
    Domain { x: f64 },
    #[error("invalid kernel parameters mu={mu}, sigma={sigma} (sigma must be > 0, both finite)")]
    InvalidParams { mu: f64, sigma: f64 },
    #[error("invalid scan grid [{lo}, {hi}] with {steps} steps (need 1 < lo < hi, steps >= 2)")]
    InvalidGrid { lo: f64, hi: f64, steps: usize },
}

/// Location and scale of the Log-Cauchy perturbation.
///
/// Always valid once constructed: `sigma > 0` and both values finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    mu: f64,
    sigma: f64,
}

impl KernelParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, KernelError> {
        if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(KernelError::InvalidParams { mu, sigma });
        }
        Ok(KernelParams { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { mu: 0.0, sigma: 1.0 }
    }
}

/// Log-Cauchy density `1 / (x * pi * sigma * (1 + ((ln x - mu) / sigma)^2))`, defined for `x > 1`.
pub fn log_cauchy_pdf(x: f64, params: &KernelParams) -> Result<f64, KernelError> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(KernelError::Domain { x });
    }
    Ok(pdf_unchecked(x, params))
}

#[inline]
fn pdf_unchecked(x: f64, params: &KernelParams) -> f64 {
    let z = (libm::log(x) - params.mu) / params.sigma;
    1.0 / (x * PI * params.sigma * (1.0 + z * z))
}

/// The reinforcement kernel `f`.
///
/// Returns exactly `0.0` for `x == 0`. Values in `(0, 1]`, negative values and
/// non-finite values are rejected: a weight in that range is always a bug
/// upstream.
pub fn reinforcement(x: f64, params: &KernelParams) -> Result<f64, KernelError> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if !(x > 1.0) || !x.is_finite() {
        return Err(KernelError::Domain { x });
    }
    Ok(libm::log(x) + pdf_unchecked(x, params))
}

/// Result of scanning `f` over a geometric grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    pub monotone: bool,
    /// First grid point whose sample does not exceed the previous one.
    pub first_violation: Option<f64>,
    pub steps: usize,
}

/// Samples `f` on `steps` geometrically spaced points in `[lo, hi]` and checks
/// that consecutive samples strictly increase.
///
/// Monotonicity of `f` does not hold for every `(mu, sigma)`: a narrow density
/// spike near `x = 1` can fall faster than `ln x` rises.
pub fn validate_kernel_params(
    params: &KernelParams,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<MonotonicityReport, KernelError> {
    if !(lo > 1.0) || !(hi > lo) || !hi.is_finite() || steps < 2 {
        return Err(KernelError::InvalidGrid { lo, hi, steps });
    }
    let log_ratio = libm::log(hi / lo);
    let last = (steps - 1) as f64;
    let point = |i: usize| {
        if i == steps - 1 {
            hi
        } else {
            lo * libm::exp(log_ratio * i as f64 / last)
        }
    };

    let mut prev = reinforcement(lo, params)?;
    for i in 1..steps {
        let x = point(i);
        let y = reinforcement(x, params)?;
        if y <= prev {
            return Ok(MonotonicityReport {
                monotone: false,
                first_violation: Some(x),
                steps,
            });
        }
        prev = y;
    }
    Ok(MonotonicityReport {
        monotone: true,
        first_violation: None,
        steps,
    })
}
