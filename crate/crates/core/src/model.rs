//! The testing problem and the prior families on the unknown mean.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Sufficient summary of a sample of size `n` from N(μ, σ²) with σ known.
///
/// `n` is real-valued so that sample-size sweeps can use log-spaced grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSummary {
    t: f64,
    n: f64,
    sigma: f64,
}

impl ExperimentSummary {
    pub fn new(t: f64, n: f64, sigma: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::domain(format!("t must be finite, got {t}")));
        }
        check_n_sigma(n, sigma)?;
        Ok(Self { t, n, sigma })
    }

    /// Build from the sample mean rather than the t-statistic.
    pub fn from_sample_mean(xbar: f64, n: f64, sigma: f64) -> Result<Self> {
        Self::new(t_statistic(xbar, n, sigma)?, n, sigma)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// √n / σ, the factor taking μ to t₀.
    pub fn precision_scale(&self) -> f64 {
        self.n.sqrt() / self.sigma
    }

    /// Maximum-likelihood mean, tσ/√n.
    pub fn mu_hat(&self) -> f64 {
        self.t * self.sigma / self.n.sqrt()
    }
}

fn check_n_sigma(n: f64, sigma: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::domain(format!("sample size must be positive and finite, got {n}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma must be positive and finite, got {sigma}")));
    }
    Ok(())
}

/// √n·x̄/σ.
pub fn t_statistic(xbar: f64, n: f64, sigma: f64) -> Result<f64> {
    check_n_sigma(n, sigma)?;
    if !xbar.is_finite() {
        return Err(Error::domain(format!("sample mean must be finite, got {xbar}")));
    }
    Ok(n.sqrt() * xbar / sigma)
}

pub fn mu_hat(summary: &ExperimentSummary) -> f64 {
    summary.mu_hat()
}

/// Anything that can report a prior density for μ.
pub trait PriorDensity {
    fn density(&self, mu: f64) -> f64;
}

/// Density 1/(2 ln(b/a) |μ|) on a ≤ |μ| ≤ b, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedScalePrior {
    a: f64,
    b: f64,
}

impl TruncatedScalePrior {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(format!("support bounds must be positive and finite, got a = {a}, b = {b}")));
        }
        if a >= b {
            return Err(Error::domain(format!("support needs a < b, got a = {a}, b = {b}")));
        }
        Ok(Self { a, b })
    }

    /// 10^{-k} ≤ |μ| ≤ 10^{k}.
    pub fn symmetric_decades(k: u32) -> Result<Self> {
        let b = 10f64.powi(k as i32);
        Self::new(1.0 / b, b)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// ln(b/a).
    pub fn log_ratio(&self) -> f64 {
        (self.b / self.a).ln()
    }

    /// The normalizing constant 1/(2 ln(b/a)).
    pub fn normalization(&self) -> f64 {
        0.5 / self.log_ratio()
    }

    pub fn contains(&self, mu: f64) -> bool {
        let m = mu.abs();
        self.a <= m && m <= self.b
    }
}

impl PriorDensity for TruncatedScalePrior {
    fn density(&self, mu: f64) -> f64 {
        if self.contains(mu) {
            self.normalization() / mu.abs()
        } else {
            0.0
        }
    }
}

impl fmt::Display for TruncatedScalePrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= |mu| <= {}", self.a, self.b)
    }
}

pub fn prior_density(prior: &TruncatedScalePrior, mu: f64) -> f64 {
    prior.density(mu)
}

/// Density of t₀ = √n μ/σ when μ follows `prior`.
pub fn induced_t0_density(prior: &TruncatedScalePrior, n: f64, sigma: f64, t0: f64) -> Result<f64> {
    check_n_sigma(n, sigma)?;
    let jac = sigma / n.sqrt();
    Ok(prior.density(jac * t0) * jac)
}

/// The truncated prior on e^{-c} ≤ |μ| ≤ e^{c}, normalized by 1/(4c).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BartlettPrior {
    c: f64,
}

impl BartlettPrior {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("Bartlett half-width c must be positive and finite, got {c}")));
        }
        // e^{c} must stay representable
        if c >= f64::MAX.ln() {
            return Err(Error::domain(format!("Bartlett half-width c = {c} overflows e^c")));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn normalization(&self) -> f64 {
        0.25 / self.c
    }

    pub fn to_truncated(&self) -> TruncatedScalePrior {
        TruncatedScalePrior {
            a: (-self.c).exp(),
            b: self.c.exp(),
        }
    }
}

impl PriorDensity for BartlettPrior {
    fn density(&self, mu: f64) -> f64 {
        let m = mu.abs();
        if m > 0.0 && m.ln().abs() <= self.c {
            self.normalization() / m
        } else {
            0.0
        }
    }
}

/// A caller-supplied prior density, used by the Laplace approximation.
#[derive(Clone)]
pub struct SlowlyVaryingPrior {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl SlowlyVaryingPrior {
    pub fn new<F>(density: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { density: Arc::new(density) }
    }

    /// Uniform density 1/(2L) on [-L, L].
    pub fn uniform(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::domain(format!("uniform half-width must be positive, got {half_width}")));
        }
        let h = 0.5 / half_width;
        Ok(Self::new(move |mu: f64| if mu.abs() <= half_width { h } else { 0.0 }))
    }

    /// The same prior with its density multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = Arc::clone(&self.density);
        Self::new(move |mu| factor * inner(mu))
    }
}

impl PriorDensity for SlowlyVaryingPrior {
    fn density(&self, mu: f64) -> f64 {
        (self.density)(mu)
    }
}

impl From<TruncatedScalePrior> for SlowlyVaryingPrior {
    fn from(prior: TruncatedScalePrior) -> Self {
        Self::new(move |mu| prior.density(mu))
    }
}

impl From<BartlettPrior> for SlowlyVaryingPrior {
    fn from(prior: BartlettPrior) -> Self {
        Self::new(move |mu| prior.density(mu))
    }
}

impl fmt::Debug for SlowlyVaryingPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlowlyVaryingPrior").finish_non_exhaustive()
    }
}
