//! Bayes factors B10 for μ ≠ 0 against μ = 0.
//!
//! Everything is carried as ln B10. For the scale-invariant family the
//! evidence integral is taken in u = ln y, y = √n μ/σ, where dy/y = du and the
//! integrand 2 cosh(t y) e^{-y²/2} is smooth. The integration variable is the
//! offset v = u − ln y_lo from the lower limit, and the log-integrand is formed
//! as a difference from its value at y_lo, so the steep Gaussian tail that
//! appears once √n a/σ ≫ |t| stays resolvable in double precision.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{BartlettPrior, ExperimentSummary, PriorDensity, SlowlyVaryingPrior, TruncatedScalePrior};
use crate::numerics::{std_normal_pdf, LogQuadrature, QuadratureResult, DEFAULT_REL_TOL};

/// Relative slack allowed above e^{t²/2} before a result is rejected.
pub const BOUND_TOLERANCE: f64 = 1e-8;

/// Limit of the Bartlett-family Bayes factor as c → ∞. The integrand tends to
/// 2/y near y = 0, which contributes 2c to an integral normalized by 4c.
pub const BARTLETT_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactQuadrature,
    Laplace,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactQuadrature => "exact",
            Method::Laplace => "laplace",
            Method::MonteCarlo => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::ExactQuadrature),
            "laplace" => Ok(Method::Laplace),
            "mc" => Ok(Method::MonteCarlo),
            other => Err(Error::domain(format!("unknown method {other:?}; expected exact, laplace or mc"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BayesFactorResult {
    pub log_b10: f64,
    /// Error estimate on the linear scale divided by exp(log_b10); `None` when
    /// the method has no error model (Laplace).
    pub abs_error_estimate: Option<f64>,
    pub method: Method,
}

impl BayesFactorResult {
    pub fn b10(&self) -> f64 {
        self.log_b10.exp()
    }
}

/// p(t | H0), the N(0, 1) density.
pub fn evidence_null(t: f64) -> Result<f64> {
    std_normal_pdf(t)
}

/// e^{t²/2}, the supremum of B10 over all priors.
pub fn bayes_factor_upper_bound(t: f64) -> f64 {
    log_bayes_factor_upper_bound(t).exp()
}

pub fn log_bayes_factor_upper_bound(t: f64) -> f64 {
    0.5 * t * t
}

fn check_bound(t: f64, result: BayesFactorResult) -> Result<BayesFactorResult> {
    let bound = log_bayes_factor_upper_bound(t) + BOUND_TOLERANCE.ln_1p();
    if result.log_b10 > bound {
        return Err(Error::BoundViolated { log_b10: result.log_b10, bound });
    }
    Ok(result)
}

/// ln ∫_{y_lo}^{y_lo e^{span}} 2 cosh(t y) e^{-y²/2} dy/y.
fn log_scale_family_integral(t: f64, y_lo: f64, span: f64, rel_tol: f64) -> Result<QuadratureResult> {
    if !(y_lo > 0.0 && y_lo.is_finite()) {
        return Err(Error::domain(format!("lower integration limit √n·a/σ = {y_lo} is not a positive finite number")));
    }
    if !(span > 0.0 && span.is_finite()) {
        return Err(Error::domain(format!("support log-width {span} must be positive and finite")));
    }
    let ta = t.abs();
    // ln(1 + e^{-2|t|y}); constant when t = 0
    let soft = move |y: f64| if ta == 0.0 { LN_2 } else { (-2.0 * ta * y).exp().ln_1p() };
    let soft_lo = soft(y_lo);
    let anchor = -y_lo * (0.5 * y_lo - ta) + soft_lo;

    let log_integrand = move |v: f64| {
        let dy = y_lo * v.exp_m1();
        let y = y_lo + dy;
        dy * (ta - 0.5 * (y + y_lo)) + (soft(y) - soft_lo)
    };

    let mut quad = LogQuadrature::new(rel_tol);
    if ta > 0.0 {
        quad = quad.breakpoint(ta.ln() - y_lo.ln());
    }
    let r = quad.integrate(log_integrand, 0.0, span).map_err(|e| match e {
        Error::NoConvergence { best, rel_tol } => Error::NoConvergence {
            best: QuadratureResult { log_value: best.log_value + anchor, ..best },
            rel_tol,
        },
        other => other,
    })?;
    Ok(QuadratureResult {
        log_value: r.log_value + anchor,
        ..r
    })
}

fn exact_result(t: f64, integral: QuadratureResult, log_norm: f64) -> Result<BayesFactorResult> {
    check_bound(
        t,
        BayesFactorResult {
            log_b10: integral.log_value - log_norm,
            abs_error_estimate: Some(integral.abs_error_estimate),
            method: Method::ExactQuadrature,
        },
    )
}

/// B10 under the truncated scale-invariant prior, by adaptive quadrature at
/// the default relative tolerance.
pub fn bayes_factor_truncated(summary: &ExperimentSummary, prior: &TruncatedScalePrior) -> Result<BayesFactorResult> {
    bayes_factor_truncated_with_tolerance(summary, prior, DEFAULT_REL_TOL)
}

pub fn bayes_factor_truncated_with_tolerance(
    summary: &ExperimentSummary,
    prior: &TruncatedScalePrior,
    rel_tol: f64,
) -> Result<BayesFactorResult> {
    let y_lo = summary.precision_scale() * prior.a();
    let span = prior.log_ratio();
    let integral = log_scale_family_integral(summary.t(), y_lo, span, rel_tol)?;
    exact_result(summary.t(), integral, (2.0 * span).ln())
}

/// B10 for the prior e^{-c} ≤ |μ| ≤ e^{c} with normalization 1/(4c).
pub fn bayes_factor_bartlett(summary: &ExperimentSummary, c: f64) -> Result<BayesFactorResult> {
    bayes_factor_bartlett_with_tolerance(summary, c, DEFAULT_REL_TOL)
}

pub fn bayes_factor_bartlett_with_tolerance(
    summary: &ExperimentSummary,
    c: f64,
    rel_tol: f64,
) -> Result<BayesFactorResult> {
    let prior = BartlettPrior::new(c)?;
    let y_lo = summary.precision_scale() * (-prior.c()).exp();
    let integral = log_scale_family_integral(summary.t(), y_lo, 2.0 * prior.c(), rel_tol)?;
    exact_result(summary.t(), integral, (4.0 * prior.c()).ln())
}

/// Richardson extrapolation of the Bartlett sequence from c and 2c, assuming
/// B10(c) = L + K/c, which holds up to terms of order e^{-c}.
pub fn bartlett_limit_estimate(summary: &ExperimentSummary, c: f64) -> Result<f64> {
    let lo = bayes_factor_bartlett(summary, c)?.b10();
    let hi = bayes_factor_bartlett(summary, 2.0 * c)?.b10();
    Ok(2.0 * hi - lo)
}

/// √(2π) e^{t²/2} p(μ̂) σ/√n, the Laplace approximation around μ̂ = tσ/√n.
/// No error estimate is attached.
pub fn bayes_factor_laplace(summary: &ExperimentSummary, prior: &SlowlyVaryingPrior) -> Result<BayesFactorResult> {
    let mu_hat = summary.mu_hat();
    let p = prior.density(mu_hat);
    if p.is_nan() || p < 0.0 || p == f64::INFINITY {
        return Err(Error::domain(format!("prior density at mu_hat = {mu_hat} is {p}")));
    }
    if p == 0.0 {
        return Err(Error::Degenerate(format!(
            "prior density vanishes at mu_hat = {mu_hat}; the Laplace point is unsupported"
        )));
    }
    let t = summary.t();
    let log_b10 = 0.5 * t * t + 0.5 * (2.0 * PI).ln() + p.ln() + summary.sigma().ln() - 0.5 * summary.n().ln();
    Ok(BayesFactorResult {
        log_b10,
        abs_error_estimate: None,
        method: Method::Laplace,
    })
}
