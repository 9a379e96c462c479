//! Adaptive Gauss–Kronrod (7, 15) quadrature for integrands supplied as a
//! logarithm.
//!
//! Every segment keeps its own scale: the maximum of the log-integrand over its
//! Kronrod nodes. Values and error estimates are stored relative to that
//! scale and only ever combined through log-sum-exp, so an integral of
//! e^{-10^9} is as easy to obtain as one of order unity.

use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 10_000;

// 15-point Kronrod abscissae on [-1, 1] (positive half, the odd entries are
// the 7-point Gauss nodes) and matching weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of a log-space integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    /// ln of the integral.
    pub log_value: f64,
    /// Estimated absolute error divided by exp(log_value).
    pub abs_error_estimate: f64,
    /// Number of segments in the final partition.
    pub subdivisions: usize,
}

impl QuadratureResult {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    /// ln of the factor that `value` and `error` are measured in.
    scale: f64,
    value: f64,
    error: f64,
}

impl Segment {
    fn log_error(&self) -> f64 {
        if self.error > 0.0 {
            self.scale + self.error.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.lo + self.hi);
        mid > self.lo && mid < self.hi
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn gauss_kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Segment>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let mut logs = [0.0f64; 15];
    logs[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        logs[j] = f(center - dx);
        logs[14 - j] = f(center + dx);
    }
    if let Some(bad) = logs.iter().find(|v| v.is_nan() || **v == f64::INFINITY) {
        return Err(Error::domain(format!(
            "log-integrand returned {bad} on [{lo}, {hi}]"
        )));
    }

    let scale = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return Ok(Segment { lo, hi, scale, value: 0.0, error: 0.0 });
    }

    let mut vals = [0.0f64; 15];
    for (v, l) in vals.iter_mut().zip(logs.iter()) {
        *v = (l - scale).exp();
    }

    let fc = vals[7];
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    for j in 0..7 {
        let pair = vals[j] + vals[14 - j];
        res_k += WGK[j] * pair;
        res_abs += WGK[j] * (vals[j].abs() + vals[14 - j].abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((vals[j] - mean).abs() + (vals[14 - j] - mean).abs());
    }

    let width = half.abs();
    let error = rescale_error((res_k - res_g) * half, res_abs * width, res_asc * width);
    Ok(Segment {
        lo,
        hi,
        scale,
        value: res_k * half,
        error,
    })
}

/// Sum of `value` and `error` over the segments, on a common scale.
/// Returns (scale, value, error).
fn totals(segments: &[Segment]) -> (f64, f64, f64) {
    let scale = segments
        .iter()
        .filter(|s| s.value > 0.0)
        .map(|s| s.scale)
        .fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return (scale, 0.0, 0.0);
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for s in segments {
        let w = (s.scale - scale).exp();
        value += s.value * w;
        error += s.error * w;
    }
    (scale, value, error)
}

/// Adaptive quadrature of exp(log_integrand) with optional fixed breakpoints.
#[derive(Debug, Clone)]
pub struct LogQuadrature {
    rel_tol: f64,
    max_subdivisions: usize,
    breakpoints: Vec<f64>,
}

impl Default for LogQuadrature {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
            breakpoints: Vec::new(),
        }
    }
}

impl LogQuadrature {
    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn max_subdivisions(mut self, max: usize) -> Self {
        self.max_subdivisions = max;
        self
    }

    /// Split the interval at `u` before adapting. Points outside the open
    /// integration interval are ignored.
    pub fn breakpoint(mut self, u: f64) -> Self {
        self.breakpoints.push(u);
        self
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn integrate<F>(&self, log_integrand: F, lo: f64, hi: f64) -> Result<QuadratureResult>
    where
        F: Fn(f64) -> f64,
    {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!("integration limits must be finite, got [{lo}, {hi}]")));
        }
        if lo >= hi {
            return Err(Error::domain(format!("empty integration interval [{lo}, {hi}]")));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::domain(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be positive"));
        }

        let mut cuts: Vec<f64> = self
            .breakpoints
            .iter()
            .copied()
            .filter(|u| *u > lo && *u < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(lo);
        edges.extend(cuts);
        edges.push(hi);

        let mut segments = edges
            .windows(2)
            .map(|w| gauss_kronrod(&log_integrand, w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;

        loop {
            let (scale, value, error) = totals(&segments);
            let finish = |segments: &[Segment]| QuadratureResult {
                log_value: scale + value.ln(),
                abs_error_estimate: if value > 0.0 { error / value } else { 0.0 },
                subdivisions: segments.len(),
            };
            if value <= 0.0 {
                // Identically zero to working precision.
                return Ok(QuadratureResult {
                    log_value: f64::NEG_INFINITY,
                    abs_error_estimate: 0.0,
                    subdivisions: segments.len(),
                });
            }
            if error <= self.rel_tol * value {
                return Ok(finish(&segments));
            }

            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| s.splittable())
                .max_by(|(_, x), (_, y)| x.log_error().total_cmp(&y.log_error()))
                .map(|(i, _)| i);
            let Some(worst) = worst else {
                return Err(Error::NoConvergence { best: finish(&segments), rel_tol: self.rel_tol });
            };
            if segments.len() >= self.max_subdivisions {
                return Err(Error::NoConvergence { best: finish(&segments), rel_tol: self.rel_tol });
            }

            let s = segments[worst];
            let mid = 0.5 * (s.lo + s.hi);
            let left = gauss_kronrod(&log_integrand, s.lo, mid)?;
            let right = gauss_kronrod(&log_integrand, mid, s.hi)?;
            segments[worst] = left;
            segments.insert(worst + 1, right);
        }
    }
}

/// ln ∫_{u_lo}^{u_hi} exp(log_integrand(u)) du with relative tolerance `rel_tol`.
pub fn integrate_log_space<F>(log_integrand: F, u_lo: f64, u_hi: f64, rel_tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    LogQuadrature::new(rel_tol).integrate(log_integrand, u_lo, u_hi)
}
