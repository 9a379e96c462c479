//! Monte Carlo estimate of B10 by averaging the likelihood ratio over prior
//! draws, as an independent check on the quadrature.
//!
//! Draws come from ChaCha20 (`rand_chacha::ChaCha20Rng`). The sample index
//! space is cut into fixed blocks of [`BLOCK`] draws; block j uses the
//! generator seeded with `seed_from_u64(seed)` on stream j. Blocks are reduced
//! in index order, so the estimate does not depend on how many threads run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bayes::{bayes_factor_truncated, BayesFactorResult};
use crate::error::{Error, Result};
use crate::model::{ExperimentSummary, TruncatedScalePrior};

pub const BLOCK: usize = 1 << 16;
pub const MIN_SAMPLES: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub log_b10: f64,
    /// Standard error of the B10 estimate divided by the estimate.
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub fn b10(&self) -> f64 {
        self.log_b10.exp()
    }
}

fn block_rng(seed: u64, block: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// One draw from the truncated prior: uniform sign, log-uniform magnitude.
#[inline]
fn draw(rng: &mut ChaCha20Rng, ln_a: f64, log_span: f64) -> f64 {
    let positive: bool = rng.random();
    let u: f64 = rng.random();
    let m = (ln_a + u * log_span).exp();
    if positive {
        m
    } else {
        -m
    }
}

fn blocks(count: u64) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let n_blocks = count.div_ceil(BLOCK as u64) as usize;
    (0..n_blocks).into_par_iter().map(move |j| {
        let start = j as u64 * BLOCK as u64;
        (j as u64, (count - start).min(BLOCK as u64) as usize)
    })
}

/// `count` i.i.d. draws of μ from the truncated scale-invariant prior.
pub fn sample_prior(prior: &TruncatedScalePrior, seed: u64, count: usize) -> Vec<f64> {
    let ln_a = prior.a().ln();
    let span = prior.log_ratio();
    let (a, b) = (prior.a(), prior.b());
    let chunks: Vec<Vec<f64>> = blocks(count as u64)
        .map(|(j, len)| {
            let mut rng = block_rng(seed, j);
            (0..len)
                // exp(ln a + span) can land an ulp outside [a, b]
                .map(|_| {
                    let mu = draw(&mut rng, ln_a, span);
                    mu.signum() * mu.abs().clamp(a, b)
                })
                .collect()
        })
        .collect();
    chunks.concat()
}

/// Running mean and sum of squared deviations of e^{l_i − scale}.
#[derive(Debug, Clone, Copy)]
struct Moments {
    count: f64,
    scale: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn from_logs(logs: &[f64]) -> Self {
        let scale = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut m = Moments { count: 0.0, scale, mean: 0.0, m2: 0.0 };
        if scale == f64::NEG_INFINITY {
            m.count = logs.len() as f64;
            return m;
        }
        for &l in logs {
            let w = (l - scale).exp();
            m.count += 1.0;
            let d = w - m.mean;
            m.mean += d / m.count;
            m.m2 += d * (w - m.mean);
        }
        m
    }

    fn rescaled(self, scale: f64) -> Self {
        if self.scale == f64::NEG_INFINITY {
            return Moments { scale, mean: 0.0, m2: 0.0, ..self };
        }
        let f = (self.scale - scale).exp();
        Moments { count: self.count, scale, mean: self.mean * f, m2: self.m2 * f * f }
    }

    fn merge(self, other: Self) -> Self {
        let scale = self.scale.max(other.scale);
        if scale == f64::NEG_INFINITY {
            return Moments { count: self.count + other.count, ..self };
        }
        let x = self.rescaled(scale);
        let y = other.rescaled(scale);
        let count = x.count + y.count;
        let d = y.mean - x.mean;
        Moments {
            count,
            scale,
            mean: x.mean + d * y.count / count,
            m2: x.m2 + y.m2 + d * d * x.count * y.count / count,
        }
    }
}

/// Importance-sampling estimate of B10 with the prior as proposal.
pub fn mc_bayes_factor(
    summary: &ExperimentSummary,
    prior: &TruncatedScalePrior,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::domain(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    let t = summary.t();
    let scale = summary.precision_scale();
    let ln_a = prior.a().ln();
    let span = prior.log_ratio();

    let parts: Vec<Moments> = blocks(samples)
        .map(|(j, len)| {
            let mut rng = block_rng(seed, j);
            let logs: Vec<f64> = (0..len)
                .map(|_| {
                    let y = scale * draw(&mut rng, ln_a, span);
                    // ln[φ(t − y)/φ(t)] = t y − y²/2
                    -y * (0.5 * y - t)
                })
                .collect();
            Moments::from_logs(&logs)
        })
        .collect();
    let total = parts.into_iter().reduce(Moments::merge).expect("at least one block");

    if total.scale == f64::NEG_INFINITY || total.mean <= 0.0 {
        return Err(Error::Degenerate(format!(
            "every likelihood term underflowed (t = {t}, n = {}, prior {prior})",
            summary.n()
        )));
    }
    let variance = total.m2 / (total.count - 1.0);
    let std_error = (variance / total.count).sqrt() / total.mean;
    Ok(McEstimate {
        log_b10: total.scale + total.mean.ln(),
        std_error,
        samples,
        seed,
    })
}

/// Outcome of comparing one quadrature value against a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub summary: ExperimentSummary,
    pub prior: TruncatedScalePrior,
    pub exact: BayesFactorResult,
    pub mc: McEstimate,
    /// (B_exact − B_mc) / (B_mc · combined relative error).
    pub z: f64,
}

impl CrossCheck {
    pub fn passed(&self, max_z: f64) -> bool {
        self.z.abs() <= max_z
    }
}

/// z-score of the quadrature value against the Monte Carlo estimate. The
/// quadrature's own error estimate is folded into the denominator.
pub fn cross_check(
    summary: &ExperimentSummary,
    prior: &TruncatedScalePrior,
    samples: u64,
    seed: u64,
) -> Result<CrossCheck> {
    let exact = bayes_factor_truncated(summary, prior)?;
    let mc = mc_bayes_factor(summary, prior, samples, seed)?;
    let quad_err = exact.abs_error_estimate.unwrap_or(0.0);
    let combined = (mc.std_error * mc.std_error + quad_err * quad_err).sqrt();
    let ratio_minus_one = (exact.log_b10 - mc.log_b10).exp_m1();
    let z = if combined > 0.0 {
        ratio_minus_one / combined
    } else if ratio_minus_one == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(ratio_minus_one)
    };
    Ok(CrossCheck { summary: *summary, prior: *prior, exact, mc, z })
}

/// Draw a random configuration where μ̂ lies within [a/10, 10 b], so that the
/// prior-as-proposal estimator is informative.
///
/// Ranges: |t| ∈ [0.5, 4] with random sign, σ log-uniform on [0.1, 10],
/// a = 10^i and b = 10^j for integers −5 ≤ i < j ≤ 5, n ∈ [1, 10^12].
pub fn random_informative_config<R: Rng>(rng: &mut R) -> (ExperimentSummary, TruncatedScalePrior) {
    loop {
        let i = rng.random_range(-5..5);
        let j = rng.random_range(i + 1..=5);
        let (a, b) = (10f64.powi(i), 10f64.powi(j));
        let t_abs = rng.random_range(0.5..4.0);
        let t = if rng.random::<bool>() { t_abs } else { -t_abs };
        let sigma = 10f64.powf(rng.random_range(-1.0..1.0));
        let log_mu = rng.random_range((a / 10.0).log10()..(10.0 * b).log10());
        let mu_hat = 10f64.powf(log_mu);
        let n = (t_abs * sigma / mu_hat).powi(2);
        if !(1.0..=1e12).contains(&n) {
            continue;
        }
        let summary = ExperimentSummary::new(t, n, sigma).expect("valid by construction");
        let prior = TruncatedScalePrior::new(a, b).expect("valid by construction");
        return (summary, prior);
    }
}

/// Cross-check `trials` random informative configurations. The configuration
/// stream and the per-trial Monte Carlo seeds are derived from `seed`.
pub fn validate(trials: usize, seed: u64, samples: u64) -> Result<Vec<CrossCheck>> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let configs: Vec<_> = (0..trials)
        .map(|_| {
            let (s, p) = random_informative_config(&mut rng);
            let mc_seed: u64 = rng.random();
            (s, p, mc_seed)
        })
        .collect();
    configs
        .iter()
        .map(|(s, p, mc_seed)| cross_check(s, p, samples, *mc_seed))
        .collect()
}
