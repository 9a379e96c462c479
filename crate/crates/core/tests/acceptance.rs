#![allow(clippy::excessive_precision)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lindley::bayes::{
    bartlett_limit_estimate, bayes_factor_bartlett, bayes_factor_laplace, bayes_factor_truncated,
    log_bayes_factor_upper_bound, BARTLETT_LIMIT, BOUND_TOLERANCE,
};
use lindley::frequentist::p_value;
use lindley::model::{induced_t0_density, ExperimentSummary, SlowlyVaryingPrior, TruncatedScalePrior};
use lindley::montecarlo::validate;
use lindley::sweep::{drop_onset, log_grid, run_sweep, series, SweepConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    pass: bool,
    detail: String,
}

fn decade_support<R: Rng>(rng: &mut R) -> TruncatedScalePrior {
    let i = rng.random_range(-5..5);
    let j = rng.random_range(i + 1..=5);
    TruncatedScalePrior::new(10f64.powi(i), 10f64.powi(j)).unwrap()
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..panels {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

fn upper_bound() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let configs: Vec<_> = (0..10_000)
        .map(|_| {
            let t = rng.random_range(-5.0..=5.0);
            let n = log_uniform(&mut rng, 1.0, 1e12);
            let sigma = log_uniform(&mut rng, 0.1, 10.0);
            (ExperimentSummary::new(t, n, sigma).unwrap(), decade_support(&mut rng))
        })
        .collect();
    let worst = configs
        .par_iter()
        .map(|(s, p)| {
            let r = bayes_factor_truncated(s, p).unwrap();
            r.b10() / log_bayes_factor_upper_bound(s.t()).exp()
        })
        .reduce(|| 0.0, f64::max);
    Outcome {
        pass: worst <= 1.0 + BOUND_TOLERANCE,
        detail: format!("10000 configurations, max B10 / e^(t^2/2) = {worst:.12}"),
    }
}

fn rescaling() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let configs: Vec<_> = (0..1000)
        .map(|_| {
            let t = rng.random_range(-5.0..=5.0);
            let n = log_uniform(&mut rng, 1.0, 1e12);
            let sigma = log_uniform(&mut rng, 0.1, 10.0);
            let k = log_uniform(&mut rng, 1e-3, 1e3);
            (t, n, sigma, decade_support(&mut rng), k)
        })
        .collect();
    let diffs: Vec<(f64, f64)> = configs
        .par_iter()
        .map(|&(t, n, sigma, p, k)| {
            let x = bayes_factor_truncated(&ExperimentSummary::new(t, n, sigma).unwrap(), &p).unwrap();
            let q = TruncatedScalePrior::new(p.a() / k, p.b() / k).unwrap();
            let y = bayes_factor_truncated(&ExperimentSummary::new(t, k * k * n, sigma).unwrap(), &q).unwrap();
            ((x.log_b10 - y.log_b10).abs(), x.log_b10.abs())
        })
        .collect();
    // log B10 reaches -1e10 here; the inputs a/k and k²n are themselves rounded,
    // so the tolerance applies to the larger of 1 and |log B10|
    let worst_scaled = diffs.iter().map(|&(d, m)| d / m.max(1.0)).fold(0.0, f64::max);
    let worst_abs = diffs.iter().map(|d| d.0).fold(0.0, f64::max);
    let worst_abs_moderate = diffs.iter().filter(|d| d.1 <= 1.0).map(|d| d.0).fold(0.0, f64::max);
    Outcome {
        pass: worst_scaled <= 1e-12,
        detail: format!(
            "1000 configurations, max |diff| / max(1, |log B10|) = {worst_scaled:.3e}, \
             max |diff| = {worst_abs:.3e} ({worst_abs_moderate:.3e} where |log B10| <= 1)"
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let checks = validate(50, 7, 10_000_000).unwrap();
    let passed = checks.iter().filter(|c| c.passed(3.0)).count();
    let worst = checks.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
    Outcome {
        pass: passed as f64 >= 0.98 * checks.len() as f64,
        detail: format!("{passed}/50 within 3 standard errors, max |z| = {worst:.3}"),
    }
}

fn plateau() -> Outcome {
    let prior = TruncatedScalePrior::new(1e-5, 1e5).unwrap();
    let values: Vec<f64> = log_grid(1.0, 1e6, 61)
        .unwrap()
        .into_iter()
        .map(|n| bayes_factor_truncated(&ExperimentSummary::new(3.0, n, 1.0).unwrap(), &prior).unwrap().log_b10)
        .collect();
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let variation = (hi - lo) / values[0].abs();
    let flat = variation < 0.01;

    let config = SweepConfig {
        t_values: vec![3.0],
        n_grid: log_grid(1.0, 1e12, 400).unwrap(),
        ..SweepConfig::default()
    };
    let rows = run_sweep(&config).unwrap();
    let mut onsets: Vec<(f64, Option<f64>)> = series(&rows).into_iter().map(|s| (s[0].b, drop_onset(s, 0.1))).collect();
    onsets.sort_by(|x, y| x.0.total_cmp(&y.0));
    let onsets: Vec<f64> = onsets.into_iter().map(|o| o.1.unwrap_or(f64::INFINITY)).collect();
    let ordered = onsets.windows(2).all(|w| w[0] <= w[1]);

    let shown: Vec<String> = onsets.iter().map(|o| format!("{o:.3e}")).collect();
    Outcome {
        pass: flat && ordered,
        detail: format!(
            "log B10 at t = 3 over n in [1, 1e6]: {:.4} .. {:.4}, variation {:.2}% (needs < 1%); \
             10% drop onsets for k = 1..5: [{}] {}",
            values[0],
            values[values.len() - 1],
            100.0 * variation,
            shown.join(", "),
            if ordered { "non-decreasing" } else { "NOT ordered" }
        ),
    }
}

fn laplace() -> Outcome {
    let half_width = 2.0;
    let prior = SlowlyVaryingPrior::uniform(half_width).unwrap();
    let mut worst_ratio = 0.0f64;
    let mut worst_match = 0.0f64;
    for t in [0.5, 1.0, 2.0, 3.0] {
        for n in [100.0, 400.0, 1e4, 1e6, 1e8] {
            let sigma = 1.0;
            let s = ExperimentSummary::new(t, n, sigma).unwrap();
            let width = sigma / n.sqrt();
            assert!(s.mu_hat().abs() + 10.0 * width <= half_width);

            let b = bayes_factor_laplace(&s, &prior).unwrap();
            let b4 = bayes_factor_laplace(&ExperimentSummary::new(t, 4.0 * n, sigma).unwrap(), &prior).unwrap();
            worst_ratio = worst_ratio.max((b4.b10() / b.b10() - 0.5).abs());

            // direct integral of p(μ) φ(t − √n μ/σ) / φ(t) around the peak
            let integrand = |mu: f64| {
                let d = t - mu / width;
                0.5 / half_width * (-0.5 * d * d + 0.5 * t * t).exp()
            };
            let lo = (s.mu_hat() - 15.0 * width).max(-half_width);
            let hi = (s.mu_hat() + 15.0 * width).min(half_width);
            let direct = simpson(integrand, lo, hi, 20_000);
            worst_match = worst_match.max((b.b10() / direct - 1.0).abs());
        }
    }
    Outcome {
        pass: worst_ratio <= 1e-14 && worst_match < 0.01,
        detail: format!(
            "max |B(4n)/B(n) - 1/2| = {worst_ratio:.2e}, max relative gap to direct quadrature = {worst_match:.2e}"
        ),
    }
}

fn bartlett() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for t in [1.0, 2.0, 3.0] {
        let s = ExperimentSummary::new(t, 1.0, 1.0).unwrap();
        let dense: Vec<f64> = (10..=400).step_by(10).map(|c| bayes_factor_bartlett(&s, c as f64).unwrap().b10()).collect();
        let above = dense.iter().all(|&b| b > 0.25);
        let seq: Vec<f64> = [10.0, 20.0, 40.0, 80.0].iter().map(|&c| bayes_factor_bartlett(&s, c).unwrap().b10()).collect();
        let diffs: Vec<f64> = seq.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let shrinking = diffs.windows(2).all(|d| d[1] < d[0]);
        let limit = bartlett_limit_estimate(&s, 80.0).unwrap();
        let converged = (limit - BARTLETT_LIMIT).abs() < 1e-6;
        ok &= above && shrinking && converged;
        parts.push(format!(
            "t = {t}: B(10..80) = [{:.6}, {:.6}, {:.6}, {:.6}], limit {limit:.9}",
            seq[0], seq[1], seq[2], seq[3]
        ));
    }
    Outcome {
        pass: ok,
        detail: format!("{}; recorded limit {BARTLETT_LIMIT}", parts.join("; ")),
    }
}

const P_VALUES: &[(f64, f64)] = &[
    (-8.0, 1.244192114854356824703e-15),
    (-6.5, 8.032001167718235616692e-11),
    (-5.0, 5.733031437583878233475e-7),
    (-4.0, 0.00006334248366623984250754),
    (-3.0, 0.002699796063260189053304),
    (-2.5, 0.01241933065155227033396),
    (-1.959964, 0.04999999819288480398877),
    (-1.0, 0.3173105078629141028295),
    (-0.5, 0.6170750774519737927246),
    (0.0, 1.0),
    (0.25, 0.8025873486341525515183),
    (0.5, 0.6170750774519737927246),
    (1.0, 0.3173105078629141028295),
    (1.5, 0.133614402537716132009),
    (2.0, 0.04550026389635841440057),
    (2.5, 0.01241933065155227033396),
    (3.0, 0.002699796063260189053304),
    (3.5, 0.0004652581580710500726999),
    (4.0, 0.00006334248366623984250754),
    (5.0, 5.733031437583878233475e-7),
    (6.0, 1.973175290075396281402e-9),
    (7.0, 2.559625087771670008767e-12),
    (8.0, 1.244192114854356824703e-15),
];

fn frequentist() -> Outcome {
    // the signature itself carries no n or σ
    let f: fn(f64) -> lindley::Result<f64> = p_value;
    let worst = P_VALUES.iter().map(|&(t, p)| (f(t).unwrap() - p).abs()).fold(0.0, f64::max);
    Outcome {
        pass: worst <= 1e-10,
        detail: format!("{} reference points on [-8, 8], max abs error {worst:.2e}", P_VALUES.len()),
    }
}

fn induced_prior() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mut worst_identity = 0.0f64;
    let mut worst_mass = 0.0f64;
    for _ in 0..200 {
        let prior = decade_support(&mut rng);
        let sigma = log_uniform(&mut rng, 0.1, 10.0);
        let n0 = log_uniform(&mut rng, 1.0, 1e6);
        let mu = log_uniform(&mut rng, prior.a(), prior.b());
        let t0 = n0.sqrt() * mu / sigma;
        let reference = induced_t0_density(&prior, n0, sigma, t0).unwrap();
        for _ in 0..10 {
            // any n that keeps σ t0/√n inside the support
            let m = log_uniform(&mut rng, prior.a(), prior.b());
            let n = (t0 * sigma / m).powi(2);
            let d = induced_t0_density(&prior, n, sigma, t0).unwrap();
            worst_identity = worst_identity.max((d / reference - 1.0).abs());
        }

        let scale = n0.sqrt() / sigma;
        // σ t/√n at the exact endpoints can round just outside [a, b]
        let (lo, hi) = (scale * prior.a() * (1.0 + 1e-15), scale * prior.b() * (1.0 - 1e-15));
        let pieces = 8 * (hi / lo).log10().ceil() as usize;
        let step = (hi / lo).powf(1.0 / pieces as f64);
        let one_side: f64 = (0..pieces)
            .map(|i| {
                let x = lo * step.powi(i as i32);
                let y = if i + 1 == pieces { hi } else { x * step };
                simpson(|t| induced_t0_density(&prior, n0, sigma, t).unwrap(), x, y, 400)
            })
            .sum();
        worst_mass = worst_mass.max((2.0 * one_side - 1.0).abs());
    }
    Outcome {
        pass: worst_identity <= 1e-13 && worst_mass <= 1e-9,
        detail: format!("max relative spread across n {worst_identity:.2e}, max |mass - 1| {worst_mass:.2e}"),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 upper bound", upper_bound, Duration::from_secs(120)),
        ("2 n-rescaling identity", rescaling, Duration::from_secs(60)),
        ("3 quadrature vs Monte Carlo", oracle_equivalence, Duration::from_secs(300)),
        ("4 plateau and drop onset", plateau, Duration::from_secs(60)),
        ("5 Laplace law", laplace, Duration::from_secs(10)),
        ("6 Bartlett lower bound", bartlett, Duration::from_secs(10)),
        ("7 p-value", frequentist, Duration::from_secs(10)),
        ("8 induced prior", induced_prior, Duration::from_secs(10)),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= budget;
        failures += usize::from(!pass);
        println!(
            "criterion {name}: {} [{:.2}s of {}s] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            outcome.detail
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
