//! Bayes factor against sample size at fixed t, for a family of prior
//! breadths.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::bayes::{bayes_factor_truncated_with_tolerance, log_bayes_factor_upper_bound, BOUND_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{ExperimentSummary, TruncatedScalePrior};
use crate::numerics::DEFAULT_REL_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub t_values: Vec<f64>,
    pub sigma: f64,
    pub n_grid: Vec<f64>,
    pub breadths: Vec<TruncatedScalePrior>,
    pub rel_tol: f64,
}

impl Default for SweepConfig {
    /// t ∈ {2, 3}, σ = 1, 200 log-spaced n from 1 to 10^12 and the priors
    /// 10^{-k} ≤ |μ| ≤ 10^{k} for k = 1..=5.
    fn default() -> Self {
        Self {
            t_values: vec![2.0, 3.0],
            sigma: 1.0,
            n_grid: log_grid(1.0, 1e12, 200).expect("valid default grid"),
            breadths: (1..=5)
                .map(|k| TruncatedScalePrior::symmetric_decades(k).expect("valid default prior"))
                .collect(),
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() {
            return Err(Error::domain("sweep needs at least one t value"));
        }
        if let Some(t) = self.t_values.iter().find(|t| !t.is_finite()) {
            return Err(Error::domain(format!("t values must be finite, got {t}")));
        }
        if self.breadths.is_empty() {
            return Err(Error::domain("sweep needs at least one prior breadth"));
        }
        if self.n_grid.is_empty() {
            return Err(Error::domain("sweep needs at least one sample size"));
        }
        if let Some(n) = self.n_grid.iter().find(|n| !(**n > 0.0 && n.is_finite())) {
            return Err(Error::domain(format!("sample sizes must be positive and finite, got {n}")));
        }
        let mut sorted = self.n_grid.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("n grid has repeated sample sizes"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// `points` values from `lo` to `hi`, equally spaced in log n. The end points
/// are reproduced exactly.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
        return Err(Error::domain(format!("log grid needs 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    match points {
        0 => Err(Error::domain("log grid needs at least one point")),
        1 => Ok(vec![lo]),
        _ if lo == hi => Err(Error::domain("several grid points need lo < hi")),
        _ => {
            let (l0, l1) = (lo.log10(), hi.log10());
            let step = (l1 - l0) / (points - 1) as f64;
            let mut grid: Vec<f64> = (0..points).map(|i| 10f64.powf(l0 + step * i as f64)).collect();
            grid[0] = lo;
            grid[points - 1] = hi;
            Ok(grid)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub log_b10: f64,
    pub mu_hat: f64,
    /// a ≤ |μ̂| ≤ b
    pub in_support: bool,
}

impl SweepRow {
    pub fn b10(&self) -> f64 {
        self.log_b10.exp()
    }

    fn order(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.a.total_cmp(&other.a))
            .then(self.b.total_cmp(&other.b))
            .then(self.n.total_cmp(&other.n))
    }
}

fn evaluate(t: f64, n: f64, sigma: f64, prior: &TruncatedScalePrior, rel_tol: f64) -> Result<SweepRow> {
    let annotate = |e: Error| Error::GridPoint { t, n, a: prior.a(), b: prior.b(), source: Box::new(e) };
    let summary = ExperimentSummary::new(t, n, sigma).map_err(annotate)?;
    let r = bayes_factor_truncated_with_tolerance(&summary, prior, rel_tol).map_err(annotate)?;
    let mu_hat = summary.mu_hat();
    Ok(SweepRow {
        t,
        n,
        a: prior.a(),
        b: prior.b(),
        log_b10: r.log_b10,
        mu_hat,
        in_support: prior.contains(mu_hat),
    })
}

/// One row per (t, breadth, n), sorted by (t, a, b, n) whatever the order of
/// the grid. Grid points are evaluated in parallel on the current rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let jobs: Vec<(f64, &TruncatedScalePrior, f64)> = config
        .t_values
        .iter()
        .flat_map(|&t| {
            config
                .breadths
                .iter()
                .flat_map(move |p| config.n_grid.iter().map(move |&n| (t, p, n)))
        })
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(t, p, n)| evaluate(t, n, config.sigma, p, config.rel_tol))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(SweepRow::order);
    Ok(rows)
}

/// d ln B10 / d ln n along one (t, a, b) series: centred differences inside,
/// one-sided at the two ends.
pub fn scaling_diagnostic(rows: &[SweepRow]) -> Result<Vec<(f64, f64)>> {
    if rows.len() < 3 {
        return Err(Error::domain(format!("slope diagnostic needs at least 3 rows, got {}", rows.len())));
    }
    let first = rows[0];
    if rows.iter().any(|r| r.t != first.t || r.a != first.a || r.b != first.b) {
        return Err(Error::domain("slope diagnostic needs rows sharing one (t, a, b)"));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_by(|x, y| x.n.total_cmp(&y.n));
    if sorted.windows(2).any(|w| w[0].n >= w[1].n) {
        return Err(Error::domain("slope diagnostic needs distinct sample sizes"));
    }
    let slope = |i: usize, j: usize| {
        let (x, y) = (&sorted[i], &sorted[j]);
        (y.log_b10 - x.log_b10) / (y.n.ln() - x.n.ln())
    };
    let last = sorted.len() - 1;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let s = match i {
                0 => slope(0, 1),
                _ if i == last => slope(last - 1, last),
                _ => slope(i - 1, i + 1),
            };
            (r.n, s)
        })
        .collect())
}

/// Split sorted sweep rows into (t, a, b) series.
pub fn series(rows: &[SweepRow]) -> Vec<&[SweepRow]> {
    rows.chunk_by(|x, y| x.t == y.t && x.a == y.a && x.b == y.b).collect()
}

/// Whether a row respects ln B10 ≤ t²/2 up to the bound tolerance.
pub fn within_upper_bound(row: &SweepRow) -> bool {
    row.log_b10 <= log_bayes_factor_upper_bound(row.t) + BOUND_TOLERANCE
}

/// First n at which B10 falls below `(1 − fraction)` times its value at the
/// first grid point of the series.
pub fn drop_onset(series: &[SweepRow], fraction: f64) -> Option<f64> {
    let base = series.first()?.log_b10;
    let threshold = base + (-fraction).ln_1p();
    series.iter().find(|r| r.log_b10 < threshold).map(|r| r.n)
}
