//! Strong-law rate, central limit and invariance-principle checks.

use serde::Serialize;

use super::{MCConfig, VerificationReport};
use crate::coefficients::long_run_variance;
use crate::error::{Error, Result};
use crate::models::{ModelSpec, PathGenerator};
use crate::numerics::fit_line;
use crate::replicates::map_replicates;
use crate::stats::{covariance_jackknife, ks_statistic, mean_se, quantile_sorted, std_normal_cdf, variance_se, Estimate};

/// Two-sided 5% Kolmogorov–Smirnov critical value, times `1/√replicates`.
pub const KS_CRITICAL_005: f64 = 1.358;

/// Finite-`n` slack `2/√n` allowed on top of Monte Carlo error when
/// comparing with a Gaussian limit.
pub fn bias_allowance(n: usize) -> f64 {
    2.0 / (n as f64).sqrt()
}

/// `ξ_n(k/n) = S_k / √n` for `k = 0..=n`, constant in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartialSumPath {
    pub n: usize,
    pub values: Vec<f64>,
}

impl PartialSumPath {
    pub fn from_values(xs: &[f64]) -> Self {
        let n = xs.len();
        let scale = (n as f64).sqrt();
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut s = 0.0;
        for x in xs {
            s += x;
            values.push(s / scale);
        }
        PartialSumPath { n, values }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| k as f64 / self.n as f64).collect()
    }

    /// Right-continuous evaluation at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        self.values[step_index(self.n, t)]
    }
}

/// `⌊n t⌋`, clamped to `0..=n`.
fn step_index(n: usize, t: f64) -> usize {
    ((n as f64 * t).floor().max(0.0) as usize).min(n)
}

/// `q`-quantile of `|S_n / n|` across replicates for each `n` in the grid.
///
/// Each replicate draws one path of the largest length and reads the other
/// grid points off its prefixes.
pub fn partial_sum_quantiles(model: &ModelSpec, n_grid: &[usize], q: f64, cfg: &MCConfig) -> Result<Vec<f64>> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) || n_grid[0] == 0 {
        return Err(Error::Precondition("n grid must be positive and strictly increasing".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Precondition(format!("quantile level must lie in [0, 1], got {q}")));
    }
    let gen = PathGenerator::new(model, *n_grid.last().expect("nonempty"))?;
    let rows = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        let mut out = Vec::with_capacity(n_grid.len());
        let (mut s, mut k) = (0.0, 0);
        for &n in n_grid {
            s += buf[k..n].iter().sum::<f64>();
            k = n;
            out.push((s / n as f64).abs());
        }
        out
    });
    Ok((0..n_grid.len())
        .map(|g| {
            let mut col: Vec<f64> = rows.iter().map(|r| r[g]).collect();
            col.sort_by(f64::total_cmp);
            quantile_sorted(&col, q)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SllnFit {
    pub n_grid: Vec<usize>,
    pub quantile_level: f64,
    pub quantiles: Vec<f64>,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub report: VerificationReport,
}

impl SllnFit {
    /// `slope ± k·se`.
    pub fn band(&self, k: f64) -> (f64, f64) {
        (self.slope - k * self.slope_se, self.slope + k * self.slope_se)
    }
}

/// Fits the decay exponent of the `q`-quantile of `|S_n / n|`.
///
/// The report row compares `|slope + 1/2|` with `0.05`.
pub fn slln_rate_fit(model: &ModelSpec, n_grid: &[usize], q: f64, cfg: &MCConfig) -> Result<SllnFit> {
    model.require_stationary("the strong-law rate fit")?;
    long_run_variance(model)?;
    if n_grid.len() < 2 {
        return Err(Error::Precondition("need at least two grid points".into()));
    }
    let quantiles = partial_sum_quantiles(model, n_grid, q, cfg)?;
    let xs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = quantiles.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&xs, &ys);
    let param = format!("slope={};q={q};n={}..{}", fit.slope, n_grid[0], n_grid[n_grid.len() - 1]);
    let report = VerificationReport::judge("slln", param, (fit.slope + 0.5).abs(), 0.0, 0.05, true, cfg);
    Ok(SllnFit {
        n_grid: n_grid.to_vec(),
        quantile_level: q,
        quantiles,
        slope: fit.slope,
        slope_se: fit.slope_se,
        intercept: fit.intercept,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltResult {
    pub n: usize,
    pub sigma2: f64,
    pub ks: f64,
    pub threshold: f64,
    /// Empirical `P(S_n/√n ≤ 0)`.
    pub below_zero: f64,
    pub below_zero_se: f64,
    pub reports: Vec<VerificationReport>,
}

impl CltResult {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| !r.is_violated())
    }
}

fn resolve_sigma2(model: &ModelSpec, sigma2: Option<f64>) -> Result<f64> {
    match sigma2 {
        Some(s) if s > 0.0 && s.is_finite() => Ok(s),
        Some(s) => Err(Error::Precondition(format!("sigma2 must be positive, got {s}"))),
        None => long_run_variance(model)
            .map(|v| v.sigma2)
            .map_err(|e| Error::Unavailable(format!("long-run variance unavailable: {e}"))),
    }
}

/// Kolmogorov–Smirnov distance between `S_n/√n` and `N(0, σ²)`.
///
/// Passes when the distance is at most `1.358/√R + 2/√n`. A second row
/// checks `P(S_n/√n ≤ 0)` against `1/2`.
pub fn clt_ks_distance(model: &ModelSpec, n: usize, sigma2: Option<f64>, cfg: &MCConfig) -> Result<CltResult> {
    model.require_stationary("the central limit check")?;
    let sigma2 = resolve_sigma2(model, sigma2)?;
    let gen = PathGenerator::new(model, n)?;
    let scale = (n as f64).sqrt();
    let mut z = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        buf.iter().sum::<f64>() / scale
    });
    z.sort_by(f64::total_cmp);
    let sd = sigma2.sqrt();
    let ks = ks_statistic(&z, |x| std_normal_cdf(x / sd));
    let r = cfg.replicates as f64;
    let b = bias_allowance(n);
    let threshold = KS_CRITICAL_005 / r.sqrt() + b;
    let below: Vec<f64> = z.iter().map(|&v| if v <= 0.0 { 1.0 } else { 0.0 }).collect();
    let Estimate { value: below_zero, se: below_zero_se } = mean_se(&below);
    let param = format!("n={n};sigma2={sigma2}");
    let reports = vec![
        VerificationReport::judge("clt", param.clone(), ks, 0.0, threshold, true, cfg),
        VerificationReport::judge("clt_median", param, (below_zero - 0.5).abs(), below_zero_se, b, true, cfg),
    ];
    Ok(CltResult {
        n,
        sigma2,
        ks,
        threshold,
        below_zero,
        below_zero_se,
        reports,
    })
}

pub const FCLT_MAX_TIMES: usize = 5;

/// Increments of `ξ_n` between `0 = u_0 < u_1 < … < u_k ≤ 1`.
///
/// Rows compare each increment variance with `(u_s - u_{s-1}) σ²` and each
/// cross covariance with 0, with tolerance `k·SE + 2/√n`.
pub fn fclt_increment_check(
    model: &ModelSpec,
    times: &[f64],
    n: usize,
    sigma2: Option<f64>,
    cfg: &MCConfig,
) -> Result<Vec<VerificationReport>> {
    if times.is_empty() || times.len() > FCLT_MAX_TIMES {
        return Err(Error::Precondition(format!("need 1..={FCLT_MAX_TIMES} times, got {}", times.len())));
    }
    if times[0] <= 0.0 || times[times.len() - 1] > 1.0 || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("times must be strictly increasing within (0, 1]".into()));
    }
    model.require_stationary("the invariance-principle check")?;
    let sigma2 = resolve_sigma2(model, sigma2)?;
    let gen = PathGenerator::new(model, n)?;
    let cuts: Vec<usize> = times.iter().map(|&u| step_index(n, u)).collect();
    let scale = (n as f64).sqrt();
    let rows = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        let mut prev = 0;
        cuts.iter()
            .map(|&c| {
                let inc = buf[prev..c].iter().sum::<f64>() / scale;
                prev = c;
                inc
            })
            .collect::<Vec<f64>>()
    });
    let cols: Vec<Vec<f64>> = (0..times.len()).map(|s| rows.iter().map(|r| r[s]).collect()).collect();
    let b = bias_allowance(n);
    let mut out = Vec::new();
    let mut prev_u = 0.0;
    for (s, &u) in times.iter().enumerate() {
        let v = variance_se(&cols[s]);
        let target = (u - prev_u) * sigma2;
        let param = format!("u0={prev_u};u1={u};n={n};target={target}");
        out.push(VerificationReport::judge("fclt_var", param, (v.value - target).abs(), v.se, b, true, cfg));
        prev_u = u;
    }
    for s in 0..times.len() {
        for t in s + 1..times.len() {
            let c = covariance_jackknife(&cols[s], &cols[t]);
            let param = format!("s={};t={};n={n}", s + 1, t + 1);
            out.push(VerificationReport::judge("fclt_cov", param, c.value.abs(), c.se, b, true, cfg));
        }
    }
    Ok(out)
}
