//! Dependence coefficients `γ_k`, their tail sums `v(n)`, the long-run
//! variance and the characteristic-function discrepancy bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{analytic_covariance, ModelSpec, PathGenerator};
use crate::replicates::map_replicates;
use crate::stats::{covariance_jackknife, mean_se, Estimate};

/// Shape of a coefficient sequence `γ_1, γ_2, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaDecay {
    /// `γ_k = values[k-1]` for `k ≤ K`, zero afterwards.
    Finite { values: Vec<f64> },
    /// `γ_k = a·ρ^k`.
    Geometric { a: f64, rho: f64 },
}

/// Dependence coefficients with a note on where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSequence {
    pub decay: GammaDecay,
    #[serde(default)]
    pub provenance: String,
}

impl GammaSequence {
    pub fn finite(values: Vec<f64>, provenance: impl Into<String>) -> Result<Self> {
        if values.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Precondition("coefficients must be finite and nonnegative".into()));
        }
        Ok(GammaSequence {
            decay: GammaDecay::Finite { values },
            provenance: provenance.into(),
        })
    }

    pub fn geometric(a: f64, rho: f64, provenance: impl Into<String>) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::Precondition(format!("geometric scale must be >= 0, got {a}")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Precondition(format!("geometric ratio must lie in (0, 1), got {rho}")));
        }
        Ok(GammaSequence {
            decay: GammaDecay::Geometric { a, rho },
            provenance: provenance.into(),
        })
    }

    pub fn independent() -> Self {
        GammaSequence {
            decay: GammaDecay::Finite { values: Vec::new() },
            provenance: "independent".into(),
        }
    }

    /// `γ_k` for `k ≥ 1`; lag 0 is not a coefficient and returns 0.
    pub fn gamma(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match &self.decay {
            GammaDecay::Finite { values } => values.get(k - 1).copied().unwrap_or(0.0),
            GammaDecay::Geometric { a, rho } => a * rho.powi(k as i32),
        }
    }

    /// Largest `k` with `γ_k > 0`, or `None` when the support is unbounded.
    pub fn support_len(&self) -> Option<usize> {
        match &self.decay {
            GammaDecay::Finite { values } => Some(values.iter().rposition(|g| *g > 0.0).map_or(0, |i| i + 1)),
            GammaDecay::Geometric { a, .. } => (*a == 0.0).then_some(0),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gamma serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: GammaSequence = serde_json::from_str(text)?;
        match &g.decay {
            GammaDecay::Finite { values } => GammaSequence::finite(values.clone(), g.provenance),
            GammaDecay::Geometric { a, rho } => GammaSequence::geometric(*a, *rho, g.provenance),
        }
    }
}

/// Coefficients dominating every Lipschitz covariance of the model.
///
/// For `X_n = Σ α_j ξ_{n-j}` the envelope is `γ_k = σ_ξ² Σ_j |α_j α_{j+k}|`,
/// obtained by bounding the covariance one shared innovation at a time.
pub fn gamma_sequence(model: &ModelSpec) -> Result<GammaSequence> {
    match model {
        ModelSpec::Iid { .. } => Ok(GammaSequence::independent()),
        ModelSpec::MovingAverage { coeffs, law } => {
            let var = law.variance();
            let p = coeffs.len();
            let values = (1..p)
                .map(|k| {
                    var * coeffs
                        .iter()
                        .zip(&coeffs[k..])
                        .map(|(a, b)| (a * b).abs())
                        .sum::<f64>()
                })
                .collect();
            GammaSequence::finite(values, format!("moving average envelope, p = {p}"))
        }
        ModelSpec::CumSumTransform { .. } => Err(Error::Precondition(
            "cumulative-sum models have no stationary coefficient sequence".into(),
        )),
    }
}

/// `v(n) = Σ_{k≥n} γ_k`. `n = 0` is treated as `n = 1`.
pub fn cox_grimmett(gamma: &GammaSequence, n: usize) -> f64 {
    let n = n.max(1);
    match &gamma.decay {
        GammaDecay::Finite { values } => values.iter().skip(n - 1).fold(0.0, |a, b| a + b),
        GammaDecay::Geometric { a, rho } => a * rho.powi(n as i32) / (1.0 - rho),
    }
}

/// `D = Σ_{ℓ≥1} γ_ℓ`.
pub fn total_dependence(gamma: &GammaSequence) -> f64 {
    cox_grimmett(gamma, 1)
}

/// `4 t² Σ_{j=1}^{n-1} (n - j) γ_j`.
pub fn newman_discrepancy_bound(gamma: &GammaSequence, n: usize, t: f64) -> f64 {
    let s: f64 = (1..n).map(|j| (n - j) as f64 * gamma.gamma(j)).sum();
    4.0 * t * t * s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarianceMethod {
    Analytic,
    MonteCarlo {
        replicates: usize,
        n: usize,
        standard_error: f64,
    },
}

/// Long-run variance `σ² = lim E S_n² / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceEstimate {
    pub sigma2: f64,
    pub method: VarianceMethod,
}

/// Monte Carlo settings for [`long_run_variance_mc`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongRunConfig {
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for LongRunConfig {
    fn default() -> Self {
        LongRunConfig {
            n: 1 << 12,
            replicates: 10_000,
            seed: 0,
        }
    }
}

/// Closed-form long-run variance, `σ_ξ² (Σ α_j)²` for moving averages.
pub fn long_run_variance(model: &ModelSpec) -> Result<VarianceEstimate> {
    let (sigma2, scale) = match model {
        ModelSpec::Iid { law } => (law.variance(), law.variance()),
        ModelSpec::MovingAverage { coeffs, law } => {
            let s: f64 = coeffs.iter().sum();
            let sq: f64 = coeffs.iter().map(|a| a * a).sum();
            (law.variance() * s * s, law.variance() * sq)
        }
        ModelSpec::CumSumTransform { .. } => {
            return Err(Error::Precondition(
                "long-run variance requires a stationary model".into(),
            ))
        }
    };
    if !(sigma2 > 1e-14 * scale) {
        return Err(Error::Degenerate(format!(
            "long-run variance {sigma2:e} is not positive"
        )));
    }
    Ok(VarianceEstimate {
        sigma2,
        method: VarianceMethod::Analytic,
    })
}

/// Mean of `S_n² / n` over independent replicates.
pub fn long_run_variance_mc(model: &ModelSpec, cfg: LongRunConfig) -> Result<VarianceEstimate> {
    model.require_stationary("long-run variance")?;
    if cfg.replicates < 2 {
        return Err(Error::Precondition("need at least two replicates".into()));
    }
    let gen = PathGenerator::new(model, cfg.n)?;
    let nf = cfg.n as f64;
    let draws = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        let s: f64 = buf.iter().sum();
        s * s / nf
    });
    let est = mean_se(&draws);
    if !(est.value > 0.0) {
        return Err(Error::Degenerate(format!(
            "Monte Carlo long-run variance {:e} is not positive",
            est.value
        )));
    }
    Ok(VarianceEstimate {
        sigma2: est.value,
        method: VarianceMethod::MonteCarlo {
            replicates: cfg.replicates,
            n: cfg.n,
            standard_error: est.se,
        },
    })
}

/// Across-replicate estimate of `Cov(X_1, X_{1+lag})` with a jackknife
/// standard error.
pub fn empirical_covariance(
    model: &ModelSpec,
    lag: usize,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Estimate> {
    if n <= lag {
        return Err(Error::Precondition(format!("path length {n} must exceed lag {lag}")));
    }
    if replicates < 3 {
        return Err(Error::Precondition("need at least three replicates".into()));
    }
    // Paths are prefix consistent, so only the first lag + 1 values are drawn.
    let gen = PathGenerator::new(model, lag + 1)?;
    let pairs = map_replicates(replicates, seed, |rng, buf| {
        gen.fill(rng, buf);
        (buf[0], buf[lag])
    });
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(covariance_jackknife(&a, &b))
}

/// `|Cov(X_1, X_{1+k})| ≤ γ_k` for every lag of a moving average.
pub fn envelope_dominates_covariances(model: &ModelSpec) -> Result<bool> {
    let gamma = gamma_sequence(model)?;
    let horizon = gamma.support_len().unwrap_or(0) + 2;
    for k in 1..=horizon {
        if analytic_covariance(model, k)?.abs() > gamma.gamma(k) * (1.0 + 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}
