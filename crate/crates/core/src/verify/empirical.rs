//! Empirical process of the probability-integral-transformed path and the
//! covariance operator of its Gaussian limit.

use serde::Serialize;

use super::MCConfig;
use crate::coefficients::gamma_sequence;
use crate::error::{Error, Result};
use crate::models::{path_rng, replicate_seed, sample_path, InnovationLaw, ModelSpec, PathGenerator};
use crate::replicates::map_replicates;
use crate::stats::{covariance_jackknife, quantile_sorted, Estimate};

const PRE_PASS_DRAWS: usize = 1_000_000;
const PRE_PASS_SEGMENTS: usize = 1000;
const PRE_PASS_SALT: u64 = 0x6d61_7267_696e_616c;

/// Map sending the marginal law of `X_1` to (approximately) Uniform[0, 1].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MarginalTransform {
    /// Exact distribution function of the innovation law.
    Analytic { law: InnovationLaw },
    /// Piecewise-linear interpolation of empirical quantiles at `i / K`.
    Empirical { knots: Vec<f64> },
}

impl MarginalTransform {
    /// Analytic for i.i.d. continuous laws; for moving averages, estimated
    /// from a pre-pass of independent draws of `X_1` seeded from `seed`.
    pub fn for_model(model: &ModelSpec, seed: u64) -> Result<Self> {
        if matches!(model.law(), InnovationLaw::Rademacher) {
            return Err(Error::Unavailable(
                "marginal distribution function unavailable: Rademacher marginals are discrete".into(),
            ));
        }
        match model {
            ModelSpec::Iid { law } => Ok(MarginalTransform::Analytic { law: law.clone() }),
            ModelSpec::MovingAverage { coeffs, .. } => {
                if coeffs.iter().all(|a| *a == 0.0) {
                    return Err(Error::Unavailable("marginal distribution function unavailable: degenerate marginal".into()));
                }
                let gen = PathGenerator::new(model, 1)?;
                let mut rng = path_rng(replicate_seed(seed ^ PRE_PASS_SALT, 0));
                let mut buf = Vec::with_capacity(1);
                let mut draws: Vec<f64> = (0..PRE_PASS_DRAWS)
                    .map(|_| {
                        gen.fill(&mut rng, &mut buf);
                        buf[0]
                    })
                    .collect();
                draws.sort_by(f64::total_cmp);
                let knots = (0..=PRE_PASS_SEGMENTS)
                    .map(|i| quantile_sorted(&draws, i as f64 / PRE_PASS_SEGMENTS as f64))
                    .collect();
                Ok(MarginalTransform::Empirical { knots })
            }
            ModelSpec::CumSumTransform { .. } => Err(Error::Unavailable(
                "marginal distribution function unavailable: cumulative-sum models are not stationary".into(),
            )),
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MarginalTransform::Analytic { law } => law.cdf(x).expect("continuous law"),
            MarginalTransform::Empirical { knots } => {
                let k = knots.len() - 1;
                if x <= knots[0] {
                    return 0.0;
                }
                if x >= knots[k] {
                    return 1.0;
                }
                let i = knots.partition_point(|&v| v <= x) - 1;
                let frac = (x - knots[i]) / (knots[i + 1] - knots[i]);
                ((i as f64 + frac) / k as f64).min(1.0)
            }
        }
    }

    /// Lipschitz constant of the transform; the transformed sequence inherits
    /// the dependence coefficients scaled by its square.
    pub fn lipschitz(&self) -> f64 {
        match self {
            MarginalTransform::Analytic { law } => law.max_density().unwrap_or(f64::INFINITY),
            MarginalTransform::Empirical { knots } => {
                let k = knots.len() - 1;
                knots
                    .windows(2)
                    .map(|w| {
                        let dx = w[1] - w[0];
                        if dx > 0.0 { 1.0 / (k as f64 * dx) } else { f64::INFINITY }
                    })
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// `ζ_n(t) = √n ((1/n) #{j : U_j ≤ t} - t)` on a grid in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalProcessPath {
    pub n: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Lipschitz constant of the marginal transform that produced the `U_j`.
    pub transform_lipschitz: f64,
}

impl EmpiricalProcessPath {
    pub fn from_uniforms(us: &[f64], grid: &[f64], transform_lipschitz: f64) -> Result<Self> {
        if let Some(bad) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::Precondition(format!("grid point {bad} outside [0, 1]")));
        }
        let n = us.len();
        let mut sorted = us.to_vec();
        sorted.sort_by(f64::total_cmp);
        let nf = n as f64;
        let values = grid
            .iter()
            .map(|&t| {
                let count = if t == 0.0 {
                    0
                } else if t >= 1.0 {
                    n
                } else {
                    sorted.partition_point(|&u| u <= t)
                };
                nf.sqrt() * (count as f64 / nf - t)
            })
            .collect();
        Ok(EmpiricalProcessPath {
            n,
            grid: grid.to_vec(),
            values,
            transform_lipschitz,
        })
    }
}

/// One empirical-process path from a single seeded sample path.
pub fn empirical_process_path(model: &ModelSpec, n: usize, grid: &[f64], seed: u64) -> Result<EmpiricalProcessPath> {
    let transform = MarginalTransform::for_model(model, seed)?;
    let path = sample_path(model, n, seed)?;
    let us: Vec<f64> = path.values.iter().map(|&x| transform.apply(x)).collect();
    EmpiricalProcessPath::from_uniforms(&us, grid, transform.lipschitz())
}

/// `Σ_{k=1}^{K} Cov(1{U_1 ≤ s}, 1{U_k ≤ t})` estimated across replicates.
///
/// `K` defaults to the length of the dependence support plus five.
pub fn estimate_gamma_operator(
    model: &ModelSpec,
    s: f64,
    t: f64,
    k: Option<usize>,
    cfg: &MCConfig,
) -> Result<Estimate> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(Error::Precondition(format!("s and t must lie in [0, 1], got ({s}, {t})")));
    }
    let k = match k {
        Some(k) if k >= 1 => k,
        Some(_) => return Err(Error::Precondition("truncation order must be at least 1".into())),
        None => gamma_sequence(model)?.support_len().unwrap_or(0) + 5,
    };
    let transform = MarginalTransform::for_model(model, cfg.seed)?;
    let gen = PathGenerator::new(model, k)?;
    let pairs = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        let a = if transform.apply(buf[0]) <= s { 1.0 } else { 0.0 };
        let b = buf.iter().filter(|&&x| transform.apply(x) <= t).count() as f64;
        (a, b)
    });
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(covariance_jackknife(&a, &b))
}
