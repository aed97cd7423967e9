//! Seeded generators for i.i.d., moving-average and cumulative-sum
//! transformed sequences, with closed-form moment oracles.
//!
//! Every generated variable is centered. Moving-average paths are
//! stationary from the first index; cumulative-sum paths are not and are
//! rejected by operations that need stationarity.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::stats::std_normal_cdf;

/// Version tag written into every model document.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

/// Compactly supported innovation law, centered at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnovationLaw {
    /// Uniform on `[a, b]`, shifted by `-(a + b)/2`.
    UniformOnInterval { a: f64, b: f64 },
    Rademacher,
    /// Standard normal conditioned on `[-bound, bound]`.
    TruncatedGaussian { bound: f64 },
}

impl InnovationLaw {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let law = InnovationLaw::UniformOnInterval { a, b };
        law.validate()?;
        Ok(law)
    }

    pub fn truncated_gaussian(bound: f64) -> Result<Self> {
        let law = InnovationLaw::TruncatedGaussian { bound };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InnovationLaw::UniformOnInterval { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidModel(format!(
                        "uniform law needs finite a < b, got [{a}, {b}]"
                    )));
                }
            }
            InnovationLaw::Rademacher => {}
            InnovationLaw::TruncatedGaussian { bound } => {
                if !(bound.is_finite() && bound > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "truncation bound must be positive and finite, got {bound}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest absolute value of the centered variable.
    pub fn half_width(&self) -> f64 {
        match *self {
            InnovationLaw::UniformOnInterval { a, b } => 0.5 * (b - a),
            InnovationLaw::Rademacher => 1.0,
            InnovationLaw::TruncatedGaussian { bound } => bound,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            InnovationLaw::UniformOnInterval { a, b } => (b - a) * (b - a) / 12.0,
            InnovationLaw::Rademacher => 1.0,
            InnovationLaw::TruncatedGaussian { bound } => {
                let z = truncated_mass(bound);
                1.0 - 2.0 * bound * std_normal_pdf(bound) / z
            }
        }
    }

    /// Draws one centered innovation.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationLaw::UniformOnInterval { a, b } => {
                let h = 0.5 * (b - a);
                -h + (b - a) * rng.random::<f64>()
            }
            InnovationLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            InnovationLaw::TruncatedGaussian { bound } => {
                if bound >= 1.0 {
                    loop {
                        let x: f64 = rng.sample(StandardNormal);
                        if x.abs() <= bound {
                            return x;
                        }
                    }
                } else {
                    loop {
                        let x = bound * (2.0 * rng.random::<f64>() - 1.0);
                        if rng.random::<f64>() <= (-0.5 * x * x).exp() {
                            return x;
                        }
                    }
                }
            }
        }
    }

    /// Moment generating function `E e^{sξ}` of the centered law.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        Ok(match *self {
            InnovationLaw::UniformOnInterval { .. } => {
                let hs = self.half_width() * s;
                if hs == 0.0 {
                    1.0
                } else {
                    hs.sinh() / hs
                }
            }
            InnovationLaw::Rademacher => s.cosh(),
            InnovationLaw::TruncatedGaussian { bound } => {
                if s.abs() <= 20.0 {
                    (0.5 * s * s).exp() * (std_normal_cdf(bound - s) - std_normal_cdf(-bound - s))
                        / truncated_mass(bound)
                } else {
                    self.expect(|x| (s * x).exp())?
                }
            }
        })
    }

    /// Characteristic function; real because every law here is symmetric.
    pub fn char_fn(&self, w: f64) -> Result<f64> {
        Ok(match *self {
            InnovationLaw::UniformOnInterval { .. } => {
                let hw = self.half_width() * w;
                if hw == 0.0 {
                    1.0
                } else {
                    hw.sin() / hw
                }
            }
            InnovationLaw::Rademacher => w.cos(),
            InnovationLaw::TruncatedGaussian { .. } => self.expect(|x| (w * x).cos())?,
        })
    }

    /// `E f(ξ)`, exact for Rademacher and by quadrature otherwise.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        match *self {
            InnovationLaw::Rademacher => Ok(0.5 * (f(1.0) + f(-1.0))),
            InnovationLaw::UniformOnInterval { .. } => {
                let h = self.half_width();
                integrate(|x| f(x) / (2.0 * h), -h, h, 8)
            }
            InnovationLaw::TruncatedGaussian { bound } => {
                let z = truncated_mass(bound);
                integrate(|x| f(x) * std_normal_pdf(x) / z, -bound, bound, 8)
            }
        }
    }

    /// Distribution function of the centered law, when continuous.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        match *self {
            InnovationLaw::UniformOnInterval { .. } => {
                let h = self.half_width();
                Some(((x + h) / (2.0 * h)).clamp(0.0, 1.0))
            }
            InnovationLaw::Rademacher => None,
            InnovationLaw::TruncatedGaussian { bound } => {
                let x = x.clamp(-bound, bound);
                Some(
                    ((std_normal_cdf(x) - std_normal_cdf(-bound)) / truncated_mass(bound))
                        .clamp(0.0, 1.0),
                )
            }
        }
    }

    /// Largest density value of the centered law, when continuous.
    pub fn max_density(&self) -> Option<f64> {
        match *self {
            InnovationLaw::UniformOnInterval { .. } => Some(0.5 / self.half_width()),
            InnovationLaw::Rademacher => None,
            InnovationLaw::TruncatedGaussian { bound } => {
                Some(std_normal_pdf(0.0) / truncated_mass(bound))
            }
        }
    }
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

fn truncated_mass(bound: f64) -> f64 {
    statrs::function::erf::erf(bound / std::f64::consts::SQRT_2)
}

/// Deterministic map applied to cumulative sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Transform {
    Identity,
    /// `g(x) = e^{-x}`
    NegExp,
    /// `g(x) = e^{-x²/β} + x`
    GaussBumpPlusX { beta: f64 },
}

impl Transform {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Transform::Identity => x,
            Transform::NegExp => (-x).exp(),
            Transform::GaussBumpPlusX { beta } => (-x * x / beta).exp() + x,
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Transform::Identity => 1.0,
            Transform::NegExp => -(-x).exp(),
            Transform::GaussBumpPlusX { beta } => 1.0 - 2.0 * x / beta * (-x * x / beta).exp(),
        }
    }

    /// Points of `[lo, hi]` where `|g'|` can attain its extremes.
    fn derivative_probe_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        if let Transform::GaussBumpPlusX { beta } = *self {
            let s = (0.5 * beta).sqrt();
            pts.extend([-s, s].into_iter().filter(|x| (lo..=hi).contains(x)));
            // g' vanishes nowhere when β > 2/e; otherwise include its zeros.
            if beta <= 2.0 / std::f64::consts::E {
                let zero = bisect_zero(|x| self.derivative(x), 0.0, s);
                let zero2 = bisect_zero(|x| self.derivative(x), s, 10.0 * s + 10.0);
                pts.extend([zero, zero2].into_iter().flatten().filter(|x| (lo..=hi).contains(x)));
            }
        }
        pts
    }

    /// Lipschitz norm of `g` restricted to `[lo, hi]`.
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        self.derivative_probe_points(lo, hi)
            .into_iter()
            .map(|x| self.derivative(x).abs())
            .fold(0.0, f64::max)
    }

    /// Lipschitz norm of `g⁻¹` on `g([lo, hi])`; infinite when `g` is not
    /// strictly monotone there.
    pub fn inverse_lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        let inf = self
            .derivative_probe_points(lo, hi)
            .into_iter()
            .map(|x| self.derivative(x).abs())
            .fold(f64::INFINITY, f64::min);
        if inf > 0.0 {
            1.0 / inf
        } else {
            f64::INFINITY
        }
    }
}

fn bisect_zero<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Mean and variance of `g(α ξ)` under `law`.
///
/// Closed forms via the moment generating function for `Identity` and
/// `NegExp`; quadrature otherwise.
pub fn transform_moments(transform: Transform, law: &InnovationLaw, alpha: f64) -> Result<(f64, f64)> {
    match transform {
        Transform::Identity => Ok((0.0, alpha * alpha * law.variance())),
        Transform::NegExp => {
            let m1 = law.mgf(-alpha)?;
            let m2 = law.mgf(-2.0 * alpha)?;
            Ok((m1, (m2 - m1 * m1).max(0.0)))
        }
        Transform::GaussBumpPlusX { .. } => {
            let mean = law.expect(|x| transform.apply(alpha * x))?;
            let second = law.expect(|x| transform.apply(alpha * x).powi(2))?;
            Ok((mean, (second - mean * mean).max(0.0)))
        }
    }
}

/// Constructive description of a sequence generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelDocument", into = "ModelDocument")]
pub enum ModelSpec {
    Iid {
        law: InnovationLaw,
    },
    /// `X_n = Σ_{j=1}^{p} α_j ξ_{n-j}`
    MovingAverage {
        coeffs: Vec<f64>,
        law: InnovationLaw,
    },
    /// `Y_n = g(Σ_{i≤n} α_i ξ_i) - E g(·)`
    CumSumTransform {
        coeffs: Vec<f64>,
        transform: Transform,
        law: InnovationLaw,
    },
}

/// On-disk JSON form of [`ModelSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub variant: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coeffs: Vec<f64>,
    pub law: InnovationLaw,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<Transform>,
}

fn default_schema_version() -> u32 {
    MODEL_SCHEMA_VERSION
}

impl TryFrom<ModelDocument> for ModelSpec {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        if doc.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::InvalidModel(format!(
                "unsupported schema_version {}",
                doc.schema_version
            )));
        }
        match doc.variant.as_str() {
            "iid" => ModelSpec::iid(doc.law),
            "moving_average" => ModelSpec::moving_average(doc.coeffs, doc.law),
            "cum_sum_transform" => ModelSpec::cum_sum_transform(
                doc.coeffs,
                doc.transform.unwrap_or(Transform::Identity),
                doc.law,
            ),
            other => Err(Error::InvalidModel(format!("unknown variant '{other}'"))),
        }
    }
}

impl From<ModelSpec> for ModelDocument {
    fn from(model: ModelSpec) -> Self {
        let (variant, coeffs, law, transform) = match model {
            ModelSpec::Iid { law } => ("iid", Vec::new(), law, None),
            ModelSpec::MovingAverage { coeffs, law } => ("moving_average", coeffs, law, None),
            ModelSpec::CumSumTransform {
                coeffs,
                transform,
                law,
            } => ("cum_sum_transform", coeffs, law, Some(transform)),
        };
        ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            variant: variant.to_string(),
            coeffs,
            law,
            transform,
        }
    }
}

impl ModelSpec {
    pub fn iid(law: InnovationLaw) -> Result<Self> {
        law.validate()?;
        Ok(ModelSpec::Iid { law })
    }

    pub fn moving_average(coeffs: Vec<f64>, law: InnovationLaw) -> Result<Self> {
        law.validate()?;
        if coeffs.is_empty() {
            return Err(Error::InvalidModel("moving average needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidModel("moving average coefficients must be finite".into()));
        }
        Ok(ModelSpec::MovingAverage { coeffs, law })
    }

    pub fn cum_sum_transform(coeffs: Vec<f64>, transform: Transform, law: InnovationLaw) -> Result<Self> {
        law.validate()?;
        if coeffs.is_empty() {
            return Err(Error::InvalidModel("cumulative sum needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidModel(
                "cumulative sum coefficients must be strictly positive".into(),
            ));
        }
        if let Transform::GaussBumpPlusX { beta } = transform {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::InvalidModel(format!("beta must be positive, got {beta}")));
            }
        }
        Ok(ModelSpec::CumSumTransform {
            coeffs,
            transform,
            law,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn law(&self) -> &InnovationLaw {
        match self {
            ModelSpec::Iid { law }
            | ModelSpec::MovingAverage { law, .. }
            | ModelSpec::CumSumTransform { law, .. } => law,
        }
    }

    pub fn is_stationary(&self) -> bool {
        !matches!(self, ModelSpec::CumSumTransform { .. })
    }

    pub(crate) fn require_stationary(&self, what: &str) -> Result<()> {
        if self.is_stationary() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "{what} requires a stationary model; cumulative-sum models are not stationary"
            )))
        }
    }

    /// Almost-sure bound on `|X_n|` for stationary models.
    pub fn sup_abs(&self) -> Option<f64> {
        match self {
            ModelSpec::Iid { law } => Some(law.half_width()),
            ModelSpec::MovingAverage { coeffs, law } => {
                Some(coeffs.iter().map(|a| a.abs()).sum::<f64>() * law.half_width())
            }
            ModelSpec::CumSumTransform { .. } => None,
        }
    }

    /// Support of `Σ_{i≤n} α_i ξ_i` over all `k ≤ n`, for cumulative-sum models.
    pub fn cum_sum_support(&self, n: usize) -> Option<(f64, f64)> {
        match self {
            ModelSpec::CumSumTransform { coeffs, law, .. } => {
                let total: f64 = coeffs.iter().take(n).sum();
                let h = law.half_width();
                Some((-total * h, total * h))
            }
            _ => None,
        }
    }

    /// Lipschitz norm of `f = g⁻¹` on the support of `Y_1, …, Y_n`.
    pub fn inverse_transform_lipschitz(&self, n: usize) -> Option<f64> {
        match self {
            ModelSpec::CumSumTransform { transform, .. } => {
                let (lo, hi) = self.cum_sum_support(n)?;
                Some(transform.inverse_lipschitz_on(lo, hi))
            }
            _ => None,
        }
    }
}

/// `Cov(X_1, X_{1+lag})` for i.i.d. and moving-average models.
pub fn analytic_covariance(model: &ModelSpec, lag: usize) -> Result<f64> {
    match model {
        ModelSpec::Iid { law } => Ok(if lag == 0 { law.variance() } else { 0.0 }),
        ModelSpec::MovingAverage { coeffs, law } => {
            let s: f64 = coeffs
                .iter()
                .zip(coeffs.iter().skip(lag))
                .map(|(a, b)| a * b)
                .sum();
            Ok(law.variance() * s)
        }
        ModelSpec::CumSumTransform { .. } => Err(Error::Unavailable(
            "no closed-form covariance for cumulative-sum models".into(),
        )),
    }
}

/// One realization of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub values: Vec<f64>,
    pub model: ModelSpec,
    pub seed: u64,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Random number generator behind every path.
pub type PathRng = ChaCha8Rng;

pub fn path_rng(seed: u64) -> PathRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for replicate `index` of a run keyed by `master`.
pub fn replicate_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ index.wrapping_mul(0xD2B7_4407_B1CE_6E93))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Prepared generator for paths of a fixed length.
///
/// Holds the per-index centering constants of cumulative-sum models so
/// repeated draws do not recompute them.
#[derive(Debug, Clone)]
pub struct PathGenerator {
    model: ModelSpec,
    n: usize,
    means: Vec<f64>,
}

impl PathGenerator {
    pub fn new(model: &ModelSpec, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("path length must be at least 1".into()));
        }
        let means = match model {
            ModelSpec::CumSumTransform {
                coeffs,
                transform,
                law,
            } => {
                if n > coeffs.len() {
                    return Err(Error::Precondition(format!(
                        "cumulative-sum model has {} coefficients, cannot generate {n} values",
                        coeffs.len()
                    )));
                }
                cum_sum_means(&coeffs[..n], *transform, law)?
            }
            _ => Vec::new(),
        };
        Ok(PathGenerator {
            model: model.clone(),
            n,
            means,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    /// Overwrites `out` with a fresh path drawn from `rng`.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.reserve(self.n);
        match &self.model {
            ModelSpec::Iid { law } => {
                out.extend((0..self.n).map(|_| law.sample(rng)));
            }
            ModelSpec::MovingAverage { coeffs, law } => {
                let p = coeffs.len();
                // ring[k] holds ξ_{m-1-k} when producing X_m
                let mut ring: Vec<f64> = (0..p).map(|_| law.sample(rng)).collect();
                ring.reverse();
                let mut head = 0usize;
                for m in 0..self.n {
                    if m > 0 {
                        head = (head + p - 1) % p;
                        ring[head] = law.sample(rng);
                    }
                    let mut x = 0.0;
                    for (j, a) in coeffs.iter().enumerate() {
                        x += a * ring[(head + j) % p];
                    }
                    out.push(x);
                }
            }
            ModelSpec::CumSumTransform {
                coeffs,
                transform,
                law,
            } => {
                let mut acc = 0.0;
                for (k, a) in coeffs.iter().take(self.n).enumerate() {
                    acc += a * law.sample(rng);
                    out.push(transform.apply(acc) - self.means[k]);
                }
            }
        }
    }

    pub fn generate(&self, seed: u64) -> SamplePath {
        let mut rng = path_rng(seed);
        let mut values = Vec::with_capacity(self.n);
        self.fill(&mut rng, &mut values);
        SamplePath {
            values,
            model: self.model.clone(),
            seed,
        }
    }
}

/// Draws a centered path of length `n`; identical inputs give identical values.
pub fn sample_path(model: &ModelSpec, n: usize, seed: u64) -> Result<SamplePath> {
    Ok(PathGenerator::new(model, n)?.generate(seed))
}

/// `E g(Σ_{i≤k} α_i ξ_i)` for every prefix length `k`.
fn cum_sum_means(coeffs: &[f64], transform: Transform, law: &InnovationLaw) -> Result<Vec<f64>> {
    match transform {
        Transform::Identity => Ok(vec![0.0; coeffs.len()]),
        Transform::NegExp => {
            let mut prod = 1.0;
            coeffs
                .iter()
                .map(|a| {
                    prod *= law.mgf(-a)?;
                    Ok(prod)
                })
                .collect()
        }
        Transform::GaussBumpPlusX { beta } => {
            // e^{-x²/β} = √(β/4π) ∫ e^{-βω²/4} cos(ωx) dω, then factor the
            // characteristic functions of the independent summands.
            let omega_max = (160.0 / beta).sqrt();
            let h = law.half_width();
            let mut out = Vec::with_capacity(coeffs.len());
            for k in 1..=coeffs.len() {
                let prefix = &coeffs[..k];
                let spread: f64 = prefix.iter().sum::<f64>() * h;
                let pieces = ((omega_max * spread / PI).ceil() as usize).clamp(4, 4000);
                let integral = integrate(
                    |w| {
                        let mut v = (-0.25 * beta * w * w).exp();
                        for a in prefix {
                            v *= law.char_fn(a * w).unwrap_or(f64::NAN);
                        }
                        v
                    },
                    0.0,
                    omega_max,
                    pieces,
                )?;
                if !integral.is_finite() {
                    return Err(Error::Unavailable("characteristic function quadrature failed".into()));
                }
                out.push((beta / (4.0 * PI)).sqrt() * 2.0 * integral);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u11() -> InnovationLaw {
        InnovationLaw::uniform(-1.0, 1.0).unwrap()
    }

    #[test]
    fn rademacher_path_takes_values_in_plus_minus_one() {
        let m = ModelSpec::iid(InnovationLaw::Rademacher).unwrap();
        let p = sample_path(&m, 3, 17).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.values.iter().all(|v| *v == 1.0 || *v == -1.0));
    }

    #[test]
    fn zero_coefficients_give_zero_path() {
        let m = ModelSpec::moving_average(vec![0.0; 3], u11()).unwrap();
        let p = sample_path(&m, 50, 1).unwrap();
        assert!(p.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn moving_average_is_centered() {
        let m = ModelSpec::moving_average(vec![1.0, -0.5, 1.0], u11()).unwrap();
        let p = sample_path(&m, 100_000, 2024).unwrap();
        let n = p.len() as f64;
        let mean = p.sum() / n;
        let sd = (p.values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() <= 3.0 * sd / n.sqrt(), "mean {mean}, sd {sd}");
    }

    #[test]
    fn moving_average_matches_direct_convolution() {
        // Replays the innovation stream and rebuilds X_n = Σ α_j ξ_{n-j}.
        let coeffs = vec![0.7, -1.3, 0.4];
        let law = u11();
        let m = ModelSpec::moving_average(coeffs.clone(), law.clone()).unwrap();
        let p = sample_path(&m, 20, 5).unwrap();
        let mut rng = path_rng(5);
        // innovations ξ_{1-p}, …, ξ_{n-1}
        let xi: Vec<f64> = (0..coeffs.len() + 19).map(|_| law.sample(&mut rng)).collect();
        let offset = coeffs.len() as isize - 1; // index of ξ_0
        for n in 1..=20isize {
            let expected: f64 = (1..=coeffs.len() as isize)
                .map(|j| coeffs[(j - 1) as usize] * xi[(offset + n - j) as usize])
                .sum();
            assert!((p.values[(n - 1) as usize] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn paths_are_reproducible_and_prefix_consistent() {
        let m = ModelSpec::moving_average(vec![1.0, 1.0], InnovationLaw::truncated_gaussian(1.5).unwrap()).unwrap();
        let a = sample_path(&m, 64, 9).unwrap();
        let b = sample_path(&m, 64, 9).unwrap();
        let long = sample_path(&m, 200, 9).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.values[..], long.values[..64]);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(ModelSpec::moving_average(vec![], u11()).is_err());
        assert!(InnovationLaw::uniform(1.0, 1.0).is_err());
        assert!(InnovationLaw::truncated_gaussian(0.0).is_err());
        assert!(ModelSpec::cum_sum_transform(vec![1.0, -1.0], Transform::Identity, u11()).is_err());
        assert!(
            ModelSpec::cum_sum_transform(vec![1.0], Transform::GaussBumpPlusX { beta: 0.0 }, u11()).is_err()
        );
        let m = ModelSpec::iid(u11()).unwrap();
        assert!(sample_path(&m, 0, 1).is_err());
    }

    #[test]
    fn covariance_sign_pattern_of_mixed_sign_average() {
        let m = ModelSpec::moving_average(vec![1.0, -0.5, 1.0], InnovationLaw::Rademacher).unwrap();
        assert_eq!(analytic_covariance(&m, 2).unwrap(), 1.0);
        assert_eq!(analytic_covariance(&m, 1).unwrap(), -1.0);
        assert_eq!(analytic_covariance(&m, 3).unwrap(), 0.0);
        let single = ModelSpec::moving_average(vec![1.0], InnovationLaw::Rademacher).unwrap();
        assert_eq!(analytic_covariance(&single, 0).unwrap(), 1.0);
        let cs = ModelSpec::cum_sum_transform(vec![1.0], Transform::Identity, u11()).unwrap();
        assert!(matches!(analytic_covariance(&cs, 0), Err(Error::Unavailable(_))));
    }

    #[test]
    fn law_variances_match_quadrature() {
        for law in [u11(), InnovationLaw::uniform(2.0, 5.0).unwrap(), InnovationLaw::truncated_gaussian(0.7).unwrap(), InnovationLaw::truncated_gaussian(2.5).unwrap()] {
            let q = law.expect(|x| x * x).unwrap();
            assert!((q - law.variance()).abs() < 1e-10 * law.variance(), "{law:?}");
            assert!(law.expect(|x| x).unwrap().abs() < 1e-12);
        }
        assert_eq!(InnovationLaw::Rademacher.variance(), 1.0);
    }

    #[test]
    fn mgf_closed_forms_match_quadrature() {
        for law in [u11(), InnovationLaw::truncated_gaussian(1.2).unwrap()] {
            for s in [-3.0, -0.5, 0.0, 1.7, 25.0] {
                let q = law.expect(|x| (s * x).exp()).unwrap();
                let m = law.mgf(s).unwrap();
                assert!(((q - m) / q).abs() < 1e-9, "{law:?} s={s}: {q} vs {m}");
            }
        }
    }

    #[test]
    fn identity_transform_moments() {
        let law = InnovationLaw::uniform(-2.0, 2.0).unwrap();
        let (m, v) = transform_moments(Transform::Identity, &law, 1.0).unwrap();
        assert_eq!(m, 0.0);
        assert!((v - law.variance()).abs() < 1e-15);
    }

    #[test]
    fn neg_exp_mean_under_symmetric_uniform_is_sinh_one() {
        // ∫_{-1}^{1} e^{-x} dx / 2 = sinh(1)
        let (m, _) = transform_moments(Transform::NegExp, &u11(), 1.0).unwrap();
        assert!((m - 1.0f64.sinh()).abs() < 1e-14);
        assert!((m - 1.1752).abs() < 1e-4);
    }

    #[test]
    fn neg_exp_variance_under_centered_uniform_grows_with_scale() {
        // Var e^{-αξ} = sinh(2α)/(2α) - (sinh α/α)², increasing in α for ξ ~ U(-1, 1).
        let mut last = 0.0;
        for alpha in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let (_, v) = transform_moments(Transform::NegExp, &u11(), alpha).unwrap();
            let exact = (2.0 * alpha).sinh() / (2.0 * alpha) - (alpha.sinh() / alpha).powi(2);
            assert!(((v - exact) / exact).abs() < 1e-12);
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn gauss_bump_moments_match_direct_quadrature() {
        let law = u11();
        let t = Transform::GaussBumpPlusX { beta: 3.0 };
        let (m, v) = transform_moments(t, &law, 2.0).unwrap();
        let direct_mean = integrate(|x| t.apply(2.0 * x) / 2.0, -1.0, 1.0, 1).unwrap();
        assert!((m - direct_mean).abs() < 1e-12);
        assert!(v > 0.0);
    }

    #[test]
    fn cum_sum_means_center_the_path() {
        let law = u11();
        for transform in [Transform::NegExp, Transform::GaussBumpPlusX { beta: 2.0 }] {
            let coeffs = vec![0.8, 0.5, 1.1];
            let means = cum_sum_means(&coeffs, transform, &law).unwrap();
            // k = 1 is a single scaled innovation: compare with direct quadrature.
            let direct = law.expect(|x| transform.apply(0.8 * x)).unwrap();
            assert!((means[0] - direct).abs() < 1e-10, "{transform:?}");
            // k = 2 by nested quadrature.
            let nested = law
                .expect(|x| law.expect(|y| transform.apply(0.8 * x + 0.5 * y)).unwrap())
                .unwrap();
            assert!((means[1] - nested).abs() < 1e-9, "{transform:?}");
        }
    }

    #[test]
    fn inverse_lipschitz_norms() {
        // f = -log y on e^{-[lo, hi]} has norm e^{hi}
        assert!((Transform::NegExp.inverse_lipschitz_on(-1.0, 2.0) - 2.0f64.exp()).abs() < 1e-12);
        // For the Gauss bump the closed form 1/(1 - √(2/β) e^{-1/2}) on the whole line.
        let beta = 4.0;
        let t = Transform::GaussBumpPlusX { beta };
        let exact = 1.0 / (1.0 - (2.0f64 / beta).sqrt() * (-0.5f64).exp());
        assert!((t.inverse_lipschitz_on(-10.0, 10.0) - exact).abs() < 1e-12);
        assert_eq!(Transform::GaussBumpPlusX { beta: 0.5 }.inverse_lipschitz_on(-5.0, 5.0), f64::INFINITY);
    }

    #[test]
    fn model_json_round_trip() {
        let m = ModelSpec::cum_sum_transform(vec![1.0, 2.0], Transform::GaussBumpPlusX { beta: 2.5 }, u11()).unwrap();
        let back = ModelSpec::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        let text = r#"{"variant": "moving_average", "coeffs": [1, 1], "law": {"kind": "uniform_on_interval", "a": -1, "b": 1}}"#;
        let ma = ModelSpec::from_json(text).unwrap();
        assert_eq!(ma, ModelSpec::moving_average(vec![1.0, 1.0], u11()).unwrap());
        assert!(ModelSpec::from_json(r#"{"variant": "moving_average", "coeffs": [], "law": {"kind": "rademacher"}}"#).is_err());
        assert!(ModelSpec::from_json(r#"{"variant": "arma", "law": {"kind": "rademacher"}}"#).is_err());
    }
}
