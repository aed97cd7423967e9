//! Closed-form exponential bounds for block sums and the parameter schedules
//! behind the strong-law rates.
//!
//! Every evaluator returns its value together with the list of hypotheses
//! that fail at the given arguments; nothing here refuses to evaluate.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{fit_line, fit_plane, geometric_sum};

/// Inputs shared by the block and tail bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    /// Almost-sure bound on `|X_n|`.
    pub c: f64,
    pub sigma2: f64,
    pub p_n: usize,
    pub d_n: f64,
    pub n: usize,
}

impl BoundParams {
    pub fn new(c: f64, sigma2: f64, p_n: usize, d_n: f64, n: usize) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Precondition(format!("c must be positive, got {c}")));
        }
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::Precondition(format!("sigma2 must be positive, got {sigma2}")));
        }
        if !(d_n > 1.0) {
            return Err(Error::Precondition(format!("d_n must exceed 1, got {d_n}")));
        }
        if p_n == 0 || 2 * p_n > n {
            return Err(Error::Precondition(format!(
                "p_n must satisfy 1 <= p_n <= n/2, got p_n = {p_n}, n = {n}"
            )));
        }
        Ok(BoundParams {
            c,
            sigma2,
            p_n,
            d_n,
            n,
        })
    }

    pub fn r_n(&self) -> usize {
        self.n / (2 * self.p_n)
    }

    /// Largest `t` allowed by the block Laplace bound: `(d_n-1)/d_n · 1/(c p_n)`.
    pub fn t_threshold(&self) -> f64 {
        (self.d_n - 1.0) / self.d_n / (self.c * self.p_n as f64)
    }
}

/// Named hypothesis that an evaluation can violate.
pub const COND_T_THRESHOLD: &str = "t <= (d_n-1)/d_n/(c p_n)";
pub const COND_SERIES: &str = "2 t sigma2 d_n - c < 0";

/// Bound value plus the hypotheses it violates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEvaluation {
    pub value: f64,
    pub valid: bool,
    pub violated_conditions: Vec<String>,
}

impl BoundEvaluation {
    fn new(value: f64, violated: Vec<&str>) -> Self {
        BoundEvaluation {
            value,
            valid: violated.is_empty(),
            violated_conditions: violated.into_iter().map(String::from).collect(),
        }
    }
}

fn threshold_violations(t: f64, params: &BoundParams) -> Vec<&'static str> {
    if t <= params.t_threshold() {
        Vec::new()
    } else {
        vec![COND_T_THRESHOLD]
    }
}

/// `E e^{t Y_j} ≤ exp(2 t² σ² p_n d_n)`.
pub fn laplace_block_bound(t: f64, params: &BoundParams) -> BoundEvaluation {
    let value = (2.0 * t * t * params.sigma2 * params.p_n as f64 * params.d_n).exp();
    BoundEvaluation::new(value, threshold_violations(t, params))
}

/// Log of `t² e^{tcn/2} p_n v Σ_{j=0}^{r_n-2} exp(j t p_n (2tσ²d_n - c))`
/// without the `e^{-tx}` factor; `None` when the term vanishes.
fn covariance_term_ln(t: f64, params: &BoundParams, v_pn: f64) -> Option<f64> {
    let r = params.r_n();
    if v_pn <= 0.0 || t == 0.0 || r < 2 {
        return None;
    }
    let p = params.p_n as f64;
    let log_ratio = t * p * (2.0 * t * params.sigma2 * params.d_n - params.c);
    let sum = geometric_sum(log_ratio, r - 1);
    Some(2.0 * t.abs().ln() + 0.5 * t * params.c * params.n as f64 + p.ln() + v_pn.ln() + sum.ln())
}

/// Bound on `E e^{t Z_od}` accounting for covariances between odd blocks
/// through `v_pn = v(p_n)`.
pub fn odd_sum_mgf_bound(t: f64, params: &BoundParams, v_pn: f64) -> BoundEvaluation {
    let independent = (t * t * params.sigma2 * params.n as f64 * params.d_n).exp();
    let cov = covariance_term_ln(t, params, v_pn).map_or(0.0, f64::exp);
    BoundEvaluation::new(cov + independent, threshold_violations(t, params))
}

/// Explicit Markov bound on `P(Z_od > x)` at `t = x / (2 σ² n d_n)`.
pub fn tail_bound(x: f64, params: &BoundParams, v_pn: f64) -> BoundEvaluation {
    let nd = params.n as f64 * params.d_n;
    let t = x / (2.0 * params.sigma2 * nd);
    let gaussian = (-x * x / (4.0 * params.sigma2 * nd)).exp();
    let cov = covariance_term_ln(t, params, v_pn).map_or(0.0, |ln| (ln - t * x).exp());
    let mut violated = threshold_violations(t, params);
    if 2.0 * t * params.sigma2 * params.d_n - params.c >= 0.0 {
        violated.push(COND_SERIES);
    }
    BoundEvaluation::new(cov + gaussian, violated)
}

/// Moment condition `sup_{|t|≤τ} E e^{t|X|} ≤ U`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceCondition {
    pub tau: f64,
    pub u: f64,
}

impl LaplaceCondition {
    pub fn new(tau: f64, u: f64) -> Result<Self> {
        if !(tau > 3.0) {
            return Err(Error::Precondition(format!("tau must exceed 3, got {tau}")));
        }
        if !(u > 0.0) {
            return Err(Error::Precondition(format!("U must be positive, got {u}")));
        }
        Ok(LaplaceCondition { tau, u })
    }
}

/// Coupled sequences `(p_n, d_n, ε_n, c_n)` at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSchedule {
    pub n: usize,
    pub theta: f64,
    pub alpha: f64,
    pub sigma2: f64,
    pub p_n: usize,
    pub d_n: f64,
    /// Constant `K` in `d_n = K · n^{2θ-1} · log n · (c_n² when truncating)`.
    pub d_constant: f64,
    pub epsilon_n: f64,
    /// Laplace-transform argument `ε_n / (2 σ² d_n)`.
    pub t: f64,
    /// Level bounding the (possibly truncated) variables: `c`, or `c_n = log n`.
    pub level: f64,
    /// Truncation level `c_n`, only for unbounded variables.
    pub c_n: Option<f64>,
    /// Markov exponent for the residual tail, only for unbounded variables.
    pub markov_t: Option<f64>,
    /// `2 n U / (t² ε_n²) e^{-t c_n}`, only for unbounded variables.
    pub tail_term: Option<f64>,
    /// Exponent `1 - θ` of the convergence rate.
    pub rate_exponent: f64,
}

impl RateSchedule {
    /// Block Laplace threshold `t ≤ (d_n-1)/d_n · 1/(level · p_n)`.
    pub fn lemma_threshold_holds(&self) -> bool {
        self.t <= (self.d_n - 1.0) / self.d_n / (self.level * self.p_n as f64)
    }

    /// `t · level · p_n ≤ d_n / 2`.
    pub fn block_control_holds(&self) -> bool {
        self.t * self.level * self.p_n as f64 <= 0.5 * self.d_n
    }

    /// Markov exponent admissible under the moment condition.
    pub fn markov_holds(&self, cond: &LaplaceCondition) -> bool {
        self.markov_t.is_none_or(|t| t > 0.0 && t < cond.tau)
    }

    /// Every inequality this schedule must satisfy, by name.
    pub fn admissibility(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("d_n > 1", self.d_n > 1.0),
            (COND_T_THRESHOLD, self.lemma_threshold_holds()),
            ("t c p_n <= d_n/2", self.block_control_holds()),
        ]
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility().iter().all(|(_, ok)| *ok)
    }
}

fn check_rate_inputs(n: usize, theta: f64, alpha: f64, sigma2: f64) -> Result<()> {
    if !(theta > 0.5 && theta < 1.0) {
        return Err(Error::Precondition(format!("theta must lie in (1/2, 1), got {theta}")));
    }
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::Precondition(format!("sigma2 must be positive, got {sigma2}")));
    }
    if n < 4 {
        return Err(Error::Precondition(format!("n must be at least 4, got {n}")));
    }
    Ok(())
}

/// Schedule for bounded variables: `p_n = ⌊n^θ⌋`,
/// `d_n = (4αc²/σ²) n^{2θ-1} log n`, `ε_n = √(4σ²α d_n log n / n)`.
pub fn slln_schedule(n: usize, theta: f64, alpha: f64, sigma2: f64, c: f64) -> Result<RateSchedule> {
    check_rate_inputs(n, theta, alpha, sigma2)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("c must be positive, got {c}")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let p_n = crate::blocks::block_length(n, theta);
    let d_constant = 4.0 * alpha * c * c / sigma2;
    let d_n = d_constant * nf.powf(2.0 * theta - 1.0) * ln_n;
    let epsilon_n = (4.0 * sigma2 * alpha * d_n * ln_n / nf).sqrt();
    Ok(RateSchedule {
        n,
        theta,
        alpha,
        sigma2,
        p_n,
        d_n,
        d_constant,
        epsilon_n,
        t: epsilon_n / (2.0 * sigma2 * d_n),
        level: c,
        c_n: None,
        markov_t: None,
        tail_term: None,
        rate_exponent: 1.0 - theta,
    })
}

/// Markov exponent `α + 3 - 2θ` that makes the residual tail term decay
/// like `n^{-α}` up to powers of `log n`.
pub fn markov_exponent(alpha: f64, theta: f64) -> f64 {
    alpha + 3.0 - 2.0 * theta
}

/// Schedule for unbounded variables truncated at `c_n = log n`:
/// `d_n = (α/σ²) n^{2θ-1} c_n² log n`, `ε_n² = 4α² n^{2θ-2} c_n² log n`.
pub fn unbounded_schedule(
    n: usize,
    theta: f64,
    alpha: f64,
    sigma2: f64,
    cond: &LaplaceCondition,
) -> Result<RateSchedule> {
    check_rate_inputs(n, theta, alpha, sigma2)?;
    let markov_t = markov_exponent(alpha, theta);
    if !(cond.tau > markov_t) {
        return Err(Error::Precondition(format!(
            "tau = {} must exceed the Markov exponent alpha + 3 - 2 theta = {markov_t}",
            cond.tau
        )));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let c_n = ln_n;
    let p_n = crate::blocks::block_length(n, theta);
    let d_constant = alpha / sigma2;
    let d_n = d_constant * nf.powf(2.0 * theta - 1.0) * c_n * c_n * ln_n;
    let eps2 = 4.0 * alpha * alpha * nf.powf(2.0 * theta - 2.0) * c_n * c_n * ln_n;
    let epsilon_n = eps2.sqrt();
    let tail_term = 2.0 * nf * cond.u / (markov_t * markov_t * eps2) * (-markov_t * c_n).exp();
    Ok(RateSchedule {
        n,
        theta,
        alpha,
        sigma2,
        p_n,
        d_n,
        d_constant,
        epsilon_n,
        t: epsilon_n / (2.0 * sigma2 * d_n),
        level: c_n,
        c_n: Some(c_n),
        markov_t: Some(markov_t),
        tail_term: Some(tail_term),
        rate_exponent: 1.0 - theta,
    })
}

/// Smallest grid point from which every later grid point is admissible.
pub fn first_admissible_n(schedules: &[RateSchedule]) -> Option<usize> {
    let mut first = None;
    for s in schedules.iter().rev() {
        if s.is_admissible() {
            first = Some(s.n);
        } else {
            break;
        }
    }
    first
}

/// Power-law fit of the residual tail term across a grid of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailDecayFit {
    /// Exponent of `n` with the `log log n` factor modelled separately.
    pub power_exponent: f64,
    /// Exponent of `log n` in the same fit.
    pub log_exponent: f64,
    /// Plain slope of `log term` against `log n`.
    pub raw_slope: f64,
}

pub fn fit_tail_decay(schedules: &[RateSchedule]) -> Result<TailDecayFit> {
    let pts: Vec<(f64, f64)> = schedules
        .iter()
        .filter_map(|s| s.tail_term.map(|v| ((s.n as f64).ln(), v.ln())))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Precondition("need at least three unbounded schedules".into()));
    }
    let ln_n: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ln_ln_n: Vec<f64> = ln_n.iter().map(|x| x.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (_, power_exponent, log_exponent) = fit_plane(&ln_n, &ln_ln_n, &y);
    Ok(TailDecayFit {
        power_exponent,
        log_exponent,
        raw_slope: fit_line(&ln_n, &y).slope,
    })
}

/// `E X_{2,1,n}² ≤ (2U/t²) e^{-t c_n}` for `t ∈ (0, τ)`.
pub fn truncated_second_moment_bound(t: f64, c_n: f64, u: f64, tau: f64) -> Result<f64> {
    if !(t > 0.0 && t < tau) {
        return Err(Error::Precondition(format!("t must lie in (0, {tau}), got {t}")));
    }
    Ok(2.0 * u / (t * t) * (-t * c_n).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(c: f64, sigma2: f64, p: usize, d: f64, n: usize) -> BoundParams {
        BoundParams::new(c, sigma2, p, d, n).unwrap()
    }

    #[test]
    fn laplace_block_examples() {
        let pr = params(1.0, 1.0, 4, 2.0, 64);
        let zero = laplace_block_bound(0.0, &pr);
        assert_eq!((zero.value, zero.valid), (1.0, true));
        let b = laplace_block_bound(0.1, &pr);
        assert!(b.valid);
        assert!((b.value - 0.16f64.exp()).abs() < 1e-15);
        assert!((b.value - 1.17351).abs() < 1e-5);
        let bad = laplace_block_bound(0.2, &pr);
        assert!(!bad.valid);
        assert_eq!(bad.violated_conditions, vec![COND_T_THRESHOLD.to_string()]);
        assert!((bad.value - 0.64f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn odd_sum_reduces_to_product_bound_without_dependence() {
        let pr = params(1.0, 2.0, 8, 3.0, 1000);
        for t in [0.0, 0.01, 0.05] {
            let b = odd_sum_mgf_bound(t, &pr, 0.0);
            assert_eq!(b.value, (t * t * 2.0 * 1000.0 * 3.0).exp());
        }
    }

    #[test]
    fn odd_sum_single_term_when_two_block_pairs() {
        // r_n = 2: the inner sum is the single j = 0 term.
        let pr = params(1.0, 1.0, 4, 2.0, 16);
        assert_eq!(pr.r_n(), 2);
        let (t, v) = (0.05, 0.3);
        let expected = t * t * (t * 16.0 / 2.0f64).exp() * 4.0 * v + (t * t * 16.0 * 2.0f64).exp();
        let got = odd_sum_mgf_bound(t, &pr, v).value;
        assert!(((got - expected) / expected).abs() < 1e-14);
    }

    #[test]
    fn odd_sum_matches_term_by_term_evaluation() {
        let (t, c, s2, n, p, d, v) = (0.01f64, 1.0, 1.0, 1024usize, 32usize, 4.0, 0.1);
        let pr = params(c, s2, p, d, n);
        let r = n / (2 * p);
        let mut sum = 0.0;
        for j in 0..=(r - 2) {
            sum += (j as f64 * t * p as f64 * (2.0 * t * s2 * d - c)).exp();
        }
        let expected = t * t * (t * c * n as f64 / 2.0).exp() * p as f64 * v * sum
            + (t * t * s2 * n as f64 * d).exp();
        let got = odd_sum_mgf_bound(t, &pr, v);
        assert!(got.valid);
        assert!(((got.value - expected) / expected).abs() < 1e-10);
    }

    #[test]
    fn tail_bound_examples() {
        let pr = params(2.0, 4.0 / 3.0, 97, 50.0, 4096);
        let nd = 4096.0 * 50.0;
        let x = 300.0;
        let b = tail_bound(x, &pr, 0.0);
        assert_eq!(b.value, (-x * x / (4.0 * 4.0 / 3.0 * nd)).exp());
        assert!(b.valid);
        let b0 = tail_bound(1e-9, &pr, 0.7);
        assert!((b0.value - 1.0).abs() < 1e-9);
        // x = nε with ε ≥ c
        let bad = tail_bound(4096.0 * 2.0, &pr, 0.0);
        assert!(bad.violated_conditions.contains(&COND_SERIES.to_string()));
        let worse = tail_bound(4096.0 * 2.5, &pr, 0.0);
        assert!(!worse.valid);
    }

    #[test]
    fn tail_bound_term_by_term() {
        let (c, s2, n, p, d, v) = (1.0f64, 0.5, 2048usize, 20usize, 6.0, 0.05);
        let pr = params(c, s2, p, d, n);
        let x = 150.0;
        let t = x / (2.0 * s2 * n as f64 * d);
        let r = n / (2 * p);
        let sum: f64 = (0..=(r - 2)).map(|j| (j as f64 * t * p as f64 * (2.0 * t * s2 * d - c)).exp()).sum();
        let expected = t * t * (t * c * n as f64 / 2.0).exp() * p as f64 * v * (-t * x).exp() * sum
            + (-x * x / (4.0 * s2 * n as f64 * d)).exp();
        let got = tail_bound(x, &pr, v);
        assert!(((got.value - expected) / expected).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_pure() {
        let pr = params(1.5, 0.7, 9, 12.0, 500);
        assert_eq!(tail_bound(33.0, &pr, 0.2).value.to_bits(), tail_bound(33.0, &pr, 0.2).value.to_bits());
    }

    proptest! {
        #[test]
        fn tail_bound_nonincreasing_on_valid_grid_without_residual_dependence(
            c in 0.5f64..3.0, s2 in 0.2f64..4.0, n in 64usize..8192, theta in 0.51f64..0.95, d in 1.5f64..500.0,
        ) {
            let p = crate::blocks::block_length(n, theta).clamp(1, n / 2);
            let pr = params(c, s2, p, d, n);
            let mut last = f64::INFINITY;
            for k in 0..200 {
                let x = k as f64 * c * n as f64 / 200.0;
                let b = tail_bound(x, &pr, 0.0);
                if b.valid {
                    prop_assert!(b.value <= last);
                    last = b.value;
                }
            }
        }
    }

    #[test]
    fn slln_schedule_hand_values() {
        let (n, theta, alpha, s2, c) = (1usize << 10, 0.55, 2.0, 1.0, 1.0);
        let s = slln_schedule(n, theta, alpha, s2, c).unwrap();
        let ln = (n as f64).ln();
        let d = 4.0 * alpha * c * c / s2 * (n as f64).powf(0.1) * ln;
        let eps = (4.0 * s2 * alpha * d * ln / n as f64).sqrt();
        assert_eq!(s.p_n, 45); // 2^5.5 = 45.25
        assert!(((s.d_n - d) / d).abs() < 1e-12);
        assert!(((s.epsilon_n - eps) / eps).abs() < 1e-12);
        assert!((s.rate_exponent - 0.45).abs() < 1e-15);
        assert!(s.is_admissible());
    }

    #[test]
    fn slln_rate_is_log_over_power() {
        let ratios: Vec<f64> = (8..=20)
            .map(|k| {
                let n = 1usize << k;
                let s = slln_schedule(n, 0.55, 1.5, 1.0, 1.0).unwrap();
                s.epsilon_n * (n as f64).powf(0.45) / (n as f64).ln()
            })
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        // ε_n n^{1-θ} / log n = 4αc exactly
        assert!(max <= 4.0 * 1.5 + 1e-9);
        assert!(ratios.iter().all(|r| (r - 6.0).abs() < 1e-9));
    }

    #[test]
    fn slln_schedule_rejects_bad_theta() {
        assert!(slln_schedule(1024, 1.2, 2.0, 1.0, 1.0).is_err());
        assert!(slln_schedule(1024, 0.5, 2.0, 1.0, 1.0).is_err());
        assert!(slln_schedule(1024, 0.6, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn slln_schedule_admissible_from_reported_start() {
        let grid: Vec<RateSchedule> = (2..=20)
            .map(|k| slln_schedule(1usize << k, 0.55, 2.0, 4.0 / 3.0, 2.0).unwrap())
            .collect();
        let n0 = first_admissible_n(&grid).unwrap();
        assert!(n0 <= 256);
        assert!(grid.iter().filter(|s| s.n >= n0).all(|s| s.is_admissible()));
    }

    #[test]
    fn unbounded_schedule_hand_values() {
        let cond = LaplaceCondition::new(4.0, 1.0).unwrap();
        let (n, theta, alpha) = (1usize << 12, 0.55, 1.5);
        let s = unbounded_schedule(n, theta, alpha, 1.0, &cond).unwrap();
        let nf = n as f64;
        let ln = nf.ln();
        let d = alpha * nf.powf(0.1) * ln * ln * ln;
        let eps = (4.0 * alpha * alpha * nf.powf(-0.9) * ln * ln * ln).sqrt();
        let tm = alpha + 3.0 - 2.0 * theta;
        let tail = 2.0 * nf / (tm * tm * eps * eps) * (-tm * ln).exp();
        assert_eq!(s.p_n, 97);
        assert!((s.c_n.unwrap() - ln).abs() < 1e-15);
        assert!(((s.d_n - d) / d).abs() < 1e-12);
        assert!(((s.epsilon_n - eps) / eps).abs() < 1e-12);
        assert!(((s.tail_term.unwrap() - tail) / tail).abs() < 1e-12);
        assert!(s.is_admissible() && s.markov_holds(&cond));
    }

    #[test]
    fn unbounded_rate_identity() {
        let cond = LaplaceCondition::new(4.0, 1.0).unwrap();
        for k in 8..=20 {
            let n = 1usize << k;
            let s = unbounded_schedule(n, 0.55, 1.5, 1.0, &cond).unwrap();
            let nf = n as f64;
            let r = s.epsilon_n * nf.powf(0.45) / nf.ln().powf(1.5);
            assert!((r - 2.0 * 1.5).abs() < 1e-10, "n = {n}: {r}");
        }
    }

    #[test]
    fn unbounded_tail_term_decays_like_n_to_minus_alpha() {
        let cond = LaplaceCondition::new(4.5, 2.0).unwrap();
        let alpha = 1.5;
        let grid: Vec<RateSchedule> = (8..=20)
            .map(|k| unbounded_schedule(1usize << k, 0.55, alpha, 1.0, &cond).unwrap())
            .collect();
        let fit = fit_tail_decay(&grid).unwrap();
        assert!((fit.power_exponent + alpha).abs() < 0.05, "{fit:?}");
        assert!((fit.log_exponent + 3.0).abs() < 1e-6, "{fit:?}");
    }

    #[test]
    fn unbounded_schedule_preconditions() {
        let low_tau = LaplaceCondition::new(3.2, 1.0).unwrap();
        assert!(unbounded_schedule(4096, 0.55, 1.5, 1.0, &low_tau).is_err());
        assert!(LaplaceCondition::new(3.0, 1.0).is_err());
        assert!(LaplaceCondition::new(4.0, 0.0).is_err());
    }

    #[test]
    fn truncated_second_moment_examples() {
        let b = truncated_second_moment_bound(2.0, 100f64.ln(), 1.0, 4.0).unwrap();
        assert!((b - 5e-5).abs() < 1e-18);
        let far = truncated_second_moment_bound(2.0, 400.0, 1.0, 4.0).unwrap();
        assert!(far < 1e-300);
        let doubled = truncated_second_moment_bound(2.0, 100f64.ln(), 2.0, 4.0).unwrap();
        assert!((doubled - 2.0 * b).abs() < 1e-18);
        assert!(truncated_second_moment_bound(4.0, 1.0, 1.0, 4.0).is_err());
        assert!(truncated_second_moment_bound(0.0, 1.0, 1.0, 4.0).is_err());
    }
}
