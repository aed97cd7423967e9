//! Monte Carlo confrontations with the covariance, tail and
//! characteristic-function inequalities.

use serde::Serialize;

use super::{LipschitzFunctional, MCConfig, VerificationReport};
use crate::blocks::{odd_block_sum, BlockScheme};
use crate::bounds::{tail_bound, BoundParams};
use crate::coefficients::{cox_grimmett, gamma_sequence, long_run_variance, newman_discrepancy_bound};
use crate::error::{Error, Result};
use crate::models::{transform_moments, InnovationLaw, ModelSpec, PathGenerator, Transform};
use crate::replicates::map_replicates;
use crate::stats::{clopper_pearson_lower, covariance_jackknife, std_normal_cdf};

/// Compares `|Cov(f(X_I), g(X_J))|` with `‖f‖ ‖g‖ Σ_{i∈I} Σ_{j∈J} γ_{|j-i|}`.
///
/// Indices are 1-based and must lie in `1..=n`.
#[allow(clippy::too_many_arguments)]
pub fn check_lipschitz_cov(
    model: &ModelSpec,
    f: &LipschitzFunctional,
    g: &LipschitzFunctional,
    i_set: &[usize],
    j_set: &[usize],
    n: usize,
    cfg: &MCConfig,
) -> Result<VerificationReport> {
    if i_set.is_empty() || j_set.is_empty() {
        return Err(Error::Precondition("index sets must be nonempty".into()));
    }
    if let Some(bad) = i_set.iter().chain(j_set).find(|&&k| k == 0 || k > n) {
        return Err(Error::Precondition(format!("index {bad} outside 1..={n}")));
    }
    if let Some(shared) = i_set.iter().find(|k| j_set.contains(k)) {
        return Err(Error::Precondition(format!("index sets overlap at {shared}")));
    }
    if f.weights.len() != i_set.len() || g.weights.len() != j_set.len() {
        return Err(Error::Precondition("functional weights must match index set sizes".into()));
    }
    let gamma = gamma_sequence(model)?;
    let mut sum = 0.0;
    for &i in i_set {
        for &j in j_set {
            sum += gamma.gamma(i.abs_diff(j));
        }
    }
    let bound = f.lipschitz_norm() * g.lipschitz_norm() * sum;

    let len = *i_set.iter().chain(j_set).max().expect("nonempty");
    let gen = PathGenerator::new(model, len)?;
    let pairs = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        let xi: Vec<f64> = i_set.iter().map(|&k| buf[k - 1]).collect();
        let xj: Vec<f64> = j_set.iter().map(|&k| buf[k - 1]).collect();
        (f.eval(&xi), g.eval(&xj))
    });
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let cov = covariance_jackknife(&a, &b);
    let param = format!("I={};J={};n={n}", join(i_set), join(j_set));
    Ok(VerificationReport::judge("cov", param, cov.value.abs(), cov.se, bound, true, cfg))
}

fn join(ks: &[usize]) -> String {
    ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ")
}

/// Standard error for an exceedance frequency; exact Clopper–Pearson below
/// ten exceedances, normal approximation otherwise.
fn exceedance_se(count: usize, trials: usize, multiplier: f64) -> f64 {
    let p = count as f64 / trials as f64;
    if count >= 10 || multiplier <= 0.0 {
        return (p * (1.0 - p) / trials as f64).sqrt();
    }
    let alpha = 2.0 * (1.0 - std_normal_cdf(multiplier));
    let lower = clopper_pearson_lower(count as u64, trials as u64, alpha);
    (p - lower).max(0.0) / multiplier
}

/// Empirical `P(Z_od > x)` against the explicit tail bound, one row per `x`.
pub fn check_tail_domination(
    model: &ModelSpec,
    scheme: &BlockScheme,
    d_n: f64,
    x_grid: &[f64],
    cfg: &MCConfig,
) -> Result<Vec<VerificationReport>> {
    model.require_stationary("tail domination")?;
    let c = model
        .sup_abs()
        .ok_or_else(|| Error::Precondition("tail domination needs a bounded model".into()))?;
    let sigma2 = long_run_variance(model)?.sigma2;
    let gamma = gamma_sequence(model)?;
    let v = cox_grimmett(&gamma, scheme.p_n);
    let params = BoundParams::new(c, sigma2, scheme.p_n, d_n, scheme.n)?;

    let gen = PathGenerator::new(model, scheme.n)?;
    let mut z = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        odd_block_sum(buf, scheme)
    });
    z.sort_by(f64::total_cmp);
    Ok(x_grid
        .iter()
        .map(|&x| {
            let count = z.len() - z.partition_point(|&v| v <= x);
            let est = count as f64 / z.len() as f64;
            let se = exceedance_se(count, z.len(), cfg.error_multiplier);
            let b = tail_bound(x, &params, v);
            let param = format!("x={x};n={};p_n={};d_n={d_n}", scheme.n, scheme.p_n);
            VerificationReport::judge("tail", param, est, se, b.value, b.valid, cfg)
        })
        .collect())
}

pub const NEWMAN_MAX_N: usize = 16;

/// `|E e^{itS_n} - Π E e^{itX_j}|` against `4t² Σ (n-j) γ_j`, one row per `t`.
///
/// Joint and marginal characteristic functions come from the same
/// replicates; the standard error uses per-replicate influence values of
/// the real and imaginary parts.
pub fn check_newman(model: &ModelSpec, n: usize, t_grid: &[f64], cfg: &MCConfig) -> Result<Vec<VerificationReport>> {
    if n == 0 || n > NEWMAN_MAX_N {
        return Err(Error::Precondition(format!("n must lie in 1..={NEWMAN_MAX_N}, got {n}")));
    }
    let gamma = gamma_sequence(model)?;
    let gen = PathGenerator::new(model, n)?;
    let paths: Vec<f64> = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        buf.clone()
    })
    .concat();
    let r = cfg.replicates as f64;

    Ok(t_grid
        .iter()
        .map(|&t| {
            let mut joint = (0.0, 0.0);
            let mut marg = vec![(0.0, 0.0); n];
            for path in paths.chunks_exact(n) {
                let s: f64 = path.iter().sum();
                joint.0 += (t * s).cos();
                joint.1 += (t * s).sin();
                for (m, x) in marg.iter_mut().zip(path) {
                    m.0 += (t * x).cos();
                    m.1 += (t * x).sin();
                }
            }
            let joint = (joint.0 / r, joint.1 / r);
            let marg: Vec<(f64, f64)> = marg.iter().map(|m| (m.0 / r, m.1 / r)).collect();
            let prod = marg.iter().fold((1.0, 0.0), |a, b| cmul(a, *b));
            let diff = (joint.0 - prod.0, joint.1 - prod.1);
            // d prod / d m_j = Π_{k≠j} m_k
            let partials: Vec<(f64, f64)> = (0..n)
                .map(|j| {
                    marg.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .fold((1.0, 0.0), |a, (_, b)| cmul(a, *b))
                })
                .collect();
            let (mut ss_re, mut ss_im) = (0.0, 0.0);
            for path in paths.chunks_exact(n) {
                let s: f64 = path.iter().sum();
                let mut inf = ((t * s).cos() - joint.0, (t * s).sin() - joint.1);
                for ((x, m), d) in path.iter().zip(&marg).zip(&partials) {
                    let dev = ((t * x).cos() - m.0, (t * x).sin() - m.1);
                    let term = cmul(*d, dev);
                    inf.0 -= term.0;
                    inf.1 -= term.1;
                }
                ss_re += inf.0 * inf.0;
                ss_im += inf.1 * inf.1;
            }
            let se = ((ss_re + ss_im) / (r * (r - 1.0))).sqrt();
            let est = diff.0.hypot(diff.1);
            let bound = newman_discrepancy_bound(&gamma, n, t);
            VerificationReport::judge("newman", format!("t={t};n={n}"), est, se, bound, true, cfg)
        })
        .collect())
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Both sides of the quasi-association inequality at one `α_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiRow {
    pub alpha1: f64,
    /// `Cov(X_1, X_2) = α_1² Var ξ`.
    pub cov_x: f64,
    /// `Cov(Y_1, Y_2) = E g(α_2 ξ) · Var g(α_1 ξ)`.
    pub cov_y: f64,
    /// Lipschitz norm of `-log` on the support of `(Y_1, Y_2)`.
    pub f_norm: f64,
    /// `‖f‖² Cov(Y_1, Y_2)`.
    pub rhs: f64,
    pub inequality_holds: bool,
    /// `Lip(y_1) Lip(E[Y_2 | ξ_1]) Var ξ`, the L-weak bound on `|Cov(Y_1, Y_2)|`.
    pub l_weak_bound: f64,
    pub l_weak_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiAssociationReport {
    pub alpha2: f64,
    pub rows: Vec<QuasiRow>,
    /// Smallest grid `α_1` at which the inequality fails.
    pub first_violation: Option<f64>,
    /// Simulated `Cov(Y_1, Y_2)` at the first grid point against its closed form.
    pub monte_carlo: VerificationReport,
}

impl QuasiAssociationReport {
    /// One row per `α_1`, `VIOLATED` where the inequality fails, then the
    /// Monte Carlo cross-check.
    pub fn to_reports(&self, cfg: &MCConfig) -> Vec<VerificationReport> {
        let mut out: Vec<VerificationReport> = self
            .rows
            .iter()
            .map(|row| {
                let param = format!("alpha1={};alpha2={}", row.alpha1, self.alpha2);
                VerificationReport::judge("quasi", param, row.cov_x, 0.0, row.rhs, true, cfg)
            })
            .collect();
        out.push(self.monte_carlo.clone());
        out
    }
}

/// Searches `alpha1_grid` for a failure of
/// `Cov(X_1, X_2) ≤ ‖f‖² Cov(g(X_1), g(X_2))` with `g(x) = e^{-x}`,
/// `X_1 = α_1 ξ_1`, `X_2 = α_1 ξ_1 + α_2 ξ_2` and uniform innovations.
pub fn check_quasi_association_counterexample(
    alpha1_grid: &[f64],
    alpha2: f64,
    law: &InnovationLaw,
    cfg: &MCConfig,
) -> Result<QuasiAssociationReport> {
    if !matches!(law, InnovationLaw::UniformOnInterval { .. }) {
        return Err(Error::Precondition("the counterexample search needs a uniform law".into()));
    }
    if alpha1_grid.is_empty() || alpha1_grid.iter().chain([&alpha2]).any(|a| !(*a > 0.0)) {
        return Err(Error::Precondition("coefficients must be positive and the grid nonempty".into()));
    }
    let var_xi = law.variance();
    let h = law.half_width();
    let (mean_g2, _) = transform_moments(Transform::NegExp, law, alpha2)?;
    let mut rows = Vec::with_capacity(alpha1_grid.len());
    for &alpha1 in alpha1_grid {
        let (_, var_g1) = transform_moments(Transform::NegExp, law, alpha1)?;
        let model = ModelSpec::cum_sum_transform(vec![alpha1, alpha2], Transform::NegExp, law.clone())?;
        let f_norm = model.inverse_transform_lipschitz(2).expect("cumulative-sum model");
        let cov_x = alpha1 * alpha1 * var_xi;
        let cov_y = mean_g2 * var_g1;
        let rhs = f_norm * f_norm * cov_y;
        let lip_y1 = alpha1 * (alpha1 * h).exp();
        let l_weak_bound = lip_y1 * mean_g2 * lip_y1 * var_xi;
        rows.push(QuasiRow {
            alpha1,
            cov_x,
            cov_y,
            f_norm,
            rhs,
            inequality_holds: cov_x <= rhs,
            l_weak_bound,
            l_weak_holds: cov_y.abs() <= l_weak_bound,
        });
    }
    let first_violation = rows.iter().find(|r| !r.inequality_holds).map(|r| r.alpha1);

    let alpha1 = alpha1_grid[0];
    let model = ModelSpec::cum_sum_transform(vec![alpha1, alpha2], Transform::NegExp, law.clone())?;
    let gen = PathGenerator::new(&model, 2)?;
    let pairs = map_replicates(cfg.replicates, cfg.seed, |rng, buf| {
        gen.fill(rng, buf);
        (buf[0], buf[1])
    });
    let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let cov = covariance_jackknife(&a, &b);
    let exact = rows[0].cov_y;
    let monte_carlo = VerificationReport::judge(
        "quasi_mc",
        format!("alpha1={alpha1};alpha2={alpha2}"),
        (cov.value - exact).abs(),
        cov.se,
        0.0,
        true,
        cfg,
    );
    Ok(QuasiAssociationReport {
        alpha2,
        rows,
        first_violation,
        monte_carlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::BlockScheme;
    use crate::verify::{PiecewiseLinear, Verdict};

    fn uniform() -> InnovationLaw {
        InnovationLaw::uniform(-1.0, 1.0).unwrap()
    }

    fn ma11() -> ModelSpec {
        ModelSpec::moving_average(vec![1.0, 1.0], uniform()).unwrap()
    }

    fn ident(k: usize) -> LipschitzFunctional {
        LipschitzFunctional::new(PiecewiseLinear::identity(), vec![1.0; k]).unwrap()
    }

    #[test]
    fn lipschitz_cov_iid_has_zero_bound() {
        let cfg = MCConfig::new(20_000, 3).unwrap();
        let model = ModelSpec::iid(uniform()).unwrap();
        let r = check_lipschitz_cov(&model, &ident(1), &ident(2), &[1], &[2, 3], 3, &cfg).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.verdict, Verdict::Dominated);
    }

    #[test]
    fn lipschitz_cov_ma_lag_one() {
        // Rademacher innovations: Cov(X_1, X_2) = 1 = γ_1.
        let model = ModelSpec::moving_average(vec![1.0, 1.0], InnovationLaw::Rademacher).unwrap();
        let cfg = MCConfig::new(20_000, 5).unwrap();
        let r = check_lipschitz_cov(&model, &ident(1), &ident(1), &[1], &[2], 2, &cfg).unwrap();
        assert_eq!(r.bound, 1.0);
        assert!((r.estimate - 1.0).abs() < 4.0 * r.se);
        assert_eq!(r.verdict, Verdict::Dominated);
    }

    #[test]
    fn lipschitz_cov_rejects_overlap() {
        let cfg = MCConfig::new(100, 0).unwrap();
        let e = check_lipschitz_cov(&ma11(), &ident(2), &ident(1), &[1, 2], &[2], 3, &cfg);
        assert!(matches!(e, Err(Error::Precondition(_))));
        assert!(check_lipschitz_cov(&ma11(), &ident(1), &ident(1), &[1], &[4], 3, &cfg).is_err());
    }

    #[test]
    fn tail_domination_vacuous_and_support_regions() {
        let model = ma11();
        let scheme = BlockScheme::with_theta(256, 0.55).unwrap();
        let cfg = MCConfig::new(2000, 9).unwrap();
        let max_z = 2.0 * scheme.r_n as f64 * scheme.p_n as f64;
        let rows = check_tail_domination(&model, &scheme, 20.0, &[0.0, max_z + 1.0], &cfg).unwrap();
        assert!((rows[0].estimate - 0.5).abs() < 0.05);
        assert!(rows[0].bound >= 1.0);
        assert_eq!(rows[1].estimate, 0.0);
        assert!(rows.iter().all(|r| r.verdict == Verdict::Dominated));
    }

    #[test]
    fn exceedance_se_switches_to_exact_interval() {
        assert_eq!(exceedance_se(0, 1000, 3.0), 0.0);
        let few = exceedance_se(2, 1000, 3.0);
        let lower = 0.002 - 3.0 * few;
        // exact lower limit is well above the negative normal one
        assert!(lower > 0.0 && lower < 0.002);
        let many = exceedance_se(100, 1000, 3.0);
        assert!((many - (0.1f64 * 0.9 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn newman_iid_and_zero_frequency() {
        let model = ModelSpec::iid(uniform()).unwrap();
        let cfg = MCConfig::new(20_000, 11).unwrap();
        let rows = check_newman(&model, 4, &[0.0, 0.5], &cfg).unwrap();
        assert_eq!((rows[0].estimate, rows[0].bound), (0.0, 0.0));
        assert_eq!(rows[1].bound, 0.0);
        assert!(rows.iter().all(|r| r.verdict == Verdict::Dominated));
        assert!(check_newman(&model, 17, &[0.5], &cfg).is_err());
    }

    #[test]
    fn newman_detects_dependence() {
        let model = ModelSpec::moving_average(vec![1.0, 1.0], InnovationLaw::Rademacher).unwrap();
        let cfg = MCConfig::new(20_000, 12).unwrap();
        let t = 1.0f64;
        let rows = check_newman(&model, 2, &[t], &cfg).unwrap();
        // S = ξ_0 + 2ξ_1 + ξ_2: E e^{itS} = cos²t cos 2t, E e^{itX} = cos²t
        let exact = (t.cos().powi(2) * (2.0 * t).cos() - t.cos().powi(4)).abs();
        assert!((rows[0].estimate - exact).abs() < 4.0 * rows[0].se + 1e-3, "{rows:?}");
        assert_eq!(rows[0].verdict, Verdict::Dominated);
    }

    #[test]
    fn quasi_rows_match_closed_forms() {
        let cfg = MCConfig::new(20_000, 1).unwrap();
        let rep = check_quasi_association_counterexample(&[1.0, 2.0], 1.0, &uniform(), &cfg).unwrap();
        let row = &rep.rows[0];
        assert!((row.cov_x - 1.0 / 3.0).abs() < 1e-15);
        let sinh_ratio = |s: f64| s.sinh() / s;
        let var_g = sinh_ratio(2.0) - sinh_ratio(1.0).powi(2);
        assert!((row.cov_y - sinh_ratio(1.0) * var_g).abs() < 1e-12);
        assert!((row.f_norm - 2f64.exp()).abs() < 1e-12);
        assert!(row.l_weak_holds);
        assert_eq!(rep.monte_carlo.verdict, Verdict::Dominated);
        assert_eq!(rep.to_reports(&cfg).len(), 3);
    }

    #[test]
    fn quasi_requires_uniform_law() {
        let cfg = MCConfig::new(100, 1).unwrap();
        assert!(check_quasi_association_counterexample(&[1.0], 1.0, &InnovationLaw::Rademacher, &cfg).is_err());
    }
}
