//! Across-replicate estimators used by the Monte Carlo checks.

use statrs::distribution::{Beta, ContinuousCDF};

/// Estimate together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> Estimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    Estimate {
        value: mean,
        se: (var / n).sqrt(),
    }
}

/// Unbiased sample covariance of paired draws with a jackknife standard error.
///
/// Leave-one-out covariances are computed from running sums, so the cost is
/// linear in the number of pairs.
pub fn covariance_jackknife(a: &[f64], b: &[f64]) -> Estimate {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    assert!(n >= 3, "jackknife needs at least three pairs");
    let nf = n as f64;
    // Shift by the first pair to limit cancellation in the raw sums.
    let (sa0, sb0) = (a[0], b[0]);
    let (mut sa, mut sb, mut sab) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x - sa0, y - sb0);
        sa += x;
        sb += y;
        sab += x * y;
    }
    let full = (sab - sa * sb / nf) / (nf - 1.0);
    let m = nf - 1.0;
    let mut loo = Vec::with_capacity(n);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x - sa0, y - sb0);
        let (ra, rb, rab) = (sa - x, sb - y, sab - x * y);
        loo.push((rab - ra * rb / m) / (m - 1.0));
    }
    let loo_mean = loo.iter().sum::<f64>() / nf;
    let jk_var = (nf - 1.0) / nf * loo.iter().map(|c| (c - loo_mean).powi(2)).sum::<f64>();
    Estimate {
        value: full,
        se: jk_var.sqrt(),
    }
}

/// Sample variance with its jackknife standard error.
pub fn variance_se(xs: &[f64]) -> Estimate {
    covariance_jackknife(xs, xs)
}

/// Linear-interpolation quantile (type 7) of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Two-sided Clopper–Pearson lower limit for `successes` out of `trials`
/// at confidence `1 - alpha`.
pub fn clopper_pearson_lower(successes: u64, trials: u64, alpha: f64) -> f64 {
    if successes == 0 {
        return 0.0;
    }
    let beta = Beta::new(successes as f64, (trials - successes + 1) as f64)
        .expect("valid beta parameters");
    beta.inverse_cdf(alpha / 2.0)
}

/// Standard normal distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Largest vertical distance between the empirical distribution of `sorted`
/// and the continuous distribution function `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}
