//! Quadrature and small closed-form helpers shared by the bound evaluators
//! and the moment oracles.

use crate::error::{Error, Result};

/// Relative tolerance used for every numerically integrated moment.
pub const QUAD_REL_TOL: f64 = 1e-10;

/// Integrates `f` over `[a, b]` to tolerance [`QUAD_REL_TOL`] relative to `∫|f|`.
///
/// The interval is split into `pieces` equal panels (useful for oscillating
/// integrands). A panel whose error estimate misses its target is reported
/// as [`Error::Quadrature`] instead of being accepted.
pub fn integrate<F>(f: F, a: f64, b: f64, pieces: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let pieces = pieces.max(1);
    let width = (b - a) / pieces as f64;
    let panel = |k: usize, target: f64| {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == pieces { b } else { lo + width };
        quadrature::double_exponential::integrate(&f, lo, hi, target)
    };

    // First pass fixes the scale from ∫|f|, so cancelling integrands are
    // held to a tolerance relative to their magnitude rather than to zero.
    let rough: f64 = (0..pieces)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == pieces { b } else { lo + width };
            quadrature::double_exponential::integrate(|x| f(x).abs(), lo, hi, 1e-6).integral
        })
        .sum();
    let scale = rough.abs().max(f64::MIN_POSITIVE);
    let target = QUAD_REL_TOL * scale / pieces as f64;
    let mut total = 0.0;
    for k in 0..pieces {
        let out = panel(k, target);
        // Absolute floor: panels whose contribution is below 1e-300 are noise.
        if out.error_estimate > target && out.error_estimate > 1e-300 {
            return Err(Error::Quadrature {
                error_estimate: out.error_estimate,
                target,
            });
        }
        total += out.integral;
    }
    Ok(total)
}

/// `Σ_{j=0}^{terms-1} exp(j·log_ratio)`.
///
/// Uses `(1 - q^m)/(1 - q)` in its `expm1` form and falls back to summing the
/// series term by term when `|1 - q| < 1e-8`.
pub fn geometric_sum(log_ratio: f64, terms: usize) -> f64 {
    if terms == 0 {
        return 0.0;
    }
    let one_minus_q = -log_ratio.exp_m1();
    if one_minus_q.abs() < 1e-8 {
        let mut acc = 0.0;
        for j in (0..terms).rev() {
            acc += (j as f64 * log_ratio).exp();
        }
        return acc;
    }
    (terms as f64 * log_ratio).exp_m1() / log_ratio.exp_m1()
}

/// Ordinary least squares fit `y = intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residual variance.
    pub slope_se: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| {
                let r = y - intercept - slope * x;
                r * r
            })
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        slope_se,
    }
}

/// Least squares on `y = b0 + b1·x1 + b2·x2`; returns `(b0, b1, b2)`.
pub fn fit_plane(x1: &[f64], x2: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = ys.len() as f64;
    let m1 = x1.iter().sum::<f64>() / n;
    let m2 = x2.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut s11, mut s12, mut s22, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..ys.len() {
        let (a, b, y) = (x1[i] - m1, x2[i] - m2, ys[i] - my);
        s11 += a * a;
        s12 += a * b;
        s22 += b * b;
        s1y += a * y;
        s2y += b * y;
    }
    let det = s11 * s22 - s12 * s12;
    let b1 = (s1y * s22 - s2y * s12) / det;
    let b2 = (s2y * s11 - s1y * s12) / det;
    (my - b1 * m1 - b2 * m2, b1, b2)
}
