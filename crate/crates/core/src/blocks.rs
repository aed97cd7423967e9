//! Alternating block decomposition of partial sums and the truncation split.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::SamplePath;

/// Default exponent for `p_n = ⌊n^θ⌋`.
pub const DEFAULT_THETA: f64 = 0.55;

/// Block length `p_n` and block-pair count `r_n = ⌊n / (2 p_n)⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockScheme {
    pub n: usize,
    pub p_n: usize,
    pub r_n: usize,
}

impl BlockScheme {
    pub fn new(n: usize, p_n: usize) -> Result<Self> {
        if p_n == 0 || 2 * p_n > n {
            return Err(Error::Precondition(format!(
                "block length must satisfy 1 <= p_n <= n/2, got p_n = {p_n}, n = {n}"
            )));
        }
        Ok(BlockScheme {
            n,
            p_n,
            r_n: n / (2 * p_n),
        })
    }

    /// Scheme with `p_n = ⌊n^θ⌋`.
    pub fn with_theta(n: usize, theta: f64) -> Result<Self> {
        BlockScheme::new(n, block_length(n, theta))
    }

    /// Number of indices covered by the `2 r_n` blocks.
    pub fn covered(&self) -> usize {
        2 * self.r_n * self.p_n
    }
}

/// `⌊n^θ⌋`.
pub fn block_length(n: usize, theta: f64) -> usize {
    let p = (n as f64).powf(theta);
    // powf can land a hair under an exact integer power
    let r = p.round();
    if (p - r).abs() < 1e-9 * r.max(1.0) {
        r as usize
    } else {
        p.floor() as usize
    }
}

/// Blocks `Y_j`, alternating sums and remainder of one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<f64>,
    pub z_odd: f64,
    pub z_even: f64,
    pub remainder: f64,
}

/// Splits `values` into `2 r_n` blocks of length `p_n` plus a remainder.
pub fn decompose_values(values: &[f64], scheme: &BlockScheme) -> Result<BlockDecomposition> {
    if values.len() != scheme.n {
        return Err(Error::LengthMismatch {
            expected: scheme.n,
            got: values.len(),
        });
    }
    let covered = scheme.covered();
    let blocks: Vec<f64> = values[..covered]
        .chunks_exact(scheme.p_n)
        .map(|c| c.iter().sum())
        .collect();
    let z_odd = blocks.iter().step_by(2).sum();
    let z_even = blocks.iter().skip(1).step_by(2).sum();
    let remainder = values[covered..].iter().fold(0.0, |a, b| a + b);
    Ok(BlockDecomposition {
        blocks,
        z_odd,
        z_even,
        remainder,
    })
}

pub fn decompose(path: &SamplePath, scheme: &BlockScheme) -> Result<BlockDecomposition> {
    decompose_values(&path.values, scheme)
}

/// `Z_od` alone, without allocating the block list.
pub fn odd_block_sum(values: &[f64], scheme: &BlockScheme) -> f64 {
    let p = scheme.p_n;
    (0..scheme.r_n)
        .map(|j| values[2 * j * p..(2 * j + 1) * p].iter().sum::<f64>())
        .sum()
}

/// `g_c(x) = max(min(x, c), -c)`.
pub fn clip(x: f64, c: f64) -> f64 {
    x.clamp(-c, c)
}

/// Bounded and residual parts of a path truncated at level `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationSplit {
    pub level: f64,
    /// `g_c(x_j) - E g_c(X_1)`
    pub bounded_part: Vec<f64>,
    /// `x_j - g_c(x_j) - E(X_1 - g_c(X_1))`
    pub unbounded_part: Vec<f64>,
    pub bounded_mean: f64,
    pub unbounded_mean: f64,
}

impl TruncationSplit {
    pub fn bounded_sum(&self) -> f64 {
        self.bounded_part.iter().sum()
    }

    pub fn unbounded_sum(&self) -> f64 {
        self.unbounded_part.iter().sum()
    }
}

/// Splits each value into `g_c(x)` and `x - g_c(x)`, both centered with the
/// caller-supplied `E g_c(X_1)`. The path is assumed centered, so the
/// residual mean is `-mean_of_clipped`.
pub fn truncate_values(values: &[f64], c: f64, mean_of_clipped: f64) -> Result<TruncationSplit> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition(format!("truncation level must be positive, got {c}")));
    }
    if mean_of_clipped.abs() > c {
        return Err(Error::Precondition(format!(
            "mean of clipped variable {mean_of_clipped} lies outside [-{c}, {c}]"
        )));
    }
    let unbounded_mean = -mean_of_clipped;
    let (bounded_part, unbounded_part) = values
        .iter()
        .map(|&x| {
            let g = clip(x, c);
            (g - mean_of_clipped, (x - g) - unbounded_mean)
        })
        .unzip();
    Ok(TruncationSplit {
        level: c,
        bounded_part,
        unbounded_part,
        bounded_mean: mean_of_clipped,
        unbounded_mean,
    })
}

pub fn truncate_path(path: &SamplePath, c: f64, mean_of_clipped: f64) -> Result<TruncationSplit> {
    truncate_values(&path.values, c, mean_of_clipped)
}
