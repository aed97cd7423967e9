//! Piecewise-linear test functions with exact Lipschitz norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continuous piecewise-linear `φ` on the real line.
///
/// `slopes[k]` applies between `breakpoints[k-1]` and `breakpoints[k]`, so
/// there is one more slope than breakpoints; `offset` is `φ(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    pub breakpoints: Vec<f64>,
    pub slopes: Vec<f64>,
    pub offset: f64,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, offset: f64) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::Precondition(format!(
                "need {} slopes for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                slopes.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("breakpoints must be strictly increasing".into()));
        }
        if breakpoints.iter().chain(&slopes).any(|v| !v.is_finite()) || !offset.is_finite() {
            return Err(Error::Precondition("piecewise-linear data must be finite".into()));
        }
        Ok(PiecewiseLinear {
            breakpoints,
            slopes,
            offset,
        })
    }

    pub fn identity() -> Self {
        PiecewiseLinear {
            breakpoints: Vec::new(),
            slopes: vec![1.0],
            offset: 0.0,
        }
    }

    /// `max(min(x, c), -c)`.
    pub fn clip(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Precondition(format!("clip level must be positive, got {c}")));
        }
        PiecewiseLinear::new(vec![-c, c], vec![0.0, 1.0, 0.0], 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut y = self.offset + self.slopes[0] * x;
        for (k, b) in self.breakpoints.iter().enumerate() {
            y += (self.slopes[k + 1] - self.slopes[k]) * ((x - b).max(0.0) - (-b).max(0.0));
        }
        y
    }

    /// Exact Lipschitz constant: the largest absolute slope.
    pub fn lipschitz_norm(&self) -> f64 {
        self.slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()))
    }
}

/// `x ↦ φ(Σ w_i x_i)` on a block of coordinates.
///
/// With distances measured by `Σ|x_i - y_i|` its Lipschitz norm is
/// `‖φ‖ · max |w_i|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzFunctional {
    pub profile: PiecewiseLinear,
    pub weights: Vec<f64>,
}

impl LipschitzFunctional {
    pub fn new(profile: PiecewiseLinear, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Precondition("weights must be finite and nonempty".into()));
        }
        Ok(LipschitzFunctional { profile, weights })
    }

    pub fn eval(&self, xs: &[f64]) -> f64 {
        debug_assert_eq!(xs.len(), self.weights.len());
        self.profile.eval(xs.iter().zip(&self.weights).map(|(x, w)| x * w).sum())
    }

    pub fn lipschitz_norm(&self) -> f64 {
        self.profile.lipschitz_norm() * self.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()))
    }
}
