//! Seeded Monte Carlo checks of the inequalities and limit theorems.
//!
//! Each check produces [`VerificationReport`] rows. A row compares an
//! empirical estimate with a bound and is `VIOLATED` only when the estimate
//! exceeds a valid bound by more than `error_multiplier` standard errors.

mod empirical;
mod functional;
mod inequalities;
mod limits;
mod report;

pub use empirical::{empirical_process_path, estimate_gamma_operator, EmpiricalProcessPath, MarginalTransform};
pub use functional::{LipschitzFunctional, PiecewiseLinear};
pub use inequalities::{
    check_lipschitz_cov, check_newman, check_quasi_association_counterexample, check_tail_domination,
    QuasiAssociationReport, QuasiRow,
};
pub use limits::{
    bias_allowance, clt_ks_distance, fclt_increment_check, partial_sum_quantiles, slln_rate_fit, CltResult,
    PartialSumPath, SllnFit, KS_CRITICAL_005,
};
pub use report::{parse_csv, parse_json, reports_to_csv, reports_to_json, CSV_HEADER};

use serde::Serialize;

use crate::error::{Error, Result};

/// Replicate count, master seed and standard-error slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCConfig {
    pub replicates: usize,
    pub seed: u64,
    pub error_multiplier: f64,
}

impl MCConfig {
    pub const MIN_REPLICATES: usize = 100;

    pub fn new(replicates: usize, seed: u64) -> Result<Self> {
        Self::with_error_multiplier(replicates, seed, 3.0)
    }

    pub fn with_error_multiplier(replicates: usize, seed: u64, error_multiplier: f64) -> Result<Self> {
        if replicates < Self::MIN_REPLICATES {
            return Err(Error::Precondition(format!(
                "replicates must be at least {}, got {replicates}",
                Self::MIN_REPLICATES
            )));
        }
        if !(error_multiplier >= 0.0 && error_multiplier.is_finite()) {
            return Err(Error::Precondition(format!(
                "error multiplier must be finite and nonnegative, got {error_multiplier}"
            )));
        }
        Ok(MCConfig {
            replicates,
            seed,
            error_multiplier,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "DOMINATED")]
    Dominated,
    #[serde(rename = "VIOLATED")]
    Violated,
    #[serde(rename = "BOUND_INVALID")]
    BoundInvalid,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Dominated => "DOMINATED",
            Verdict::Violated => "VIOLATED",
            Verdict::BoundInvalid => "BOUND_INVALID",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "DOMINATED" => Ok(Verdict::Dominated),
            "VIOLATED" => Ok(Verdict::Violated),
            "BOUND_INVALID" => Ok(Verdict::BoundInvalid),
            other => Err(Error::Report(format!("unknown verdict {other:?}"))),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One estimate-versus-bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    /// `key=value` pairs separated by `;`.
    pub param: String,
    pub estimate: f64,
    pub se: f64,
    pub bound: f64,
    pub valid: bool,
    pub verdict: Verdict,
    pub seed: u64,
    pub replicates: usize,
}

impl VerificationReport {
    /// Builds a row and assigns its verdict.
    #[allow(clippy::too_many_arguments)]
    pub fn judge(
        check: &str,
        param: String,
        estimate: f64,
        se: f64,
        bound: f64,
        valid: bool,
        cfg: &MCConfig,
    ) -> Self {
        let verdict = if !valid {
            Verdict::BoundInvalid
        } else if estimate - cfg.error_multiplier * se > bound {
            Verdict::Violated
        } else {
            Verdict::Dominated
        };
        VerificationReport {
            check: check.to_string(),
            param,
            estimate,
            se,
            bound,
            valid,
            verdict,
            seed: cfg.seed,
            replicates: cfg.replicates,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rule() {
        let cfg = MCConfig::new(100, 1).unwrap();
        let r = |e, se, b, v| VerificationReport::judge("x", String::new(), e, se, b, v, &cfg).verdict;
        assert_eq!(r(1.0, 0.0, 1.0, true), Verdict::Dominated);
        assert_eq!(r(1.3, 0.1, 1.0, true), Verdict::Dominated);
        assert_eq!(r(1.31, 0.1, 1.0, true), Verdict::Violated);
        assert_eq!(r(5.0, 0.0, 1.0, false), Verdict::BoundInvalid);
    }

    #[test]
    fn config_requires_enough_replicates() {
        assert!(MCConfig::new(99, 0).is_err());
        assert_eq!(MCConfig::new(100, 0).unwrap().error_multiplier, 3.0);
        assert!(MCConfig::with_error_multiplier(100, 0, -1.0).is_err());
    }

    #[test]
    fn verdict_strings_round_trip() {
        for v in [Verdict::Dominated, Verdict::Violated, Verdict::BoundInvalid] {
            assert_eq!(Verdict::parse(v.as_str()).unwrap(), v);
        }
        assert!(Verdict::parse("dominated").is_err());
    }
}
