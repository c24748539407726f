//! Expanding-window drift tests.
//!
//! Mean and covariance stability (`h1a`, `h1b`, Hotelling), dependence
//! shift through correlations and mutual information (`h2a`, `h2b`), the
//! synthetic panel generators used to calibrate them, and a possibilistic
//! nonspecificity series per window.
//!
//! Every test returns a [`TestResult`] whose `method` names the procedure
//! actually run.

mod dependence;
mod multivariate;
mod possibilistic;
mod simulate;
mod wilcoxon;
mod windows;

pub use dependence::{
    h2a_corr_shift, h2b_mi_shift, h2b_mi_shift_with, mi_windows, mutual_information, mutual_information_with,
    BinningMode, ContingencyTable, H2B_BINS,
};
pub use multivariate::{box_m, h1a_cov_stability, h1b_mean_trend, hotelling_t2};
pub use possibilistic::possibilistic_drift;
pub use simulate::{simulate_corr_path, simulate_decay_panel, simulate_panel, Panel};
pub use wilcoxon::{signed_rank_exact_counts, wilcoxon_signed_rank};
pub use windows::{expanding_windows, expanding_windows_by_time, WindowStats};

use serde::{Deserialize, Serialize};

use crate::numcore::dist::t_two_sided_p;
use crate::numcore::stats::descriptive;
use crate::{Error, Result};

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic: f64,
    /// One entry for t / chi-square, two for F.
    pub df: Vec<f64>,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
    /// Observations or windows that entered the statistic.
    pub n: usize,
    pub note: Option<String>,
}

impl TestResult {
    pub fn new(method: impl Into<String>, statistic: f64, df: Vec<f64>, p_value: f64, alpha: f64, n: usize) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult {
            method: method.into(),
            statistic,
            df,
            p_value,
            alpha,
            reject: p_value < alpha,
            n,
            note: None,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.reject = self.p_value < alpha;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Two-sided one-sample t test of the mean against `mu0`.
pub fn one_sample_t(xs: &[f64], mu0: f64, alpha: f64) -> Result<TestResult> {
    if xs.len() < 2 {
        return Err(Error::EmptySample(format!("t test needs n >= 2, got {}", xs.len())));
    }
    let s = descriptive(xs)?;
    let df = (xs.len() - 1) as f64;
    let diff = s.mean - mu0;
    if s.variance == 0.0 {
        if diff == 0.0 {
            return Ok(TestResult::new("one-sample t", 0.0, vec![df], 1.0, alpha, xs.len())
                .with_note("zero variance and zero mean difference"));
        }
        return Err(Error::DegenerateVariance("t test: sample has zero variance".into()));
    }
    let t = diff / (s.variance / xs.len() as f64).sqrt();
    Ok(TestResult::new("one-sample t", t, vec![df], t_two_sided_p(t, df), alpha, xs.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reject_tracks_alpha() {
        let r = TestResult::new("x", 1.0, vec![1.0], 0.03, 0.05, 10);
        assert!(r.reject);
        assert!(!r.clone().with_alpha(0.01).reject);
        assert!(!TestResult::new("x", 1.0, vec![1.0], 0.05, 0.05, 10).reject);
    }

    #[test]
    fn one_sample_t_by_hand() {
        // mean 2, sd 1, n 3 → t = (2 − 1)/(1/√3)
        let r = one_sample_t(&[1.0, 2.0, 3.0], 1.0, 0.05).unwrap();
        assert_abs_diff_eq!(r.statistic, 3f64.sqrt(), epsilon = 1e-14);
        assert_eq!(r.df, vec![2.0]);
        let zero = one_sample_t(&[0.0, 0.0], 0.0, 0.05).unwrap();
        assert_eq!(zero.p_value, 1.0);
        assert!(one_sample_t(&[1.0], 0.0, 0.05).is_err());
    }
}
