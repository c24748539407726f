use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Summary moments of a sample. Variance uses the unbiased `n − 1` divisor
/// (zero for a single observation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleStats {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptySample("mean of an empty sequence".into()));
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Mean, unbiased variance and range of `xs`.
pub fn descriptive(xs: &[f64]) -> Result<SampleStats> {
    let m = mean(xs)?;
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("sample contains a non-finite value".into()));
    }
    let n = xs.len();
    // two-pass with compensation term for the residual mean error
    let (ss, comp) = xs.iter().fold((0.0, 0.0), |(ss, c), &x| {
        let d = x - m;
        (ss + d * d, c + d)
    });
    let variance = if n > 1 {
        ((ss - comp * comp / n as f64) / (n - 1) as f64).max(0.0)
    } else {
        0.0
    };
    let (min, max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    // the rounded mean of a constant sample can drift one ulp outside [min, max]
    let mean = m.clamp(min, max);
    Ok(SampleStats { n, mean, variance, min, max })
}

/// Unbiased sample covariance.
pub fn covariance(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), actual: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::EmptySample(format!("covariance needs n >= 2, got {}", xs.len())));
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let s: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(s / (xs.len() - 1) as f64)
}

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), actual: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::EmptySample(format!("pearson needs n >= 3, got {}", xs.len())));
    }
    let mx = mean(xs)?;
    let my = mean(ys)?;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateVariance("pearson: a sample has zero variance".into()));
    }
    let r = sxy / (sxx.sqrt() * syy.sqrt());
    if r.abs() > 1.0 + 1e-12 {
        return Err(Error::NonFinite(format!("pearson: |r| = {} exceeds 1", r.abs())));
    }
    Ok(r.clamp(-1.0, 1.0))
}

/// Sample quantiles with the continuous type-7 rule: `h = (n − 1)p`,
/// linear interpolation between the order statistics around `h`.
pub fn quantiles(xs: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if xs.is_empty() {
        return Err(Error::EmptySample("quantiles of an empty sequence".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("quantiles: NaN in sample".into()));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(probs.iter().map(|&p| quantile_sorted(&sorted, p)).collect())
}

pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn descriptive_examples() {
        let s = descriptive(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.variance), (1.0, 0.0));
        let s = descriptive(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.variance, s.min, s.max), (2.0, 1.0, 1.0, 3.0));
        assert!(matches!(descriptive(&[]), Err(Error::EmptySample(_))));
        assert!(descriptive(&[]).unwrap_err().to_string().starts_with("empty-sample"));
    }

    #[test]
    fn covariance_examples() {
        assert_abs_diff_eq!(covariance(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(covariance(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap(), 0.0);
        assert!(covariance(&[1.0], &[1.0]).is_err());
        assert!(covariance(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn pearson_examples() {
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(), 0.8, epsilon = 1e-15);
        let e = pearson(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]).unwrap_err();
        assert!(e.to_string().starts_with("degenerate-variance"));
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(quantiles(&[3.0, 1.0, 2.0], &[0.5]).unwrap(), vec![2.0]);
        assert_eq!(quantiles(&[4.0, 1.0, 3.0, 2.0], &[0.0, 0.5, 1.0]).unwrap(), vec![1.0, 2.5, 4.0]);
        assert!(quantiles(&[1.0], &[1.5]).is_err());
        assert!(quantiles(&[], &[0.5]).is_err());
    }

    proptest! {
        #[test]
        fn negation_flips_mean_keeps_variance(xs in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let a = descriptive(&xs).unwrap();
            let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
            let b = descriptive(&neg).unwrap();
            prop_assert!((a.mean + b.mean).abs() <= 1e-9);
            prop_assert!((a.variance - b.variance).abs() <= 1e-9 * (1.0 + a.variance));
            prop_assert!(a.min <= a.mean && a.mean <= a.max);
        }

        #[test]
        fn cov_with_self_is_variance(xs in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let v = descriptive(&xs).unwrap().variance;
            let c = covariance(&xs, &xs).unwrap();
            prop_assert!((v - c).abs() <= 1e-9 * (1.0 + v));
        }
    }
}
