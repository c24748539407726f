use serde::{Deserialize, Serialize};

use super::special::{erfc, reg_inc_beta, reg_inc_gamma_lower, reg_inc_gamma_upper};
use crate::{Error, Result};

/// A continuous distribution with validated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum DistributionSpec {
    Normal { mean: f64, sd: f64 },
    StudentT { df: f64 },
    FisherF { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
}

impl DistributionSpec {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        let d = DistributionSpec::Normal { mean, sd };
        d.validate()?;
        Ok(d)
    }

    pub fn student_t(df: f64) -> Result<Self> {
        let d = DistributionSpec::StudentT { df };
        d.validate()?;
        Ok(d)
    }

    pub fn fisher_f(df1: f64, df2: f64) -> Result<Self> {
        let d = DistributionSpec::FisherF { df1, df2 };
        d.validate()?;
        Ok(d)
    }

    pub fn chi_square(df: f64) -> Result<Self> {
        let d = DistributionSpec::ChiSquare { df };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_df = |v: f64| v.is_finite() && v > 0.0;
        let ok = match *self {
            DistributionSpec::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            DistributionSpec::StudentT { df } => ok_df(df),
            DistributionSpec::FisherF { df1, df2 } => ok_df(df1) && ok_df(df2),
            DistributionSpec::ChiSquare { df } => ok_df(df),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{self:?}")))
        }
    }
}

/// Lower-tail probability P(X ≤ x).
pub fn cdf(spec: &DistributionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    if x.is_nan() {
        return Err(Error::NonFinite("cdf argument is NaN".into()));
    }
    Ok(match *spec {
        DistributionSpec::Normal { mean, sd } => normal_cdf((x - mean) / sd),
        DistributionSpec::StudentT { df } => t_cdf(x, df),
        DistributionSpec::FisherF { df1, df2 } => f_cdf(x, df1, df2),
        DistributionSpec::ChiSquare { df } => {
            if x <= 0.0 {
                0.0
            } else {
                reg_inc_gamma_lower(df / 2.0, x / 2.0)
            }
        }
    })
}

/// Upper-tail probability P(X > x), computed without `1 - cdf` cancellation.
pub fn sf(spec: &DistributionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    if x.is_nan() {
        return Err(Error::NonFinite("sf argument is NaN".into()));
    }
    Ok(match *spec {
        DistributionSpec::Normal { mean, sd } => normal_cdf(-(x - mean) / sd),
        DistributionSpec::StudentT { df } => t_cdf(-x, df),
        DistributionSpec::FisherF { df1, df2 } => f_sf(x, df1, df2),
        DistributionSpec::ChiSquare { df } => {
            if x <= 0.0 {
                1.0
            } else {
                reg_inc_gamma_upper(df / 2.0, x / 2.0)
            }
        }
    })
}

/// Standard normal CDF Φ(z).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
    if t > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

fn f_cdf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    reg_inc_beta(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2))
}

fn f_sf(x: f64, df1: f64, df2: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    reg_inc_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * x))
}

/// Two-sided Student-t p-value P(|T| ≥ |t|).
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Upper-tail F p-value P(F ≥ f).
pub fn f_upper_p(f: f64, df1: f64, df2: f64) -> f64 {
    f_sf(f, df1, df2)
}

/// Upper-tail chi-square p-value.
pub fn chi_square_upper_p(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        reg_inc_gamma_upper(df / 2.0, x / 2.0)
    }
}

/// Two-sided standard-normal p-value.
pub fn normal_two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn t_at_zero_is_half() {
        for df in [0.5, 1.0, 3.0, 30.0, 1195.0] {
            assert_eq!(cdf(&DistributionSpec::StudentT { df }, 0.0).unwrap(), 0.5);
        }
    }

    #[test]
    fn cauchy_closed_form() {
        let d = DistributionSpec::student_t(1.0).unwrap();
        assert_abs_diff_eq!(cdf(&d, 1.0).unwrap(), 0.75, epsilon = 1e-14);
        for &x in &[-7.0f64, -0.3, 0.9, 12.0] {
            let exact = 0.5 + x.atan() / std::f64::consts::PI;
            assert_abs_diff_eq!(cdf(&d, x).unwrap(), exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn regression_table_p_value() {
        // the printed t is itself rounded to 3 decimals, which moves p by ~1e-6
        let p = t_two_sided_p(-3.438, 1195.0);
        assert!((p - 0.000607).abs() < 2e-6, "p = {p}");
    }

    #[test]
    fn t_and_f_agree() {
        for &t in &[0.1, 1.0, 2.2, 3.438, 9.0] {
            for &df in &[1.0, 4.0, 27.0, 1195.0] {
                let a = t_two_sided_p(t, df);
                let b = f_upper_p(t * t, 1.0, df);
                assert!((a - b).abs() <= 1e-12, "t={t} df={df}");
            }
        }
    }

    #[test]
    fn chi_square_two_df_is_exponential() {
        let d = DistributionSpec::chi_square(2.0).unwrap();
        for &x in &[0.5, 2.0, 9.0] {
            assert_abs_diff_eq!(cdf(&d, x).unwrap(), 1.0 - (-x / 2.0f64).exp(), epsilon = 1e-14);
        }
    }

    #[test]
    fn normal_reference() {
        assert_abs_diff_eq!(normal_cdf(1.959_963_984_540_054), 0.975, epsilon = 1e-13);
        assert_abs_diff_eq!(normal_cdf(-1.0), 0.158_655_253_931_457_05, epsilon = 1e-14);
    }

    #[test]
    fn invalid_parameters() {
        assert!(DistributionSpec::student_t(0.0).is_err());
        assert!(DistributionSpec::normal(0.0, -1.0).is_err());
        assert!(cdf(&DistributionSpec::FisherF { df1: 1.0, df2: f64::NAN }, 1.0).is_err());
    }
}
