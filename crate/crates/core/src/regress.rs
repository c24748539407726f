//! Ordinary least squares with coefficient inference, residual diagnostics
//! and the time-trend experiment driver.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::drift::{one_sample_t, TestResult};
use crate::numcore::dist::{f_upper_p, t_two_sided_p};
use crate::numcore::linalg::{inverse_spd, solve_spd};
use crate::numcore::stats::quantiles;
use crate::numcore::SymmetricMatrix;
use crate::{Error, Result};

/// Relative pivot below which a term counts as collinear.
const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub response: String,
    /// Intercept first when present, then terms in input order.
    pub coefficients: Vec<Coefficient>,
    /// Min, first quartile, median, third quartile, max.
    pub residual_quantiles: [f64; 5],
    pub residual_se: f64,
    pub n: usize,
    pub df_residual: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub f_df: (f64, f64),
    pub f_p_value: f64,
    pub intercept: bool,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
}

impl RegressionSummary {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Text block laid out like R's `summary.lm`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let terms: Vec<&str> = self.coefficients.iter().filter(|c| c.name != INTERCEPT).map(|c| c.name.as_str()).collect();
        let rhs = if terms.is_empty() { "1".to_string() } else { terms.join(" + ") };
        let _ = writeln!(s, "Call:\nlm(formula = {} ~ {})\n", self.response, rhs);
        let _ = writeln!(s, "Residuals:");
        let _ = writeln!(s, "{:>10} {:>10} {:>10} {:>10} {:>10}", "Min", "1Q", "Median", "3Q", "Max");
        let q: Vec<String> = self.residual_quantiles.iter().map(|v| format!("{:>10}", signif(*v, 5))).collect();
        let _ = writeln!(s, "{}\n", q.join(" "));
        let _ = writeln!(s, "Coefficients:");
        let w = self.coefficients.iter().map(|c| c.name.len()).max().unwrap_or(0).max(11);
        let _ = writeln!(s, "{:<w$} {:>12} {:>12} {:>8} {:>10}", "", "Estimate", "Std. Error", "t value", "Pr(>|t|)");
        for c in &self.coefficients {
            let _ = writeln!(
                s,
                "{:<w$} {:>12} {:>12} {:>8} {:>10} {}",
                c.name,
                signif(c.estimate, 7),
                signif(c.std_error, 5),
                format!("{:.3}", c.t_value),
                format_p(c.p_value),
                significance_stars(c.p_value)
            );
        }
        let _ = writeln!(s, "---\nSignif. codes:  0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1\n");
        let _ = writeln!(
            s,
            "Residual standard error: {} on {} degrees of freedom",
            signif(self.residual_se, 4),
            self.df_residual
        );
        let _ = writeln!(
            s,
            "Multiple R-squared:  {},\tAdjusted R-squared:  {}",
            signif(self.r_squared, 4),
            signif(self.adj_r_squared, 4)
        );
        let _ = writeln!(
            s,
            "F-statistic: {} on {} and {} DF,  p-value: {}",
            signif(self.f_statistic, 4),
            self.f_df.0,
            self.f_df.1,
            format_p(self.f_p_value)
        );
        s
    }
}

pub const INTERCEPT: &str = "(Intercept)";

/// R's significance legend.
pub fn significance_stars(p: f64) -> &'static str {
    match p {
        p if p < 0.001 => "***",
        p if p < 0.01 => "**",
        p if p < 0.05 => "*",
        p if p < 0.1 => ".",
        _ => "",
    }
}

fn signif(x: f64, digits: i32) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=15).contains(&mag) {
        return format!("{:.*e}", (digits - 1) as usize, x);
    }
    format!("{:.*}", (digits - 1 - mag).max(0) as usize, x)
}

fn format_p(p: f64) -> String {
    if p < 2.2e-16 {
        "< 2.2e-16".into()
    } else if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        signif(p, 3)
    }
}

/// First term whose Gram pivot (after unit-diagonal scaling) collapses.
fn collinear_term(gram: &[Vec<f64>]) -> Option<usize> {
    let k = gram.len();
    let mut l = vec![vec![0.0; k]; k];
    for j in 0..k {
        if !(gram[j][j] > 0.0) {
            return Some(j);
        }
        let scaled = |a: usize, b: usize| gram[a][b] / (gram[a][a] * gram[b][b]).sqrt();
        let mut d = 1.0;
        for m in 0..j {
            d -= l[j][m] * l[j][m];
        }
        if d <= PIVOT_TOL {
            return Some(j);
        }
        let d = d.sqrt();
        l[j][j] = d;
        for i in (j + 1)..k {
            if !(gram[i][i] > 0.0) {
                continue;
            }
            let mut s = scaled(i, j);
            for m in 0..j {
                s -= l[i][m] * l[j][m];
            }
            l[i][j] = s / d;
        }
    }
    None
}

/// Least-squares fit of `y` on the named `terms`.
///
/// With an intercept the regressors and response are centered, the slopes
/// come from a Cholesky solve of the centered Gram matrix and the intercept
/// is recovered as `ȳ − x̄ᵀβ`. Day-count regressors make the raw Gram matrix
/// too ill-conditioned to solve directly.
pub fn ols_fit(response: &str, y: &[f64], terms: &[(String, Vec<f64>)], intercept: bool) -> Result<RegressionSummary> {
    let n = y.len();
    let k = terms.len();
    if k == 0 {
        return Err(Error::InvalidParameter("at least one regressor is required".into()));
    }
    for (name, x) in terms {
        if x.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("regressor `{name}`")));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("response `{response}`")));
    }
    let p = k + intercept as usize;
    if n <= p {
        return Err(Error::EmptySample(format!("{n} rows cannot fit {p} coefficients")));
    }
    let nf = n as f64;
    let center = |v: &[f64]| if intercept { v.iter().sum::<f64>() / nf } else { 0.0 };
    let x_means: Vec<f64> = terms.iter().map(|(_, x)| center(x)).collect();
    let y_mean = center(y);
    let xc: Vec<Vec<f64>> = terms.iter().zip(&x_means).map(|((_, x), m)| x.iter().map(|v| v - m).collect()).collect();
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let gram: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dot(&xc[i], &xc[j])).collect()).collect();
    if let Some(j) = collinear_term(&gram) {
        return Err(Error::RankDeficient(terms[j].0.clone()));
    }
    let g = SymmetricMatrix::from_rows(&gram)?;
    let xty: Vec<f64> = xc.iter().map(|x| dot(x, &yc)).collect();
    let beta = solve_spd(&g, &xty)?;
    let g_inv = inverse_spd(&g)?;
    let b0 = y_mean - dot(&x_means, &beta);

    let fitted: Vec<f64> = (0..n)
        .map(|i| b0 + terms.iter().zip(&beta).map(|((_, x), b)| x[i] * b).sum::<f64>())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss = dot(&residuals, &residuals);
    let df_residual = n - p;
    let sigma2 = rss / df_residual as f64;
    let tss = dot(&yc, &yc);

    let mut coefficients = Vec::with_capacity(p);
    let mut push = |name: &str, estimate: f64, var: f64| {
        let std_error = var.max(0.0).sqrt();
        let t_value = estimate / std_error;
        coefficients.push(Coefficient {
            name: name.to_string(),
            estimate,
            std_error,
            t_value,
            p_value: t_two_sided_p(t_value, df_residual as f64),
        });
    };
    if intercept {
        let quad: f64 = (0..k).map(|i| (0..k).map(|j| x_means[i] * g_inv.get(i, j) * x_means[j]).sum::<f64>()).sum();
        push(INTERCEPT, b0, sigma2 * (1.0 / nf + quad));
    }
    for (j, (name, _)) in terms.iter().enumerate() {
        push(name, beta[j], sigma2 * g_inv.get(j, j));
    }

    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 0.0 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - intercept as usize) as f64 / df_residual as f64;
    let f_statistic = ((tss - rss) / k as f64) / sigma2;
    let f_df = (k as f64, df_residual as f64);
    let q = quantiles(&residuals, &[0.0, 0.25, 0.5, 0.75, 1.0])?;
    Ok(RegressionSummary {
        response: response.to_string(),
        coefficients,
        residual_quantiles: [q[0], q[1], q[2], q[3], q[4]],
        residual_se: sigma2.sqrt(),
        n,
        df_residual,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_df,
        f_p_value: f_upper_p(f_statistic, f_df.0, f_df.1),
        intercept,
        residuals,
        fitted,
    })
}

/// One-sample t test of the residual mean against zero. Any fit with an
/// intercept has residuals summing to zero, so it returns `t ≈ 0`, `p ≈ 1`.
pub fn residual_mean_test(residuals: &[f64], alpha: f64) -> Result<TestResult> {
    if residuals.is_empty() {
        return Err(Error::EmptySample("no residuals".into()));
    }
    let mut r = one_sample_t(residuals, 0.0, alpha)?;
    r.method = "residual mean t test".into();
    Ok(r)
}

/// `Σ(e_t − e_{t−1})² / Σ e_t²`, in `[0, 4]`.
pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 3 {
        return Err(Error::EmptySample(format!("durbin-watson needs n >= 3, got {}", residuals.len())));
    }
    let ss: f64 = residuals.iter().map(|e| e * e).sum();
    if ss == 0.0 {
        return Err(Error::DegenerateVariance("all residuals are zero".into()));
    }
    let num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok(num / ss)
}

/// Row index time `1..=n`.
pub fn row_index(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

/// The covariate-over-time experiment: a t test of the covariate itself,
/// its regression on a time variable, the residual mean test and the
/// Durbin–Watson statistic of that regression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeExperiment {
    pub covariate_test: TestResult,
    pub regression: RegressionSummary,
    pub residual_test: TestResult,
    pub durbin_watson: f64,
}

pub fn time_experiment(response: &str, y: &[f64], time_name: &str, time: &[f64], alpha: f64) -> Result<TimeExperiment> {
    let mut covariate_test = one_sample_t(y, 0.0, alpha)?;
    covariate_test.method = format!("one-sample t test of {response}");
    let regression = ols_fit(response, y, &[(time_name.to_string(), time.to_vec())], true)?;
    let residual_test = residual_mean_test(&regression.residuals, alpha)?;
    let durbin_watson = durbin_watson(&regression.residuals)?;
    Ok(TimeExperiment { covariate_test, regression, residual_test, durbin_watson })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::{RandomSeed, SeededRng};
    use approx::assert_abs_diff_eq;

    fn one(name: &str, x: &[f64]) -> Vec<(String, Vec<f64>)> {
        vec![(name.to_string(), x.to_vec())]
    }

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        let s = ols_fit("y", &y, &one("x", &x), true).unwrap();
        assert_abs_diff_eq!(s.coefficient("x").unwrap().estimate, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.r_squared, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_regressor() {
        let x = [-1.0, 0.0, 1.0, -1.0, 0.0, 1.0];
        let y = [1.0, -2.0, 1.0, 3.0, 0.0, 3.0];
        let s = ols_fit("y", &y, &one("x", &x), true).unwrap();
        assert_abs_diff_eq!(s.coefficient("x").unwrap().estimate, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hand_evaluated_fit() {
        // x̄ = 3, Sxx = 10, Sxy = 6, RSS = 2.4, σ² = 0.8
        // residuals -0.8, 0.6, 1.0, -0.6, -0.2
        let s = ols_fit("y", &[2.0, 4.0, 5.0, 4.0, 5.0], &one("x", &[1.0, 2.0, 3.0, 4.0, 5.0]), true).unwrap();
        let b0 = &s.coefficients[0];
        let b1 = &s.coefficients[1];
        assert_abs_diff_eq!(b1.estimate, 0.6, epsilon = 1e-13);
        assert_abs_diff_eq!(b0.estimate, 2.2, epsilon = 1e-13);
        assert_abs_diff_eq!(b1.std_error, 0.08f64.sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(b0.std_error, 0.88f64.sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(s.r_squared, 0.6, epsilon = 1e-13);
        assert_abs_diff_eq!(s.f_statistic, 4.5, epsilon = 1e-12);
        assert_eq!(s.df_residual, 3);
        assert_abs_diff_eq!(s.residual_quantiles[0], -0.8, epsilon = 1e-13);
        assert_abs_diff_eq!(s.residual_quantiles[4], 1.0, epsilon = 1e-13);
    }

    #[test]
    fn collinear_terms_are_named() {
        let x1 = [1.0, 2.0, 3.0, 4.0, 5.0, 7.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v + 1.0).collect();
        let y = [1.0, 3.0, 2.0, 5.0, 4.0, 6.0];
        let terms = vec![("x1".to_string(), x1.to_vec()), ("x2".to_string(), x2)];
        assert_eq!(ols_fit("y", &y, &terms, true).unwrap_err(), Error::RankDeficient("x2".into()));
        let flat = one("c", &[3.0; 6]);
        assert_eq!(ols_fit("y", &y, &flat, true).unwrap_err(), Error::RankDeficient("c".into()));
        assert!(ols_fit("y", &y[..2], &one("x", &x1[..2]), true).is_err());
    }

    #[test]
    fn residual_mean_test_contract() {
        let mut rng = SeededRng::new(RandomSeed(3));
        let x: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.1 * v + rng.standard_normal()).collect();
        let s = ols_fit("y", &y, &one("x", &x), true).unwrap();
        let r = residual_mean_test(&s.residuals, 0.05).unwrap();
        assert!(r.statistic.abs() < 1e-8);
        assert!(r.p_value > 1.0 - 1e-8);
        let shifted: Vec<f64> = s.residuals.iter().map(|e| e + 1.0).collect();
        assert!(residual_mean_test(&shifted, 0.05).unwrap().reject);
        assert!(residual_mean_test(&[], 0.05).is_err());
    }

    #[test]
    fn durbin_watson_cases() {
        let n = 50;
        let alt: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_abs_diff_eq!(durbin_watson(&alt).unwrap(), 4.0 * (n - 1) as f64 / n as f64, epsilon = 1e-12);
        let mut rng = SeededRng::new(RandomSeed(8));
        let iid: Vec<f64> = (0..10_000).map(|_| rng.standard_normal()).collect();
        assert!((durbin_watson(&iid).unwrap() - 2.0).abs() < 0.1);
        let slow: Vec<f64> = (0..100).map(|i| 1.0 + (i as f64 / 30.0).sin().abs()).collect();
        assert!(durbin_watson(&slow).unwrap() < 2.0);
        assert!(durbin_watson(&[0.0; 5]).is_err());
        assert!(durbin_watson(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn day_count_regressor_stays_accurate() {
        // dates around 2015 as day counts; the exact line must come back
        let x: Vec<f64> = (0..1000).map(|i| 16436.0 + (i % 59) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 8.4633477 - 0.0004696 * v).collect();
        let s = ols_fit("y", &y, &one("date", &x), true).unwrap();
        assert_abs_diff_eq!(s.coefficients[1].estimate, -0.0004696, epsilon = 1e-13);
        assert_abs_diff_eq!(s.coefficients[0].estimate, 8.4633477, epsilon = 1e-9);
    }

    #[test]
    fn text_report_has_summary_lines() {
        let s = ols_fit("y", &[2.0, 4.0, 5.0, 4.0, 5.0], &one("x", &[1.0, 2.0, 3.0, 4.0, 5.0]), true).unwrap();
        let t = s.to_text();
        assert!(t.contains("Residual standard error: 0.8944 on 3 degrees of freedom"));
        assert!(t.contains("F-statistic: 4.500 on 1 and 3 DF"));
        assert!(t.contains("Signif. codes"));
        assert_eq!(significance_stars(0.0006), "***");
        assert_eq!(significance_stars(0.07), ".");
    }

    #[test]
    fn time_experiment_runs() {
        let y: Vec<f64> = (0..40).map(|i| 0.7 + 0.01 * ((i * 13) % 7) as f64).collect();
        let e = time_experiment("y", &y, "t", &row_index(40), 0.05).unwrap();
        assert!(e.covariate_test.reject);
        assert!(e.residual_test.p_value > 0.999);
        assert!((0.0..=4.0).contains(&e.durbin_watson));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// Direct solve of the raw normal equations by Gaussian elimination
        /// with partial pivoting.
        fn normal_equations(y: &[f64], cols: &[Vec<f64>]) -> Vec<f64> {
            let p = cols.len();
            let mut a: Vec<Vec<f64>> = (0..p)
                .map(|i| {
                    let mut row: Vec<f64> = (0..p).map(|j| cols[i].iter().zip(&cols[j]).map(|(u, v)| u * v).sum()).collect();
                    row.push(cols[i].iter().zip(y).map(|(u, v)| u * v).sum());
                    row
                })
                .collect();
            for c in 0..p {
                let piv = (c..p).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
                a.swap(c, piv);
                for r in (c + 1)..p {
                    let f = a[r][c] / a[c][c];
                    for k in c..=p {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
            let mut b = vec![0.0; p];
            for r in (0..p).rev() {
                let s: f64 = ((r + 1)..p).map(|k| a[r][k] * b[k]).sum();
                b[r] = (a[r][p] - s) / a[r][r];
            }
            b
        }

        fn fixture(seed: u64, n: usize, k: usize) -> (Vec<f64>, Vec<(String, Vec<f64>)>) {
            let mut rng = SeededRng::new(RandomSeed(seed));
            let terms: Vec<(String, Vec<f64>)> =
                (0..k).map(|j| (format!("x{j}"), (0..n).map(|_| rng.standard_normal()).collect())).collect();
            let y = (0..n)
                .map(|i| 1.0 + terms.iter().enumerate().map(|(j, (_, x))| (j as f64 - 1.0) * x[i]).sum::<f64>() + rng.standard_normal())
                .collect();
            (y, terms)
        }

        #[test]
        fn matches_normal_equations_on_20_fixtures() {
            for seed in 0..20 {
                let (y, terms) = fixture(seed, 30 + seed as usize, 1 + (seed % 4) as usize);
                let s = ols_fit("y", &y, &terms, true).unwrap();
                let mut cols = vec![vec![1.0; y.len()]];
                cols.extend(terms.iter().map(|(_, x)| x.clone()));
                let direct = normal_equations(&y, &cols);
                for (c, d) in s.coefficients.iter().zip(&direct) {
                    assert!((c.estimate - d).abs() <= 1e-9 * d.abs().max(1e-300) || (c.estimate - d).abs() < 1e-12);
                }
            }
        }

        proptest! {
            #[test]
            fn fit_invariants(seed in 0u64..10_000, n in 8usize..60, k in 1usize..4) {
                let (y, terms) = fixture(seed, n, k);
                let s = ols_fit("y", &y, &terms, true).unwrap();
                let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                let mut cols = vec![vec![1.0; n]];
                cols.extend(terms.iter().map(|(_, x)| x.clone()));
                for c in &cols {
                    let g: f64 = c.iter().zip(&s.residuals).map(|(u, v)| u * v).sum();
                    prop_assert!(g.abs() <= 1e-8 * ynorm);
                }
                prop_assert_eq!(s.df_residual, n - k - 1);
                prop_assert!((0.0..=1.0).contains(&s.r_squared));
                let adj = 1.0 - (1.0 - s.r_squared) * (n as f64 - 1.0) / (n as f64 - k as f64 - 1.0);
                prop_assert!((s.adj_r_squared - adj).abs() < 1e-14);
                if k >= 2 {
                    prop_assert!(s.adj_r_squared <= s.r_squared);
                }
                if k == 1 {
                    let t = s.coefficients[1].t_value;
                    prop_assert!((t * t - s.f_statistic).abs() <= 1e-10 * s.f_statistic.max(1.0));
                }
            }
        }
    }
}
