//! t and F CDFs against the quadrature oracle.

use driftlab::numcore::{cdf, DistributionSpec};

#[path = "support/beta_oracle.rs"]
mod beta_oracle;

use beta_oracle::{f_oracle, ln_gamma, t_oracle};

#[test]
fn oracle_log_gamma_sanity() {
    assert!((ln_gamma(1.0)).abs() < 1e-13);
    assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
    assert!((ln_gamma(10.0) - 362880f64.ln()).abs() < 1e-12);
}

#[test]
fn t_and_f_cdfs_match_oracle_on_1000_points() {
    let t_dfs = [1.0, 2.0, 3.0, 4.5, 7.0, 12.0, 30.0, 100.0, 1195.0, 0.7];
    let f_dfs = [(1.0, 1.0), (1.0, 1195.0), (2.0, 5.0), (3.0, 17.0), (4.0, 4.0), (5.0, 2.0), (10.0, 40.0), (0.8, 3.0), (7.5, 60.0), (20.0, 20.0)];
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for &nu in &t_dfs {
        let spec = DistributionSpec::student_t(nu).unwrap();
        for i in 0..50 {
            let t = -6.0 + 12.0 * i as f64 / 49.0;
            let d = (cdf(&spec, t).unwrap() - t_oracle(t, nu)).abs();
            assert!(d.is_finite(), "t({nu}) at {t}");
            worst = worst.max(d);
            points += 1;
        }
    }
    for &(d1, d2) in &f_dfs {
        let spec = DistributionSpec::fisher_f(d1, d2).unwrap();
        for i in 0..50 {
            let f = 0.02 + 12.0 * (i as f64 / 49.0).powi(2);
            let d = (cdf(&spec, f).unwrap() - f_oracle(f, d1, d2)).abs();
            assert!(d.is_finite(), "F({d1}, {d2}) at {f}");
            worst = worst.max(d);
            points += 1;
        }
    }
    assert_eq!(points, 1000);
    println!("worst absolute difference {worst:e}");
    assert!(worst <= 1e-10, "worst absolute difference {worst:e}");
}
