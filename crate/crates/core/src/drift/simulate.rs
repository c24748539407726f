use serde::{Deserialize, Serialize};

use crate::numcore::rng::mvn_sample_with;
use crate::numcore::{Matrix, RandomSeed, SeededRng, SymmetricMatrix};
use crate::{Error, Result};

/// Observations stacked time-major: rows `0..n_obs` belong to time 1, the
/// next `n_obs` to time 2, and so on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub time: Vec<f64>,
    pub data: Matrix,
}

impl Panel {
    pub fn n_times(&self) -> usize {
        let mut t = self.time.clone();
        t.dedup();
        t.len()
    }
}

/// Univariate normal panel with the given per-time means and variances.
pub fn simulate_panel(means: &[f64], variances: &[f64], n_obs: usize, seed: RandomSeed) -> Result<Panel> {
    if means.len() != variances.len() {
        return Err(Error::LengthMismatch { expected: means.len(), actual: variances.len() });
    }
    let mut rng = SeededRng::new(seed);
    let mut rows = Vec::with_capacity(means.len() * n_obs);
    let mut time = Vec::with_capacity(means.len() * n_obs);
    for (t, (&m, &v)) in means.iter().zip(variances).enumerate() {
        let cov = SymmetricMatrix::diagonal(&[v])?;
        let draws = mvn_sample_with(&mut rng, &[m], &cov, n_obs)?;
        for i in 0..n_obs {
            rows.push(draws.row(i).to_vec());
            time.push((t + 1) as f64);
        }
    }
    let data = if rows.is_empty() { Matrix::zeros(0, 1) } else { Matrix::from_rows(&rows)? };
    Ok(Panel { time, data })
}

/// Exponential-decay panel: at time `t = 1..=n_times` the mean and the
/// variance are both `e^{−t}`.
pub fn simulate_decay_panel(n_times: usize, n_obs: usize, seed: RandomSeed) -> Result<Panel> {
    if n_times < 2 {
        return Err(Error::InvalidParameter("n_times must be >= 2".into()));
    }
    let mu: Vec<f64> = (1..=n_times).map(|t| (-(t as f64)).exp()).collect();
    simulate_panel(&mu, &mu, n_obs, seed)
}

/// Bivariate standard-normal series; row `t` has correlation `rhos[t]`.
pub fn simulate_corr_path(rhos: &[f64], seed: RandomSeed) -> Result<Matrix> {
    if let Some(r) = rhos.iter().find(|r| !(r.abs() < 1.0)) {
        return Err(Error::InvalidParameter(format!("correlation {r} must satisfy |rho| < 1")));
    }
    let mut rng = SeededRng::new(seed);
    let mut data = Matrix::zeros(rhos.len(), 2);
    for (t, &rho) in rhos.iter().enumerate() {
        let z1 = rng.standard_normal();
        let z2 = rng.standard_normal();
        data[(t, 0)] = z1;
        data[(t, 1)] = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
    }
    Ok(data)
}
