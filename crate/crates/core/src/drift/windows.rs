use serde::{Deserialize, Serialize};

use crate::numcore::{Matrix, SymmetricMatrix};
use crate::{Error, Result};

/// Statistics of one expanding (prefix) window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    /// Window number: rows for per-row windows, time groups for grouped ones.
    pub index: usize,
    /// Rows aggregated.
    pub n: usize,
    /// Mean time label of the aggregated rows.
    pub time_mean: f64,
    pub mean_vector: Vec<f64>,
    pub covariance: SymmetricMatrix,
    /// Pearson r for two-column data once n ≥ 3 and both variances are positive.
    pub correlation: Option<f64>,
    pub mi: Option<f64>,
}

/// Running mean and co-moment matrix (Welford).
struct Moments {
    n: usize,
    mean: Vec<f64>,
    comoment: Vec<f64>,
    time_mean: f64,
}

impl Moments {
    fn new(p: usize) -> Self {
        Moments { n: 0, mean: vec![0.0; p], comoment: vec![0.0; p * p], time_mean: 0.0 }
    }

    fn push(&mut self, row: &[f64], time: f64) {
        let p = self.mean.len();
        self.n += 1;
        let nf = self.n as f64;
        let delta: Vec<f64> = row.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        for (m, d) in self.mean.iter_mut().zip(&delta) {
            *m += d / nf;
        }
        for a in 0..p {
            let after = row[a] - self.mean[a];
            for b in 0..p {
                self.comoment[a * p + b] += delta[b] * after;
            }
        }
        self.time_mean += (time - self.time_mean) / nf;
    }

    fn snapshot(&self, index: usize) -> Result<WindowStats> {
        let p = self.mean.len();
        let d = (self.n - 1) as f64;
        let cov = SymmetricMatrix::from_fn(p, |a, b| 0.5 * (self.comoment[a * p + b] + self.comoment[b * p + a]) / d)?;
        let correlation = if p == 2 && self.n >= 3 {
            let (sxx, syy) = (cov.get(0, 0), cov.get(1, 1));
            (sxx > 0.0 && syy > 0.0).then(|| (cov.get(0, 1) / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
        } else {
            None
        };
        Ok(WindowStats {
            index,
            n: self.n,
            time_mean: self.time_mean,
            mean_vector: self.mean.clone(),
            covariance: cov,
            correlation,
            mi: None,
        })
    }
}

/// One window per prefix length `t = min_rows..=n`; row `i` (0-based) has
/// time label `i + 1`.
pub fn expanding_windows(data: &Matrix, min_rows: usize) -> Result<Vec<WindowStats>> {
    if min_rows < 2 {
        return Err(Error::InvalidParameter("min_rows must be >= 2".into()));
    }
    if data.rows() < min_rows {
        return Err(Error::EmptySample(format!("{} rows, need at least {min_rows}", data.rows())));
    }
    let mut m = Moments::new(data.cols());
    let mut out = Vec::with_capacity(data.rows() + 1 - min_rows);
    for i in 0..data.rows() {
        m.push(data.row(i), (i + 1) as f64);
        if i + 1 >= min_rows {
            out.push(m.snapshot(i + 1)?);
        }
    }
    Ok(out)
}

/// One window per distinct time label: window `g` aggregates every row in
/// the first `g` label groups. `times` must be nondecreasing.
pub fn expanding_windows_by_time(data: &Matrix, times: &[f64], min_groups: usize) -> Result<Vec<WindowStats>> {
    if times.len() != data.rows() {
        return Err(Error::LengthMismatch { expected: data.rows(), actual: times.len() });
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("time labels must be nondecreasing".into()));
    }
    let mut m = Moments::new(data.cols());
    let mut out = Vec::new();
    let mut group = 0;
    for i in 0..data.rows() {
        m.push(data.row(i), times[i]);
        let closes = i + 1 == data.rows() || times[i + 1] != times[i];
        if closes {
            group += 1;
            if group >= min_groups.max(1) && m.n >= 2 {
                out.push(m.snapshot(group)?);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::TooFewWindows { needed: 1, got: 0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::stats::{covariance, mean};

    fn sample() -> Matrix {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let x = (i as f64 * 0.37).sin() * 3.0 + 1.0;
                vec![x, 0.5 * x + (i as f64 * 1.3).cos(), (i % 7) as f64]
            })
            .collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn prefix_recomputation_agrees() {
        let m = sample();
        let w = expanding_windows(&m, 3).unwrap();
        assert_eq!(w.len(), 38);
        for ws in &w {
            let prefix = m.head(ws.n);
            for a in 0..3 {
                let col = prefix.column(a);
                assert!((ws.mean_vector[a] - mean(&col).unwrap()).abs() <= 1e-12);
                for b in 0..3 {
                    let c = covariance(&col, &prefix.column(b)).unwrap();
                    assert!((ws.covariance.get(a, b) - c).abs() <= 1e-12);
                }
            }
        }
        let last = w.last().unwrap();
        for (a, full) in m.column_means().iter().enumerate() {
            assert!((last.mean_vector[a] - full).abs() <= 1e-12);
        }
    }

    #[test]
    fn constant_data_has_zero_covariance() {
        let m = Matrix::from_rows(&vec![vec![2.0, -1.0]; 10]).unwrap();
        for w in expanding_windows(&m, 2).unwrap() {
            assert!(w.covariance.as_matrix().max_abs() == 0.0);
            assert!(w.correlation.is_none());
        }
        assert!(expanding_windows(&m, 11).is_err());
    }

    #[test]
    fn grouped_windows_follow_labels() {
        let m = sample();
        let times: Vec<f64> = (0..40).map(|i| (i / 10 + 1) as f64).collect();
        let w = expanding_windows_by_time(&m, &times, 1).unwrap();
        assert_eq!(w.iter().map(|x| x.n).collect::<Vec<_>>(), vec![10, 20, 30, 40]);
        assert!((w[1].time_mean - 1.5).abs() < 1e-15);
        assert!(expanding_windows_by_time(&m, &times[..39], 1).is_err());
    }
}
