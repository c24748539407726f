use serde::{Deserialize, Serialize};

use super::windows::expanding_windows;
use super::{one_sample_t, wilcoxon_signed_rank, TestResult, WindowStats, DEFAULT_ALPHA};
use crate::eda::{bin_index, sturges_bins};
use crate::numcore::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningMode {
    /// Equal-width bins on the observed range.
    #[default]
    EqualWidth,
    /// Equal-width bins on average ranks (approximately equal frequency).
    EqualFrequency,
}

/// Two-way table of bin counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub counts: Vec<Vec<u64>>,
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        for &k in &order[i..=j] {
            r[k] = (i + j) as f64 / 2.0 + 1.0;
        }
        i = j + 1;
    }
    r
}

/// Bin codes and edges of one variable.
fn discretize(xs: &[f64], bins: usize, mode: BinningMode, name: &str) -> Result<(Vec<usize>, Vec<f64>)> {
    let vals = match mode {
        BinningMode::EqualWidth => xs.to_vec(),
        BinningMode::EqualFrequency => average_ranks(xs),
    };
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::DegenerateVariance(format!("{name} is constant")));
    }
    let edges = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
    Ok((vals.iter().map(|&v| bin_index(v, lo, hi, bins)).collect(), edges))
}

impl ContingencyTable {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let cols = counts.first().map_or(0, |r| r.len());
        if counts.is_empty() || cols == 0 || counts.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("counts must be a non-empty rectangle".into()));
        }
        if counts.iter().flatten().sum::<u64>() == 0 {
            return Err(Error::EmptySample("contingency table has no counts".into()));
        }
        Ok(ContingencyTable { x_edges: Vec::new(), y_edges: Vec::new(), counts })
    }

    pub fn from_samples(xs: &[f64], ys: &[f64], bins: usize, mode: BinningMode) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch { expected: xs.len(), actual: ys.len() });
        }
        if xs.len() < 4 {
            return Err(Error::EmptySample(format!("mutual information needs n >= 4, got {}", xs.len())));
        }
        if bins < 2 {
            return Err(Error::InvalidParameter("bins must be >= 2".into()));
        }
        let (cx, x_edges) = discretize(xs, bins, mode, "x")?;
        let (cy, y_edges) = discretize(ys, bins, mode, "y")?;
        let mut counts = vec![vec![0u64; bins]; bins];
        for (a, b) in cx.into_iter().zip(cy) {
            counts[a][b] += 1;
        }
        Ok(ContingencyTable { x_edges, y_edges, counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn margins(&self) -> (Vec<u64>, Vec<u64>) {
        let rows = self.counts.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..self.counts[0].len()).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect();
        (rows, cols)
    }

    /// Plug-in mutual information in nats.
    pub fn mutual_information(&self) -> f64 {
        let n = self.total() as f64;
        let (rows, cols) = self.margins();
        let mut mi = 0.0;
        for (i, r) in self.counts.iter().enumerate() {
            for (j, &c) in r.iter().enumerate() {
                if c > 0 {
                    let c = c as f64;
                    mi += c / n * (c * n / (rows[i] as f64 * cols[j] as f64)).ln();
                }
            }
        }
        mi.max(0.0)
    }

    /// Plug-in entropies of the row and column margins, nats.
    pub fn marginal_entropies(&self) -> (f64, f64) {
        let n = self.total() as f64;
        let h = |m: &[u64]| -m.iter().filter(|&&c| c > 0).map(|&c| c as f64 / n * (c as f64 / n).ln()).sum::<f64>();
        let (rows, cols) = self.margins();
        (h(&rows), h(&cols))
    }

    /// Miller–Madow bias-corrected mutual information,
    /// `MI − (B_xy − B_x − B_y + 1)/(2n)` over occupied cells.
    pub fn mutual_information_mm(&self) -> f64 {
        let n = self.total() as f64;
        let (rows, cols) = self.margins();
        let occupied = |v: &mut dyn Iterator<Item = u64>| v.filter(|&c| c > 0).count() as f64;
        let bxy = occupied(&mut self.counts.iter().flatten().copied());
        let bx = occupied(&mut rows.into_iter());
        let by = occupied(&mut cols.into_iter());
        self.mutual_information() - (bxy - bx - by + 1.0) / (2.0 * n)
    }
}

/// Plug-in MI (nats) from an equal-width table.
pub fn mutual_information(xs: &[f64], ys: &[f64], bins: usize) -> Result<f64> {
    mutual_information_with(xs, ys, bins, BinningMode::EqualWidth)
}

pub fn mutual_information_with(xs: &[f64], ys: &[f64], bins: usize, mode: BinningMode) -> Result<f64> {
    Ok(ContingencyTable::from_samples(xs, ys, bins, mode)?.mutual_information())
}

fn check_pair(xy: &Matrix) -> Result<()> {
    if xy.cols() != 2 {
        return Err(Error::InvalidParameter(format!("expected two columns, got {}", xy.cols())));
    }
    Ok(())
}

/// Correlation shift across expanding windows.
///
/// Window correlations are Fisher-z transformed; successive increments are
/// standardized by their nested-sample standard error
/// `√(1/(n_{t−1} − 3) − 1/(n_t − 3))` and their mean is tested against zero
/// with a one-sample t test on `T − 2` degrees of freedom.
pub fn h2a_corr_shift(xy: &Matrix, min_rows: usize) -> Result<TestResult> {
    check_pair(xy)?;
    if min_rows < 4 {
        return Err(Error::InvalidParameter("min_rows must be >= 4 for the Fisher z transform".into()));
    }
    if xy.rows() < min_rows + 3 {
        return Err(Error::TooFewWindows { needed: 4, got: xy.rows().saturating_sub(min_rows - 1) });
    }
    let w = expanding_windows(xy, min_rows)?;
    let mut z = Vec::with_capacity(w.len());
    for ws in &w {
        let r = ws.correlation.ok_or_else(|| Error::DegenerateVariance(format!("window {} has zero variance", ws.index)))?;
        if r.abs() >= 1.0 {
            return Err(Error::DegenerateVariance(format!("window {} is perfectly correlated", ws.index)));
        }
        z.push(r.atanh());
    }
    let u: Vec<f64> = (1..w.len())
        .map(|t| {
            let (a, b) = ((w[t - 1].n - 3) as f64, (w[t].n - 3) as f64);
            (z[t] - z[t - 1]) / (1.0 / a - 1.0 / b).sqrt()
        })
        .collect();
    let mut r = one_sample_t(&u, 0.0, DEFAULT_ALPHA)?;
    r.method = "fisher-z increment t test".into();
    r.n = w.len();
    Ok(r)
}

/// Expanding windows with bias-corrected MI attached. The discretization
/// (bin count and edges) is fixed once from the full series so successive
/// windows differ only by the rows they add.
pub fn mi_windows(xy: &Matrix, min_rows: usize, bins: Option<usize>, mode: BinningMode) -> Result<Vec<WindowStats>> {
    check_pair(xy)?;
    let n = xy.rows();
    let bins = bins.unwrap_or_else(|| sturges_bins(n));
    if bins < 2 {
        return Err(Error::InvalidParameter("bins must be >= 2".into()));
    }
    let (cx, _) = discretize(&xy.column(0), bins, mode, "first column")?;
    let (cy, _) = discretize(&xy.column(1), bins, mode, "second column")?;
    let mut windows = expanding_windows(xy, min_rows.max(4))?;
    let mut counts = vec![vec![0u64; bins]; bins];
    let mut filled = 0;
    for w in windows.iter_mut() {
        while filled < w.n {
            counts[cx[filled]][cy[filled]] += 1;
            filled += 1;
        }
        let table = ContingencyTable { x_edges: Vec::new(), y_edges: Vec::new(), counts: counts.clone() };
        w.mi = Some(table.mutual_information_mm());
    }
    Ok(windows)
}

/// Bins used by [`h2b_mi_shift`].
pub const H2B_BINS: usize = 3;

/// MI shift: Wilcoxon signed-rank on the successive changes of the
/// windowed MI estimates, each scaled by `1/√(1/n_{t−1} − 1/n_t)`.
/// Uses [`H2B_BINS`] rank bins; finer equal-width tables inflate the
/// null rejection rate badly on short series.
pub fn h2b_mi_shift(xy: &Matrix, min_rows: usize) -> Result<TestResult> {
    h2b_mi_shift_with(xy, min_rows, Some(H2B_BINS), BinningMode::EqualFrequency)
}

pub fn h2b_mi_shift_with(xy: &Matrix, min_rows: usize, bins: Option<usize>, mode: BinningMode) -> Result<TestResult> {
    check_pair(xy)?;
    let available = xy.rows().saturating_sub(min_rows.max(4)) + 1;
    if xy.rows() < min_rows.max(4) || available < 6 {
        return Err(Error::TooFewWindows { needed: 6, got: available.min(xy.rows()) });
    }
    let w = mi_windows(xy, min_rows, bins, mode)?;
    let deltas: Vec<f64> = w
        .windows(2)
        .map(|p| {
            let scale = (1.0 / p[0].n as f64 - 1.0 / p[1].n as f64).sqrt();
            (p[1].mi.unwrap() - p[0].mi.unwrap()) / scale
        })
        .collect();
    let mut r = wilcoxon_signed_rank(&deltas, 0.0)?;
    r.method = format!("{} on successive MI changes", r.method);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drift::simulate_corr_path;
    use crate::numcore::RandomSeed;
    use approx::assert_abs_diff_eq;

    /// Σ p_ij ln(p_ij / (p_i· p_·j)) written out for a 2×2 table.
    fn hand_mi(c: [[f64; 2]; 2]) -> f64 {
        let n = c[0][0] + c[0][1] + c[1][0] + c[1][1];
        let r = [c[0][0] + c[0][1], c[1][0] + c[1][1]];
        let k = [c[0][0] + c[1][0], c[0][1] + c[1][1]];
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                if c[i][j] > 0.0 {
                    let p = c[i][j] / n;
                    s += p * (p / ((r[i] / n) * (k[j] / n))).ln();
                }
            }
        }
        s
    }

    #[test]
    fn plugin_mi_hand_tables() {
        for t in [[[25.0, 25.0], [25.0, 25.0]], [[40.0, 10.0], [10.0, 40.0]], [[30.0, 0.0], [5.0, 15.0]]] {
            let counts = t.iter().map(|r| r.iter().map(|&v| v as u64).collect()).collect();
            let mi = ContingencyTable::from_counts(counts).unwrap().mutual_information();
            assert_abs_diff_eq!(mi, hand_mi(t), epsilon = 1e-12);
        }
        let flat = ContingencyTable::from_counts(vec![vec![25, 25], vec![25, 25]]).unwrap();
        assert_eq!(flat.mutual_information(), 0.0);
    }

    #[test]
    fn mi_with_itself_is_entropy() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 37) % 11) as f64 + 0.1 * i as f64).collect();
        let t = ContingencyTable::from_samples(&xs, &xs, 6, BinningMode::EqualWidth).unwrap();
        let (hx, hy) = t.marginal_entropies();
        assert_abs_diff_eq!(t.mutual_information(), hx, epsilon = 1e-12);
        assert_abs_diff_eq!(hx, hy, epsilon = 1e-15);
    }

    #[test]
    fn mi_errors() {
        assert!(mutual_information(&[1.0; 10], &(0..10).map(f64::from).collect::<Vec<_>>(), 3).is_err());
        assert!(mutual_information(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 3).is_err());
        assert!(mutual_information(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0], 1).is_err());
    }

    #[test]
    fn h2a_contract() {
        let xy = simulate_corr_path(&[0.3; 6], RandomSeed(1)).unwrap();
        assert!(matches!(h2a_corr_shift(&xy, 4), Err(Error::TooFewWindows { .. })));
    }

    fn jump_path(first: usize, rest: usize) -> Vec<f64> {
        [vec![0.0; first], vec![0.9; rest]].concat()
    }

    #[test]
    fn h2a_detects_jump() {
        let xy = simulate_corr_path(&jump_path(20, 40), RandomSeed(11)).unwrap();
        assert!(h2a_corr_shift(&xy, 20).unwrap().reject);
    }

    #[test]
    fn h2a_null_calibration() {
        let rejects = (0..100)
            .filter(|&s| {
                let xy = simulate_corr_path(&[0.4; 60], RandomSeed(500 + s)).unwrap();
                h2a_corr_shift(&xy, 10).unwrap().reject
            })
            .count();
        assert!(rejects <= 10, "{rejects}");
    }

    #[test]
    fn h2b_detects_jump() {
        let xy = simulate_corr_path(&jump_path(20, 40), RandomSeed(12)).unwrap();
        assert!(h2b_mi_shift(&xy, 20).unwrap().reject);
    }

    #[test]
    fn h2b_null_calibration() {
        let rejects = (0..200)
            .filter(|&s| {
                let xy = simulate_corr_path(&[0.4; 60], RandomSeed(900 + s)).unwrap();
                h2b_mi_shift(&xy, 10).unwrap().reject
            })
            .count();
        assert!((2..=24).contains(&rejects), "{rejects}");
    }

    #[test]
    fn h2b_constant_series_is_degenerate() {
        let mut xy = Matrix::zeros(12, 2);
        for i in 0..12 {
            xy[(i, 0)] = i as f64;
            xy[(i, 1)] = (i % 3) as f64;
        }
        assert!(h2b_mi_shift(&xy, 4).is_ok());
        assert!(h2b_mi_shift(&Matrix::zeros(12, 2), 4).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn symmetric_and_rank_invariant(pairs in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 8..40), bins in 2usize..6) {
                let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
                if let (Ok(a), Ok(b)) = (mutual_information(&xs, &ys, bins), mutual_information(&ys, &xs, bins)) {
                    prop_assert!((a - b).abs() <= 1e-12);
                    let t = ContingencyTable::from_samples(&xs, &ys, bins, BinningMode::EqualWidth).unwrap();
                    let (hx, hy) = t.marginal_entropies();
                    prop_assert!(a >= 0.0 && a <= hx.min(hy) + 1e-12);
                }
                let cubed: Vec<f64> = xs.iter().map(|v| v * v * v + 3.0 * v).collect();
                if let (Ok(a), Ok(b)) = (
                    mutual_information_with(&xs, &ys, bins, BinningMode::EqualFrequency),
                    mutual_information_with(&cubed, &ys, bins, BinningMode::EqualFrequency),
                ) {
                    prop_assert!((a - b).abs() <= 1e-12);
                }
            }
        }
    }
}
