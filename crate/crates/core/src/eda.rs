//! Correlation matrices, per-column distribution summaries and the
//! correlation web (edge list) used for exploratory plots.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ingest::{complete_cases, Frame};
use crate::numcore::stats::{descriptive, pearson, quantile_sorted};
use crate::numcore::SymmetricMatrix;
use crate::{Error, Result};

/// Labeled correlation matrix with the number of rows behind each entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    entries: SymmetricMatrix,
    pair_n: Vec<usize>,
}

impl CorrelationMatrix {
    /// Validates unit diagonal and entries in [−1, 1].
    pub fn new(labels: Vec<String>, entries: SymmetricMatrix, n: usize) -> Result<Self> {
        let p = entries.order();
        if labels.len() != p {
            return Err(Error::LengthMismatch { expected: p, actual: labels.len() });
        }
        if !entries.is_finite() {
            return Err(Error::NonFinite("correlation matrix".into()));
        }
        for i in 0..p {
            if entries.get(i, i) != 1.0 {
                return Err(Error::InvalidParameter(format!("diagonal entry {i} is not 1")));
            }
            for j in 0..p {
                if entries.get(i, j).abs() > 1.0 {
                    return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside [-1, 1]")));
                }
            }
        }
        Ok(CorrelationMatrix { labels, entries, pair_n: vec![n; p * p] })
    }

    /// Unlabeled convenience constructor (`v0, v1, ...`).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = SymmetricMatrix::from_rows(rows)?;
        let labels = (0..m.order()).map(|i| format!("v{i}")).collect();
        CorrelationMatrix::new(labels, m, 0)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &SymmetricMatrix {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(i, j)
    }

    /// Rows used for entry (i, j).
    pub fn pair_n(&self, i: usize, j: usize) -> usize {
        self.pair_n[i * self.order() + j]
    }

    /// Smallest and largest pairwise effective n.
    pub fn n_range(&self) -> (usize, usize) {
        let lo = self.pair_n.iter().copied().min().unwrap_or(0);
        let hi = self.pair_n.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("variable");
        for l in &self.labels {
            let _ = write!(s, ",{l}");
        }
        s.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            s.push_str(l);
            for j in 0..self.order() {
                let _ = write!(s, ",{}", self.get(i, j));
            }
            s.push('\n');
        }
        s
    }
}

fn column_values(frame: &Frame, name: &str) -> Result<Vec<Option<f64>>> {
    frame.numeric(name)
}

fn pair_r(name_a: &str, name_b: &str, xs: &[f64], ys: &[f64]) -> Result<f64> {
    pearson(xs, ys).map_err(|e| match e {
        Error::DegenerateVariance(_) => {
            let sd = |v: &[f64]| descriptive(v).map(|s| s.variance).unwrap_or(0.0);
            let which = if sd(xs) <= 0.0 { name_a } else { name_b };
            Error::DegenerateVariance(format!("column `{which}` has zero variance"))
        }
        other => other,
    })
}

/// Pairwise-complete Pearson correlations. Each entry uses the rows where
/// both columns are present; the result need not be positive semidefinite.
pub fn correlation_matrix<S: AsRef<str>>(frame: &Frame, columns: &[S]) -> Result<CorrelationMatrix> {
    if columns.len() < 2 {
        return Err(Error::InvalidParameter("correlation needs at least two columns".into()));
    }
    let names: Vec<&str> = columns.iter().map(|c| c.as_ref()).collect();
    let data: Vec<Vec<Option<f64>>> = names.iter().map(|n| column_values(frame, n)).collect::<Result<_>>()?;
    let p = names.len();
    let mut m = vec![0.0; p * p];
    let mut pair_n = vec![0usize; p * p];
    for i in 0..p {
        m[i * p + i] = 1.0;
        pair_n[i * p + i] = data[i].iter().filter(|v| v.is_some()).count();
        for j in (i + 1)..p {
            let (xs, ys): (Vec<f64>, Vec<f64>) = data[i]
                .iter()
                .zip(&data[j])
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let r = pair_r(names[i], names[j], &xs, &ys)?;
            m[i * p + j] = r;
            m[j * p + i] = r;
            pair_n[i * p + j] = xs.len();
            pair_n[j * p + i] = xs.len();
        }
    }
    Ok(CorrelationMatrix {
        labels: names.iter().map(|s| s.to_string()).collect(),
        entries: SymmetricMatrix::from_vec(p, m)?,
        pair_n,
    })
}

/// Listwise-complete correlations: rows missing any listed column are
/// dropped first, so the matrix is a genuine sample correlation matrix.
pub fn correlation_matrix_complete<S: AsRef<str>>(frame: &Frame, columns: &[S]) -> Result<CorrelationMatrix> {
    let cc = complete_cases(frame, columns)?;
    correlation_matrix(&cc, columns)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Sturges bin count, `ceil(log2 n) + 1`.
pub fn sturges_bins(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    (n as f64).log2().ceil() as usize + 1
}

/// Index of the equal-width bin holding `x` on `[lo, hi]`; the top edge
/// belongs to the last bin.
pub(crate) fn bin_index(x: f64, lo: f64, hi: f64, bins: usize) -> usize {
    if hi <= lo {
        return 0;
    }
    let k = ((x - lo) / (hi - lo) * bins as f64).floor();
    (k.max(0.0) as usize).min(bins - 1)
}

pub fn histogram(xs: &[f64], bins: usize) -> Result<Histogram> {
    if xs.is_empty() {
        return Err(Error::EmptySample("histogram of an empty column".into()));
    }
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be >= 1".into()));
    }
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let bins = if hi > lo { bins } else { 1 };
    let edges = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
    let mut counts = vec![0; bins];
    for &x in xs {
        counts[bin_index(x, lo, hi, bins)] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub column: String,
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Midpoint of the tallest histogram bin (first one on ties).
    pub mode: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub variance: f64,
    pub sd: f64,
    pub q1: f64,
    pub q3: f64,
    pub histogram: Histogram,
    /// Frame row indices outside the 1.5·IQR fences.
    pub outliers: Vec<usize>,
}

pub fn distribution_summary(frame: &Frame, column: &str) -> Result<DistributionSummary> {
    let values = frame.numeric(column)?;
    let present: Vec<(usize, f64)> = values.iter().enumerate().filter_map(|(r, v)| v.map(|x| (r, x))).collect();
    if present.is_empty() {
        return Err(Error::EmptySample(format!("column `{column}` has no values")));
    }
    let xs: Vec<f64> = present.iter().map(|p| p.1).collect();
    let stats = descriptive(&xs)?;
    let mut sorted = xs.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outliers = present.iter().filter(|(_, x)| *x < lo_fence || *x > hi_fence).map(|(r, _)| *r).collect();
    let histogram = histogram(&xs, sturges_bins(xs.len()))?;
    let tallest = histogram
        .counts
        .iter()
        .enumerate()
        .fold(0, |best, (k, &c)| if c > histogram.counts[best] { k } else { best });
    let mode = 0.5 * (histogram.edges[tallest] + histogram.edges[tallest + 1]);
    let variance = stats.variance;
    Ok(DistributionSummary {
        column: column.to_string(),
        n: xs.len(),
        mean: stats.mean,
        median,
        mode,
        min: stats.min,
        max: stats.max,
        range: stats.max - stats.min,
        variance,
        sd: variance.sqrt(),
        q1,
        q3,
        histogram,
        outliers,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub r: f64,
}

/// Undirected edges with |r| ≥ threshold, strongest first. Ties keep the
/// matrix's upper-triangle order.
pub fn web_edges(c: &CorrelationMatrix, threshold: f64) -> Result<Vec<Edge>> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!("threshold {threshold} outside [0, 1]")));
    }
    let p = c.order();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            let r = c.get(i, j);
            if r.abs() >= threshold {
                edges.push(Edge { a: c.labels[i].clone(), b: c.labels[j].clone(), r });
            }
        }
    }
    edges.sort_by(|x, y| y.r.abs().total_cmp(&x.r.abs()));
    Ok(edges)
}

pub fn edges_to_csv(edges: &[Edge]) -> String {
    let mut s = String::from("a,b,r\n");
    for e in edges {
        let _ = writeln!(s, "{},{},{}", e.a, e.b, e.r);
    }
    s
}
