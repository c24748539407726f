//! Fuzzy sets and possibility theory on finite label domains.
//!
//! A [`PossibilityDistribution`] π induces the possibility measure
//! Π(A) = max_{x∈A} π(x) and its dual necessity N(A) = 1 − Π(Ā).
//! Necessity and nonspecificity require a normalized distribution
//! (some label with π = 1); subnormal distributions are representable but
//! rejected there with [`Error::NotNormalized`].
//!
//! Fuzzy implication is Kleene–Dienes, `max(1 − μA, μB)`; other operators
//! can be supplied through [`FuzzySet::zip_with`].

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on Σp = 1 accepted by [`prob_to_poss`].
pub const SIMPLEX_TOL: f64 = 1e-9;

fn check_domain(labels: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::InvalidParameter(format!("duplicate label `{l}`")));
        }
    }
    Ok(index)
}

fn check_degrees(degrees: &[f64]) -> Result<()> {
    match degrees.iter().find(|d| !(0.0..=1.0).contains(*d)) {
        Some(d) => Err(Error::InvalidParameter(format!("degree {d} outside [0, 1]"))),
        None => Ok(()),
    }
}

/// A fuzzy set over an ordered finite domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySet {
    domain: Vec<String>,
    membership: Vec<f64>,
}

impl FuzzySet {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (domain, membership): (Vec<String>, Vec<f64>) =
            pairs.into_iter().map(|(l, d)| (l.into(), d)).unzip();
        check_domain(&domain)?;
        check_degrees(&membership)?;
        Ok(FuzzySet { domain, membership })
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn membership(&self) -> &[f64] {
        &self.membership
    }

    pub fn degree(&self, label: &str) -> Result<f64> {
        self.domain
            .iter()
            .position(|l| l == label)
            .map(|i| self.membership[i])
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Pointwise combination of two sets over an identical domain.
    pub fn zip_with(&self, other: &FuzzySet, op: impl Fn(f64, f64) -> f64) -> Result<FuzzySet> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch("fuzzy operands have different domains".into()));
        }
        let membership: Vec<f64> = self
            .membership
            .iter()
            .zip(&other.membership)
            .map(|(&a, &b)| op(a, b).clamp(0.0, 1.0))
            .collect();
        Ok(FuzzySet { domain: self.domain.clone(), membership })
    }

    pub fn complement(&self) -> FuzzySet {
        FuzzySet {
            domain: self.domain.clone(),
            membership: self.membership.iter().map(|m| 1.0 - m).collect(),
        }
    }

    /// Min t-norm.
    pub fn and(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.zip_with(other, f64::min)
    }

    /// Max t-conorm.
    pub fn or(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.zip_with(other, f64::max)
    }

    /// Kleene–Dienes implication.
    pub fn implies(&self, other: &FuzzySet) -> Result<FuzzySet> {
        self.zip_with(other, kleene_dienes)
    }
}

pub fn kleene_dienes(a: f64, b: f64) -> f64 {
    (1.0 - a).max(b)
}

pub fn fuzzy_complement(a: &FuzzySet) -> FuzzySet {
    a.complement()
}

pub fn fuzzy_and(a: &FuzzySet, b: &FuzzySet) -> Result<FuzzySet> {
    a.and(b)
}

pub fn fuzzy_or(a: &FuzzySet, b: &FuzzySet) -> Result<FuzzySet> {
    a.or(b)
}

pub fn fuzzy_implies(a: &FuzzySet, b: &FuzzySet) -> Result<FuzzySet> {
    a.implies(b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PossibilityDistribution {
    domain: Vec<String>,
    pi: Vec<f64>,
    normalized: bool,
}

impl PossibilityDistribution {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let (domain, pi): (Vec<String>, Vec<f64>) = pairs.into_iter().map(|(l, d)| (l.into(), d)).unzip();
        Self::from_parts(domain, pi)
    }

    pub fn from_parts(domain: Vec<String>, pi: Vec<f64>) -> Result<Self> {
        if domain.len() != pi.len() {
            return Err(Error::LengthMismatch { expected: domain.len(), actual: pi.len() });
        }
        check_domain(&domain)?;
        check_degrees(&pi)?;
        let normalized = pi.contains(&1.0);
        Ok(PossibilityDistribution { domain, pi, normalized })
    }

    /// Degrees indexed `0..n` with labels `x0, x1, ...`.
    pub fn from_degrees(pi: &[f64]) -> Result<Self> {
        let domain = (0..pi.len()).map(|i| format!("x{i}")).collect();
        Self::from_parts(domain, pi.to_vec())
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn degrees(&self) -> &[f64] {
        &self.pi
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn indices<'a>(&self, event: impl IntoIterator<Item = &'a str>) -> Result<BTreeSet<usize>> {
        event
            .into_iter()
            .map(|l| {
                self.domain
                    .iter()
                    .position(|d| d == l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect()
    }

    /// Π(event) = sup of π over the event; 0 for the empty event.
    pub fn possibility<'a>(&self, event: impl IntoIterator<Item = &'a str>) -> Result<f64> {
        Ok(self.indices(event)?.into_iter().map(|i| self.pi[i]).fold(0.0, f64::max))
    }

    /// N(event) = 1 − Π(domain ∖ event).
    pub fn necessity<'a>(&self, event: impl IntoIterator<Item = &'a str>) -> Result<f64> {
        if !self.normalized {
            return Err(Error::NotNormalized("necessity requires max degree 1".into()));
        }
        let inside = self.indices(event)?;
        let outside = (0..self.pi.len())
            .filter(|i| !inside.contains(i))
            .map(|i| self.pi[i])
            .fold(0.0, f64::max);
        Ok(1.0 - outside)
    }

    /// One `label<TAB>degree` line per domain element.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (l, d) in self.domain.iter().zip(&self.pi) {
            let _ = writeln!(s, "{l}\t{d}");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (label, degree) = line.rsplit_once('\t').ok_or_else(|| Error::Parse {
                row: i + 1,
                column: "degree".into(),
                message: "expected `label<TAB>degree`".into(),
            })?;
            let d: f64 = degree.trim().parse().map_err(|_| Error::Parse {
                row: i + 1,
                column: "degree".into(),
                message: format!("`{degree}` is not a number"),
            })?;
            pairs.push((label.to_string(), d));
        }
        Self::new(pairs)
    }
}

pub fn possibility_of(dist: &PossibilityDistribution, event: &[&str]) -> Result<f64> {
    dist.possibility(event.iter().copied())
}

pub fn necessity_of(dist: &PossibilityDistribution, event: &[&str]) -> Result<f64> {
    dist.necessity(event.iter().copied())
}

/// Optimal probability → possibility transformation:
/// π_i = Σ_{j : p_j ≤ p_i} p_j. Equal probabilities share the same degree
/// and the most probable outcome gets exactly 1.
pub fn prob_to_poss(p: &[f64]) -> Result<PossibilityDistribution> {
    if p.is_empty() {
        return Err(Error::InvalidParameter("empty probability vector".into()));
    }
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter("probabilities must be finite and nonnegative".into()));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    // ascending cumulative sums; ties take the sum through the end of their run
    let mut pi = vec![0.0; p.len()];
    let mut acc = 0.0;
    let mut k = 0;
    while k < order.len() {
        let mut end = k;
        while end + 1 < order.len() && p[order[end + 1]] == p[order[k]] {
            end += 1;
        }
        for &i in &order[k..=end] {
            acc += p[i];
        }
        for &i in &order[k..=end] {
            pi[i] = acc.min(1.0);
        }
        k = end + 1;
    }
    let pmax = p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for (i, v) in pi.iter_mut().enumerate() {
        if p[i] == pmax {
            *v = 1.0;
        }
    }
    PossibilityDistribution::from_degrees(&pi)
}

/// Nonspecificity U(π) = Σ_i (π_(i) − π_(i+1)) log2 i over degrees sorted
/// descending, with π_(n+1) = 0. In bits.
pub fn nonspecificity(dist: &PossibilityDistribution) -> Result<f64> {
    if !dist.normalized {
        return Err(Error::NotNormalized("nonspecificity requires max degree 1".into()));
    }
    let mut d = dist.pi.clone();
    d.sort_by(|a, b| b.total_cmp(a));
    let n = d.len();
    let mut u = 0.0;
    for i in 0..n {
        let next = if i + 1 < n { d[i + 1] } else { 0.0 };
        u += (d[i] - next) * ((i + 1) as f64).log2();
    }
    Ok(u)
}
