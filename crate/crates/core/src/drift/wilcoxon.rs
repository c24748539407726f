use super::{TestResult, DEFAULT_ALPHA};
use crate::numcore::dist::normal_cdf;
use crate::{Error, Result};

/// Largest count of nonzero differences handled by the exact distribution.
pub const EXACT_MAX: usize = 20;

/// Number of sign assignments reaching each total of `scores`, indexed by
/// that total. Scores are doubled ranks so tied (half-integer) ranks stay
/// integral.
pub fn signed_rank_exact_counts(scores: &[u64]) -> Vec<u64> {
    let total: u64 = scores.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &s in scores {
        let s = s as usize;
        for v in (0..=reach).rev() {
            if counts[v] > 0 {
                counts[v + s] += counts[v];
            }
        }
        reach += s;
    }
    counts
}

/// Average ranks of `values` (1-based), doubled.
fn doubled_ranks(values: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1, doubled average = i + j + 2
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-sided Wilcoxon signed-rank test of symmetry about `mu`.
///
/// Zero differences are dropped. Up to [`EXACT_MAX`] remaining
/// differences use the exact permutation distribution (conditional on
/// ties); beyond that, the normal approximation with tie and continuity
/// corrections. If every difference is zero the result is `p = 1` with a
/// note.
pub fn wilcoxon_signed_rank(xs: &[f64], mu: f64) -> Result<TestResult> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("signed-rank input".into()));
    }
    let d: Vec<f64> = xs.iter().map(|x| x - mu).filter(|v| *v != 0.0).collect();
    let m = d.len();
    if m == 0 {
        return Ok(TestResult::new("wilcoxon signed-rank", 0.0, vec![0.0], 1.0, DEFAULT_ALPHA, 0)
            .with_note("degenerate: all differences are zero"));
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let (ranks, ties) = doubled_ranks(&abs);
    let w2: u64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| *r).sum();
    let w = w2 as f64 / 2.0;
    if m <= EXACT_MAX {
        let counts = signed_rank_exact_counts(&ranks);
        let le: u64 = counts[..=w2 as usize].iter().sum();
        let ge: u64 = counts[w2 as usize..].iter().sum();
        let total = 2f64.powi(m as i32);
        let p = (2.0 * le.min(ge) as f64 / total).min(1.0);
        return Ok(TestResult::new("wilcoxon signed-rank (exact)", w, vec![m as f64], p, DEFAULT_ALPHA, m));
    }
    let mf = m as f64;
    let tie_adj: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let sigma = (mf * (mf + 1.0) * (2.0 * mf + 1.0) / 24.0 - tie_adj).sqrt();
    let centered = w - mf * (mf + 1.0) / 4.0;
    let z = (centered - 0.5 * centered.signum()) / sigma;
    let p = (2.0 * normal_cdf(-z.abs())).min(1.0);
    Ok(TestResult::new("wilcoxon signed-rank (normal approximation)", w, vec![mf], p, DEFAULT_ALPHA, m)
        .with_note(format!("z = {z}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force two-sided p over all 2^m sign patterns.
    fn enumerate_p(ranks: &[u64], observed: u64) -> f64 {
        let m = ranks.len();
        let (mut le, mut ge) = (0u64, 0u64);
        for mask in 0u32..(1 << m) {
            let s: u64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= observed {
                le += 1;
            }
            if s >= observed {
                ge += 1;
            }
        }
        (2.0 * le.min(ge) as f64 / 2f64.powi(m as i32)).min(1.0)
    }

    #[test]
    fn exact_matches_enumeration_for_five() {
        let xs = [1.5, -0.3, 2.2, 0.9, -1.1];
        let r = wilcoxon_signed_rank(&xs, 0.0).unwrap();
        let (ranks, _) = doubled_ranks(&xs.iter().map(|v: &f64| v.abs()).collect::<Vec<_>>());
        let w2: u64 = ranks.iter().zip(&xs).filter(|(_, v)| **v > 0.0).map(|(r, _)| *r).sum();
        assert_eq!(r.p_value, enumerate_p(&ranks, w2));
        assert_eq!(r.statistic, 11.0);
    }

    #[test]
    fn all_zero_differences() {
        let r = wilcoxon_signed_rank(&[2.0, 2.0, 2.0], 2.0).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(r.note.unwrap().contains("degenerate"));
    }

    #[test]
    fn counts_for_three() {
        // sums of subsets of {2,4,6}: 0,2,4,6,6,8,10,12
        let c = signed_rank_exact_counts(&[2, 4, 6]);
        assert_eq!(c.iter().sum::<u64>(), 8);
        assert_eq!(c[6], 2);
        assert_eq!(c[12], 1);
    }

    #[test]
    fn normal_branch_matches_hand_value() {
        // 25 positive distinct differences: W = 325, mean 162.5, var 25·26·51/24
        let xs: Vec<f64> = (1..=25).map(|i| i as f64).collect();
        let r = wilcoxon_signed_rank(&xs, 0.0).unwrap();
        let z = (325.0 - 162.5 - 0.5) / (25.0f64 * 26.0 * 51.0 / 24.0).sqrt();
        assert!((r.p_value - 2.0 * normal_cdf(-z)).abs() < 1e-15);
        assert!(r.method.contains("normal"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exact_equals_enumeration(xs in prop::collection::vec((-20i32..20).prop_map(|v| v as f64 / 4.0), 1..=10)) {
                let r = wilcoxon_signed_rank(&xs, 0.0).unwrap();
                let d: Vec<f64> = xs.iter().copied().filter(|v| *v != 0.0).collect();
                if d.is_empty() {
                    prop_assert_eq!(r.p_value, 1.0);
                } else {
                    let (ranks, _) = doubled_ranks(&d.iter().map(|v| v.abs()).collect::<Vec<_>>());
                    let w2: u64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| *r).sum();
                    prop_assert_eq!(r.p_value, enumerate_p(&ranks, w2));
                }
            }
        }
    }
}
