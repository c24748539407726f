use crate::eda::bin_index;
use crate::possibility::{nonspecificity, prob_to_poss};
use crate::{Error, Result};

/// Nonspecificity (bits) of each expanding window's histogram.
///
/// Window `w = 1..=windows` covers the first `⌈w·n/windows⌉` values. Bin
/// edges are fixed from the full series, each window's bin frequencies go
/// through [`prob_to_poss`], and [`nonspecificity`] scores the result, so
/// every value lies in `[0, log2 bins]`.
pub fn possibilistic_drift(xs: &[f64], windows: usize, bins: usize) -> Result<Vec<f64>> {
    if windows < 2 || bins < 2 {
        return Err(Error::InvalidParameter("windows and bins must both be >= 2".into()));
    }
    if xs.len() < windows {
        return Err(Error::TooFewWindows { needed: windows, got: xs.len() });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("possibilistic drift input".into()));
    }
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let n = xs.len();
    let mut out = Vec::with_capacity(windows);
    for w in 1..=windows {
        let end = (w * n).div_ceil(windows);
        let win = &xs[..end];
        if win.iter().all(|&v| v == win[0]) {
            return Err(Error::DegenerateVariance(format!("window {w} is constant")));
        }
        let mut counts = vec![0usize; bins];
        for &v in win {
            counts[bin_index(v, lo, hi, bins)] += 1;
        }
        let p: Vec<f64> = counts.iter().map(|&c| c as f64 / end as f64).collect();
        out.push(nonspecificity(&prob_to_poss(&p)?)?);
    }
    Ok(out)
}
