use super::{TestResult, WindowStats, DEFAULT_ALPHA};
use crate::numcore::dist::{chi_square_upper_p, f_upper_p};
use crate::numcore::linalg::log_det_spd;
use crate::numcore::{solve_spd, Matrix, SymmetricMatrix};
use crate::{Error, Result};

/// One-sample Hotelling T² test of the mean vector against `mu0`.
pub fn hotelling_t2(sample: &Matrix, mu0: &[f64]) -> Result<TestResult> {
    let (n, p) = (sample.rows(), sample.cols());
    if mu0.len() != p {
        return Err(Error::LengthMismatch { expected: p, actual: mu0.len() });
    }
    if n <= p {
        return Err(Error::InvalidParameter(format!("Hotelling T² needs n > p (n = {n}, p = {p})")));
    }
    let cov = sample.covariance()?;
    let d: Vec<f64> = sample.column_means().iter().zip(mu0).map(|(m, m0)| m - m0).collect();
    let x = solve_spd(&cov, &d).map_err(|_| Error::SingularMatrix("sample covariance is singular".into()))?;
    let t2 = n as f64 * d.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
    let (nf, pf) = (n as f64, p as f64);
    let f = t2 * (nf - pf) / (pf * (nf - 1.0));
    let pv = f_upper_p(f, pf, nf - pf);
    Ok(TestResult::new("hotelling-t2 (one-sample mean)", t2, vec![pf, nf - pf], pv, DEFAULT_ALPHA, n))
}

/// Box's M test of equal covariance matrices across groups, with the
/// chi-square approximation `M(1 − c)`, df `p(p+1)(k−1)/2`.
pub fn box_m(groups: &[Matrix]) -> Result<TestResult> {
    let k = groups.len();
    if k < 2 {
        return Err(Error::InvalidParameter("Box's M needs at least two groups".into()));
    }
    let p = groups[0].cols();
    let mut covs = Vec::with_capacity(k);
    for (g, m) in groups.iter().enumerate() {
        if m.cols() != p {
            return Err(Error::LengthMismatch { expected: p, actual: m.cols() });
        }
        if m.rows() <= p {
            return Err(Error::InvalidParameter(format!("segment {g} has {} rows, needs more than {p}", m.rows())));
        }
        covs.push(m.covariance()?);
    }
    let dof: Vec<f64> = groups.iter().map(|m| (m.rows() - 1) as f64).collect();
    let total: f64 = dof.iter().sum();
    let pooled = SymmetricMatrix::from_fn(p, |a, b| {
        covs.iter().zip(&dof).map(|(c, d)| d * c.get(a, b)).sum::<f64>() / total
    })?;
    let mut m_stat = total * log_det_spd(&pooled).map_err(|_| Error::SingularSegment("pooled covariance is singular".into()))?;
    for (g, (c, d)) in covs.iter().zip(&dof).enumerate() {
        let ld = log_det_spd(c).map_err(|_| Error::SingularSegment(format!("segment {g} covariance is singular")))?;
        m_stat -= d * ld;
    }
    let pf = p as f64;
    let c1 = (dof.iter().map(|d| 1.0 / d).sum::<f64>() - 1.0 / total) * (2.0 * pf * pf + 3.0 * pf - 1.0)
        / (6.0 * (pf + 1.0) * (k as f64 - 1.0));
    let chi2 = m_stat * (1.0 - c1);
    let df = pf * (pf + 1.0) * (k as f64 - 1.0) / 2.0;
    let n = groups.iter().map(|m| m.rows()).sum();
    Ok(TestResult::new("box-m (chi-square approximation)", chi2, vec![df], chi_square_upper_p(chi2, df), DEFAULT_ALPHA, n))
}

/// Consecutive segment sizes; the remainder goes one row each to the
/// leading segments.
pub(crate) fn segment_sizes(n: usize, splits: usize) -> Vec<usize> {
    let (base, rem) = (n / splits, n % splits);
    (0..splits).map(|g| base + usize::from(g < rem)).collect()
}

/// Covariance stability: Box's M over `splits` consecutive near-equal blocks.
pub fn h1a_cov_stability(data: &Matrix, splits: usize) -> Result<TestResult> {
    if splits < 2 {
        return Err(Error::InvalidParameter("splits must be >= 2".into()));
    }
    let mut groups = Vec::with_capacity(splits);
    let mut start = 0;
    for size in segment_sizes(data.rows(), splits) {
        let idx: Vec<usize> = (start..start + size).collect();
        groups.push(data.select_rows(&idx));
        start += size;
    }
    let mut r = box_m(&groups)?;
    r.method = format!("box-m over {splits} consecutive segments");
    Ok(r)
}

/// Mean trend: regression of the pooled observations on their time label,
/// rebuilt from the expanding windows, tested with Pillai's trace.
///
/// Consecutive windows are differenced into the block of rows each one
/// adds (its size, mean vector and mean time). With a single regressor the
/// hypothesis matrix has rank one, so Pillai's trace is
/// `V = S_tyᵀ T⁻¹ S_ty / S_tt` with `T` the total SSCP of the last window,
/// and `F = V/(1 − V) · (N − p − 1)/p` on `(p, N − p − 1)` is exact.
/// Rows inside the first window are taken at that window's mean time.
pub fn h1b_mean_trend(windows: &[WindowStats]) -> Result<TestResult> {
    if windows.len() < 4 {
        return Err(Error::TooFewWindows { needed: 4, got: windows.len() });
    }
    let p = windows[0].mean_vector.len();
    let last = windows.last().unwrap();
    let n_total = last.n;
    if n_total < p + 2 {
        return Err(Error::InvalidParameter(format!("{n_total} rows are too few for {p} variables")));
    }
    let mut blocks: Vec<(f64, f64, Vec<f64>)> = Vec::with_capacity(windows.len());
    let first = &windows[0];
    blocks.push((first.n as f64, first.time_mean, first.mean_vector.clone()));
    for w in windows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.n <= a.n || b.mean_vector.len() != p {
            return Err(Error::InvalidParameter("windows must be expanding and share one dimension".into()));
        }
        let c = (b.n - a.n) as f64;
        let (na, nb) = (a.n as f64, b.n as f64);
        let t = (nb * b.time_mean - na * a.time_mean) / c;
        let m = (0..p).map(|j| (nb * b.mean_vector[j] - na * a.mean_vector[j]) / c).collect();
        blocks.push((c, t, m));
    }
    let (tbar, mbar) = (last.time_mean, &last.mean_vector);
    let mut stt = 0.0;
    let mut sty = vec![0.0; p];
    for (c, t, m) in &blocks {
        let dt = t - tbar;
        stt += c * dt * dt;
        for j in 0..p {
            sty[j] += c * dt * (m[j] - mbar[j]);
        }
    }
    if stt <= 0.0 {
        return Err(Error::DegenerateVariance("time label does not vary across windows".into()));
    }
    let nf = n_total as f64;
    let total = SymmetricMatrix::from_fn(p, |a, b| (nf - 1.0) * last.covariance.get(a, b))?;
    let x = solve_spd(&total, &sty).map_err(|_| Error::SingularMatrix("pooled covariance is singular".into()))?;
    let v = (sty.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() / stt).clamp(0.0, 1.0);
    let pf = p as f64;
    let df2 = nf - pf - 1.0;
    let (f, pv) = if v >= 1.0 { (f64::INFINITY, 0.0) } else {
        let f = v / (1.0 - v) * df2 / pf;
        (f, f_upper_p(f, pf, df2))
    };
    Ok(TestResult::new("pillai-trace (mean regressed on time)", f, vec![pf, df2], pv, DEFAULT_ALPHA, n_total)
        .with_note(format!("pillai V = {v}")))
}
