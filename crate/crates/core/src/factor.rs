//! Maximum-likelihood exploratory factor analysis on a correlation matrix.
//!
//! The fit minimizes the profile discrepancy
//!
//! ```text
//! F(ψ) = Σ_{j>k} (e_j − ln e_j) − (p − k)
//! ```
//!
//! where `e_1 ≥ … ≥ e_p` are the eigenvalues of `Ψ^{-1/2} C Ψ^{-1/2}`.
//! The search runs over `θ = ln ψ` inside the box `[ln floor, 0]` with a
//! projected BFGS and Armijo backtracking. Loadings are recovered as
//! `Ψ^{1/2} V_k diag(√max(e_j − 1, 0))`. No rotation is applied.

use serde::{Deserialize, Serialize};

use crate::eda::CorrelationMatrix;
use crate::numcore::linalg::{cholesky, inverse_spd};
use crate::numcore::{eigen_symmetric, Matrix};
use crate::{Error, Result};

/// Lower bound on every uniqueness.
pub const UNIQUENESS_FLOOR: f64 = 0.005;
/// Projected-gradient tolerance (log-uniqueness scale).
pub const GRADIENT_TOL: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 500;
/// Loadings smaller than this are flagged as below the print cutoff.
pub const SUPPRESS_BELOW: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorModel {
    pub variables: Vec<String>,
    pub k: usize,
    /// p×k, columns ordered by descending sum of squares.
    pub loadings: Matrix,
    pub uniquenesses: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Minimized discrepancy F at the solution.
    pub objective: f64,
    /// Concentrated log-likelihood up to its constant, `−F`.
    pub loglik: f64,
    /// Discrepancy after each accepted step, starting value first.
    pub objective_trace: Vec<f64>,
    pub dof: f64,
}

impl FactorModel {
    pub fn p(&self) -> usize {
        self.variables.len()
    }

    pub fn communalities(&self) -> Vec<f64> {
        (0..self.p()).map(|i| (0..self.k).map(|j| self.loadings[(i, j)].powi(2)).sum()).collect()
    }

    /// Variables held at the uniqueness floor.
    pub fn at_floor(&self) -> Vec<bool> {
        self.uniquenesses.iter().map(|&u| u <= UNIQUENESS_FLOOR * (1.0 + 1e-9)).collect()
    }

    /// `true` where |loading| < 0.1.
    pub fn suppressed(&self) -> Vec<Vec<bool>> {
        (0..self.p())
            .map(|i| (0..self.k).map(|j| self.loadings[(i, j)].abs() < SUPPRESS_BELOW).collect())
            .collect()
    }

    /// Λ Λᵀ + diag(ψ).
    pub fn implied(&self) -> Matrix {
        let p = self.p();
        let mut m = Matrix::zeros(p, p);
        for a in 0..p {
            for b in 0..p {
                let s: f64 = (0..self.k).map(|j| self.loadings[(a, j)] * self.loadings[(b, j)]).sum();
                m[(a, b)] = s + if a == b { self.uniquenesses[a] } else { 0.0 };
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorVariance {
    pub ss_loadings: f64,
    pub proportion: f64,
    pub cumulative: f64,
}

/// Number of eigenvalues strictly greater than 1.
pub fn kaiser_count(c: &CorrelationMatrix) -> Result<usize> {
    let e = eigen_symmetric(c.entries())?;
    Ok(e.values.iter().filter(|&&v| v > 1.0).count())
}

/// Degrees of freedom of the k-factor model, `((p − k)² − (p + k)) / 2`.
pub fn model_dof(p: usize, k: usize) -> f64 {
    let d = p as f64 - k as f64;
    0.5 * (d * d - (p + k) as f64)
}

struct Eval {
    f: f64,
    grad: Vec<f64>,
    loadings: Matrix,
}

fn evaluate(c: &Matrix, theta: &[f64], k: usize) -> Result<Eval> {
    let p = theta.len();
    let psi: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
    let sc: Vec<f64> = psi.iter().map(|v| 1.0 / v.sqrt()).collect();
    let scaled = crate::numcore::SymmetricMatrix::from_fn(p, |a, b| sc[a] * c[(a, b)] * sc[b])?;
    let e = eigen_symmetric(&scaled)?;
    let mut f = 0.0;
    for &v in &e.values[k..] {
        if v <= 0.0 {
            return Err(Error::NotPositiveDefinite("rescaled correlation matrix lost definiteness".into()));
        }
        f += v - v.ln() - 1.0;
    }
    let mut loadings = Matrix::zeros(p, k);
    for j in 0..k {
        let w = (e.values[j] - 1.0).max(0.0).sqrt();
        for a in 0..p {
            loadings[(a, j)] = psi[a].sqrt() * e.vectors[(a, j)] * w;
        }
    }
    let grad = (0..p)
        .map(|a| {
            let comm: f64 = (0..k).map(|j| loadings[(a, j)].powi(2)).sum();
            (comm + psi[a] - c[(a, a)]) / psi[a]
        })
        .collect();
    Ok(Eval { f, grad, loadings })
}

fn projected_gradient(theta: &[f64], g: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    theta
        .iter()
        .zip(g)
        .map(|(&t, &gi)| if (t <= lo && gi > 0.0) || (t >= hi && gi < 0.0) { 0.0 } else { gi })
        .collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// k-factor maximum-likelihood fit.
///
/// Requires `(p − k)² ≥ p + k` (non-negative model degrees of freedom) and
/// a positive definite input. If the optimizer hits the iteration cap or
/// stalls, the best point is returned with `converged = false`.
pub fn efa_fit(c: &CorrelationMatrix, k: usize) -> Result<FactorModel> {
    let p = c.order();
    if k == 0 || k >= p {
        return Err(Error::InvalidParameter(format!("factor count {k} must be in 1..{p}")));
    }
    let dof = model_dof(p, k);
    if dof < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{k} factors are not identified for {p} variables (degrees of freedom {dof})"
        )));
    }
    cholesky(c.entries())?;
    let cm = c.entries().as_matrix().clone();
    let (lo, hi) = (UNIQUENESS_FLOOR.ln(), 0.0);

    let inv = inverse_spd(c.entries())?;
    let start_scale = 1.0 - 0.5 * k as f64 / p as f64;
    let mut theta: Vec<f64> = (0..p).map(|i| (start_scale / inv.get(i, i)).ln().clamp(lo, hi)).collect();

    let mut cur = evaluate(&cm, &theta, k)?;
    let mut trace = vec![cur.f];
    let mut h = identity(p);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        let pg = projected_gradient(&theta, &cur.grad, lo, hi);
        if inf_norm(&pg) <= GRADIENT_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let free: Vec<bool> = pg.iter().zip(&cur.grad).map(|(a, g)| *a != 0.0 || *g == 0.0).collect();
        let mut d = direction(&h, &cur.grad, &free);
        if d.iter().zip(&cur.grad).map(|(a, b)| a * b).sum::<f64>() >= 0.0 {
            h = identity(p);
            d = direction(&h, &cur.grad, &free);
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = theta.iter().zip(&d).map(|(t, di)| (t + step * di).clamp(lo, hi)).collect();
            let decrease: f64 = trial.iter().zip(&theta).zip(&cur.grad).map(|((a, b), g)| (a - b) * g).sum();
            if let Ok(ev) = evaluate(&cm, &trial, k) {
                if ev.f <= cur.f + 1e-4 * decrease {
                    accepted = Some((trial, ev));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((next, ev)) = accepted else {
            if is_identity(&h) {
                break;
            }
            h = identity(p);
            continue;
        };
        let s: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = ev.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
        bfgs_update(&mut h, &s, &y);
        theta = next;
        cur = ev;
        trace.push(cur.f);
    }

    let psi: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
    let loadings = order_and_sign(&cur.loadings);
    Ok(FactorModel {
        variables: c.labels().to_vec(),
        k,
        loadings,
        uniquenesses: psi,
        converged,
        iterations,
        objective: cur.f,
        loglik: -cur.f,
        objective_trace: trace,
        dof,
    })
}

fn identity(p: usize) -> Vec<Vec<f64>> {
    (0..p).map(|i| (0..p).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn is_identity(h: &[Vec<f64>]) -> bool {
    h.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &v)| v == if i == j { 1.0 } else { 0.0 }))
}

fn direction(h: &[Vec<f64>], g: &[f64], free: &[bool]) -> Vec<f64> {
    let p = g.len();
    (0..p)
        .map(|i| {
            if !free[i] {
                return 0.0;
            }
            -(0..p).filter(|&j| free[j]).map(|j| h[i][j] * g[j]).sum::<f64>()
        })
        .collect()
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64]) {
    let sy: f64 = s.iter().zip(y).map(|(a, b)| a * b).sum();
    let ns = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if sy <= 1e-12 * ns * ny {
        return;
    }
    let p = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..p).map(|i| (0..p).map(|j| h[i][j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..p {
        for j in 0..p {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Columns by descending sum of squares; each column's largest-magnitude
/// entry made positive.
fn order_and_sign(l: &Matrix) -> Matrix {
    let (p, k) = (l.rows(), l.cols());
    let ss: Vec<f64> = (0..k).map(|j| (0..p).map(|i| l[(i, j)].powi(2)).sum()).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| ss[b].total_cmp(&ss[a]));
    let mut out = Matrix::zeros(p, k);
    for (dst, &src) in order.iter().enumerate() {
        let pivot = (0..p).fold(0, |best, i| if l[(i, src)].abs() > l[(best, src)].abs() { i } else { best });
        let sign = if l[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..p {
            out[(i, dst)] = sign * l[(i, src)];
        }
    }
    out
}

/// SS loadings, proportion of variance (SS/p) and running total per factor.
pub fn variance_table(m: &FactorModel) -> Vec<FactorVariance> {
    let p = m.p() as f64;
    let mut cumulative = 0.0;
    (0..m.k)
        .map(|j| {
            let ss: f64 = (0..m.p()).map(|i| m.loadings[(i, j)].powi(2)).sum();
            let proportion = ss / p;
            cumulative += proportion;
            FactorVariance { ss_loadings: ss, proportion, cumulative }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::SymmetricMatrix;
    use approx::assert_abs_diff_eq;

    fn implied_corr(loadings: &[Vec<f64>]) -> CorrelationMatrix {
        let p = loadings.len();
        let m = SymmetricMatrix::from_fn(p, |a, b| {
            if a == b {
                1.0
            } else {
                loadings[a].iter().zip(&loadings[b]).map(|(x, y)| x * y).sum()
            }
        })
        .unwrap();
        let labels = (0..p).map(|i| format!("v{i}")).collect();
        CorrelationMatrix::new(labels, m, 0).unwrap()
    }

    #[test]
    fn kaiser_examples() {
        let id = CorrelationMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(kaiser_count(&id).unwrap(), 0);
        let c = CorrelationMatrix::from_rows(&[vec![1.0, 0.9], vec![0.9, 1.0]]).unwrap();
        assert_eq!(kaiser_count(&c).unwrap(), 1);
    }

    #[test]
    fn recovers_one_factor_model() {
        let lambda = [0.8, 0.7, 0.6];
        let c = implied_corr(&lambda.iter().map(|&l| vec![l]).collect::<Vec<_>>());
        let m = efa_fit(&c, 1).unwrap();
        assert!(m.converged);
        for i in 0..3 {
            assert_abs_diff_eq!(m.loadings[(i, 0)].abs(), lambda[i], epsilon = 1e-4);
            assert_abs_diff_eq!(m.uniquenesses[i], 1.0 - lambda[i] * lambda[i], epsilon = 1e-4);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = implied_corr(&[vec![0.7, 0.1], vec![0.6, 0.3], vec![0.5, -0.4], vec![0.2, 0.6], vec![0.4, 0.4], vec![0.3, 0.1]]);
        let cm = c.entries().as_matrix().clone();
        let theta = [-0.6, -0.9, -0.4, -0.7, -0.5, -0.2];
        let ev = evaluate(&cm, &theta, 2).unwrap();
        for i in 0..theta.len() {
            let h = 1e-6;
            let mut up = theta;
            let mut dn = theta;
            up[i] += h;
            dn[i] -= h;
            let fd = (evaluate(&cm, &up, 2).unwrap().f - evaluate(&cm, &dn, 2).unwrap().f) / (2.0 * h);
            assert_abs_diff_eq!(ev.grad[i], fd, epsilon = 1e-7);
        }
    }

    #[test]
    fn identity_holds_and_objective_decreases() {
        let l = [vec![0.7, 0.2], vec![0.6, 0.3], vec![0.5, -0.4], vec![0.2, 0.6], vec![0.4, 0.5], vec![0.3, 0.1]];
        let c = implied_corr(&l);
        let m = efa_fit(&c, 2).unwrap();
        assert!(m.converged);
        for (u, h) in m.uniquenesses.iter().zip(m.communalities()) {
            assert_abs_diff_eq!(u + h, 1.0, epsilon = 1e-6);
        }
        assert!(m.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_abs_diff_eq!(m.objective, 0.0, epsilon = 1e-10);

        // refit on the fitted model's implied matrix
        let implied = SymmetricMatrix::symmetrize(&m.implied()).unwrap();
        let again = efa_fit(&CorrelationMatrix::new(c.labels().to_vec(), normalize(implied), 0).unwrap(), 2).unwrap();
        for j in 0..2 {
            let s = if (0..6).map(|i| again.loadings[(i, j)] * m.loadings[(i, j)]).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            for i in 0..6 {
                assert_abs_diff_eq!(s * again.loadings[(i, j)], m.loadings[(i, j)], epsilon = 1e-6);
            }
        }
    }

    fn normalize(m: SymmetricMatrix) -> SymmetricMatrix {
        let p = m.order();
        SymmetricMatrix::from_fn(p, |a, b| if a == b { 1.0 } else { m.get(a, b) }).unwrap()
    }

    #[test]
    fn heywood_case_sits_on_floor() {
        // first variable is almost fully explained by one factor
        let c = implied_corr(&[vec![0.999], vec![0.6], vec![0.5], vec![0.4]]);
        let m = efa_fit(&c, 1).unwrap();
        assert!(m.at_floor()[0]);
        assert!(m.uniquenesses.iter().all(|&u| (UNIQUENESS_FLOOR..=1.0).contains(&u)));
    }

    #[test]
    fn identification_bound() {
        let c = implied_corr(&[vec![0.8], vec![0.7], vec![0.6]]);
        assert!(efa_fit(&c, 1).is_ok());
        assert!(efa_fit(&c, 2).is_err());
        assert_eq!(model_dof(10, 4), 11.0);
    }

    #[test]
    fn rejects_non_pd() {
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 0.9, -0.9],
            vec![0.9, 1.0, 0.9],
            vec![-0.9, 0.9, 1.0],
        ])
        .unwrap();
        assert!(matches!(efa_fit(&c, 1), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn variance_table_is_cumulative() {
        let c = implied_corr(&[vec![0.7, 0.2], vec![0.6, 0.3], vec![0.5, -0.4], vec![0.2, 0.6], vec![0.4, 0.5], vec![0.3, 0.1]]);
        let m = efa_fit(&c, 2).unwrap();
        let t = variance_table(&m);
        assert_abs_diff_eq!(t[0].proportion, t[0].ss_loadings / 6.0, epsilon = 1e-15);
        assert!(t[1].cumulative >= t[0].cumulative && t[1].cumulative <= 1.0);
        assert!(t[0].ss_loadings >= t[1].ss_loadings);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn kaiser_ignores_variable_order(l in prop::collection::vec(-0.9f64..0.9, 5), rot in 0usize..5) {
                let rows: Vec<Vec<f64>> = l.iter().map(|&v| vec![v]).collect();
                let a = kaiser_count(&implied_corr(&rows)).unwrap();
                let mut r2 = rows.clone();
                r2.rotate_left(rot);
                r2.reverse();
                prop_assert_eq!(a, kaiser_count(&implied_corr(&r2)).unwrap());
            }
        }
    }
}
