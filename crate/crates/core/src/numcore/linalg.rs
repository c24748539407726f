//! Small dense linear algebra: a row-major matrix, a symmetric matrix with
//! exact-symmetry invariant, cyclic Jacobi eigendecomposition and Cholesky
//! based SPD solves.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Off-diagonal Frobenius norm tolerance (relative) for Jacobi sweeps.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, actual: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let cols = columns.len();
        let mut m = Matrix::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::LengthMismatch { expected: rows, actual: c.len() });
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// First `n` rows.
    pub fn head(&self, n: usize) -> Matrix {
        let n = n.min(self.rows);
        Matrix { rows: n, cols: self.cols, data: self.data[..n * self.cols].to_vec() }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix { rows: idx.len(), cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch { expected: self.cols, actual: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, actual: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Column means.
    pub fn column_means(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, v) in m.iter_mut().zip(self.row(i)) {
                *acc += v;
            }
        }
        let n = self.rows.max(1) as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Unbiased sample covariance of the columns.
    pub fn covariance(&self) -> Result<SymmetricMatrix> {
        if self.rows < 2 {
            return Err(Error::EmptySample(format!("covariance needs >= 2 rows, got {}", self.rows)));
        }
        let means = self.column_means();
        let p = self.cols;
        let mut c = vec![0.0; p * p];
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..p {
                let da = r[a] - means[a];
                for b in a..p {
                    c[a * p + b] += da * (r[b] - means[b]);
                }
            }
        }
        let d = (self.rows - 1) as f64;
        for a in 0..p {
            for b in a..p {
                let v = c[a * p + b] / d;
                c[a * p + b] = v;
                c[b * p + a] = v;
            }
        }
        SymmetricMatrix::from_vec(p, c)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix whose entries satisfy `m[i][j] == m[j][i]` bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Matrix", into = "Matrix")]
pub struct SymmetricMatrix {
    inner: Matrix,
}

impl SymmetricMatrix {
    /// Builds from a full row-major square; rejects any asymmetry.
    pub fn from_vec(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("symmetric matrix order must be >= 1".into()));
        }
        let inner = Matrix::from_vec(order, order, data)?;
        Self::try_from(inner)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::try_from(Matrix::from_rows(rows)?)
    }

    /// Builds from the upper triangle produced by `f(i, j)` for `i <= j`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("symmetric matrix order must be >= 1".into()));
        }
        let mut m = Matrix::zeros(order, order);
        for i in 0..order {
            for j in i..order {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(SymmetricMatrix { inner: m })
    }

    /// Averages `m` with its transpose.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::LengthMismatch { expected: m.rows(), actual: m.cols() });
        }
        Self::from_fn(m.rows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    pub fn identity(order: usize) -> Self {
        SymmetricMatrix { inner: Matrix::identity(order) }
    }

    pub fn diagonal(d: &[f64]) -> Result<Self> {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.inner.rows
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn is_finite(&self) -> bool {
        self.inner.data.iter().all(|v| v.is_finite())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.inner.to_rows()
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, idx: &[usize]) -> Result<Self> {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }

    /// `D A D` with `D = diag(d)`.
    pub fn scale_both(&self, d: &[f64]) -> Result<Self> {
        Self::from_fn(self.order(), |i, j| d[i] * self.get(i, j) * d[j])
    }
}

impl TryFrom<Matrix> for SymmetricMatrix {
    type Error = Error;
    fn try_from(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::LengthMismatch { expected: m.rows(), actual: m.cols() });
        }
        if m.rows() == 0 {
            return Err(Error::InvalidParameter("symmetric matrix order must be >= 1".into()));
        }
        for i in 0..m.rows() {
            for j in (i + 1)..m.cols() {
                let (a, b) = (m[(i, j)], m[(j, i)]);
                if a != b && !(a.is_nan() && b.is_nan()) {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix { inner: m })
    }
}

impl From<SymmetricMatrix> for Matrix {
    fn from(s: SymmetricMatrix) -> Matrix {
        s.inner
    }
}

/// Eigenvalues in descending order and the matching orthonormal
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub sweeps: usize,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn eigen_symmetric(m: &SymmetricMatrix) -> Result<Eigen> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigen_symmetric: matrix has non-finite entries".into()));
    }
    let n = m.order();
    let mut a = m.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let total: f64 = a.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut sweeps = 0;

    let off = |a: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[(i, j)] * a[(i, j)];
            }
        }
        s.sqrt()
    };

    while sweeps < JACOBI_MAX_SWEEPS && total > 0.0 && off(&a) > JACOBI_TOL * total {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, new)] = v[(k, old)];
        }
    }
    Ok(Eigen { values, vectors, sweeps })
}

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = m`.
pub fn cholesky(m: &SymmetricMatrix) -> Result<Matrix> {
    let n = m.order();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite(format!("pivot {j} is {d:e}")));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &Matrix, rhs: &[f64]) -> Vec<f64> {
    let n = l.rows();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Solves `m x = rhs` for symmetric positive-definite `m`.
pub fn solve_spd(m: &SymmetricMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != m.order() {
        return Err(Error::LengthMismatch { expected: m.order(), actual: rhs.len() });
    }
    let l = cholesky(m)?;
    Ok(cholesky_solve(&l, rhs))
}

/// Inverse of an SPD matrix.
pub fn inverse_spd(m: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let n = m.order();
    let l = cholesky(m)?;
    let mut inv = Matrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = cholesky_solve(&l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    SymmetricMatrix::symmetrize(&inv)
}

/// log-determinant of an SPD matrix.
pub fn log_det_spd(m: &SymmetricMatrix) -> Result<f64> {
    let l = cholesky(m)?;
    Ok((0..m.order()).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

/// Factor `F` (n×n, possibly with trailing zero columns) such that
/// `F Fᵀ = m` for a positive-semidefinite `m`.
///
/// Plain Cholesky is tried first; if a pivot vanishes the matrix is
/// refactored with diagonal pivoting, stopping once every remaining pivot is
/// below `1e-12 · max diag`. A remaining pivot below `-1e-10 · max diag`
/// marks the matrix as indefinite.
pub fn psd_factor(m: &SymmetricMatrix) -> Result<Matrix> {
    if !m.is_finite() {
        return Err(Error::NonFinite("psd_factor: non-finite entries".into()));
    }
    if let Ok(l) = cholesky(m) {
        return Ok(l);
    }
    let n = m.order();
    let scale = m.diag().iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut a = m.as_matrix().clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = Matrix::zeros(n, n);
    let mut rank = 0;
    for k in 0..n {
        // pivot: largest remaining diagonal
        let (piv, &dmax) = (k..n)
            .map(|i| (i, &a[(perm[i], perm[i])]))
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("non-empty range");
        if dmax <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            let worst = (k..n).map(|i| a[(perm[i], perm[i])]).fold(f64::INFINITY, f64::min);
            if worst < -1e-10 * scale {
                return Err(Error::NotPositiveSemidefinite(format!("residual pivot {worst:e}")));
            }
            break;
        }
        perm.swap(k, piv);
        let pk = perm[k];
        let d = dmax.sqrt();
        l[(pk, k)] = d;
        for &pi in &perm[(k + 1)..] {
            l[(pi, k)] = a[(pi, pk)] / d;
        }
        for i in (k + 1)..n {
            let pi = perm[i];
            for j in (k + 1)..n {
                let pj = perm[j];
                a[(pi, pj)] -= l[(pi, k)] * l[(pj, k)];
            }
        }
        rank += 1;
    }
    // verify reconstruction: catches indefinite matrices whose negative part
    // never surfaced as a pivot
    let mut err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..rank).map(|k| l[(i, k)] * l[(j, k)]).sum();
            err = err.max((s - m.get(i, j)).abs());
        }
    }
    if err > 1e-8 * scale.max(1.0) {
        return Err(Error::NotPositiveSemidefinite(format!("reconstruction error {err:e}")));
    }
    Ok(l)
}
