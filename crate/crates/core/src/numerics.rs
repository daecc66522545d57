//! Dense small-matrix kernels: rank, null space, linear solves and
//! hyperplane projection.
//!
//! Everything here works on row-major `f64` storage and is sized for the
//! problems this crate deals with (a few dozen rows at most). Rank and null
//! space both come from one Householder QR with column pivoting applied to
//! the transpose, so rank–nullity holds exactly for every tolerance.

use crate::{Error, Result};

/// Default relative tolerance for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Pivots below this fraction of the largest entry make a system singular.
const SINGULAR_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Stacks equally sized rows. An empty slice gives a 0x0 matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Matrix::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
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

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        norm(&self.data)
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
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

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += s * x`
pub fn axpy(s: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Householder QR with column pivoting: `A P = Q R`.
struct PivotedQr {
    q: Matrix,
    /// Magnitudes of the diagonal of R, non-increasing up to rounding.
    diag: Vec<f64>,
}

impl PivotedQr {
    fn new(a: &Matrix) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut r = a.clone();
        let mut q = Matrix::identity(m);
        let steps = m.min(n);
        let mut diag = Vec::with_capacity(steps);
        for k in 0..steps {
            // Pivot on the largest remaining column; first index wins ties.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let s: f64 = (k..m).map(|i| r[(i, j)] * r[(i, j)]).sum();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    r.data.swap(i * n + k, i * n + best);
                }
            }
            let col_norm = best_norm.sqrt();
            diag.push(col_norm);
            if col_norm == 0.0 {
                continue;
            }
            let alpha = if r[(k, k)] >= 0.0 { -col_norm } else { col_norm };
            let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] -= alpha;
            let vv = dot(&v, &v);
            if vv == 0.0 {
                continue;
            }
            for j in k..n {
                let s: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() * 2.0 / vv;
                for i in k..m {
                    r[(i, j)] -= s * v[i - k];
                }
            }
            for i in 0..m {
                let s: f64 = (k..m).map(|l| q[(i, l)] * v[l - k]).sum::<f64>() * 2.0 / vv;
                for l in k..m {
                    q[(i, l)] -= s * v[l - k];
                }
            }
        }
        PivotedQr { q, diag }
    }

    fn rank(&self, tol: f64) -> usize {
        let Some(&lead) = self.diag.first() else {
            return 0;
        };
        if lead == 0.0 {
            return 0;
        }
        self.diag.iter().take_while(|&&d| d > tol * lead).count()
    }
}

/// Numerical rank: pivots of a column-pivoted QR exceeding `tol` times the
/// largest pivot.
pub fn rank(m: &Matrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    PivotedQr::new(&m.transpose()).rank(tol)
}

/// Orthonormal basis of the null space of `m`, with `cols - rank(m, tol)`
/// vectors.
pub fn null_space(m: &Matrix, tol: f64) -> Vec<Vec<f64>> {
    if m.cols == 0 {
        return Vec::new();
    }
    if m.rows == 0 {
        return (0..m.cols)
            .map(|j| {
                let mut e = vec![0.0; m.cols];
                e[j] = 1.0;
                e
            })
            .collect();
    }
    // Range of the Q factor of M^T beyond the rank is the orthogonal
    // complement of the row space.
    let qr = PivotedQr::new(&m.transpose());
    let r = qr.rank(tol);
    (r..m.cols).map(|j| qr.q.column(j)).collect()
}

/// Orthogonal projection of `x` onto the hyperplane `w·p + b = 0`.
pub fn project_onto_hyperplane(x: &[f64], w: &[f64], b: f64) -> Result<Vec<f64>> {
    let ww = dot(w, w);
    if ww == 0.0 || !ww.is_finite() {
        return Err(Error::DegenerateHyperplane);
    }
    if x.len() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "point of dim {} against normal of dim {}",
            x.len(),
            w.len()
        )));
    }
    let s = (dot(w, x) + b) / ww;
    Ok(x.iter().zip(w).map(|(xi, wi)| xi - s * wi).collect())
}

/// Solves `A x = rhs` by LU with partial pivoting.
pub fn solve_linear(a: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows;
    if a.cols != n || rhs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cannot solve {}x{} system with rhs of length {}",
            a.rows,
            a.cols,
            rhs.len()
        )));
    }
    let scale = a.max_abs();
    if n > 0 && scale == 0.0 {
        return Err(Error::SingularSystem);
    }
    let mut lu = a.clone();
    let mut x = rhs.to_vec();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if lu[(i, k)].abs() > lu[(p, k)].abs() {
                p = i;
            }
        }
        if lu[(p, k)].abs() <= SINGULAR_TOL * scale {
            return Err(Error::SingularSystem);
        }
        if p != k {
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                lu[(i, j)] -= f * lu[(k, j)];
            }
            x[i] -= f * x[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| lu[(k, j)] * x[j]).sum();
        x[k] = (x[k] - s) / lu[(k, k)];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(x)
}
