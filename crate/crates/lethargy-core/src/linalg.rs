//! Dense matrices, vector helpers, and pivoted orthonormalization.
//!
//! Everything is plain `f64` on `Vec` storage. Matrices are row-major;
//! subspace bases store basis vectors as columns.

pub mod eigen;

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

/// Relative tolerance for rank decisions and span-containment checks,
/// measured against the largest column norm of the matrix involved.
pub const RANK_REL_TOL: f64 = 1e-10;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(v: &[f64], alpha: f64) -> Vec<f64> {
    v.iter().map(|x| alpha * x).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Dense row-major matrix.
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
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    /// Builds from row slices; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Builds from column slices (each column a vector of length `dim`).
    pub fn from_cols(dim: usize, cols: &[Vec<f64>]) -> Self {
        assert!(cols.iter().all(|col| col.len() == dim), "ragged columns");
        let mut m = Matrix::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        debug_assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `A^T v`
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "dimension mismatch in tr_matvec");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            axpy(v[i], self.row(i), &mut out);
        }
        out
    }

    pub fn scale(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| alpha * x).collect(),
        }
    }

    pub fn add_mat(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub_mat(&self, other: &Matrix) -> Matrix {
        self.add_mat(&other.scale(-1.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        all_finite(&self.data)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(1.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && self.get(i, j).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Largest Euclidean column norm, the scale reference for rank decisions.
    pub fn max_col_norm(&self) -> f64 {
        (0..self.cols).fold(0.0, |m: f64, j| m.max(norm2(&self.col(j))))
    }
}

/// Orthonormal basis of the column span, produced by modified Gram-Schmidt
/// with column pivoting and one re-orthogonalization pass.
#[derive(Debug, Clone)]
pub struct Orthonormal {
    /// `dim x rank`, orthonormal columns spanning the input's column space.
    pub q: Matrix,
    pub rank: usize,
    /// Residual column norm at which each accepted pivot entered the basis.
    pub pivot_norms: Vec<f64>,
}

/// Orthonormalizes the columns of `a`. Columns whose residual norm falls
/// below `rel_tol * max_col_norm(a)` are treated as dependent and dropped.
pub fn orthonormalize(a: &Matrix, rel_tol: f64) -> Orthonormal {
    let dim = a.rows();
    let threshold = rel_tol * a.max_col_norm();
    let mut work = a.columns();
    let mut q_cols: Vec<Vec<f64>> = Vec::new();
    let mut pivot_norms = Vec::new();
    let mut remaining: Vec<usize> = (0..work.len()).collect();

    while !remaining.is_empty() && q_cols.len() < dim {
        // pick the remaining column with the largest residual norm
        let (pos, &best) = remaining
            .iter()
            .enumerate()
            .max_by(|(_, &i), (_, &j)| {
                norm2(&work[i])
                    .partial_cmp(&norm2(&work[j]))
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap();
        let nrm = norm2(&work[best]);
        if nrm <= threshold {
            break;
        }
        remaining.remove(pos);
        let mut v = work[best].clone();
        // second orthogonalization pass for numerical hygiene
        for q in &q_cols {
            let c = dot(q, &v);
            axpy(-c, q, &mut v);
        }
        let nrm2_final = norm2(&v);
        if nrm2_final <= threshold {
            continue;
        }
        let unit = scaled(&v, 1.0 / nrm2_final);
        for &i in &remaining {
            let c = dot(&unit, &work[i]);
            let w = &mut work[i];
            axpy(-c, &unit, w);
        }
        pivot_norms.push(nrm);
        q_cols.push(unit);
    }

    Orthonormal {
        rank: q_cols.len(),
        q: Matrix::from_cols(dim, &q_cols),
        pivot_norms,
    }
}

/// Orthogonal projection of `v` onto the span of the orthonormal columns `q`.
pub fn project(q: &Matrix, v: &[f64]) -> Vec<f64> {
    let coeffs = q.tr_matvec(v);
    q.matvec(&coeffs)
}

/// Component of `v` orthogonal to the span of `q`.
pub fn reject(q: &Matrix, v: &[f64]) -> Vec<f64> {
    let mut r = v.to_vec();
    let p = project(q, v);
    for (ri, pi) in r.iter_mut().zip(&p) {
        *ri -= pi;
    }
    r
}

/// Whether `v` lies in the span of the orthonormal columns `q`, relative to
/// the scale `scale` (typically the largest column norm of the raw basis).
pub fn span_contains(q: &Matrix, v: &[f64], rel_tol: f64, scale: f64) -> bool {
    let r = reject(q, v);
    norm2(&r) <= rel_tol * scale.max(norm2(v)).max(1e-300)
}

/// Deterministically completes `q` (orthonormal columns) with `extra`
/// further orthonormal directions, preferring canonical axes and falling
/// back to the supplied candidate columns.
pub fn complete_basis(q: &Matrix, extra: usize, candidates: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = q.rows();
    let mut basis: Vec<Vec<f64>> = q.columns();
    let mut out = Vec::new();
    let mut pool: Vec<Vec<f64>> = candidates.to_vec();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        pool.push(e);
    }
    for cand in pool {
        if out.len() == extra {
            break;
        }
        let mut v = cand;
        for b in &basis {
            let c = dot(b, &v);
            axpy(-c, b, &mut v);
        }
        // repeat once
        for b in &basis {
            let c = dot(b, &v);
            axpy(-c, b, &mut v);
        }
        let n = norm2(&v);
        if n > 1e-8 {
            let unit = scaled(&v, 1.0 / n);
            basis.push(unit.clone());
            out.push(unit);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matmul_matvec_agree() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let v = vec![0.5, -1.0];
        let mv = a.matvec(&v);
        let m = a.matmul(&Matrix::from_cols(2, &[v.clone()]));
        for i in 0..3 {
            assert_abs_diff_eq!(mv[i], m.get(i, 0), epsilon = 1e-15);
        }
    }

    #[test]
    fn orthonormalize_full_rank() {
        let a = Matrix::from_cols(
            3,
            &[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]],
        );
        let basis = orthonormalize(&a, RANK_REL_TOL);
        assert_eq!(basis.rank, 2);
        let q = &basis.q;
        for j in 0..2 {
            assert_abs_diff_eq!(norm2(&q.col(j)), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(dot(&q.col(0), &q.col(1)), 0.0, epsilon = 1e-12);
        // span preserved
        for j in 0..2 {
            assert!(span_contains(q, &a.col(j), 1e-10, a.max_col_norm()));
        }
    }

    #[test]
    fn orthonormalize_detects_dependence() {
        // second column nearly equal to the first
        let a = Matrix::from_cols(
            3,
            &[vec![1.0, 0.0, 0.0], vec![1.0, 1e-14, 0.0]],
        );
        let basis = orthonormalize(&a, RANK_REL_TOL);
        assert_eq!(basis.rank, 1);
    }

    #[test]
    fn projection_residual_orthogonal() {
        let a = Matrix::from_cols(4, &[vec![1.0, 2.0, 0.0, -1.0], vec![0.0, 1.0, 1.0, 1.0]]);
        let basis = orthonormalize(&a, RANK_REL_TOL);
        let x = vec![1.0, -1.0, 2.0, 0.5];
        let r = reject(&basis.q, &x);
        for j in 0..basis.rank {
            assert_abs_diff_eq!(dot(&r, &basis.q.col(j)), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn complete_basis_extends_to_full_dimension() {
        let a = Matrix::from_cols(4, &[vec![1.0, 1.0, 1.0, 1.0]]);
        let basis = orthonormalize(&a, RANK_REL_TOL);
        let extra = complete_basis(&basis.q, 3, &[]);
        assert_eq!(extra.len(), 3);
        for v in &extra {
            assert_abs_diff_eq!(norm2(v), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(dot(v, &basis.q.col(0)), 0.0, epsilon = 1e-12);
        }
    }
}
