//! Singular values and eigenvalues for small dense matrices.
//!
//! The SVD is a one-sided Jacobi on columns, the symmetric eigensolver a
//! cyclic two-sided Jacobi, and the general eigensolver a Hessenberg
//! reduction followed by the Francis double-shift QR iteration
//! (eigenvalues only). All three are accurate and fast at the matrix
//! sizes this crate works with.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use super::{dot, norm2, Matrix};

const JACOBI_EPS: f64 = 1e-14;
const MAX_SWEEPS: usize = 64;

/// Thin SVD `A = U diag(sigma) V^T` with `sigma` non-increasing.
///
/// `u` is `rows x cols`, `v` is `cols x cols`. Columns of `u` paired with a
/// zero singular value are left as zero vectors; they never contribute to
/// reconstructions or truncations.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(a: &Matrix) -> Svd {
    let rows = a.rows();
    let cols = a.cols();
    let mut w = a.columns();
    let mut v = Matrix::identity(cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let app = dot(&w[p], &w[p]);
                let aqq = dot(&w[q], &w[q]);
                let apq = dot(&w[p], &w[q]);
                if apq.abs() <= JACOBI_EPS * (app * aqq).sqrt() || app * aqq == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let wp = w[p][i];
                    let wq = w[q][i];
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for i in 0..cols {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = w.iter().map(|col| norm2(col)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(core::cmp::Ordering::Equal));

    let mut u = Matrix::zeros(rows, cols);
    let mut v_sorted = Matrix::zeros(cols, cols);
    let mut sigma = vec![0.0; cols];
    let scale = norms.iter().fold(0.0_f64, |m, &x| m.max(x));
    for (k, &j) in order.iter().enumerate() {
        sigma[k] = norms[j];
        if norms[j] > JACOBI_EPS * scale.max(1e-300) {
            for i in 0..rows {
                u.set(i, k, w[j][i] / norms[j]);
            }
        } else {
            sigma[k] = 0.0;
        }
        for i in 0..cols {
            v_sorted.set(i, k, v.get(i, j));
        }
    }

    Svd { u, sigma, v: v_sorted }
}

/// Singular values only, non-increasing, length `min(rows, cols)`.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let k = a.rows().min(a.cols());
    let mut s = svd(a).sigma;
    s.truncate(k);
    s
}

/// Eigendecomposition of a symmetric matrix, eigenpairs ordered by
/// non-increasing `|lambda|` (ties broken toward the larger signed value).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

pub fn sym_eigen(a: &Matrix) -> SymEigen {
    assert!(a.is_square(), "sym_eigen requires a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius().max(1e-300);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        if off.sqrt() <= JACOBI_EPS * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= JACOBI_EPS * scale * 1e-2 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (ai, aj) = (m.get(i, i).abs(), m.get(j, j).abs());
        aj.partial_cmp(&ai)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| {
                m.get(j, j)
                    .partial_cmp(&m.get(i, i))
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
    });
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, k, v.get(i, j));
        }
    }
    SymEigen { values, vectors }
}

/// Failure of the QR iteration to deflate within its sweep budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonConvergence;

impl fmt::Display for NonConvergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eigenvalue iteration did not converge")
    }
}

/// All eigenvalues of a real square matrix as `(re, im)` pairs, ordered by
/// non-increasing modulus, counted with multiplicity.
pub fn general_eigenvalues(a: &Matrix) -> Result<Vec<(f64, f64)>, NonConvergence> {
    assert!(a.is_square(), "eigenvalues require a square matrix");
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.is_symmetric(1e-12) {
        let eig = sym_eigen(a);
        return Ok(eig.values.iter().map(|&l| (l, 0.0)).collect());
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    let mut eig = hqr(&mut h)?;
    eig.sort_by(|x, y| {
        let (mx, my) = (x.0.hypot(x.1), y.0.hypot(y.1));
        my.partial_cmp(&mx)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| y.0.partial_cmp(&x.0).unwrap_or(core::cmp::Ordering::Equal))
            .then_with(|| y.1.partial_cmp(&x.1).unwrap_or(core::cmp::Ordering::Equal))
    });
    Ok(eig)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(h: &mut Matrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut x = vec![0.0; n - k - 1];
        for i in (k + 1)..n {
            x[i - k - 1] = h.get(i, k);
        }
        let alpha = norm2(&x);
        if alpha == 0.0 {
            continue;
        }
        let mut v = x.clone();
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vn = norm2(&v);
        if vn == 0.0 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vn;
        }
        // H <- P H P with P = I - 2 v v^T acting on rows/cols k+1..n
        for j in 0..n {
            let mut s = 0.0;
            for i in (k + 1)..n {
                s += v[i - k - 1] * h.get(i, j);
            }
            s *= 2.0;
            for i in (k + 1)..n {
                let old = h.get(i, j);
                h.set(i, j, old - s * v[i - k - 1]);
            }
        }
        for i in 0..n {
            let mut s = 0.0;
            for j in (k + 1)..n {
                s += h.get(i, j) * v[j - k - 1];
            }
            s *= 2.0;
            for j in (k + 1)..n {
                let old = h.get(i, j);
                h.set(i, j, old - s * v[j - k - 1]);
            }
        }
        for i in (k + 2)..n {
            h.set(i, k, 0.0);
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn hqr(h: &mut Matrix) -> Result<Vec<(f64, f64)>, NonConvergence> {
    let n = h.rows();
    let mut eig: Vec<(f64, f64)> = Vec::with_capacity(n);
    let eps = f64::EPSILON;
    let mut anorm = 0.0_f64;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h.get(i, j).abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![(0.0, 0.0); n]);
    }

    let mut en = n as isize - 1;
    let mut t = 0.0_f64;
    let mut itn = 40 * n as isize;

    while en >= 0 {
        let mut its = 0;
        loop {
            // search for a negligible subdiagonal element
            let mut l = en;
            while l > 0 {
                let s = h.get((l - 1) as usize, (l - 1) as usize).abs()
                    + h.get(l as usize, l as usize).abs();
                let s = if s == 0.0 { anorm } else { s };
                if h.get(l as usize, (l - 1) as usize).abs() <= eps * s {
                    break;
                }
                l -= 1;
            }

            let x = h.get(en as usize, en as usize);
            if l == en {
                eig.push((x + t, 0.0));
                en -= 1;
                break;
            }
            let y = h.get((en - 1) as usize, (en - 1) as usize);
            let w = h.get(en as usize, (en - 1) as usize) * h.get((en - 1) as usize, en as usize);
            if l == en - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let zz = q.abs().sqrt();
                let x_sh = x + t;
                if q >= 0.0 {
                    let zz = p + zz.copysign(p);
                    let r1 = x_sh + zz;
                    let r2 = if zz != 0.0 { x_sh - w / zz } else { r1 };
                    eig.push((r1, 0.0));
                    eig.push((r2, 0.0));
                } else {
                    eig.push((x_sh + p, zz));
                    eig.push((x_sh + p, -zz));
                }
                en -= 2;
                break;
            }

            if itn <= 0 {
                return Err(NonConvergence);
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += x;
                for i in 0..=en as usize {
                    let d = h.get(i, i);
                    h.set(i, i, d - x);
                }
                let s = h.get(en as usize, (en - 1) as usize).abs()
                    + h.get((en - 1) as usize, (en - 2) as usize).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            itn -= 1;

            // find two consecutive small subdiagonals
            let mut m = en - 2;
            let (mut p, mut q, mut r);
            loop {
                let zz = h.get(m as usize, m as usize);
                let rr = x - zz;
                let ss = y - zz;
                p = (rr * ss - w) / h.get((m + 1) as usize, m as usize)
                    + h.get(m as usize, (m + 1) as usize);
                q = h.get((m + 1) as usize, (m + 1) as usize) - zz - rr - ss;
                r = h.get((m + 2) as usize, (m + 1) as usize);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h.get(m as usize, (m - 1) as usize).abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (h.get((m - 1) as usize, (m - 1) as usize).abs()
                        + zz.abs()
                        + h.get((m + 1) as usize, (m + 1) as usize).abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=en {
                h.set(i as usize, (i - 2) as usize, 0.0);
            }
            for i in (m + 3)..=en {
                h.set(i as usize, (i - 3) as usize, 0.0);
            }

            // double QR step over rows l..en
            for k in m..en {
                let notlast = k != en - 1;
                if k != m {
                    p = h.get(k as usize, (k - 1) as usize);
                    q = h.get((k + 1) as usize, (k - 1) as usize);
                    r = if notlast {
                        h.get((k + 2) as usize, (k - 1) as usize)
                    } else {
                        0.0
                    };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if k != m {
                    h.set(k as usize, (k - 1) as usize, -s * x);
                } else if l != m {
                    let v = h.get(k as usize, (k - 1) as usize);
                    h.set(k as usize, (k - 1) as usize, -v);
                }
                p += s;
                x = p / s;
                y = q / s;
                let zz = r / s;
                q /= p;
                r /= p;

                // row modification
                for j in k as usize..n {
                    let mut pp = h.get(k as usize, j) + q * h.get(k as usize + 1, j);
                    if notlast {
                        pp += r * h.get(k as usize + 2, j);
                        let old = h.get(k as usize + 2, j);
                        h.set(k as usize + 2, j, old - pp * zz);
                    }
                    let old1 = h.get(k as usize + 1, j);
                    h.set(k as usize + 1, j, old1 - pp * y);
                    let old0 = h.get(k as usize, j);
                    h.set(k as usize, j, old0 - pp * x);
                }
                // column modification
                let imax = if en < k + 3 { en } else { k + 3 };
                for i in 0..=imax as usize {
                    let mut pp = x * h.get(i, k as usize) + y * h.get(i, k as usize + 1);
                    if notlast {
                        pp += zz * h.get(i, k as usize + 2);
                        let old = h.get(i, k as usize + 2);
                        h.set(i, k as usize + 2, old - pp * r);
                    }
                    let old1 = h.get(i, k as usize + 1);
                    h.set(i, k as usize + 1, old1 - pp * q);
                    let old0 = h.get(i, k as usize);
                    h.set(i, k as usize, old0 - pp);
                }
            }
        }
    }
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reconstruct(svd: &Svd) -> Matrix {
        let k = svd.sigma.len();
        let mut us = svd.u.clone();
        for j in 0..k {
            for i in 0..us.rows() {
                let v = us.get(i, j) * svd.sigma[j];
                us.set(i, j, v);
            }
        }
        us.matmul(&svd.v.transpose())
    }

    #[test]
    fn svd_diagonal() {
        let a = Matrix::diagonal(&[3.0, 2.0, 1.0]);
        let s = svd(&a);
        assert_abs_diff_eq!(s.sigma[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sigma[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sigma[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn svd_reconstructs() {
        let a = Matrix::from_rows(&[
            vec![1.0, -2.0, 0.5],
            vec![0.0, 3.0, 1.0],
            vec![2.0, 1.0, -1.0],
            vec![0.5, 0.5, 0.5],
        ]);
        let s = svd(&a);
        let b = reconstruct(&s);
        assert!(a.sub_mat(&b).max_abs() < 1e-10);
        for j in 0..3 {
            for i in 0..3 {
                let g = dot(&s.v.col(i), &s.v.col(j));
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(g, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn svd_rank_deficient() {
        // rank 1
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let s = svd(&a);
        assert!(s.sigma[1] < 1e-12);
        assert_abs_diff_eq!(s.sigma[0], (1.0_f64 + 4.0 + 4.0 + 16.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn sym_eigen_recovers_spectrum() {
        // Q diag(5, -3, 1) Q^T for a known rotation
        let d = Matrix::diagonal(&[5.0, -3.0, 1.0]);
        let c = (0.3_f64).cos();
        let s = (0.3_f64).sin();
        let q = Matrix::from_rows(&[
            vec![c, -s, 0.0],
            vec![s, c, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        let a = q.matmul(&d).matmul(&q.transpose());
        let eig = sym_eigen(&a);
        assert_abs_diff_eq!(eig.values[0], 5.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.values[1], -3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.values[2], 1.0, epsilon = 1e-10);
        // residual A v = lambda v
        for k in 0..3 {
            let v = eig.vectors.col(k);
            let av = a.matvec(&v);
            for i in 0..3 {
                assert_abs_diff_eq!(av[i], eig.values[k] * v[i], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn general_eigen_triangular() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 1.0]]);
        let eig = general_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(eig[0].0, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig[1].0, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn general_eigen_nilpotent() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let eig = general_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(eig[0].0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1].0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn general_eigen_rotation_complex_pair() {
        let a = Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]);
        let eig = general_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(eig[0].0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[0].1.abs(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1].1.abs(), 1.0, epsilon = 1e-12);
        assert!((eig[0].1 + eig[1].1).abs() < 1e-12);
    }

    #[test]
    fn general_eigen_companion_cubic() {
        // companion of x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = Matrix::from_rows(&[
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let eig = general_eigenvalues(&a).unwrap();
        let mut re: Vec<f64> = eig.iter().map(|e| e.0).collect();
        re.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_abs_diff_eq!(re[0], 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(re[1], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(re[2], 1.0, epsilon = 1e-9);
        for e in &eig {
            assert!(e.1.abs() < 1e-9);
        }
    }

    #[test]
    fn general_eigen_matches_jacobi_on_symmetric() {
        let a = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.3, 0.0],
            vec![-1.0, 1.5, 0.2, 0.1],
            vec![0.3, 0.2, -0.7, 0.4],
            vec![0.0, 0.1, 0.4, 0.9],
        ]);
        let ge = general_eigenvalues(&a).unwrap();
        let je = sym_eigen(&a);
        for k in 0..4 {
            assert_abs_diff_eq!(ge[k].0, je.values[k], epsilon = 1e-9);
            assert!(ge[k].1.abs() < 1e-12);
        }
    }
}
