//! Dense two-phase primal simplex for small linear programs.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0` on a full tableau. Entering
//! columns follow Dantzig's rule with index tie-breaks and fall back to
//! Bland's rule after a fixed number of iterations, so runs are
//! deterministic and cycling is ruled out. The minimax and `l1` residual
//! programs built by the distance module stay in the low hundreds of rows,
//! where a dense tableau is the simplest reliable choice.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;

const MAX_ITERATIONS: usize = 50_000;
const BLAND_AFTER: usize = 5_000;

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => write!(f, "linear program is infeasible"),
            LpError::Unbounded => write!(f, "linear program is unbounded"),
            LpError::IterationLimit => write!(f, "simplex iteration limit reached"),
        }
    }
}

struct Tableau {
    /// (m+1) x (width+1); last row is the objective, last column the rhs.
    t: Vec<Vec<f64>>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
    tol: f64,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col];
        let inv = 1.0 / piv;
        for v in self.t[row].iter_mut() {
            *v *= inv;
        }
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let factor = self.t[i][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..=self.width {
                self.t[i][j] -= factor * self.t[row][j];
            }
            self.t[i][col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Entering column among `allowed` columns, or `None` at optimality.
    fn entering(&self, allowed: usize, bland: bool) -> Option<usize> {
        let obj = &self.t[self.m];
        if bland {
            (0..allowed).find(|&j| obj[j] < -self.tol)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for (j, &rc) in obj.iter().enumerate().take(allowed) {
                if rc < -self.tol && best.map_or(true, |(_, b)| rc < b) {
                    best = Some((j, rc));
                }
            }
            best.map(|(j, _)| j)
        }
    }

    /// Leaving row by the minimum-ratio test; ties break toward the basic
    /// variable with the smallest index (Bland-compatible).
    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.t[i][col];
            if a > self.tol {
                let ratio = self.rhs(i) / a;
                match best {
                    None => best = Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12
                            || ((ratio - br).abs() <= 1e-12 && self.basis[i] < self.basis[bi])
                        {
                            best = Some((i, ratio));
                        }
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn run(&mut self, allowed: usize, iterations: &mut usize) -> Result<(), LpError> {
        loop {
            if *iterations >= MAX_ITERATIONS {
                return Err(LpError::IterationLimit);
            }
            let bland = *iterations >= BLAND_AFTER;
            let Some(col) = self.entering(allowed, bland) else {
                return Ok(());
            };
            let Some(row) = self.leaving(col) else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
            *iterations += 1;
        }
    }
}

/// Solves `min c.x  s.t.  A x = b, x >= 0`.
pub fn solve_standard_form(a: &Matrix, b: &[f64], c: &[f64]) -> Result<LpSolution, LpError> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(c.len(), n);

    let scale = a.max_abs().max(1.0);
    let tol = 1e-11 * scale;

    // width = structural columns + artificials
    let width = n + m;
    let mut t = vec![vec![0.0; width + 1]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a.get(i, j);
        }
        t[i][n + i] = 1.0;
        t[i][width] = flip * b[i];
    }
    // phase-1 objective: minimize the sum of artificials; in canonical form
    // the reduced-cost row is minus the sum of the constraint rows.
    for j in 0..=width {
        let mut s = 0.0;
        for row in t.iter().take(m) {
            s += row[j];
        }
        t[m][j] = -s;
    }
    for i in 0..m {
        t[m][n + i] = 0.0;
    }

    let mut tab = Tableau {
        t,
        m,
        width,
        basis: (n..n + m).collect(),
        tol,
    };
    let mut iterations = 0;

    tab.run(n, &mut iterations)?;
    let phase1 = -tab.t[m][width];
    if phase1 > 1e-7 * scale.max(1.0) {
        return Err(LpError::Infeasible);
    }

    // pivot basic artificials out where possible; redundant rows keep a
    // zero-valued artificial that is simply never allowed to re-enter
    for i in 0..m {
        if tab.basis[i] >= n && tab.rhs(i).abs() <= tol {
            if let Some(j) = (0..n).find(|&j| tab.t[i][j].abs() > tol) {
                tab.pivot(i, j);
                iterations += 1;
            }
        }
    }

    // install the phase-2 objective and eliminate basic columns
    for j in 0..n {
        tab.t[m][j] = c[j];
    }
    for j in n..=width {
        tab.t[m][j] = 0.0;
    }
    for i in 0..m {
        let vb = tab.basis[i];
        if vb < n {
            let factor = tab.t[m][vb];
            if factor != 0.0 {
                for j in 0..=width {
                    let delta = factor * tab.t[i][j];
                    tab.t[m][j] -= delta;
                }
                tab.t[m][vb] = 0.0;
            }
        }
    }

    tab.run(n, &mut iterations)?;

    let mut x = vec![0.0; n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solves_textbook_lp() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  (slacks appended)
        // -> min -3x - 5y; optimum (2, 6), value -36
        let a = Matrix::from_rows(&[
            vec![1.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 1.0, 0.0],
            vec![3.0, 2.0, 0.0, 0.0, 1.0],
        ]);
        let b = vec![4.0, 12.0, 18.0];
        let c = vec![-3.0, -5.0, 0.0, 0.0, 0.0];
        let sol = solve_standard_form(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(sol.objective, -36.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.x[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.x[1], 6.0, epsilon = 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        // x = -1, x >= 0
        let a = Matrix::from_rows(&[vec![1.0]]);
        let b = vec![-1.0];
        let c = vec![1.0];
        let err = solve_standard_form(&a, &b, &c).unwrap_err();
        assert_eq!(err, LpError::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        // min -x s.t. x - y = 1, x,y >= 0  (x can grow with y)
        let a = Matrix::from_rows(&[vec![1.0, -1.0]]);
        let b = vec![1.0];
        let c = vec![-1.0, 0.0];
        let err = solve_standard_form(&a, &b, &c).unwrap_err();
        assert_eq!(err, LpError::Unbounded);
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // -x = -3  ->  x = 3
        let a = Matrix::from_rows(&[vec![-1.0]]);
        let b = vec![-3.0];
        let c = vec![1.0];
        let sol = solve_standard_form(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(sol.x[0], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn handles_redundant_rows() {
        // duplicated constraint
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let b = vec![2.0, 2.0];
        let c = vec![1.0, 0.0];
        let sol = solve_standard_form(&a, &b, &c).unwrap();
        assert_abs_diff_eq!(sol.objective, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.x[1], 2.0, epsilon = 1e-10);
    }
}
