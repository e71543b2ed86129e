//! Best-approximation distances `rho(x, Y) = inf { ||x - y|| : y in Y }`.
//!
//! Route per norm family:
//! - `l2`: orthogonal projection, exact.
//! - `l1`, `l_inf`, grid sup: an exact linear program (simplex), chosen over
//!   subgradient descent for determinism and a checkable certificate.
//! - `l^p`, `1 < p < inf`, `p != 2`: convex descent to a gradient tolerance.
//! - product F-norm over a coordinate-aligned span: closed form.
//! - transform F-norm `t/(1+t)`: closed form over the base distance, since
//!   the transform is increasing.
//! - product F-norm over a general span: seeded multi-start descent; the
//!   objective is not convex, so the result is flagged as an upper bound.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::linalg::{self, norm2, orthonormalize, Matrix, Orthonormal, RANK_REL_TOL};
use crate::norms::{NormError, NormSpec};
use crate::rng::{self, rng_from_seed};
use crate::simplex::{self, LpError};
use crate::spaces::SubspaceChain;

/// Solver knobs shared by the iterative distance paths.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub seed: u64,
    /// Multi-start count for the non-convex F-norm path.
    pub restarts: usize,
    pub max_iterations: usize,
    /// Convergence at gradient norm `grad_tol * (1 + ||x||)`.
    pub grad_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            restarts: 8,
            max_iterations: 10_000,
            grad_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMethod {
    Projection,
    LinearProgram,
    Descent,
    CoordinateClosedForm,
    TransformClosedForm,
    MultiStartDescent,
}

impl DistanceMethod {
    pub fn label(&self) -> &'static str {
        match self {
            DistanceMethod::Projection => "projection",
            DistanceMethod::LinearProgram => "lp_simplex",
            DistanceMethod::Descent => "descent",
            DistanceMethod::CoordinateClosedForm => "coordinate_closed_form",
            DistanceMethod::TransformClosedForm => "transform_closed_form",
            DistanceMethod::MultiStartDescent => "multistart_descent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QualityFlag {
    /// The reported value is an upper bound on the infimum.
    UpperBound,
    /// The iteration budget ran out before the gradient tolerance was met.
    Unconverged,
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub method: DistanceMethod,
    /// Optimality residual: orthogonality defect, LP consistency gap, or
    /// final gradient norm, depending on the method.
    pub residual: f64,
    pub iterations: usize,
    pub restarts_used: usize,
    pub flag: Option<QualityFlag>,
}

#[derive(Debug, Clone)]
pub struct DistanceResult {
    pub value: f64,
    /// A point of the subspace attaining (or approaching) the infimum.
    pub minimizer: Vec<f64>,
    pub certificate: Certificate,
    pub is_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DistanceError {
    DimensionMismatch { expected: usize, got: usize },
    InvalidNorm(NormError),
    OracleRankTooLarge { rank: usize, max: usize },
    Lp(LpError),
    NotMonotone { level: usize },
}

impl fmt::Display for DistanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceError::DimensionMismatch { expected, got } => {
                write!(f, "vector has dimension {got}, subspace lives in dimension {expected}")
            }
            DistanceError::InvalidNorm(e) => write!(f, "invalid norm: {e}"),
            DistanceError::OracleRankTooLarge { rank, max } => {
                write!(f, "oracle supports rank <= {max}, got {rank}")
            }
            DistanceError::Lp(e) => write!(f, "distance LP failed: {e}"),
            DistanceError::NotMonotone { level } => {
                write!(f, "exact distance profile increased at level {level}")
            }
        }
    }
}

impl From<NormError> for DistanceError {
    fn from(e: NormError) -> Self {
        DistanceError::InvalidNorm(e)
    }
}

impl From<LpError> for DistanceError {
    fn from(e: LpError) -> Self {
        DistanceError::Lp(e)
    }
}

/// Distance from `x` to the column span of `basis` in the given norm.
pub fn distance(
    x: &[f64],
    basis: &Matrix,
    norm: &NormSpec,
    cfg: &SolverConfig,
) -> Result<DistanceResult, DistanceError> {
    if basis.rows() != x.len() {
        return Err(DistanceError::DimensionMismatch {
            expected: basis.rows(),
            got: x.len(),
        });
    }
    norm.validate(x.len())?;
    let ortho = orthonormalize(basis, RANK_REL_TOL);
    distance_on_orthonormal(x, &ortho, norm, cfg)
}

/// Same as [`distance`] but reuses an already-orthonormalized basis.
pub fn distance_on_orthonormal(
    x: &[f64],
    ortho: &Orthonormal,
    norm: &NormSpec,
    cfg: &SolverConfig,
) -> Result<DistanceResult, DistanceError> {
    let q = &ortho.q;
    if ortho.rank == 0 {
        return Ok(DistanceResult {
            value: norm.eval(x),
            minimizer: vec![0.0; x.len()],
            certificate: Certificate {
                method: DistanceMethod::Projection,
                residual: 0.0,
                iterations: 0,
                restarts_used: 0,
                flag: None,
            },
            is_exact: true,
        });
    }
    match norm {
        NormSpec::Lp(p) if *p == 2.0 => Ok(l2_distance(x, q)),
        NormSpec::Lp(p) if *p == 1.0 => lp_l1_distance(x, q),
        NormSpec::Lp(p) if p.is_infinite() => lp_sup_distance(x, q),
        NormSpec::GridSup(_) => lp_sup_distance(x, q),
        NormSpec::Lp(p) => Ok(lp_descent_distance(x, q, *p, cfg)),
        NormSpec::FnormProduct(w) => {
            if let Some(support) = coordinate_support(q) {
                Ok(coordinate_fnorm_distance(x, w, &support))
            } else {
                Ok(fnorm_multistart_distance(x, q, w, cfg))
            }
        }
        NormSpec::FnormOfNorm(base) => {
            let inner = distance_on_orthonormal(x, ortho, base, cfg)?;
            let value = inner.value / (1.0 + inner.value);
            Ok(DistanceResult {
                value,
                minimizer: inner.minimizer,
                certificate: Certificate {
                    method: DistanceMethod::TransformClosedForm,
                    residual: inner.certificate.residual,
                    iterations: inner.certificate.iterations,
                    restarts_used: inner.certificate.restarts_used,
                    flag: inner.certificate.flag,
                },
                is_exact: inner.is_exact,
            })
        }
    }
}

fn l2_distance(x: &[f64], q: &Matrix) -> DistanceResult {
    let y = linalg::project(q, x);
    let r = linalg::sub(x, &y);
    // orthogonality defect of the residual against the basis
    let defect = (0..q.cols()).fold(0.0_f64, |m, j| m.max(linalg::dot(&r, &q.col(j)).abs()));
    DistanceResult {
        value: norm2(&r),
        minimizer: y,
        certificate: Certificate {
            method: DistanceMethod::Projection,
            residual: defect,
            iterations: 0,
            restarts_used: 0,
            flag: None,
        },
        is_exact: true,
    }
}

/// `min t  s.t.  |x - Qc|_i <= t`, exact via simplex.
fn lp_sup_distance(x: &[f64], q: &Matrix) -> Result<DistanceResult, DistanceError> {
    let n = x.len();
    let r = q.cols();
    // columns: c+ (r), c- (r), t (1), u (n), v (n)
    let cols = 2 * r + 1 + 2 * n;
    let mut a = Matrix::zeros(2 * n, cols);
    let mut b = vec![0.0; 2 * n];
    for i in 0..n {
        for j in 0..r {
            let qij = q.get(i, j);
            a.set(i, j, qij);
            a.set(i, r + j, -qij);
            a.set(n + i, j, qij);
            a.set(n + i, r + j, -qij);
        }
        a.set(i, 2 * r, 1.0);
        a.set(i, 2 * r + 1 + i, -1.0);
        a.set(n + i, 2 * r, -1.0);
        a.set(n + i, 2 * r + 1 + n + i, 1.0);
        b[i] = x[i];
        b[n + i] = x[i];
    }
    let mut cost = vec![0.0; cols];
    cost[2 * r] = 1.0;
    let sol = simplex::solve_standard_form(&a, &b, &cost)?;
    finish_lp(x, q, &sol.x[0..r], &sol.x[r..2 * r], sol.objective, sol.iterations, true)
}

/// `min sum_i s_i  s.t.  |x - Qc|_i <= s_i`, exact via simplex.
fn lp_l1_distance(x: &[f64], q: &Matrix) -> Result<DistanceResult, DistanceError> {
    let n = x.len();
    let r = q.cols();
    // columns: c+ (r), c- (r), s (n), u (n), v (n)
    let cols = 2 * r + 3 * n;
    let mut a = Matrix::zeros(2 * n, cols);
    let mut b = vec![0.0; 2 * n];
    for i in 0..n {
        for j in 0..r {
            let qij = q.get(i, j);
            a.set(i, j, qij);
            a.set(i, r + j, -qij);
            a.set(n + i, j, qij);
            a.set(n + i, r + j, -qij);
        }
        a.set(i, 2 * r + i, 1.0);
        a.set(i, 2 * r + n + i, -1.0);
        a.set(n + i, 2 * r + i, -1.0);
        a.set(n + i, 2 * r + 2 * n + i, 1.0);
        b[i] = x[i];
        b[n + i] = x[i];
    }
    let mut cost = vec![0.0; cols];
    for i in 0..n {
        cost[2 * r + i] = 1.0;
    }
    let sol = simplex::solve_standard_form(&a, &b, &cost)?;
    finish_lp(x, q, &sol.x[0..r], &sol.x[r..2 * r], sol.objective, sol.iterations, false)
}

fn finish_lp(
    x: &[f64],
    q: &Matrix,
    c_plus: &[f64],
    c_minus: &[f64],
    lp_objective: f64,
    iterations: usize,
    sup: bool,
) -> Result<DistanceResult, DistanceError> {
    let c: Vec<f64> = c_plus.iter().zip(c_minus).map(|(p, m)| p - m).collect();
    let y = q.matvec(&c);
    let r = linalg::sub(x, &y);
    let value = if sup { linalg::norm_inf(&r) } else { linalg::norm1(&r) };
    Ok(DistanceResult {
        value,
        minimizer: y,
        certificate: Certificate {
            method: DistanceMethod::LinearProgram,
            residual: (lp_objective - value).abs(),
            iterations,
            restarts_used: 0,
            flag: None,
        },
        is_exact: true,
    })
}

/// Convex descent for `l^p`, `1 < p < inf`, `p != 2`, with a
/// Barzilai-Borwein step and Armijo safeguard.
fn lp_descent_distance(x: &[f64], q: &Matrix, p: f64, cfg: &SolverConfig) -> DistanceResult {
    let objective = |c: &[f64]| {
        let r = linalg::sub(x, &q.matvec(c));
        NormSpec::Lp(p).eval(&r)
    };
    let gradient = |c: &[f64]| -> (f64, Vec<f64>) {
        let r = linalg::sub(x, &q.matvec(c));
        let val = NormSpec::Lp(p).eval(&r);
        if val <= 1e-300 {
            return (0.0, vec![0.0; c.len()]);
        }
        // d/dr ||r||_p = sign(r) |r|^(p-1) / ||r||_p^(p-1)
        let du: Vec<f64> = r
            .iter()
            .map(|ri| ri.signum() * ri.abs().powf(p - 1.0) / val.powf(p - 1.0))
            .collect();
        (val, linalg::scaled(&q.tr_matvec(&du), -1.0))
    };

    let mut c = q.tr_matvec(x);
    let tol = cfg.grad_tol * (1.0 + NormSpec::Lp(p).eval(x));
    let (mut fval, mut grad) = gradient(&c);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut converged = norm2(&grad) <= tol || fval == 0.0;

    while !converged && iterations < cfg.max_iterations {
        iterations += 1;
        let gnorm2 = linalg::dot(&grad, &grad);
        let mut s = step;
        let mut cand;
        let mut fcand;
        let mut halvings = 0;
        loop {
            cand = c.iter().zip(&grad).map(|(ci, gi)| ci - s * gi).collect::<Vec<_>>();
            fcand = objective(&cand);
            if fcand <= fval - 1e-4 * s * gnorm2 || halvings >= 60 {
                break;
            }
            s *= 0.5;
            halvings += 1;
        }
        if halvings >= 60 {
            break;
        }
        let (fnew, gnew) = gradient(&cand);
        let sdiff: Vec<f64> = cand.iter().zip(&c).map(|(a, b)| a - b).collect();
        let ydiff: Vec<f64> = gnew.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = linalg::dot(&sdiff, &ydiff);
        step = if sy > 1e-300 {
            (linalg::dot(&sdiff, &sdiff) / sy).clamp(1e-12, 1e12)
        } else {
            s * 2.0
        };
        c = cand;
        fval = fnew;
        grad = gnew;
        if norm2(&grad) <= tol || fval == 0.0 {
            converged = true;
        }
    }

    let y = q.matvec(&c);
    DistanceResult {
        value: fval,
        minimizer: y,
        certificate: Certificate {
            method: DistanceMethod::Descent,
            residual: norm2(&grad),
            iterations,
            restarts_used: 1,
            flag: if converged { None } else { Some(QualityFlag::Unconverged) },
        },
        is_exact: false,
    }
}

/// Detects a span equal to the span of a subset of standard basis vectors,
/// returning the supported coordinates. The test is on the orthogonal
/// projector, so it is independent of the basis representation.
fn coordinate_support(q: &Matrix) -> Option<Vec<bool>> {
    let dim = q.rows();
    let rank = q.cols();
    let tol = 1e-9;
    let mut support = vec![false; dim];
    let mut count = 0;
    for i in 0..dim {
        let row: Vec<f64> = (0..rank).map(|j| q.get(i, j)).collect();
        let pii = linalg::dot(&row, &row);
        if pii > 1.0 - tol {
            support[i] = true;
            count += 1;
        } else if pii > tol {
            return None;
        }
    }
    // off-diagonal check: rows of Q for unsupported coordinates are zero by
    // the diagonal test; supported rows must be orthonormal among themselves,
    // which the diagonal test plus rank equality already forces.
    if count == rank {
        Some(support)
    } else {
        None
    }
}

fn coordinate_fnorm_distance(x: &[f64], weights: &[f64], support: &[bool]) -> DistanceResult {
    let mut value = 0.0;
    let mut y = vec![0.0; x.len()];
    for (i, &xi) in x.iter().enumerate() {
        if support[i] {
            y[i] = xi;
        } else {
            value += weights[i] * xi.abs() / (1.0 + xi.abs());
        }
    }
    DistanceResult {
        value,
        minimizer: y,
        certificate: Certificate {
            method: DistanceMethod::CoordinateClosedForm,
            residual: 0.0,
            iterations: 0,
            restarts_used: 0,
            flag: None,
        },
        is_exact: true,
    }
}

/// Multi-start subgradient descent for the product F-norm over a general
/// span. The objective is not convex; the result is an upper bound.
fn fnorm_multistart_distance(
    x: &[f64],
    q: &Matrix,
    weights: &[f64],
    cfg: &SolverConfig,
) -> DistanceResult {
    let objective = |c: &[f64]| {
        let r = linalg::sub(x, &q.matvec(c));
        r.iter()
            .zip(weights)
            .map(|(ri, wi)| wi * ri.abs() / (1.0 + ri.abs()))
            .sum::<f64>()
    };
    let gradient = |c: &[f64]| -> Vec<f64> {
        let r = linalg::sub(x, &q.matvec(c));
        let du: Vec<f64> = r
            .iter()
            .zip(weights)
            .map(|(ri, wi)| {
                let d = 1.0 + ri.abs();
                wi * ri.signum() / (d * d)
            })
            .collect();
        linalg::scaled(&q.tr_matvec(&du), -1.0)
    };

    let restarts = cfg.restarts.max(1);
    let per_restart = (cfg.max_iterations / restarts).max(200);
    let base = q.tr_matvec(x);
    let scale = norm2(x).max(1.0);
    let mut best_c = base.clone();
    let mut best_val = objective(&base);
    let mut total_iters = 0;

    for restart in 0..restarts {
        let mut rng = rng_from_seed(rng::derive_seed(cfg.seed, restart as u64));
        let mut c = base.clone();
        if restart > 0 {
            for ci in c.iter_mut() {
                *ci += scale * rng::normal(&mut rng);
            }
        }
        let mut fval = objective(&c);
        let mut step = 0.5 * scale;
        for _ in 0..per_restart {
            total_iters += 1;
            let g = gradient(&c);
            let gn = norm2(&g);
            if gn <= cfg.grad_tol {
                break;
            }
            let cand: Vec<f64> = c.iter().zip(&g).map(|(ci, gi)| ci - step * gi / gn).collect();
            let fcand = objective(&cand);
            if fcand < fval {
                c = cand;
                fval = fcand;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-14 * scale {
                    break;
                }
            }
        }
        if fval < best_val {
            best_val = fval;
            best_c = c;
        }
    }

    let y = q.matvec(&best_c);
    DistanceResult {
        value: best_val,
        minimizer: y,
        certificate: Certificate {
            method: DistanceMethod::MultiStartDescent,
            residual: norm2(&gradient(&best_c)),
            iterations: total_iters,
            restarts_used: restarts,
            flag: Some(QualityFlag::UpperBound),
        },
        is_exact: false,
    }
}

const ORACLE_MAX_RANK: usize = 3;

/// Independent verification oracle: nested coefficient-grid refinement
/// around the incumbent minimizer. For convex norms the returned value is
/// within `resolution` of the infimum. Cost grows exponentially in the
/// subspace rank, hence the hard cap.
pub fn distance_oracle(
    x: &[f64],
    basis: &Matrix,
    norm: &NormSpec,
    resolution: f64,
) -> Result<f64, DistanceError> {
    if basis.rows() != x.len() {
        return Err(DistanceError::DimensionMismatch {
            expected: basis.rows(),
            got: x.len(),
        });
    }
    norm.validate(x.len())?;
    let ortho = orthonormalize(basis, RANK_REL_TOL);
    let rank = ortho.rank;
    if rank > ORACLE_MAX_RANK {
        return Err(DistanceError::OracleRankTooLarge { rank, max: ORACLE_MAX_RANK });
    }
    if rank == 0 {
        return Ok(norm.eval(x));
    }
    let q = &ortho.q;
    let eval = |c: &[f64]| norm.eval(&linalg::sub(x, &q.matvec(c)));

    let dimf = x.len() as f64;
    let mut center = q.tr_matvec(x);
    let mut halfwidth = (2.0 * dimf.sqrt() + 2.0) * (norm2(x) + 1.0);
    let mut best = eval(&center);
    let points_per_axis = 13usize;
    let target = resolution / (4.0 * dimf.sqrt());

    let mut steps = 0;
    while halfwidth > target && steps < 200 {
        steps += 1;
        let mut grid_best = best;
        let mut grid_arg = center.clone();
        let mut on_boundary = false;
        let total = points_per_axis.pow(rank as u32);
        for idx in 0..total {
            let mut c = vec![0.0; rank];
            let mut rem = idx;
            let mut boundary = false;
            for k in 0..rank {
                let t = rem % points_per_axis;
                rem /= points_per_axis;
                let frac = t as f64 / (points_per_axis - 1) as f64;
                c[k] = center[k] - halfwidth + 2.0 * halfwidth * frac;
                if t == 0 || t == points_per_axis - 1 {
                    boundary = true;
                }
            }
            let v = eval(&c);
            if v < grid_best {
                grid_best = v;
                grid_arg = c;
                on_boundary = boundary;
            }
        }
        center = grid_arg;
        best = grid_best;
        if on_boundary {
            halfwidth *= 2.0;
        } else {
            halfwidth *= 0.5;
        }
    }
    Ok(best)
}

/// Distances from `x` to every level of the chain, in order. Exact methods
/// must produce a non-increasing profile; a violation is a numerical fault
/// and is reported as an error.
pub fn distance_profile(
    x: &[f64],
    chain: &SubspaceChain,
    norm: &NormSpec,
    cfg: &SolverConfig,
) -> Result<Vec<DistanceResult>, DistanceError> {
    let mut out = Vec::with_capacity(chain.len());
    for level in 0..chain.len() {
        out.push(distance(x, chain.basis(level), norm, cfg)?);
    }
    let tol = 1e-9 * out.first().map_or(1.0, |r| r.value.max(1.0));
    for k in 1..out.len() {
        if out[k].is_exact
            && out[k - 1].is_exact
            && out[k].value > out[k - 1].value + tol
        {
            return Err(DistanceError::NotMonotone { level: k + 1 });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces;
    use approx::assert_abs_diff_eq;

    fn e(i: usize, dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    }

    #[test]
    fn l2_orthogonal_case() {
        let basis = Matrix::from_cols(3, &[e(0, 3), e(1, 3)]);
        let cfg = SolverConfig::default();
        let r = distance(&e(2, 3), &basis, &NormSpec::Lp(2.0), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert!(norm2(&r.minimizer) < 1e-12);
        assert!(r.is_exact);
    }

    #[test]
    fn sup_norm_symmetric_midpoint() {
        // x = (1,1), Y = span{(1,-1)}: optimal coefficient 0, value 1
        let basis = Matrix::from_cols(2, &[vec![1.0, -1.0]]);
        let cfg = SolverConfig::default();
        let r = distance(&[1.0, 1.0], &basis, &NormSpec::Lp(f64::INFINITY), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
        assert!(norm2(&r.minimizer) < 1e-9);
    }

    #[test]
    fn l1_unaffected_coordinates() {
        let basis = Matrix::from_cols(3, &[e(2, 3)]);
        let cfg = SolverConfig::default();
        let r = distance(&[1.0, 1.0, 0.0], &basis, &NormSpec::Lp(1.0), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn l2_matches_normal_equations_oracle() {
        // independent route: solve (B^T B) c = B^T x directly (2x2 system)
        let basis = Matrix::from_cols(
            5,
            &[
                vec![1.0, 0.5, -0.3, 0.2, 0.0],
                vec![0.0, 1.0, 0.4, -0.2, 0.7],
            ],
        );
        let x = vec![0.3, -1.2, 0.8, 0.5, -0.4];
        let bt = basis.transpose();
        let g = bt.matmul(&basis);
        let rhs = bt.matvec(&x);
        let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
        let c0 = (rhs[0] * g.get(1, 1) - rhs[1] * g.get(0, 1)) / det;
        let c1 = (g.get(0, 0) * rhs[1] - g.get(1, 0) * rhs[0]) / det;
        let y = basis.matvec(&[c0, c1]);
        let expect = norm2(&linalg::sub(&x, &y));

        let cfg = SolverConfig::default();
        let r = distance(&x, &basis, &NormSpec::Lp(2.0), &cfg).unwrap();
        assert_abs_diff_eq!(r.value, expect, epsilon = 1e-9);
    }

    #[test]
    fn pythagoras_identity() {
        let basis = Matrix::from_cols(4, &[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0, -1.0]]);
        let x = vec![0.7, -0.2, 1.5, 0.3];
        let cfg = SolverConfig::default();
        let r = distance(&x, &basis, &NormSpec::Lp(2.0), &cfg).unwrap();
        let lhs = r.value * r.value + norm2(&r.minimizer).powi(2);
        let rhs = norm2(&x).powi(2);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9 * rhs.max(1.0));
    }

    #[test]
    fn coordinate_fnorm_closed_form() {
        // V_n = span{e_1..e_n} with dyadic weights: rho = sum_{j>n} w_j |x_j|/(1+|x_j|)
        let dim = 6;
        let n = 3;
        let basis = Matrix::from_cols(dim, &(0..n).map(|i| e(i, dim)).collect::<Vec<_>>());
        let x = vec![0.4, -2.0, 1.0, 3.0, -1.0, 0.25];
        let f = NormSpec::product_default(dim);
        let cfg = SolverConfig::default();
        let r = distance(&x, &basis, &f, &cfg).unwrap();
        let want: f64 = (n..dim)
            .map(|j| 2.0_f64.powi(-(j as i32 + 1)) * x[j].abs() / (1.0 + x[j].abs()))
            .sum();
        assert_abs_diff_eq!(r.value, want, epsilon = 1e-14);
        assert!(r.is_exact);
        assert_eq!(r.certificate.method, DistanceMethod::CoordinateClosedForm);
        // the universal cap sum_{j>n} w_j <= 2^-n
        assert!(r.value <= 2.0_f64.powi(-(n as i32)));
    }

    #[test]
    fn coordinate_detection_is_representation_independent() {
        // span{e_0, e_1} given through a rotated basis of itself
        let basis = Matrix::from_cols(
            4,
            &[vec![0.6, 0.8, 0.0, 0.0], vec![-0.8, 0.6, 0.0, 0.0]],
        );
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let f = NormSpec::product_default(4);
        let cfg = SolverConfig::default();
        let r = distance(&x, &basis, &f, &cfg).unwrap();
        assert_eq!(r.certificate.method, DistanceMethod::CoordinateClosedForm);
        let want: f64 = (2..4)
            .map(|j| 2.0_f64.powi(-(j as i32 + 1)) * x[j].abs() / (1.0 + x[j].abs()))
            .sum();
        assert_abs_diff_eq!(r.value, want, epsilon = 1e-12);
    }

    #[test]
    fn transform_fnorm_closed_form() {
        let basis = Matrix::from_cols(3, &[e(0, 3)]);
        let x = vec![0.0, 3.0, 4.0];
        let f = NormSpec::FnormOfNorm(alloc::boxed::Box::new(NormSpec::Lp(2.0)));
        let cfg = SolverConfig::default();
        let r = distance(&x, &basis, &f, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, 5.0 / 6.0, epsilon = 1e-12);
        assert!(r.is_exact);
    }

    #[test]
    fn lp_descent_agrees_with_oracle() {
        let basis = Matrix::from_cols(4, &[vec![1.0, 0.3, -0.5, 0.2], vec![0.1, -1.0, 0.4, 0.9]]);
        let x = vec![0.8, 0.6, -1.1, 0.2];
        let norm = NormSpec::Lp(1.5);
        let cfg = SolverConfig::default();
        let r = distance(&x, &basis, &norm, &cfg).unwrap();
        let oracle = distance_oracle(&x, &basis, &norm, 1e-7).unwrap();
        assert!((r.value - oracle).abs() <= 1e-5, "descent {} vs oracle {}", r.value, oracle);
        assert!(!r.is_exact);
    }

    #[test]
    fn oracle_trivial_cases() {
        let basis = Matrix::from_cols(3, &[e(0, 3), e(1, 3)]);
        let v = distance_oracle(&e(2, 3), &basis, &NormSpec::Lp(2.0), 1e-6).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-5);
        let basis1 = Matrix::from_cols(3, &[e(2, 3)]);
        let v1 = distance_oracle(&[1.0, 1.0, 0.0], &basis1, &NormSpec::Lp(1.0), 1e-6).unwrap();
        assert_abs_diff_eq!(v1, 2.0, epsilon = 1e-5);
    }

    #[test]
    fn oracle_rejects_large_rank() {
        let basis = Matrix::from_cols(6, &(0..4).map(|i| e(i, 6)).collect::<Vec<_>>());
        let err = distance_oracle(&e(5, 6), &basis, &NormSpec::Lp(2.0), 1e-6).unwrap_err();
        assert!(matches!(err, DistanceError::OracleRankTooLarge { rank: 4, .. }));
    }

    #[test]
    fn profile_is_monotone() {
        let chain = spaces::coordinate_chain(3, &[1, 2]).unwrap();
        let cfg = SolverConfig::default();
        let r = distance_profile(&[1.0, 1.0, 1.0], &chain, &NormSpec::Lp(2.0), &cfg).unwrap();
        assert_abs_diff_eq!(r[0].value, 2.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].value, 1.0, epsilon = 1e-12);
        let r2 = distance_profile(&e(2, 3), &chain, &NormSpec::Lp(2.0), &cfg).unwrap();
        assert_abs_diff_eq!(r2[0].value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r2[1].value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let basis = Matrix::from_cols(3, &[e(0, 3)]);
        let cfg = SolverConfig::default();
        let err = distance(&[1.0, 2.0], &basis, &NormSpec::Lp(2.0), &cfg).unwrap_err();
        assert!(matches!(err, DistanceError::DimensionMismatch { .. }));
    }
}
