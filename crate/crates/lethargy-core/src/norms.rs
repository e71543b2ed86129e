//! Norm and F-norm structures on `R^dim`.
//!
//! Four families: the `l^p` norms (including `p = inf`), the sup norm over a
//! sampling grid, the weighted product F-norm `sum_i w_i |x_i| / (1 + |x_i|)`,
//! and the bounded transform `t -> t/(1+t)` applied to a base norm. The two
//! F-norm families are translation-invariant metrics without homogeneity.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::linalg::{norm1, norm2, norm_inf};

#[derive(Debug, Clone, PartialEq)]
pub enum NormSpec {
    /// `l^p` with `p >= 1`; `f64::INFINITY` selects the sup norm.
    Lp(f64),
    /// Sup norm over samples on the given grid (used by polynomial chains).
    GridSup(Vec<f64>),
    /// `sum_i w_i |x_i| / (1 + |x_i|)` with strictly positive weights.
    FnormProduct(Vec<f64>),
    /// `||x|| / (1 + ||x||)` over a base norm from the first two families.
    FnormOfNorm(Box<NormSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormError {
    InvalidExponent(f64),
    GridNotSortedDistinct,
    GridDimensionMismatch { grid: usize, dim: usize },
    NonPositiveWeight { index: usize },
    WeightDimensionMismatch { weights: usize, dim: usize },
    NestedFnorm,
}

impl fmt::Display for NormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormError::InvalidExponent(p) => write!(f, "lp exponent must satisfy p >= 1, got {p}"),
            NormError::GridNotSortedDistinct => {
                write!(f, "grid points must be strictly increasing")
            }
            NormError::GridDimensionMismatch { grid, dim } => {
                write!(f, "grid has {grid} points but ambient dimension is {dim}")
            }
            NormError::NonPositiveWeight { index } => {
                write!(f, "product F-norm weight {index} is not strictly positive")
            }
            NormError::WeightDimensionMismatch { weights, dim } => {
                write!(f, "{weights} weights given for ambient dimension {dim}")
            }
            NormError::NestedFnorm => {
                write!(f, "the base of a norm transform must itself be a norm, not an F-norm")
            }
        }
    }
}

impl NormSpec {
    /// Default product-F-norm weights `w_i = 2^{-i}` (1-based).
    pub fn dyadic_weights(dim: usize) -> Vec<f64> {
        (1..=dim).map(|i| 2.0_f64.powi(-(i as i32))).collect()
    }

    pub fn product_default(dim: usize) -> NormSpec {
        NormSpec::FnormProduct(Self::dyadic_weights(dim))
    }

    pub fn validate(&self, dim: usize) -> Result<(), NormError> {
        match self {
            NormSpec::Lp(p) => {
                if !(*p >= 1.0) {
                    return Err(NormError::InvalidExponent(*p));
                }
                Ok(())
            }
            NormSpec::GridSup(grid) => {
                if grid.len() != dim {
                    return Err(NormError::GridDimensionMismatch { grid: grid.len(), dim });
                }
                if grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(NormError::GridNotSortedDistinct);
                }
                Ok(())
            }
            NormSpec::FnormProduct(weights) => {
                if weights.len() != dim {
                    return Err(NormError::WeightDimensionMismatch {
                        weights: weights.len(),
                        dim,
                    });
                }
                if let Some(i) = weights.iter().position(|&w| !(w > 0.0) || !w.is_finite()) {
                    return Err(NormError::NonPositiveWeight { index: i });
                }
                Ok(())
            }
            NormSpec::FnormOfNorm(base) => {
                if base.is_fnorm() {
                    return Err(NormError::NestedFnorm);
                }
                base.validate(dim)
            }
        }
    }

    pub fn is_fnorm(&self) -> bool {
        matches!(self, NormSpec::FnormProduct(_) | NormSpec::FnormOfNorm(_))
    }

    /// Recorded total weight of the product F-norm over the ambient dimension.
    pub fn weight_sum(&self) -> Option<f64> {
        match self {
            NormSpec::FnormProduct(w) => Some(w.iter().sum()),
            _ => None,
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Lp(p) => {
                if p.is_infinite() {
                    norm_inf(v)
                } else if *p == 1.0 {
                    norm1(v)
                } else if *p == 2.0 {
                    norm2(v)
                } else {
                    let s: f64 = v.iter().map(|x| x.abs().powf(*p)).sum();
                    s.powf(1.0 / *p)
                }
            }
            NormSpec::GridSup(_) => norm_inf(v),
            NormSpec::FnormProduct(w) => v
                .iter()
                .zip(w)
                .map(|(x, wi)| wi * x.abs() / (1.0 + x.abs()))
                .sum(),
            NormSpec::FnormOfNorm(base) => {
                let t = base.eval(v);
                t / (1.0 + t)
            }
        }
    }
}
