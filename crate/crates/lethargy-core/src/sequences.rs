//! Prescribed distance sequences `d_1 >= d_2 >= ... >= 0` with optional
//! tail models describing values beyond the stored truncation.

use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

/// What the sequence does beyond its stored values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// Nothing is claimed past the truncation; sum-based checks are labeled
    /// as truncated evidence.
    None,
    /// `d_{N+j} = d_N * ratio^j` with `ratio` in (0, 1).
    Geometric { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSequence {
    values: Vec<f64>,
    n0: usize,
    tail: TailModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SequenceError {
    Empty,
    NotFinite { index: usize },
    Negative { index: usize },
    Increasing { index: usize },
    BadStartIndex { n0: usize, len: usize },
    BadTailRatio { ratio: f64 },
}

impl fmt::Display for SequenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceError::Empty => write!(f, "sequence must contain at least one value"),
            SequenceError::NotFinite { index } => write!(f, "value {index} is not finite"),
            SequenceError::Negative { index } => write!(f, "value {index} is negative"),
            SequenceError::Increasing { index } => {
                write!(f, "sequence increases at index {index}")
            }
            SequenceError::BadStartIndex { n0, len } => {
                write!(f, "n0 = {n0} outside 1..={len}")
            }
            SequenceError::BadTailRatio { ratio } => {
                write!(f, "geometric tail ratio must lie in (0,1), got {ratio}")
            }
        }
    }
}

impl TargetSequence {
    pub fn new(values: Vec<f64>, n0: usize, tail: TailModel) -> Result<Self, SequenceError> {
        if values.is_empty() {
            return Err(SequenceError::Empty);
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(SequenceError::NotFinite { index: i + 1 });
            }
            if v < 0.0 {
                return Err(SequenceError::Negative { index: i + 1 });
            }
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(SequenceError::Increasing { index: i + 2 });
        }
        if n0 < 1 || n0 > values.len() {
            return Err(SequenceError::BadStartIndex { n0, len: values.len() });
        }
        if let TailModel::Geometric { ratio } = tail {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(SequenceError::BadTailRatio { ratio });
            }
        }
        Ok(TargetSequence { values, n0, tail })
    }

    /// `first * ratio^(n-1)` for `n = 1..=len`, with the matching tail model.
    pub fn geometric(first: f64, ratio: f64, len: usize) -> Result<Self, SequenceError> {
        let values = (0..len).map(|k| first * ratio.powi(k as i32)).collect();
        TargetSequence::new(values, 1, TailModel::Geometric { ratio })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    /// 1-based accessor.
    pub fn value(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Sum of all terms strictly after index `n` (1-based), including the
    /// closed-form tail when one is modeled. Returns `(sum, truncated)`;
    /// `truncated` is true when no tail model covers the unstored terms.
    pub fn tail_sum_after(&self, n: usize) -> (f64, bool) {
        let stored: f64 = self.values[n.min(self.len())..].iter().sum();
        match self.tail {
            TailModel::None => (stored, true),
            TailModel::Geometric { ratio } => {
                let beyond = self.last() * ratio / (1.0 - ratio);
                (stored + beyond, false)
            }
        }
    }

    pub fn is_strictly_decreasing_allowing_final_zero(&self) -> bool {
        for w in self.values.windows(2) {
            if !(w[0] > w[1]) {
                return false;
            }
        }
        true
    }

    pub fn has_ties(&self) -> bool {
        self.values.windows(2).any(|w| w[0] == w[1])
    }

    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// Largest value, used as the relative scale of feasibility tolerances.
    pub fn scale(&self) -> f64 {
        self.first().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_increasing_and_negative() {
        assert!(TargetSequence::new(vec![1.0, 2.0], 1, TailModel::None).is_err());
        assert!(TargetSequence::new(vec![1.0, -0.5], 1, TailModel::None).is_err());
        assert!(TargetSequence::new(vec![], 1, TailModel::None).is_err());
        assert!(TargetSequence::new(vec![1.0], 2, TailModel::None).is_err());
    }

    #[test]
    fn geometric_tail_sum_is_closed_form() {
        let d = TargetSequence::geometric(1.0, 0.5, 4).unwrap();
        // after n=4: 2^-4 * (0.5/0.5) = 1/16
        let (sum, truncated) = d.tail_sum_after(4);
        assert!(!truncated);
        assert_abs_diff_eq!(sum, 0.125, epsilon = 1e-15);
        // after n=2: 0.25 + 0.125 + 0.125 = 0.5
        let (sum2, _) = d.tail_sum_after(2);
        assert_abs_diff_eq!(sum2, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn truncated_tail_flags() {
        let d = TargetSequence::new(vec![1.0, 0.5], 1, TailModel::None).unwrap();
        let (sum, truncated) = d.tail_sum_after(1);
        assert!(truncated);
        assert_abs_diff_eq!(sum, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ties_and_strictness() {
        let tied = TargetSequence::new(vec![1.0, 1.0, 0.5], 1, TailModel::None).unwrap();
        assert!(tied.has_ties());
        assert!(!tied.is_strictly_decreasing_allowing_final_zero());
        let strict = TargetSequence::new(vec![1.0, 0.5, 0.0], 1, TailModel::None).unwrap();
        assert!(strict.is_strictly_decreasing_allowing_final_zero());
    }
}
