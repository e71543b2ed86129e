//! Finite-scale laboratory for best approximation from nested subspace chains.
//!
//! The crate computes distances `rho(x, Y)` from a point to a subspace under
//! a family of norms and F-norms, synthesizes elements whose distance profile
//! along a strictly nested chain matches a prescribed non-increasing sequence,
//! and computes s-number data (approximation numbers, Kolmogorov widths,
//! eigenvalue/width chains) for operators between finite-dimensional normed
//! spaces.
//!
//! Everything is deterministic given an explicit seed, allocation-only
//! (`no_std` + `alloc`), and pure: no interior mutability, no IO. The
//! companion CLI crate carries file formats and reporting.

#![no_std]

extern crate alloc;

pub mod distance;
pub mod frechet;
pub mod lethargy;
pub mod linalg;
pub mod norms;
pub mod operators;
pub mod rng;
pub mod sequences;
pub mod simplex;
pub mod spaces;

pub use distance::{distance, distance_oracle, distance_profile, DistanceResult, SolverConfig};
pub use norms::NormSpec;
pub use sequences::{TailModel, TargetSequence};
pub use spaces::SubspaceChain;
