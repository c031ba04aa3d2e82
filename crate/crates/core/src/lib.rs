//! Rank-dependent Gaussian complexity laboratory.
//!
//! Evaluates closed-form complexity and generalization bounds for deep networks
//! whose layers are constrained in rank and spectral norm, estimates the
//! empirical Gaussian and Rademacher complexity of those classes by Monte Carlo
//! supremum search, and runs the experiments that compare the two.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod complexity;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod network;
pub mod rng;

pub use bounds::{BoundInputs, BoundReport, Constants};
pub use complexity::{ComplexityEstimate, OptimizerConfig};
pub use error::{Error, Result};
pub use linalg::{ConstraintSet, DenseMatrix, SvdFactors};
pub use network::{Activation, DataSample, NetworkSpec, WeightSet};
