//! Dense matrix kernel: SVD, the norms used by the bounds, and projection onto
//! the rank-and-spectral-norm constraint set.

mod dense;
mod norms;
mod projection;
mod svd;

pub use dense::DenseMatrix;
pub use norms::{
    frobenius_norm, ky_fan, l21_norm_of_transpose, numerical_rank, spectral_norm, DEFAULT_RANK_TOL,
    POWER_ITERATION_CAP,
};
pub(crate) use norms::rank_from_values;
pub use projection::{project_rank_spectral, ConstraintSet};
pub use svd::{singular_values, svd, SvdFactors, MAX_SWEEPS};
