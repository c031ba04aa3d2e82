use serde::{Deserialize, Serialize};

use super::dense::DenseMatrix;
use super::svd::svd;
use crate::error::{Error, Result};

/// The per-layer constraint `{W : rank(W) ≤ rank_cap, ‖W‖₂ ≤ spectral_cap}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub rank_cap: usize,
    pub spectral_cap: f64,
}

impl ConstraintSet {
    /// A zero spectral cap is allowed and describes the class containing only
    /// the zero matrix.
    pub fn new(rank_cap: usize, spectral_cap: f64) -> Result<Self> {
        if rank_cap == 0 {
            return Err(Error::InvalidArgument("rank cap must be at least 1".into()));
        }
        if !(spectral_cap >= 0.0) || !spectral_cap.is_finite() {
            return Err(Error::InvalidArgument(format!("spectral cap must be finite and >= 0, got {spectral_cap}")));
        }
        Ok(Self { rank_cap, spectral_cap })
    }

    fn check_applicable(&self, m: &DenseMatrix) -> Result<()> {
        let k = m.rows().min(m.cols());
        if self.rank_cap > k {
            return Err(Error::InvalidArgument(format!(
                "rank cap {} exceeds min dimension {k} of a {}x{} matrix",
                self.rank_cap,
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }
}

/// Frobenius-nearest point of the constraint set: truncate to the top
/// `rank_cap` singular triplets and clip their values at `spectral_cap`.
///
/// Ties among equal singular values keep the first ones in the SVD ordering.
pub fn project_rank_spectral(m: &DenseMatrix, c: &ConstraintSet) -> Result<DenseMatrix> {
    c.check_applicable(m)?;
    if c.spectral_cap == 0.0 {
        return Ok(DenseMatrix::zeros(m.rows(), m.cols()));
    }
    let f = svd(m)?;
    let cap = c.spectral_cap;
    let r = c.rank_cap;
    Ok(f.reconstruct_with(|i, s| if i < r { s.min(cap) } else { 0.0 }))
}
