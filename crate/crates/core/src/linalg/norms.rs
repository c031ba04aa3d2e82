use super::dense::{dot, DenseMatrix};
use super::svd::svd;
use crate::error::{Error, Result};

/// Iteration cap for [`spectral_norm`].
pub const POWER_ITERATION_CAP: usize = 100_000;

/// Default relative tolerance for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Largest singular value by power iteration on `MᵀM`.
///
/// Starts from the all-ones vector with a small deterministic perturbation and
/// stops once the eigen-residual `‖MᵀMv − λv‖` is below `tol·λ`.
pub fn spectral_norm(m: &DenseMatrix, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.cols();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * ((i + 1) as f64).sin()).collect();
    normalize(&mut v);
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATION_CAP {
        let w = gram_apply(m, &v);
        lambda = dot(&v, &w);
        let residual: f64 = w.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        if residual <= tol * lambda.abs() {
            return Ok(lambda.max(0.0).sqrt());
        }
        let mut next = w;
        if normalize(&mut next) == 0.0 {
            return Ok(0.0);
        }
        v = next;
    }
    Err(Error::PowerIterationNoConvergence { iterations: POWER_ITERATION_CAP, rayleigh: lambda })
}

fn gram_apply(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let mv: Vec<f64> = (0..m.rows()).map(|i| dot(m.row(i), v)).collect();
    let mut out = vec![0.0; m.cols()];
    for (i, &s) in mv.iter().enumerate() {
        for (o, &x) in out.iter_mut().zip(m.row(i)) {
            *o += s * x;
        }
    }
    out
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    m.frobenius_norm()
}

/// `‖Mᵀ‖_{2,1}`: the sum of the Euclidean norms of the rows of `M`.
pub fn l21_norm_of_transpose(m: &DenseMatrix) -> f64 {
    m.row_norms().iter().sum()
}

/// Ky Fan `r`-norm: sum of the `r` largest singular values.
pub fn ky_fan(m: &DenseMatrix, r: usize) -> Result<f64> {
    let k = m.rows().min(m.cols());
    if r == 0 || r > k {
        return Err(Error::InvalidArgument(format!("Ky Fan order {r} outside 1..={k}")));
    }
    Ok(svd(m)?.singular_values[..r].iter().sum())
}

/// Number of singular values above `tol_rel · σ_max`. The zero matrix has rank 0.
pub fn numerical_rank(m: &DenseMatrix, tol_rel: f64) -> Result<usize> {
    if !(tol_rel > 0.0) {
        return Err(Error::InvalidArgument(format!("rank tolerance must be positive, got {tol_rel}")));
    }
    Ok(rank_from_values(&svd(m)?.singular_values, tol_rel))
}

pub(crate) fn rank_from_values(sigma: &[f64], tol_rel: f64) -> usize {
    let max = sigma.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > tol_rel * max).count()
}
