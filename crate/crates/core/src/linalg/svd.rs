//! Thin singular value decomposition by one-sided (Hestenes) Jacobi rotations.
//!
//! For an `m x n` input with `k = min(m, n)` the factors are `U: m x k`,
//! `sigma: k` and `V: n x k`, with `A = U diag(sigma) Vᵀ`. Columns of `U` that
//! belong to exactly-zero singular values are completed to an orthonormal set.

use super::dense::{dot, DenseMatrix};
use crate::error::{Error, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `m x k`, orthonormal columns.
    pub left_vectors: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// `n x k`, orthonormal columns.
    pub right_vectors: DenseMatrix,
}

impl SvdFactors {
    pub fn reconstruct(&self) -> DenseMatrix {
        self.reconstruct_with(|_, s| s)
    }

    /// `U diag(f(i, sigma_i)) Vᵀ`, skipping terms where `f` returns zero.
    pub fn reconstruct_with(&self, f: impl Fn(usize, f64) -> f64) -> DenseMatrix {
        let u = &self.left_vectors;
        let v = &self.right_vectors;
        let (m, n) = (u.rows(), v.rows());
        let mut out = DenseMatrix::zeros(m, n);
        let weights: Vec<f64> = self.singular_values.iter().enumerate().map(|(i, &s)| f(i, s)).collect();
        let data = out.as_mut_slice();
        for i in 0..m {
            let row = &mut data[i * n..(i + 1) * n];
            for (t, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let a = w * u[(i, t)];
                if a == 0.0 {
                    continue;
                }
                for (j, o) in row.iter_mut().enumerate() {
                    *o += a * v[(j, t)];
                }
            }
        }
        out
    }
}

/// Thin SVD of `m`.
pub fn svd(m: &DenseMatrix) -> Result<SvdFactors> {
    if !m.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    if m.rows() >= m.cols() {
        jacobi_tall(m)
    } else {
        let f = jacobi_tall(&m.transpose())?;
        Ok(SvdFactors {
            left_vectors: f.right_vectors,
            singular_values: f.singular_values,
            right_vectors: f.left_vectors,
        })
    }
}

/// Singular values only, nonincreasing.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.singular_values)
}

fn jacobi_tall(a: &DenseMatrix) -> Result<SvdFactors> {
    let (m, n) = a.shape();
    // column-major working copies
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();
    let tol = f64::EPSILON * m.max(n) as f64;
    let mut norms: Vec<f64> = cols.iter().map(|c| dot(c, c)).collect();
    // columns this small cannot move any singular value by more than EPS * sigma_max
    let negligible = norms.iter().sum::<f64>() * (f64::EPSILON * f64::EPSILON);

    let mut converged = n < 2;
    let mut residual = 0.0;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        sweep += 1;
        residual = 0.0f64;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                let off = gamma.abs() / (alpha.sqrt() * beta.sqrt());
                residual = residual.max(off);
                if off <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                rotate(&mut left[p], &mut right[0], c, s);
                let (left, right) = vcols.split_at_mut(q);
                rotate(&mut left[p], &mut right[0], c, s);
                norms[p] = dot(&cols[p], &cols[p]);
                norms[q] = dot(&cols[q], &cols[q]);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: sweep, residual });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sigma_raw: Vec<f64> = norms.iter().map(|v| v.sqrt()).collect();
    // stable: ties keep factor order
    order.sort_by(|&i, &j| sigma_raw[j].total_cmp(&sigma_raw[i]));

    // left vectors of values at rounding level are noise; rebuild them instead
    let u_floor = (sigma_raw[order[0]] * tol).max(f64::MIN_POSITIVE * 1e4);
    let mut u_cols: Vec<Option<Vec<f64>>> = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut v = DenseMatrix::zeros(n, n);
    for (t, &j) in order.iter().enumerate() {
        let s = sigma_raw[j];
        sigma.push(s);
        for (i, &x) in vcols[j].iter().enumerate() {
            v[(i, t)] = x;
        }
        if s > u_floor {
            u_cols.push(Some(cols[j].iter().map(|x| x / s).collect()));
        } else {
            u_cols.push(None);
        }
    }
    let u_cols = complete_orthonormal(u_cols, m);
    let mut u = DenseMatrix::zeros(m, n);
    for (t, col) in u_cols.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            u[(i, t)] = x;
        }
    }
    Ok(SvdFactors { left_vectors: u, singular_values: sigma, right_vectors: v })
}

#[inline]
fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// Fills the missing columns with unit vectors orthogonal to all others
/// (modified Gram-Schmidt over the standard basis).
fn complete_orthonormal(cols: Vec<Option<Vec<f64>>>, m: usize) -> Vec<Vec<f64>> {
    if cols.iter().all(Option::is_some) {
        return cols.into_iter().flatten().collect();
    }
    let mut basis: Vec<Vec<f64>> = cols.iter().flatten().cloned().collect();
    let mut candidate = 0;
    let mut out = Vec::with_capacity(cols.len());
    for col in cols {
        match col {
            Some(c) => out.push(c),
            None => loop {
                assert!(candidate < m, "ran out of basis candidates");
                let mut e = vec![0.0; m];
                e[candidate] = 1.0;
                candidate += 1;
                for _ in 0..2 {
                    for b in &basis {
                        let proj = dot(&e, b);
                        for (x, y) in e.iter_mut().zip(b) {
                            *x -= proj * y;
                        }
                    }
                }
                let norm = dot(&e, &e).sqrt();
                if norm > 1e-8 {
                    e.iter_mut().for_each(|x| *x /= norm);
                    basis.push(e.clone());
                    out.push(e);
                    break;
                }
            },
        }
    }
    out
}
