use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Real matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries. Entries must be finite.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("entry ({}, {})", pos / cols, pos % cols)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Rectangular matrix with `values` on the main diagonal.
    pub fn diag(rows: usize, cols: usize, values: &[f64]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, &v) in values.iter().enumerate().take(rows.min(cols)) {
            m[(i, i)] = v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * rhsᵀ`.
    pub fn matmul_nt(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by transpose of {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.rows);
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..rhs.rows {
                out.data[i * rhs.rows + j] = dot(a, rhs.row(j));
            }
        }
        Ok(out)
    }

    /// `selfᵀ * rhs`.
    pub fn matmul_tn(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply transpose of {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let b = rhs.row(k);
            for (i, &a) in self.row(k).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &bv) in out_row.iter_mut().zip(b) {
                    *o += a * bv;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| f(v)).collect() }
    }

    /// `self + alpha * other`, in place.
    pub fn axpy(&mut self, alpha: f64, other: &DenseMatrix) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Entrywise (Frobenius) inner product.
    pub fn inner(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(dot(&self.data, &other.data))
    }

    pub fn frobenius_norm(&self) -> f64 {
        dot(&self.data, &self.data).sqrt()
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    pub fn row_norms(&self) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), self.row(i)).sqrt()).collect()
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!(
                "expected {}x{}, got {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(DenseMatrix::from_row_major(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_row_major(0, 2, vec![]).is_err());
        assert!(matches!(
            DenseMatrix::from_row_major(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn products_agree() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64 - 5.0);
        let b = DenseMatrix::from_fn(4, 2, |i, j| (i as f64 + 1.0) * (j as f64 - 0.5));
        let ab = a.matmul(&b).unwrap();
        let ab_nt = a.matmul_nt(&b.transpose()).unwrap();
        let ab_tn = a.transpose().matmul_tn(&b).unwrap();
        assert_eq!(ab, ab_nt);
        assert_eq!(ab, ab_tn);
        assert!(a.matmul(&a).is_err());
    }
}
