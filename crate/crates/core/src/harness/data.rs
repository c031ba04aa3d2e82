//! Synthetic samples with bounded rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::network::DataSample;
use crate::rng::{self, Purpose};

fn two() -> usize {
    2
}

fn default_spread() -> f64 {
    0.2
}

/// Distance of blob centers from the origin, as a fraction of `R`.
pub const BLOB_CENTER_SCALE: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Rows uniform on the sphere of radius `R`; label is the sign of the
    /// first coordinate.
    #[default]
    SphereUniform,
    /// `classes` centers at distance `0.7 R` in random directions; each row is
    /// its center plus isotropic noise of expected norm `spread · R`. Row `i`
    /// belongs to class `i mod classes`.
    GaussianBlobs {
        #[serde(default = "two")]
        classes: usize,
        #[serde(default = "default_spread")]
        spread: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub sample: DataSample,
    /// Class index per row.
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl Synthetic {
    /// `+1` for class 0 and `-1` for class 1; only for two classes.
    pub fn binary_labels(&self) -> Result<Vec<f64>> {
        if self.classes != 2 {
            return Err(Error::InvalidArgument(format!("binary labels need 2 classes, got {}", self.classes)));
        }
        Ok(self.labels.iter().map(|&c| if c == 0 { 1.0 } else { -1.0 }).collect())
    }

    /// `classes x m` indicator matrix.
    pub fn one_hot(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.classes, self.labels.len(), |c, i| if self.labels[i] == c { 1.0 } else { 0.0 })
    }

    /// First `n` rows and the remaining rows.
    pub fn split(&self, n: usize) -> Result<(Synthetic, Synthetic)> {
        let m = self.labels.len();
        if n == 0 || n >= m {
            return Err(Error::InvalidArgument(format!("split point {n} outside 1..{m}")));
        }
        let part = |range: std::ops::Range<usize>| -> Result<Synthetic> {
            Ok(Synthetic {
                sample: self.sample.slice_rows(range.clone())?,
                labels: self.labels[range].to_vec(),
                classes: self.classes,
            })
        };
        Ok((part(0..n)?, part(n..m)?))
    }
}

pub fn gen_synthetic(m: usize, d: usize, radius: f64, seed: u64, task: Task) -> Result<Synthetic> {
    if m == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!("need m, d >= 1, got m={m}, d={d}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let (mut x, labels, classes) = match task {
        Task::SphereUniform => {
            let mut r = rng::stream(seed, Purpose::Data, 0, 0);
            let mut x = rng::gaussian_matrix(&mut r, m, d, 1.0);
            for i in 0..m {
                let n = norm(x.row(i));
                let s = if n > 0.0 { radius / n } else { 0.0 };
                scale_row(&mut x, i, s);
            }
            let labels = (0..m).map(|i| usize::from(x[(i, 0)] < 0.0)).collect();
            (x, labels, 2)
        }
        Task::GaussianBlobs { classes, spread } => {
            if classes < 2 || !(spread >= 0.0) || !spread.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "blobs need classes >= 2 and spread >= 0, got {classes} and {spread}"
                )));
            }
            let mut rc = rng::stream(seed, Purpose::Data, 0, 0);
            let mut centers = rng::gaussian_matrix(&mut rc, classes, d, 1.0);
            for k in 0..classes {
                let n = norm(centers.row(k));
                scale_row(&mut centers, k, BLOB_CENTER_SCALE * radius / n);
            }
            let mut rp = rng::stream(seed, Purpose::Data, 1, 0);
            let noise = rng::gaussian_matrix(&mut rp, m, d, spread * radius / (d as f64).sqrt());
            let labels: Vec<usize> = (0..m).map(|i| i % classes).collect();
            let x = DenseMatrix::from_fn(m, d, |i, j| centers[(labels[i], j)] + noise[(i, j)]);
            (x, labels, classes)
        }
    };
    for i in 0..m {
        let n = norm(x.row(i));
        if n > radius {
            scale_row(&mut x, i, radius / n);
        }
    }
    Ok(Synthetic { sample: DataSample::new(x), labels, classes })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn scale_row(x: &mut DenseMatrix, i: usize, s: f64) {
    let d = x.cols();
    for v in &mut x.as_mut_slice()[i * d..(i + 1) * d] {
        *v *= s;
    }
}
