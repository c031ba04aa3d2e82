//! Benchmark fixtures.

use rankcap::harness::data::{gen_synthetic, Task};
use rankcap::{DataSample, DenseMatrix};

/// Deterministic `rows x cols` matrix with entries in `[-1, 1]`.
pub fn fixture_matrix(rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |i, j| ((i * 31 + j * 17) as f64 * 0.37).sin())
}

pub fn fixture_sample(m: usize, d: usize) -> DataSample {
    gen_synthetic(m, d, 1.0, 0, Task::SphereUniform).expect("valid sizes").sample
}
