//! Counter-keyed random streams.
//!
//! Every random quantity is drawn from a stream identified by
//! `(seed, purpose, index, sub_index)`, so results never depend on the order in
//! which draws, restarts or seeds are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::DenseMatrix;

/// What a stream is used for; keeps streams for different roles disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Noise = 1,
    Init = 2,
    Data = 3,
    Train = 4,
    Experiment = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream(seed: u64, purpose: Purpose, index: u64, sub_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let words = [
        splitmix64(seed),
        splitmix64(seed ^ (purpose as u64).rotate_left(32)),
        splitmix64(index.wrapping_mul(0xA24B_AED4_963E_E407) ^ seed),
        splitmix64(sub_index.wrapping_mul(0x9FB2_1C65_1E98_DF25) ^ (purpose as u64)),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, std_dev: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| std_dev * rng.sample::<f64, _>(StandardNormal))
}

pub fn rademacher_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 })
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
