//! Minibatch SGD with projection onto the caps after every step.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::network::{self, DataSample, NetworkSpec, WeightSet};
use crate::rng::{self, Purpose};

/// Losses bounded in `[0, 1]` for binary labels `y ∈ {−1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `clip(1 − y f, 0, 1)`; trained through the hinge subgradient.
    #[default]
    Ramp,
    /// `min((f − y)², 1)`; trained through the unclipped square.
    ClippedSquared,
}

impl LossKind {
    pub fn lipschitz(&self) -> f64 {
        match self {
            LossKind::Ramp => 1.0,
            LossKind::ClippedSquared => 2.0,
        }
    }

    pub fn value(&self, f: f64, y: f64) -> f64 {
        match self {
            LossKind::Ramp => (1.0 - y * f).clamp(0.0, 1.0),
            LossKind::ClippedSquared => (f - y).powi(2).min(1.0),
        }
    }

    /// Derivative in `f` of the surrogate used for training.
    pub fn surrogate_derivative(&self, f: f64, y: f64) -> f64 {
        match self {
            LossKind::Ramp => {
                if y * f < 1.0 {
                    -y
                } else {
                    0.0
                }
            }
            LossKind::ClippedSquared => 2.0 * (f - y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Probability of flipping each training label.
    #[serde(default)]
    pub label_noise: f64,
    #[serde(default)]
    pub loss: LossKind,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be at least 1".into()));
        }
        if !(0.0..=0.5).contains(&self.label_noise) {
            return Err(Error::InvalidArgument(format!("label noise must lie in [0, 0.5], got {}", self.label_noise)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainResult {
    pub weights: WeightSet,
    /// Mean training loss after each epoch.
    pub trace: Vec<f64>,
    /// Labels after label noise.
    pub labels: Vec<f64>,
}

/// Scalar network outputs, one per sample.
pub fn predictions(w: &WeightSet, spec: &NetworkSpec, data: &DataSample) -> Result<Vec<f64>> {
    if spec.output_dim() != 1 {
        return Err(Error::Shape(format!("binary tasks need output width 1, got {}", spec.output_dim())));
    }
    Ok(network::forward(w, spec, data)?.output().as_slice().to_vec())
}

pub fn mean_loss(w: &WeightSet, spec: &NetworkSpec, data: &DataSample, labels: &[f64], loss: LossKind) -> Result<f64> {
    let f = predictions(w, spec, data)?;
    check_labels(&f, labels)?;
    Ok(f.iter().zip(labels).map(|(&f, &y)| loss.value(f, y)).sum::<f64>() / f.len() as f64)
}

/// Fraction of samples with `y f ≤ 0`.
pub fn zero_one_error(w: &WeightSet, spec: &NetworkSpec, data: &DataSample, labels: &[f64]) -> Result<f64> {
    let f = predictions(w, spec, data)?;
    check_labels(&f, labels)?;
    Ok(f.iter().zip(labels).filter(|(&f, &y)| y * f <= 0.0).count() as f64 / f.len() as f64)
}

fn check_labels(f: &[f64], labels: &[f64]) -> Result<()> {
    if f.len() != labels.len() {
        return Err(Error::Shape(format!("{} labels for {} samples", labels.len(), f.len())));
    }
    Ok(())
}

/// Flips each label independently with probability `p`, using stream
/// `(seed, Train, u64::MAX, stream)`.
pub fn flip_labels(labels: &[f64], p: f64, seed: u64, stream: u64) -> Vec<f64> {
    let mut r = rng::stream(seed, Purpose::Train, u64::MAX, stream);
    labels.iter().map(|&y| if r.random::<f64>() < p { -y } else { y }).collect()
}

fn gather_rows(data: &DataSample, idx: &[usize]) -> Result<DataSample> {
    let d = data.d();
    let mut out = Vec::with_capacity(idx.len() * d);
    for &i in idx {
        out.extend_from_slice(data.x().row(i));
    }
    Ok(DataSample::new(DenseMatrix::from_row_major(idx.len(), d, out)?))
}

pub fn train_projected_sgd(
    spec: &NetworkSpec,
    data: &DataSample,
    labels: &[f64],
    tc: &TrainConfig,
) -> Result<TrainResult> {
    tc.validate()?;
    if data.d() != spec.input_dim() {
        return Err(Error::Shape(format!(
            "data dimension {} does not match network input {}",
            data.d(),
            spec.input_dim()
        )));
    }
    if labels.len() != data.m() {
        return Err(Error::Shape(format!("{} labels for {} samples", labels.len(), data.m())));
    }
    if spec.output_dim() != 1 {
        return Err(Error::Shape(format!("binary tasks need output width 1, got {}", spec.output_dim())));
    }
    let labels = flip_labels(labels, tc.label_noise, tc.seed, 0);

    let mut w = WeightSet::random_projected(spec, &mut rng::stream(tc.seed, Purpose::Init, 0, 0))?;
    let mut trace = Vec::with_capacity(tc.epochs);
    let mut order: Vec<usize> = (0..data.m()).collect();
    for epoch in 0..tc.epochs {
        order.shuffle(&mut rng::stream(tc.seed, Purpose::Train, epoch as u64, 0));
        for batch in order.chunks(tc.batch_size) {
            let xb = gather_rows(data, batch)?;
            let images = network::forward(&w, spec, &xb)?;
            let f = images.output().as_slice();
            let scale = 1.0 / batch.len() as f64;
            let up: Vec<f64> = f
                .iter()
                .zip(batch)
                .map(|(&fi, &i)| tc.loss.surrogate_derivative(fi, labels[i]) * scale)
                .collect();
            let up = DenseMatrix::from_row_major(1, batch.len(), up).map_err(|_| diverged(epoch, &trace))?;
            let grads = network::backprop(&w, spec, &xb, &images, &up)?;
            w = network::project_weights(&w.step(-tc.learning_rate, &grads)?, spec)
                .map_err(|e| if e.is_numerical() { diverged(epoch, &trace) } else { e })?;
        }
        let loss = mean_loss(&w, spec, data, &labels, tc.loss)?;
        if !loss.is_finite() {
            return Err(diverged(epoch, &trace));
        }
        trace.push(loss);
    }
    Ok(TrainResult { weights: w, trace, labels })
}

fn diverged(epoch: usize, trace: &[f64]) -> Error {
    Error::TrainingDiverged { epoch, trace: trace.to_vec() }
}
