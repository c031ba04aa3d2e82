//! Experiment configuration, synthetic data, projected training, the
//! experiment runners and report emission.

pub mod config;
pub mod data;
pub mod experiments;
pub mod output;
pub mod train;

pub use config::{ExperimentConfig, ExperimentKind};
pub use data::{gen_synthetic, Synthetic, Task};
pub use experiments::run;
pub use output::Report;
pub use train::{train_projected_sgd, LossKind, TrainConfig, TrainResult};
