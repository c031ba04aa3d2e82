//! Monte Carlo estimates of empirical Gaussian and Rademacher complexity.
//!
//! Each draw samples a noise matrix and searches for the supremum of the
//! correlation objective by projected gradient ascent. The search only ever
//! visits members of the class, so every per-draw value is a lower bound on
//! the true per-draw supremum and the mean underestimates the complexity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ky_fan, ConstraintSet, DenseMatrix};
use crate::network::{self, DataSample, NetworkSpec, WeightSet};
use crate::rng::{self, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub step_size: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl OptimizerConfig {
    pub const DEFAULT_ITERATIONS: usize = 300;
    pub const DEFAULT_RESTARTS: usize = 8;
    pub const DEFAULT_DRAWS: usize = 100;

    /// Step `0.1 / Π B_i`, 300 iterations, 8 restarts.
    pub fn default_for(spec: &NetworkSpec, seed: u64) -> Self {
        let prod = spec.spectral_product();
        let step_size = if prod > 0.0 { 0.1 / prod } else { 0.1 };
        Self { step_size, iterations: Self::DEFAULT_ITERATIONS, restarts: Self::DEFAULT_RESTARTS, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {}", self.step_size)));
        }
        if self.iterations == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument("iterations and restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Index of the restart that produced each draw's value.
    pub best_restart: Vec<usize>,
    /// Frobenius norm of the full gradient at the last iterate of the best restart.
    pub final_gradient_norm: Vec<f64>,
    /// Restarts discarded because the objective became non-finite.
    pub diverged_restarts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_draws: usize,
    #[serde(rename = "per_draw")]
    pub per_draw_values: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl ComplexityEstimate {
    /// Mean and standard error (sample std with `n - 1`, over `√n`).
    pub fn from_values(per_draw_values: Vec<f64>, diagnostics: Diagnostics) -> Self {
        let n = per_draw_values.len();
        let mean = per_draw_values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            per_draw_values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self { mean, std_error: (var / n as f64).sqrt(), n_draws: n, per_draw_values, diagnostics }
    }

    /// `sqrt(se_a² + se_b²)`.
    pub fn combined_std_error(&self, other: &ComplexityEstimate) -> f64 {
        self.std_error.hypot(other.std_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian,
    Rademacher,
}

/// The noise matrix of draw `draw` (`rows x cols`).
pub fn noise_matrix(kind: NoiseKind, seed: u64, draw: usize, rows: usize, cols: usize) -> DenseMatrix {
    let mut r = rng::stream(seed, Purpose::Noise, draw as u64, 0);
    match kind {
        NoiseKind::Gaussian => rng::gaussian_matrix(&mut r, rows, cols, 1.0),
        NoiseKind::Rademacher => rng::rademacher_matrix(&mut r, rows, cols),
    }
}

/// Result of the supremum search for one noise matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SupremumSearch {
    pub value: f64,
    pub best_restart: usize,
    pub final_gradient_norm: f64,
    pub diverged_restarts: usize,
    pub weights: WeightSet,
}

/// Projected gradient ascent on `W ↦ (1/m)⟨G, f_W(X)⟩` over the constrained
/// class, best iterate over `cfg.restarts` independent starts.
pub fn maximize_correlation(
    spec: &NetworkSpec,
    data: &DataSample,
    g: &DenseMatrix,
    cfg: &OptimizerConfig,
    draw: usize,
) -> Result<SupremumSearch> {
    cfg.validate()?;
    let mut best: Option<SupremumSearch> = None;
    let mut diverged = 0;
    for restart in 0..cfg.restarts {
        let mut init_rng = rng::stream(cfg.seed, Purpose::Init, draw as u64, restart as u64);
        let mut w = WeightSet::random_projected(spec, &mut init_rng)?;
        match ascend(spec, data, g, cfg, &mut w) {
            Ok((value, grad_norm, best_w)) => {
                if best.as_ref().is_none_or(|b| value > b.value) {
                    best = Some(SupremumSearch {
                        value,
                        best_restart: restart,
                        final_gradient_norm: grad_norm,
                        diverged_restarts: 0,
                        weights: best_w,
                    });
                }
            }
            Err(Error::NonFinite(_)) => diverged += 1,
            Err(e) => return Err(e),
        }
    }
    let mut best = best.ok_or(Error::AllRestartsDiverged { draw, restarts: cfg.restarts })?;
    best.diverged_restarts = diverged;
    Ok(best)
}

/// Returns (best value, gradient norm at the last iterate, best iterate).
fn ascend(
    spec: &NetworkSpec,
    data: &DataSample,
    g: &DenseMatrix,
    cfg: &OptimizerConfig,
    w: &mut WeightSet,
) -> Result<(f64, f64, WeightSet)> {
    let (mut value, mut grads) = network::objective_and_gradient(w, spec, data, g)?;
    check_finite(value)?;
    let mut best_value = value;
    let mut best_w = w.clone();
    for _ in 0..cfg.iterations {
        *w = network::project_weights(&w.step(cfg.step_size, &grads)?, spec)?;
        (value, grads) = network::objective_and_gradient(w, spec, data, g)?;
        check_finite(value)?;
        if value > best_value {
            best_value = value;
            best_w = w.clone();
        }
    }
    Ok((best_value, gradient_norm(&grads), best_w))
}

fn check_finite(v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("objective".into()))
    }
}

fn gradient_norm(grads: &[DenseMatrix]) -> f64 {
    grads.iter().map(|g| g.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

/// Monte Carlo estimate of the vector-valued complexity with the given noise.
pub fn estimate_complexity(
    spec: &NetworkSpec,
    data: &DataSample,
    cfg: &OptimizerConfig,
    n_draws: usize,
    noise: NoiseKind,
) -> Result<ComplexityEstimate> {
    if n_draws < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 draws, got {n_draws}")));
    }
    cfg.validate()?;
    if data.d() != spec.input_dim() {
        return Err(Error::Shape(format!(
            "data dimension {} does not match network input {}",
            data.d(),
            spec.input_dim()
        )));
    }
    let results = (0..n_draws)
        .into_par_iter()
        .map(|t| {
            let g = noise_matrix(noise, cfg.seed, t, spec.output_dim(), data.m());
            maximize_correlation(spec, data, &g, cfg, t)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut diagnostics = Diagnostics::default();
    let mut values = Vec::with_capacity(n_draws);
    for r in results {
        values.push(r.value);
        diagnostics.best_restart.push(r.best_restart);
        diagnostics.final_gradient_norm.push(r.final_gradient_norm);
        diagnostics.diverged_restarts.push(r.diverged_restarts);
    }
    Ok(ComplexityEstimate::from_values(values, diagnostics))
}

/// Gaussian noise, one variable per output coordinate per sample.
pub fn estimate_gaussian_complexity(
    spec: &NetworkSpec,
    data: &DataSample,
    cfg: &OptimizerConfig,
    n_draws: usize,
) -> Result<ComplexityEstimate> {
    estimate_complexity(spec, data, cfg, n_draws, NoiseKind::Gaussian)
}

/// Uniform ±1 noise, one variable per output coordinate per sample.
pub fn estimate_rademacher_complexity(
    spec: &NetworkSpec,
    data: &DataSample,
    cfg: &OptimizerConfig,
    n_draws: usize,
) -> Result<ComplexityEstimate> {
    estimate_complexity(spec, data, cfg, n_draws, NoiseKind::Rademacher)
}

/// Exact supremum of `(1/m)⟨W, G X⟩` over `{rank ≤ r, ‖W‖₂ ≤ B}`:
/// `B · KyFan_r(G X) / m`.
pub fn single_layer_exact_sup(g: &DenseMatrix, data: &DataSample, c: &ConstraintSet) -> Result<f64> {
    let gx = g.matmul(data.x())?;
    if c.rank_cap == 0 || c.rank_cap > gx.rows().min(gx.cols()) {
        return Err(Error::InvalidArgument(format!("rank cap {} does not fit a {}x{} layer", c.rank_cap, gx.rows(), gx.cols())));
    }
    Ok(c.spectral_cap * ky_fan(&gx, c.rank_cap)? / data.m() as f64)
}

/// The matrix attaining [`single_layer_exact_sup`]: `B U_r V_rᵀ` of `G X`.
pub fn single_layer_maximizer(g: &DenseMatrix, data: &DataSample, c: &ConstraintSet) -> Result<DenseMatrix> {
    let gx = g.matmul(data.x())?;
    let f = crate::linalg::svd(&gx)?;
    let (r, b) = (c.rank_cap, c.spectral_cap);
    Ok(f.reconstruct_with(|i, _| if i < r { b } else { 0.0 }))
}

/// Norm-based complexity of the linear class `{x ↦ Wx : ‖W‖₂ ≤ B}`: per draw
/// `B‖(1/m) Σ γ_i x_i‖`. The supremum is attained by a rank-1 matrix, so the
/// value does not depend on `rank_cap`.
pub fn norm_based_complexity_linear(
    data: &DataSample,
    spectral_cap: f64,
    rank_cap: usize,
    n_draws: usize,
    seed: u64,
) -> Result<ComplexityEstimate> {
    if n_draws < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 draws, got {n_draws}")));
    }
    let _ = rank_cap;
    let m = data.m();
    let values = (0..n_draws)
        .into_par_iter()
        .map(|t| {
            let gamma = noise_matrix(NoiseKind::Gaussian, seed, t, 1, m);
            let v = gamma.matmul(data.x()).expect("1 x m times m x d");
            spectral_cap * v.frobenius_norm() / m as f64
        })
        .collect::<Vec<_>>();
    Ok(ComplexityEstimate::from_values(values, Diagnostics::default()))
}

/// Lower estimate of the diameter `sup ‖f(X) − f′(X)‖_F` over pairs of
/// networks in the class of `spec` (use a spec with trailing activation for
/// the activated-prefix class). Best over restarts.
pub fn estimate_diameter(spec: &NetworkSpec, data: &DataSample, cfg: &OptimizerConfig) -> Result<f64> {
    cfg.validate()?;
    let mut best: Option<f64> = None;
    for restart in 0..cfg.restarts {
        let mut r0 = rng::stream(cfg.seed, Purpose::Init, restart as u64, u64::MAX);
        let mut r1 = rng::stream(cfg.seed, Purpose::Init, restart as u64, u64::MAX - 1);
        let mut a = WeightSet::random_projected(spec, &mut r0)?;
        let mut b = WeightSet::random_projected(spec, &mut r1)?;
        match diameter_ascent(spec, data, cfg, &mut a, &mut b) {
            Ok(v) => best = Some(best.map_or(v, |x: f64| x.max(v))),
            Err(Error::NonFinite(_)) => {}
            Err(e) => return Err(e),
        }
    }
    best.ok_or(Error::AllRestartsDiverged { draw: 0, restarts: cfg.restarts })
}

fn diameter_ascent(
    spec: &NetworkSpec,
    data: &DataSample,
    cfg: &OptimizerConfig,
    a: &mut WeightSet,
    b: &mut WeightSet,
) -> Result<f64> {
    let mut best = 0.0f64;
    for it in 0..=cfg.iterations {
        let ia = network::forward(a, spec, data)?;
        let ib = network::forward(b, spec, data)?;
        let delta = ia.output().sub(ib.output())?;
        let dist = delta.frobenius_norm();
        check_finite(dist)?;
        best = best.max(dist);
        if it == cfg.iterations || dist == 0.0 {
            break;
        }
        let up = delta.scale(1.0 / dist);
        let ga = network::backprop(a, spec, data, &ia, &up)?;
        let gb = network::backprop(b, spec, data, &ib, &up)?;
        *a = network::project_weights(&a.step(cfg.step_size, &ga)?, spec)?;
        *b = network::project_weights(&b.step(-cfg.step_size, &gb)?, spec)?;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::Activation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn linear_spec(d: usize, h: usize, r: usize, b: f64) -> NetworkSpec {
        NetworkSpec::new(vec![d, h], vec![r], vec![b], Activation::Relu).unwrap()
    }

    fn data(m: usize, d: usize, seed: u64) -> DataSample {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let x = rng::gaussian_matrix(&mut r, m, d, 1.0 / (d as f64).sqrt());
        DataSample::new(x)
    }

    fn cfg(step: f64, iterations: usize, restarts: usize) -> OptimizerConfig {
        OptimizerConfig { step_size: step, iterations, restarts, seed: 17 }
    }

    #[test]
    fn estimate_statistics() {
        let e = ComplexityEstimate::from_values(vec![1.0, 2.0, 3.0, 4.0], Diagnostics::default());
        assert_eq!(e.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((e.std_error - sd / 2.0).abs() < 1e-15);
        let json = serde_json::to_value(&e).unwrap();
        for key in ["mean", "std_error", "n_draws", "per_draw", "diagnostics"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn exact_sup_examples() {
        // G X = diag(3, 2, 1) with m = 1: X = [3, 2, 1] as one row and G chosen per row
        let x = DataSample::new(DenseMatrix::from_rows(&[vec![1.0, 1.0, 1.0]]).unwrap());
        let g = DenseMatrix::from_rows(&[vec![3.0], vec![2.0], vec![1.0]]).unwrap();
        // G X = [3,3,3; 2,2,2; 1,1,1] is rank 1 with σ = sqrt(3)·sqrt(14)
        let c = ConstraintSet::new(1, 1.0).unwrap();
        let v = single_layer_exact_sup(&g, &x, &c).unwrap();
        assert!((v - (3.0f64 * 14.0).sqrt()).abs() < 1e-12);

        let x = DataSample::new(DenseMatrix::diag(3, 3, &[3.0, 2.0, 1.0]));
        let g = DenseMatrix::identity(3);
        let c = ConstraintSet::new(2, 1.0).unwrap();
        // m = 3 here, so the value is 5/3
        assert!((single_layer_exact_sup(&g, &x, &c).unwrap() - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn maximizer_attains_exact_sup() {
        let d = data(12, 5, 1);
        let mut r = ChaCha8Rng::seed_from_u64(2);
        let g = rng::gaussian_matrix(&mut r, 4, 12, 1.0);
        let c = ConstraintSet::new(2, 1.5).unwrap();
        let w = single_layer_maximizer(&g, &d, &c).unwrap();
        let val = w.inner(&g.matmul(d.x()).unwrap()).unwrap() / 12.0;
        assert!((val - single_layer_exact_sup(&g, &d, &c).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn single_layer_ascent_reaches_oracle_and_never_exceeds_it() {
        let d = data(32, 8, 3);
        for r in [1, 4, 8] {
            let spec = linear_spec(8, 8, r, 1.0);
            let est = estimate_gaussian_complexity(&spec, &d, &cfg(1.0, 60, 2), 10).unwrap();
            for (t, v) in est.per_draw_values.iter().enumerate() {
                let g = noise_matrix(NoiseKind::Gaussian, 17, t, 8, 32);
                let exact = single_layer_exact_sup(&g, &d, &spec.constraint(0)).unwrap();
                assert!(*v <= exact + 1e-6);
                assert!(*v >= exact * 0.99, "r={r} draw {t}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn zero_cap_gives_zero() {
        let d = data(10, 4, 4);
        let spec = linear_spec(4, 3, 2, 0.0);
        let est = estimate_gaussian_complexity(&spec, &d, &cfg(0.1, 5, 1), 3).unwrap();
        assert_eq!(est.mean, 0.0);
        let rad = estimate_rademacher_complexity(&spec, &d, &cfg(0.1, 5, 1), 3).unwrap();
        assert_eq!(rad.mean, 0.0);
        let deep = NetworkSpec::new(vec![4, 3, 2], vec![2, 2], vec![1.0, 0.0], Activation::Relu).unwrap();
        assert_eq!(estimate_gaussian_complexity(&deep, &d, &cfg(0.1, 5, 1), 3).unwrap().mean, 0.0);
        assert_eq!(estimate_diameter(&spec.clone().with_trailing_activation(true), &d, &cfg(0.1, 5, 1)).unwrap(), 0.0);
    }

    #[test]
    fn full_rank_rademacher_matches_nuclear_norm() {
        let d = data(20, 4, 5);
        let spec = linear_spec(4, 4, 4, 2.0);
        let est = estimate_rademacher_complexity(&spec, &d, &cfg(5.0, 2000, 1), 6).unwrap();
        for (t, v) in est.per_draw_values.iter().enumerate() {
            let s = noise_matrix(NoiseKind::Rademacher, 17, t, 4, 20);
            let want = 2.0 * ky_fan(&s.matmul(d.x()).unwrap(), 4).unwrap() / 20.0;
            assert!((v - want).abs() <= 1e-6 * want, "{v} vs {want}");
        }
    }

    #[test]
    fn restart_prefix_is_monotone() {
        let d = data(16, 6, 6);
        let spec = NetworkSpec::uniform(vec![6, 5, 3], 2, 1.0, Activation::Relu).unwrap();
        let mut prev: Option<Vec<f64>> = None;
        for restarts in 1..=4 {
            let est = estimate_gaussian_complexity(&spec, &d, &cfg(0.3, 20, restarts), 4).unwrap();
            if let Some(p) = prev {
                for (a, b) in p.iter().zip(&est.per_draw_values) {
                    assert!(b >= a);
                }
            }
            prev = Some(est.per_draw_values);
        }
    }

    #[test]
    fn doubling_caps_doubles_single_layer_values() {
        let d = data(16, 5, 7);
        let a = estimate_gaussian_complexity(&linear_spec(5, 4, 2, 1.0), &d, &cfg(5.0, 40, 1), 5).unwrap();
        let b = estimate_gaussian_complexity(&linear_spec(5, 4, 2, 2.0), &d, &cfg(10.0, 40, 1), 5).unwrap();
        for (x, y) in a.per_draw_values.iter().zip(&b.per_draw_values) {
            assert!((y - 2.0 * x).abs() <= 1e-6 * y);
        }
    }

    #[test]
    fn norm_based_ignores_rank_and_vanishes_at_zero() {
        let d = data(8, 6, 8);
        let a = norm_based_complexity_linear(&d, 1.0, 1, 50, 3).unwrap();
        let b = norm_based_complexity_linear(&d, 1.0, 6, 50, 3).unwrap();
        assert_eq!(a, b);
        let zero = DataSample::new(DenseMatrix::zeros(4, 3));
        assert_eq!(norm_based_complexity_linear(&zero, 1.0, 1, 10, 3).unwrap().mean, 0.0);
        assert!(norm_based_complexity_linear(&d, 1.0, 1, 1, 3).is_err());
    }

    #[test]
    fn norm_based_single_point_mean() {
        // m = 1: B |γ| ‖x‖ with E|γ| = sqrt(2/π)
        let x = DataSample::new(DenseMatrix::from_rows(&[vec![0.6, 0.8, 0.0]]).unwrap());
        let est = norm_based_complexity_linear(&x, 2.0, 1, 4000, 11).unwrap();
        let want = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((est.mean - want).abs() <= 3.0 * est.std_error, "{} vs {want}", est.mean);
    }

    #[test]
    fn linear_diameter_reaches_witness_pair() {
        let d = data(20, 4, 9);
        let b = 1.5;
        let spec = NetworkSpec::new(vec![4, 4], vec![4], vec![b], Activation::Identity).unwrap();
        let est = estimate_diameter(&spec, &d, &cfg(2.0, 100, 2)).unwrap();
        let upper = 2.0 * b * d.frobenius_norm();
        assert!(est <= upper * (1.0 + 1e-9));
        assert!(est >= 0.95 * upper, "{est} vs {upper}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = data(10, 4, 10);
        let spec = linear_spec(4, 3, 2, 1.0);
        assert!(estimate_gaussian_complexity(&spec, &d, &cfg(0.1, 5, 1), 1).is_err());
        assert!(estimate_gaussian_complexity(&spec, &d, &cfg(0.0, 5, 1), 3).is_err());
        assert!(estimate_gaussian_complexity(&spec, &d, &cfg(0.1, 5, 0), 3).is_err());
        let wrong = linear_spec(5, 3, 2, 1.0);
        assert!(estimate_gaussian_complexity(&wrong, &d, &cfg(0.1, 5, 1), 3).is_err());
    }
}
