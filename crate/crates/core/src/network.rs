//! Rank-constrained multilayer perceptron without biases:
//! `f(x) = W_L φ(W_{L-1} φ(… φ(W_1 x)…))`.
//!
//! Data are stored with one sample per row (`X` is `m x d`), layer images with
//! one sample per column (`Z_i` is `h_i x m`).

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{project_rank_spectral, ConstraintSet, DenseMatrix};
use crate::rng;

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.01;

fn default_leaky_slope() -> f64 {
    DEFAULT_LEAKY_SLOPE
}

/// Piecewise-linear 1-Lipschitz activations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Activation {
    Relu,
    LeakyRelu {
        #[serde(default = "default_leaky_slope")]
        alpha: f64,
    },
    Identity,
}

impl Activation {
    pub fn validate(&self) -> Result<()> {
        if let Activation::LeakyRelu { alpha } = *self {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidSpec(format!("leaky relu slope must lie in (0, 1), got {alpha}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu { alpha } => {
                if x > 0.0 {
                    x
                } else {
                    alpha * x
                }
            }
            Activation::Identity => x,
        }
    }

    /// Derivative, taking the left slope at the kink (so relu'(0) = 0).
    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu { alpha } => {
                if x > 0.0 {
                    1.0
                } else {
                    alpha
                }
            }
            Activation::Identity => 1.0,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        1.0
    }
}

/// Architecture and per-layer constraints.
///
/// The activation follows layers `1..L-1`; with `trailing_activation` it also
/// follows layer `L` (the prefix class used for diameters and contraction checks).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    dims: Vec<usize>,
    rank_caps: Vec<usize>,
    spectral_caps: Vec<f64>,
    activation: Activation,
    trailing_activation: bool,
}

impl NetworkSpec {
    pub fn new(
        dims: Vec<usize>,
        rank_caps: Vec<usize>,
        spectral_caps: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        let spec = Self { dims, rank_caps, spectral_caps, activation, trailing_activation: false };
        spec.validate()?;
        Ok(spec)
    }

    /// Same caps on every layer, with each rank cap clamped to the layer's dimensions.
    pub fn uniform(dims: Vec<usize>, rank_cap: usize, spectral_cap: f64, activation: Activation) -> Result<Self> {
        let depth = dims.len().saturating_sub(1);
        let rank_caps = (0..depth).map(|i| rank_cap.min(dims[i]).min(dims[i + 1])).collect();
        Self::new(dims, rank_caps, vec![spectral_cap; depth], activation)
    }

    pub fn with_trailing_activation(mut self, trailing: bool) -> Self {
        self.trailing_activation = trailing;
        self
    }

    fn validate(&self) -> Result<()> {
        let depth = self.dims.len().checked_sub(1).filter(|&l| l >= 1);
        let Some(depth) = depth else {
            return Err(Error::InvalidSpec("need at least one layer (two dims)".into()));
        };
        if self.dims.contains(&0) {
            return Err(Error::InvalidSpec("all dims must be positive".into()));
        }
        if self.rank_caps.len() != depth || self.spectral_caps.len() != depth {
            return Err(Error::InvalidSpec(format!(
                "{depth} layers need {depth} rank caps and spectral caps, got {} and {}",
                self.rank_caps.len(),
                self.spectral_caps.len()
            )));
        }
        for i in 0..depth {
            let r = self.rank_caps[i];
            let k = self.dims[i].min(self.dims[i + 1]);
            if r == 0 || r > k {
                return Err(Error::InvalidSpec(format!("layer {}: rank cap {r} outside 1..={k}", i + 1)));
            }
            let b = self.spectral_caps[i];
            if !(b >= 0.0) || !b.is_finite() {
                return Err(Error::InvalidSpec(format!("layer {}: spectral cap {b} must be finite and >= 0", i + 1)));
            }
        }
        self.activation.validate()
    }

    pub fn depth(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        self.dims[self.depth()]
    }

    pub fn rank_caps(&self) -> &[usize] {
        &self.rank_caps
    }

    pub fn spectral_caps(&self) -> &[f64] {
        &self.spectral_caps
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn trailing_activation(&self) -> bool {
        self.trailing_activation
    }

    /// Constraint of layer `i` (0-based).
    pub fn constraint(&self, i: usize) -> ConstraintSet {
        ConstraintSet { rank_cap: self.rank_caps[i], spectral_cap: self.spectral_caps[i] }
    }

    /// Shape `h_i x h_{i-1}` of layer `i` (0-based).
    pub fn layer_shape(&self, i: usize) -> (usize, usize) {
        (self.dims[i + 1], self.dims[i])
    }

    pub fn spectral_product(&self) -> f64 {
        self.spectral_caps.iter().product()
    }

    /// Spec of the first `len` layers.
    pub fn prefix(&self, len: usize, trailing_activation: bool) -> Result<Self> {
        if len == 0 || len > self.depth() {
            return Err(Error::InvalidArgument(format!("prefix length {len} outside 1..={}", self.depth())));
        }
        Ok(Self {
            dims: self.dims[..=len].to_vec(),
            rank_caps: self.rank_caps[..len].to_vec(),
            spectral_caps: self.spectral_caps[..len].to_vec(),
            activation: self.activation,
            trailing_activation,
        })
    }

    fn activated(&self, layer: usize) -> bool {
        layer + 1 < self.depth() || self.trailing_activation
    }
}

/// One weight matrix per layer, layer `i` of shape `h_i x h_{i-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    matrices: Vec<DenseMatrix>,
}

impl WeightSet {
    pub fn new(matrices: Vec<DenseMatrix>, spec: &NetworkSpec) -> Result<Self> {
        let w = Self { matrices };
        w.check_shapes(spec)?;
        Ok(w)
    }

    pub fn zeros(spec: &NetworkSpec) -> Self {
        let matrices = (0..spec.depth())
            .map(|i| {
                let (r, c) = spec.layer_shape(i);
                DenseMatrix::zeros(r, c)
            })
            .collect();
        Self { matrices }
    }

    /// Independent standard normal entries, then projected onto the caps.
    pub fn random_projected<R: Rng + ?Sized>(spec: &NetworkSpec, rng: &mut R) -> Result<Self> {
        let matrices = (0..spec.depth())
            .map(|i| {
                let (r, c) = spec.layer_shape(i);
                rng::gaussian_matrix(rng, r, c, 1.0)
            })
            .collect();
        project_weights(&Self { matrices }, spec)
    }

    pub fn check_shapes(&self, spec: &NetworkSpec) -> Result<()> {
        if self.matrices.len() != spec.depth() {
            return Err(Error::Shape(format!(
                "spec has {} layers, weight set has {}",
                spec.depth(),
                self.matrices.len()
            )));
        }
        for (i, m) in self.matrices.iter().enumerate() {
            let want = spec.layer_shape(i);
            if m.shape() != want {
                return Err(Error::Shape(format!(
                    "layer {}: expected {}x{}, got {}x{}",
                    i + 1,
                    want.0,
                    want.1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }

    pub fn matrices(&self) -> &[DenseMatrix] {
        &self.matrices
    }

    pub fn layer(&self, i: usize) -> &DenseMatrix {
        &self.matrices[i]
    }

    pub fn into_matrices(self) -> Vec<DenseMatrix> {
        self.matrices
    }

    /// `self + alpha * direction`, layer by layer.
    pub fn step(&self, alpha: f64, direction: &[DenseMatrix]) -> Result<WeightSet> {
        if direction.len() != self.matrices.len() {
            return Err(Error::Shape("step direction has the wrong number of layers".into()));
        }
        let mut matrices = self.matrices.clone();
        for (m, d) in matrices.iter_mut().zip(direction) {
            m.axpy(alpha, d)?;
        }
        Ok(WeightSet { matrices })
    }
}

/// The sample matrix `X` (`m x d`, one sample per row) and its radius
/// `R = max_i ‖x_i‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSample {
    x: DenseMatrix,
    radius: f64,
}

impl DataSample {
    pub fn new(x: DenseMatrix) -> Self {
        let radius = x.row_norms().into_iter().fold(0.0, f64::max);
        Self { x, radius }
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn m(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.x.frobenius_norm()
    }

    /// Rows `range` as a new sample.
    pub fn slice_rows(&self, range: std::ops::Range<usize>) -> Result<DataSample> {
        let d = self.d();
        let data = self.x.as_slice()[range.start * d..range.end * d].to_vec();
        Ok(DataSample::new(DenseMatrix::from_row_major(range.len(), d, data)?))
    }
}

/// Per-layer images of the data: pre-activations `W_i A_{i-1}` and the
/// outputs `A_i` (equal to the pre-activation where no activation is applied).
#[derive(Debug, Clone)]
pub struct LayerImages {
    pub pre_activations: Vec<DenseMatrix>,
    pub outputs: Vec<DenseMatrix>,
}

impl LayerImages {
    /// `Z_L`, the network output (`h_L x m`).
    pub fn output(&self) -> &DenseMatrix {
        self.outputs.last().expect("at least one layer")
    }
}

pub fn forward(w: &WeightSet, spec: &NetworkSpec, data: &DataSample) -> Result<LayerImages> {
    w.check_shapes(spec)?;
    if data.d() != spec.input_dim() {
        return Err(Error::Shape(format!(
            "layer 1: input dimension {} does not match data dimension {}",
            spec.input_dim(),
            data.d()
        )));
    }
    let act = spec.activation();
    let mut pre_activations = Vec::with_capacity(spec.depth());
    let mut outputs: Vec<DenseMatrix> = Vec::with_capacity(spec.depth());
    for (i, wi) in w.matrices().iter().enumerate() {
        let z = match outputs.last() {
            None => wi.matmul_nt(data.x())?,
            Some(prev) => wi.matmul(prev)?,
        };
        let a = if spec.activated(i) { z.map(|v| act.apply(v)) } else { z.clone() };
        if !a.is_finite() {
            return Err(Error::NonFinite(format!("layer {} output", i + 1)));
        }
        pre_activations.push(z);
        outputs.push(a);
    }
    Ok(LayerImages { pre_activations, outputs })
}

/// Reverse-mode gradient of a scalar whose derivative with respect to the
/// network output `Z_L` is `upstream` (`h_L x m`).
pub fn backprop(
    w: &WeightSet,
    spec: &NetworkSpec,
    data: &DataSample,
    images: &LayerImages,
    upstream: &DenseMatrix,
) -> Result<Vec<DenseMatrix>> {
    let depth = spec.depth();
    if upstream.shape() != images.output().shape() {
        return Err(Error::Shape(format!(
            "upstream gradient is {}x{}, output is {}x{}",
            upstream.rows(),
            upstream.cols(),
            images.output().rows(),
            images.output().cols()
        )));
    }
    let act = spec.activation();
    let mut grads = vec![None; depth];
    let mut delta = upstream.clone();
    for i in (0..depth).rev() {
        if spec.activated(i) {
            let z = &images.pre_activations[i];
            for (d, &zv) in delta.as_mut_slice().iter_mut().zip(z.as_slice()) {
                *d *= act.derivative(zv);
            }
        }
        let g = if i == 0 { delta.matmul(data.x())? } else { delta.matmul_nt(&images.outputs[i - 1])? };
        if i > 0 {
            delta = w.layer(i).matmul_tn(&delta)?;
        }
        grads[i] = Some(g);
    }
    Ok(grads.into_iter().map(|g| g.expect("filled")).collect())
}

fn check_noise_shape(spec: &NetworkSpec, data: &DataSample, g: &DenseMatrix) -> Result<()> {
    let want = (spec.output_dim(), data.m());
    if g.shape() != want {
        return Err(Error::Shape(format!(
            "noise matrix must be {}x{}, got {}x{}",
            want.0,
            want.1,
            g.rows(),
            g.cols()
        )));
    }
    Ok(())
}

/// `(1/m) Σ_{j,i} G_{ji} f_j(x_i) = (1/m)⟨G, Z_L⟩`.
pub fn gaussian_objective(w: &WeightSet, spec: &NetworkSpec, data: &DataSample, g: &DenseMatrix) -> Result<f64> {
    check_noise_shape(spec, data, g)?;
    let images = forward(w, spec, data)?;
    Ok(g.inner(images.output())? / data.m() as f64)
}

/// Per-layer gradients of [`gaussian_objective`].
pub fn gradient(w: &WeightSet, spec: &NetworkSpec, data: &DataSample, g: &DenseMatrix) -> Result<Vec<DenseMatrix>> {
    Ok(objective_and_gradient(w, spec, data, g)?.1)
}

pub fn objective_and_gradient(
    w: &WeightSet,
    spec: &NetworkSpec,
    data: &DataSample,
    g: &DenseMatrix,
) -> Result<(f64, Vec<DenseMatrix>)> {
    check_noise_shape(spec, data, g)?;
    let images = forward(w, spec, data)?;
    let inv_m = 1.0 / data.m() as f64;
    let value = g.inner(images.output())? * inv_m;
    let grads = backprop(w, spec, data, &images, &g.scale(inv_m))?;
    Ok((value, grads))
}

/// Projects every layer onto its constraint set.
pub fn project_weights(w: &WeightSet, spec: &NetworkSpec) -> Result<WeightSet> {
    w.check_shapes(spec)?;
    let matrices = w
        .matrices()
        .iter()
        .enumerate()
        .map(|(i, m)| project_rank_spectral(m, &spec.constraint(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightSet { matrices })
}

/// JSON form of a network: architecture, caps and (optionally) weights as
/// row-major arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub dims: Vec<usize>,
    pub rank_caps: Vec<usize>,
    pub spectral_caps: Vec<f64>,
    pub activation: Activation,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trailing_activation: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
}

impl NetworkDocument {
    pub fn from_parts(spec: &NetworkSpec, weights: Option<&WeightSet>) -> Self {
        Self {
            dims: spec.dims.clone(),
            rank_caps: spec.rank_caps.clone(),
            spectral_caps: spec.spectral_caps.clone(),
            activation: spec.activation,
            trailing_activation: spec.trailing_activation,
            weights: weights.map(|w| w.matrices().iter().map(|m| m.as_slice().to_vec()).collect()),
        }
    }

    pub fn spec(&self) -> Result<NetworkSpec> {
        Ok(NetworkSpec::new(
            self.dims.clone(),
            self.rank_caps.clone(),
            self.spectral_caps.clone(),
            self.activation,
        )?
        .with_trailing_activation(self.trailing_activation))
    }

    /// Spec plus weights; fails if the document carries no weights.
    pub fn to_parts(&self) -> Result<(NetworkSpec, Option<WeightSet>)> {
        let spec = self.spec()?;
        let weights = match &self.weights {
            None => None,
            Some(arrays) => {
                if arrays.len() != spec.depth() {
                    return Err(Error::Shape(format!(
                        "{} weight arrays for {} layers",
                        arrays.len(),
                        spec.depth()
                    )));
                }
                let matrices = arrays
                    .iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let (r, c) = spec.layer_shape(i);
                        DenseMatrix::from_row_major(r, c, a.clone())
                            .map_err(|e| Error::Shape(format!("layer {}: {e}", i + 1)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(WeightSet::new(matrices, &spec)?)
            }
        };
        Ok((spec, weights))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{numerical_rank, spectral_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(rows: &[Vec<f64>]) -> DataSample {
        DataSample::new(DenseMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn spec_validation() {
        assert!(NetworkSpec::new(vec![3], vec![], vec![], Activation::Relu).is_err());
        assert!(NetworkSpec::new(vec![3, 2], vec![3], vec![1.0], Activation::Relu).is_err());
        assert!(NetworkSpec::new(vec![3, 2], vec![1], vec![-1.0], Activation::Relu).is_err());
        assert!(NetworkSpec::new(vec![3, 2], vec![1], vec![1.0], Activation::LeakyRelu { alpha: 1.5 }).is_err());
        assert!(NetworkSpec::new(vec![3, 0], vec![1], vec![1.0], Activation::Relu).is_err());
        let s = NetworkSpec::uniform(vec![4, 8, 1], 3, 1.0, Activation::Relu).unwrap();
        assert_eq!(s.rank_caps(), &[3, 1]);
    }

    #[test]
    fn identity_network_returns_input() {
        let spec = NetworkSpec::new(vec![2, 2, 2], vec![2, 2], vec![1.0, 1.0], Activation::Identity).unwrap();
        let w = WeightSet::new(vec![DenseMatrix::identity(2), DenseMatrix::identity(2)], &spec).unwrap();
        let data = sample(&[vec![1.0, -2.0], vec![0.5, 3.0], vec![0.0, 1.0]]);
        let out = forward(&w, &spec, &data).unwrap();
        assert_eq!(out.output(), &data.x().transpose());
    }

    #[test]
    fn single_relu_layer() {
        let spec = NetworkSpec::new(vec![2, 2], vec![2], vec![2.0], Activation::Relu)
            .unwrap()
            .with_trailing_activation(true);
        let w = WeightSet::new(vec![DenseMatrix::identity(2).scale(2.0)], &spec).unwrap();
        let out = forward(&w, &spec, &sample(&[vec![1.0, -1.0]])).unwrap();
        assert_eq!(out.output().as_slice(), &[2.0, 0.0]);
        // without the trailing activation the last layer is linear
        let linear = spec.clone().with_trailing_activation(false);
        let out = forward(&w, &linear, &sample(&[vec![1.0, -1.0]])).unwrap();
        assert_eq!(out.output().as_slice(), &[2.0, -2.0]);
    }

    #[test]
    fn shape_errors_name_the_layer() {
        let spec = NetworkSpec::new(vec![2, 3, 1], vec![1, 1], vec![1.0, 1.0], Activation::Relu).unwrap();
        let bad = WeightSet { matrices: vec![DenseMatrix::zeros(3, 2), DenseMatrix::zeros(2, 3)] };
        let err = forward(&bad, &spec, &sample(&[vec![1.0, 1.0]])).unwrap_err();
        assert!(err.to_string().contains("layer 2"), "{err}");
        let w = WeightSet::zeros(&spec);
        assert!(forward(&w, &spec, &sample(&[vec![1.0, 1.0, 1.0]])).is_err());
        assert!(gaussian_objective(&w, &spec, &sample(&[vec![1.0, 1.0]]), &DenseMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn objective_of_linear_layer_is_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = NetworkSpec::new(vec![4, 3], vec![3], vec![1.0], Activation::Relu).unwrap();
        let w = WeightSet::new(vec![rng::gaussian_matrix(&mut rng, 3, 4, 1.0)], &spec).unwrap();
        let data = DataSample::new(rng::gaussian_matrix(&mut rng, 5, 4, 1.0));
        let g = rng::gaussian_matrix(&mut rng, 3, 5, 1.0);
        let obj = gaussian_objective(&w, &spec, &data, &g).unwrap();
        let gx = g.matmul(data.x()).unwrap();
        let want = w.layer(0).inner(&gx).unwrap() / 5.0;
        assert!((obj - want).abs() < 1e-12);
        assert_eq!(gaussian_objective(&w, &spec, &data, &DenseMatrix::zeros(3, 5)).unwrap(), 0.0);
        let grads = gradient(&w, &spec, &data, &g).unwrap();
        assert!(grads[0].max_abs_diff(&gx.scale(0.2)).unwrap() < 1e-12);
    }

    #[test]
    fn two_layer_identity_gradient_matches_hand_derivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = NetworkSpec::new(vec![3, 4, 2], vec![3, 2], vec![1.0, 1.0], Activation::Identity).unwrap();
        let w1 = rng::gaussian_matrix(&mut rng, 4, 3, 1.0);
        let w2 = rng::gaussian_matrix(&mut rng, 2, 4, 1.0);
        let w = WeightSet::new(vec![w1.clone(), w2.clone()], &spec).unwrap();
        let data = DataSample::new(rng::gaussian_matrix(&mut rng, 6, 3, 1.0));
        let g = rng::gaussian_matrix(&mut rng, 2, 6, 1.0);
        let grads = gradient(&w, &spec, &data, &g).unwrap();
        let gx = g.matmul(data.x()).unwrap();
        // dW1 = (1/m) W2ᵀ G X, dW2 = (1/m) G X W1ᵀ
        let d1 = w2.matmul_tn(&gx).unwrap().scale(1.0 / 6.0);
        let d2 = gx.matmul_nt(&w1).unwrap().scale(1.0 / 6.0);
        assert!(grads[0].max_abs_diff(&d1).unwrap() < 1e-12);
        assert!(grads[1].max_abs_diff(&d2).unwrap() < 1e-12);
    }

    #[test]
    fn objective_is_homogeneous_in_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = NetworkSpec::uniform(vec![5, 6, 3], 2, 1.5, Activation::Relu).unwrap();
        let w = WeightSet::random_projected(&spec, &mut rng).unwrap();
        let data = DataSample::new(rng::gaussian_matrix(&mut rng, 7, 5, 1.0));
        let g = rng::gaussian_matrix(&mut rng, 3, 7, 1.0);
        let a = gaussian_objective(&w, &spec, &data, &g).unwrap();
        let b = gaussian_objective(&w, &spec, &data, &g.scale(2.0)).unwrap();
        assert!((b - 2.0 * a).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn lipschitz_product_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let spec = NetworkSpec::new(
                vec![5, 7, 6, 3],
                vec![3, 2, 3],
                vec![1.5, 0.7, 2.0],
                Activation::LeakyRelu { alpha: 0.1 },
            )
            .unwrap();
            let w = WeightSet::random_projected(&spec, &mut rng).unwrap();
            let data = DataSample::new(rng::gaussian_matrix(&mut rng, 10, 5, 1.0));
            let out = forward(&w, &spec, &data).unwrap();
            let prod = spec.spectral_product();
            let z = out.output();
            for (i, norm) in data.x().row_norms().iter().enumerate() {
                let col = z.column(i);
                let n = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!(n <= prod * norm * (1.0 + 1e-9));
            }
            // pairs of inputs
            let other = DataSample::new(rng::gaussian_matrix(&mut rng, 10, 5, 1.0));
            let out2 = forward(&w, &spec, &other).unwrap();
            let diff = data.x().sub(other.x()).unwrap().row_norms();
            let od = out.output().sub(out2.output()).unwrap().transpose().row_norms();
            for (a, b) in od.iter().zip(&diff) {
                assert!(*a <= prod * b * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn projection_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = NetworkSpec::new(vec![4, 5, 3], vec![1, 2], vec![0.5, 2.0], Activation::Relu).unwrap();
        let w = WeightSet::random_projected(&spec, &mut rng).unwrap();
        let again = project_weights(&w, &spec).unwrap();
        for (a, b) in w.matrices().iter().zip(again.matrices()) {
            assert!(a.max_abs_diff(b).unwrap() < 1e-10);
        }
        assert_eq!(numerical_rank(w.layer(0), 1e-8).unwrap(), 1);

        // rank-1 matrix with twice the cap gets scaled down to the cap
        let u = [0.6, 0.8, 0.0, 0.0, 0.0];
        let v = [0.0, 1.0, 0.0, 0.0];
        let big = DenseMatrix::from_fn(5, 4, |i, j| 2.0 * 0.5 * u[i] * v[j]);
        let w = WeightSet::new(vec![big, DenseMatrix::zeros(3, 5)], &spec).unwrap();
        let p = project_weights(&w, &spec).unwrap();
        assert!((spectral_norm(p.layer(0), 1e-12).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn document_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = NetworkSpec::uniform(vec![3, 4, 2], 2, 1.25, Activation::LeakyRelu { alpha: 0.01 }).unwrap();
        let w = WeightSet::random_projected(&spec, &mut rng).unwrap();
        let doc = NetworkDocument::from_parts(&spec, Some(&w));
        let text = doc.to_json().unwrap();
        assert!(text.contains("\"kind\": \"leaky_relu\""));
        let (spec2, w2) = NetworkDocument::from_json(&text).unwrap().to_parts().unwrap();
        assert_eq!(spec, spec2);
        assert_eq!(Some(w), w2);
        let bad = text.replace("\"dims\"", "\"dimz\"");
        assert!(NetworkDocument::from_json(&bad).is_err());
    }
}
