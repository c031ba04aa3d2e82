//! Closed-form complexity and generalization bounds.
//!
//! All evaluators take a [`BoundInputs`], built either from measured weights
//! or from the caps (worst case over the class). Big-O bounds are evaluated
//! with leading constant 1; the universal constants of the chain rule and of
//! the collapse bound are configurable and recorded in every report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::output::{digest, format_float};
use crate::linalg::{l21_norm_of_transpose, rank_from_values, svd, DEFAULT_RANK_TOL};
use crate::network::{DataSample, NetworkSpec, WeightSet};

fn one() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    0.1
}

/// Universal constants and confidence used by the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(default = "one")]
    pub c1: f64,
    #[serde(default = "one")]
    pub c2: f64,
    /// Constant of the composition (collapse) bound.
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Lipschitz constant of the loss.
    #[serde(default = "one")]
    pub lipschitz: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self { c1: 1.0, c2: 1.0, c: 1.0, delta: 0.1, lipschitz: 1.0 }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c", self.c), ("lipschitz", self.lipschitz)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("constant {name} must be positive, got {v}")));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        Ok(())
    }
}

/// Sample statistics entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataStats {
    pub m: usize,
    /// `max_i ‖x_i‖`.
    pub radius: f64,
    /// `‖X‖_F`.
    pub frobenius: f64,
}

impl DataStats {
    pub fn of(data: &DataSample) -> Self {
        Self { m: data.m(), radius: data.radius(), frobenius: data.frobenius_norm() }
    }

    /// Every sample on the sphere of radius `radius`.
    pub fn worst_case(m: usize, radius: f64) -> Self {
        Self { m, radius, frobenius: radius * (m as f64).sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub spectral_norms: Vec<f64>,
    pub frobenius_norms: Vec<f64>,
    /// `‖W_iᵀ‖_{2,1}` per layer.
    pub l21_norms: Vec<f64>,
    pub ranks: Vec<usize>,
    /// `h_0 = d, h_1, …, h_L`.
    pub dims: Vec<usize>,
    pub data: DataStats,
    /// Lipschitz constant of the activation.
    pub activation_lipschitz: f64,
    pub constants: Constants,
}

impl BoundInputs {
    /// Norms and numerical ranks (relative tolerance 1e-8) measured on `w`.
    pub fn from_weights(w: &WeightSet, spec: &NetworkSpec, data: DataStats, constants: Constants) -> Result<Self> {
        w.check_shapes(spec)?;
        let mut spectral_norms = Vec::new();
        let mut frobenius_norms = Vec::new();
        let mut l21_norms = Vec::new();
        let mut ranks = Vec::new();
        for m in w.matrices() {
            let sigma = svd(m)?.singular_values;
            spectral_norms.push(sigma[0]);
            frobenius_norms.push(m.frobenius_norm());
            l21_norms.push(l21_norm_of_transpose(m));
            ranks.push(rank_from_values(&sigma, DEFAULT_RANK_TOL));
        }
        let inputs = Self {
            spectral_norms,
            frobenius_norms,
            l21_norms,
            ranks,
            dims: spec.dims().to_vec(),
            data,
            activation_lipschitz: spec.activation().lipschitz(),
            constants,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    /// Worst case over the class: `‖W_i‖₂ = B_i`, `rank = r_i`,
    /// `‖W_i‖_F = √r_i B_i`, `‖W_iᵀ‖_{2,1} = √(r_i h_i) B_i`.
    pub fn from_caps(spec: &NetworkSpec, data: DataStats, constants: Constants) -> Result<Self> {
        let depth = spec.depth();
        let b = spec.spectral_caps();
        let r = spec.rank_caps();
        let inputs = Self {
            spectral_norms: b.to_vec(),
            frobenius_norms: (0..depth).map(|i| (r[i] as f64).sqrt() * b[i]).collect(),
            l21_norms: (0..depth).map(|i| ((r[i] * spec.dims()[i + 1]) as f64).sqrt() * b[i]).collect(),
            ranks: r.to_vec(),
            dims: spec.dims().to_vec(),
            data,
            activation_lipschitz: spec.activation().lipschitz(),
            constants,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        let depth = self.depth();
        if depth == 0 || self.dims.len() != depth + 1 {
            return Err(Error::InvalidArgument("need dims h_0..h_L for at least one layer".into()));
        }
        if self.frobenius_norms.len() != depth || self.l21_norms.len() != depth || self.ranks.len() != depth {
            return Err(Error::InvalidArgument("per-layer inputs have inconsistent lengths".into()));
        }
        let norms = self.spectral_norms.iter().chain(&self.frobenius_norms).chain(&self.l21_norms);
        if norms.chain([&self.data.radius, &self.data.frobenius]).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument("norms must be finite and >= 0".into()));
        }
        if self.data.m == 0 {
            return Err(Error::InvalidArgument("sample size must be positive".into()));
        }
        self.constants.validate()
    }

    pub fn depth(&self) -> usize {
        self.spectral_norms.len()
    }

    pub fn spectral_product(&self) -> f64 {
        self.spectral_norms.iter().product()
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// `max(h_1, …, h_L)`.
    pub fn max_width(&self) -> usize {
        self.dims[1..].iter().copied().max().unwrap_or(0)
    }

    /// `𝔯_i = min_{j ≤ i} rank(W_j)` for every layer.
    pub fn running_min_ranks(&self) -> Vec<usize> {
        self.ranks
            .iter()
            .scan(usize::MAX, |acc, &r| {
                *acc = (*acc).min(r);
                Some(*acc)
            })
            .collect()
    }

    fn check_layer(&self, layer: usize) -> Result<()> {
        if layer == 0 || layer > self.depth() {
            return Err(Error::InvalidArgument(format!("layer {layer} outside 1..={}", self.depth())));
        }
        Ok(())
    }

    fn sqrt_m(&self) -> f64 {
        (self.data.m as f64).sqrt()
    }
}

/// Shallow layer `i` (1-based): `𝓛(φ) R √(h_i rank_i / m) ‖W_i‖₂`.
pub fn bound_single_layer(inputs: &BoundInputs, layer: usize) -> Result<f64> {
    inputs.check_layer(layer)?;
    let i = layer - 1;
    let h = inputs.dims[layer] as f64;
    let rank = inputs.ranks[i] as f64;
    Ok(inputs.activation_lipschitz
        * inputs.data.radius
        * (h * rank / inputs.data.m as f64).sqrt()
        * inputs.spectral_norms[i])
}

/// Deep linear network: `R √(h_L min_i rank_i / m) Π ‖W_i‖₂`.
pub fn bound_deep_linear(inputs: &BoundInputs) -> f64 {
    let h_out = inputs.dims[inputs.depth()] as f64;
    let min_rank = inputs.ranks.iter().copied().min().unwrap_or(0) as f64;
    inputs.data.radius * (h_out * min_rank / inputs.data.m as f64).sqrt() * inputs.spectral_product()
}

/// Diameter of the first `prefix` layers:
/// `‖X‖_F √(2 min_{j≤ℓ} rank_j) · 2 Π_{j≤ℓ} ‖W_j‖₂`.
pub fn bound_diameter(inputs: &BoundInputs, prefix: usize) -> Result<f64> {
    inputs.check_layer(prefix)?;
    let min_rank = inputs.ranks[..prefix].iter().copied().min().unwrap_or(0) as f64;
    let prod: f64 = inputs.spectral_norms[..prefix].iter().product();
    Ok(inputs.data.frobenius * (2.0 * min_rank).sqrt() * 2.0 * prod)
}

/// Gaussian average of Lipschitz quotients for layer `ℓ`: `‖W_ℓ‖_F √h_ℓ`.
pub fn bound_r_term(inputs: &BoundInputs, layer: usize) -> Result<f64> {
    inputs.check_layer(layer)?;
    Ok(inputs.frobenius_norms[layer - 1] * (inputs.dims[layer] as f64).sqrt())
}

/// The chain-rule bound in full:
///
/// ```text
/// (‖X‖_F/m) { ‖W_1‖_F √h_1 Π_{i=2..L} C₁‖W_i‖₂
///            + Σ_{i=2..L} C₁^{L−i} C₂ 2√(2𝔯_i) κ_i ‖W_i‖_F √h_i }
/// ```
///
/// with `κ_i = Π_{j≠i} ‖W_j‖₂` over all `L` layers.
pub fn bound_main_full(inputs: &BoundInputs) -> f64 {
    let depth = inputs.depth();
    let c = &inputs.constants;
    let s = &inputs.spectral_norms;
    let f = &inputs.frobenius_norms;
    let h = |layer: usize| (inputs.dims[layer] as f64).sqrt();
    let running = inputs.running_min_ranks();

    let direct = f[0] * h(1) * (1..depth).map(|i| c.c1 * s[i]).product::<f64>();
    let disturbance: f64 = (2..=depth)
        .map(|layer| {
            let i = layer - 1;
            let kappa: f64 = (0..depth).filter(|&j| j != i).map(|j| s[j]).product();
            c.c1.powi((depth - layer) as i32)
                * c.c2
                * 2.0
                * (2.0 * running[i] as f64).sqrt()
                * kappa
                * f[i]
                * h(layer)
        })
        .sum();
    inputs.data.frobenius / inputs.data.m as f64 * (direct + disturbance)
}

/// `C₁^L Π‖W_i‖₂ R L r √(h/m)` with `r` the largest rank and `h` the largest width.
pub fn bound_main_simplified(inputs: &BoundInputs) -> f64 {
    let depth = inputs.depth();
    inputs.constants.c1.powi(depth as i32)
        * inputs.spectral_product()
        * inputs.data.radius
        * depth as f64
        * inputs.max_rank() as f64
        * (inputs.max_width() as f64 / inputs.data.m as f64).sqrt()
}

/// Product-of-Frobenius-norms bound: `R √L Π‖W_i‖_F / √m`.
pub fn bound_golowich(inputs: &BoundInputs) -> f64 {
    let prod: f64 = inputs.frobenius_norms.iter().product();
    inputs.data.radius * (inputs.depth() as f64).sqrt() * prod / inputs.sqrt_m()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// PAC-Bayes spectral bound: `R Π‖W_i‖₂ √(L² h Σ ‖W_i‖_F²/‖W_i‖₂² / m)`.
pub fn bound_neyshabur(inputs: &BoundInputs) -> f64 {
    let l = inputs.depth() as f64;
    let stable_ranks: f64 = inputs
        .frobenius_norms
        .iter()
        .zip(&inputs.spectral_norms)
        .map(|(&f, &s)| ratio(f, s).powi(2))
        .sum();
    inputs.data.radius
        * inputs.spectral_product()
        * (l * l * inputs.max_width() as f64 * stable_ranks / inputs.data.m as f64).sqrt()
}

/// Covering-number spectral bound:
/// `R Π‖W_i‖₂ (Σ (‖W_iᵀ‖_{2,1}/‖W_i‖₂)^{2/3})^{3/2} / √m`.
pub fn bound_bartlett(inputs: &BoundInputs) -> f64 {
    let sum: f64 = inputs
        .l21_norms
        .iter()
        .zip(&inputs.spectral_norms)
        .map(|(&a, &s)| ratio(a, s).powf(2.0 / 3.0))
        .sum();
    inputs.data.radius * inputs.spectral_product() * sum.powf(1.5) / inputs.sqrt_m()
}

/// Confidence term `√(9 log(2/δ) / (2m))`.
pub fn confidence_term(delta: f64, m: usize) -> f64 {
    (9.0 * (2.0 / delta).ln() / (2.0 * m as f64)).sqrt()
}

/// Complexity-plus-confidence term for a network class composed with an
/// `𝓛`-Lipschitz loss: `√(𝓛π) Ĝ + √(9 log(2/δ)/(2m))`. Add the empirical risk
/// to get the bound on the expected loss.
pub fn assemble_generalization_bound(complexity: f64, inputs: &BoundInputs) -> Result<f64> {
    inputs.constants.validate()?;
    Ok((inputs.constants.lipschitz * std::f64::consts::PI).sqrt() * complexity
        + confidence_term(inputs.constants.delta, inputs.data.m))
}

/// Same for the complexity of the loss class itself: `√(2π) Ĝ + √(9 log(2/δ)/(2m))`.
pub fn assemble_loss_class_bound(complexity: f64, inputs: &BoundInputs) -> Result<f64> {
    inputs.constants.validate()?;
    Ok((2.0 * std::f64::consts::PI).sqrt() * complexity + confidence_term(inputs.constants.delta, inputs.data.m))
}

/// First layer (1-based) with rank at most one, if any.
pub fn bottleneck_layer(inputs: &BoundInputs) -> Option<usize> {
    inputs.ranks.iter().position(|&r| r <= 1).map(|i| i + 1)
}

/// `c ℓ (R/√m + log^{3/2}(m) R̂(H))` for a class `ℓ`-Lipschitz maps composed
/// with a bottom class of complexity `bottom_complexity`.
pub fn collapse_formula(c: f64, lipschitz: f64, radius: f64, m: usize, bottom_complexity: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("collapse bound needs m >= 2, got {m}")));
    }
    if !(bottom_complexity >= 0.0) {
        return Err(Error::InvalidArgument(format!("bottom complexity must be >= 0, got {bottom_complexity}")));
    }
    let m = m as f64;
    Ok(c * lipschitz * (radius / m.sqrt() + m.ln().powf(1.5) * bottom_complexity))
}

/// Collapse bound for a network with a rank-1 layer: the layers above the
/// first rank-1 layer act as a scalar map with Lipschitz constant
/// `Π_{j > k} ‖W_j‖₂`; `bottom_complexity` is the complexity of layers `1..=k`.
pub fn bound_collapse(inputs: &BoundInputs, bottom_complexity: f64) -> Result<f64> {
    let k = bottleneck_layer(inputs)
        .ok_or_else(|| Error::InvalidArgument("collapse bound needs a layer of rank at most 1".into()))?;
    let lipschitz: f64 = inputs.spectral_norms[k..].iter().product();
    collapse_formula(inputs.constants.c, lipschitz, inputs.data.radius, inputs.data.m, bottom_complexity)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedBound {
    pub name: String,
    pub value: f64,
    /// `value / (Π‖W_i‖₂ · R)`, zero when the denominator vanishes.
    pub normalized: f64,
}

/// Every bound evaluated on one set of inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub values: Vec<NamedBound>,
    pub constants_used: Constants,
    pub depth: usize,
    pub m: usize,
    pub r_max: usize,
    pub h_max: usize,
    pub spectral_product: f64,
    pub radius: f64,
    pub inputs_digest: String,
}

pub const REPORT_CSV_HEADER: [&str; 15] = [
    "bound", "value", "C1", "C2", "c", "delta", "lipschitz", "L", "m", "r_max", "h_max", "prod_B", "R",
    "normalized", "digest",
];

impl BoundReport {
    /// Evaluates all bounds. The collapse bound is included when
    /// `collapse_bottom` is given and the inputs contain a rank-1 layer.
    pub fn build(inputs: &BoundInputs, collapse_bottom: Option<f64>) -> Result<Self> {
        inputs.validate()?;
        let depth = inputs.depth();
        let mut raw: Vec<(String, f64)> = vec![
            ("main_full".into(), bound_main_full(inputs)),
            ("main_simplified".into(), bound_main_simplified(inputs)),
            ("deep_linear".into(), bound_deep_linear(inputs)),
            ("diameter".into(), bound_diameter(inputs, depth)?),
        ];
        for layer in 1..=depth {
            raw.push((format!("r_term_{layer}"), bound_r_term(inputs, layer)?));
        }
        raw.push(("single_layer".into(), bound_single_layer(inputs, 1)?));
        raw.push(("golowich".into(), bound_golowich(inputs)));
        raw.push(("neyshabur".into(), bound_neyshabur(inputs)));
        raw.push(("bartlett".into(), bound_bartlett(inputs)));
        if let (Some(bottom), Some(_)) = (collapse_bottom, bottleneck_layer(inputs)) {
            raw.push(("collapse".into(), bound_collapse(inputs, bottom)?));
        }
        let scale = inputs.spectral_product() * inputs.data.radius;
        let values = raw
            .into_iter()
            .map(|(name, value)| {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::NonFinite(format!("bound {name} evaluated to {value}")));
                }
                Ok(NamedBound { name, value, normalized: ratio(value, scale) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            values,
            constants_used: inputs.constants,
            depth,
            m: inputs.data.m,
            r_max: inputs.max_rank(),
            h_max: inputs.max_width(),
            spectral_product: inputs.spectral_product(),
            radius: inputs.data.radius,
            inputs_digest: digest(&serde_json::to_vec(inputs)?),
        })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|b| b.name == name).map(|b| b.value)
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let c = &self.constants_used;
        self.values
            .iter()
            .map(|b| {
                vec![
                    b.name.clone(),
                    format_float(b.value),
                    format_float(c.c1),
                    format_float(c.c2),
                    format_float(c.c),
                    format_float(c.delta),
                    format_float(c.lipschitz),
                    self.depth.to_string(),
                    self.m.to_string(),
                    self.r_max.to_string(),
                    self.h_max.to_string(),
                    format_float(self.spectral_product),
                    format_float(self.radius),
                    format_float(b.normalized),
                    self.inputs_digest.clone(),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        crate::harness::output::csv_string(&REPORT_CSV_HEADER, &self.csv_rows())
    }
}
