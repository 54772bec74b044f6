//! Feed-forward network with rectifier hidden layers and a sigmoid output,
//! plus exact analytic gradients of the mean binary-cross-entropy loss.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

/// Probabilities are clamped into this range before logs.
pub const PROB_CLAMP: f64 = 1e-12;

/// Weights and biases of the distinguisher network.
///
/// `layer_sizes` runs from the input dimension to the single output unit;
/// weight matrices are row-major (out x in).
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParameters {
    layer_sizes: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    init_seed: u64,
}

impl MlpParameters {
    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn num_layers(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn biases(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn init_seed(&self) -> u64 {
        self.init_seed
    }

    /// Rebuilds parameters from raw per-layer values (checkpoint loading).
    pub fn from_raw(
        layer_sizes: Vec<usize>,
        weights: Vec<Vec<f64>>,
        biases: Vec<Vec<f64>>,
    ) -> Result<Self> {
        validate_sizes(&layer_sizes)?;
        if weights.len() != layer_sizes.len() - 1 || biases.len() != weights.len() {
            return Err(Error::InvalidInput("layer count mismatch".into()));
        }
        for l in 0..weights.len() {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            if weights[l].len() != fan_in * fan_out || biases[l].len() != fan_out {
                return Err(Error::InvalidInput(format!("layer {l} shape mismatch")));
            }
        }
        Ok(MlpParameters {
            layer_sizes,
            weights,
            biases,
            init_seed: 0,
        })
    }

    pub(crate) fn step(&mut self, grads: &GradientSet, learning_rate: f64) {
        for l in 0..self.weights.len() {
            for (w, g) in self.weights[l].iter_mut().zip(&grads.weights[l]) {
                *w -= learning_rate * g;
            }
            for (b, g) in self.biases[l].iter_mut().zip(&grads.biases[l]) {
                *b -= learning_rate * g;
            }
        }
    }
}

fn validate_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::Config(
            "layer sizes must chain from the input dimension to 1".into(),
        ));
    }
    if layer_sizes.iter().any(|&s| s == 0) {
        return Err(Error::Config("layer sizes must be positive".into()));
    }
    if *layer_sizes.last().unwrap() != 1 {
        return Err(Error::Config("output layer must have size 1".into()));
    }
    Ok(())
}

/// Seeded initialization: weights drawn N(0, 1) scaled by sqrt(2 / fan_in),
/// biases zero. The same seed reproduces the same parameters.
pub fn init_parameters(layer_sizes: &[usize], seed: u64) -> Result<MlpParameters> {
    validate_sizes(layer_sizes)?;
    let mut rng = seeded_rng(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for l in 0..layer_sizes.len() - 1 {
        let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
        let scale = (2.0 / fan_in as f64).sqrt();
        let w: Vec<f64> = (0..fan_in * fan_out)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
            .collect();
        weights.push(w);
        biases.push(vec![0.0; fan_out]);
    }
    Ok(MlpParameters {
        layer_sizes: layer_sizes.to_vec(),
        weights,
        biases,
        init_seed: seed,
    })
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Post-activation values for every layer; the last entry is the sigmoid
/// output and the rest are rectifier outputs.
fn forward_activations(params: &MlpParameters, x: &[f64]) -> Vec<Vec<f64>> {
    let mut activations = Vec::with_capacity(params.weights.len());
    let last = params.weights.len() - 1;
    let mut input = x;
    for l in 0..params.weights.len() {
        let fan_in = params.layer_sizes[l];
        let fan_out = params.layer_sizes[l + 1];
        let mut out = Vec::with_capacity(fan_out);
        for o in 0..fan_out {
            let row = &params.weights[l][o * fan_in..(o + 1) * fan_in];
            let z = params.biases[l][o]
                + row.iter().zip(input).map(|(w, v)| w * v).sum::<f64>();
            out.push(if l == last { sigmoid(z) } else { z.max(0.0) });
        }
        activations.push(out);
        input = activations.last().unwrap();
    }
    activations
}

/// Forward pass; the returned probability is strictly inside (0, 1).
pub fn forward(params: &MlpParameters, x: &[f64]) -> Result<f64> {
    if x.len() != params.input_dim() {
        return Err(Error::InvalidInput(format!(
            "input dimension {} does not match the network input {}",
            x.len(),
            params.input_dim()
        )));
    }
    let activations = forward_activations(params, x);
    let p = activations.last().unwrap()[0];
    Ok(p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0))
}

/// Hard decision at threshold 0.5.
pub fn decide(probability: f64) -> u8 {
    u8::from(probability >= 0.5)
}

/// Mean binary cross entropy with probabilities clamped to
/// [PROB_CLAMP, 1 - PROB_CLAMP].
pub fn loss_bce(probabilities: &[f64], labels: &[f64]) -> Result<f64> {
    if probabilities.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} probabilities vs {} labels",
            probabilities.len(),
            labels.len()
        )));
    }
    if probabilities.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    let total: f64 = probabilities
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
            -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
        })
        .sum();
    Ok(total / probabilities.len() as f64)
}

/// Parameter-shaped gradients.
#[derive(Debug, Clone)]
pub struct GradientSet {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl GradientSet {
    fn zeros(params: &MlpParameters) -> Self {
        GradientSet {
            weights: params.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: params.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Euclidean norm over all entries.
    pub fn norm(&self) -> f64 {
        let mut sum = 0.0;
        for group in self.weights.iter().chain(&self.biases) {
            for g in group {
                sum += g * g;
            }
        }
        sum.sqrt()
    }
}

/// Analytic gradient of mean-batch BCE plus the L2 penalty l2 * ||w||^2
/// (weights only, contributing 2 * l2 * w per weight).
pub fn gradients(
    params: &MlpParameters,
    inputs: &[&[f64]],
    labels: &[f64],
    l2: f64,
) -> Result<GradientSet> {
    if inputs.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    if inputs.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} inputs vs {} labels",
            inputs.len(),
            labels.len()
        )));
    }
    let dim = params.input_dim();
    if inputs.iter().any(|x| x.len() != dim) {
        return Err(Error::InvalidInput(
            "input dimension does not match the network input".into(),
        ));
    }

    let mut grads = GradientSet::zeros(params);
    let layers = params.weights.len();
    let inv_batch = 1.0 / inputs.len() as f64;

    for (x, &y) in inputs.iter().zip(labels) {
        let activations = forward_activations(params, x);

        // sigmoid + BCE collapse to (p - y) at the output pre-activation
        let mut delta = vec![activations[layers - 1][0] - y];
        for l in (0..layers).rev() {
            let fan_in = params.layer_sizes[l];
            let prev: &[f64] = if l == 0 { x } else { &activations[l - 1] };
            for (o, &d) in delta.iter().enumerate() {
                let term = d * inv_batch;
                let row = &mut grads.weights[l][o * fan_in..(o + 1) * fan_in];
                for (slot, &a) in row.iter_mut().zip(prev) {
                    *slot += term * a;
                }
                grads.biases[l][o] += term;
            }
            if l > 0 {
                // push through the weights, gated by the rectifier
                let mut next = vec![0.0; fan_in];
                for (o, &d) in delta.iter().enumerate() {
                    let row = &params.weights[l][o * fan_in..(o + 1) * fan_in];
                    for (i, slot) in next.iter_mut().enumerate() {
                        *slot += d * row[i];
                    }
                }
                for (slot, &a) in next.iter_mut().zip(prev) {
                    if a <= 0.0 {
                        *slot = 0.0;
                    }
                }
                delta = next;
            }
        }
    }

    if l2 > 0.0 {
        for l in 0..layers {
            for (g, &w) in grads.weights[l].iter_mut().zip(&params.weights[l]) {
                *g += 2.0 * l2 * w;
            }
        }
    }
    Ok(grads)
}
