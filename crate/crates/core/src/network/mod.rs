//! Fully connected sigmoid classifier trained by per-sample SGD on squared error.

mod backprop;
mod gradcheck;
mod io;
mod train;

pub use backprop::{backprop, Gradients};
pub use gradcheck::{grad_check, grad_check_with, GradCheckReport, ParamCoord, ParamKind};
pub use io::{
    load_model, load_model_with_meta, save_model, save_model_with, ModelMeta, FORMAT_VERSION,
};
pub use train::{sgd_train, EpochStats, TrainConfig, TrainOutcome};

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{stream_rng, streams};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("class index {class} out of range for {outputs} outputs")]
    ClassOutOfRange { class: usize, outputs: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("non-finite parameter after epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
    #[error("model schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("model shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, NetworkError>;

/// Layer widths from input to output.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Architecture(Vec<usize>);

impl Architecture {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(NetworkError::InvalidArchitecture(format!(
                "need at least input and output layers, got {sizes:?}"
            )));
        }
        if sizes.contains(&0) {
            return Err(NetworkError::InvalidArchitecture(format!(
                "layer sizes must be positive, got {sizes:?}"
            )));
        }
        Ok(Self(sizes))
    }

    /// `(112, 100, 95, 90, 95, 100, 60)`.
    pub fn reference() -> Self {
        Self(vec![112, 100, 95, 90, 95, 100, 60])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    pub fn input_size(&self) -> usize {
        self.0[0]
    }

    pub fn output_size(&self) -> usize {
        *self.0.last().expect("validated non-empty")
    }

    pub fn param_count(&self) -> usize {
        self.0.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

impl TryFrom<Vec<usize>> for Architecture {
    type Error = NetworkError;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Architecture> for Vec<usize> {
    fn from(a: Architecture) -> Self {
        a.0
    }
}

impl std::fmt::Display for Architecture {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Total weights and biases: `sum(in * out + out)` over consecutive layers.
pub fn param_count(arch: &Architecture) -> usize {
    arch.param_count()
}

/// One fully connected layer; `weights` is `outputs x inputs`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            biases: vec![0.0; outputs],
        }
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.inputs + col]
    }

    fn affine<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.biases)
            .map(move |(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
    }
}

/// Weight initialization scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScale {
    /// Weights drawn with standard deviation `1 / sqrt(fan_in)`.
    #[default]
    InverseSqrtFanIn,
    /// Unit-variance weights.
    Unit,
}

/// Standard deviation of the bias initializer.
pub const BIAS_INIT_STD: f64 = 0.01;

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Squared error `sum((o - t)^2)`, without a 1/2 factor.
pub fn loss(output: &[f64], target: &[f64]) -> Result<f64> {
    if output.len() != target.len() {
        return Err(NetworkError::DimensionMismatch {
            expected: target.len(),
            actual: output.len(),
        });
    }
    Ok(output
        .iter()
        .zip(target)
        .map(|(o, t)| (o - t) * (o - t))
        .sum())
}

pub fn one_hot(class: usize, len: usize) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[class] = 1.0;
    v
}

/// A feature vector with its class label.
#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: Vec<f64>,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub scores: Vec<f64>,
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    arch: Architecture,
    pub layers: Vec<Dense>,
}

impl Network {
    pub fn zeros(arch: &Architecture) -> Self {
        let layers = arch
            .sizes()
            .windows(2)
            .map(|w| Dense::zeros(w[0], w[1]))
            .collect();
        Self {
            arch: arch.clone(),
            layers,
        }
    }

    /// Builds a network from explicit layers, checking they chain together.
    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| NetworkError::InvalidArchitecture("no layers".into()))?;
        let mut sizes = vec![first.inputs];
        for l in &layers {
            if l.inputs != *sizes.last().unwrap() {
                return Err(NetworkError::ShapeMismatch(format!(
                    "layer expects {} inputs, previous layer has {}",
                    l.inputs,
                    sizes.last().unwrap()
                )));
            }
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(NetworkError::ShapeMismatch(format!(
                    "layer {}x{} carries {} weights and {} biases",
                    l.outputs,
                    l.inputs,
                    l.weights.len(),
                    l.biases.len()
                )));
            }
            sizes.push(l.outputs);
        }
        Ok(Self {
            arch: Architecture::new(sizes)?,
            layers,
        })
    }

    pub fn architecture(&self) -> &Architecture {
        &self.arch
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.biases.len())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.arch.input_size() {
            return Err(NetworkError::DimensionMismatch {
                expected: self.arch.input_size(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    /// Activations of every layer, input first.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_input(x)?;
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(x.to_vec());
        for layer in &self.layers {
            let next: Vec<f64> = layer.affine(acts.last().unwrap()).map(sigmoid).collect();
            acts.push(next);
        }
        Ok(acts)
    }

    pub fn output(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut a = x.to_vec();
        for layer in &self.layers {
            a = layer.affine(&a).map(sigmoid).collect();
        }
        Ok(a)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let scores = self.output(x)?;
        Ok(Prediction {
            class: argmax(&scores),
            scores,
        })
    }

    /// Loss against the one-hot target for `class`.
    pub fn example_loss(&self, ex: &Example) -> Result<f64> {
        let out = self.output(&ex.features)?;
        if ex.class >= out.len() {
            return Err(NetworkError::ClassOutOfRange {
                class: ex.class,
                outputs: out.len(),
            });
        }
        loss(&out, &one_hot(ex.class, out.len()))
    }

    /// `theta -= lr * grad`.
    pub fn apply_gradients(&mut self, grads: &Gradients, lr: f64) {
        for (layer, g) in self.layers.iter_mut().zip(&grads.layers) {
            for (w, dw) in layer.weights.iter_mut().zip(&g.weights) {
                *w -= lr * dw;
            }
            for (b, db) in layer.biases.iter_mut().zip(&g.biases) {
                *b -= lr * db;
            }
        }
    }
}

pub fn init_network(arch: &Architecture, seed: u64) -> Network {
    init_network_with(arch, seed, InitScale::default())
}

/// Gaussian initialization from the seed's init stream: layer by layer,
/// weights then biases.
pub fn init_network_with(arch: &Architecture, seed: u64, scale: InitScale) -> Network {
    let mut rng = stream_rng(seed, streams::INIT);
    let bias_dist = Normal::new(0.0, BIAS_INIT_STD).expect("valid std");
    let mut net = Network::zeros(arch);
    for layer in &mut net.layers {
        let std = match scale {
            InitScale::InverseSqrtFanIn => 1.0 / (layer.inputs as f64).sqrt(),
            InitScale::Unit => 1.0,
        };
        let w_dist = Normal::new(0.0, std).expect("valid std");
        layer
            .weights
            .iter_mut()
            .for_each(|w| *w = w_dist.sample(&mut rng));
        layer
            .biases
            .iter_mut()
            .for_each(|b| *b = bias_dist.sample(&mut rng));
    }
    net
}
