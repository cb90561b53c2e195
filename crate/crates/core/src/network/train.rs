use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{backprop, one_hot, Example, Network, NetworkError, Result};
use crate::rng::{stream_rng, streams, StreamRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr0: f64,
    /// Multiplier applied to the learning rate after every full pass.
    pub decay: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Optional cap on the total number of single-sample updates.
    pub max_updates: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr0: 0.05,
            decay: 0.95,
            epochs: 100,
            seed: 0,
            max_updates: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return Err(NetworkError::InvalidConfig(format!(
                "lr0 = {} must be > 0",
                self.lr0
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(NetworkError::InvalidConfig(format!(
                "decay = {} must be in (0, 1]",
                self.decay
            )));
        }
        if self.epochs == 0 {
            return Err(NetworkError::InvalidConfig(
                "epochs must be at least 1".into(),
            ));
        }
        if self.max_updates == Some(0) {
            return Err(NetworkError::InvalidConfig(
                "max_updates must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Learning rate in effect during zero-based `epoch`.
    pub fn lr_at(&self, epoch: usize) -> f64 {
        self.lr0 * self.decay.powi(epoch as i32)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// One-based epoch number.
    pub epoch: usize,
    pub lr: f64,
    pub mean_loss: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub network: Network,
    pub history: Vec<EpochStats>,
    pub updates: usize,
}

fn check_examples(net: &Network, data: &[Example]) -> Result<()> {
    let (inputs, outputs) = (
        net.architecture().input_size(),
        net.architecture().output_size(),
    );
    for ex in data {
        if ex.features.len() != inputs {
            return Err(NetworkError::DimensionMismatch {
                expected: inputs,
                actual: ex.features.len(),
            });
        }
        if ex.class >= outputs {
            return Err(NetworkError::ClassOutOfRange {
                class: ex.class,
                outputs,
            });
        }
    }
    Ok(())
}

pub(crate) fn epoch_order(n: usize, rng: &mut StreamRng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// Mean loss and accuracy of a frozen network over `data`.
fn measure(net: &Network, data: &[Example]) -> Result<(f64, f64)> {
    let outputs = net.architecture().output_size();
    let mut total_loss = 0.0;
    let mut correct = 0usize;
    for ex in data {
        let p = net.predict(&ex.features)?;
        total_loss += super::loss(&p.scores, &one_hot(ex.class, outputs))?;
        correct += usize::from(p.class == ex.class);
    }
    Ok((
        total_loss / data.len() as f64,
        correct as f64 / data.len() as f64,
    ))
}

/// Per-sample SGD. Each epoch visits the training set in a fresh seeded
/// permutation, then multiplies the learning rate by `decay`. Loss and
/// accuracy are measured on the whole set after each epoch and passed to
/// `progress`.
pub fn sgd_train(
    mut net: Network,
    data: &[Example],
    cfg: &TrainConfig,
    progress: &mut dyn FnMut(&EpochStats),
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(NetworkError::EmptyTrainingSet);
    }
    check_examples(&net, data)?;

    let outputs = net.architecture().output_size();
    let targets: Vec<Vec<f64>> = (0..outputs).map(|c| one_hot(c, outputs)).collect();
    let mut rng = stream_rng(cfg.seed, streams::SHUFFLE);
    let mut history = Vec::with_capacity(cfg.epochs);
    let mut updates = 0usize;
    let cap = cfg.max_updates.unwrap_or(usize::MAX);

    for epoch in 0..cfg.epochs {
        let lr = cfg.lr_at(epoch);
        for i in epoch_order(data.len(), &mut rng) {
            if updates == cap {
                break;
            }
            let ex = &data[i];
            let grads = backprop(&net, &ex.features, &targets[ex.class])?;
            net.apply_gradients(&grads, lr);
            updates += 1;
        }
        if !net.is_finite() {
            return Err(NetworkError::Diverged { epoch: epoch + 1 });
        }
        let (mean_loss, train_accuracy) = measure(&net, data)?;
        let stats = EpochStats {
            epoch: epoch + 1,
            lr,
            mean_loss,
            train_accuracy,
        };
        progress(&stats);
        history.push(stats);
        if updates == cap {
            break;
        }
    }
    Ok(TrainOutcome {
        network: net,
        history,
        updates,
    })
}
