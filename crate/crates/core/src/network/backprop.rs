use super::{Dense, Network, NetworkError, Result};

/// Loss gradients, shaped like the network's layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Dense>,
}

impl Gradients {
    pub fn zeros_like(net: &Network) -> Self {
        Self {
            layers: net
                .layers
                .iter()
                .map(|l| Dense::zeros(l.inputs, l.outputs))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.biases))
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Exact gradient of `sum((o - t)^2)` with respect to every parameter.
///
/// Output delta is `2 (o - t) o (1 - o)`; hidden deltas are pulled back
/// through `W^T` and scaled by `a (1 - a)`.
pub fn backprop(net: &Network, x: &[f64], target: &[f64]) -> Result<Gradients> {
    let acts = net.forward(x)?;
    let out = acts.last().unwrap();
    if target.len() != out.len() {
        return Err(NetworkError::DimensionMismatch {
            expected: out.len(),
            actual: target.len(),
        });
    }
    let mut grads = Gradients::zeros_like(net);
    let mut delta: Vec<f64> = out
        .iter()
        .zip(target)
        .map(|(o, t)| 2.0 * (o - t) * o * (1.0 - o))
        .collect();

    for l in (0..net.layers.len()).rev() {
        let input = &acts[l];
        let g = &mut grads.layers[l];
        for (r, d) in delta.iter().enumerate() {
            g.biases[r] = *d;
            let row = &mut g.weights[r * g.inputs..(r + 1) * g.inputs];
            for (w, a) in row.iter_mut().zip(input) {
                *w = d * a;
            }
        }
        if l > 0 {
            let layer = &net.layers[l];
            let mut prev = vec![0.0; layer.inputs];
            for (r, d) in delta.iter().enumerate() {
                let row = &layer.weights[r * layer.inputs..(r + 1) * layer.inputs];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += w * d;
                }
            }
            for (p, a) in prev.iter_mut().zip(input) {
                *p *= a * (1.0 - a);
            }
            delta = prev;
        }
    }
    Ok(grads)
}
