//! Finite-difference verification of [`backprop`](super::backprop).

use super::{backprop, one_hot, Example, Gradients, Network, NetworkError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight { row: usize, col: usize },
    Bias { row: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamCoord {
    pub layer: usize,
    pub kind: ParamKind,
}

impl std::fmt::Display for ParamCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            ParamKind::Weight { row, col } => {
                write!(f, "layer {} weight[{row}][{col}]", self.layer)
            }
            ParamKind::Bias { row } => write!(f, "layer {} bias[{row}]", self.layer),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst: Option<ParamCoord>,
    pub worst_sample: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub params_checked: usize,
}

/// `sigmoid(z + d) - sigmoid(z)` without cancellation.
fn sigmoid_step(z: f64, d: f64) -> f64 {
    if z < 0.0 {
        return -sigmoid_step(-z, -d);
    }
    let e = (-z).exp();
    let ed = (-z - d).exp();
    e * -(-d).exp_m1() / ((1.0 + ed) * (1.0 + e))
}

/// `L(theta + step) - L(theta)` for a step of `dz` on unit `unit`'s
/// pre-activation in layer `layer`. Activations are carried as offsets from
/// the unperturbed pass, so the result keeps its relative precision no
/// matter how small the step is.
fn loss_step(
    net: &Network,
    zs: &[Vec<f64>],
    out: &[f64],
    target: &[f64],
    layer: usize,
    unit: usize,
    dz: f64,
) -> f64 {
    let mut diff = vec![0.0; zs[layer].len()];
    diff[unit] = sigmoid_step(zs[layer][unit], dz);
    for (l, z) in zs.iter().enumerate().skip(layer + 1) {
        let w = &net.layers[l];
        diff = w
            .weights
            .chunks_exact(w.inputs)
            .zip(z)
            .map(|(row, &z)| {
                let step: f64 = row.iter().zip(&diff).map(|(w, d)| w * d).sum();
                sigmoid_step(z, step)
            })
            .collect();
    }
    // (o + d - t)^2 - (o - t)^2
    diff.iter()
        .zip(out)
        .zip(target)
        .map(|((d, o), t)| d * (2.0 * (o - t) + d))
        .sum()
}

/// Compares backprop gradients against the central difference
/// `(L(theta + eps) - L(theta - eps)) / 2 eps` for every parameter and
/// sample; reports the worst `|g_bp - g_fd| / max(|g_bp|, |g_fd|, 1e-8)`.
pub fn grad_check(net: &Network, samples: &[Example], eps: f64) -> Result<GradCheckReport> {
    grad_check_with(net, samples, eps, |n, x, t| backprop(n, x, t))
}

/// As [`grad_check`], with a caller-supplied analytic gradient.
pub fn grad_check_with<F>(
    net: &Network,
    samples: &[Example],
    eps: f64,
    analytic: F,
) -> Result<GradCheckReport>
where
    F: Fn(&Network, &[f64], &[f64]) -> Result<Gradients>,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(NetworkError::InvalidConfig(format!(
            "eps = {eps} must be > 0"
        )));
    }
    let outputs = net.architecture().output_size();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
        worst_sample: 0,
        analytic: 0.0,
        numeric: 0.0,
        params_checked: 0,
    };
    for (s, ex) in samples.iter().enumerate() {
        let target = one_hot(ex.class, outputs);
        let grads = analytic(net, &ex.features, &target)?;
        let acts = net.forward(&ex.features)?;
        let zs: Vec<Vec<f64>> = net
            .layers
            .iter()
            .zip(&acts)
            .map(|(layer, a)| layer.affine(a).collect())
            .collect();
        let out = acts.last().unwrap();
        for (l, layer) in net.layers.iter().enumerate() {
            let g = &grads.layers[l];
            for row in 0..layer.outputs {
                let coords = (0..layer.inputs)
                    .map(|col| {
                        (
                            ParamKind::Weight { row, col },
                            g.weights[row * layer.inputs + col],
                            acts[l][col],
                        )
                    })
                    .chain(std::iter::once((
                        ParamKind::Bias { row },
                        g.biases[row],
                        1.0,
                    )));
                for (kind, g_bp, scale) in coords {
                    let dz = eps * scale;
                    let plus = loss_step(net, &zs, out, &target, l, row, dz);
                    let minus = loss_step(net, &zs, out, &target, l, row, -dz);
                    let g_fd = (plus - minus) / (2.0 * eps);
                    let rel = (g_bp - g_fd).abs() / g_bp.abs().max(g_fd.abs()).max(1e-8);
                    report.params_checked += 1;
                    if rel > report.max_rel_error || report.worst.is_none() {
                        report.max_rel_error = rel;
                        report.worst = Some(ParamCoord { layer: l, kind });
                        report.worst_sample = s;
                        report.analytic = g_bp;
                        report.numeric = g_fd;
                    }
                }
            }
        }
    }
    Ok(report)
}
