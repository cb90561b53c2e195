use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use speechrec::corpus::{PipelineConfig, DEFAULT_TRAIN_FRACTION};
use speechrec::network::{Architecture, TrainConfig};

/// Flat run configuration; every default matches the reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sample_rate: u32,
    pub pre_emphasis_a: f64,
    pub frame_len: usize,
    pub frame_shift: usize,
    pub vad_window_ms: f64,
    pub vad_threshold_ratio: f64,
    pub num_filters: usize,
    pub fft_size: usize,
    pub coeff_count: usize,
    pub kmeans_k: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    /// Hidden layer widths, used when `architecture` is not given.
    pub hidden_layers: Vec<usize>,
    /// Full layer list, input to output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub architecture: Option<Vec<usize>>,
    pub lr0: f64,
    pub decay: f64,
    pub epochs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_updates: Option<usize>,
    pub train_fraction: f64,
    pub seed: u64,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        let t = TrainConfig::default();
        Self {
            sample_rate: p.sample_rate,
            pre_emphasis_a: p.pre_emphasis_a,
            frame_len: p.frame_len,
            frame_shift: p.frame_shift,
            vad_window_ms: p.vad_window_ms,
            vad_threshold_ratio: p.vad_threshold_ratio,
            num_filters: p.num_filters,
            fft_size: p.fft_size,
            coeff_count: p.coeff_count,
            kmeans_k: p.kmeans_k,
            kmeans_restarts: p.kmeans_restarts,
            kmeans_max_iter: p.kmeans_max_iter,
            hidden_layers: vec![100, 95, 90, 95, 100],
            architecture: None,
            lr0: t.lr0,
            decay: t.decay,
            epochs: t.epochs,
            max_updates: None,
            train_fraction: DEFAULT_TRAIN_FRACTION,
            seed: 0,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            sample_rate: self.sample_rate,
            pre_emphasis_a: self.pre_emphasis_a,
            frame_len: self.frame_len,
            frame_shift: self.frame_shift,
            vad_window_ms: self.vad_window_ms,
            vad_threshold_ratio: self.vad_threshold_ratio,
            num_filters: self.num_filters,
            fft_size: self.fft_size,
            coeff_count: self.coeff_count,
            kmeans_k: self.kmeans_k,
            kmeans_restarts: self.kmeans_restarts,
            kmeans_max_iter: self.kmeans_max_iter,
            seed: self.seed,
        }
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            lr0: self.lr0,
            decay: self.decay,
            epochs: self.epochs,
            seed: self.seed,
            max_updates: self.max_updates,
        }
    }

    /// The explicit architecture, or input and output sizes wrapped around
    /// `hidden_layers`.
    pub fn architecture(&self, num_classes: usize) -> Result<Architecture, String> {
        let sizes = match &self.architecture {
            Some(a) => a.clone(),
            None => {
                let mut s = vec![self.kmeans_k * self.coeff_count];
                s.extend(&self.hidden_layers);
                s.push(num_classes);
                s
            }
        };
        Architecture::new(sizes).map_err(|e| e.to_string())
    }
}
