use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};
use crate::audio::{
    normalize, pre_emphasize, read_wav, remove_silence, resample, voiced_segments, AudioError,
    Signal,
};
use crate::features::{
    compress_features_with, FeatureVector, KMeansConfig, MfccConfig, MfccExtractor,
};
use crate::rng::{stream_rng, streams};

/// Every tunable of the utterance-to-vector pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub sample_rate: u32,
    pub pre_emphasis_a: f64,
    pub frame_len: usize,
    pub frame_shift: usize,
    pub vad_window_ms: f64,
    pub vad_threshold_ratio: f64,
    pub num_filters: usize,
    pub fft_size: usize,
    pub coeff_count: usize,
    #[serde(rename = "k")]
    pub kmeans_k: usize,
    pub kmeans_restarts: usize,
    pub kmeans_max_iter: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sample_rate: 10_000,
            pre_emphasis_a: 0.9375,
            frame_len: 300,
            frame_shift: 100,
            vad_window_ms: 108.0,
            vad_threshold_ratio: 0.01,
            num_filters: 40,
            fft_size: 512,
            coeff_count: 14,
            kmeans_k: 8,
            kmeans_restarts: 10,
            kmeans_max_iter: 300,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn feature_dim(&self) -> usize {
        self.kmeans_k * self.coeff_count
    }

    pub fn mfcc_config(&self) -> MfccConfig {
        MfccConfig {
            frame_len: self.frame_len,
            frame_shift: self.frame_shift,
            fft_size: self.fft_size,
            num_filters: self.num_filters,
            coeff_count: self.coeff_count,
        }
    }

    pub fn kmeans_config(&self) -> KMeansConfig {
        KMeansConfig {
            max_iter: self.kmeans_max_iter,
            restarts: self.kmeans_restarts,
        }
    }
}

/// A validated config plus the reusable FFT plan, filterbank and DCT.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: PipelineConfig,
    extractor: MfccExtractor,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        if config.kmeans_k == 0 {
            return Err(CorpusError::InvalidParameter(
                "kmeans_k must be at least 1".into(),
            ));
        }
        if config.frame_shift == 0 {
            return Err(CorpusError::InvalidParameter(
                "frame_shift must be at least 1".into(),
            ));
        }
        let extractor = MfccExtractor::new(config.mfcc_config(), config.sample_rate)?;
        Ok(Self { config, extractor })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Resample, normalize, strip silence and pre-emphasize.
    pub fn preprocess(&self, raw: &Signal) -> Result<Signal> {
        let c = &self.config;
        // digital silence has nothing voiced in it
        let s = match normalize(&resample(raw, c.sample_rate)?) {
            Err(AudioError::SilentSignal) => return Err(AudioError::EmptyVoiced.into()),
            other => other?,
        };
        let segments = voiced_segments(&s, c.vad_window_ms, c.vad_threshold_ratio)?;
        let voiced = remove_silence(&s, &segments)?;
        Ok(pre_emphasize(&voiced, c.pre_emphasis_a)?)
    }

    /// Full pipeline on one signal. `entry_index` picks the k-means stream, so
    /// each utterance gets the same vector however the batch is scheduled.
    pub fn process_signal(&self, raw: &Signal, entry_index: usize) -> Result<FeatureVector> {
        let s = self.preprocess(raw)?;
        let m = self.extractor.extract(&s)?;
        let mut rng = stream_rng(self.config.seed, streams::KMEANS_BASE + entry_index as u64);
        Ok(compress_features_with(
            &m,
            self.config.kmeans_k,
            &mut rng,
            &self.config.kmeans_config(),
        )?)
    }

    pub fn process_file(&self, path: &Path, entry_index: usize) -> Result<FeatureVector> {
        self.process_signal(&read_wav(path)?, entry_index)
    }
}
