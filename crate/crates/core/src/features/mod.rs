//! Cepstral feature extraction and fixed-size utterance compression.
//!
//! An utterance becomes an `N x C` [`MfccMatrix`] (one row per frame), which
//! k-means then squeezes into `K` temporally ordered centroids flattened into
//! a [`FeatureVector`] of length `K * C`.

mod cepstrum;
mod compress;
mod kmeans;
mod mel;
mod spectrum;

pub use cepstrum::{cepstra_from_spectrum, Dct, LOG_FLOOR};
pub use compress::{compress_features, compress_features_with, FeatureVector};
pub use kmeans::{kmeans, kmeans_with, KMeansConfig, KMeansResult};
pub use mel::{build_filterbank, hz_to_mel, mel_to_hz, MelFilterbank};
pub use spectrum::{power_spectrum, SpectrumAnalyzer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::{frame_and_window, AudioError, Signal};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("negative frequency {0} Hz")]
    NegativeFrequency(f64),
    #[error("frame of {frame} samples exceeds FFT size {fft_size}")]
    FrameTooLong { frame: usize, fft_size: usize },
    #[error("{num_filters} filters collapse onto shared DFT bins at FFT size {fft_size}")]
    TooManyFilters { num_filters: usize, fft_size: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("too few points: {points} frames for k = {k}")]
    TooFewPoints { points: usize, k: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
}

pub type Result<T> = std::result::Result<T, FeatureError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MfccConfig {
    pub frame_len: usize,
    pub frame_shift: usize,
    pub fft_size: usize,
    pub num_filters: usize,
    pub coeff_count: usize,
}

impl Default for MfccConfig {
    fn default() -> Self {
        Self {
            frame_len: 300,
            frame_shift: 100,
            fft_size: 512,
            num_filters: 40,
            coeff_count: 14,
        }
    }
}

/// Per-frame cepstral coefficients, row-major `rows x cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct MfccMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl MfccMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || cols == 0 {
            return Err(FeatureError::InvalidParameter("empty MFCC matrix".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(FeatureError::DimensionMismatch {
                expected: cols,
                actual: bad.len(),
            });
        }
        Ok(Self {
            data: rows.concat(),
            rows: rows.len(),
            cols,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.cols..(t + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Reusable MFCC pipeline for one sample rate: framing, power spectrum,
/// mel filterbank, log and DCT.
#[derive(Debug, Clone)]
pub struct MfccExtractor {
    config: MfccConfig,
    analyzer: SpectrumAnalyzer,
    filterbank: MelFilterbank,
    dct: Dct,
}

impl MfccExtractor {
    pub fn new(config: MfccConfig, rate: u32) -> Result<Self> {
        if config.coeff_count == 0 || config.coeff_count > config.num_filters {
            return Err(FeatureError::InvalidParameter(format!(
                "coefficient count {} must be in 1..={}",
                config.coeff_count, config.num_filters
            )));
        }
        if config.frame_len > config.fft_size {
            return Err(FeatureError::FrameTooLong {
                frame: config.frame_len,
                fft_size: config.fft_size,
            });
        }
        Ok(Self {
            analyzer: SpectrumAnalyzer::new(config.fft_size)?,
            filterbank: build_filterbank(config.num_filters, config.fft_size, rate)?,
            dct: Dct::new(config.num_filters),
            config,
        })
    }

    pub fn config(&self) -> &MfccConfig {
        &self.config
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn extract(&self, s: &Signal) -> Result<MfccMatrix> {
        if s.rate != self.filterbank.rate {
            return Err(FeatureError::InvalidParameter(format!(
                "extractor built for {} Hz, signal is {} Hz",
                self.filterbank.rate, s.rate
            )));
        }
        let frames = frame_and_window(s, self.config.frame_len, self.config.frame_shift)?;
        let cols = self.config.coeff_count;
        let mut data = Vec::with_capacity(frames.num_frames() * cols);
        for frame in frames.frames() {
            let spectrum = self.analyzer.power_spectrum(frame)?;
            let energies = self.filterbank.log_energies(&spectrum)?;
            data.extend(self.dct.forward_truncated(&energies, cols));
        }
        Ok(MfccMatrix {
            rows: frames.num_frames(),
            cols,
            data,
        })
    }
}

/// Frames, windows and transforms a preprocessed signal into an `N x C` matrix.
pub fn mfcc(s: &Signal, config: &MfccConfig) -> Result<MfccMatrix> {
    MfccExtractor::new(*config, s.rate)?.extract(s)
}
