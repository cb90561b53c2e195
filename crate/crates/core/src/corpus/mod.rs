//! Corpus ingestion, splitting, batch featurization, evaluation and a
//! synthetic tone-word generator.

mod eval;
mod featureset;
mod featurize;
mod manifest;
mod pipeline;
mod split;
mod synth;

pub use eval::{evaluate, EvalReport};
pub use featureset::{FeatureRow, FeatureSet};
pub use featurize::{featurize_corpus, FailureRecord, FeaturizeOptions, FeaturizeOutcome};
pub use manifest::{scan_corpus, Manifest, ManifestEntry, ScanOutcome};
pub use pipeline::{Pipeline, PipelineConfig};
pub use split::{stratified_indices, stratified_split, DEFAULT_TRAIN_FRACTION};
pub use synth::{
    class_label, generate_synthetic_corpus, synthesize, ClassTemplate, Jitter, SynthConfig, Tone,
    SYNTH_RATE,
};

use std::path::PathBuf;

use thiserror::Error;

use crate::audio::AudioError;
use crate::features::FeatureError;
use crate::network::NetworkError;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus root {0} does not exist or is not a directory")]
    MissingRoot(PathBuf),
    #[error("no WAV files found under {0}")]
    EmptyCorpus(PathBuf),
    #[error("not a WAV file: {0}")]
    NonWavFile(PathBuf),
    #[error("duplicate path in manifest: {0}")]
    DuplicatePath(PathBuf),
    #[error("class {label} has {count} samples; at least 2 are needed to split")]
    ClassTooSmall { label: String, count: usize },
    #[error("train fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("malformed feature set: {0}")]
    MalformedFeatureSet(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("feature set is empty")]
    EmptyFeatureSet,
    #[error("{} of {total} files failed to featurize", failures.len())]
    StrictFailure {
        failures: Vec<FailureRecord>,
        total: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, CorpusError>;
