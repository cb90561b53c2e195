use std::path::PathBuf;

use serde::Serialize;

use super::{CorpusError, FeatureRow, FeatureSet, Manifest, Pipeline, PipelineConfig, Result};
use crate::parallel::Parallelism;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeaturizeOptions {
    /// Fail the whole batch if any file fails.
    pub strict: bool,
    pub parallelism: Parallelism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub entry_index: usize,
    pub path: PathBuf,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct FeaturizeOutcome {
    /// One row per successful entry, in manifest order.
    pub features: FeatureSet,
    /// Manifest position of each row.
    pub entry_indices: Vec<usize>,
    pub failures: Vec<FailureRecord>,
}

impl FeaturizeOutcome {
    /// The manifest entries that produced a row, aligned with the rows.
    pub fn row_manifest(&self, m: &Manifest) -> Manifest {
        m.subset(&self.entry_indices)
    }
}

/// Runs the pipeline over every manifest entry. Failed files are recorded
/// and left out, unless `strict` is set.
pub fn featurize_corpus(
    m: &Manifest,
    config: &PipelineConfig,
    opts: FeaturizeOptions,
) -> Result<FeaturizeOutcome> {
    let pipeline = Pipeline::new(config.clone())?;
    let results = opts
        .parallelism
        .map(m.entries(), |i, e| pipeline.process_file(&e.path, i));

    let mut rows = Vec::with_capacity(m.len());
    let mut entry_indices = Vec::with_capacity(m.len());
    let mut failures = Vec::new();
    for (i, (entry, result)) in m.entries().iter().zip(results).enumerate() {
        match result {
            Ok(fv) => {
                rows.push(FeatureRow {
                    class: entry.class_index,
                    values: fv.values,
                });
                entry_indices.push(i);
            }
            Err(err) => {
                log::warn!("{}: {err}", entry.path.display());
                failures.push(FailureRecord {
                    entry_index: i,
                    path: entry.path.clone(),
                    error: err.to_string(),
                });
            }
        }
    }
    if opts.strict && !failures.is_empty() {
        return Err(CorpusError::StrictFailure {
            failures,
            total: m.len(),
        });
    }
    let echo = serde_json::to_value(config).expect("config serializes");
    Ok(FeaturizeOutcome {
        features: FeatureSet::new(config.feature_dim(), m.labels().to_vec(), echo, rows)?,
        entry_indices,
        failures,
    })
}
