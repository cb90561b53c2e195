use serde::{Deserialize, Serialize};

use super::{kmeans_with, KMeansConfig, MfccMatrix, Result};
use crate::rng::{stream_rng, StreamRng};

/// `k` centroids of `coeff_count` values, flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub k: usize,
    pub coeff_count: usize,
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn compress_features(m: &MfccMatrix, k: usize, seed: u64) -> Result<FeatureVector> {
    compress_features_with(m, k, &mut stream_rng(seed, 0), &KMeansConfig::default())
}

/// Clusters the frames of `m` and emits the centroids in temporal order:
/// ascending mean index of the frames assigned to each cluster.
pub fn compress_features_with(
    m: &MfccMatrix,
    k: usize,
    rng: &mut StreamRng,
    config: &KMeansConfig,
) -> Result<FeatureVector> {
    compress_ordered(m, k, rng, config).map(|(fv, _)| fv)
}

/// Also returns the mean assigned-frame index of each emitted centroid.
pub(crate) fn compress_ordered(
    m: &MfccMatrix,
    k: usize,
    rng: &mut StreamRng,
    config: &KMeansConfig,
) -> Result<(FeatureVector, Vec<f64>)> {
    let result = kmeans_with(m.as_slice(), m.cols(), k, rng, config)?;

    let mut index_sum = vec![0.0; k];
    let mut counts = vec![0usize; k];
    for (t, &a) in result.assignments.iter().enumerate() {
        index_sum[a] += t as f64;
        counts[a] += 1;
    }
    let mean_index: Vec<f64> = index_sum
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| mean_index[a].total_cmp(&mean_index[b]));

    let values = order
        .iter()
        .flat_map(|&c| result.centroids[c].iter().copied())
        .collect();
    let fv = FeatureVector {
        values,
        k,
        coeff_count: m.cols(),
    };
    Ok((fv, order.iter().map(|&c| mean_index[c]).collect()))
}
