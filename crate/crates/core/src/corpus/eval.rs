use std::fmt;

use serde::Serialize;

use super::{CorpusError, FeatureSet, Result};
use crate::network::Network;
use crate::parallel::Parallelism;

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    /// `confusion[truth][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    /// `None` for classes with no samples.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub sample_count: usize,
    pub labels: Vec<String>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    accuracy: f64,
    sample_count: usize,
    confusion: &'a [Vec<usize>],
    per_class: &'a [Option<f64>],
    labels: &'a [String],
}

impl EvalReport {
    /// Tallies `(truth, predicted)` pairs.
    pub fn from_predictions(pairs: &[(usize, usize)], labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        let mut confusion = vec![vec![0usize; n]; n];
        for &(t, p) in pairs {
            if t >= n || p >= n {
                return Err(CorpusError::DimensionMismatch {
                    expected: n,
                    actual: t.max(p) + 1,
                });
            }
            confusion[t][p] += 1;
        }
        let sample_count = pairs.len();
        let correct: usize = (0..n).map(|c| confusion[c][c]).sum();
        let per_class_accuracy = confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let total: usize = row.iter().sum();
                (total > 0).then(|| row[c] as f64 / total as f64)
            })
            .collect();
        Ok(Self {
            accuracy: if sample_count == 0 {
                0.0
            } else {
                correct as f64 / sample_count as f64
            },
            confusion,
            per_class_accuracy,
            sample_count,
            labels,
        })
    }

    pub fn correct(&self) -> usize {
        (0..self.confusion.len())
            .map(|c| self.confusion[c][c])
            .sum()
    }

    pub fn to_json(&self) -> String {
        let doc = ReportDoc {
            accuracy: self.accuracy,
            sample_count: self.sample_count,
            confusion: &self.confusion,
            per_class: &self.per_class_accuracy,
            labels: &self.labels,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "accuracy: {:.2}% ({}/{})",
            100.0 * self.accuracy,
            self.correct(),
            self.sample_count
        )?;
        let width = self
            .labels
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(5)
            .max(5);
        writeln!(
            f,
            "{:<width$}  {:>7}  {:>8}",
            "class", "correct", "accuracy"
        )?;
        for (c, row) in self.confusion.iter().enumerate() {
            let total: usize = row.iter().sum();
            let acc = match self.per_class_accuracy[c] {
                Some(a) => format!("{:.2}%", 100.0 * a),
                None => "n/a".into(),
            };
            writeln!(
                f,
                "{:<width$}  {:>7}  {:>8}",
                self.labels[c],
                format!("{}/{}", row[c], total),
                acc
            )?;
        }
        Ok(())
    }
}

/// Classifies every row of `fs` with a frozen network.
pub fn evaluate(net: &Network, fs: &FeatureSet, parallelism: Parallelism) -> Result<EvalReport> {
    let arch = net.architecture();
    if fs.feature_dim() != arch.input_size() {
        return Err(CorpusError::DimensionMismatch {
            expected: arch.input_size(),
            actual: fs.feature_dim(),
        });
    }
    if fs.num_classes() != arch.output_size() {
        return Err(CorpusError::DimensionMismatch {
            expected: arch.output_size(),
            actual: fs.num_classes(),
        });
    }
    if fs.is_empty() {
        return Err(CorpusError::EmptyFeatureSet);
    }
    let predictions = parallelism.map(fs.rows(), |_, r| {
        net.predict(&r.values).map(|p| (r.class, p.class))
    });
    let pairs = predictions
        .into_iter()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    EvalReport::from_predictions(&pairs, fs.labels().to_vec())
}
