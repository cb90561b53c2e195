use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};
use crate::network::Example;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub class: usize,
    pub values: Vec<f64>,
}

/// Fixed-length utterance vectors with their class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    feature_dim: usize,
    num_classes: usize,
    /// Settings that produced the vectors.
    pub config: serde_json::Value,
    labels: Vec<String>,
    rows: Vec<FeatureRow>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    feature_dim: usize,
    num_classes: usize,
    config: serde_json::Value,
    #[serde(default)]
    label_table: Vec<String>,
}

impl FeatureSet {
    pub fn new(
        feature_dim: usize,
        labels: Vec<String>,
        config: serde_json::Value,
        rows: Vec<FeatureRow>,
    ) -> Result<Self> {
        let num_classes = labels.len();
        for r in &rows {
            if r.values.len() != feature_dim {
                return Err(CorpusError::DimensionMismatch {
                    expected: feature_dim,
                    actual: r.values.len(),
                });
            }
            if r.class >= num_classes {
                return Err(CorpusError::MalformedFeatureSet(format!(
                    "class index {} with only {num_classes} classes",
                    r.class
                )));
            }
        }
        Ok(Self {
            feature_dim,
            num_classes,
            config,
            labels,
            rows,
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[FeatureRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn classes(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.class).collect()
    }

    pub fn subset(&self, indices: &[usize]) -> FeatureSet {
        FeatureSet {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: self.labels.clone(),
            config: self.config.clone(),
            ..*self
        }
    }

    pub fn examples(&self) -> Vec<Example> {
        self.rows
            .iter()
            .map(|r| Example {
                features: r.values.clone(),
                class: r.class,
            })
            .collect()
    }

    /// One JSON header line, then `class,v0,v1,...` per row.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        let header = Header {
            feature_dim: self.feature_dim,
            num_classes: self.num_classes,
            config: self.config.clone(),
            label_table: self.labels.clone(),
        };
        serde_json::to_writer(&mut out, &header)
            .map_err(|e| CorpusError::MalformedFeatureSet(e.to_string()))?;
        out.write_all(b"\n")?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        for r in &self.rows {
            // f64 Display is the shortest string that parses back to the same bits
            let mut rec = Vec::with_capacity(self.feature_dim + 1);
            rec.push(r.class.to_string());
            rec.extend(r.values.iter().map(f64::to_string));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut input = BufReader::new(File::open(path)?);
        let mut line = String::new();
        input.read_line(&mut line)?;
        let header: Header = serde_json::from_str(&line)
            .map_err(|e| CorpusError::MalformedFeatureSet(format!("header: {e}")))?;
        let labels = if header.label_table.is_empty() {
            (0..header.num_classes).map(|c| c.to_string()).collect()
        } else if header.label_table.len() == header.num_classes {
            header.label_table
        } else {
            return Err(CorpusError::MalformedFeatureSet(format!(
                "{} labels for {} classes",
                header.label_table.len(),
                header.num_classes
            )));
        };
        let mut rows = Vec::new();
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let bad = |what: &str| CorpusError::MalformedFeatureSet(format!("row {i}: {what}"));
            let mut fields = rec.iter();
            let class = fields
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad("bad class index"))?;
            let values = fields
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| bad(&format!("bad value {v:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(FeatureRow { class, values });
        }
        FeatureSet::new(header.feature_dim, labels, header.config, rows)
    }
}
