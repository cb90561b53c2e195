use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CorpusError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: String,
    pub class_index: usize,
}

/// Labelled utterance list. Class indices follow the byte order of the
/// label strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<ManifestEntry>,
    labels: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub manifest: Manifest,
    /// Files under the root that were not usable WAV entries.
    pub skipped: Vec<PathBuf>,
}

impl Manifest {
    /// Builds a manifest from `(path, label)` pairs, assigning class indices.
    pub fn new(items: Vec<(PathBuf, String)>) -> Result<Self> {
        let labels: Vec<String> = items
            .iter()
            .map(|(_, l)| l.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let entries = items
            .into_iter()
            .map(|(path, label)| {
                let class_index = labels.binary_search(&label).expect("label collected above");
                ManifestEntry {
                    path,
                    label,
                    class_index,
                }
            })
            .collect();
        Self::from_parts(entries, labels)
    }

    /// Wraps entries against an existing label table, checking consistency.
    pub fn from_parts(entries: Vec<ManifestEntry>, labels: Vec<String>) -> Result<Self> {
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CorpusError::MalformedManifest(
                "label table must be strictly sorted".into(),
            ));
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if labels.get(e.class_index) != Some(&e.label) {
                return Err(CorpusError::MalformedManifest(format!(
                    "{}: label {:?} does not match class index {}",
                    e.path.display(),
                    e.label,
                    e.class_index
                )));
            }
            if !seen.insert(&e.path) {
                return Err(CorpusError::DuplicatePath(e.path.clone()));
            }
        }
        Ok(Self { entries, labels })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn class_indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.class_index).collect()
    }

    /// Entries at `indices`, in that order, sharing this label table.
    pub fn subset(&self, indices: &[usize]) -> Manifest {
        Manifest {
            entries: indices.iter().map(|&i| self.entries[i].clone()).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Number of entries per class index.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.labels.len()];
        for e in &self.entries {
            counts[e.class_index] += 1;
        }
        counts
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["path", "label", "class_index"])?;
        for e in &self.entries {
            let p = e.path.to_str().ok_or_else(|| {
                CorpusError::MalformedManifest(format!("non-UTF-8 path {}", e.path.display()))
            })?;
            w.write_record([p, &e.label, &e.class_index.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a manifest CSV. Class indices must match the sorted order of the
    /// labels present in the file.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["path", "label", "class_index"] {
            return Err(CorpusError::MalformedManifest(format!(
                "expected header path,label,class_index, found {}",
                header.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut items = Vec::new();
        let mut declared = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let idx: usize = rec[2].parse().map_err(|_| {
                CorpusError::MalformedManifest(format!("bad class index {:?}", &rec[2]))
            })?;
            items.push((PathBuf::from(&rec[0]), rec[1].to_string()));
            declared.push(idx);
        }
        let m = Manifest::new(items)?;
        if m.class_indices() != declared {
            return Err(CorpusError::MalformedManifest(
                "class indices do not follow label order".into(),
            ));
        }
        Ok(m)
    }
}

fn sorted_dir(path: &Path) -> Result<Vec<fs::DirEntry>> {
    let mut items = fs::read_dir(path)?.collect::<std::io::Result<Vec<_>>>()?;
    items.sort_by_key(|e| e.file_name());
    Ok(items)
}

fn is_wav(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
}

/// Collects `root/<label>/<name>.wav`. Anything else under the root is
/// skipped with a warning and listed in the outcome.
pub fn scan_corpus(root: &Path) -> Result<ScanOutcome> {
    if !root.is_dir() {
        return Err(CorpusError::MissingRoot(root.to_path_buf()));
    }
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for dir in sorted_dir(root)? {
        let dir_path = dir.path();
        let label = match (dir_path.is_dir(), dir.file_name().into_string()) {
            (true, Ok(label)) => label,
            _ => {
                log::warn!("skipping {}", dir_path.display());
                skipped.push(dir_path);
                continue;
            }
        };
        for file in sorted_dir(&dir_path)? {
            let p = file.path();
            if p.is_file() && is_wav(&p) {
                items.push((p, label.clone()));
            } else {
                log::warn!("{}", CorpusError::NonWavFile(p.clone()));
                skipped.push(p);
            }
        }
    }
    if items.is_empty() {
        return Err(CorpusError::EmptyCorpus(root.to_path_buf()));
    }
    Ok(ScanOutcome {
        manifest: Manifest::new(items)?,
        skipped,
    })
}
