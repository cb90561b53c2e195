use std::fs;
use std::path::Path;

use speechrec::audio::{write_wav_i16, Signal};
use speechrec::corpus::*;
use speechrec::parallel::Parallelism;

fn small_corpus(dir: &Path, seed: u64) -> Manifest {
    let cfg = SynthConfig {
        num_classes: 3,
        samples_per_class: 4,
        seed,
        ..Default::default()
    };
    generate_synthetic_corpus(&cfg, dir).unwrap();
    scan_corpus(dir).unwrap().manifest
}

fn bytes_of_tree(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((
                    p.strip_prefix(root).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn synth_layout_and_determinism() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let paths = generate_synthetic_corpus(&SynthConfig::default(), a.path()).unwrap();
    assert_eq!(paths.len(), 300);
    generate_synthetic_corpus(&SynthConfig::default(), b.path()).unwrap();
    assert_eq!(bytes_of_tree(a.path()), bytes_of_tree(b.path()));
    let m = scan_corpus(a.path()).unwrap().manifest;
    assert_eq!(m.num_classes(), 10);
    assert!(m.class_counts().iter().all(|&c| c == 30));
    let w = speechrec::audio::read_wav(&paths[0]).unwrap();
    assert_eq!(w.rate, SYNTH_RATE);
}

#[test]
fn rows_follow_manifest_order() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_corpus(dir.path(), 1);
    let cfg = PipelineConfig::default();
    let out = featurize_corpus(&m, &cfg, FeaturizeOptions::default()).unwrap();
    assert_eq!(out.features.len(), m.len());
    assert_eq!(out.features.feature_dim(), 112);
    let pipeline = Pipeline::new(cfg).unwrap();
    for (row, &i) in out.features.rows().iter().zip(&out.entry_indices) {
        let e = &m.entries()[i];
        assert_eq!(row.class, e.class_index);
        assert_eq!(
            row.values,
            pipeline.process_file(&e.path, i).unwrap().values
        );
    }
}

#[test]
fn parallel_equals_sequential() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_corpus(dir.path(), 2);
    let cfg = PipelineConfig::default();
    let run = |parallelism| {
        featurize_corpus(
            &m,
            &cfg,
            FeaturizeOptions {
                strict: true,
                parallelism,
            },
        )
        .unwrap()
        .features
    };
    let (p, s) = (run(Parallelism::Parallel), run(Parallelism::Sequential));
    let bits = |fs: &FeatureSet| -> Vec<u64> {
        fs.rows()
            .iter()
            .flat_map(|r| r.values.iter().map(|v| v.to_bits()))
            .collect()
    };
    assert_eq!(bits(&p), bits(&s));
}

#[test]
fn failures_are_recorded_or_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let mut m_items: Vec<_> = small_corpus(dir.path(), 3)
        .entries()
        .iter()
        .map(|e| (e.path.clone(), e.label.clone()))
        .collect();
    // 0.08 s of tone: fewer than 8 frames after silence removal
    let short = dir.path().join("class00/short.wav");
    let tone: Vec<f64> = (0..3528).map(|i| 0.5 * (i as f64 * 0.07).sin()).collect();
    write_wav_i16(&short, &Signal::new(tone, SYNTH_RATE).unwrap()).unwrap();
    let silent = dir.path().join("class01/silent.wav");
    write_wav_i16(&silent, &Signal::new(vec![0.0; 8000], SYNTH_RATE).unwrap()).unwrap();
    m_items.push((short.clone(), "class00".into()));
    m_items.push((silent.clone(), "class01".into()));
    let m = Manifest::new(m_items).unwrap();

    let cfg = PipelineConfig::default();
    let out = featurize_corpus(&m, &cfg, FeaturizeOptions::default()).unwrap();
    assert_eq!(out.features.len(), m.len() - 2);
    assert_eq!(out.failures.len(), 2);
    assert_eq!(out.failures[0].path, short);
    assert!(
        out.failures[0].error.contains("8"),
        "{}",
        out.failures[0].error
    );
    assert_eq!(out.row_manifest(&m).len(), out.features.len());

    let strict = featurize_corpus(
        &m,
        &cfg,
        FeaturizeOptions {
            strict: true,
            ..Default::default()
        },
    );
    match strict {
        Err(CorpusError::StrictFailure { failures, total }) => {
            assert_eq!(failures.len(), 2);
            assert_eq!(total, m.len());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn feature_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let m = small_corpus(&dir.path().join("c"), 4);
    let cfg = PipelineConfig {
        seed: 11,
        ..Default::default()
    };
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    featurize_corpus(&m, &cfg, FeaturizeOptions::default())
        .unwrap()
        .features
        .write(&a)
        .unwrap();
    featurize_corpus(&m, &cfg, FeaturizeOptions::default())
        .unwrap()
        .features
        .write(&b)
        .unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let back = FeatureSet::read(&a).unwrap();
    assert_eq!(back.config["k"], 8);
    assert_eq!(back.labels(), m.labels());
}
