use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use speechrec::audio::AudioError;
use speechrec::corpus::{
    evaluate as evaluate_set, featurize_corpus, generate_synthetic_corpus, scan_corpus,
    stratified_indices, CorpusError, FailureRecord, FeatureSet, FeaturizeOptions, Pipeline,
    PipelineConfig, SynthConfig,
};
use speechrec::network::{
    backprop, grad_check_with, init_network, load_model_with_meta, save_model_with, sgd_train,
    Architecture, EpochStats, Example, ModelMeta,
};
use speechrec::parallel::Parallelism;
use speechrec::rng::stream_rng;

use crate::config::RunConfig;
use crate::{Failure, Fault};

/// `dir/stem.suffix` next to `path`, e.g. `features.csv` -> `features.train.csv`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn parallelism(cfg: &RunConfig) -> Parallelism {
    if cfg.parallel {
        Parallelism::Parallel
    } else {
        Parallelism::Sequential
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

pub fn synth(
    cfg: &RunConfig,
    out: Option<PathBuf>,
    classes: usize,
    samples: usize,
) -> Result<(), Failure> {
    let out = out.ok_or_else(|| Failure::usage("synth needs --out <dir>"))?;
    let synth = SynthConfig {
        num_classes: classes,
        samples_per_class: samples,
        seed: cfg.seed,
        ..Default::default()
    };
    let paths = generate_synthetic_corpus(&synth, &out).map_err(|e| io_failure(&out, e))?;
    println!(
        "wrote {} files in {classes} classes to {}",
        paths.len(),
        out.display()
    );
    Ok(())
}

fn write_failures(path: &Path, failures: &[FailureRecord]) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(failures).expect("records serialize");
    fs::write(path, text + "\n").map_err(|e| io_failure(path, e))
}

pub fn featurize(
    cfg: &RunConfig,
    corpus: &Path,
    out: Option<PathBuf>,
    strict: bool,
) -> Result<(), Failure> {
    let out = out.unwrap_or_else(|| PathBuf::from("features.csv"));
    let scan = scan_corpus(corpus).map_err(|e| Failure::usage(e.to_string()))?;
    for p in &scan.skipped {
        eprintln!("warning: skipped {}", p.display());
    }
    let manifest = scan.manifest;
    let opts = FeaturizeOptions {
        strict,
        parallelism: parallelism(cfg),
    };
    let failures_path = sibling(&out, "failures.json");
    let outcome = match featurize_corpus(&manifest, &cfg.pipeline(), opts) {
        Ok(o) => o,
        Err(CorpusError::StrictFailure { failures, total }) => {
            write_failures(&failures_path, &failures)?;
            return Err(Failure::partial(format!(
                "{} of {total} files failed (strict mode); see {}",
                failures.len(),
                failures_path.display()
            )));
        }
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    let fs = &outcome.features;
    fs.write(&out).map_err(|e| io_failure(&out, e))?;
    let manifest_path = sibling(&out, "manifest.csv");
    outcome
        .row_manifest(&manifest)
        .write_csv(&manifest_path)
        .map_err(|e| io_failure(&manifest_path, e))?;
    if !outcome.failures.is_empty() {
        write_failures(&failures_path, &outcome.failures)?;
        eprintln!(
            "warning: {} files failed; see {}",
            outcome.failures.len(),
            failures_path.display()
        );
    }
    println!(
        "featurized {}/{} files -> {} (feature_dim {}, {} classes)",
        fs.len(),
        manifest.len(),
        out.display(),
        fs.feature_dim(),
        fs.num_classes()
    );
    match stratified_indices(&fs.classes(), fs.labels(), cfg.train_fraction, cfg.seed) {
        Ok((train, test)) => {
            for (name, idx) in [("train.csv", &train), ("test.csv", &test)] {
                let p = sibling(&out, name);
                fs.subset(idx).write(&p).map_err(|e| io_failure(&p, e))?;
            }
            println!("split {} train / {} test", train.len(), test.len());
        }
        Err(e) => eprintln!("warning: no train/test split written: {e}"),
    }
    Ok(())
}

fn read_features(path: &Path) -> Result<FeatureSet, Failure> {
    FeatureSet::read(path).map_err(|e| io_failure(path, e))
}

fn shape_check(arch: &Architecture, fs: &FeatureSet) -> Result<(), Failure> {
    if arch.input_size() != fs.feature_dim() || arch.output_size() != fs.num_classes() {
        return Err(Failure::usage(format!(
            "architecture {arch} takes {} inputs and {} outputs, but the features have dimension {} and {} classes",
            arch.input_size(),
            arch.output_size(),
            fs.feature_dim(),
            fs.num_classes()
        )));
    }
    Ok(())
}

fn write_history(path: &Path, history: &[EpochStats]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_failure(path, e))?;
    for s in history {
        w.serialize(s).map_err(|e| io_failure(path, e))?;
    }
    w.flush().map_err(|e| io_failure(path, e))
}

pub fn train(cfg: &RunConfig, features: &Path, out: Option<PathBuf>) -> Result<(), Failure> {
    let out = out.unwrap_or_else(|| PathBuf::from("model.json"));
    let fs = read_features(features)?;
    let arch = cfg.architecture(fs.num_classes()).map_err(Failure::usage)?;
    shape_check(&arch, &fs)?;
    let tcfg = cfg.train();
    tcfg.validate().map_err(|e| Failure::usage(e.to_string()))?;

    let mut progress = |s: &EpochStats| {
        log::info!(
            "epoch {} lr {:.6} loss {:.6} train accuracy {:.4}",
            s.epoch,
            s.lr,
            s.mean_loss,
            s.train_accuracy
        )
    };
    let outcome = sgd_train(
        init_network(&arch, cfg.seed),
        &fs.examples(),
        &tcfg,
        &mut progress,
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    let meta = ModelMeta {
        feature_config: fs.config.clone(),
        label_table: fs.labels().to_vec(),
    };
    save_model_with(&outcome.network, &meta, &out).map_err(|e| io_failure(&out, e))?;
    let history_path = sibling(&out, "history.csv");
    write_history(&history_path, &outcome.history)?;
    let last = outcome.history.last().expect("at least one epoch");
    println!(
        "trained {arch} with {} parameters for {} epochs ({} updates); train accuracy {:.2}%, mean loss {:.6} -> {}",
        arch.param_count(),
        outcome.history.len(),
        outcome.updates,
        100.0 * last.train_accuracy,
        last.mean_loss,
        out.display()
    );
    Ok(())
}

pub fn evaluate(
    cfg: &RunConfig,
    model: &Path,
    features: &Path,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let (net, meta) = load_model_with_meta(model).map_err(|e| io_failure(model, e))?;
    let fs = read_features(features)?;
    shape_check(net.architecture(), &fs)?;
    if !meta.label_table.is_empty() && meta.label_table != fs.labels() {
        return Err(Failure::usage(
            "model and feature file disagree on the label table",
        ));
    }
    let report =
        evaluate_set(&net, &fs, parallelism(cfg)).map_err(|e| Failure::usage(e.to_string()))?;
    let out = out.unwrap_or_else(|| sibling(features, "report.json"));
    fs::write(&out, report.to_json()).map_err(|e| io_failure(&out, e))?;
    print!("{report}");
    println!("report -> {}", out.display());
    Ok(())
}

fn audio_guidance(e: &CorpusError) -> &'static str {
    match e {
        CorpusError::Audio(AudioError::EmptyVoiced | AudioError::SilentSignal) => {
            "the recording contains no detectable speech"
        }
        CorpusError::Audio(AudioError::UtteranceTooShort { .. })
        | CorpusError::Feature(speechrec::features::FeatureError::TooFewPoints { .. }) => {
            "the utterance is too short after silence removal; record a longer word"
        }
        CorpusError::Audio(AudioError::UpsamplingRequested { .. }) => {
            "the recording's sample rate is below the pipeline rate"
        }
        _ => "the file could not be processed",
    }
}

pub fn predict(model: &Path, wav: &Path) -> Result<(), Failure> {
    let (net, meta) = load_model_with_meta(model).map_err(|e| io_failure(model, e))?;
    let pcfg: PipelineConfig =
        serde_json::from_value(meta.feature_config.clone()).map_err(|e| {
            Failure::usage(format!(
                "{}: no usable feature_config: {e}",
                model.display()
            ))
        })?;
    let pipeline = Pipeline::new(pcfg).map_err(|e| Failure::usage(e.to_string()))?;
    let fv = match pipeline.process_file(wav, 0) {
        Ok(fv) => fv,
        Err(e @ CorpusError::Audio(AudioError::MissingFile(_))) => {
            return Err(Failure::usage(e.to_string()))
        }
        Err(e) => {
            return Err(Failure::audio(format!(
                "{}: {e}; {}",
                wav.display(),
                audio_guidance(&e)
            )));
        }
    };
    let p = net
        .predict(&fv.values)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let name = |c: usize| {
        meta.label_table
            .get(c)
            .cloned()
            .unwrap_or_else(|| c.to_string())
    };
    let mut ranked: Vec<(usize, f64)> = p.scores.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    println!("label: {}", name(p.class));
    for (c, s) in ranked {
        println!("{}\t{s:.6}", name(c));
    }
    Ok(())
}

pub fn gradcheck(
    cfg: &RunConfig,
    eps: f64,
    classes: usize,
    samples: usize,
    fault: Option<Fault>,
) -> Result<(), Failure> {
    let inputs = cfg.kmeans_k * cfg.coeff_count;
    let arch =
        Architecture::new(vec![inputs, 20, classes]).map_err(|e| Failure::usage(e.to_string()))?;
    let net = init_network(&arch, cfg.seed);
    let mut rng = stream_rng(cfg.seed, 0);
    let data: Vec<Example> = (0..samples)
        .map(|_| Example {
            features: (0..inputs)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect(),
            class: rng.random_range(0..classes),
        })
        .collect();
    let report = grad_check_with(&net, &data, eps, |n, x, t| {
        let mut g = backprop(n, x, t)?;
        match fault {
            Some(Fault::BiasSignFlip) => g.layers[0].biases[0] = -g.layers[0].biases[0],
            Some(Fault::WeightDouble) => g.layers[0].weights[0] *= 2.0,
            None => {}
        }
        Ok(g)
    })
    .map_err(|e| Failure::usage(e.to_string()))?;
    let worst = report
        .worst
        .map(|w| w.to_string())
        .unwrap_or_else(|| "none".into());
    let line = format!(
        "{arch}, {samples} samples, eps {eps:e}: max relative error {:.3e} at {worst} of sample {} (backprop {:e}, finite difference {:e})",
        report.max_rel_error, report.worst_sample, report.analytic, report.numeric
    );
    if report.max_rel_error < 1e-6 {
        println!("PASS {line}");
        Ok(())
    } else {
        Err(Failure::usage(format!("FAIL {line}")))
    }
}
