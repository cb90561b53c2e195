//! Acceptance suite: one PASS/FAIL line per criterion; exits nonzero if any fail.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use speechrec::corpus::{
    evaluate, featurize_corpus, generate_synthetic_corpus, scan_corpus, stratified_indices,
    stratified_split, FeatureSet, FeaturizeOptions, Manifest, PipelineConfig, SynthConfig,
    DEFAULT_TRAIN_FRACTION,
};
use speechrec::features::{
    build_filterbank, cepstra_from_spectrum, kmeans, kmeans_with, power_spectrum, KMeansConfig,
};
use speechrec::network::{
    grad_check, init_network, param_count, save_model_with, sgd_train, Architecture, Example,
    ModelMeta, TrainConfig,
};
use speechrec::parallel::Parallelism;
use speechrec::rng::stream_rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn param_count_check() -> Outcome {
    let n = param_count(&Architecture::reference());
    outcome(n == 53_840, format!("(112,100,95,90,95,100,60) -> {n}"))
}

fn split_counts() -> Outcome {
    let items = (0..60)
        .flat_map(|c| {
            (0..30).map(move |i| (format!("w{c:02}/{i:02}.wav").into(), format!("w{c:02}")))
        })
        .collect();
    let m = Manifest::new(items).unwrap();
    let (train, test) = stratified_split(&m, DEFAULT_TRAIN_FRACTION, 0).unwrap();
    let per_class_ok = train.class_counts().iter().all(|&c| c == 20)
        && test.class_counts().iter().all(|&c| c == 10);
    outcome(
        train.len() == 1200 && test.len() == 600 && per_class_ok,
        format!(
            "{} train / {} test, per-class 20/10: {per_class_ok}",
            train.len(),
            test.len()
        ),
    )
}

fn dft_power_oracle(frame: &[f64], n: usize) -> Vec<f64> {
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, x) in frame.iter().enumerate() {
                let ang = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                re += x * ang.cos();
                im += x * ang.sin();
            }
            re * re + im * im
        })
        .collect()
}

fn dct_oracle(fb: &speechrec::features::MelFilterbank, spectrum: &[f64], count: usize) -> Vec<f64> {
    let m = fb.num_filters;
    let e: Vec<f64> = (0..m)
        .map(|i| {
            let energy: f64 = fb.row(i).iter().zip(spectrum).map(|(w, p)| w * p).sum();
            energy.max(1e-12).ln()
        })
        .collect();
    (0..count)
        .map(|j| {
            let scale = if j == 0 {
                (1.0 / m as f64).sqrt()
            } else {
                (2.0 / m as f64).sqrt()
            };
            scale
                * e.iter()
                    .enumerate()
                    .map(|(i, v)| v * (PI * (i as f64 + 0.5) * j as f64 / m as f64).cos())
                    .sum::<f64>()
        })
        .collect()
}

fn mfcc_oracle() -> Outcome {
    let fb = build_filterbank(40, 512, 10_000).unwrap();
    let mut rng = stream_rng(2024, 0);
    let (mut worst_dft, mut worst_dct) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let frame: Vec<f64> = (0..300).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = power_spectrum(&frame, 512).unwrap();
        let slow = dft_power_oracle(&frame, 512);
        for (a, b) in fast.iter().zip(&slow) {
            worst_dft = worst_dft.max((a - b).abs());
        }
        let cep = cepstra_from_spectrum(&fast, &fb, 14).unwrap();
        for (a, b) in cep.iter().zip(dct_oracle(&fb, &slow, 14)) {
            worst_dct = worst_dct.max((a - b).abs());
        }
    }
    outcome(
        worst_dft < 1e-9 && worst_dct < 1e-10,
        format!(
            "max |DFT diff| {worst_dft:.2e} (< 1e-9), max |DCT diff| {worst_dct:.2e} (< 1e-10)"
        ),
    )
}

fn grad_fidelity() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (sizes, seed) in [(vec![112, 20, 60], 1u64), (vec![5, 4, 3], 2)] {
        let arch = Architecture::new(sizes).unwrap();
        let (inputs, outputs) = (arch.input_size(), arch.output_size());
        let net = init_network(&arch, seed);
        let mut rng = stream_rng(seed, 0);
        let samples: Vec<Example> = (0..5)
            .map(|_| Example {
                features: (0..inputs)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect(),
                class: rng.random_range(0..outputs),
            })
            .collect();
        let r = grad_check(&net, &samples, 1e-5).unwrap();
        pass &= r.max_rel_error < 1e-6;
        parts.push(format!("{arch}: {:.2e}", r.max_rel_error));
    }
    outcome(pass, format!("max rel error {} (< 1e-6)", parts.join(", ")))
}

/// Lowest inertia over every assignment of points to `k` labels.
fn exhaustive_optimum(points: &[f64], k: usize) -> f64 {
    let n = points.len();
    let mut best = f64::INFINITY;
    let mut labels = vec![0usize; n];
    loop {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            sums[l] += p;
            counts[l] += 1;
        }
        let inertia: f64 = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| (p - sums[l] / counts[l] as f64).powi(2))
            .sum();
        best = best.min(inertia);
        let mut i = 0;
        while i < n {
            labels[i] += 1;
            if labels[i] < k {
                break;
            }
            labels[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
    }
}

fn kmeans_optimality() -> Outcome {
    let mut rng = stream_rng(77, 0);
    let (mut instances, mut worst, mut mismatches) = (0, 0.0f64, 0);
    for n in 1..=8usize {
        for k in 1..=3.min(n) {
            for trial in 0..25u64 {
                let points: Vec<f64> = (0..n)
                    .map(|_| rng.random_range(-10i32..=10) as f64)
                    .collect();
                let got = kmeans(&points, 1, k, trial).unwrap().inertia;
                let want = exhaustive_optimum(&points, k);
                let diff = (got - want).abs();
                worst = worst.max(diff);
                mismatches += usize::from(diff > 1e-12);
                instances += 1;
            }
        }
    }
    let mut violations = 0;
    for trial in 0..100u64 {
        let dim = rng.random_range(1..=14);
        let n = rng.random_range(10..=200);
        let k = rng.random_range(2..=8);
        let pts: Vec<f64> = (0..n * dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let cfg = KMeansConfig {
            restarts: 1,
            ..Default::default()
        };
        let r = kmeans_with(&pts, dim, k, &mut stream_rng(trial, 9), &cfg).unwrap();
        violations += r.inertia_history.windows(2).filter(|w| w[1] > w[0]).count();
    }
    outcome(
        mismatches == 0 && violations == 0,
        format!(
            "{instances} exhaustive instances, {mismatches} off by > 1e-12 (worst {worst:.1e}); \
             100 Lloyd runs, {violations} inertia increases"
        ),
    )
}

struct Run {
    train_acc: f64,
    test_acc: f64,
}

fn featurize_and_split(m: &Manifest, k: usize, seed: u64) -> (FeatureSet, FeatureSet) {
    let cfg = PipelineConfig {
        kmeans_k: k,
        seed,
        ..Default::default()
    };
    let opts = FeaturizeOptions {
        strict: true,
        ..Default::default()
    };
    let fs = featurize_corpus(m, &cfg, opts).unwrap().features;
    let (tr, te) =
        stratified_indices(&fs.classes(), fs.labels(), DEFAULT_TRAIN_FRACTION, seed).unwrap();
    (fs.subset(&tr), fs.subset(&te))
}

fn train_and_score(train: &FeatureSet, test: &FeatureSet, seed: u64) -> Run {
    let arch = Architecture::new(vec![train.feature_dim(), 50, train.num_classes()]).unwrap();
    let cfg = TrainConfig {
        epochs: 200,
        seed,
        ..Default::default()
    };
    let net = sgd_train(
        init_network(&arch, seed),
        &train.examples(),
        &cfg,
        &mut |_| {},
    )
    .unwrap()
    .network;
    Run {
        train_acc: evaluate(&net, train, Parallelism::Parallel)
            .unwrap()
            .accuracy,
        test_acc: evaluate(&net, test, Parallelism::Parallel)
            .unwrap()
            .accuracy,
    }
}

fn desk_end_to_end(m: &Manifest) -> (Outcome, f64) {
    let (train, test) = featurize_and_split(m, 8, 0);
    let r = train_and_score(&train, &test, 0);
    let gap = 100.0 * (r.train_acc - r.test_acc);
    (
        outcome(
            r.test_acc >= 0.95 && gap <= 5.0,
            format!(
                "K=8, (112,50,10), 200 epochs: train {:.2}%, test {:.2}% (>= 95%), gap {gap:.2} pts (<= 5)",
                100.0 * r.train_acc,
                100.0 * r.test_acc
            ),
        ),
        r.test_acc,
    )
}

fn k_sensitivity(m: &Manifest, k8_test: f64) -> Outcome {
    let (train, test) = featurize_and_split(m, 5, 0);
    let r = train_and_score(&train, &test, 0);
    outcome(
        k8_test >= r.test_acc - 0.02,
        format!(
            "test K=8 {:.2}% vs K=5 {:.2}% (K=8 >= K=5 - 2 pts)",
            100.0 * k8_test,
            100.0 * r.test_acc
        ),
    )
}

/// featurize + train + evaluate into `out`, returning the artifact bytes.
fn artifacts(m: &Manifest, out: &Path) -> Vec<(String, Vec<u8>)> {
    fs::create_dir_all(out).unwrap();
    let cfg = PipelineConfig {
        seed: 5,
        ..Default::default()
    };
    let fs_all = featurize_corpus(m, &cfg, FeaturizeOptions::default())
        .unwrap()
        .features;
    let features = out.join("features.csv");
    fs_all.write(&features).unwrap();
    let fs_all = FeatureSet::read(&features).unwrap();
    let (tr, te) = stratified_indices(
        &fs_all.classes(),
        fs_all.labels(),
        DEFAULT_TRAIN_FRACTION,
        5,
    )
    .unwrap();
    let (train, test) = (fs_all.subset(&tr), fs_all.subset(&te));
    let arch = Architecture::new(vec![112, 50, train.num_classes()]).unwrap();
    let tcfg = TrainConfig {
        epochs: 50,
        seed: 5,
        ..Default::default()
    };
    let net = sgd_train(
        init_network(&arch, 5),
        &train.examples(),
        &tcfg,
        &mut |_| {},
    )
    .unwrap()
    .network;
    let meta = ModelMeta {
        feature_config: fs_all.config.clone(),
        label_table: fs_all.labels().to_vec(),
    };
    let model = out.join("model.json");
    save_model_with(&net, &meta, &model).unwrap();
    let report = evaluate(&net, &test, Parallelism::Parallel).unwrap();
    fs::write(out.join("report.json"), report.to_json()).unwrap();
    fs::write(out.join("report.txt"), report.to_string()).unwrap();
    ["features.csv", "model.json", "report.json", "report.txt"]
        .iter()
        .map(|n| (n.to_string(), fs::read(out.join(n)).unwrap()))
        .collect()
}

fn determinism(m: &Manifest, root: &Path) -> Outcome {
    let a = artifacts(m, &root.join("run_a"));
    let b = artifacts(m, &root.join("run_b"));
    let differing: Vec<&str> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| x.1 != y.1)
        .map(|(x, _)| x.0.as_str())
        .collect();
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} artifacts byte-identical across runs", a.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

fn main() {
    let work = tempfile::tempdir().unwrap();
    let corpus = work.path().join("corpus");
    generate_synthetic_corpus(
        &SynthConfig {
            num_classes: 10,
            samples_per_class: 30,
            seed: 0,
            ..Default::default()
        },
        &corpus,
    )
    .unwrap();
    let manifest = scan_corpus(&corpus).unwrap().manifest;

    let mut results: Vec<(&str, Duration, Duration, Outcome)> = Vec::new();
    let mut run = |name: &'static str, limit_secs: u64, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((name, t.elapsed(), Duration::from_secs(limit_secs), o));
    };
    run("parameter count", 1, &mut param_count_check);
    run("split counts", 1, &mut split_counts);
    run("MFCC oracle equivalence", 10, &mut mfcc_oracle);
    run("gradient fidelity", 60, &mut grad_fidelity);
    run("k-means optimality", 30, &mut kmeans_optimality);
    let mut k8_test = 0.0;
    run("desk-scale end-to-end", 300, &mut || {
        let (o, acc) = desk_end_to_end(&manifest);
        k8_test = acc;
        o
    });
    run("K sensitivity", 600, &mut || {
        k_sensitivity(&manifest, k8_test)
    });
    run("determinism", 600, &mut || {
        determinism(&manifest, work.path())
    });

    let mut failed = 0;
    for (name, elapsed, limit, o) in &results {
        let in_time = elapsed <= limit;
        let pass = o.pass && in_time;
        failed += usize::from(!pass);
        println!(
            "{} {name}: {} [{:.2}s{}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            if in_time {
                String::new()
            } else {
                format!(" over {}s limit", limit.as_secs())
            }
        );
    }
    println!(
        "{} of {} acceptance criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
