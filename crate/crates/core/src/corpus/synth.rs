//! Tone-complex pseudo-words for exercising the pipeline without a real corpus.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CorpusError, Result};
use crate::audio::{write_wav_i16, Signal};
use crate::rng::{stream_rng, streams, StreamRng};

pub const SYNTH_RATE: u32 = 44_100;

/// Silence before and after each word, in seconds.
const PAD_SECS: f64 = 0.15;
const BANDS: [(f64, f64); 3] = [(200.0, 900.0), (900.0, 2200.0), (2200.0, 3500.0)];
const PEAK: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jitter {
    /// Relative frequency perturbation bound.
    pub freq: f64,
    /// Relative duration perturbation bound.
    pub duration: f64,
    /// Additive white noise level; `None` for a clean signal.
    pub snr_db: Option<f64>,
}

impl Default for Jitter {
    fn default() -> Self {
        Self {
            freq: 0.03,
            duration: 0.2,
            snr_db: Some(30.0),
        }
    }
}

impl Jitter {
    pub fn none() -> Self {
        Self {
            freq: 0.0,
            duration: 0.0,
            snr_db: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub samples_per_class: usize,
    pub seed: u64,
    pub jitter: Jitter,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            num_classes: 10,
            samples_per_class: 30,
            seed: 0,
            jitter: Jitter::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tone {
    pub freq: f64,
    pub phase: f64,
    /// Amplitude at the start and end of the word; linear in between.
    pub amp_start: f64,
    pub amp_end: f64,
}

/// The fixed sound of one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassTemplate {
    pub tones: Vec<Tone>,
    pub duration_secs: f64,
    /// Fractions of the word spent fading in and out.
    pub attack: f64,
    pub release: f64,
}

fn envelope(t: f64, attack: f64, release: f64) -> f64 {
    if t < attack {
        (0.5 * PI * t / attack).sin().powi(2)
    } else if t > 1.0 - release {
        (0.5 * PI * (1.0 - t) / release).sin().powi(2)
    } else {
        1.0
    }
}

impl ClassTemplate {
    /// Voiced part with each tone's frequency and the duration scaled.
    pub fn render_voiced(&self, freq_scales: &[f64], duration_scale: f64) -> Vec<f64> {
        let n = (self.duration_secs * duration_scale * SYNTH_RATE as f64).round() as usize;
        let gain = PEAK
            / self
                .tones
                .iter()
                .map(|t| t.amp_start.max(t.amp_end))
                .sum::<f64>();
        (0..n)
            .map(|i| {
                let u = i as f64 / n as f64;
                let secs = i as f64 / SYNTH_RATE as f64;
                let sum: f64 = self
                    .tones
                    .iter()
                    .zip(freq_scales)
                    .map(|(tone, s)| {
                        let amp = tone.amp_start + (tone.amp_end - tone.amp_start) * u;
                        amp * (2.0 * PI * tone.freq * s * secs + tone.phase).sin()
                    })
                    .sum();
                gain * envelope(u, self.attack, self.release) * sum
            })
            .collect()
    }

    /// The unperturbed word with silence padding.
    pub fn render(&self) -> Vec<f64> {
        pad(self.render_voiced(&vec![1.0; self.tones.len()], 1.0))
    }
}

fn pad(voiced: Vec<f64>) -> Vec<f64> {
    let p = (PAD_SECS * SYNTH_RATE as f64) as usize;
    let mut out = vec![0.0; p];
    out.extend(voiced);
    out.extend(std::iter::repeat_n(0.0, p));
    out
}

/// True if some pair of frequencies sits within 2% of an integer ratio.
fn harmonic(freqs: &[f64]) -> bool {
    freqs.iter().enumerate().any(|(i, &a)| {
        freqs[i + 1..].iter().any(|&b| {
            let r = a.max(b) / a.min(b);
            (r - r.round()).abs() < 0.02 * r
        })
    })
}

/// Class templates: every class owns a distinct frequency slot in each band
/// and keeps two or three of its bands.
fn templates(num_classes: usize, rng: &mut StreamRng) -> Vec<ClassTemplate> {
    let slots: Vec<Vec<usize>> = BANDS
        .iter()
        .map(|_| {
            let mut p: Vec<usize> = (0..num_classes).collect();
            p.shuffle(rng);
            p
        })
        .collect();
    (0..num_classes)
        .map(|c| {
            let dropped = if rng.random_bool(0.5) {
                None
            } else {
                Some(rng.random_range(0..BANDS.len()))
            };
            let bands: Vec<usize> = (0..BANDS.len()).filter(|&b| Some(b) != dropped).collect();
            let draw_freqs = |rng: &mut StreamRng| -> Vec<f64> {
                bands
                    .iter()
                    .map(|&b| {
                        let (lo, hi) = BANDS[b];
                        let width = (hi - lo) / num_classes as f64;
                        lo + (slots[b][c] as f64 + rng.random_range(0.25..0.75)) * width
                    })
                    .collect()
            };
            let mut freqs = draw_freqs(rng);
            for _ in 0..100 {
                if !harmonic(&freqs) {
                    break;
                }
                freqs = draw_freqs(rng);
            }
            ClassTemplate {
                tones: freqs
                    .into_iter()
                    .map(|freq| Tone {
                        freq,
                        phase: rng.random_range(0.0..2.0 * PI),
                        amp_start: rng.random_range(0.2..1.0),
                        amp_end: rng.random_range(0.2..1.0),
                    })
                    .collect(),
                duration_secs: rng.random_range(0.35..0.6),
                attack: rng.random_range(0.05..0.3),
                release: rng.random_range(0.05..0.3),
            }
        })
        .collect()
}

/// `class00`, `class01`, ...; zero-padded so byte order matches class order.
pub fn class_label(class: usize, num_classes: usize) -> String {
    let width = num_classes.saturating_sub(1).to_string().len().max(2);
    format!("class{class:0width$}")
}

fn jittered(template: &ClassTemplate, jitter: &Jitter, rng: &mut StreamRng) -> Vec<f64> {
    let mut scale = |bound: f64| {
        if bound > 0.0 {
            1.0 + rng.random_range(-bound..bound)
        } else {
            1.0
        }
    };
    let freq_scales: Vec<f64> = template.tones.iter().map(|_| scale(jitter.freq)).collect();
    let duration_scale = scale(jitter.duration);
    let voiced = template.render_voiced(&freq_scales, duration_scale);
    let power = voiced.iter().map(|x| x * x).sum::<f64>() / voiced.len() as f64;
    let mut out = pad(voiced);
    if let Some(snr) = jitter.snr_db {
        let sigma = (power / 10f64.powf(snr / 10.0)).sqrt();
        for x in &mut out {
            let z: f64 = StandardNormal.sample(rng);
            *x += sigma * z;
        }
    }
    out
}

/// Class templates and every sample, in class-major order, without writing.
pub fn synthesize(cfg: &SynthConfig) -> Result<(Vec<ClassTemplate>, Vec<Vec<Signal>>)> {
    if cfg.num_classes < 2 || cfg.samples_per_class < 2 {
        return Err(CorpusError::InvalidParameter(format!(
            "need at least 2 classes and 2 samples per class, got {} x {}",
            cfg.num_classes, cfg.samples_per_class
        )));
    }
    let mut rng = stream_rng(cfg.seed, streams::SYNTH);
    let templates = templates(cfg.num_classes, &mut rng);
    let samples = templates
        .iter()
        .map(|t| {
            (0..cfg.samples_per_class)
                .map(|_| Signal::new(jittered(t, &cfg.jitter, &mut rng), SYNTH_RATE))
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((templates, samples))
}

/// Writes `out_dir/<label>/<label>_<i>.wav` for every sample and returns the
/// paths in class-major order.
pub fn generate_synthetic_corpus(cfg: &SynthConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let (_, samples) = synthesize(cfg)?;
    let mut paths = Vec::new();
    for (c, class_samples) in samples.iter().enumerate() {
        let label = class_label(c, cfg.num_classes);
        let dir = out_dir.join(&label);
        fs::create_dir_all(&dir)?;
        for (i, s) in class_samples.iter().enumerate() {
            let p = dir.join(format!("{label}_{i:03}.wav"));
            write_wav_i16(&p, s)?;
            paths.push(p);
        }
    }
    Ok(paths)
}
