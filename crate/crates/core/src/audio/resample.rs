use std::f64::consts::PI;

use super::{AudioError, Result, Signal};

/// Zero crossings of the sinc kernel kept on each side of its center.
pub const ZERO_CROSSINGS: usize = 24;

/// Rational-ratio windowed-sinc downsampler.
///
/// The source/target ratio is reduced to `down/up`; output sample `m` sits at
/// input position `m * down / up`, so only `up` distinct fractional offsets
/// exist and each gets its own precomputed, Hann-windowed tap set.
#[derive(Debug, Clone)]
pub struct Resampler {
    source_rate: u32,
    target_rate: u32,
    up: usize,
    down: usize,
    /// Taps left of the integer input position.
    reach: usize,
    /// `up` rows of `2 * reach + 2` taps.
    phases: Vec<Vec<f64>>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

impl Resampler {
    pub fn new(source_rate: u32, target_rate: u32) -> Result<Self> {
        if source_rate == 0 {
            return Err(AudioError::InvalidRate(source_rate));
        }
        if target_rate == 0 {
            return Err(AudioError::InvalidRate(target_rate));
        }
        if target_rate > source_rate {
            return Err(AudioError::UpsamplingRequested {
                from: source_rate,
                to: target_rate,
            });
        }
        let g = gcd(source_rate as u64, target_rate as u64);
        let up = (target_rate as u64 / g) as usize;
        let down = (source_rate as u64 / g) as usize;

        // cutoff at the target Nyquist, expressed in input-sample units
        let ratio = up as f64 / down as f64;
        let half_width = ZERO_CROSSINGS as f64 / ratio;
        let reach = half_width.ceil() as usize;
        let taps = 2 * reach + 2;

        let phases = (0..up)
            .map(|phase| {
                let frac = phase as f64 / up as f64;
                let mut row: Vec<f64> = (0..taps)
                    .map(|i| {
                        // distance from the output instant to input sample (n0 + i - reach)
                        let t = i as f64 - reach as f64 - frac;
                        if t.abs() >= half_width {
                            0.0
                        } else {
                            let window = 0.5 * (1.0 + (PI * t / half_width).cos());
                            ratio * sinc(ratio * t) * window
                        }
                    })
                    .collect();
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|c| *c /= sum);
                row
            })
            .collect();

        Ok(Self {
            source_rate,
            target_rate,
            up,
            down,
            reach,
            phases,
        })
    }

    /// `floor(len * target / source)`.
    pub fn output_len(&self, input_len: usize) -> usize {
        (input_len as u128 * self.up as u128 / self.down as u128) as usize
    }

    pub fn process(&self, s: &Signal) -> Result<Signal> {
        if s.is_empty() {
            return Err(AudioError::EmptySignal);
        }
        if s.rate != self.source_rate {
            return Err(AudioError::InvalidParameter(format!(
                "resampler built for {} Hz, signal is {} Hz",
                self.source_rate, s.rate
            )));
        }
        if self.up == self.down {
            return Ok(s.clone());
        }
        let x = &s.samples;
        let n_out = self.output_len(x.len());
        let mut out = Vec::with_capacity(n_out);
        for m in 0..n_out {
            let pos = m as u128 * self.down as u128;
            let n0 = (pos / self.up as u128) as usize;
            let phase = (pos % self.up as u128) as usize;
            let taps = &self.phases[phase];
            // input index for tap i is n0 + i - reach; out-of-range samples are zero
            let first = self.reach.saturating_sub(n0);
            let last = taps.len().min(x.len() + self.reach - n0);
            let base = n0 + first - self.reach;
            let acc: f64 = taps[first..last]
                .iter()
                .zip(&x[base..base + (last - first)])
                .map(|(c, v)| c * v)
                .sum();
            out.push(acc);
        }
        Signal::new(out, self.target_rate)
    }
}

/// One-shot convenience wrapper around [`Resampler`].
pub fn resample(s: &Signal, target_rate: u32) -> Result<Signal> {
    if s.is_empty() {
        return Err(AudioError::EmptySignal);
    }
    Resampler::new(s.rate, target_rate)?.process(s)
}
