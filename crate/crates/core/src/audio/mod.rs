//! Signal ingestion and preprocessing: WAV decoding, rate conversion,
//! peak normalization, energy-based voice activity detection, silence
//! removal, pre-emphasis and Hamming framing.

mod frame;
mod resample;
mod vad;
mod wav;

pub use frame::{frame_and_window, hamming_weights, FrameMatrix};
pub use resample::{resample, Resampler, ZERO_CROSSINGS};
pub use vad::{remove_silence, voiced_segments, Segment};
pub use wav::{read_wav, write_wav_i16};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("file not found: {0}")]
    MissingFile(String),
    #[error("malformed WAV header: {0}")]
    MalformedHeader(String),
    #[error("unsupported channel count {0}; only mono is accepted")]
    UnsupportedChannels(u16),
    #[error("unsupported sample encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("signal is empty")]
    EmptySignal,
    #[error("signal has no nonzero sample")]
    SilentSignal,
    #[error("upsampling requested: {from} Hz -> {to} Hz")]
    UpsamplingRequested { from: u32, to: u32 },
    #[error("invalid sample rate {0}")]
    InvalidRate(u32),
    #[error("no voiced segment remains")]
    EmptyVoiced,
    #[error("utterance too short: {len} samples, need at least {frame_len}")]
    UtteranceTooShort { len: usize, frame_len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid segment list: {0}")]
    InvalidSegments(String),
}

pub type Result<T> = std::result::Result<T, AudioError>;

/// Mono audio, samples nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub samples: Vec<f64>,
    pub rate: u32,
}

impl Signal {
    pub fn new(samples: Vec<f64>, rate: u32) -> Result<Self> {
        if rate == 0 {
            return Err(AudioError::InvalidRate(rate));
        }
        Ok(Self { samples, rate })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.rate as f64
    }

    fn non_empty(&self) -> Result<()> {
        if self.samples.is_empty() {
            Err(AudioError::EmptySignal)
        } else {
            Ok(())
        }
    }
}

/// Divides every sample by the peak absolute value.
pub fn normalize(s: &Signal) -> Result<Signal> {
    s.non_empty()?;
    let peak = s.samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return Err(AudioError::SilentSignal);
    }
    Ok(Signal {
        samples: s.samples.iter().map(|x| x / peak).collect(),
        rate: s.rate,
    })
}

/// First-order high-pass `y[n] = x[n] - a * x[n-1]`, with `x[-1] = 0`.
pub fn pre_emphasize(s: &Signal, a: f64) -> Result<Signal> {
    s.non_empty()?;
    if !(0.0..1.0).contains(&a) {
        return Err(AudioError::InvalidParameter(format!(
            "pre-emphasis coefficient {a} outside [0, 1)"
        )));
    }
    let mut out = Vec::with_capacity(s.len());
    let mut prev = 0.0;
    for &x in &s.samples {
        out.push(x - a * prev);
        prev = x;
    }
    Ok(Signal {
        samples: out,
        rate: s.rate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(v: &[f64]) -> Signal {
        Signal::new(v.to_vec(), 10_000).unwrap()
    }

    #[test]
    fn zero_rate_rejected() {
        assert!(matches!(
            Signal::new(vec![0.0], 0),
            Err(AudioError::InvalidRate(0))
        ));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            normalize(&sig(&[0.5, -0.25])).unwrap().samples,
            vec![1.0, -0.5]
        );
        assert_eq!(
            normalize(&sig(&[1.0, -1.0])).unwrap().samples,
            vec![1.0, -1.0]
        );
        assert!(matches!(
            normalize(&sig(&[0.0, 0.0, 0.0])),
            Err(AudioError::SilentSignal)
        ));
        assert!(matches!(normalize(&sig(&[])), Err(AudioError::EmptySignal)));
    }

    #[test]
    fn normalize_uses_absolute_peak() {
        let out = normalize(&sig(&[0.2, -0.8])).unwrap();
        assert_eq!(out.samples, vec![0.25, -1.0]);
    }

    #[test]
    fn pre_emphasis_examples() {
        let out = pre_emphasize(&sig(&[1.0, 1.0, 1.0]), 0.9375).unwrap();
        assert_eq!(out.samples, vec![1.0, 0.0625, 0.0625]);
        let out = pre_emphasize(&sig(&[0.0, 1.0, 0.0]), 0.9375).unwrap();
        assert_eq!(out.samples, vec![0.0, 1.0, -0.9375]);
        let x = [0.3, -0.7, 0.1, 0.9];
        assert_eq!(pre_emphasize(&sig(&x), 0.0).unwrap().samples, x.to_vec());
    }

    #[test]
    fn pre_emphasis_rejects_bad_input() {
        assert!(matches!(
            pre_emphasize(&sig(&[]), 0.5),
            Err(AudioError::EmptySignal)
        ));
        assert!(pre_emphasize(&sig(&[1.0]), 1.0).is_err());
        assert!(pre_emphasize(&sig(&[1.0]), -0.1).is_err());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(v in prop::collection::vec(-10.0f64..10.0, 1..200)) {
            prop_assume!(v.iter().any(|x| *x != 0.0));
            let once = normalize(&sig(&v)).unwrap();
            let twice = normalize(&once).unwrap();
            prop_assert_eq!(&once, &twice);
            let peak = once.samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            prop_assert_eq!(peak, 1.0);
        }

        #[test]
        fn pre_emphasis_rejects_dc(c in -1.0f64..1.0, n in 2usize..64, a in 0.0f64..0.999) {
            let out = pre_emphasize(&sig(&vec![c; n]), a).unwrap();
            prop_assert_eq!(out.samples[0], c);
            let expected = c * (1.0 - a);
            for y in &out.samples[1..] {
                // identical up to the rounding of c*(1-a) vs c - a*c
                prop_assert!((y - expected).abs() <= 2.0 * f64::EPSILON * c.abs());
                prop_assert_eq!(*y, out.samples[1]);
            }
        }
    }
}
