use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{FeatureError, Result};

/// Zero-padding FFT that returns `|X_k|^2` for `k = 0..=fft_size/2`.
#[derive(Clone)]
pub struct SpectrumAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    fft_size: usize,
}

impl fmt::Debug for SpectrumAnalyzer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumAnalyzer")
            .field("fft_size", &self.fft_size)
            .finish()
    }
}

impl SpectrumAnalyzer {
    pub fn new(fft_size: usize) -> Result<Self> {
        if fft_size == 0 {
            return Err(FeatureError::InvalidParameter("FFT size is zero".into()));
        }
        let fft = FftPlanner::new().plan_fft_forward(fft_size);
        Ok(Self { fft, fft_size })
    }

    pub fn fft_size(&self) -> usize {
        self.fft_size
    }

    pub fn power_spectrum(&self, frame: &[f64]) -> Result<Vec<f64>> {
        if frame.len() > self.fft_size {
            return Err(FeatureError::FrameTooLong {
                frame: frame.len(),
                fft_size: self.fft_size,
            });
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_size];
        for (b, &x) in buf.iter_mut().zip(frame) {
            b.re = x;
        }
        self.fft.process(&mut buf);
        Ok(buf[..=self.fft_size / 2]
            .iter()
            .map(|c| c.norm_sqr())
            .collect())
    }
}

pub fn power_spectrum(frame: &[f64], fft_size: usize) -> Result<Vec<f64>> {
    SpectrumAnalyzer::new(fft_size)?.power_spectrum(frame)
}
