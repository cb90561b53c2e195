use super::{FeatureError, Result};

/// `2595 * log10(1 + f / 700)`.
pub fn hz_to_mel(f: f64) -> Result<f64> {
    if f < 0.0 {
        return Err(FeatureError::NegativeFrequency(f));
    }
    Ok(2595.0 * (1.0 + f / 700.0).log10())
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters on the mel scale, each peaking at 1.0 on its center bin.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    /// `num_filters` rows of `fft_size / 2 + 1` weights.
    pub(super) weights: Vec<f64>,
    pub num_filters: usize,
    pub fft_size: usize,
    pub rate: u32,
    /// The `num_filters + 2` edge/center bins, from 0 Hz to Nyquist.
    pub center_bins: Vec<usize>,
    pub center_hz: Vec<f64>,
}

impl MelFilterbank {
    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.num_bins();
        &self.weights[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks_exact(self.num_bins())
    }

    /// Linear filter outputs `fb_i . spectrum`.
    pub fn apply(&self, spectrum: &[f64]) -> Result<Vec<f64>> {
        if spectrum.len() != self.num_bins() {
            return Err(FeatureError::DimensionMismatch {
                expected: self.num_bins(),
                actual: spectrum.len(),
            });
        }
        Ok(self
            .rows()
            .map(|row| row.iter().zip(spectrum).map(|(w, p)| w * p).sum())
            .collect())
    }
}

/// Builds `num_filters` triangles whose edges are `num_filters + 2` points
/// equally spaced in mel from 0 Hz to `rate / 2`, snapped to the nearest bin.
pub fn build_filterbank(num_filters: usize, fft_size: usize, rate: u32) -> Result<MelFilterbank> {
    if num_filters == 0 {
        return Err(FeatureError::InvalidParameter(
            "need at least one filter".into(),
        ));
    }
    if !fft_size.is_power_of_two() || fft_size < 2 {
        return Err(FeatureError::InvalidParameter(format!(
            "FFT size {fft_size} is not a power of two"
        )));
    }
    if rate == 0 {
        return Err(FeatureError::InvalidParameter("sample rate is zero".into()));
    }
    let nyquist = rate as f64 / 2.0;
    let mel_max = hz_to_mel(nyquist)?;
    let num_bins = fft_size / 2 + 1;

    let center_hz: Vec<f64> = (0..num_filters + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (num_filters + 1) as f64))
        .collect();
    let center_bins: Vec<usize> = center_hz
        .iter()
        .map(|f| ((f * fft_size as f64 / rate as f64).round() as usize).min(num_bins - 1))
        .collect();
    if center_bins.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FeatureError::TooManyFilters {
            num_filters,
            fft_size,
        });
    }

    let mut weights = vec![0.0; num_filters * num_bins];
    for (i, row) in weights.chunks_exact_mut(num_bins).enumerate() {
        let (lo, mid, hi) = (center_bins[i], center_bins[i + 1], center_bins[i + 2]);
        for b in lo + 1..=mid {
            row[b] = (b - lo) as f64 / (mid - lo) as f64;
        }
        for b in mid + 1..hi {
            row[b] = (hi - b) as f64 / (hi - mid) as f64;
        }
    }

    Ok(MelFilterbank {
        weights,
        num_filters,
        fft_size,
        rate,
        center_bins,
        center_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mel_examples() {
        assert_eq!(hz_to_mel(0.0).unwrap(), 0.0);
        // 2595 * log10(17/7)
        let m = hz_to_mel(1000.0).unwrap();
        assert!((m - 999.985_537_139_624_4).abs() < 1e-9, "{m}");
        for f in [100.0, 700.0, 4000.0] {
            let back = mel_to_hz(hz_to_mel(f).unwrap());
            assert!(((back - f) / f).abs() < 1e-9);
        }
        assert!(matches!(
            hz_to_mel(-1.0),
            Err(FeatureError::NegativeFrequency(_))
        ));
    }

    #[test]
    fn paper_filterbank_shape() {
        let fb = build_filterbank(40, 512, 10_000).unwrap();
        assert_eq!(fb.weights.len(), 40 * 257);
        assert_eq!(fb.num_bins(), 257);
        assert_eq!(fb.center_bins.len(), 42);
        assert_eq!(*fb.center_bins.first().unwrap(), 0);
        assert_eq!(*fb.center_bins.last().unwrap(), 256);
        assert!(fb.center_hz.windows(2).all(|w| w[0] < w[1]));
        for row in fb.rows() {
            assert!(row.iter().all(|&w| w >= 0.0));
            let max = row.iter().cloned().fold(0.0, f64::max);
            assert_eq!(max, 1.0);
        }
    }

    #[test]
    fn rows_are_single_peaked_triangles() {
        let fb = build_filterbank(40, 512, 10_000).unwrap();
        for (i, row) in fb.rows().enumerate() {
            let peak = fb.center_bins[i + 1];
            assert_eq!(row[peak], 1.0);
            assert!(
                row[..=peak].windows(2).all(|w| w[0] <= w[1]),
                "row {i} rises"
            );
            assert!(
                row[peak..].windows(2).all(|w| w[0] >= w[1]),
                "row {i} falls"
            );
        }
    }

    #[test]
    fn coverage_between_first_and_last_centers() {
        let fb = build_filterbank(40, 512, 10_000).unwrap();
        let first = fb.center_bins[1];
        let last = fb.center_bins[40];
        for b in first..=last {
            let total: f64 = fb.rows().map(|r| r[b]).sum();
            assert!(total > 0.0, "bin {b} uncovered");
        }
    }

    #[test]
    fn collapsing_filters_rejected() {
        assert!(matches!(
            build_filterbank(200, 256, 10_000),
            Err(FeatureError::TooManyFilters { .. })
        ));
        assert!(build_filterbank(40, 500, 10_000).is_err());
        assert!(build_filterbank(0, 512, 10_000).is_err());
    }

    #[test]
    fn apply_checks_length() {
        let fb = build_filterbank(40, 512, 10_000).unwrap();
        assert!(fb.apply(&vec![0.0; 256]).is_err());
        let out = fb.apply(&vec![1.0; 257]).unwrap();
        assert_eq!(out.len(), 40);
        assert!(out.iter().all(|&e| e > 0.0));
    }
}
