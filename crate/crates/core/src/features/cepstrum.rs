use std::f64::consts::PI;

use super::{FeatureError, MelFilterbank, Result};

/// Floor applied to filter energies before the natural log.
pub const LOG_FLOOR: f64 = 1e-12;

/// Orthonormal DCT-II of a fixed length, backed by a cosine table.
#[derive(Debug, Clone, PartialEq)]
pub struct Dct {
    len: usize,
    /// `table[j * len + i] = s_j cos(pi (i + 1/2) j / len)`
    table: Vec<f64>,
}

impl Dct {
    pub fn new(len: usize) -> Self {
        let n = len as f64;
        let mut table = Vec::with_capacity(len * len);
        for j in 0..len {
            let scale = if j == 0 {
                (1.0 / n).sqrt()
            } else {
                (2.0 / n).sqrt()
            };
            for i in 0..len {
                table.push(scale * (PI * (i as f64 + 0.5) * j as f64 / n).cos());
            }
        }
        Self { len, table }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// First `count` coefficients. `input.len()` must equal `self.len()`.
    pub fn forward_truncated(&self, input: &[f64], count: usize) -> Vec<f64> {
        debug_assert_eq!(input.len(), self.len);
        self.table
            .chunks_exact(self.len)
            .take(count)
            .map(|basis| basis.iter().zip(input).map(|(b, x)| b * x).sum())
            .collect()
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_truncated(input, self.len)
    }

    /// Transpose of the forward transform, i.e. its inverse (DCT-III).
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.len);
        let mut out = vec![0.0; self.len];
        for (basis, &c) in self.table.chunks_exact(self.len).zip(coeffs) {
            for (o, b) in out.iter_mut().zip(basis) {
                *o += b * c;
            }
        }
        out
    }
}

impl MelFilterbank {
    /// `ln(max(fb_i . spectrum, LOG_FLOOR))` for every filter.
    pub fn log_energies(&self, spectrum: &[f64]) -> Result<Vec<f64>> {
        Ok(self
            .apply(spectrum)?
            .into_iter()
            .map(|e| e.max(LOG_FLOOR).ln())
            .collect())
    }
}

/// Log mel energies followed by the orthonormal DCT-II, keeping `c0..c{count-1}`.
pub fn cepstra_from_spectrum(
    spectrum: &[f64],
    fb: &MelFilterbank,
    coeff_count: usize,
) -> Result<Vec<f64>> {
    if coeff_count > fb.num_filters {
        return Err(FeatureError::DimensionMismatch {
            expected: fb.num_filters,
            actual: coeff_count,
        });
    }
    let energies = fb.log_energies(spectrum)?;
    Ok(Dct::new(fb.num_filters).forward_truncated(&energies, coeff_count))
}
