use std::f64::consts::PI;

use super::{AudioError, Result, Signal};

/// `w(n) = 0.54 - 0.46 cos(2 pi n / (len - 1))`.
pub fn hamming_weights(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / denom).cos())
        .collect()
}

/// Hamming-windowed frames stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    data: Vec<f64>,
    pub frame_len: usize,
    pub shift: usize,
    pub rate: u32,
}

impl FrameMatrix {
    pub fn num_frames(&self) -> usize {
        self.data.len() / self.frame_len
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.frame_len..(t + 1) * self.frame_len]
    }

    pub fn frames(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.data.chunks_exact(self.frame_len)
    }
}

/// Number of complete frames; the tail that does not fill a frame is dropped.
pub fn frame_count(len: usize, frame_len: usize, shift: usize) -> usize {
    if len < frame_len {
        0
    } else {
        (len - frame_len) / shift + 1
    }
}

pub fn frame_and_window(s: &Signal, frame_len: usize, shift: usize) -> Result<FrameMatrix> {
    if frame_len == 0 || shift == 0 {
        return Err(AudioError::InvalidParameter(
            "frame length and shift must be positive".into(),
        ));
    }
    if s.len() < frame_len {
        return Err(AudioError::UtteranceTooShort {
            len: s.len(),
            frame_len,
        });
    }
    let weights = hamming_weights(frame_len);
    let count = frame_count(s.len(), frame_len, shift);
    let mut data = Vec::with_capacity(count * frame_len);
    for t in 0..count {
        let start = t * shift;
        data.extend(
            s.samples[start..start + frame_len]
                .iter()
                .zip(&weights)
                .map(|(x, w)| x * w),
        );
    }
    Ok(FrameMatrix {
        data,
        frame_len,
        shift,
        rate: s.rate,
    })
}
