use super::{AudioError, Result, Signal};

/// Half-open sample range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

/// Energy-threshold voice activity detection.
///
/// The signal is tiled into non-overlapping windows of
/// `round(rate * window_ms / 1000)` samples; a trailing partial window keeps
/// its own (shorter) energy. A window is voiced when its energy
/// `sum(x^2)` reaches `threshold_ratio` times the largest window energy.
/// Runs of voiced windows are merged into one segment.
pub fn voiced_segments(s: &Signal, window_ms: f64, threshold_ratio: f64) -> Result<Vec<Segment>> {
    if s.is_empty() {
        return Err(AudioError::EmptySignal);
    }
    if !(threshold_ratio > 0.0 && threshold_ratio < 1.0) {
        return Err(AudioError::InvalidParameter(format!(
            "threshold ratio {threshold_ratio} outside (0, 1)"
        )));
    }
    let window = (s.rate as f64 * window_ms / 1000.0).round();
    if !(window >= 1.0) {
        return Err(AudioError::InvalidParameter(format!(
            "{window_ms} ms at {} Hz is shorter than one sample",
            s.rate
        )));
    }
    let window = window as usize;

    let energies: Vec<f64> = s
        .samples
        .chunks(window)
        .map(|c| c.iter().map(|x| x * x).sum())
        .collect();
    let max_energy = energies.iter().cloned().fold(0.0, f64::max);
    if max_energy == 0.0 {
        return Ok(Vec::new());
    }
    let threshold = threshold_ratio * max_energy;

    let mut segments: Vec<Segment> = Vec::new();
    for (i, &e) in energies.iter().enumerate() {
        if e < threshold {
            continue;
        }
        let start = i * window;
        let end = ((i + 1) * window).min(s.len());
        match segments.last_mut() {
            Some(last) if last.end == start => last.end = end,
            _ => segments.push(Segment { start, end }),
        }
    }
    Ok(segments)
}

/// Concatenates the segment contents in order.
pub fn remove_silence(s: &Signal, segments: &[Segment]) -> Result<Signal> {
    if segments.is_empty() {
        return Err(AudioError::EmptyVoiced);
    }
    let mut prev_end = 0;
    for (i, seg) in segments.iter().enumerate() {
        if seg.start >= seg.end || seg.end > s.len() {
            return Err(AudioError::InvalidSegments(format!(
                "segment {i} [{}, {}) invalid for {} samples",
                seg.start,
                seg.end,
                s.len()
            )));
        }
        if i > 0 && seg.start < prev_end {
            return Err(AudioError::InvalidSegments(format!(
                "segment {i} overlaps or precedes its predecessor"
            )));
        }
        prev_end = seg.end;
    }
    let total = segments.iter().map(Segment::len).sum();
    let mut out = Vec::with_capacity(total);
    for seg in segments {
        out.extend_from_slice(&s.samples[seg.start..seg.end]);
    }
    Signal::new(out, s.rate)
}
