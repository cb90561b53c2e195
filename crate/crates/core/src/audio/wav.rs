use std::path::Path;

use super::{AudioError, Result, Signal};

/// Reads a mono integer-PCM WAV file (8, 16 or 24 bit).
///
/// Samples are scaled by `2^(bits-1)` so they land in [-1, 1).
pub fn read_wav(path: impl AsRef<Path>) -> Result<Signal> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(AudioError::MissingFile(path.display().to_string()));
    }
    let reader = hound::WavReader::open(path).map_err(map_hound_error)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(AudioError::UnsupportedChannels(spec.channels));
    }
    if spec.sample_format != hound::SampleFormat::Int {
        return Err(AudioError::UnsupportedEncoding(
            "IEEE float samples; only integer PCM is accepted".into(),
        ));
    }
    if !matches!(spec.bits_per_sample, 8 | 16 | 24) {
        return Err(AudioError::UnsupportedEncoding(format!(
            "{}-bit PCM",
            spec.bits_per_sample
        )));
    }
    if spec.sample_rate == 0 {
        return Err(AudioError::MalformedHeader("sample rate is zero".into()));
    }
    let scale = (1_i64 << (spec.bits_per_sample - 1)) as f64;
    let samples = reader
        .into_samples::<i32>()
        .map(|s| s.map(|v| v as f64 / scale))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(map_hound_error)?;
    Signal::new(samples, spec.sample_rate)
}

/// Writes a mono 16-bit PCM WAV. Samples are clamped to [-1, 1] and
/// rounded to the nearest integer level.
pub fn write_wav_i16(path: impl AsRef<Path>, signal: &Signal) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate: signal.rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec).map_err(map_hound_error)?;
    for &x in &signal.samples {
        let v = (x.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        writer.write_sample(v).map_err(map_hound_error)?;
    }
    writer.finalize().map_err(map_hound_error)
}

fn map_hound_error(e: hound::Error) -> AudioError {
    match e {
        // hound reports short reads as `Other`
        hound::Error::IoError(io)
            if matches!(
                io.kind(),
                std::io::ErrorKind::UnexpectedEof | std::io::ErrorKind::Other
            ) =>
        {
            AudioError::MalformedHeader(format!("truncated file: {io}"))
        }
        hound::Error::IoError(io) => AudioError::Io(io),
        hound::Error::FormatError(msg) => AudioError::MalformedHeader(msg.to_string()),
        hound::Error::Unsupported => AudioError::UnsupportedEncoding("non-PCM format code".into()),
        hound::Error::TooWide | hound::Error::InvalidSampleFormat => {
            AudioError::UnsupportedEncoding(e.to_string())
        }
        hound::Error::UnfinishedSample => {
            AudioError::MalformedHeader("truncated sample data".into())
        }
    }
}
