//! Mono 32-bit float WAV files.

use super::LinkError;
use std::path::Path;

fn spec(sample_rate: f64) -> Result<hound::WavSpec, LinkError> {
    if !(sample_rate >= 1.0 && sample_rate <= u32::MAX as f64 && sample_rate.fract() == 0.0) {
        return Err(LinkError::InvalidConfig(format!("WAV needs an integral sample rate, got {sample_rate}")));
    }
    Ok(hound::WavSpec {
        channels: 1,
        sample_rate: sample_rate as u32,
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    })
}

pub fn write_wav(path: impl AsRef<Path>, samples: &[f64], sample_rate: f64) -> Result<(), LinkError> {
    let mut writer = hound::WavWriter::create(path, spec(sample_rate)?)?;
    for &s in samples {
        writer.write_sample(s as f32)?;
    }
    writer.finalize()?;
    Ok(())
}

/// Returns the samples and the sample rate.
pub fn read_wav(path: impl AsRef<Path>) -> Result<(Vec<f64>, f64), LinkError> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(LinkError::InvalidConfig(format!("expected a mono WAV, got {} channels", spec.channels)));
    }
    let samples = match spec.sample_format {
        hound::SampleFormat::Float => reader.samples::<f32>().map(|s| s.map(f64::from)).collect::<Result<_, _>>()?,
        hound::SampleFormat::Int => {
            let scale = 2f64.powi(spec.bits_per_sample as i32 - 1);
            reader.samples::<i32>().map(|s| s.map(|v| v as f64 / scale)).collect::<Result<_, _>>()?
        }
    };
    Ok((samples, spec.sample_rate as f64))
}
