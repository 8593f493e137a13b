//! Mono 16-bit PCM WAV.
//!
//! Writing is done by hand so the file can carry a `LIST/INFO` chunk with the
//! provenance line; `hound` reads files back and skips that chunk.

use std::path::Path;

use crate::{CliError, Result};

const FULL_SCALE: f64 = 32767.0;

fn info_entry(out: &mut Vec<u8>, id: &[u8; 4], text: &str) {
    let mut body = text.as_bytes().to_vec();
    body.push(0);
    out.extend_from_slice(id);
    out.extend_from_slice(&(body.len() as u32).to_le_bytes());
    out.extend_from_slice(&body);
    if body.len() % 2 == 1 {
        out.push(0);
    }
}

/// Encodes samples in [-1, 1] and returns the bytes and the clipped count.
pub fn encode(samples: &[f64], sample_rate: u32, comment: &str) -> (Vec<u8>, usize) {
    let mut info = b"INFO".to_vec();
    info_entry(&mut info, b"ISFT", &format!("wristsonar {}", env!("CARGO_PKG_VERSION")));
    info_entry(&mut info, b"ICMT", comment);

    let data_len = samples.len() * 2;
    let riff_len = 4 + (8 + 16) + (8 + info.len()) + (8 + data_len);
    let mut out = Vec::with_capacity(riff_len + 8);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(riff_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");

    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());

    out.extend_from_slice(b"LIST");
    out.extend_from_slice(&(info.len() as u32).to_le_bytes());
    out.extend_from_slice(&info);

    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    let mut clipped = 0;
    for &x in samples {
        let v = (x * FULL_SCALE).round();
        if !(-32768.0..=FULL_SCALE).contains(&v) {
            clipped += 1;
        }
        out.extend_from_slice(&(v.clamp(-32768.0, FULL_SCALE) as i16).to_le_bytes());
    }
    (out, clipped)
}

/// Reads a mono 16-bit PCM file into samples in [-1, 1] and its rate.
pub fn read(path: &Path) -> Result<(Vec<f64>, u32)> {
    let mut r = hound::WavReader::open(path).map_err(|e| CliError::io(path, e))?;
    let spec = r.spec();
    if spec.channels != 1 || spec.bits_per_sample != 16 || spec.sample_format != hound::SampleFormat::Int {
        return Err(CliError::io(
            path,
            format!(
                "expected mono 16-bit PCM, found {} channel(s) of {}-bit {:?}",
                spec.channels, spec.bits_per_sample, spec.sample_format
            ),
        ));
    }
    let samples = r
        .samples::<i16>()
        .map(|s| s.map(|v| v as f64 / FULL_SCALE))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::io(path, e))?;
    Ok((samples, spec.sample_rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_sizes_add_up() {
        let (bytes, clipped) = encode(&[0.0, 0.5, -0.5, 1.2], 48_000, "odd");
        assert_eq!(clipped, 1);
        let riff = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        assert_eq!(riff + 8, bytes.len());
        assert_eq!(&bytes[bytes.len() - 2..], &32767i16.to_le_bytes());
    }
}
