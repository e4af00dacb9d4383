//! Result files: binary vectors and ASCII graymap previews.
//!
//! Binary vectors are an 8-byte little-endian `u64` length followed by that
//! many little-endian IEEE-754 `f64` values.

use std::fs;
use std::io;
use std::path::Path;

pub fn encode_vector(v: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 8 * v.len());
    out.extend_from_slice(&(v.len() as u64).to_le_bytes());
    for x in v {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_vector(bytes: &[u8]) -> io::Result<Vec<f64>> {
    let bad = |msg: &str| io::Error::new(io::ErrorKind::InvalidData, msg.to_string());
    let (head, body) = bytes
        .split_first_chunk::<8>()
        .ok_or_else(|| bad("missing length header"))?;
    let len = u64::from_le_bytes(*head) as usize;
    if body.len() != len.checked_mul(8).ok_or_else(|| bad("length overflows"))? {
        return Err(bad("payload length does not match header"));
    }
    Ok(body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> io::Result<()> {
    fs::write(path, encode_vector(v))
}

pub fn read_vector(path: impl AsRef<Path>) -> io::Result<Vec<f64>> {
    decode_vector(&fs::read(path)?)
}

/// Plain (`P2`) graymap, row-major, values mapped linearly from
/// `[min, max]` to `0..=255`.
pub fn encode_pgm(img: &[f64], rows: usize, cols: usize) -> String {
    assert_eq!(img.len(), rows * cols, "image size");
    let lo = img.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = img.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut out = format!("P2\n{cols} {rows}\n255\n");
    for row in img.chunks(cols) {
        let line: Vec<String> = row
            .iter()
            .map(|&v| {
                let g = if span > 0.0 { (v - lo) / span * 255.0 } else { 0.0 };
                (g.round().clamp(0.0, 255.0) as u8).to_string()
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_pgm(path: impl AsRef<Path>, img: &[f64], rows: usize, cols: usize) -> io::Result<()> {
    fs::write(path, encode_pgm(img, rows, cols))
}
