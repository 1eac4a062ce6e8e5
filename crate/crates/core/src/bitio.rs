//! Bit file formats for information words and codewords.
//!
//! * ASCII: one section per line, `M` characters from `{0, 1}`.
//! * Packed: bits in order, eight per byte, most significant bit first,
//!   zero padded at the end.

use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub fn write_ascii(sections: &[BitVector]) -> String {
    let mut out = String::with_capacity(sections.iter().map(|s| s.len() + 1).sum());
    for s in sections {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

/// Parses sections of exactly `m` bits. Blank lines and lines starting
/// with `#` are skipped.
pub fn read_ascii(text: &str, m: usize) -> Result<Vec<BitVector>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: BitVector = line.parse().map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(idx + 1, message),
            other => other,
        })?;
        if v.len() != m {
            return Err(Error::parse(idx + 1, format!("expected {m} bits, found {}", v.len())));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn to_packed(bits: &BitVector) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for i in 0..bits.len() {
        if bits.get(i) {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

pub fn from_packed(bytes: &[u8], n_bits: usize) -> Result<BitVector> {
    if bytes.len() != n_bits.div_ceil(8) {
        return Err(Error::parse(
            0,
            format!(
                "expected {} bytes for {n_bits} bits, found {}",
                n_bits.div_ceil(8),
                bytes.len()
            ),
        ));
    }
    Ok(BitVector::from_bits(
        (0..n_bits).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0),
    ))
}
