//! Fixed-width bit strings used for keys, blocks and digests.
//!
//! Index 0 is the most significant bit of the hexadecimal rendering. Widths that are not
//! a multiple of four are rendered with leading zero padding, so `0b10_1000_0010` (10 bits)
//! prints as `282`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{input_err, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return input_err("bit string width must be positive");
        }
        Ok(Self { bits })
    }

    pub fn zeros(width: usize) -> Result<Self> {
        Self::new(vec![false; width])
    }

    /// Low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Result<Self> {
        if width == 0 || width > 64 {
            return input_err(format!("width {width} does not fit in a u64"));
        }
        if width < 64 && value >> width != 0 {
            return input_err(format!("value {value:#x} does not fit in {width} bits"));
        }
        Self::new((0..width).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn to_u64(&self) -> Result<u64> {
        if self.width() > 64 {
            return input_err(format!("{}-bit string does not fit in a u64", self.width()));
        }
        Ok(self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::new(bytes.iter().flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1 == 1)).collect())
    }

    /// Big-endian bytes; the width must be a multiple of eight.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if !self.width().is_multiple_of(8) {
            return input_err(format!("width {} is not a whole number of bytes", self.width()));
        }
        Ok(self.bits.chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8)).collect())
    }

    /// Parses `0`/`1` characters.
    pub fn from_bin(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => input_err(format!("invalid binary digit {other:?}")),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits)
    }

    pub fn to_bin(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    /// Parses exactly `ceil(width / 4)` hex digits; padding bits must be zero.
    pub fn from_hex(s: &str, width: usize) -> Result<Self> {
        if width == 0 {
            return input_err("bit string width must be positive");
        }
        let s = s.trim();
        let s = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
        let digits = width.div_ceil(4);
        if s.len() != digits {
            return input_err(format!("expected {digits} hex digits for {width} bits, got {:?}", s));
        }
        let mut bits = Vec::with_capacity(digits * 4);
        for c in s.chars() {
            let Some(nibble) = c.to_digit(16) else {
                return input_err(format!("invalid hex digit {c:?}"));
            };
            bits.extend((0..4).rev().map(|i| (nibble >> i) & 1 == 1));
        }
        let pad = digits * 4 - width;
        if bits[..pad].iter().any(|&b| b) {
            return input_err(format!("hex value {s:?} exceeds {width} bits"));
        }
        Self::new(bits.split_off(pad))
    }

    pub fn to_hex(&self) -> String {
        let pad = (4 - self.width() % 4) % 4;
        let padded: Vec<bool> = std::iter::repeat_n(false, pad).chain(self.bits.iter().copied()).collect();
        padded
            .chunks(4)
            .map(|c| {
                let v = c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                char::from_digit(v, 16).unwrap().to_ascii_uppercase()
            })
            .collect()
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitString { bits }
    }

    pub fn slice(&self, start: usize, end: usize) -> Result<BitString> {
        if start >= end || end > self.width() {
            return input_err(format!("slice {start}..{end} out of range for width {}", self.width()));
        }
        Ok(BitString { bits: self.bits[start..end].to_vec() })
    }

    /// Copy with bits `start..start + segment.width()` replaced by `segment`.
    pub fn splice(&self, start: usize, segment: &BitString) -> Result<BitString> {
        let end = start + segment.width();
        if end > self.width() {
            return input_err(format!("segment {start}..{end} out of range for width {}", self.width()));
        }
        let mut bits = self.bits.clone();
        bits[start..end].copy_from_slice(&segment.bits);
        Ok(BitString { bits })
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_bin())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bin())
    }
}

#[derive(Serialize, Deserialize)]
struct HexRepr {
    width: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        HexRepr { width: self.width(), hex: self.to_hex() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = HexRepr::deserialize(deserializer)?;
        BitString::from_hex(&repr.hex, repr.width).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ten_bit_hex_rendering() {
        let k = BitString::from_bin("1010000010").unwrap();
        assert_eq!(k.to_hex(), "282");
        assert_eq!(k.to_u64().unwrap(), 0x282);
        assert_eq!(BitString::from_hex("282", 10).unwrap(), k);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BitString::new(vec![]).is_err());
        assert!(BitString::from_hex("482", 10).is_err());
        assert!(BitString::from_hex("12", 10).is_err());
        assert!(BitString::from_hex("xyz", 12).is_err());
        assert!(BitString::from_u64(4, 2).is_err());
        assert!(BitString::from_bin("10a").is_err());
        assert!(BitString::from_bin("101").unwrap().to_bytes().is_err());
    }

    #[test]
    fn bytes_are_big_endian() {
        let b = BitString::from_bytes(&[0x80, 0x01]).unwrap();
        assert!(b.bit(0));
        assert!(b.bit(15));
        assert_eq!(b.count_ones(), 2);
        assert_eq!(b.to_hex(), "8001");
    }

    #[test]
    fn splice_and_slice() {
        let doc = BitString::from_hex("ABCD", 16).unwrap();
        let seg = BitString::from_hex("0", 4).unwrap();
        let out = doc.splice(4, &seg).unwrap();
        assert_eq!(out.to_hex(), "A0CD");
        assert_eq!(out.slice(4, 8).unwrap(), seg);
        assert!(doc.splice(14, &seg).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let k = BitString::from_bin("1010000010").unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"width":10,"hex":"282"}"#);
        assert_eq!(serde_json::from_str::<BitString>(&s).unwrap(), k);
    }

    proptest! {
        #[test]
        fn hex_roundtrip(bits in proptest::collection::vec(any::<bool>(), 1..200)) {
            let b = BitString::new(bits).unwrap();
            prop_assert_eq!(BitString::from_hex(&b.to_hex(), b.width()).unwrap(), b);
        }
    }
}
