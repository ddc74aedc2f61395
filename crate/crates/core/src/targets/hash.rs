//! Truncated FNV-1a, used as a small collision target.

use crate::bits::BitString;
use crate::error::{input_err, Result};

pub const FNV_OFFSET_BASIS: u32 = 2_166_136_261;
pub const FNV_PRIME: u32 = 16_777_619;

pub fn fnv1a32(bytes: &[u8]) -> u32 {
    bytes.iter().fold(FNV_OFFSET_BASIS, |h, &b| (h ^ b as u32).wrapping_mul(FNV_PRIME))
}

fn check_digest_width(t: usize) -> Result<()> {
    if !matches!(t, 8 | 16 | 24) {
        return input_err(format!("digest width {t} not in {{8, 16, 24}}"));
    }
    Ok(())
}

/// Low `t` bits of FNV-1a over raw bytes.
pub fn toy_hash_bytes(bytes: &[u8], t: usize) -> Result<BitString> {
    check_digest_width(t)?;
    BitString::from_u64((fnv1a32(bytes) & ((1u32 << t) - 1)) as u64, t)
}

pub fn toy_hash(input: &BitString, t: usize) -> Result<BitString> {
    toy_hash_bytes(&input.to_bytes()?, t)
}
