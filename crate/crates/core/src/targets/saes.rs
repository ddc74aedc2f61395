//! Simplified AES: 16-bit key and block, two rounds over GF(2⁴) mod x⁴ + x + 1.

use crate::bits::BitString;
use crate::error::{input_err, Result};

const SBOX: [u8; 16] = [0x9, 0x4, 0xA, 0xB, 0xD, 0x1, 0x8, 0x5, 0x6, 0x2, 0x0, 0x3, 0xC, 0xE, 0xF, 0x7];
const SBOX_INV: [u8; 16] = [0xA, 0x5, 0x9, 0xB, 0x1, 0x7, 0x8, 0xF, 0x6, 0x0, 0x2, 0x3, 0xC, 0x4, 0xD, 0xE];
const RCON: [u8; 2] = [0x80, 0x30];

/// Multiplication in GF(16) with reduction polynomial x⁴ + x + 1.
pub fn gf16_mul(mut a: u8, mut b: u8) -> u8 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        a <<= 1;
        if a & 0x10 != 0 {
            a ^= 0x13;
        }
        b >>= 1;
    }
    acc & 0xf
}

fn sub_word(w: u16, table: &[u8; 16]) -> u16 {
    (0..4).rev().fold(0, |acc, i| (acc << 4) | table[((w >> (4 * i)) & 0xf) as usize] as u16)
}

fn sub_byte(b: u8) -> u8 {
    (SBOX[(b >> 4) as usize] << 4) | SBOX[(b & 0xf) as usize]
}

/// Round keys `K0, K1, K2`.
pub fn expand_key(key: u16) -> [u16; 3] {
    let mut w = [0u8; 6];
    w[0] = (key >> 8) as u8;
    w[1] = key as u8;
    for r in 0..2 {
        let prev = w[2 * r + 1];
        w[2 * r + 2] = w[2 * r] ^ RCON[r] ^ sub_byte(prev.rotate_left(4));
        w[2 * r + 3] = w[2 * r + 2] ^ prev;
    }
    [0, 1, 2].map(|i| ((w[2 * i] as u16) << 8) | w[2 * i + 1] as u16)
}

/// Nibbles n0..n3 from most significant; columns are (n0, n1) and (n2, n3), so
/// ShiftRow swaps n1 and n3.
fn shift_rows(s: u16) -> u16 {
    (s & 0xf0f0) | ((s & 0x000f) << 8) | ((s >> 8) & 0x000f)
}

fn mix_columns_with(s: u16, m: [[u8; 2]; 2]) -> u16 {
    let n = [(s >> 12) as u8 & 0xf, (s >> 8) as u8 & 0xf, (s >> 4) as u8 & 0xf, s as u8 & 0xf];
    let mut out = [0u8; 4];
    for c in 0..2 {
        let (top, bottom) = (n[2 * c], n[2 * c + 1]);
        out[2 * c] = gf16_mul(m[0][0], top) ^ gf16_mul(m[0][1], bottom);
        out[2 * c + 1] = gf16_mul(m[1][0], top) ^ gf16_mul(m[1][1], bottom);
    }
    out.iter().fold(0, |acc, &x| (acc << 4) | x as u16)
}

pub const MIX: [[u8; 2]; 2] = [[1, 4], [4, 1]];
pub const MIX_INV: [[u8; 2]; 2] = [[9, 2], [2, 9]];

pub fn mix_columns(s: u16) -> u16 {
    mix_columns_with(s, MIX)
}

pub fn inv_mix_columns(s: u16) -> u16 {
    mix_columns_with(s, MIX_INV)
}

pub fn encrypt_u16(key: u16, plain: u16) -> u16 {
    let k = expand_key(key);
    let mut s = plain ^ k[0];
    s = mix_columns(shift_rows(sub_word(s, &SBOX))) ^ k[1];
    shift_rows(sub_word(s, &SBOX)) ^ k[2]
}

pub fn decrypt_u16(key: u16, cipher: u16) -> u16 {
    let k = expand_key(key);
    let mut s = sub_word(shift_rows(cipher ^ k[2]), &SBOX_INV);
    s = sub_word(shift_rows(inv_mix_columns(s ^ k[1])), &SBOX_INV);
    s ^ k[0]
}

fn widths(key: &BitString, block: &BitString) -> Result<(u16, u16)> {
    if key.width() != 16 || block.width() != 16 {
        return input_err(format!(
            "S-AES needs a 16-bit key and 16-bit block, got {} and {}",
            key.width(),
            block.width()
        ));
    }
    Ok((key.to_u64()? as u16, block.to_u64()? as u16))
}

pub fn saes_encrypt(key: &BitString, plain: &BitString) -> Result<BitString> {
    let (k, p) = widths(key, plain)?;
    BitString::from_u64(encrypt_u16(k, p) as u64, 16)
}

pub fn saes_decrypt(key: &BitString, cipher: &BitString) -> Result<BitString> {
    let (k, c) = widths(key, cipher)?;
    BitString::from_u64(decrypt_u16(k, c) as u64, 16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use rand::Rng;

    #[test]
    fn textbook_key_expansion() {
        // w2..w5 = 1C 27 76 51 for key A73B
        assert_eq!(expand_key(0xA73B), [0xA73B, 0x1C27, 0x7651]);
    }

    #[test]
    fn mix_columns_inverse_exhaustive() {
        for s in 0..=0xffffu16 {
            assert_eq!(inv_mix_columns(mix_columns(s)), s);
            assert_eq!(mix_columns(inv_mix_columns(s)), s);
        }
    }

    #[test]
    fn sbox_tables_are_inverse() {
        for x in 0..16 {
            assert_eq!(SBOX_INV[SBOX[x] as usize] as usize, x);
        }
    }

    #[test]
    fn random_inverse() {
        let mut rng = trial_rng(2, 0);
        for _ in 0..10_000 {
            let (k, p): (u16, u16) = (rng.gen(), rng.gen());
            assert_eq!(decrypt_u16(k, encrypt_u16(k, p)), p);
        }
    }

    #[test]
    fn width_errors() {
        assert!(saes_encrypt(&BitString::zeros(16).unwrap(), &BitString::zeros(8).unwrap()).is_err());
    }
}
