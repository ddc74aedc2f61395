//! Simplified DES: 10-bit key, 8-bit block, two Feistel rounds.

use crate::bits::BitString;
use crate::error::{input_err, Result};

const P10: [u8; 10] = [3, 5, 2, 7, 4, 10, 1, 9, 8, 6];
const P8: [u8; 8] = [6, 3, 7, 4, 8, 5, 10, 9];
const IP: [u8; 8] = [2, 6, 3, 1, 4, 8, 5, 7];
const IP_INV: [u8; 8] = [4, 1, 3, 5, 7, 2, 8, 6];
const EP: [u8; 8] = [4, 1, 2, 3, 2, 3, 4, 1];
const P4: [u8; 4] = [2, 4, 3, 1];

const S0: [[u8; 4]; 4] = [[1, 0, 3, 2], [3, 2, 1, 0], [0, 2, 1, 3], [3, 1, 3, 2]];
const S1: [[u8; 4]; 4] = [[0, 1, 2, 3], [2, 0, 1, 3], [3, 0, 1, 0], [2, 1, 0, 3]];

/// Output bit i is input bit `table[i]`, positions counted from 1 at the most significant end.
fn permute(input: u16, in_width: u32, table: &[u8]) -> u16 {
    table.iter().fold(0, |acc, &pos| (acc << 1) | ((input >> (in_width - pos as u32)) & 1))
}

fn rotl5(half: u16, by: u32) -> u16 {
    ((half << by) | (half >> (5 - by))) & 0x1f
}

/// Round subkeys `(K1, K2)`.
pub fn subkeys(key: u16) -> (u8, u8) {
    let k = permute(key, 10, &P10);
    let (mut l, mut r) = (k >> 5, k & 0x1f);
    l = rotl5(l, 1);
    r = rotl5(r, 1);
    let k1 = permute((l << 5) | r, 10, &P8) as u8;
    l = rotl5(l, 2);
    r = rotl5(r, 2);
    let k2 = permute((l << 5) | r, 10, &P8) as u8;
    (k1, k2)
}

fn sbox(table: &[[u8; 4]; 4], nibble: u16) -> u16 {
    let row = ((nibble >> 2) & 0b10) | (nibble & 1);
    let col = (nibble >> 1) & 0b11;
    table[row as usize][col as usize] as u16
}

fn fk(block: u16, subkey: u8) -> u16 {
    let (l, r) = (block >> 4, block & 0xf);
    let x = permute(r, 4, &EP) ^ subkey as u16;
    let s = (sbox(&S0, x >> 4) << 2) | sbox(&S1, x & 0xf);
    ((l ^ permute(s, 4, &P4)) << 4) | r
}

fn swap_halves(block: u16) -> u16 {
    ((block & 0xf) << 4) | (block >> 4)
}

pub fn encrypt_u8(key: u16, plain: u8) -> u8 {
    let (k1, k2) = subkeys(key);
    let x = permute(plain as u16, 8, &IP);
    let x = fk(swap_halves(fk(x, k1)), k2);
    permute(x, 8, &IP_INV) as u8
}

pub fn decrypt_u8(key: u16, cipher: u8) -> u8 {
    let (k1, k2) = subkeys(key);
    let x = permute(cipher as u16, 8, &IP);
    let x = fk(swap_halves(fk(x, k2)), k1);
    permute(x, 8, &IP_INV) as u8
}

fn widths(key: &BitString, block: &BitString) -> Result<(u16, u8)> {
    if key.width() != 10 || block.width() != 8 {
        return input_err(format!(
            "S-DES needs a 10-bit key and 8-bit block, got {} and {}",
            key.width(),
            block.width()
        ));
    }
    Ok((key.to_u64()? as u16, block.to_u64()? as u8))
}

pub fn sdes_encrypt(key: &BitString, plain: &BitString) -> Result<BitString> {
    let (k, p) = widths(key, plain)?;
    BitString::from_u64(encrypt_u8(k, p) as u64, 8)
}

pub fn sdes_decrypt(key: &BitString, cipher: &BitString) -> Result<BitString> {
    let (k, c) = widths(key, cipher)?;
    BitString::from_u64(decrypt_u8(k, c) as u64, 8)
}
