//! Reference implementations shared by the cipher and acceptance suites, written from the
//! algorithm descriptions and independent of the library code.
#![allow(dead_code)]

use num_bigint::BigUint;

// ---- S-AES from its algebraic description ----

pub fn gf_mul_ref(a: u8, b: u8) -> u8 {
    // carry-less product, then reduce by x^4 + x + 1
    let mut p: u16 = 0;
    for i in 0..4 {
        if (b >> i) & 1 == 1 {
            p ^= (a as u16) << i;
        }
    }
    for deg in (4..8).rev() {
        if (p >> deg) & 1 == 1 {
            p ^= 0b10011 << (deg - 4);
        }
    }
    p as u8
}

pub fn gf_inv(a: u8) -> u8 {
    (0..16).find(|&b| gf_mul_ref(a, b) == 1).unwrap_or(0)
}

/// Nibble S-box: inverse in GF(2^4), then the affine map with constant 1001.
pub fn ref_sbox_nibble(x: u8) -> u8 {
    let y = gf_inv(x);
    let bit = |v: u8, i: usize| (v >> (3 - i)) & 1; // i = 0 is the leading bit
    let m = [[1, 0, 1, 1], [1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 1, 1]];
    let mut out = 0u8;
    for (r, row) in m.iter().enumerate() {
        let v = row.iter().enumerate().fold(0, |a, (c, m)| a ^ (m & bit(y, c)));
        out |= v << (3 - r);
    }
    out ^ 0b1001
}

pub fn nibbles(v: u16) -> [u8; 4] {
    [(v >> 12) as u8 & 0xf, (v >> 8) as u8 & 0xf, (v >> 4) as u8 & 0xf, v as u8 & 0xf]
}

pub fn join(n: [u8; 4]) -> u16 {
    n.iter().fold(0, |a, &x| (a << 4) | x as u16)
}

pub fn ref_saes(key: u16, plain: u16) -> u16 {
    let sub8 = |b: u8| (ref_sbox_nibble(b >> 4) << 4) | ref_sbox_nibble(b & 0xf);
    let rcon = |i: u32| gf_pow_x(i + 2) << 4;
    let mut w = vec![(key >> 8) as u8, key as u8];
    for i in 1..=2u32 {
        let w1 = w[w.len() - 1];
        let w0 = w[w.len() - 2];
        let n = w0 ^ rcon(i) ^ sub8(w1.rotate_left(4));
        w.push(n);
        w.push(n ^ w1);
    }
    let rk = |r: usize| ((w[2 * r] as u16) << 8) | w[2 * r + 1] as u16;
    // state as a 2x2 matrix [[s00, s01], [s10, s11]] filled column-wise
    let to_m = |v: u16| {
        let n = nibbles(v);
        [[n[0], n[2]], [n[1], n[3]]]
    };
    let from_m = |m: [[u8; 2]; 2]| join([m[0][0], m[1][0], m[0][1], m[1][1]]);
    let sub = |m: [[u8; 2]; 2]| m.map(|row| row.map(ref_sbox_nibble));
    let shift = |m: [[u8; 2]; 2]| [m[0], [m[1][1], m[1][0]]];
    let mix = |m: [[u8; 2]; 2]| {
        let mut o = [[0u8; 2]; 2];
        for c in 0..2 {
            o[0][c] = m[0][c] ^ gf_mul_ref(4, m[1][c]);
            o[1][c] = gf_mul_ref(4, m[0][c]) ^ m[1][c];
        }
        o
    };
    let mut s = plain ^ rk(0);
    s = from_m(mix(shift(sub(to_m(s))))) ^ rk(1);
    from_m(shift(sub(to_m(s)))) ^ rk(2)
}

pub fn gf_pow_x(e: u32) -> u8 {
    (0..e).fold(1u8, |acc, _| gf_mul_ref(acc, 2))
}

// ---- Blowfish from π ----

/// atan(1/x) scaled by 2^bits, from the alternating power series.
pub fn atan_inv(x: u32, bits: u64) -> BigUint {
    let one = BigUint::from(1u8) << bits;
    let x2 = BigUint::from(x * x);
    let mut power = &one / x; // 1/x^(2k+1)
    let (mut pos, mut neg) = (BigUint::default(), BigUint::default());
    let mut k = 0u32;
    while power > BigUint::default() {
        let term = &power / (2 * k + 1);
        if k.is_multiple_of(2) {
            pos += term;
        } else {
            neg += term;
        }
        power /= &x2;
        k += 1;
    }
    pos - neg
}

/// The first `18 + 4·256` 32-bit words of π's fractional part.
pub fn pi_words() -> Vec<u32> {
    let words = 18 + 4 * 256;
    let bits = 32 * words as u64 + 64;
    // Machin: π = 16 atan(1/5) − 4 atan(1/239)
    let pi = atan_inv(5, bits) * 16u32 - atan_inv(239, bits) * 4u32;
    let frac = pi - (BigUint::from(3u8) << bits);
    let digits = frac >> 64u32;
    let mask = BigUint::from(u32::MAX);
    (0..words)
        .map(|i| {
            let shifted = &digits >> (32 * (words - 1 - i) as u64);
            (shifted & &mask).iter_u32_digits().next().unwrap_or(0)
        })
        .collect()
}

/// Straight-line Blowfish over one flat table `P ‖ S0 ‖ S1 ‖ S2 ‖ S3`.
pub struct RefBlowfish(Vec<u32>);

impl RefBlowfish {
    pub fn new(pi: &[u32], key: &[u8]) -> Self {
        let mut t = pi.to_vec();
        let mut j = 0;
        for p in t.iter_mut().take(18) {
            let mut w = 0u32;
            for _ in 0..4 {
                w = (w << 8) | key[j % key.len()] as u32;
                j += 1;
            }
            *p ^= w;
        }
        let (mut l, mut r) = (0u32, 0u32);
        for i in (0..t.len()).step_by(2) {
            let mut bf = RefBlowfish(t);
            (l, r) = bf.encrypt(l, r);
            t = std::mem::take(&mut bf.0);
            t[i] = l;
            t[i + 1] = r;
        }
        RefBlowfish(t)
    }

    fn f(&self, x: u32) -> u32 {
        let s = |b: usize, byte: u32| self.0[18 + 256 * b + byte as usize];
        let [a, b, c, d] = x.to_be_bytes().map(u32::from);
        (s(0, a).wrapping_add(s(1, b)) ^ s(2, c)).wrapping_add(s(3, d))
    }

    pub fn encrypt(&mut self, mut l: u32, mut r: u32) -> (u32, u32) {
        for i in 0..16 {
            l ^= self.0[i];
            r ^= self.f(l);
            std::mem::swap(&mut l, &mut r);
        }
        std::mem::swap(&mut l, &mut r);
        (l ^ self.0[17], r ^ self.0[16])
    }
}
