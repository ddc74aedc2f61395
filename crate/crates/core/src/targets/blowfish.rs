//! Blowfish with the standard π-derived initial tables.

use super::blowfish_tables::{P_INIT, S_INIT};
use crate::bits::BitString;
use crate::error::{input_err, Result};

pub const MIN_KEY_BITS: usize = 32;
pub const MAX_KEY_BITS: usize = 448;

/// Block encryptions performed by one key schedule: (18 + 4·256) subkey words, two per block.
pub const KEY_SETUP_ENCRYPTIONS: usize = (18 + 4 * 256) / 2;

#[derive(Clone)]
pub struct Blowfish {
    p: [u32; 18],
    s: [[u32; 256]; 4],
}

impl Blowfish {
    pub fn new(key: &[u8]) -> Result<Self> {
        Ok(Self::with_key_counted(key)?.0)
    }

    /// Runs the key schedule and also reports how many block encryptions it used.
    pub fn with_key_counted(key: &[u8]) -> Result<(Self, usize)> {
        let bits = key.len() * 8;
        if !(MIN_KEY_BITS..=MAX_KEY_BITS).contains(&bits) {
            return input_err(format!("Blowfish key of {bits} bits outside {MIN_KEY_BITS}..={MAX_KEY_BITS}"));
        }
        let mut bf = Blowfish { p: P_INIT, s: S_INIT };
        let mut pos = 0;
        for p in bf.p.iter_mut() {
            let mut word = 0u32;
            for _ in 0..4 {
                word = (word << 8) | key[pos] as u32;
                pos = (pos + 1) % key.len();
            }
            *p ^= word;
        }

        let mut encryptions = 0;
        let (mut l, mut r) = (0u32, 0u32);
        for i in (0..18).step_by(2) {
            (l, r) = bf.encrypt_words(l, r);
            encryptions += 1;
            bf.p[i] = l;
            bf.p[i + 1] = r;
        }
        for b in 0..4 {
            for i in (0..256).step_by(2) {
                (l, r) = bf.encrypt_words(l, r);
                encryptions += 1;
                bf.s[b][i] = l;
                bf.s[b][i + 1] = r;
            }
        }
        Ok((bf, encryptions))
    }

    #[inline]
    fn f(&self, x: u32) -> u32 {
        let [a, b, c, d] = x.to_be_bytes();
        (self.s[0][a as usize].wrapping_add(self.s[1][b as usize]) ^ self.s[2][c as usize])
            .wrapping_add(self.s[3][d as usize])
    }

    pub fn encrypt_words(&self, mut l: u32, mut r: u32) -> (u32, u32) {
        for i in 0..16 {
            l ^= self.p[i];
            r ^= self.f(l);
            std::mem::swap(&mut l, &mut r);
        }
        std::mem::swap(&mut l, &mut r);
        r ^= self.p[16];
        l ^= self.p[17];
        (l, r)
    }

    pub fn decrypt_words(&self, mut l: u32, mut r: u32) -> (u32, u32) {
        for i in (2..18).rev() {
            l ^= self.p[i];
            r ^= self.f(l);
            std::mem::swap(&mut l, &mut r);
        }
        std::mem::swap(&mut l, &mut r);
        r ^= self.p[1];
        l ^= self.p[0];
        (l, r)
    }

    pub fn encrypt_block(&self, block: u64) -> u64 {
        let (l, r) = self.encrypt_words((block >> 32) as u32, block as u32);
        ((l as u64) << 32) | r as u64
    }

    pub fn decrypt_block(&self, block: u64) -> u64 {
        let (l, r) = self.decrypt_words((block >> 32) as u32, block as u32);
        ((l as u64) << 32) | r as u64
    }
}

fn check_block(block: &BitString) -> Result<u64> {
    if block.width() != 64 {
        return input_err(format!("Blowfish block must be 64 bits, got {}", block.width()));
    }
    block.to_u64()
}

fn schedule(key: &BitString) -> Result<Blowfish> {
    if !key.width().is_multiple_of(8) {
        return input_err(format!("Blowfish key width {} is not a multiple of 8", key.width()));
    }
    Blowfish::new(&key.to_bytes()?)
}

pub fn blowfish_encrypt(key: &BitString, block: &BitString) -> Result<BitString> {
    let b = check_block(block)?;
    BitString::from_u64(schedule(key)?.encrypt_block(b), 64)
}

pub fn blowfish_decrypt(key: &BitString, block: &BitString) -> Result<BitString> {
    let b = check_block(block)?;
    BitString::from_u64(schedule(key)?.decrypt_block(b), 64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_rng;
    use rand::Rng;

    #[test]
    fn zero_key_zero_block() {
        let k = BitString::zeros(64).unwrap();
        let b = BitString::zeros(64).unwrap();
        assert_eq!(blowfish_encrypt(&k, &b).unwrap().to_hex(), "4EF997456198DD78");
    }

    #[test]
    fn key_schedule_runs_521_encryptions() {
        let (_, n) = Blowfish::with_key_counted(&[1, 2, 3, 4]).unwrap();
        assert_eq!(n, 521);
        assert_eq!(KEY_SETUP_ENCRYPTIONS, 521);
    }

    #[test]
    fn width_errors() {
        let b = BitString::zeros(64).unwrap();
        assert!(blowfish_encrypt(&BitString::zeros(24).unwrap(), &b).is_err());
        assert!(blowfish_encrypt(&BitString::zeros(456).unwrap(), &b).is_err());
        assert!(blowfish_encrypt(&BitString::zeros(33).unwrap(), &b).is_err());
        assert!(blowfish_encrypt(&BitString::zeros(32).unwrap(), &BitString::zeros(32).unwrap()).is_err());
    }

    #[test]
    fn decrypt_inverts_encrypt() {
        let mut rng = trial_rng(17, 0);
        for i in 0..1000 {
            let key_bytes = if i % 2 == 0 { 4 } else { rng.gen_range(4..=56) };
            let key: Vec<u8> = (0..key_bytes).map(|_| rng.gen()).collect();
            let bf = Blowfish::new(&key).unwrap();
            let block: u64 = rng.gen();
            assert_eq!(bf.decrypt_block(bf.encrypt_block(block)), block);
        }
    }
}
