//! Classical functions under attack, all reached through [`AttackTarget`].

pub mod blowfish_tables;

pub mod blowfish;
pub mod hash;
pub mod saes;
pub mod sdes;
pub mod vectors;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{config_err, input_err, Result, VqaaError};

pub use blowfish::{blowfish_decrypt, blowfish_encrypt};
pub use hash::toy_hash;
pub use saes::{saes_decrypt, saes_encrypt};
pub use sdes::{sdes_decrypt, sdes_encrypt};

/// A deterministic keyed map, the classical half of the attack loop.
pub trait KeyedFunction: Send + Sync {
    fn key_width(&self) -> usize;
    fn output_width(&self) -> usize;
    fn evaluate(&self, key: &BitString) -> Result<BitString>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cipher {
    Sdes,
    Saes,
    Blowfish,
}

impl Cipher {
    pub fn block_width(self) -> usize {
        match self {
            Cipher::Sdes => 8,
            Cipher::Saes => 16,
            Cipher::Blowfish => 64,
        }
    }

    /// Native key width; Blowfish accepts any multiple of 8 in 32..=448 and reports 32 here.
    pub fn default_key_width(self) -> usize {
        match self {
            Cipher::Sdes => 10,
            Cipher::Saes => 16,
            Cipher::Blowfish => 32,
        }
    }

    pub fn check_key_width(self, width: usize) -> Result<()> {
        let ok = match self {
            Cipher::Sdes => width == 10,
            Cipher::Saes => width == 16,
            Cipher::Blowfish => width.is_multiple_of(8) && (32..=448).contains(&width),
        };
        if !ok {
            return config_err(format!("{width}-bit key is not valid for {self}"));
        }
        Ok(())
    }

    pub fn encrypt(self, key: &BitString, block: &BitString) -> Result<BitString> {
        match self {
            Cipher::Sdes => sdes_encrypt(key, block),
            Cipher::Saes => saes_encrypt(key, block),
            Cipher::Blowfish => blowfish_encrypt(key, block),
        }
    }

    pub fn decrypt(self, key: &BitString, block: &BitString) -> Result<BitString> {
        match self {
            Cipher::Sdes => sdes_decrypt(key, block),
            Cipher::Saes => saes_decrypt(key, block),
            Cipher::Blowfish => blowfish_decrypt(key, block),
        }
    }

    /// ECB over a plaintext holding one or more whole blocks.
    pub fn encrypt_ecb(self, key: &BitString, plain: &BitString) -> Result<BitString> {
        let bw = self.block_width();
        if !plain.width().is_multiple_of(bw) {
            return input_err(format!("{}-bit plaintext is not whole {bw}-bit blocks", plain.width()));
        }
        let mut out: Vec<bool> = Vec::with_capacity(plain.width());
        for start in (0..plain.width()).step_by(bw) {
            out.extend_from_slice(self.encrypt(key, &plain.slice(start, start + bw)?)?.bits());
        }
        BitString::new(out)
    }
}

impl fmt::Display for Cipher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cipher::Sdes => "sdes",
            Cipher::Saes => "saes",
            Cipher::Blowfish => "blowfish",
        })
    }
}

impl FromStr for Cipher {
    type Err = VqaaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "sdes" => Ok(Cipher::Sdes),
            "saes" => Ok(Cipher::Saes),
            "blowfish" => Ok(Cipher::Blowfish),
            _ => config_err(format!("unknown cipher {s:?}")),
        }
    }
}

struct CipherFunction {
    cipher: Cipher,
    key_width: usize,
    plaintext: BitString,
}

impl KeyedFunction for CipherFunction {
    fn key_width(&self) -> usize {
        self.key_width
    }

    fn output_width(&self) -> usize {
        self.plaintext.width()
    }

    fn evaluate(&self, key: &BitString) -> Result<BitString> {
        self.cipher.encrypt_ecb(key, &self.plaintext)
    }
}

struct HashCollisionFunction {
    document: BitString,
    segment_start: usize,
    digest_bits: usize,
}

impl KeyedFunction for HashCollisionFunction {
    fn key_width(&self) -> usize {
        self.document.width() - self.segment_start
    }

    fn output_width(&self) -> usize {
        self.digest_bits
    }

    fn evaluate(&self, key: &BitString) -> Result<BitString> {
        toy_hash(&self.document.splice(self.segment_start, key)?, self.digest_bits)
    }
}

struct PrefixedFunction {
    inner: Arc<dyn KeyedFunction>,
    prefix: BitString,
}

impl KeyedFunction for PrefixedFunction {
    fn key_width(&self) -> usize {
        self.inner.key_width() - self.prefix.width()
    }

    fn output_width(&self) -> usize {
        self.inner.output_width()
    }

    fn evaluate(&self, key: &BitString) -> Result<BitString> {
        self.inner.evaluate(&self.prefix.concat(key))
    }
}

/// Known-output search problem: find a key whose evaluation reproduces `known_output`.
#[derive(Clone)]
pub struct AttackTarget {
    name: String,
    function: Arc<dyn KeyedFunction>,
    known_output: BitString,
    public_input: BitString,
    excluded_key: Option<BitString>,
}

impl fmt::Debug for AttackTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AttackTarget")
            .field("name", &self.name)
            .field("key_width", &self.key_width())
            .field("known_output", &self.known_output)
            .field("public_input", &self.public_input)
            .field("excluded_key", &self.excluded_key)
            .finish()
    }
}

impl AttackTarget {
    /// Target for an arbitrary keyed function; `known_output` is its value at `secret_key`.
    pub fn from_function(
        name: impl Into<String>,
        function: Arc<dyn KeyedFunction>,
        secret_key: &BitString,
        public_input: BitString,
    ) -> Result<Self> {
        if secret_key.width() != function.key_width() {
            return config_err(format!(
                "secret key has {} bits, function expects {}",
                secret_key.width(),
                function.key_width()
            ));
        }
        let known_output = function.evaluate(secret_key)?;
        Ok(Self { name: name.into(), function, known_output, public_input, excluded_key: None })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn key_width(&self) -> usize {
        self.function.key_width()
    }

    pub fn output_width(&self) -> usize {
        self.function.output_width()
    }

    pub fn known_output(&self) -> &BitString {
        &self.known_output
    }

    pub fn public_input(&self) -> &BitString {
        &self.public_input
    }

    pub fn excluded_key(&self) -> Option<&BitString> {
        self.excluded_key.as_ref()
    }

    pub fn evaluate(&self, key: &BitString) -> Result<BitString> {
        if key.width() != self.key_width() {
            return input_err(format!("key has {} bits, target expects {}", key.width(), self.key_width()));
        }
        self.function.evaluate(key)
    }

    /// True when `key` reproduces the known output and is not the excluded original.
    pub fn is_solution(&self, key: &BitString) -> Result<bool> {
        if self.excluded_key.as_ref() == Some(key) {
            return Ok(false);
        }
        Ok(self.evaluate(key)? == self.known_output)
    }

    /// The same problem with the leading key bits pinned to `prefix`.
    pub fn with_fixed_prefix(&self, prefix: &BitString) -> Result<AttackTarget> {
        if prefix.width() >= self.key_width() {
            return config_err(format!(
                "prefix of {} bits leaves nothing to search in a {}-bit key",
                prefix.width(),
                self.key_width()
            ));
        }
        let p = prefix.width();
        let excluded_key = match &self.excluded_key {
            Some(k) if k.slice(0, p)? == *prefix => Some(k.slice(p, k.width())?),
            _ => None,
        };
        Ok(AttackTarget {
            name: format!("{}[prefix={}]", self.name, prefix.to_bin()),
            function: Arc::new(PrefixedFunction { inner: self.function.clone(), prefix: prefix.clone() }),
            known_output: self.known_output.clone(),
            public_input: self.public_input.clone(),
            excluded_key,
        })
    }
}

/// `evaluate(k) = encrypt(plaintext, k)` in ECB over the plaintext's blocks.
pub fn make_cipher_target(cipher: Cipher, secret_key: &BitString, plaintext: &BitString) -> Result<AttackTarget> {
    cipher.check_key_width(secret_key.width())?;
    if !plaintext.width().is_multiple_of(cipher.block_width()) {
        return config_err(format!(
            "{}-bit plaintext is not whole {}-bit {cipher} blocks",
            plaintext.width(),
            cipher.block_width()
        ));
    }
    let function = CipherFunction { cipher, key_width: secret_key.width(), plaintext: plaintext.clone() };
    AttackTarget::from_function(cipher.to_string(), Arc::new(function), secret_key, plaintext.clone())
}

/// Collision search on the trailing `segment_width` bits of `document`.
///
/// The original segment value reproduces the digest trivially and is excluded as an answer.
pub fn make_hash_collision_target(document: &BitString, segment_width: usize, t: usize) -> Result<AttackTarget> {
    if !document.width().is_multiple_of(8) {
        return config_err(format!("document width {} is not whole bytes", document.width()));
    }
    if segment_width == 0 || segment_width > document.width() {
        return config_err(format!("mutable segment of {segment_width} bits does not fit the document"));
    }
    hash::toy_hash_bytes(&[], t).map_err(|e| VqaaError::Config(e.to_string()))?;
    let segment_start = document.width() - segment_width;
    let original = document.slice(segment_start, document.width())?;
    let function = HashCollisionFunction { document: document.clone(), segment_start, digest_bits: t };
    let mut target =
        AttackTarget::from_function(format!("fnv1a-{t}"), Arc::new(function), &original, document.clone())?;
    target.excluded_key = Some(original);
    Ok(target)
}
