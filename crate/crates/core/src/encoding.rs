//! Key encodings: one bit per qubit via computational-basis sampling, or several bits per
//! qubit via non-orthogonal anchor states identified from single-qubit density matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{config_err, Result};
use crate::qsim::Statevector;

/// `m` single-qubit pure states, anchor `j` standing for the `log2(m)`-bit value `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    anchors: Vec<[Complex64; 2]>,
    bits_per_qubit: usize,
}

impl AnchorSet {
    pub fn anchors(&self) -> &[[Complex64; 2]] {
        &self.anchors
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn bits_per_qubit(&self) -> usize {
        self.bits_per_qubit
    }

    /// Prepares the product of anchors spelling `key`; the first chunk of
    /// `bits_per_qubit` bits goes to qubit 0.
    pub fn encode(&self, key: &BitString) -> Result<Statevector> {
        if !key.width().is_multiple_of(self.bits_per_qubit) {
            return config_err(format!(
                "{}-bit key is not a whole number of {}-bit symbols",
                key.width(),
                self.bits_per_qubit
            ));
        }
        let singles: Vec<[Complex64; 2]> = key
            .bits()
            .chunks(self.bits_per_qubit)
            .map(|chunk| self.anchors[chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)])
            .collect();
        Statevector::product(&singles)
    }

    /// Index of the anchor with the highest fidelity `⟨φ_j|ρ|φ_j⟩`; fidelities within
    /// `TIE_TOLERANCE` count as ties and go to the lower index.
    pub fn closest(&self, state: &Statevector, qubit: usize) -> Result<(usize, f64)> {
        let rho = state.reduced_density_matrix(qubit)?;
        let mut best = (0, f64::NEG_INFINITY);
        for (j, phi) in self.anchors.iter().enumerate() {
            let f = rho.fidelity(phi);
            if f > best.1 + TIE_TOLERANCE {
                best = (j, f);
            }
        }
        Ok(best)
    }
}

const TIE_TOLERANCE: f64 = 1e-12;

/// Single-qubit state with Bloch polar angle `theta` and azimuth `phi`.
fn bloch_state(theta: f64, phi: f64) -> [Complex64; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)]
}

/// The four tetrahedron states: `|0⟩` and `(|0⟩ + √2 e^{iα}|1⟩)/√3` for α = 2π/3, 4π/3, 0.
pub fn tetrahedron_anchors() -> AnchorSet {
    let a = 1.0 / 3f64.sqrt();
    let b = (2.0f64 / 3.0).sqrt();
    let anchors = [None, Some(2.0 * PI / 3.0), Some(4.0 * PI / 3.0), Some(0.0)]
        .into_iter()
        .map(|alpha| match alpha {
            None => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            Some(alpha) => [Complex64::new(a, 0.0), Complex64::from_polar(b, alpha)],
        })
        .collect();
    AnchorSet { anchors, bits_per_qubit: 2 }
}

/// Anchor sets with 4 (tetrahedron) or 16 (spherical Fibonacci lattice) states.
pub fn sphere_anchors(m: usize) -> Result<AnchorSet> {
    match m {
        4 => Ok(tetrahedron_anchors()),
        16 => {
            let golden_angle = PI * (3.0 - 5f64.sqrt());
            let anchors = (0..m)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / m as f64;
                    let azimuth = (i as f64 * golden_angle).rem_euclid(2.0 * PI);
                    bloch_state(z.acos(), azimuth)
                })
                .collect();
            Ok(AnchorSet { anchors, bits_per_qubit: 4 })
        }
        _ => config_err(format!("unsupported anchor count {m}; expected 4 or 16")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncodingSpec {
    Orthogonal,
    NonOrthogonal { states_per_qubit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EncodingSpec", into = "EncodingSpec")]
pub enum EncodingMode {
    Orthogonal,
    NonOrthogonal(AnchorSet),
}

impl TryFrom<EncodingSpec> for EncodingMode {
    type Error = crate::error::VqaaError;

    fn try_from(spec: EncodingSpec) -> Result<Self> {
        match spec {
            EncodingSpec::Orthogonal => Ok(EncodingMode::Orthogonal),
            EncodingSpec::NonOrthogonal { states_per_qubit } => {
                Ok(EncodingMode::NonOrthogonal(sphere_anchors(states_per_qubit)?))
            }
        }
    }
}

impl From<EncodingMode> for EncodingSpec {
    fn from(mode: EncodingMode) -> Self {
        match mode {
            EncodingMode::Orthogonal => EncodingSpec::Orthogonal,
            EncodingMode::NonOrthogonal(a) => EncodingSpec::NonOrthogonal { states_per_qubit: a.len() },
        }
    }
}

impl EncodingMode {
    pub fn non_orthogonal(states_per_qubit: usize) -> Result<Self> {
        Ok(EncodingMode::NonOrthogonal(sphere_anchors(states_per_qubit)?))
    }

    pub fn bits_per_qubit(&self) -> usize {
        match self {
            EncodingMode::Orthogonal => 1,
            EncodingMode::NonOrthogonal(a) => a.bits_per_qubit(),
        }
    }

    pub fn key_capacity(&self, n_qubits: usize) -> usize {
        n_qubits * self.bits_per_qubit()
    }

    pub fn check_width(&self, n_qubits: usize, key_width: usize) -> Result<()> {
        let capacity = self.key_capacity(n_qubits);
        if capacity != key_width {
            return config_err(format!(
                "{n_qubits} qubits at {} bits each hold {capacity} key bits, target needs {key_width}",
                self.bits_per_qubit()
            ));
        }
        Ok(())
    }

    /// Qubits needed for a key of `key_width` bits.
    pub fn qubits_for(&self, key_width: usize) -> Result<usize> {
        let per = self.bits_per_qubit();
        if key_width == 0 || !key_width.is_multiple_of(per) {
            return config_err(format!("{key_width}-bit key does not split into {per}-bit symbols"));
        }
        Ok(key_width / per)
    }
}

/// Reads a candidate key off the register.
///
/// Orthogonal mode samples the computational basis. Non-orthogonal mode picks, for every
/// qubit, the anchor of maximal fidelity against the exact reduced density matrix and
/// concatenates the anchor indices with qubit 0 first; it never consumes randomness.
pub fn decode_key<R: Rng + ?Sized>(state: &Statevector, mode: &EncodingMode, rng: &mut R) -> Result<BitString> {
    match mode {
        EncodingMode::Orthogonal => Ok(state.sample(rng)),
        EncodingMode::NonOrthogonal(anchors) => {
            let per = anchors.bits_per_qubit();
            let mut bits = Vec::with_capacity(state.n_qubits() * per);
            for q in 0..state.n_qubits() {
                let (j, _) = anchors.closest(state, q)?;
                bits.extend((0..per).rev().map(|i| (j >> i) & 1 == 1));
            }
            BitString::new(bits)
        }
    }
}
