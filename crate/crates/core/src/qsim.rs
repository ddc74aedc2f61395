//! Dense statevector simulation for the key register.
//!
//! Amplitudes are indexed by the computational basis integer with qubit 0 as the least
//! significant bit. Gates are applied in place with stride loops.

use num_complex::Complex64;
use rand::Rng;

use crate::bits::BitString;
use crate::error::{config_err, Result};

pub const MAX_QUBITS: usize = 16;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    U { qubit: usize, theta: f64, phi: f64, lambda: f64 },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::U { qubit: q, .. } => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }
}

/// `U(θ, φ, λ) = [[cos θ/2, -e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`.
pub fn u_matrix(theta: f64, phi: f64, lambda: f64) -> Matrix2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), -Complex64::from_polar(s, lambda)],
        [Complex64::from_polar(s, phi), Complex64::from_polar(c, phi + lambda)],
    ]
}

pub fn hadamard_matrix() -> Matrix2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return config_err(format!("qubit count {n_qubits} outside 1..={MAX_QUBITS}"));
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return config_err(format!("amplitude count {len} is not a power of two >= 2"));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return config_err(format!("qubit count {n_qubits} exceeds {MAX_QUBITS}"));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return config_err(format!("state is not normalized (norm² = {norm})"));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    /// Tensor product of single-qubit states, `singles[q]` on qubit q.
    pub fn product(singles: &[[Complex64; 2]]) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&singles.len()) {
            return config_err(format!("qubit count {} outside 1..={MAX_QUBITS}", singles.len()));
        }
        let amplitudes = (0..1usize << singles.len())
            .map(|k| singles.iter().enumerate().fold(ONE, |acc, (q, s)| acc * s[(k >> q) & 1]))
            .collect();
        Self::from_amplitudes(amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return config_err(format!("qubit {q} out of range for {} qubits", self.n_qubits));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        match *gate {
            Gate::H(q) => self.apply_single(q, &hadamard_matrix()),
            Gate::U { qubit, theta, phi, lambda } => self.apply_single(qubit, &u_matrix(theta, phi, lambda)),
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
        }
    }

    pub fn apply_single(&mut self, q: usize, m: &Matrix2) -> Result<()> {
        self.check_qubit(q)?;
        let stride = 1usize << q;
        for base in (0..self.amplitudes.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i + stride];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Ok(())
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return config_err(format!("CNOT control and target are both qubit {control}"));
        }
        let (cbit, tbit) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amplitudes.swap(i, i | tbit);
            }
        }
        Ok(())
    }

    /// `|amplitude_k|²` for every basis index k.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws a basis index with probability `|c_k|²` and returns it as an
    /// `n_qubits`-wide string (most significant bit first, i.e. qubit n-1 leads).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let k = self.sample_index(rng);
        BitString::from_u64(k as u64, self.n_qubits).expect("index fits register width")
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (k, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = k;
            }
            acc += p;
            if r < acc {
                return k;
            }
        }
        // rounding left the cumulative sum just below r
        last_nonzero
    }

    /// Partial trace over every qubit except `qubit`.
    pub fn reduced_density_matrix(&self, qubit: usize) -> Result<DensityMatrix1Q> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, ZERO);
        for i in (0..self.amplitudes.len()).filter(|i| i & bit == 0) {
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | bit];
            r00 += a0.norm_sqr();
            r11 += a1.norm_sqr();
            r01 += a0 * a1.conj();
        }
        Ok(DensityMatrix1Q { m: [[Complex64::new(r00, 0.0), r01], [r01.conj(), Complex64::new(r11, 0.0)]] })
    }
}

/// Single-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix1Q {
    pub m: Matrix2,
}

impl DensityMatrix1Q {
    pub fn pure(state: &[Complex64; 2]) -> Self {
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = state[i] * state[j].conj();
            }
        }
        Self { m }
    }

    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]).re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let diag = self.m[0][0].im.abs().max(self.m[1][1].im.abs());
        diag.max((self.m[0][1] - self.m[1][0].conj()).norm())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let half_gap = (((a - d) / 2.0).powi(2) + self.m[0][1].norm_sqr()).sqrt();
        let mean = (a + d) / 2.0;
        [mean - half_gap, mean + half_gap]
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        a * a + d * d + 2.0 * self.m[0][1].norm_sqr()
    }

    /// `⟨φ|ρ|φ⟩` for a normalized pure state φ.
    pub fn fidelity(&self, phi: &[Complex64; 2]) -> f64 {
        let mut acc = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += phi[i].conj() * self.m[i][j] * phi[j];
            }
        }
        acc.re
    }

    /// `(x, y, z)` with `ρ = (I + x σx + y σy + z σz) / 2`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let r01 = self.m[0][1];
        [2.0 * r01.re, -2.0 * r01.im, self.m[0][0].re - self.m[1][1].re]
    }
}
