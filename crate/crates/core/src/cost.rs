//! Hamming-distance cost between a candidate output and the known one.

use serde::Serialize;

use crate::ansatz::Ansatz;
use crate::bits::BitString;
use crate::error::{config_err, input_err, Result};
use crate::targets::AttackTarget;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostSample {
    pub key: BitString,
    pub guessed_output: BitString,
    pub distance: usize,
}

pub fn hamming(a: &BitString, b: &BitString) -> Result<usize> {
    if a.width() != b.width() {
        return input_err(format!("hamming distance of {}-bit and {}-bit strings", a.width(), b.width()));
    }
    Ok(a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count())
}

pub fn cost_sample(target: &AttackTarget, key: &BitString) -> Result<CostSample> {
    let guessed_output = target.evaluate(key)?;
    let distance = hamming(&guessed_output, target.known_output())?;
    Ok(CostSample { key: key.clone(), guessed_output, distance })
}

pub fn key_cost(target: &AttackTarget, key: &BitString) -> Result<usize> {
    Ok(cost_sample(target, key)?.distance)
}

/// `Σ_k |c_k(β)|² · key_cost(k)` for computational-basis sampling of the ansatz state.
pub fn expected_cost(target: &AttackTarget, ansatz: &Ansatz, params: &[f64]) -> Result<f64> {
    let n = ansatz.config().n_qubits;
    if n != target.key_width() {
        return config_err(format!("{n}-qubit register cannot sample {}-bit keys", target.key_width()));
    }
    let probs = ansatz.evaluate(params)?.probabilities();
    let mut total = 0.0;
    for (k, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            total += p * key_cost(target, &BitString::from_u64(k as u64, n)?)? as f64;
        }
    }
    Ok(total)
}
