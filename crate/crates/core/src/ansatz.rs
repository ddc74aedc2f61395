//! Hardware-efficient ansatz for the key register.
//!
//! Layer ℓ applies (Hadamards on every qubit when ℓ = 0), a `U(θ, φ, λ)` slot per qubit,
//! the CNOT ladder `CNOT(i → i+1), CNOT(n-1 → i)` for `i = 0..n-1`, and a few extra
//! CNOTs with endpoints drawn from a stream seeded by `cnot_seed`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::qsim::{Gate, Statevector};
use crate::rng::circuit_rng;

pub const DEFAULT_CNOT_SEED: u64 = 1234;

pub type ParamVector = Vec<f64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub n_qubits: usize,
    #[serde(default = "default_layers")]
    pub n_layers: usize,
    #[serde(default = "default_cnot_seed")]
    pub cnot_seed: u64,
    #[serde(default = "default_true")]
    pub lambda_zero: bool,
    #[serde(default = "default_extra_cnots")]
    pub extra_cnots_per_layer: usize,
}

fn default_layers() -> usize {
    3
}
fn default_cnot_seed() -> u64 {
    DEFAULT_CNOT_SEED
}
fn default_true() -> bool {
    true
}
fn default_extra_cnots() -> usize {
    4
}

impl AnsatzConfig {
    /// Three layers, λ = 0, four extra CNOTs per layer.
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            n_layers: default_layers(),
            cnot_seed: DEFAULT_CNOT_SEED,
            lambda_zero: true,
            extra_cnots_per_layer: default_extra_cnots(),
        }
    }

    pub fn with_layers(mut self, n_layers: usize) -> Self {
        self.n_layers = n_layers;
        self
    }

    pub fn angles_per_slot(&self) -> usize {
        if self.lambda_zero {
            2
        } else {
            3
        }
    }

    pub fn param_count(&self) -> usize {
        self.n_qubits * self.n_layers * self.angles_per_slot()
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=crate::qsim::MAX_QUBITS).contains(&self.n_qubits) {
            return config_err(format!("ansatz qubit count {} out of range", self.n_qubits));
        }
        if self.n_layers == 0 {
            return config_err("ansatz needs at least one layer");
        }
        Ok(())
    }
}

pub fn param_count(config: &AnsatzConfig) -> usize {
    config.param_count()
}

/// One template entry; `USlot::offset` is the index of θ in the parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TemplateGate {
    Fixed(Gate),
    USlot { qubit: usize, offset: usize },
}

pub fn build_template(config: &AnsatzConfig) -> Result<Vec<TemplateGate>> {
    config.validate()?;
    let n = config.n_qubits;
    let mut rng = circuit_rng(config.cnot_seed);
    let mut gates = Vec::new();
    let mut offset = 0;
    for layer in 0..config.n_layers {
        if layer == 0 {
            gates.extend((0..n).map(|q| TemplateGate::Fixed(Gate::H(q))));
        }
        for qubit in 0..n {
            gates.push(TemplateGate::USlot { qubit, offset });
            offset += config.angles_per_slot();
        }
        for i in 0..n.saturating_sub(1) {
            gates.push(TemplateGate::Fixed(Gate::Cnot { control: i, target: i + 1 }));
            if n - 1 != i {
                gates.push(TemplateGate::Fixed(Gate::Cnot { control: n - 1, target: i }));
            }
        }
        if n >= 2 {
            for _ in 0..config.extra_cnots_per_layer {
                let control = rng.gen_range(0..n);
                let mut target = rng.gen_range(0..n - 1);
                if target >= control {
                    target += 1;
                }
                gates.push(TemplateGate::Fixed(Gate::Cnot { control, target }));
            }
        }
    }
    Ok(gates)
}

/// A built template ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Ansatz {
    config: AnsatzConfig,
    template: Vec<TemplateGate>,
}

impl Ansatz {
    pub fn new(config: AnsatzConfig) -> Result<Self> {
        let template = build_template(&config)?;
        Ok(Self { config, template })
    }

    pub fn config(&self) -> &AnsatzConfig {
        &self.config
    }

    pub fn template(&self) -> &[TemplateGate] {
        &self.template
    }

    pub fn param_count(&self) -> usize {
        self.config.param_count()
    }

    /// Runs the template on `|0…0⟩`; slots are filled layer-major, qubit-minor, θ before φ.
    pub fn evaluate(&self, params: &[f64]) -> Result<Statevector> {
        if params.len() != self.param_count() {
            return config_err(format!("expected {} parameters, got {}", self.param_count(), params.len()));
        }
        let mut state = Statevector::new(self.config.n_qubits)?;
        self.apply_to(&mut state, params)?;
        Ok(state)
    }

    /// Applies the template to qubits `0..n_qubits` of an existing, possibly wider, register.
    pub fn apply_to(&self, state: &mut Statevector, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return config_err(format!("expected {} parameters, got {}", self.param_count(), params.len()));
        }
        for g in &self.template {
            let gate = match *g {
                TemplateGate::Fixed(gate) => gate,
                TemplateGate::USlot { qubit, offset } => Gate::U {
                    qubit,
                    theta: params[offset],
                    phi: params[offset + 1],
                    lambda: if self.config.lambda_zero { 0.0 } else { params[offset + 2] },
                },
            };
            state.apply_gate(&gate)?;
        }
        Ok(())
    }
}

pub fn evaluate(config: &AnsatzConfig, params: &[f64]) -> Result<Statevector> {
    Ansatz::new(config.clone())?.evaluate(params)
}
