//! Python module `vqaa_py`: the simulator, cipher targets and attack drivers.
//!
//! Configs are the same JSON documents the command-line tool reads. Summaries and results
//! come back as plain Python objects.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use vqaa::attack::{self, equivalence_sweep as sweep};
use vqaa::bench::{self, AttackSpec, ExperimentSpec};
use vqaa::qsim::{Gate, Statevector};
use vqaa::rng::trial_rng;
use vqaa::targets::make_cipher_target;
use vqaa::{AnsatzConfig, BitString, Cipher, VqaaError};

create_exception!(vqaa_py, VqaaException, PyException, "Raised for invalid configurations and inputs.");

fn err(e: VqaaError) -> PyErr {
    VqaaException::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| err(e.into()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Dense n-qubit state, qubit 0 the least significant index bit.
#[pyclass(name = "Statevector", module = "vqaa_py")]
struct PyStatevector(Statevector);

#[pymethods]
impl PyStatevector {
    #[new]
    fn new(n_qubits: usize) -> PyResult<Self> {
        Statevector::new(n_qubits).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    fn h(&mut self, qubit: usize) -> PyResult<()> {
        self.0.apply_gate(&Gate::H(qubit)).map_err(err)
    }

    #[pyo3(signature = (qubit, theta, phi, lam))]
    fn u(&mut self, qubit: usize, theta: f64, phi: f64, lam: f64) -> PyResult<()> {
        self.0.apply_gate(&Gate::U { qubit, theta, phi, lambda: lam }).map_err(err)
    }

    fn cnot(&mut self, control: usize, target: usize) -> PyResult<()> {
        self.0.apply_gate(&Gate::Cnot { control, target }).map_err(err)
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn probabilities(&self) -> Vec<f64> {
        self.0.probabilities()
    }

    /// Basis-state indices drawn from the Born distribution.
    #[pyo3(signature = (shots, seed=0))]
    fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut rng = trial_rng(seed, 0);
        (0..shots).map(|_| self.0.sample_index(&mut rng)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.amplitudes().len()
    }

    fn __repr__(&self) -> String {
        format!("Statevector(n_qubits={})", self.0.n_qubits())
    }
}

/// Layered circuit template: `U(θ, φ, λ)` slots joined by CNOT ladders.
#[pyclass(name = "Ansatz", module = "vqaa_py")]
struct PyAnsatz(vqaa::Ansatz);

#[pymethods]
impl PyAnsatz {
    #[new]
    #[pyo3(signature = (n_qubits, n_layers=3, cnot_seed=1234, extra_cnots_per_layer=4))]
    fn new(n_qubits: usize, n_layers: usize, cnot_seed: u64, extra_cnots_per_layer: usize) -> PyResult<Self> {
        let mut config = AnsatzConfig::new(n_qubits).with_layers(n_layers);
        config.cnot_seed = cnot_seed;
        config.extra_cnots_per_layer = extra_cnots_per_layer;
        vqaa::Ansatz::new(config).map(Self).map_err(err)
    }

    #[getter]
    fn param_count(&self) -> usize {
        self.0.param_count()
    }

    fn evaluate(&self, params: Vec<f64>) -> PyResult<PyStatevector> {
        self.0.evaluate(&params).map(PyStatevector).map_err(err)
    }
}

fn parse_cipher(name: &str) -> PyResult<Cipher> {
    name.parse().map_err(err)
}

fn block(
    cipher: &str,
    key_hex: &str,
    data_hex: &str,
    key_bits: Option<usize>,
) -> PyResult<(Cipher, BitString, BitString)> {
    let c = parse_cipher(cipher)?;
    let key = BitString::from_hex(key_hex, key_bits.unwrap_or(c.default_key_width())).map_err(err)?;
    let data = BitString::from_hex(data_hex, c.block_width()).map_err(err)?;
    Ok((c, key, data))
}

/// Encrypts one block; keys and blocks are hex strings.
#[pyfunction]
#[pyo3(signature = (cipher, key_hex, plain_hex, key_bits=None))]
fn encrypt(cipher: &str, key_hex: &str, plain_hex: &str, key_bits: Option<usize>) -> PyResult<String> {
    let (c, key, plain) = block(cipher, key_hex, plain_hex, key_bits)?;
    c.encrypt(&key, &plain).map(|b| b.to_hex()).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cipher, key_hex, cipher_hex, key_bits=None))]
fn decrypt(cipher: &str, key_hex: &str, cipher_hex: &str, key_bits: Option<usize>) -> PyResult<String> {
    let (c, key, ct) = block(cipher, key_hex, cipher_hex, key_bits)?;
    c.decrypt(&key, &ct).map(|b| b.to_hex()).map_err(err)
}

/// Runs one attack described by a JSON config and returns the result as a dict.
#[pyfunction]
#[pyo3(signature = (config_json, seed=None))]
fn run_attack<'py>(py: Python<'py>, config_json: &str, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let mut spec = AttackSpec::from_json(config_json).map_err(err)?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    let (_, config) = spec.build().map_err(err)?;
    if spec.shard_prefix_bits > 0 {
        let result = py.detach(|| attack::run_hybrid_attack(&config, spec.shard_prefix_bits)).map_err(err)?;
        return json_to_py(py, &result);
    }
    let result = py.detach(|| attack::run_attack(&config)).map_err(err)?;
    json_to_py(py, &result)
}

/// Runs a repeated-trial experiment; returns `(summary, trial_records)`.
#[pyfunction]
#[pyo3(signature = (spec_json, trials=None, seed=None))]
fn run_experiment<'py>(
    py: Python<'py>,
    spec_json: &str,
    trials: Option<usize>,
    seed: Option<u64>,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let mut spec = ExperimentSpec::from_json(spec_json).map_err(err)?;
    if let Some(t) = trials {
        spec.trials = t;
    }
    if let Some(s) = seed {
        spec.seed = s;
    }
    let out = py.detach(|| bench::run_experiment(&spec)).map_err(err)?;
    Ok((json_to_py(py, &out.summary)?, json_to_py(py, &out.records)?))
}

/// Random-order exhaustive search; returns `(key_hex or None, trials)`.
#[pyfunction]
#[pyo3(signature = (cipher, key_hex, plain_hex, key_bits=None, seed=0))]
fn brute_force(
    cipher: &str,
    key_hex: &str,
    plain_hex: &str,
    key_bits: Option<usize>,
    seed: u64,
) -> PyResult<(Option<String>, u64)> {
    let c = parse_cipher(cipher)?;
    let key = BitString::from_hex(key_hex, key_bits.unwrap_or(c.default_key_width())).map_err(err)?;
    let plain = BitString::from_hex(plain_hex, 4 * plain_hex.len()).map_err(err)?;
    let target = make_cipher_target(c, &key, &plain).map_err(err)?;
    let r = attack::brute_force(&target, &mut trial_rng(seed, 0)).map_err(err)?;
    Ok((r.key.map(|k| k.to_hex()), r.trials))
}

/// Largest total-variation distance between the joint-register and sample-then-encrypt
/// ciphertext distributions over `draws` random toy ciphers and parameter sets.
#[pyfunction]
#[pyo3(signature = (qubits, draws=100, seed=0))]
fn equivalence_sweep(qubits: usize, draws: usize, seed: u64) -> PyResult<f64> {
    sweep(qubits, draws, seed).map(|r| r.max_tvd).map_err(err)
}

#[pymodule]
fn vqaa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VqaaException", m.py().get_type::<VqaaException>())?;
    m.add_class::<PyStatevector>()?;
    m.add_class::<PyAnsatz>()?;
    m.add_function(wrap_pyfunction!(encrypt, m)?)?;
    m.add_function(wrap_pyfunction!(decrypt, m)?)?;
    m.add_function(wrap_pyfunction!(run_attack, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_sweep, m)?)?;
    Ok(())
}
