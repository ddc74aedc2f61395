//! The measure-then-encrypt attack loop, prefix-sharded attacks, the brute-force
//! baseline, and a joint-register simulation that checks both circuit layouts sample
//! ciphertexts from the same distribution.

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Ansatz, AnsatzConfig};
use crate::bits::BitString;
use crate::cost::hamming;
use crate::encoding::{decode_key, EncodingMode};
use crate::error::{config_err, Result};
use crate::optimizer::{self, MeasurementCounter, OptimizerConfig};
use crate::qsim::{Gate, Statevector};
use crate::rng::{trial_rng, TrialRng};
use crate::targets::AttackTarget;

/// Largest shard count `run_hybrid_attack` accepts.
pub const MAX_SHARDS: usize = 1 << 12;

#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub target: AttackTarget,
    pub ansatz: AnsatzConfig,
    pub optimizer: OptimizerConfig,
    pub encoding: EncodingMode,
    pub master_seed: u64,
    /// Selects the random stream under `master_seed`.
    pub stream: u64,
    pub max_iterations: u64,
    /// Redraw the parameters when an iteration decodes the same keys as one of the
    /// previous `CYCLE_WINDOW` iterations. With exact decoding the loop is deterministic,
    /// so such a run would otherwise repeat until the budget ran out.
    pub restart_on_cycle: bool,
}

/// Iterations remembered for cycle detection.
pub const CYCLE_WINDOW: usize = 16;

impl AttackConfig {
    pub fn new(
        target: AttackTarget,
        ansatz: AnsatzConfig,
        optimizer: OptimizerConfig,
        encoding: EncodingMode,
        master_seed: u64,
    ) -> Self {
        let max_iterations = optimizer.max_iterations;
        Self { target, ansatz, optimizer, encoding, master_seed, stream: 0, max_iterations, restart_on_cycle: true }
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        self.optimizer.validate()?;
        self.encoding.check_width(self.ansatz.n_qubits, self.target.key_width())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub success: bool,
    pub recovered_key: Option<BitString>,
    /// Completed optimizer iterations.
    pub iterations: u64,
    /// Probe measurements, always `iterations × probes_per_step`.
    pub measurements: u64,
    /// Every classical evaluation, per-iteration base samples included.
    pub cost_evaluations: u64,
    /// Different keys decoded over the whole run.
    pub distinct_keys: u64,
    /// Parameter redraws, from cycle detection or `restart_every`.
    pub restarts: u64,
    pub wall_time: f64,
    /// `(iteration, sampled Hamming distance)` of each iteration's base sample.
    pub cost_trace: Vec<(u64, usize)>,
}

impl AttackResult {
    /// Equality ignoring wall-clock time.
    pub fn same_outcome(&self, other: &AttackResult) -> bool {
        AttackResult { wall_time: 0.0, ..self.clone() } == AttackResult { wall_time: 0.0, ..other.clone() }
    }

    pub fn write_trace_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["iteration", "cost"])?;
        for (it, c) in &self.cost_trace {
            w.write_record([it.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Distance used during the search. The excluded original of a collision target reproduces
/// the digest but is not an answer, so it is scored as maximally wrong.
fn search_distance(target: &AttackTarget, key: &BitString) -> Result<usize> {
    if target.excluded_key() == Some(key) {
        return Ok(target.output_width());
    }
    hamming(&target.evaluate(key)?, target.known_output())
}

struct Sampler<'a> {
    target: &'a AttackTarget,
    ansatz: &'a Ansatz,
    encoding: &'a EncodingMode,
    rng: TrialRng,
    width: f64,
    found: Option<BitString>,
    evaluations: u64,
    last_distance: usize,
    /// Keys decoded during the current iteration.
    seen: Vec<BitString>,
    visited: HashSet<BitString>,
}

impl Sampler<'_> {
    /// One measurement: decode a key from the prepared state and score it.
    fn cost(&mut self, params: &[f64]) -> Result<f64> {
        let state = self.ansatz.evaluate(params)?;
        let key = decode_key(&state, self.encoding, &mut self.rng)?;
        self.evaluations += 1;
        let d = search_distance(self.target, &key)?;
        self.seen.push(key.clone());
        self.visited.insert(key.clone());
        if d == 0 && self.found.is_none() {
            self.found = Some(key);
        }
        self.last_distance = d;
        Ok(d as f64 / self.width)
    }
}

fn random_params<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
}

/// Order-independent fingerprint of the keys decoded in one iteration.
fn signature(keys: &mut [BitString]) -> u64 {
    keys.sort_unstable();
    let mut h = DefaultHasher::new();
    keys.hash(&mut h);
    h.finish()
}

/// Runs the variational loop until a sampled key reproduces the known output or the
/// iteration budget runs out.
///
/// Each iteration samples a base cost, then takes one optimizer step whose probes are all
/// ordinary measurements; any of them may hit the answer. Results depend only on the
/// configuration, including `master_seed` and `stream`.
pub fn run_attack(config: &AttackConfig) -> Result<AttackResult> {
    config.validate()?;
    let start = Instant::now();
    let ansatz = Ansatz::new(config.ansatz.clone())?;
    let target = &config.target;
    let width = target.output_width() as f64;

    let mut rng = trial_rng(config.master_seed, config.stream);
    let mut step_rng = TrialRng::seed_from_u64(rng.gen());
    let mut params = random_params(&mut rng, ansatz.param_count());

    let mut sampler = Sampler {
        target,
        ansatz: &ansatz,
        encoding: &config.encoding,
        rng,
        width,
        found: None,
        evaluations: 0,
        last_distance: 0,
        seen: Vec::new(),
        visited: HashSet::new(),
    };
    let mut counter = MeasurementCounter::default();
    let mut trace = Vec::new();
    let mut recent: VecDeque<u64> = VecDeque::with_capacity(CYCLE_WINDOW);
    let mut restarts = 0;
    let mut walk_start = 0;
    for it in 0..config.max_iterations {
        sampler.seen.clear();
        let base = sampler.cost(&params)?;
        trace.push((it, sampler.last_distance));
        if sampler.found.is_some() {
            break;
        }
        params = optimizer::step(
            &params,
            base,
            &mut |p: &[f64]| sampler.cost(p),
            &config.optimizer,
            &mut counter,
            &mut step_rng,
        )?;
        counter.complete_iteration();
        if sampler.found.is_some() {
            break;
        }
        if config.optimizer.restart_every.is_some_and(|n| it + 1 - walk_start >= n) {
            params = random_params(&mut step_rng, params.len());
            recent.clear();
            restarts += 1;
            walk_start = it + 1;
            continue;
        }
        if config.restart_on_cycle {
            let sig = signature(&mut sampler.seen);
            if recent.contains(&sig) {
                params = random_params(&mut step_rng, params.len());
                recent.clear();
                restarts += 1;
                walk_start = it + 1;
            } else {
                if recent.len() == CYCLE_WINDOW {
                    recent.pop_front();
                }
                recent.push_back(sig);
            }
        }
    }

    let evaluations = sampler.evaluations;
    let distinct_keys = sampler.visited.len() as u64;
    let found = sampler.found;
    let recovered_key = match found {
        Some(k) if target.is_solution(&k)? => Some(k),
        _ => None,
    };
    Ok(AttackResult {
        success: recovered_key.is_some(),
        recovered_key,
        iterations: counter.iterations,
        measurements: counter.total_measurements,
        cost_evaluations: evaluations,
        distinct_keys,
        restarts,
        wall_time: start.elapsed().as_secs_f64(),
        cost_trace: trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShardOutcome {
    pub prefix: BitString,
    pub result: AttackResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridResult {
    pub prefix_width: usize,
    pub shard_count: u64,
    pub success: bool,
    pub recovered_key: Option<BitString>,
    pub mean_shard_iterations: f64,
    pub mean_shard_measurements: f64,
    /// `mean_shard_measurements × shard_count`.
    pub aggregate_measurements: f64,
    pub shards: Vec<ShardOutcome>,
}

/// Measurement total for `2^prefix_width` parallel shards with the given per-shard mean.
pub fn hybrid_aggregate(mean_shard_measurements: f64, prefix_width: usize) -> f64 {
    mean_shard_measurements * (1u64 << prefix_width) as f64
}

/// One attack per value of the leading `prefix_width` key bits, the register covering only
/// the remaining bits. `config.ansatz` must be sized for the suffix.
pub fn run_hybrid_attack(config: &AttackConfig, prefix_width: usize) -> Result<HybridResult> {
    let key_width = config.target.key_width();
    if prefix_width >= key_width {
        return config_err(format!("prefix of {prefix_width} bits leaves nothing of a {key_width}-bit key"));
    }
    let shard_count = 1usize << prefix_width;
    if shard_count > MAX_SHARDS {
        return config_err(format!("{shard_count} shards exceed the limit of {MAX_SHARDS}"));
    }
    config.ansatz.validate()?;
    config.encoding.check_width(config.ansatz.n_qubits, key_width - prefix_width)?;

    let shards: Vec<ShardOutcome> = (0..shard_count)
        .into_par_iter()
        .map(|v| -> Result<ShardOutcome> {
            let prefix = if prefix_width == 0 { None } else { Some(BitString::from_u64(v as u64, prefix_width)?) };
            let target = match &prefix {
                Some(p) => config.target.with_fixed_prefix(p)?,
                None => config.target.clone(),
            };
            let shard = AttackConfig { target, stream: config.stream.wrapping_add(v as u64), ..config.clone() };
            Ok(ShardOutcome { prefix: prefix.unwrap_or(BitString::zeros(1)?), result: run_attack(&shard)? })
        })
        .collect::<Result<_>>()?;

    let recovered_key = shards.iter().find(|s| s.result.success).map(|s| {
        let suffix = s.result.recovered_key.as_ref().expect("success carries a key");
        if prefix_width == 0 {
            suffix.clone()
        } else {
            s.prefix.concat(suffix)
        }
    });
    let n = shards.len() as f64;
    let mean_shard_iterations = shards.iter().map(|s| s.result.iterations as f64).sum::<f64>() / n;
    let mean_shard_measurements = shards.iter().map(|s| s.result.measurements as f64).sum::<f64>() / n;
    Ok(HybridResult {
        prefix_width,
        shard_count: shard_count as u64,
        success: recovered_key.is_some(),
        recovered_key,
        mean_shard_iterations,
        mean_shard_measurements,
        aggregate_measurements: hybrid_aggregate(mean_shard_measurements, prefix_width),
        shards,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub key: Option<BitString>,
    pub trials: u64,
}

/// Random-order exhaustive search; keys are visited without repetition.
pub fn brute_force<R: Rng + ?Sized>(target: &AttackTarget, rng: &mut R) -> Result<BruteForceResult> {
    let w = target.key_width();
    if w > 32 {
        return config_err(format!("exhaustive search over {w}-bit keys is not supported"));
    }
    let space = 1u64 << w;
    // lazy Fisher-Yates: positions that have been swapped out
    let mut moved: HashMap<u64, u64> = HashMap::new();
    for i in 0..space {
        let j = rng.gen_range(i..space);
        let at_j = *moved.get(&j).unwrap_or(&j);
        let at_i = *moved.get(&i).unwrap_or(&i);
        moved.insert(j, at_i);
        moved.remove(&i);
        let key = BitString::from_u64(at_j, w)?;
        if target.is_solution(&key)? {
            return Ok(BruteForceResult { key: Some(key), trials: i + 1 });
        }
    }
    Ok(BruteForceResult { key: None, trials: space })
}

/// A keyed permutation of `block_bits`-bit blocks, one permutation per key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToyCipher {
    key_bits: usize,
    block_bits: usize,
    table: Vec<Vec<usize>>,
}

impl ToyCipher {
    pub fn from_table(key_bits: usize, block_bits: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        if !(1..=3).contains(&block_bits) || !(1..=8).contains(&key_bits) {
            return config_err(format!("toy cipher sizes {key_bits}/{block_bits} out of range"));
        }
        let blocks = 1usize << block_bits;
        if table.len() != 1 << key_bits {
            return config_err("toy cipher needs one permutation per key");
        }
        for (k, perm) in table.iter().enumerate() {
            let mut seen = vec![false; blocks];
            if perm.len() != blocks {
                return config_err(format!("permutation for key {k} has {} entries", perm.len()));
            }
            for &c in perm {
                if c >= blocks || seen[c] {
                    return config_err(format!("keyed map for key {k} is not bijective"));
                }
                seen[c] = true;
            }
        }
        Ok(Self { key_bits, block_bits, table })
    }

    /// Uniformly random keyed permutations from a seeded stream.
    pub fn random(key_bits: usize, block_bits: usize, seed: u64) -> Result<Self> {
        let mut rng = trial_rng(seed, 0);
        let blocks = 1usize << block_bits;
        let table = (0..1usize << key_bits)
            .map(|_| {
                let mut perm: Vec<usize> = (0..blocks).collect();
                for i in (1..blocks).rev() {
                    perm.swap(i, rng.gen_range(0..=i));
                }
                perm
            })
            .collect();
        Self::from_table(key_bits, block_bits, table)
    }

    pub fn identity(key_bits: usize, block_bits: usize) -> Result<Self> {
        let table = vec![(0..1usize << block_bits).collect(); 1 << key_bits];
        Self::from_table(key_bits, block_bits, table)
    }

    pub fn key_bits(&self) -> usize {
        self.key_bits
    }

    pub fn block_bits(&self) -> usize {
        self.block_bits
    }

    pub fn encrypt(&self, key: usize, block: usize) -> usize {
        self.table[key][block]
    }
}

/// Ciphertext distribution from the joint key ⊗ message register: prepare `|p⟩` on the
/// message qubits, run the ansatz on the key qubits, apply the keyed permutation as a
/// unitary, and read the message marginal.
pub fn joint_register_distribution(
    cipher: &ToyCipher,
    plaintext: usize,
    ansatz: &Ansatz,
    params: &[f64],
) -> Result<Vec<f64>> {
    let nk = cipher.key_bits;
    let nm = cipher.block_bits;
    if ansatz.config().n_qubits != nk {
        return config_err(format!("ansatz has {} qubits, toy key has {nk} bits", ansatz.config().n_qubits));
    }
    if plaintext >= 1 << nm {
        return config_err(format!("plaintext {plaintext} does not fit {nm} bits"));
    }
    let mut joint = Statevector::new(nk + nm)?;
    for b in 0..nm {
        if (plaintext >> b) & 1 == 1 {
            joint.apply_gate(&Gate::U { qubit: nk + b, theta: std::f64::consts::PI, phi: 0.0, lambda: 0.0 })?;
        }
    }
    ansatz.apply_to(&mut joint, params)?;

    let key_mask = (1usize << nk) - 1;
    let amps = joint.amplitudes();
    let mut permuted = vec![Complex64::new(0.0, 0.0); amps.len()];
    for (i, a) in amps.iter().enumerate() {
        let k = i & key_mask;
        let m = i >> nk;
        permuted[k | (cipher.encrypt(k, m) << nk)] = *a;
    }
    let encrypted = Statevector::from_amplitudes(permuted)?;

    let mut marginal = vec![0.0; 1 << nm];
    for (i, p) in encrypted.probabilities().iter().enumerate() {
        marginal[i >> nk] += p;
    }
    Ok(marginal)
}

/// Ciphertext distribution from measuring the key register and encrypting classically.
pub fn sampled_key_distribution(
    cipher: &ToyCipher,
    plaintext: usize,
    ansatz: &Ansatz,
    params: &[f64],
) -> Result<Vec<f64>> {
    let probs = ansatz.evaluate(params)?.probabilities();
    let mut out = vec![0.0; 1 << cipher.block_bits];
    for (k, p) in probs.iter().enumerate() {
        out[cipher.encrypt(k, plaintext)] += p;
    }
    Ok(out)
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Total-variation distance between the two ciphertext distributions.
pub fn equivalence_check(cipher: &ToyCipher, plaintext: usize, ansatz: &Ansatz, params: &[f64]) -> Result<f64> {
    let joint = joint_register_distribution(cipher, plaintext, ansatz, params)?;
    let sampled = sampled_key_distribution(cipher, plaintext, ansatz, params)?;
    Ok(total_variation(&joint, &sampled))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub qubits: usize,
    pub draws: usize,
    pub max_tvd: f64,
}

/// Maximum distance over `draws` random (cipher, plaintext, parameter) draws with
/// `qubits`-bit keys and blocks.
pub fn equivalence_sweep(qubits: usize, draws: usize, seed: u64) -> Result<EquivalenceReport> {
    let ansatz = Ansatz::new(AnsatzConfig::new(qubits))?;
    let mut rng = trial_rng(seed, qubits as u64);
    let mut max_tvd: f64 = 0.0;
    for _ in 0..draws {
        let cipher = ToyCipher::random(qubits, qubits, rng.gen())?;
        let plaintext = rng.gen_range(0..1usize << qubits);
        let params = random_params(&mut rng, ansatz.param_count());
        max_tvd = max_tvd.max(equivalence_check(&cipher, plaintext, &ansatz, &params)?);
    }
    Ok(EquivalenceReport { qubits, draws, max_tvd })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_cipher_validation() {
        assert!(ToyCipher::from_table(1, 1, vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(ToyCipher::from_table(1, 1, vec![vec![0, 1]]).is_err());
        let c = ToyCipher::random(2, 2, 5).unwrap();
        for k in 0..4 {
            let mut outs: Vec<usize> = (0..4).map(|p| c.encrypt(k, p)).collect();
            outs.sort();
            assert_eq!(outs, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn identity_cipher_uniform() {
        let mut cfg = AnsatzConfig::new(2).with_layers(1);
        cfg.extra_cnots_per_layer = 0;
        let ansatz = Ansatz::new(cfg).unwrap();
        // H layer then U(0,0) = I leaves |++⟩, whose ladder CNOTs keep it uniform
        let params = vec![0.0; 4];
        let c = ToyCipher::identity(2, 2).unwrap();
        let a = joint_register_distribution(&c, 1, &ansatz, &params).unwrap();
        let b = sampled_key_distribution(&c, 1, &ansatz, &params).unwrap();
        // identity cipher never changes the message
        assert!((a[1] - 1.0).abs() < 1e-12 && (b[1] - 1.0).abs() < 1e-12);

        let key_uniform =
            ToyCipher::from_table(2, 2, (0..4).map(|k| (0..4).map(|m| m ^ k).collect()).collect()).unwrap();
        let a = joint_register_distribution(&key_uniform, 0, &ansatz, &params).unwrap();
        let b = sampled_key_distribution(&key_uniform, 0, &ansatz, &params).unwrap();
        for i in 0..4 {
            assert!((a[i] - 0.25).abs() < 1e-12 && (b[i] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn hybrid_limits() {
        use crate::targets::{make_cipher_target, Cipher};
        let key = BitString::zeros(32).unwrap();
        let t = make_cipher_target(Cipher::Blowfish, &key, &BitString::zeros(64).unwrap()).unwrap();
        let cfg = AttackConfig::new(
            t,
            AnsatzConfig::new(3),
            OptimizerConfig::new(optimizer::Method::Hyperspherical),
            EncodingMode::Orthogonal,
            1,
        );
        assert!(run_hybrid_attack(&cfg, 32).is_err());
        assert!(run_hybrid_attack(&cfg, 20).is_err());
        // 29 suffix bits do not fit 3 orthogonal qubits
        assert!(run_hybrid_attack(&cfg, 3).is_err());
        assert_eq!(hybrid_aggregate(4_390_952.4, 8), 4_390_952.4 * 256.0);
    }
}
