//! Repeated-trial experiments: fresh (key, input) pairs per trial, per-trial and
//! cumulative-average CSVs, summary statistics, and optional brute-force baselines.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzConfig;
use crate::attack::{brute_force, run_attack, AttackConfig, AttackResult};
use crate::bits::BitString;
use crate::encoding::{EncodingMode, EncodingSpec};
use crate::error::{config_err, Result};
use crate::optimizer::OptimizerConfig;
use crate::rng::trial_rng;
use crate::targets::{make_cipher_target, make_hash_collision_target, AttackTarget, Cipher};

/// The family of problems a trial draws from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Cipher {
        cipher: Cipher,
        /// Defaults to the cipher's natural key width.
        #[serde(default)]
        key_width: Option<usize>,
        /// Plaintext length in blocks (ECB).
        #[serde(default = "one")]
        blocks: usize,
        /// Leading key bits revealed to the attacker; the register covers the rest.
        #[serde(default)]
        known_prefix_bits: usize,
    },
    HashCollision {
        document_bytes: usize,
        segment_bits: usize,
        digest_bits: usize,
    },
}

fn one() -> usize {
    1
}

/// One concrete problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub target: AttackTarget,
    /// The secret key, or the original segment for collision targets.
    pub secret_key: BitString,
    pub public_input: BitString,
}

impl TargetSpec {
    pub fn sdes() -> Self {
        TargetSpec::Cipher { cipher: Cipher::Sdes, key_width: None, blocks: 1, known_prefix_bits: 0 }
    }

    pub fn saes() -> Self {
        TargetSpec::Cipher { cipher: Cipher::Saes, key_width: None, blocks: 1, known_prefix_bits: 0 }
    }

    pub fn blowfish(key_width: usize, known_prefix_bits: usize) -> Self {
        TargetSpec::Cipher { cipher: Cipher::Blowfish, key_width: Some(key_width), blocks: 1, known_prefix_bits }
    }

    /// Key bits the register has to cover.
    pub fn search_width(&self) -> usize {
        match self {
            TargetSpec::Cipher { cipher, key_width, known_prefix_bits, .. } => {
                key_width.unwrap_or(cipher.default_key_width()).saturating_sub(*known_prefix_bits)
            }
            TargetSpec::HashCollision { segment_bits, .. } => *segment_bits,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TargetSpec::Cipher { cipher, key_width, blocks, known_prefix_bits } => {
                let w = key_width.unwrap_or(cipher.default_key_width());
                cipher.check_key_width(w)?;
                if *blocks == 0 || *blocks * cipher.block_width() > 512 {
                    return config_err(format!("{blocks} plaintext blocks out of range"));
                }
                if *known_prefix_bits >= w {
                    return config_err(format!("{known_prefix_bits} known bits leave nothing of a {w}-bit key"));
                }
            }
            TargetSpec::HashCollision { document_bytes, segment_bits, .. } => {
                if *segment_bits == 0 || *segment_bits > document_bytes * 8 || *segment_bits > 32 {
                    return config_err(format!(
                        "{segment_bits}-bit segment does not fit a {document_bytes}-byte document"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Draws a fresh instance uniformly from `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Instance> {
        self.validate()?;
        match self {
            TargetSpec::Cipher { cipher, key_width, blocks, known_prefix_bits } => {
                let w = key_width.unwrap_or(cipher.default_key_width());
                let secret_key = random_bits(rng, w)?;
                let public_input = random_bits(rng, blocks * cipher.block_width())?;
                let mut target = make_cipher_target(*cipher, &secret_key, &public_input)?;
                if *known_prefix_bits > 0 {
                    target = target.with_fixed_prefix(&secret_key.slice(0, *known_prefix_bits)?)?;
                }
                Ok(Instance { target, secret_key, public_input })
            }
            TargetSpec::HashCollision { document_bytes, segment_bits, digest_bits } => {
                let public_input = random_bits(rng, document_bytes * 8)?;
                let target = make_hash_collision_target(&public_input, *segment_bits, *digest_bits)?;
                let secret_key = public_input.slice(public_input.width() - segment_bits, public_input.width())?;
                Ok(Instance { target, secret_key, public_input })
            }
        }
    }

    /// Mean iterations and measurements reported in the literature for this configuration.
    pub fn reference_figures(&self) -> Option<(f64, f64)> {
        match self {
            TargetSpec::Cipher { cipher: Cipher::Sdes, known_prefix_bits: 0, .. } => Some((8.3, 249.0)),
            TargetSpec::Cipher { cipher: Cipher::Saes, known_prefix_bits: 0, .. } => Some((982.67, 23_584.0)),
            TargetSpec::Cipher { cipher: Cipher::Blowfish, key_width: Some(32), known_prefix_bits: 8, .. } => {
                Some((365_912.7, 4_390_952.4))
            }
            _ => None,
        }
    }
}

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, width: usize) -> Result<BitString> {
    BitString::new((0..width).map(|_| rng.gen::<bool>()).collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    #[default]
    None,
    BruteForce,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub trials_csv: Option<PathBuf>,
    #[serde(default)]
    pub cumulative_csv: Option<PathBuf>,
    #[serde(default)]
    pub baseline_csv: Option<PathBuf>,
    #[serde(default)]
    pub summary_json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub target: TargetSpec,
    pub ansatz: AnsatzConfig,
    pub optimizer: OptimizerConfig,
    pub encoding: EncodingSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub baseline: Baseline,
    /// Fill the `wall_ms` column. Off by default so that repeated runs write identical files.
    #[serde(default)]
    pub record_wall_time: bool,
    #[serde(default)]
    pub output: OutputPaths,
}

fn default_trials() -> usize {
    100
}

impl ExperimentSpec {
    pub fn new(target: TargetSpec, ansatz: AnsatzConfig, optimizer: OptimizerConfig, encoding: EncodingSpec) -> Self {
        Self {
            target,
            ansatz,
            optimizer,
            encoding,
            trials: default_trials(),
            seed: 0,
            baseline: Baseline::None,
            record_wall_time: false,
            output: OutputPaths::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return config_err("trials must be at least 1");
        }
        self.target.validate()?;
        self.ansatz.validate()?;
        self.optimizer.validate()?;
        let encoding = EncodingMode::try_from(self.encoding)?;
        encoding.check_width(self.ansatz.n_qubits, self.target.search_width())
    }

    /// Attack configuration for trial `index` together with its instance.
    pub fn trial_config(&self, index: usize) -> Result<(Instance, AttackConfig)> {
        let mut rng = trial_rng(self.seed, index as u64);
        let instance = self.target.draw(&mut rng)?;
        let mut config = AttackConfig::new(
            instance.target.clone(),
            self.ansatz.clone(),
            self.optimizer.clone(),
            EncodingMode::try_from(self.encoding)?,
            rng.gen(),
        );
        config.stream = index as u64;
        Ok((instance, config))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub secret_key_hex: String,
    pub plaintext_hex: String,
    pub iterations: u64,
    pub measurements: u64,
    pub success: bool,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub target: String,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_iterations: f64,
    pub mean_measurements: f64,
    pub mean_cost_evaluations: f64,
    pub param_count: usize,
    pub probes_per_step: usize,
    /// Mean trials of random-order exhaustive search over the searched bits, `(2^w + 1) / 2`.
    pub exhaustive_mean: f64,
    pub baseline_mean_trials: Option<f64>,
    pub reference_iterations: Option<f64>,
    pub reference_measurements: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub records: Vec<TrialRecord>,
    pub results: Vec<AttackResult>,
    pub baseline: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Runs every trial (in parallel, recorded in trial order) and writes the configured outputs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let start = Instant::now();
    let runs: Vec<(TrialRecord, AttackResult, Option<TrialRecord>)> =
        (0..spec.trials).into_par_iter().map(|i| run_trial(spec, i)).collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(runs.len());
    let mut results = Vec::with_capacity(runs.len());
    let mut baseline = Vec::new();
    for (rec, res, base) in runs {
        records.push(rec);
        results.push(res);
        baseline.extend(base);
    }

    let n = spec.trials as f64;
    let mean = |f: &dyn Fn(&AttackResult) -> f64| results.iter().map(f).sum::<f64>() / n;
    let (reference_iterations, reference_measurements) = spec.target.reference_figures().unzip();
    let param_count = spec.ansatz.param_count();
    let summary = Summary {
        target: results_target_name(spec),
        trials: spec.trials,
        success_rate: records.iter().filter(|r| r.success).count() as f64 / n,
        mean_iterations: mean(&|r| r.iterations as f64),
        mean_measurements: mean(&|r| r.measurements as f64),
        mean_cost_evaluations: mean(&|r| r.cost_evaluations as f64),
        param_count,
        probes_per_step: spec.optimizer.probes_per_step(param_count),
        exhaustive_mean: ((1u128 << spec.target.search_width()) as f64 + 1.0) / 2.0,
        baseline_mean_trials: (!baseline.is_empty())
            .then(|| baseline.iter().map(|r| r.iterations as f64).sum::<f64>() / baseline.len() as f64),
        reference_iterations,
        reference_measurements,
        wall_time_s: start.elapsed().as_secs_f64(),
    };

    let out = &spec.output;
    if let Some(p) = &out.trials_csv {
        write_trials_csv(File::create(p)?, &records)?;
    }
    if let Some(p) = &out.cumulative_csv {
        write_cumulative_csv(File::create(p)?, &records)?;
    }
    if let Some(p) = &out.baseline_csv {
        write_trials_csv(File::create(p)?, &baseline)?;
    }
    if let Some(p) = &out.summary_json {
        let mut f = File::create(p)?;
        serde_json::to_writer_pretty(&mut f, &summary)?;
        writeln!(f)?;
    }
    Ok(ExperimentOutcome { records, results, baseline, summary })
}

fn results_target_name(spec: &ExperimentSpec) -> String {
    match &spec.target {
        TargetSpec::Cipher { cipher, .. } => cipher.to_string(),
        TargetSpec::HashCollision { digest_bits, .. } => format!("fnv1a-{digest_bits}"),
    }
}

fn run_trial(spec: &ExperimentSpec, index: usize) -> Result<(TrialRecord, AttackResult, Option<TrialRecord>)> {
    let (instance, config) = spec.trial_config(index)?;
    let result = run_attack(&config)?;
    let record = TrialRecord {
        trial: index,
        secret_key_hex: instance.secret_key.to_hex(),
        plaintext_hex: instance.public_input.to_hex(),
        iterations: result.iterations,
        measurements: result.measurements,
        success: result.success,
        wall_ms: spec.record_wall_time.then_some(result.wall_time * 1e3),
    };
    let base = match spec.baseline {
        Baseline::None => None,
        Baseline::BruteForce => {
            // streams past the trial range, so baselines never share randomness with attacks
            let mut rng = trial_rng(spec.seed, index as u64 | 1 << 62);
            let start = Instant::now();
            let bf = brute_force(&instance.target, &mut rng)?;
            Some(TrialRecord {
                iterations: bf.trials,
                measurements: bf.trials,
                success: bf.key.is_some(),
                wall_ms: spec.record_wall_time.then_some(start.elapsed().as_secs_f64() * 1e3),
                ..record.clone()
            })
        }
    };
    Ok((record, result, base))
}

pub fn write_trials_csv<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["trial", "secret_key_hex", "plaintext_hex", "iterations", "measurements", "success", "wall_ms"])?;
    for r in records {
        w.write_record([
            r.trial.to_string(),
            r.secret_key_hex.clone(),
            r.plaintext_hex.clone(),
            r.iterations.to_string(),
            r.measurements.to_string(),
            r.success.to_string(),
            r.wall_ms.map(|m| format!("{m:.3}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Running means after each trial, in trial order.
pub fn cumulative_averages(records: &[TrialRecord]) -> Vec<(usize, f64, f64)> {
    let (mut it, mut ms) = (0.0, 0.0);
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            it += r.iterations as f64;
            ms += r.measurements as f64;
            let k = (i + 1) as f64;
            (r.trial, it / k, ms / k)
        })
        .collect()
}

pub fn write_cumulative_csv<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["trial", "cum_avg_iterations", "cum_avg_measurements"])?;
    for (t, a, m) in cumulative_averages(records) {
        w.write_record([t.to_string(), a.to_string(), m.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Single attack described in JSON; key and input are drawn from `seed` when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpec {
    pub target: TargetSpec,
    pub ansatz: AnsatzConfig,
    pub optimizer: OptimizerConfig,
    pub encoding: EncodingSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub secret_key_hex: Option<String>,
    #[serde(default)]
    pub plaintext_hex: Option<String>,
    /// Run one shard per value of this many leading unknown key bits.
    #[serde(default)]
    pub shard_prefix_bits: usize,
}

impl AttackSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The problem instance and the attack configuration for it.
    pub fn build(&self) -> Result<(Instance, AttackConfig)> {
        self.target.validate()?;
        let mut rng = trial_rng(self.seed, 0);
        let mut instance = self.target.draw(&mut rng)?;
        if self.secret_key_hex.is_some() || self.plaintext_hex.is_some() {
            let TargetSpec::Cipher { cipher, key_width, known_prefix_bits, .. } = &self.target else {
                return config_err("explicit keys apply to cipher targets only");
            };
            let w = key_width.unwrap_or(cipher.default_key_width());
            let key = match &self.secret_key_hex {
                Some(h) => BitString::from_hex(h, w)?,
                None => instance.secret_key.clone(),
            };
            let plain = match &self.plaintext_hex {
                Some(h) => BitString::from_hex(h, 4 * h.len())?,
                None => instance.public_input.clone(),
            };
            let mut target = make_cipher_target(*cipher, &key, &plain)?;
            if *known_prefix_bits > 0 {
                target = target.with_fixed_prefix(&key.slice(0, *known_prefix_bits)?)?;
            }
            instance = Instance { target, secret_key: key, public_input: plain };
        }
        let config = AttackConfig::new(
            instance.target.clone(),
            self.ansatz.clone(),
            self.optimizer.clone(),
            EncodingMode::try_from(self.encoding)?,
            self.seed,
        );
        Ok((instance, config))
    }
}
