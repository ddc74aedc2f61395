use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use vqaa::attack::{brute_force, equivalence_sweep, run_attack, run_hybrid_attack};
use vqaa::bench::{run_experiment, AttackSpec, ExperimentSpec};
use vqaa::plot::{emit_plot, read_cumulative_csv};
use vqaa::rng::trial_rng;
use vqaa::targets::make_cipher_target;
use vqaa::targets::vectors::{builtin_vectors, parse_vectors, verify_vectors};
use vqaa::{BitString, Cipher, VqaaError};

#[derive(Parser)]
#[command(name = "vqaa", version, about = "Variational quantum key-search attacks on a simulated register")]
struct Cli {
    /// Master seed; overrides the seed in a config file.
    #[arg(long, global = true, env = "VQAA_SEED")]
    seed: Option<u64>,
    /// Worker threads for trials and shards.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Progress messages on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one attack and print its result as JSON.
    Attack {
        #[arg(long)]
        config: PathBuf,
        /// Write the per-iteration cost trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a repeated-trial experiment and print its summary.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Random-order exhaustive key search.
    Brute {
        #[arg(long)]
        target: Cipher,
        #[arg(long)]
        key_hex: String,
        #[arg(long)]
        plain_hex: String,
        /// Key width in bits (defaults to the cipher's).
        #[arg(long)]
        key_bits: Option<usize>,
    },
    /// Compare the joint-register and sample-then-encrypt ciphertext distributions.
    EquivCheck {
        /// A width such as `2` or an inclusive range such as `2..3`.
        #[arg(long, default_value = "2..3")]
        qubits: String,
        #[arg(long, default_value_t = 100)]
        draws: usize,
    },
    /// Render cumulative-average CSVs as an SVG line chart.
    Plot {
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Height of the horizontal reference line.
        #[arg(long)]
        baseline: Option<f64>,
    },
    /// Check a cipher against its test vectors.
    Vectors {
        #[arg(long)]
        cipher: Cipher,
        /// CSV of `key,plain,cipher` hex rows instead of the built-in set.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

/// Failures that are not configuration errors.
enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn print(value: &impl serde::Serialize) -> Result<(), VqaaError> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn parse_range(s: &str) -> Result<(usize, usize), VqaaError> {
    let bad = || VqaaError::Config(format!("bad qubit range {s:?}"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi || hi > 3 {
        return Err(VqaaError::Config(format!("toy ciphers take 1 to 3 bits, got {s:?}")));
    }
    Ok((lo, hi))
}

fn run(cli: &Cli) -> Result<Outcome, VqaaError> {
    let seed = cli.seed;
    match &cli.command {
        Command::Attack { config, trace } => {
            let mut spec = AttackSpec::load(config)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let (instance, attack) = spec.build()?;
            if cli.verbose > 0 {
                eprintln!("attacking {} ({} unknown key bits)", instance.target.name(), attack.target.key_width());
            }
            if spec.shard_prefix_bits > 0 {
                let result = run_hybrid_attack(&attack, spec.shard_prefix_bits)?;
                print(&result)?;
                return Ok(if result.success { Outcome::Ok } else { Outcome::Failed });
            }
            let result = run_attack(&attack)?;
            if let Some(p) = trace {
                result.write_trace_csv(File::create(p)?)?;
            }
            print(&result)?;
            Ok(if result.success { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Bench { config, trials } => {
            let mut spec = ExperimentSpec::load(config)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            if let Some(t) = trials {
                spec.trials = *t;
            }
            if cli.verbose > 0 {
                eprintln!("running {} trials", spec.trials);
            }
            let outcome = run_experiment(&spec)?;
            print(&outcome.summary)?;
            Ok(if outcome.summary.success_rate == 1.0 { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Brute { target, key_hex, plain_hex, key_bits } => {
            let key = BitString::from_hex(key_hex, key_bits.unwrap_or(target.default_key_width()))?;
            let plain = BitString::from_hex(plain_hex, 4 * plain_hex.len())?;
            let t = make_cipher_target(*target, &key, &plain)?;
            let mut rng = trial_rng(seed.unwrap_or(0), 0);
            let result = brute_force(&t, &mut rng)?;
            print(&json!({
                "key_hex": result.key.as_ref().map(BitString::to_hex),
                "trials": result.trials,
            }))?;
            Ok(if result.key.is_some() { Outcome::Ok } else { Outcome::Failed })
        }
        Command::EquivCheck { qubits, draws } => {
            let (lo, hi) = parse_range(qubits)?;
            let mut reports = Vec::new();
            for q in lo..=hi {
                reports.push(equivalence_sweep(q, *draws, seed.unwrap_or(0))?);
            }
            let max_tvd = reports.iter().map(|r| r.max_tvd).fold(0.0, f64::max);
            print(&json!({ "max_tvd": max_tvd, "sweeps": reports }))?;
            Ok(if max_tvd < 1e-10 { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Plot { inputs, out, baseline } => {
            let mut series = Vec::new();
            for p in inputs {
                let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                series.push(read_cumulative_csv(label, File::open(p)?)?);
            }
            std::fs::write(out, emit_plot(&series, *baseline)?)?;
            Ok(Outcome::Ok)
        }
        Command::Vectors { cipher, file } => {
            let vectors = match file {
                Some(p) => parse_vectors(*cipher, File::open(p)?)?,
                None => builtin_vectors(*cipher),
            };
            let report = verify_vectors(*cipher, &vectors)?;
            print(&json!({ "cipher": cipher, "total": report.total, "passed": report.passed }))?;
            Ok(if report.all_passed() { Outcome::Ok } else { Outcome::Failed })
        }
    }
}
