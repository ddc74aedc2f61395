use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vqaa::attack::{
    brute_force, equivalence_check, equivalence_sweep, hybrid_aggregate, run_attack, run_hybrid_attack, AttackConfig,
    ToyCipher,
};
use vqaa::bench::random_bits;
use vqaa::targets::{make_cipher_target, make_hash_collision_target, AttackTarget, KeyedFunction};
use vqaa::{Ansatz, AnsatzConfig, BitString, Cipher, EncodingMode, Method, OptimizerConfig, Result};

struct Identity(usize);

impl KeyedFunction for Identity {
    fn key_width(&self) -> usize {
        self.0
    }
    fn output_width(&self) -> usize {
        self.0
    }
    fn evaluate(&self, key: &BitString) -> Result<BitString> {
        Ok(key.clone())
    }
}

fn one_bit_target(secret: bool) -> AttackTarget {
    let key = BitString::new(vec![secret]).unwrap();
    AttackTarget::from_function("identity", Arc::new(Identity(1)), &key, BitString::zeros(1).unwrap()).unwrap()
}

fn sdes_config(seed: u64, method: Method) -> AttackConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = random_bits(&mut rng, 10).unwrap();
    let plain = random_bits(&mut rng, 8).unwrap();
    let target = make_cipher_target(Cipher::Sdes, &key, &plain).unwrap();
    let mut optimizer = OptimizerConfig::new(method);
    optimizer.max_iterations = 512;
    AttackConfig::new(target, AnsatzConfig::new(5), optimizer, EncodingMode::non_orthogonal(4).unwrap(), seed)
}

#[test]
fn one_bit_identity_is_solved_quickly() {
    for secret in [false, true] {
        for seed in 0..5 {
            let mut ansatz = AnsatzConfig::new(1).with_layers(1);
            ansatz.extra_cnots_per_layer = 0;
            let mut optimizer = OptimizerConfig::new(Method::Gd);
            optimizer.max_iterations = 10;
            let config = AttackConfig::new(one_bit_target(secret), ansatz, optimizer, EncodingMode::Orthogonal, seed);
            let result = run_attack(&config).unwrap();
            assert!(result.success, "secret {secret}, seed {seed}");
            assert_eq!(result.recovered_key.unwrap().bits(), &[secret]);
            assert!(result.iterations <= 10);
        }
    }
}

#[test]
fn zero_budget_fails_without_iterating() {
    let mut config = sdes_config(1, Method::Gd);
    config.max_iterations = 0;
    let result = run_attack(&config).unwrap();
    assert!(!result.success && result.recovered_key.is_none());
    assert_eq!((result.iterations, result.measurements), (0, 0));
}

#[test]
fn attacks_are_deterministic_and_verified() {
    for method in [Method::Gd, Method::Hyperspherical, Method::PlaneRotation] {
        let config = sdes_config(7, method);
        let a = run_attack(&config).unwrap();
        let b = run_attack(&config).unwrap();
        assert!(a.same_outcome(&b), "{method:?}");
        if let Some(k) = &a.recovered_key {
            assert_eq!(config.target.evaluate(k).unwrap(), *config.target.known_output());
        }
    }
}

#[test]
fn measurement_accounting_identity() {
    for method in [Method::Gd, Method::Hyperspherical, Method::PlaneRotation] {
        for seed in 0..10 {
            let config = sdes_config(seed, method);
            let r = run_attack(&config).unwrap();
            let per = config.optimizer.probes_per_step(30) as u64;
            assert_eq!(r.measurements, r.iterations * per, "{method:?} seed {seed}");
            // one base sample per started iteration on top of the probes
            let started = r.cost_trace.len() as u64;
            assert_eq!(r.cost_evaluations, r.measurements + started);
            assert!(started == r.iterations || started == r.iterations + 1);
        }
    }
    assert_eq!(OptimizerConfig::new(Method::Gd).probes_per_step(30), 30);
    assert_eq!(OptimizerConfig::new(Method::Hyperspherical).probes_per_step(30), 31);
}

#[test]
fn periodic_restarts_are_counted() {
    for seed in 0..20 {
        let mut config = sdes_config(seed, Method::Hyperspherical);
        config.restart_on_cycle = false;
        config.optimizer.restart_every = Some(5);
        config.max_iterations = 60;
        let r = run_attack(&config).unwrap();
        // a hit inside the probes completes the iteration but skips the restart check
        let expected = [r.iterations / 5, r.iterations.saturating_sub(1) / 5];
        assert!(expected.contains(&r.restarts), "seed {seed}: {} restarts in {} iterations", r.restarts, r.iterations);
        assert!(run_attack(&config).unwrap().same_outcome(&r));
    }
    let mut config = sdes_config(0, Method::Gd);
    config.optimizer.restart_every = Some(0);
    assert!(run_attack(&config).is_err());
}

#[test]
fn result_serializes() {
    let r = run_attack(&sdes_config(3, Method::Hyperspherical)).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: vqaa::AttackResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let mut csv = Vec::new();
    r.write_trace_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("iteration,cost\n0,"));
    assert_eq!(text.lines().count(), r.cost_trace.len() + 1);
}

#[test]
fn one_bit_shards_always_succeed() {
    let key = BitString::from_u64(0x1D3, 10).unwrap();
    let plain = BitString::from_u64(0x6A, 8).unwrap();
    let target = make_cipher_target(Cipher::Sdes, &key, &plain).unwrap();
    let mut ansatz = AnsatzConfig::new(1).with_layers(1);
    ansatz.extra_cnots_per_layer = 0;
    let mut optimizer = OptimizerConfig::new(Method::Gd);
    optimizer.max_iterations = 20;
    let config = AttackConfig::new(target.clone(), ansatz, optimizer, EncodingMode::Orthogonal, 5);
    let hybrid = run_hybrid_attack(&config, 9).unwrap();
    assert_eq!(hybrid.shard_count, 512);
    assert!(hybrid.success);
    let k = hybrid.recovered_key.unwrap();
    assert_eq!(k.width(), 10);
    assert!(target.is_solution(&k).unwrap());
}

#[test]
fn hybrid_aggregate_is_shard_count_times_mean() {
    let mut config = sdes_config(11, Method::Hyperspherical);
    config.ansatz = AnsatzConfig::new(4);
    config.max_iterations = 100;
    let hybrid = run_hybrid_attack(&config, 2).unwrap();
    assert_eq!(hybrid.shards.len(), 4);
    let total: u64 = hybrid.shards.iter().map(|s| s.result.measurements).sum();
    assert_eq!(hybrid.aggregate_measurements, total as f64);
    assert_eq!(hybrid.aggregate_measurements, 4.0 * hybrid.mean_shard_measurements);
    let per = config.optimizer.probes_per_step(config.ansatz.param_count()) as u64;
    for s in &hybrid.shards {
        assert_eq!(s.result.measurements, s.result.iterations * per);
    }
}

#[test]
fn shard_accounting_arithmetic() {
    // 12 probes per iteration, 256 shards
    assert!((365_912.7 * 12.0 - 4_390_952.4f64).abs() < 1e-6);
    assert!((hybrid_aggregate(4_390_952.4, 8) - 1_124_083_814.4).abs() < 1e-3);
    // six qubits, one layer, two angles per slot
    assert_eq!(AnsatzConfig::new(6).with_layers(1).param_count(), 12);
}

#[test]
fn brute_force_mean_on_a_unique_key() {
    // four S-DES blocks pin the key down: another key matching all 32 bits is vanishingly rare
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let runs = 1000;
    let mut total = 0u64;
    for _ in 0..runs {
        let key = random_bits(&mut rng, 10).unwrap();
        let plain = random_bits(&mut rng, 32).unwrap();
        let target = make_cipher_target(Cipher::Sdes, &key, &plain).unwrap();
        let r = brute_force(&target, &mut rng).unwrap();
        assert!(target.is_solution(r.key.as_ref().unwrap()).unwrap());
        total += r.trials;
    }
    let mean = total as f64 / runs as f64;
    assert!((480.0..=545.0).contains(&mean), "mean {mean}");
}

#[test]
fn brute_force_small_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for secret in [false, true] {
        let r = brute_force(&one_bit_target(secret), &mut rng).unwrap();
        assert!(r.trials == 1 || r.trials == 2);
    }
    let doc = BitString::from_bytes(b"order 7731 ships friday").unwrap();
    let target = make_hash_collision_target(&doc, 12, 8).unwrap();
    let r = brute_force(&target, &mut rng).unwrap();
    let found = r.key.unwrap();
    assert!(r.trials <= 4096);
    assert_ne!(&found, target.excluded_key().unwrap());
    assert_eq!(target.evaluate(&found).unwrap(), *target.known_output());
}

/// One-bit indicator of a single 4-bit key.
struct Indicator(u64);

impl KeyedFunction for Indicator {
    fn key_width(&self) -> usize {
        4
    }
    fn output_width(&self) -> usize {
        1
    }
    fn evaluate(&self, key: &BitString) -> Result<BitString> {
        BitString::new(vec![key.to_u64()? == self.0])
    }
}

#[test]
fn brute_force_visits_each_key_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut position = [0u32; 16];
    for run in 0..16_000u64 {
        let secret = BitString::from_u64(run % 16, 4).unwrap();
        let target = AttackTarget::from_function(
            "indicator",
            Arc::new(Indicator(run % 16)),
            &secret,
            BitString::zeros(1).unwrap(),
        )
        .unwrap();
        let r = brute_force(&target, &mut rng).unwrap();
        assert_eq!(r.key.unwrap(), secret);
        assert!((1..=16).contains(&r.trials));
        position[r.trials as usize - 1] += 1;
    }
    // without repetition the hit position is uniform on 1..=16; 1000 expected each, sd ~31
    for (i, &c) in position.iter().enumerate() {
        assert!((850..=1150).contains(&c), "position {} seen {c} times", i + 1);
    }
}

#[test]
fn equivalence_on_toy_ciphers() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for bits in [2usize, 3] {
        let ansatz = Ansatz::new(AnsatzConfig::new(bits)).unwrap();
        for _ in 0..100 {
            let cipher = ToyCipher::random(bits, bits, rng.gen()).unwrap();
            let params: Vec<f64> = (0..ansatz.param_count()).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let plaintext = rng.gen_range(0..1usize << bits);
            assert!(equivalence_check(&cipher, plaintext, &ansatz, &params).unwrap() < 1e-10);
        }
    }
    assert!(equivalence_sweep(2, 10, 1).unwrap().max_tvd < 1e-10);
    assert!(ToyCipher::from_table(2, 2, vec![vec![0, 1, 2, 2]; 4]).is_err());
}
