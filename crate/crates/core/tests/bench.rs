use std::fs;

use vqaa::bench::{run_experiment, Baseline, ExperimentSpec, TargetSpec};
use vqaa::plot::{emit_plot, read_cumulative_csv, Series};
use vqaa::{AnsatzConfig, EncodingSpec, Method, OptimizerConfig};

fn sdes_spec(trials: usize, method: Method) -> ExperimentSpec {
    let mut optimizer = OptimizerConfig::new(method);
    optimizer.max_iterations = 512;
    let mut spec = ExperimentSpec::new(
        TargetSpec::sdes(),
        AnsatzConfig::new(5),
        optimizer,
        EncodingSpec::NonOrthogonal { states_per_qubit: 4 },
    );
    spec.trials = trials;
    spec.seed = 99;
    spec
}

#[test]
fn single_trial_cumulative_equals_the_trial() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = sdes_spec(1, Method::Hyperspherical);
    spec.output.cumulative_csv = Some(dir.path().join("cum.csv"));
    let out = run_experiment(&spec).unwrap();
    let text = fs::read_to_string(dir.path().join("cum.csv")).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    let r = &out.records[0];
    assert_eq!(rows[1], format!("0,{},{}", r.iterations as f64, r.measurements as f64));
    assert_eq!(out.summary.mean_iterations, r.iterations as f64);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let run = |dir: &std::path::Path| {
        let mut spec = sdes_spec(12, Method::Hyperspherical);
        spec.baseline = Baseline::BruteForce;
        spec.output.trials_csv = Some(dir.join("trials.csv"));
        spec.output.cumulative_csv = Some(dir.join("cum.csv"));
        spec.output.baseline_csv = Some(dir.join("base.csv"));
        run_experiment(&spec).unwrap();
        ["trials.csv", "cum.csv", "base.csv"].map(|f| fs::read(dir.join(f)).unwrap())
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (x, y) = (run(a.path()), run(b.path()));
    assert_eq!(x, y);
    let trials = String::from_utf8(x[0].clone()).unwrap();
    assert!(trials.starts_with("trial,secret_key_hex,plaintext_hex,iterations,measurements,success,wall_ms\n"));
    // wall time is off by default so the column stays empty
    assert!(trials.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn gradient_descent_summary_identity() {
    let out = run_experiment(&sdes_spec(8, Method::Gd)).unwrap();
    let s = &out.summary;
    assert_eq!(s.param_count, 30);
    assert_eq!(s.probes_per_step, 30);
    assert!((s.mean_measurements - 30.0 * s.mean_iterations).abs() < 1e-9);
    for (rec, res) in out.records.iter().zip(&out.results) {
        assert_eq!(rec.measurements, rec.iterations * 30);
        assert_eq!(rec.success, res.success);
    }
    assert_eq!(s.exhaustive_mean, 512.5);
    assert!(s.baseline_mean_trials.is_none());
}

#[test]
fn baseline_rows_match_trials() {
    let mut spec = sdes_spec(5, Method::Hyperspherical);
    spec.baseline = Baseline::BruteForce;
    let out = run_experiment(&spec).unwrap();
    assert_eq!(out.baseline.len(), 5);
    for (a, b) in out.records.iter().zip(&out.baseline) {
        assert_eq!((a.trial, &a.secret_key_hex, &a.plaintext_hex), (b.trial, &b.secret_key_hex, &b.plaintext_hex));
        assert!(b.success && (1..=1024).contains(&b.iterations));
    }
    assert!(out.summary.baseline_mean_trials.is_some());
}

#[test]
fn spec_round_trips_through_json() {
    let spec = sdes_spec(3, Method::PlaneRotation);
    let back = ExperimentSpec::from_json(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);
    let minimal = r#"{"target":{"kind":"cipher","cipher":"sdes"},"ansatz":{"n_qubits":5},
        "optimizer":{"method":"hyperspherical"},"encoding":{"kind":"non_orthogonal","states_per_qubit":4}}"#;
    assert!(ExperimentSpec::from_json(minimal).is_ok());
    assert!(ExperimentSpec::from_json(&minimal.replace("\"sdes\"", "\"des\"")).is_err());
}

#[test]
fn two_rows_make_one_two_point_polyline() {
    let csv = "trial,cum_avg_iterations,cum_avg_measurements\n0,4,120\n1,6,180\n";
    let series = read_cumulative_csv("run", csv.as_bytes()).unwrap();
    let svg = emit_plot(&[series], None).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let lines: Vec<_> = doc.descendants().filter(|n| n.has_tag_name("polyline")).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0].attribute("points").unwrap().split_whitespace().count(), 2);
}

#[test]
fn plot_is_deterministic_and_well_formed() {
    let a = Series { label: "a <gd> & co".into(), points: vec![(0.0, 10.0), (1.0, 8.0), (2.0, 9.0)] };
    let b = Series { label: "b".into(), points: vec![(0.0, 3.0), (1.0, 5.0)] };
    let svg = emit_plot(&[a.clone(), b.clone()], Some(512.5)).unwrap();
    assert_eq!(svg, emit_plot(&[a, b], Some(512.5)).unwrap());
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 2);
    let texts: Vec<_> = doc.descendants().filter_map(|n| n.text()).collect();
    assert!(texts.contains(&"a <gd> & co"));
    assert!(emit_plot(&[], None).is_err());
}

#[test]
fn malformed_cumulative_csv_is_rejected() {
    assert!(read_cumulative_csv("x", "trial,cum_avg_iterations,cum_avg_measurements\n".as_bytes()).is_err());
    assert!(read_cumulative_csv("x", "a,b,c\n1,2,3\n".as_bytes()).is_err());
    assert!(read_cumulative_csv("x", "trial,cum_avg_iterations,cum_avg_measurements\n0,nan,1\n".as_bytes()).is_err());
}
