//! Acceptance suite: one test per release criterion, each printing a PASS
//! line with its measured margin (visible under `--nocapture`). Tolerances
//! and runtime budgets are asserted, not just reported.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cvqkd_cli::config::SweepConfig;
use cvqkd_core::{
    autocorrelation, estimate_mi, expected_lag1_autocorr, key_rate, mutual_information,
    run_sweep, simulate_batch_raw, synthesize_trace, variance_decompose, AlicePrepNoise,
    ChannelParams, DetectorParams, NoiseModelKind, ProtocolParams, SampleTrace, SweepRow,
    SweepSpec, SynthSpec, SystemParams, TraceMeta,
};

fn system(
    model_va: f64,
    f: f64,
    length_km: f64,
    eta: f64,
    nu: f64,
    xi_const: f64,
    xi_slope: f64,
) -> SystemParams {
    SystemParams {
        protocol: ProtocolParams::new(model_va, f).unwrap(),
        prep: AlicePrepNoise::new(xi_const, xi_slope).unwrap(),
        detector: DetectorParams::new(eta, nu).unwrap(),
        channel: ChannelParams::new(length_km, 0.2).unwrap(),
    }
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn shipped_spec(name: &str, overrides: &[&str]) -> SweepSpec {
    let path = config_path(name);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut cfg = SweepConfig::parse(&text, &path.display().to_string()).unwrap();
    let sets: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    cfg.apply_overrides(&sets).unwrap();
    cfg.into_spec().unwrap()
}

fn assert_runtime(elapsed: Duration, budget: Duration, what: &str) {
    assert!(
        elapsed <= budget,
        "{what} took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn criterion_01_perfect_channel_null() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = f64::NEG_INFINITY;
    let mut points = Vec::with_capacity(105);
    for _ in 0..100 {
        points.push((
            rng.random_range(0.0..=0.5),
            rng.random_range(0.001..=1.0),
            rng.random_range(0.1..=20.0),
        ));
    }
    points.extend([
        (0.0, 1.0, 0.1),
        (0.5, 1.0, 20.0),
        (0.0, 0.001, 4.0),
        (0.5, 0.001, 0.1),
        (0.01, 0.5, 4.0),
    ]);
    for &(nu, eta, va) in &points {
        let params = system(va, 1.0, 0.0, eta, nu, 0.0, 0.0);
        for model in [NoiseModelKind::Trusted, NoiseModelKind::Calibrated] {
            let res = key_rate(&params, model).unwrap();
            assert!(
                res.chi_be < 1e-9,
                "chi_be = {} at nu={nu} eta={eta} va={va} {model}",
                res.chi_be
            );
            worst = worst.max(res.chi_be);
        }
    }
    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(1), "criterion 1");
    println!(
        "PASS criterion 1: perfect-channel chi_be < 1e-9 for trusted+calibrated at {} points (worst {worst:.3e}) [{elapsed:?}]",
        points.len()
    );
}

/// 100 random admissible operating points shared by criteria 2 and 3.
fn random_grid(seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..100)
        .map(|_| {
            (
                rng.random_range(0.0..=150.0),
                rng.random_range(0.1..=20.0),
                rng.random_range(0.05..=1.0),
                rng.random_range(0.0..=0.2),
            )
        })
        .collect()
}

#[test]
fn criterion_02_models_collapse_at_zero_nu() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for &(l, va, eta, xi) in &random_grid(202) {
        let params = system(va, 0.95, l, eta, 0.0, xi, 0.0);
        let rates: Vec<f64> = NoiseModelKind::ALL
            .iter()
            .map(|&m| key_rate(&params, m).unwrap().rate_raw)
            .collect();
        let scale = rates.iter().fold(f64::MIN_POSITIVE, |a, r| a.max(r.abs()));
        let spread = rates.iter().fold(f64::NEG_INFINITY, |a, &r| a.max(r))
            - rates.iter().fold(f64::INFINITY, |a, &r| a.min(r));
        let rel = spread / scale;
        assert!(rel <= 1e-12, "rel spread {rel} at L={l} va={va} eta={eta} xi={xi}");
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(5), "criterion 2");
    println!(
        "PASS criterion 2: nu_B=0 rate_raw collapse within 1e-12 relative over 100 points (worst {worst:.3e}) [{elapsed:?}]"
    );
}

#[test]
fn criterion_03_model_ordering() {
    let start = Instant::now();
    let mut worst_slack = f64::INFINITY;
    for nu in [0.01, 0.1] {
        for &(l, va, eta, xi) in &random_grid(303) {
            let params = system(va, 0.95, l, eta, nu, xi, 0.0);
            let rate =
                |m: NoiseModelKind| key_rate(&params, m).unwrap().rate_raw;
            let (t, u, c) = (
                rate(NoiseModelKind::Trusted),
                rate(NoiseModelKind::Untrusted),
                rate(NoiseModelKind::Calibrated),
            );
            for (hi, lo) in [(t, c), (c, u)] {
                let slack = hi - lo;
                assert!(
                    slack >= -1e-10,
                    "ordering violated by {slack} at nu={nu} L={l} va={va} eta={eta} xi={xi}"
                );
                worst_slack = worst_slack.min(slack);
            }
        }
    }
    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(5), "criterion 3");
    println!(
        "PASS criterion 3: trusted >= calibrated >= untrusted at 200 points, nu_B in {{0.01, 0.1}} (min slack {worst_slack:.3e}) [{elapsed:?}]"
    );
}

fn rows_for(rows: &[SweepRow], model: NoiseModelKind) -> Vec<&SweepRow> {
    rows.iter().filter(|r| r.model == model).collect()
}

fn rate_at(rows: &[SweepRow], model: NoiseModelKind, distance_km: f64) -> f64 {
    rows.iter()
        .find(|r| r.model == model && r.distance_km == distance_km)
        .expect("sweep row present")
        .rate_raw
}

#[test]
fn criterion_04_high_noise_kills_only_the_untrusted_model() {
    let start = Instant::now();
    let rows = run_sweep(&shipped_spec("fig6.cfg", &[])).unwrap();
    let untrusted = rows_for(&rows, NoiseModelKind::Untrusted);
    assert_eq!(untrusted.len(), 150);
    let best = untrusted
        .iter()
        .map(|r| r.rate_raw)
        .fold(f64::NEG_INFINITY, f64::max);
    for r in &untrusted {
        assert!(
            r.rate_raw <= 0.0 && r.rate == 0.0,
            "untrusted positive at {} km: {}",
            r.distance_km,
            r.rate_raw
        );
    }
    let trusted_10 = rate_at(&rows, NoiseModelKind::Trusted, 10.0);
    let calibrated_10 = rate_at(&rows, NoiseModelKind::Calibrated, 10.0);
    assert!(trusted_10 > 0.0 && calibrated_10 > 0.0);
    // regression against the pre-build reference optimizer
    assert!((best - -0.20880341508502311).abs() < 1e-9, "best untrusted {best}");
    assert!((trusted_10 - 0.1495819957657122).abs() < 1e-9);
    assert!((calibrated_10 - 0.11825103410042496).abs() < 1e-9);
    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(60), "criterion 4");
    println!(
        "PASS criterion 4: fig6 untrusted rate <= 0 at all 150 distances (best {best:.6}); trusted {trusted_10:.6} and calibrated {calibrated_10:.6} positive at 10 km [{elapsed:?}]"
    );
}

/// Largest grid distance with positive optimized rate, or 0 if none.
fn cutoff_km(rows: &[SweepRow], model: NoiseModelKind) -> f64 {
    rows_for(rows, model)
        .iter()
        .filter(|r| r.rate_raw > 0.0)
        .map(|r| r.distance_km)
        .fold(0.0, f64::max)
}

#[test]
fn criterion_05_low_noise_structure_and_small_calibration_gap() {
    let start = Instant::now();
    let rows = run_sweep(&shipped_spec("fig5.cfg", &[])).unwrap();
    let trusted_10 = rate_at(&rows, NoiseModelKind::Trusted, 10.0);
    let untrusted_10 = rate_at(&rows, NoiseModelKind::Untrusted, 10.0);
    let calibrated_10 = rate_at(&rows, NoiseModelKind::Calibrated, 10.0);
    assert!(trusted_10 > 0.0 && untrusted_10 > 0.0 && calibrated_10 > 0.0);

    let cut_t = cutoff_km(&rows, NoiseModelKind::Trusted);
    let cut_u = cutoff_km(&rows, NoiseModelKind::Untrusted);
    let cut_c = cutoff_km(&rows, NoiseModelKind::Calibrated);
    assert!(
        cut_u < cut_c && cut_c <= cut_t,
        "cutoffs: untrusted {cut_u}, calibrated {cut_c}, trusted {cut_t}"
    );
    assert_eq!(cut_u, 21.0, "untrusted cutoff moved");

    let gap = (trusted_10 - calibrated_10) / trusted_10;
    assert!(gap < 0.15, "trusted-vs-calibrated gap {gap}");
    assert!(
        (gap - 0.023129050353943465).abs() <= 1e-6,
        "gap regression: {gap}"
    );
    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(60), "criterion 5");
    println!(
        "PASS criterion 5: fig5 positive at 10 km for all models; cutoffs {cut_u} < {cut_c} <= {cut_t} km; calibration gap {gap:.6} < 0.15 [{elapsed:?}]"
    );
}

#[test]
fn criterion_06_oracle_equivalence() {
    let start = Instant::now();
    let text = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/oracle_points.csv"),
    )
    .unwrap();
    let mut checked = 0;
    let mut worst = 0.0_f64;
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let model: NoiseModelKind = f[0].parse().unwrap();
        let get = |i: usize| f[i].parse::<f64>().unwrap();
        let params = SystemParams {
            protocol: ProtocolParams::new(get(3), get(4)).unwrap(),
            prep: AlicePrepNoise::new(get(7), get(8)).unwrap(),
            detector: DetectorParams::new(get(5), get(6)).unwrap(),
            channel: ChannelParams::new(get(1), get(2)).unwrap(),
        };
        let res = key_rate(&params, model).unwrap();
        for (ours, reference, name) in [
            (res.i_ab, get(9), "i_ab"),
            (res.chi_be, get(10), "chi_be"),
            (res.rate_raw, get(11), "rate_raw"),
        ] {
            let rel = (ours - reference).abs() / reference.abs();
            assert!(rel <= 1e-9, "{name} off by {rel} on line: {line}");
            worst = worst.max(rel);
        }
        checked += 1;
    }
    assert_eq!(checked, 20);
    let elapsed = start.elapsed();
    println!(
        "PASS criterion 6: 20 oracle points match i_ab, chi_be, rate_raw within 1e-9 relative (worst {worst:.3e}) [{elapsed:?}]"
    );
}

#[test]
fn criterion_07_monte_carlo_mi_validation() {
    let start = Instant::now();
    let points: [(f64, f64, u64); 10] = [
        (0.5, 0.1, 1),
        (1.0, 0.5, 2),
        (2.0, 1.0, 7),
        (4.0, 2.0, 4),
        (8.0, 3.0, 5),
        (16.0, 0.05, 6),
        (2.0, 1.5, 3),
        (3.0, 0.3, 8),
        (5.0, 2.5, 9),
        (10.0, 0.7, 10),
    ];
    let mut worst = 0.0_f64;
    for &(va, xi_tot, seed) in &points {
        let analytic = mutual_information(va + 1.0, xi_tot).unwrap();
        let batch = simulate_batch_raw(va, xi_tot, 1_000_000, seed).unwrap();
        let est = estimate_mi(&batch).unwrap();
        let rel = (est.mi_bits - analytic).abs() / analytic;
        assert!(rel < 0.01, "rel error {rel} at va={va} xi_tot={xi_tot} seed={seed}");
        worst = worst.max(rel);
    }
    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(30), "criterion 7");
    println!(
        "PASS criterion 7: Monte Carlo MI within 1% of the closed form at 10 points, n=1e6 (worst {worst:.3e}) [{elapsed:?}]"
    );
}

fn synth(n: usize, phi: f64, qcnr_db: f64, seed: u64) -> SampleTrace {
    synthesize_trace(&SynthSpec {
        n,
        sigma_e2: 1.0,
        phi,
        qcnr_db,
        quantize: None,
        seed,
        meta: TraceMeta::default(),
    })
    .unwrap()
}

#[test]
fn criterion_08_trace_round_trip_recovers_qcnr_and_r1() {
    let start = Instant::now();
    let n = 5_000_000;
    let mixed = synth(n, 0.3, 5.5, 42);
    let dark = synth(n, 0.3, f64::NEG_INFINITY, 42);

    let stats = variance_decompose(&mixed, &dark).unwrap();
    let qcnr_err = (stats.qcnr_db - 5.5).abs();
    assert!(qcnr_err < 0.1, "recovered QCNR {} dB", stats.qcnr_db);

    let expected_r1 = expected_lag1_autocorr(0.3, 5.5);
    let ac = autocorrelation(&mixed, 100).unwrap();
    let r1_err = (ac.r[1] - expected_r1).abs();
    assert!(r1_err <= 0.005, "r(1) = {} vs analytic {expected_r1}", ac.r[1]);

    let white = synth(n, 0.0, f64::NEG_INFINITY, 43);
    let wc = autocorrelation(&white, 100).unwrap();
    let max_abs = wc.r[1..].iter().fold(0.0_f64, |a, r| a.max(r.abs()));
    assert!(max_abs < 0.0022, "white-trace max |r(k)| = {max_abs}");

    let elapsed = start.elapsed();
    assert_runtime(elapsed, Duration::from_secs(30), "criterion 8");
    println!(
        "PASS criterion 8: QCNR recovered to {qcnr_err:.4} dB, r(1) to {r1_err:.5}, white max |r| {max_abs:.5} < 0.0022 [{elapsed:?}]"
    );
}

#[test]
fn criterion_09_autocorrelation_contrast() {
    let start = Instant::now();
    let n = 1_000_000;
    let mut min_ratio = f64::INFINITY;
    for seed in [11, 12, 13] {
        let dark = synth(n, 0.3, f64::NEG_INFINITY, seed);
        let mixed = synth(n, 0.3, 5.5, seed);
        let r1_dark = autocorrelation(&dark, 1).unwrap().r[1];
        let r1_mixed = autocorrelation(&mixed, 1).unwrap().r[1];
        let ratio = r1_dark / r1_mixed;
        assert!(
            ratio >= 3.0,
            "contrast {ratio} at seed {seed} (dark {r1_dark}, mixed {r1_mixed})"
        );
        min_ratio = min_ratio.min(ratio);
    }
    let elapsed = start.elapsed();
    println!(
        "PASS criterion 9: dark r(1) >= 3x mixed r(1) at QCNR 5.5 dB across 3 seeds (min ratio {min_ratio:.2}) [{elapsed:?}]"
    );
}

fn run_binary(args: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cvqkd"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "cvqkd {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    (out.stdout, out.stderr)
}

#[test]
fn criterion_10_byte_identical_reruns() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    for cfg in ["fig5.cfg", "fig6.cfg"] {
        let path = config_path(cfg);
        let args = ["sweep", "--config", path.to_str().unwrap()];
        let first = run_binary(&args);
        let second = run_binary(&args);
        assert_eq!(first, second, "{cfg} sweep output drifted between runs");
    }

    let mut synth_outputs = Vec::new();
    for pass in 0..2 {
        let path = dir.path().join(format!("synth_{pass}.trace"));
        run_binary(&[
            "synth", "--n", "100000", "--phi", "0.3", "--qcnr", "5.5", "--seed", "21",
            "--quantize-bits", "12", "--full-scale", "12", "--output", path.to_str().unwrap(),
        ]);
        synth_outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(synth_outputs[0], synth_outputs[1], "synth trace bytes drifted");

    let mc_args = ["mc-validate", "--va", "2", "--xi-tot", "1", "--n", "200000", "--seed", "7"];
    assert_eq!(run_binary(&mc_args), run_binary(&mc_args), "mc-validate drifted");

    let trace = dir.path().join("synth_0.trace");
    let analyze_args = [
        "analyze", "--signal", trace.to_str().unwrap(), "--dark", trace.to_str().unwrap(),
        "--format", "json",
    ];
    assert_eq!(run_binary(&analyze_args), run_binary(&analyze_args), "analyze drifted");

    let elapsed = start.elapsed();
    println!(
        "PASS criterion 10: fig5/fig6 sweeps, seeded synth, mc-validate, and analyze are byte-identical across reruns [{elapsed:?}]"
    );
}
