use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cvqkd_core::{
    autocorrelation, estimate_mi, histogram, simulate_batch_raw, synthesize_trace,
    variance_decompose, SampleTrace, SynthSpec, TraceMeta,
};

const N: usize = 1_000_000;

fn mixed_trace(seed: u64, qcnr_db: f64) -> SampleTrace {
    synthesize_trace(&SynthSpec {
        n: N,
        sigma_e2: 1.0,
        phi: 0.3,
        qcnr_db,
        quantize: None,
        seed,
        meta: TraceMeta::default(),
    })
    .unwrap()
}

fn bench_synth(c: &mut Criterion) {
    let mut group = c.benchmark_group("synth");
    group.sample_size(20);
    group.bench_function("1M samples qcnr=5.5", |b| {
        b.iter(|| mixed_trace(black_box(1), 5.5))
    });
    group.finish();
}

fn bench_autocorrelation(c: &mut Criterion) {
    let trace = mixed_trace(2, 5.5);
    let mut group = c.benchmark_group("autocorrelation");
    group.sample_size(20);
    group.bench_function("1M samples, 100 lags", |b| {
        b.iter(|| autocorrelation(black_box(&trace), 100).unwrap())
    });
    group.finish();
}

fn bench_variance_decompose(c: &mut Criterion) {
    let mixed = mixed_trace(3, 5.5);
    let dark = mixed_trace(3, f64::NEG_INFINITY);
    c.bench_function("variance_decompose 1M samples", |b| {
        b.iter(|| variance_decompose(black_box(&mixed), black_box(&dark)).unwrap())
    });
}

fn bench_histogram(c: &mut Criterion) {
    let trace = mixed_trace(4, 5.5);
    c.bench_function("histogram 1M samples, 200 bins", |b| {
        b.iter(|| histogram(black_box(&trace), 200).unwrap())
    });
}

fn bench_estimate_mi(c: &mut Criterion) {
    let batch = simulate_batch_raw(2.0, 1.0, N, 7).unwrap();
    c.bench_function("estimate_mi 1M symbols", |b| {
        b.iter(|| estimate_mi(black_box(&batch)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_synth,
    bench_autocorrelation,
    bench_variance_decompose,
    bench_histogram,
    bench_estimate_mi
);
criterion_main!(benches);
