//! Homodyne trace analysis: variance decomposition against a dark trace,
//! quantum-to-classical noise ratio (QCNR), autocorrelation, histogramming,
//! and variance-versus-LO-power linearity.
//!
//! The working assumption throughout is additivity of the electronic and
//! quantum noise powers: a signal trace has total variance
//! `sigma_t2 = sigma_e2 + sigma_q2`, where `sigma_e2` is measured from a dark
//! trace (local oscillator off) and the quantum part is whatever remains.
//! `QCNR = 10 log10(sigma_q2 / sigma_e2)` in dB, `-inf` when no quantum
//! excess is resolved.

mod file;
mod synth;

pub use file::{decode_trace, encode_trace, read_trace, write_trace, TraceFileFormat};
pub use synth::{expected_lag1_autocorr, synthesize_trace, Quantization, SynthSpec};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Acquisition metadata carried alongside the samples.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TraceMeta {
    pub sampling_rate_hz: f64,
    pub lo_power_mw: f64,
    pub gain_v_per_a: f64,
    pub bandwidth_hz: f64,
    pub label: String,
}

/// A finite homodyne sample record with at least two samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleTrace {
    samples: Vec<f64>,
    meta: TraceMeta,
}

impl SampleTrace {
    pub fn new(samples: Vec<f64>, meta: TraceMeta) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(format!(
                "a trace needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(pos) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Domain(format!(
                "sample {pos} is not finite: {}",
                samples[pos]
            )));
        }
        Ok(Self { samples, meta })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn meta(&self) -> &TraceMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Single-pass running mean and central second moment (Welford update).
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningMoments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningMoments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn from_samples(xs: &[f64]) -> Self {
        let mut m = Self::default();
        for &x in xs {
            m.push(x);
        }
        m
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (`n - 1` denominator).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n - 1) as f64
    }

    /// Maximum-likelihood variance (`n` denominator).
    pub fn variance_mle(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.m2 / self.n as f64
    }
}

/// Variance decomposition of a signal trace against a dark trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStats {
    pub n: usize,
    pub mean: f64,
    pub sigma_t2: f64,
    pub sigma_e2: f64,
    pub sigma_q2: f64,
    #[serde(serialize_with = "serialize_maybe_infinite")]
    pub qcnr_db: f64,
    /// Set when the dark trace out-varies the signal trace (`sigma_q2 < 0`),
    /// which usually means gain or offset drift between acquisitions.
    pub drift_warning: bool,
}

pub(crate) fn serialize_maybe_infinite<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("inf")
    }
}

/// Splits the signal trace's variance into electronic and quantum parts using
/// the dark trace as the electronic reference.
pub fn variance_decompose(signal: &SampleTrace, dark: &SampleTrace) -> Result<TraceStats> {
    let sig = RunningMoments::from_samples(signal.samples());
    let drk = RunningMoments::from_samples(dark.samples());
    let sigma_e2 = drk.variance();
    if sigma_e2 == 0.0 {
        return Err(Error::DegenerateData(
            "dark trace has zero variance; QCNR undefined".into(),
        ));
    }
    let sigma_t2 = sig.variance();
    let sigma_q2 = sigma_t2 - sigma_e2;
    let qcnr_db = if sigma_q2 > 0.0 {
        10.0 * (sigma_q2 / sigma_e2).log10()
    } else {
        f64::NEG_INFINITY
    };
    Ok(TraceStats {
        n: signal.len(),
        mean: sig.mean(),
        sigma_t2,
        sigma_e2,
        sigma_q2,
        qcnr_db,
        drift_warning: sigma_q2 < 0.0,
    })
}

/// Normalized autocorrelation out to `max_lag`, plus the white-noise
/// significance band `1/sqrt(n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Autocorrelation {
    /// `r[k]` for lags `0..=max_lag`; `r[0] = 1`.
    pub r: Vec<f64>,
    pub white_noise_band: f64,
}

/// Biased normalized autocorrelation estimate
/// `r(k) = sum_t (x_t - mean)(x_{t+k} - mean) / sum_t (x_t - mean)^2`.
pub fn autocorrelation(trace: &SampleTrace, max_lag: usize) -> Result<Autocorrelation> {
    let n = trace.len();
    if max_lag == 0 || max_lag >= n / 10 {
        return Err(Error::Config(format!(
            "max_lag must satisfy 1 <= max_lag < n/10, got {max_lag} for n = {n}"
        )));
    }
    let moments = RunningMoments::from_samples(trace.samples());
    let mean = moments.mean();
    let centered: Vec<f64> = trace.samples().iter().map(|x| x - mean).collect();
    let den: f64 = centered.iter().map(|d| d * d).sum();
    if den == 0.0 {
        return Err(Error::DegenerateData(
            "trace has zero variance; autocorrelation undefined".into(),
        ));
    }
    let mut r = Vec::with_capacity(max_lag + 1);
    r.push(1.0);
    for k in 1..=max_lag {
        let mut num = 0.0;
        for t in 0..n - k {
            num += centered[t] * centered[t + k];
        }
        r.push(num / den);
    }
    Ok(Autocorrelation {
        r,
        white_noise_band: 1.0 / (n as f64).sqrt(),
    })
}

/// Probability-normalized histogram with a maximum-likelihood Gaussian fit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_centers: Vec<f64>,
    pub counts: Vec<u64>,
    pub probabilities: Vec<f64>,
    pub fit_mean: f64,
    /// Biased (maximum-likelihood) variance of the fitted Gaussian.
    pub fit_variance: f64,
}

pub fn histogram(trace: &SampleTrace, bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::Config(format!("need at least 2 bins, got {bins}")));
    }
    let samples = trace.samples();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in samples {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if lo == hi {
        // Constant trace: give it a unit-wide window so binning stays defined.
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = samples.len() as f64;
    let probabilities = counts.iter().map(|&c| c as f64 / n).collect();
    let bin_centers = (0..bins)
        .map(|i| lo + (i as f64 + 0.5) * width)
        .collect();
    let moments = RunningMoments::from_samples(samples);
    Ok(Histogram {
        bin_centers,
        counts,
        probabilities,
        fit_mean: moments.mean(),
        fit_variance: moments.variance_mle(),
    })
}

/// One point of a variance-versus-LO-power scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariancePowerPoint {
    pub lo_power_mw: f64,
    pub sigma_t2: f64,
    pub sigma_q2: f64,
    #[serde(serialize_with = "serialize_maybe_infinite")]
    pub qcnr_db: f64,
    pub label: String,
}

/// Least-squares line through `(lo_power_mw, sigma_t2)` across a power scan.
///
/// A shot-noise-limited receiver is linear here: the intercept is the
/// electronic variance and the slope the quantum variance per mW.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariancePowerScan {
    pub points: Vec<VariancePowerPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Decomposes each signal trace against the dark trace and fits total
/// variance against LO power. The dark trace supplies the zero-power point;
/// at least three distinct powers are required.
pub fn variance_vs_power(signals: &[SampleTrace], dark: &SampleTrace) -> Result<VariancePowerScan> {
    let dark_moments = RunningMoments::from_samples(dark.samples());
    let sigma_e2 = dark_moments.variance();
    if sigma_e2 == 0.0 {
        return Err(Error::DegenerateData(
            "dark trace has zero variance; QCNR undefined".into(),
        ));
    }
    let mut points = vec![VariancePowerPoint {
        lo_power_mw: 0.0,
        sigma_t2: sigma_e2,
        sigma_q2: 0.0,
        qcnr_db: f64::NEG_INFINITY,
        label: dark.meta().label.clone(),
    }];
    for signal in signals {
        let stats = variance_decompose(signal, dark)?;
        points.push(VariancePowerPoint {
            lo_power_mw: signal.meta().lo_power_mw,
            sigma_t2: stats.sigma_t2,
            sigma_q2: stats.sigma_q2,
            qcnr_db: stats.qcnr_db,
            label: signal.meta().label.clone(),
        });
    }
    let mut powers: Vec<f64> = points.iter().map(|p| p.lo_power_mw).collect();
    powers.sort_by(f64::total_cmp);
    powers.dedup();
    if powers.len() < 3 {
        return Err(Error::Config(format!(
            "linearity fit needs at least 3 distinct LO powers, got {}",
            powers.len()
        )));
    }

    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.lo_power_mw).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.sigma_t2).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for p in &points {
        let dx = p.lo_power_mw - mean_x;
        sxx += dx * dx;
        sxy += dx * (p.sigma_t2 - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for p in &points {
        let resid = p.sigma_t2 - (intercept + slope * p.lo_power_mw);
        ss_res += resid * resid;
        let dy = p.sigma_t2 - mean_y;
        ss_tot += dy * dy;
    }
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(VariancePowerScan {
        points,
        slope,
        intercept,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn trace(samples: Vec<f64>) -> SampleTrace {
        SampleTrace::new(samples, TraceMeta::default()).unwrap()
    }

    fn trace_at_power(samples: Vec<f64>, lo_power_mw: f64) -> SampleTrace {
        SampleTrace::new(
            samples,
            TraceMeta {
                lo_power_mw,
                ..TraceMeta::default()
            },
        )
        .unwrap()
    }

    fn synth(sigma_e2: f64, phi: f64, qcnr_db: f64, n: usize, seed: u64) -> SampleTrace {
        synthesize_trace(&SynthSpec {
            n,
            sigma_e2,
            phi,
            qcnr_db,
            quantize: None,
            seed,
            meta: TraceMeta::default(),
        })
        .unwrap()
    }

    #[test]
    fn trace_construction_validates_samples() {
        assert!(SampleTrace::new(vec![1.0], TraceMeta::default()).is_err());
        assert!(SampleTrace::new(vec![1.0, f64::NAN], TraceMeta::default()).is_err());
        assert!(SampleTrace::new(vec![1.0, f64::INFINITY], TraceMeta::default()).is_err());
        assert!(SampleTrace::new(vec![1.0, 2.0], TraceMeta::default()).is_ok());
    }

    #[test]
    fn welford_matches_two_pass_variance() {
        let xs = [1.5, 2.5, -0.5, 4.0, 0.25];
        let m = RunningMoments::from_samples(&xs);
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert_relative_eq!(m.mean(), mean, max_relative = 1e-14);
        assert_relative_eq!(m.variance(), var, max_relative = 1e-14);
        assert_relative_eq!(m.variance_mle(), var * 4.0 / 5.0, max_relative = 1e-14);
    }

    #[test]
    fn decomposition_reference_point() {
        // Two-sample traces have exact unbiased variances 2a^2.
        let signal = trace(vec![2.5f64.sqrt(), -(2.5f64.sqrt())]); // sigma_t2 = 5
        let dark = trace(vec![0.5f64.sqrt(), -(0.5f64.sqrt())]); // sigma_e2 = 1
        let stats = variance_decompose(&signal, &dark).unwrap();
        assert_relative_eq!(stats.sigma_t2, 5.0, max_relative = 1e-12);
        assert_relative_eq!(stats.sigma_e2, 1.0, max_relative = 1e-12);
        assert_relative_eq!(stats.sigma_q2, 4.0, max_relative = 1e-12);
        assert_relative_eq!(stats.qcnr_db, 6.020599913279624, max_relative = 1e-12);
        assert!(!stats.drift_warning);
    }

    #[test]
    fn identical_signal_and_dark_give_minus_infinite_qcnr() {
        let t = trace(vec![0.3, -0.1, 0.4, 0.0]);
        let stats = variance_decompose(&t, &t).unwrap();
        assert_eq!(stats.sigma_q2, 0.0);
        assert_eq!(stats.qcnr_db, f64::NEG_INFINITY);
        assert!(!stats.drift_warning);
    }

    #[test]
    fn louder_dark_trace_raises_the_drift_warning() {
        let signal = trace(vec![0.1, -0.1, 0.1, -0.1]);
        let dark = trace(vec![1.0, -1.0, 1.0, -1.0]);
        let stats = variance_decompose(&signal, &dark).unwrap();
        assert!(stats.sigma_q2 < 0.0);
        assert_eq!(stats.qcnr_db, f64::NEG_INFINITY);
        assert!(stats.drift_warning);
    }

    #[test]
    fn constant_dark_trace_is_degenerate() {
        let signal = trace(vec![0.1, -0.1, 0.2]);
        let dark = trace(vec![0.7, 0.7, 0.7]);
        assert!(matches!(
            variance_decompose(&signal, &dark),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn qcnr_recovery_on_synthetic_traces() {
        let signal = synth(1.0, 0.3, 5.5, 200_000, 101);
        let dark = synth(1.0, 0.3, f64::NEG_INFINITY, 200_000, 102);
        let stats = variance_decompose(&signal, &dark).unwrap();
        assert!(
            (stats.qcnr_db - 5.5).abs() < 0.1,
            "recovered {} dB",
            stats.qcnr_db
        );
    }

    #[test]
    fn alternating_trace_has_exact_lag_one_autocorrelation() {
        let n = 100;
        let xs: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ac = autocorrelation(&trace(xs), 1).unwrap();
        assert_eq!(ac.r[0], 1.0);
        // For a mean-removed alternating sequence, r(1) = -(n - 1)/n.
        assert_relative_eq!(ac.r[1], -0.99, max_relative = 1e-12);
        assert_relative_eq!(ac.white_noise_band, 0.1, max_relative = 1e-15);
    }

    #[test]
    fn autocorrelation_validates_lag_range() {
        let t = trace((0..100).map(|i| i as f64).collect());
        assert!(matches!(autocorrelation(&t, 0), Err(Error::Config(_))));
        assert!(matches!(autocorrelation(&t, 10), Err(Error::Config(_))));
        assert!(autocorrelation(&t, 9).is_ok());
    }

    #[test]
    fn constant_trace_autocorrelation_is_degenerate() {
        let t = trace(vec![1.0; 100]);
        assert!(matches!(
            autocorrelation(&t, 5),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn histogram_probabilities_sum_to_one() {
        let t = synth(1.0, 0.0, f64::NEG_INFINITY, 100_000, 5);
        let h = histogram(&t, 137).unwrap();
        let total: f64 = h.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "sum = {total}");
        assert_eq!(h.counts.iter().sum::<u64>(), 100_000);
    }

    #[test]
    fn histogram_fit_recovers_a_standard_normal() {
        let t = synth(1.0, 0.0, f64::NEG_INFINITY, 5_000_000, 17);
        let h = histogram(&t, 200).unwrap();
        assert!(h.fit_mean.abs() < 0.002, "fit mean = {}", h.fit_mean);
        assert!(
            (h.fit_variance - 1.0).abs() < 0.005,
            "fit variance = {}",
            h.fit_variance
        );
    }

    #[test]
    fn histogram_handles_constant_traces() {
        let t = trace(vec![0.7; 50]);
        let h = histogram(&t, 10).unwrap();
        assert_eq!(h.counts.iter().sum::<u64>(), 50);
        assert_eq!(h.fit_variance, 0.0);
        let total: f64 = h.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_rejects_too_few_bins() {
        let t = trace(vec![0.0, 1.0, 2.0]);
        assert!(matches!(histogram(&t, 1), Err(Error::Config(_))));
    }

    #[test]
    fn linearity_fit_recovers_slope_and_intercept() {
        let n = 1_000_000;
        let dark = synth(1.0, 0.0, f64::NEG_INFINITY, n, 201);
        // sigma_q2 = 0.5 mW^-1 * power, i.e. QCNR = 10 log10(0.5 P).
        let signals: Vec<SampleTrace> = [(1.0f64, 202u64), (2.0, 203), (4.0, 204)]
            .iter()
            .map(|&(p, seed)| {
                let spec = SynthSpec {
                    n,
                    sigma_e2: 1.0,
                    phi: 0.0,
                    qcnr_db: 10.0 * (0.5 * p).log10(),
                    quantize: None,
                    seed,
                    meta: TraceMeta {
                        lo_power_mw: p,
                        ..TraceMeta::default()
                    },
                };
                synthesize_trace(&spec).unwrap()
            })
            .collect();
        let scan = variance_vs_power(&signals, &dark).unwrap();
        assert_eq!(scan.points.len(), 4);
        assert_eq!(scan.points[0].lo_power_mw, 0.0);
        assert!(
            (scan.slope - 0.5).abs() < 0.005,
            "slope = {}",
            scan.slope
        );
        assert!(
            (scan.intercept - 1.0).abs() < 0.01,
            "intercept = {}",
            scan.intercept
        );
        assert!(scan.r_squared > 0.9999, "r^2 = {}", scan.r_squared);
    }

    #[test]
    fn linearity_fit_needs_three_distinct_powers() {
        let dark = synth(1.0, 0.0, f64::NEG_INFINITY, 1000, 1);
        let s1 = trace_at_power(synth(1.0, 0.0, 3.0, 1000, 2).samples().to_vec(), 2.0);
        let s2 = trace_at_power(synth(1.0, 0.0, 3.0, 1000, 3).samples().to_vec(), 2.0);
        assert!(matches!(
            variance_vs_power(&[s1, s2], &dark),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn qcnr_serializes_negative_infinity_as_a_string() {
        let t = trace(vec![0.3, -0.1, 0.4, 0.0]);
        let stats = variance_decompose(&t, &t).unwrap();
        let json = serde_json::to_string(&stats).unwrap();
        assert!(json.contains("\"qcnr_db\":\"-inf\""), "json = {json}");
    }
}
