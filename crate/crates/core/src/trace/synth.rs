//! Synthetic homodyne traces with a controlled electronic/quantum split.
//!
//! The electronic noise is an AR(1) process `e_t = phi e_{t-1} + w_t` with
//! stationary variance `sigma_e2` (the innovation variance is scaled to
//! `sigma_e2 (1 - phi^2)` and `e_0` is drawn from the stationary
//! distribution, so there is no warm-up transient). The quantum contribution
//! is white Gaussian noise whose variance is set by the requested QCNR:
//! `sigma_q2 = sigma_e2 * 10^(qcnr_db / 10)`, with `qcnr_db = -inf` meaning
//! a dark trace.
//!
//! Electronic and quantum samples come from separate ChaCha8 substreams of
//! the same seed, so the dark trace embedded in a mixed trace is exactly the
//! `-inf` trace of the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::trace::{SampleTrace, TraceMeta};

/// Midpoint-reconstruction uniform quantizer over `[-full_scale, full_scale]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantization {
    pub bits: u32,
    pub full_scale: f64,
}

/// Request for one synthetic trace.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    /// Stationary electronic (AR(1)) variance, > 0.
    pub sigma_e2: f64,
    /// AR(1) coefficient in `[0, 1)`.
    pub phi: f64,
    /// Quantum-to-classical noise ratio in dB; `-inf` for a dark trace.
    pub qcnr_db: f64,
    pub quantize: Option<Quantization>,
    pub seed: u64,
    pub meta: TraceMeta,
}

/// Lag-1 autocorrelation the decomposition model predicts for a mixed trace:
/// `phi / (1 + 10^(qcnr_db / 10))`. The white quantum noise contributes
/// variance to the denominator but nothing to the lag-1 covariance.
pub fn expected_lag1_autocorr(phi: f64, qcnr_db: f64) -> f64 {
    phi / (1.0 + 10f64.powf(qcnr_db / 10.0))
}

pub fn synthesize_trace(spec: &SynthSpec) -> Result<SampleTrace> {
    if spec.n < 2 {
        return Err(Error::Domain(format!(
            "a trace needs at least 2 samples, got {}",
            spec.n
        )));
    }
    if !spec.sigma_e2.is_finite() || spec.sigma_e2 <= 0.0 {
        return Err(Error::Domain(format!(
            "electronic variance must be finite and > 0, got {}",
            spec.sigma_e2
        )));
    }
    if !(spec.phi >= 0.0 && spec.phi < 1.0) {
        return Err(Error::Domain(format!(
            "AR(1) coefficient must be in [0, 1), got {}",
            spec.phi
        )));
    }
    if spec.qcnr_db.is_nan() || spec.qcnr_db == f64::INFINITY {
        return Err(Error::Domain(format!(
            "QCNR must be finite or -inf, got {}",
            spec.qcnr_db
        )));
    }
    if let Some(q) = &spec.quantize {
        if q.bits == 0 || q.bits > 32 {
            return Err(Error::Domain(format!(
                "quantizer depth must be in 1..=32 bits, got {}",
                q.bits
            )));
        }
        if !q.full_scale.is_finite() || q.full_scale <= 0.0 {
            return Err(Error::Domain(format!(
                "quantizer full scale must be finite and > 0, got {}",
                q.full_scale
            )));
        }
    }

    let sd_e = spec.sigma_e2.sqrt();
    let sd_w = (spec.sigma_e2 * (1.0 - spec.phi * spec.phi)).sqrt();
    let sd_q = if spec.qcnr_db == f64::NEG_INFINITY {
        0.0
    } else {
        (spec.sigma_e2 * 10f64.powf(spec.qcnr_db / 10.0)).sqrt()
    };

    let mut rng_e = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rng_q = ChaCha8Rng::seed_from_u64(spec.seed);
    rng_q.set_stream(1);

    let mut samples = Vec::with_capacity(spec.n);
    let mut e = sd_e * rng_e.sample::<f64, _>(StandardNormal);
    for t in 0..spec.n {
        if t > 0 {
            e = spec.phi * e + sd_w * rng_e.sample::<f64, _>(StandardNormal);
        }
        let x = if sd_q > 0.0 {
            e + sd_q * rng_q.sample::<f64, _>(StandardNormal)
        } else {
            e
        };
        samples.push(match &spec.quantize {
            Some(q) => quantize_midpoint(x, q),
            None => x,
        });
    }
    SampleTrace::new(samples, spec.meta.clone())
}

fn quantize_midpoint(x: f64, q: &Quantization) -> f64 {
    let levels = 1u64 << q.bits;
    let step = 2.0 * q.full_scale / levels as f64;
    let idx = (((x + q.full_scale) / step).floor() as i64).clamp(0, levels as i64 - 1);
    -q.full_scale + (idx as f64 + 0.5) * step
}
