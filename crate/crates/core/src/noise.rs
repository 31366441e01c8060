//! Noise accounting for a homodyne receiver behind a lossy fiber channel.
//!
//! Every variance is in shot-noise units referred to the channel input. The
//! total excess noise seen by Bob splits into a channel part and a detection
//! part, `xi_tot = xi_ch + xi_det / T`, and the three detector-noise models
//! differ only in which side of that split the detector's electronic noise
//! `nu_b` lands on — and in which values Eve's bound is allowed to see:
//!
//! * `trusted`: electronic noise stays on the detector side and is excluded
//!   from Eve's power; Eve sees the physical budget.
//! * `untrusted`: electronic noise is pushed into the channel and granted to
//!   Eve in full.
//! * `calibrated`: the physical budget matches `trusted`, but Eve's bound is
//!   evaluated with the electronic-noise-free detector, crediting Eve with
//!   nothing from `nu_b` while still paying its cost in mutual information.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// How detector electronic noise is attributed when bounding Eve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModelKind {
    Trusted,
    Untrusted,
    Calibrated,
}

impl NoiseModelKind {
    /// All models in canonical order (the order sweeps emit them).
    pub const ALL: [NoiseModelKind; 3] = [
        NoiseModelKind::Trusted,
        NoiseModelKind::Untrusted,
        NoiseModelKind::Calibrated,
    ];
}

impl fmt::Display for NoiseModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseModelKind::Trusted => "trusted",
            NoiseModelKind::Untrusted => "untrusted",
            NoiseModelKind::Calibrated => "calibrated",
        })
    }
}

impl FromStr for NoiseModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "trusted" => Ok(NoiseModelKind::Trusted),
            "untrusted" => Ok(NoiseModelKind::Untrusted),
            "calibrated" => Ok(NoiseModelKind::Calibrated),
            other => Err(Error::Config(format!(
                "unknown noise model '{other}' (expected trusted, untrusted, or calibrated)"
            ))),
        }
    }
}

/// Homodyne detector: efficiency `eta_b` in `(0, 1]` and electronic noise
/// `nu_b >= 0` in SNU.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectorParams {
    pub eta_b: f64,
    pub nu_b: f64,
}

impl DetectorParams {
    pub fn new(eta_b: f64, nu_b: f64) -> Result<Self> {
        if !(eta_b > 0.0 && eta_b <= 1.0) {
            return Err(Error::Domain(format!(
                "detector efficiency must be in (0, 1], got {eta_b}"
            )));
        }
        if !nu_b.is_finite() || nu_b < 0.0 {
            return Err(Error::Domain(format!(
                "electronic noise must be finite and >= 0 SNU, got {nu_b}"
            )));
        }
        Ok(Self { eta_b, nu_b })
    }
}

/// Alice's preparation noise, linear in her modulation variance:
/// `xi_a(v_a) = xi_const + xi_slope * v_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlicePrepNoise {
    pub xi_const: f64,
    pub xi_slope: f64,
}

impl AlicePrepNoise {
    pub fn new(xi_const: f64, xi_slope: f64) -> Result<Self> {
        if !xi_const.is_finite() || xi_const < 0.0 {
            return Err(Error::Domain(format!(
                "xi_const must be finite and >= 0, got {xi_const}"
            )));
        }
        if !xi_slope.is_finite() || xi_slope < 0.0 {
            return Err(Error::Domain(format!(
                "xi_slope must be finite and >= 0, got {xi_slope}"
            )));
        }
        Ok(Self { xi_const, xi_slope })
    }

    /// Preparation excess noise at modulation variance `v_a`.
    pub fn xi_a(&self, v_a: f64) -> f64 {
        self.xi_const + self.xi_slope * v_a
    }
}

/// Channel-input-referred noise variances for one (model, channel, detector)
/// combination.
///
/// `xi_tot = xi_ch + xi_det / T` always holds for the physical fields. The
/// `_eve` fields are the values substituted into Eve's Holevo bound; they
/// equal the physical ones except under `calibrated`, where the detector is
/// replaced by its electronic-noise-free counterpart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub xi_ch: f64,
    pub xi_det: f64,
    pub xi_tot: f64,
    pub xi_det_eve: f64,
    pub xi_tot_eve: f64,
}

/// Channel excess noise with electronic noise kept on the detector side:
/// `(1 - T)/T + xi_a`.
pub fn channel_noise_trusted(t: f64, xi_a: f64) -> Result<f64> {
    check_t(t)?;
    if !xi_a.is_finite() || xi_a < 0.0 {
        return Err(Error::Domain(format!(
            "preparation noise must be finite and >= 0 SNU, got {xi_a}"
        )));
    }
    Ok((1.0 - t) / t + xi_a)
}

/// Detection noise including electronic noise: `(1 + (1 - eta_b) + 2 nu_b) / eta_b`.
pub fn detection_noise_trusted(det: &DetectorParams) -> f64 {
    (1.0 + (1.0 - det.eta_b) + 2.0 * det.nu_b) / det.eta_b
}

/// Detection noise of the electronic-noise-free detector: `(1 + (1 - eta_b)) / eta_b`.
pub fn detection_noise_lossy(det: &DetectorParams) -> f64 {
    (1.0 + (1.0 - det.eta_b)) / det.eta_b
}

/// Assembles the full noise budget for `kind` at transmittance `t`.
pub fn budget(kind: NoiseModelKind, t: f64, xi_a: f64, det: &DetectorParams) -> Result<NoiseBudget> {
    let xi_ch_trusted = channel_noise_trusted(t, xi_a)?;
    match kind {
        NoiseModelKind::Trusted => {
            let xi_det = detection_noise_trusted(det);
            let xi_tot = xi_ch_trusted + xi_det / t;
            Ok(NoiseBudget {
                xi_ch: xi_ch_trusted,
                xi_det,
                xi_tot,
                xi_det_eve: xi_det,
                xi_tot_eve: xi_tot,
            })
        }
        NoiseModelKind::Untrusted => {
            let xi_ch = xi_ch_trusted + 2.0 * det.nu_b / (t * det.eta_b);
            let xi_det = detection_noise_lossy(det);
            let xi_tot = xi_ch + xi_det / t;
            Ok(NoiseBudget {
                xi_ch,
                xi_det,
                xi_tot,
                xi_det_eve: xi_det,
                xi_tot_eve: xi_tot,
            })
        }
        NoiseModelKind::Calibrated => {
            let xi_det = detection_noise_trusted(det);
            let xi_det_eve = detection_noise_lossy(det);
            Ok(NoiseBudget {
                xi_ch: xi_ch_trusted,
                xi_det,
                xi_tot: xi_ch_trusted + xi_det / t,
                xi_det_eve,
                xi_tot_eve: xi_ch_trusted + xi_det_eve / t,
            })
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!(
            "transmittance must be in (0, 1], got {t}"
        )));
    }
    Ok(())
}
