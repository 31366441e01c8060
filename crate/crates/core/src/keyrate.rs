//! Asymptotic secret-key rate against collective attacks, `R = f I_AB - chi_BE`,
//! for reverse-reconciled GMCS protocols with homodyne detection.
//!
//! Conventions: Alice modulates with variance `v_a` so the thermal-state
//! variance entering the covariance matrix is `V = v_a + 1`; both quadratures
//! are modulated and measured, so the mutual information carries a factor of
//! two relative to the single-quadrature formula. Eve's information is the
//! Holevo bound evaluated from the symplectic spectrum of the shared state
//! before and after Bob's measurement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::math::{g_entropy, ChannelParams, EPS_CLAMP};
use crate::noise::{budget, AlicePrepNoise, DetectorParams, NoiseBudget, NoiseModelKind};

/// Protocol-level knobs: modulation variance and reconciliation efficiency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub v_a: f64,
    pub f_rec: f64,
}

impl ProtocolParams {
    pub fn new(v_a: f64, f_rec: f64) -> Result<Self> {
        if !v_a.is_finite() || v_a <= 0.0 {
            return Err(Error::Domain(format!(
                "modulation variance must be finite and > 0 SNU, got {v_a}"
            )));
        }
        if !(f_rec > 0.0 && f_rec <= 1.0) {
            return Err(Error::Domain(format!(
                "reconciliation efficiency must be in (0, 1], got {f_rec}"
            )));
        }
        Ok(Self { v_a, f_rec })
    }

    /// Thermal-state variance `V = v_a + 1`.
    pub fn v(&self) -> f64 {
        self.v_a + 1.0
    }
}

/// Everything needed to evaluate one key-rate point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SystemParams {
    pub protocol: ProtocolParams,
    pub prep: AlicePrepNoise,
    pub detector: DetectorParams,
    pub channel: ChannelParams,
}

impl SystemParams {
    /// Preparation noise at the configured modulation variance.
    pub fn xi_a(&self) -> f64 {
        self.prep.xi_a(self.protocol.v_a)
    }

    /// Same system with the modulation variance replaced.
    pub fn with_v_a(&self, v_a: f64) -> Result<Self> {
        Ok(Self {
            protocol: ProtocolParams::new(v_a, self.protocol.f_rec)?,
            ..*self
        })
    }
}

/// Covariance invariants and symplectic spectrum behind a Holevo bound.
///
/// `lambda[4]` is the post-measurement eigenvalue, identically 1 for homodyne
/// detection. `clamped` records whether any eigenvalue sat within `EPS_CLAMP`
/// below its physical limit and was clamped rather than rejected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HolevoIntermediates {
    pub a_val: f64,
    pub b_val: f64,
    pub c_val: f64,
    pub d_val: f64,
    pub lambda: [f64; 5],
    pub clamped: bool,
}

/// One evaluated key-rate point, with the full audit trail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KeyRateResult {
    pub i_ab: f64,
    pub chi_be: f64,
    pub rate_raw: f64,
    pub rate: f64,
    pub budget: NoiseBudget,
    pub intermediates: HolevoIntermediates,
}

/// Mutual information between Alice and Bob in bits per symbol,
/// `I_AB = log2((V + xi_tot) / (1 + xi_tot))`, both quadratures combined.
pub fn mutual_information(v: f64, xi_tot: f64) -> Result<f64> {
    if !v.is_finite() || v < 1.0 {
        return Err(Error::Domain(format!(
            "thermal-state variance must be finite and >= 1 SNU, got {v}"
        )));
    }
    if !xi_tot.is_finite() || xi_tot < 0.0 {
        return Err(Error::Domain(format!(
            "total noise must be finite and >= 0 SNU, got {xi_tot}"
        )));
    }
    Ok(((v + xi_tot) / (1.0 + xi_tot)).log2())
}

/// Holevo bound `chi_BE` on Eve's information for reverse reconciliation.
///
/// `bud` supplies the channel noise and the detector values Eve's bound is
/// evaluated with (`xi_det_eve`, `xi_tot_eve`); the covariance invariants are
/// evaluated in the grouping below without algebraic simplification:
///
/// ```text
/// A = V^2 (1 - 2T) + 2T + T^2 (V + xi_ch)^2
/// B = T^2 (V xi_ch + 1)^2
/// C = [A xi_det^2 + B + 1 + 2 xi_det (V sqrt(B) + T (V + xi_ch)) + 2T (V^2 - 1)]
///     / (T (V + xi_tot))^2
/// D = ((V + sqrt(B) xi_det) / (T (V + xi_tot)))^2
/// ```
pub fn holevo_bound(v: f64, t: f64, bud: &NoiseBudget) -> Result<(f64, HolevoIntermediates)> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!(
            "transmittance must be in (0, 1], got {t}"
        )));
    }
    if !v.is_finite() || v < 1.0 {
        return Err(Error::Domain(format!(
            "thermal-state variance must be finite and >= 1 SNU, got {v}"
        )));
    }

    let xi_ch = bud.xi_ch;
    let xi_det = bud.xi_det_eve;
    let xi_tot = bud.xi_tot_eve;

    let a_val = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + xi_ch) * (v + xi_ch);
    let b_val = t * t * (v * xi_ch + 1.0) * (v * xi_ch + 1.0);
    let denom = t * (v + xi_tot);
    let c_val = (a_val * xi_det * xi_det
        + b_val
        + 1.0
        + 2.0 * xi_det * (v * b_val.sqrt() + t * (v + xi_ch))
        + 2.0 * t * (v * v - 1.0))
        / (denom * denom);
    let d_val = ((v + b_val.sqrt() * xi_det) / denom) * ((v + b_val.sqrt() * xi_det) / denom);

    let mut inter = HolevoIntermediates {
        a_val,
        b_val,
        c_val,
        d_val,
        lambda: [f64::NAN, f64::NAN, f64::NAN, f64::NAN, 1.0],
        clamped: false,
    };

    let (l1, l2) = symplectic_pair(a_val, b_val, &mut inter, "A^2 - 4B")?;
    inter.lambda[0] = l1;
    inter.lambda[1] = l2;
    let (l3, l4) = symplectic_pair(c_val, d_val, &mut inter, "C^2 - 4D")?;
    inter.lambda[2] = l3;
    inter.lambda[3] = l4;

    let mut chi = 0.0;
    for (i, sign) in [(0, 1.0), (1, 1.0), (2, -1.0), (3, -1.0)] {
        let lam = inter.lambda[i];
        if lam < 1.0 - LAMBDA_CLAMP {
            return Err(unphysical(
                format!("symplectic eigenvalue lambda{} = {lam} below 1", i + 1),
                inter,
            ));
        }
        if lam <= 1.0 + LAMBDA_CLAMP {
            if lam != 1.0 {
                inter.clamped = true;
            }
            continue;
        }
        chi += sign * g_entropy((lam - 1.0) / 2.0)?;
    }

    Ok((chi, inter))
}

/// Window around 1 within which an eigenvalue is treated as exactly 1 (so it
/// contributes no entropy); anything further below 1 is unphysical.
///
/// Wider than [`EPS_CLAMP`] because the square root in the eigenvalue solve
/// amplifies discriminant roundoff to O(sqrt(machine epsilon)): a degenerate
/// pair (perfect channel, zero modulation) lands up to ~1e-8 on either side
/// of 1 in f64, and treating only the low side would leave a spurious
/// negative entropy residue from its partner. Genuine deviations from 1 sit
/// orders of magnitude outside the window.
const LAMBDA_CLAMP: f64 = 1e-6;

/// Solves `lambda^4 - s lambda^2 + p = 0` for the eigenvalue pair
/// `lambda_± = sqrt((s ± sqrt(s^2 - 4p)) / 2)`, clamping discriminants within
/// `EPS_CLAMP` (relative) of zero and rejecting anything more negative.
fn symplectic_pair(
    s: f64,
    p: f64,
    inter: &mut HolevoIntermediates,
    label: &str,
) -> Result<(f64, f64)> {
    let disc = s * s - 4.0 * p;
    let tol = EPS_CLAMP * (s * s).max(1.0);
    if disc < -tol {
        return Err(unphysical(
            format!("discriminant {label} = {disc} is negative beyond tolerance"),
            *inter,
        ));
    }
    if disc < 0.0 {
        inter.clamped = true;
    }
    let root = disc.max(0.0).sqrt();
    let tol_sq = EPS_CLAMP * s.abs().max(1.0);
    let mut pair = [0.0; 2];
    for (slot, signed) in pair.iter_mut().zip([(s + root) / 2.0, (s - root) / 2.0]) {
        if signed < -tol_sq {
            return Err(unphysical(
                format!("squared eigenvalue {signed} from {label} is negative beyond tolerance"),
                *inter,
            ));
        }
        if signed < 0.0 {
            inter.clamped = true;
        }
        *slot = signed.max(0.0).sqrt();
    }
    Ok((pair[0], pair[1]))
}

fn unphysical(message: String, intermediates: HolevoIntermediates) -> Error {
    Error::Unphysical {
        message,
        intermediates: Box::new(intermediates),
    }
}

/// Evaluates one key-rate point under the given detector-noise model.
///
/// `rate_raw = f I_AB - chi_BE` may be negative; `rate` clamps it at zero.
pub fn key_rate(params: &SystemParams, kind: NoiseModelKind) -> Result<KeyRateResult> {
    let t = params.channel.transmittance();
    let bud = budget(kind, t, params.xi_a(), &params.detector)?;
    let v = params.protocol.v();
    let i_ab = mutual_information(v, bud.xi_tot)?;
    let (chi_be, intermediates) = holevo_bound(v, t, &bud)?;
    let rate_raw = params.protocol.f_rec * i_ab - chi_be;
    Ok(KeyRateResult {
        i_ab,
        chi_be,
        rate_raw,
        rate: rate_raw.max(0.0),
        budget: bud,
        intermediates,
    })
}
