//! Numerical primitives shared by the key-rate stack: the bosonic entropy
//! function `G`, fiber transmittance, and the shot-noise-unit convention.
//!
//! All noise variances elsewhere in this crate are expressed in shot-noise
//! units (SNU), i.e. normalized so the vacuum quadrature variance is 1.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for clamping tiny negative values produced by cancellation.
///
/// Arguments of [`g_entropy`] and discriminants in the symplectic-eigenvalue
/// solve are clamped to zero when they fall in `[-EPS_CLAMP, 0)` (relative to
/// the natural scale of the quantity); anything more negative is an error.
pub const EPS_CLAMP: f64 = 1e-9;

/// Shot-noise normalization: raw quadrature variances divide by `N0` to give
/// SNU, with the vacuum at `N0 = 1/4` in the `[x, p]` convention used here.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShotNoiseConvention;

impl ShotNoiseConvention {
    /// Vacuum quadrature variance in raw (unnormalized) units.
    pub const N0: f64 = 0.25;

    /// Converts a raw quadrature variance to shot-noise units.
    pub fn to_snu(raw_variance: f64) -> f64 {
        raw_variance / Self::N0
    }

    /// Converts a variance in shot-noise units back to raw units.
    pub fn to_raw(snu_variance: f64) -> f64 {
        snu_variance * Self::N0
    }
}

/// Fiber channel described by its length and attenuation coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelParams {
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
}

impl ChannelParams {
    pub fn new(length_km: f64, attenuation_db_per_km: f64) -> Result<Self> {
        if !length_km.is_finite() || length_km < 0.0 {
            return Err(Error::Domain(format!(
                "channel length must be finite and >= 0 km, got {length_km}"
            )));
        }
        if !attenuation_db_per_km.is_finite() || attenuation_db_per_km < 0.0 {
            return Err(Error::Domain(format!(
                "attenuation must be finite and >= 0 dB/km, got {attenuation_db_per_km}"
            )));
        }
        Ok(Self {
            length_km,
            attenuation_db_per_km,
        })
    }

    /// Power transmittance `T = 10^(-alpha L / 10)`.
    pub fn transmittance(&self) -> f64 {
        transmittance(self.length_km, self.attenuation_db_per_km)
    }
}

/// Power transmittance of `length_km` of fiber at `attenuation_db_per_km`.
pub fn transmittance(length_km: f64, attenuation_db_per_km: f64) -> f64 {
    10f64.powf(-attenuation_db_per_km * length_km / 10.0)
}

/// Von Neumann entropy of a thermal state with mean photon number `x`,
/// `G(x) = (x+1) log2(x+1) - x log2(x)`, in bits.
///
/// `G(0) = 0` by continuity. Inputs in `[-EPS_CLAMP, 0)` are treated as
/// cancellation residue and clamped to zero; anything more negative is a
/// domain error.
pub fn g_entropy(x: f64) -> Result<f64> {
    if x.is_nan() || x == f64::INFINITY {
        return Err(Error::Domain(format!("g_entropy argument must be finite, got {x}")));
    }
    if x < -EPS_CLAMP {
        return Err(Error::Domain(format!(
            "g_entropy argument must be >= -{EPS_CLAMP:e}, got {x}"
        )));
    }
    let x = x.max(0.0);
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn g_entropy_vanishes_at_zero() {
        assert_eq!(g_entropy(0.0).unwrap(), 0.0);
    }

    #[test]
    fn g_entropy_of_one_photon_is_two_bits() {
        assert_relative_eq!(g_entropy(1.0).unwrap(), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn g_entropy_reference_value() {
        assert_relative_eq!(
            g_entropy(0.5).unwrap(),
            1.3774437510817343,
            max_relative = 1e-15
        );
    }

    #[test]
    fn g_entropy_clamps_cancellation_residue() {
        assert_eq!(g_entropy(-1e-12).unwrap(), 0.0);
        assert_eq!(g_entropy(-EPS_CLAMP).unwrap(), 0.0);
    }

    #[test]
    fn g_entropy_rejects_negative_and_non_finite() {
        assert!(matches!(g_entropy(-1e-6), Err(Error::Domain(_))));
        assert!(matches!(g_entropy(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(g_entropy(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn transmittance_reference_points() {
        assert_relative_eq!(transmittance(0.0, 0.2), 1.0, max_relative = 1e-15);
        assert_relative_eq!(transmittance(50.0, 0.2), 0.1, max_relative = 1e-15);
        assert_relative_eq!(transmittance(150.0, 0.2), 1e-3, max_relative = 1e-15);
    }

    #[test]
    fn channel_params_reject_negative_inputs() {
        assert!(ChannelParams::new(-1.0, 0.2).is_err());
        assert!(ChannelParams::new(10.0, -0.2).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.2).is_err());
    }

    #[test]
    fn snu_conversion_uses_quarter_vacuum() {
        assert_eq!(ShotNoiseConvention::to_snu(0.25), 1.0);
        assert_eq!(ShotNoiseConvention::to_raw(1.0), 0.25);
    }

    proptest! {
        #[test]
        fn g_entropy_is_monotone(x in 0.0..100.0f64, dx in 1e-6..1.0f64) {
            let lo = g_entropy(x).unwrap();
            let hi = g_entropy(x + dx).unwrap();
            prop_assert!(hi >= lo);
        }

        #[test]
        fn transmittance_is_multiplicative(
            l1 in 0.0..200.0f64,
            l2 in 0.0..200.0f64,
            alpha in 0.01..1.0f64,
        ) {
            let joint = transmittance(l1 + l2, alpha);
            let split = transmittance(l1, alpha) * transmittance(l2, alpha);
            prop_assert!((joint - split).abs() <= 1e-12 * joint.max(split));
        }

        #[test]
        fn snu_round_trip(raw in 1e-12..1e12f64) {
            let back = ShotNoiseConvention::to_raw(ShotNoiseConvention::to_snu(raw));
            prop_assert!((back - raw).abs() <= 1e-15 * raw);
        }
    }
}
