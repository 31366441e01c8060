//! Modulation-variance optimization and distance sweeps.
//!
//! The rate surface along `v_a` is smooth but not concave over the full
//! admissible bracket, so the optimizer scans a logarithmic coarse grid first
//! and only then runs golden-section refinement inside the best cell. The
//! running best is tracked across every evaluation (grid points, bracket
//! endpoints, refinement probes), so the reported optimum can never fall
//! below the best coarse-grid candidate and a maximizer sitting on the
//! bracket edge is returned exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::keyrate::{key_rate, KeyRateResult, ProtocolParams, SystemParams};
use crate::math::ChannelParams;
use crate::noise::{AlicePrepNoise, DetectorParams, NoiseModelKind};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Coarse-grid and refinement controls for [`optimize_va`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerSettings {
    /// Bracket `[v_min, v_max]` searched for the optimal modulation variance.
    pub v_min: f64,
    pub v_max: f64,
    /// Number of logarithmically spaced coarse-grid points, at least 16.
    pub grid_points: usize,
    /// Golden-section iteration cap inside the best grid cell.
    pub refine_iters: usize,
    /// Absolute `v_a` width at which refinement stops early.
    pub va_tol: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            v_min: 0.01,
            v_max: 100.0,
            grid_points: 200,
            refine_iters: 60,
            va_tol: 1e-6,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_min > 0.0 && self.v_min.is_finite()) {
            return Err(Error::Config(format!(
                "va bracket lower edge must be > 0, got {}",
                self.v_min
            )));
        }
        if !(self.v_max > self.v_min && self.v_max.is_finite()) {
            return Err(Error::Config(format!(
                "va bracket must satisfy v_min < v_max, got [{}, {}]",
                self.v_min, self.v_max
            )));
        }
        if self.grid_points < 16 {
            return Err(Error::Config(format!(
                "coarse grid needs at least 16 points, got {}",
                self.grid_points
            )));
        }
        if self.refine_iters == 0 {
            return Err(Error::Config("refine_iters must be >= 1".into()));
        }
        if !(self.va_tol > 0.0 && self.va_tol.is_finite()) {
            return Err(Error::Config(format!(
                "va_tol must be finite and > 0, got {}",
                self.va_tol
            )));
        }
        Ok(())
    }
}

/// A key-rate point with everything fixed except the modulation variance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedParams {
    pub f_rec: f64,
    pub prep: AlicePrepNoise,
    pub detector: DetectorParams,
    pub channel: ChannelParams,
}

impl FixedParams {
    pub fn at_va(&self, v_a: f64) -> Result<SystemParams> {
        Ok(SystemParams {
            protocol: ProtocolParams::new(v_a, self.f_rec)?,
            prep: self.prep,
            detector: self.detector,
            channel: self.channel,
        })
    }
}

/// Distance sweep request: the cartesian product of `distances_km` and
/// `models`, optimizing `v_a` independently at every point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepSpec {
    pub distances_km: Vec<f64>,
    pub models: Vec<NoiseModelKind>,
    pub optimizer: OptimizerSettings,
    pub f_rec: f64,
    pub prep: AlicePrepNoise,
    pub detector: DetectorParams,
    pub attenuation_db_per_km: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.distances_km.is_empty() {
            return Err(Error::Config("distance list is empty".into()));
        }
        for pair in self.distances_km.windows(2) {
            if pair[1].partial_cmp(&pair[0]) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Config(format!(
                    "distances must be strictly increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if self.models.is_empty() {
            return Err(Error::Config("model list is empty".into()));
        }
        self.optimizer.validate()
    }

    /// Models in canonical emission order, deduplicated.
    fn canonical_models(&self) -> Vec<NoiseModelKind> {
        let mut models = self.models.clone();
        models.sort();
        models.dedup();
        models
    }
}

/// One optimized sweep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub distance_km: f64,
    pub model: NoiseModelKind,
    pub optimal_va: f64,
    /// Preparation noise at the optimal modulation variance.
    pub xi_a_at_opt: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub rate_raw: f64,
    pub rate: f64,
}

/// Maximizes `rate_raw` over the modulation variance.
///
/// Returns the maximizing `v_a` and the full result there. Ties resolve
/// toward smaller `v_a`.
pub fn optimize_va(
    fixed: &FixedParams,
    kind: NoiseModelKind,
    settings: &OptimizerSettings,
) -> Result<(f64, KeyRateResult)> {
    settings.validate()?;
    let objective = |v_a: f64| -> Result<f64> {
        Ok(key_rate(&fixed.at_va(v_a)?, kind)?.rate_raw)
    };

    let mut best = (f64::NAN, f64::NEG_INFINITY);
    let n = settings.grid_points;
    let log_lo = settings.v_min.ln();
    let log_hi = settings.v_max.ln();
    let mut best_idx = 0;
    for i in 0..n {
        let frac = i as f64 / (n - 1) as f64;
        // Pin the endpoints so a bracket-edge maximizer is reported exactly.
        let v_a = match i {
            0 => settings.v_min,
            _ if i == n - 1 => settings.v_max,
            _ => (log_lo + frac * (log_hi - log_lo)).exp(),
        };
        let value = objective(v_a)?;
        if consider(&mut best, v_a, value) {
            best_idx = i;
        }
    }

    let grid_va = |i: usize| -> f64 {
        match i {
            0 => settings.v_min,
            _ if i == n - 1 => settings.v_max,
            _ => (log_lo + (i as f64 / (n - 1) as f64) * (log_hi - log_lo)).exp(),
        }
    };
    let mut a = grid_va(best_idx.saturating_sub(1));
    let mut b = grid_va((best_idx + 1).min(n - 1));

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    consider(&mut best, x1, f1);
    consider(&mut best, x2, f2);
    for _ in 0..settings.refine_iters {
        if b - a <= settings.va_tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = objective(x1)?;
            consider(&mut best, x1, f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = objective(x2)?;
            consider(&mut best, x2, f2);
        }
    }

    let result = key_rate(&fixed.at_va(best.0)?, kind)?;
    Ok((best.0, result))
}

fn consider(best: &mut (f64, f64), v_a: f64, value: f64) -> bool {
    if value > best.1 || (value == best.1 && v_a < best.0) {
        *best = (v_a, value);
        true
    } else {
        false
    }
}

/// Runs the full sweep, emitting rows ordered by distance and then by model
/// in canonical order. Points are evaluated in parallel; output order does
/// not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let models = spec.canonical_models();
    let jobs: Vec<(f64, NoiseModelKind)> = spec
        .distances_km
        .iter()
        .flat_map(|&d| models.iter().map(move |&m| (d, m)))
        .collect();

    jobs.par_iter()
        .map(|&(distance_km, model)| {
            let fixed = FixedParams {
                f_rec: spec.f_rec,
                prep: spec.prep,
                detector: spec.detector,
                channel: ChannelParams::new(distance_km, spec.attenuation_db_per_km)?,
            };
            let (optimal_va, res) =
                optimize_va(&fixed, model, &spec.optimizer).map_err(|e| Error::SweepPoint {
                    distance_km,
                    model,
                    source: Box::new(e),
                })?;
            Ok(SweepRow {
                distance_km,
                model,
                optimal_va,
                xi_a_at_opt: spec.prep.xi_a(optimal_va),
                i_ab: res.i_ab,
                chi_be: res.chi_be,
                rate_raw: res.rate_raw,
                rate: res.rate,
            })
        })
        .collect()
}
