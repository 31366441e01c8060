//! Sweep configuration: a flat `key = value` text file with `#` comments,
//! overridable from the command line with repeated `--set key=value` flags.
//!
//! Recognized keys:
//!
//! ```text
//! models                 comma list of trusted/untrusted/calibrated (default: all three)
//! distances_km           comma list of values and start:stop:step ranges (required)
//! attenuation_db_per_km  fiber loss coefficient        (default 0.2)
//! f                      reconciliation efficiency     (default 0.95)
//! eta_b                  detector efficiency           (default 0.5)
//! nu_b                   detector electronic noise     (default 0.01)
//! xi_const, xi_slope     preparation noise xi_a = xi_const + xi_slope * va
//!                                                      (defaults 0.01, 0.01)
//! va_min, va_max         optimizer bracket             (defaults 0.01, 100)
//! grid_points            coarse grid size              (default 200)
//! refine_iters           golden-section iteration cap  (default 60)
//! va_tol                 refinement width tolerance    (default 1e-6)
//! ```

use cvqkd_core::{AlicePrepNoise, DetectorParams, NoiseModelKind, OptimizerSettings, SweepSpec};

use crate::error::CliError;

#[derive(Clone, Debug, Default)]
pub struct SweepConfig {
    models: Option<Vec<NoiseModelKind>>,
    distances_km: Option<Vec<f64>>,
    attenuation_db_per_km: Option<f64>,
    f: Option<f64>,
    eta_b: Option<f64>,
    nu_b: Option<f64>,
    xi_const: Option<f64>,
    xi_slope: Option<f64>,
    va_min: Option<f64>,
    va_max: Option<f64>,
    grid_points: Option<usize>,
    refine_iters: Option<usize>,
    va_tol: Option<f64>,
}

impl SweepConfig {
    /// Parses a config file body. `source` names the file in error messages.
    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let origin = format!("{source}:{}", idx + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{origin}: expected 'key = value', got '{line}'"
                )));
            };
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(CliError::Usage(format!("{origin}: duplicate key '{key}'")));
            }
            seen.push(key.to_string());
            cfg.assign(key, value.trim(), &origin)?;
        }
        Ok(cfg)
    }

    /// Applies `--set key=value` overrides on top of the file values.
    pub fn apply_overrides(&mut self, sets: &[String]) -> Result<(), CliError> {
        for set in sets {
            let Some((key, value)) = set.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "--set {set}: expected key=value"
                )));
            };
            let origin = format!("--set {}", key.trim());
            self.assign(key.trim(), value.trim(), &origin)?;
        }
        Ok(())
    }

    fn assign(&mut self, key: &str, value: &str, origin: &str) -> Result<(), CliError> {
        match key {
            "models" => self.models = Some(parse_models(value, origin)?),
            "distances_km" => self.distances_km = Some(parse_distances(value, origin)?),
            "attenuation_db_per_km" => {
                self.attenuation_db_per_km = Some(parse_f64(value, origin)?)
            }
            "f" => self.f = Some(parse_f64(value, origin)?),
            "eta_b" => self.eta_b = Some(parse_f64(value, origin)?),
            "nu_b" => self.nu_b = Some(parse_f64(value, origin)?),
            "xi_const" => self.xi_const = Some(parse_f64(value, origin)?),
            "xi_slope" => self.xi_slope = Some(parse_f64(value, origin)?),
            "va_min" => self.va_min = Some(parse_f64(value, origin)?),
            "va_max" => self.va_max = Some(parse_f64(value, origin)?),
            "grid_points" => self.grid_points = Some(parse_usize(value, origin)?),
            "refine_iters" => self.refine_iters = Some(parse_usize(value, origin)?),
            "va_tol" => self.va_tol = Some(parse_f64(value, origin)?),
            other => {
                return Err(CliError::Usage(format!("{origin}: unknown key '{other}'")))
            }
        }
        Ok(())
    }

    /// Resolves defaults and produces a validated sweep request.
    pub fn into_spec(self) -> Result<SweepSpec, CliError> {
        let Some(distances_km) = self.distances_km else {
            return Err(CliError::Usage(
                "sweep config is missing 'distances_km'".into(),
            ));
        };
        let defaults = OptimizerSettings::default();
        let spec = SweepSpec {
            distances_km,
            models: self.models.unwrap_or_else(|| NoiseModelKind::ALL.to_vec()),
            optimizer: OptimizerSettings {
                v_min: self.va_min.unwrap_or(defaults.v_min),
                v_max: self.va_max.unwrap_or(defaults.v_max),
                grid_points: self.grid_points.unwrap_or(defaults.grid_points),
                refine_iters: self.refine_iters.unwrap_or(defaults.refine_iters),
                va_tol: self.va_tol.unwrap_or(defaults.va_tol),
            },
            f_rec: self.f.unwrap_or(0.95),
            prep: AlicePrepNoise::new(
                self.xi_const.unwrap_or(0.01),
                self.xi_slope.unwrap_or(0.01),
            )?,
            detector: DetectorParams::new(self.eta_b.unwrap_or(0.5), self.nu_b.unwrap_or(0.01))?,
            attenuation_db_per_km: self.attenuation_db_per_km.unwrap_or(0.2),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_f64(value: &str, origin: &str) -> Result<f64, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("{origin}: '{value}' is not a number")))
}

fn parse_usize(value: &str, origin: &str) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("{origin}: '{value}' is not a count")))
}

fn parse_models(value: &str, origin: &str) -> Result<Vec<NoiseModelKind>, CliError> {
    let mut models = Vec::new();
    for token in value.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let model = token
            .parse()
            .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
        models.push(model);
    }
    if models.is_empty() {
        return Err(CliError::Usage(format!("{origin}: no models listed")));
    }
    Ok(models)
}

/// Distances are comma-separated values; a token `start:stop:step` expands to
/// the inclusive arithmetic progression.
fn parse_distances(value: &str, origin: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for token in value.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if token.contains(':') {
            let parts: Vec<&str> = token.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::Usage(format!(
                    "{origin}: range '{token}' must be start:stop:step"
                )));
            }
            let start = parse_f64(parts[0], origin)?;
            let stop = parse_f64(parts[1], origin)?;
            let step = parse_f64(parts[2], origin)?;
            if !(step > 0.0 && step.is_finite() && stop >= start && stop.is_finite()) {
                return Err(CliError::Usage(format!(
                    "{origin}: range '{token}' needs finite stop >= start and step > 0"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            for i in 0..=count {
                out.push(start + i as f64 * step);
            }
        } else {
            out.push(parse_f64(token, origin)?);
        }
    }
    Ok(out)
}
