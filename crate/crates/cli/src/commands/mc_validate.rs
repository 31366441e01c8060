//! `cvqkd mc-validate`: checks the closed-form mutual information against a
//! Monte Carlo estimate from simulated quadrature records.
//!
//! The total excess noise can be given directly (`--xi-tot`) or derived from
//! a model and link (`--model` plus `--L`); exactly one of the two styles
//! must be used.

use std::path::PathBuf;

use clap::Args;
use cvqkd_core::{
    budget, estimate_mi, mutual_information, simulate_batch_raw, transmittance, AlicePrepNoise,
    DetectorParams, NoiseModelKind,
};

use crate::commands::emit;
use crate::error::CliError;
use crate::report;

#[derive(Args, Debug)]
pub struct McValidateArgs {
    /// Alice's modulation variance in shot-noise units.
    #[arg(long)]
    pub va: f64,

    /// Total excess noise referred to the channel input. Mutually exclusive
    /// with --model/--L.
    #[arg(long)]
    pub xi_tot: Option<f64>,

    /// Detector-noise model used to derive xi_tot (requires --L).
    #[arg(long)]
    pub model: Option<NoiseModelKind>,

    /// Fiber length in km used to derive xi_tot (requires --model).
    #[arg(long = "L", value_name = "KM")]
    pub length_km: Option<f64>,

    /// Fiber attenuation in dB/km.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,

    /// Detector efficiency in (0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,

    /// Detector electronic noise in shot-noise units.
    #[arg(long, default_value_t = 0.01)]
    pub nu: f64,

    /// Modulation-independent part of Alice's preparation noise.
    #[arg(long, default_value_t = 0.01)]
    pub xi_const: f64,

    /// Preparation noise per unit of modulation variance.
    #[arg(long, default_value_t = 0.01)]
    pub xi_slope: f64,

    /// Number of simulated symbols.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn resolve_xi_tot(args: &McValidateArgs) -> Result<f64, CliError> {
    match (args.xi_tot, args.model, args.length_km) {
        (Some(xi), None, None) => Ok(xi),
        (None, Some(model), Some(length_km)) => {
            let t = transmittance(length_km, args.alpha);
            let prep = AlicePrepNoise::new(args.xi_const, args.xi_slope)?;
            let det = DetectorParams::new(args.eta, args.nu)?;
            Ok(budget(model, t, prep.xi_a(args.va), &det)?.xi_tot)
        }
        (Some(_), _, _) => Err(CliError::Usage(
            "--xi-tot cannot be combined with --model or --L".into(),
        )),
        _ => Err(CliError::Usage(
            "give either --xi-tot, or both --model and --L".into(),
        )),
    }
}

pub fn run(args: &McValidateArgs) -> Result<(), CliError> {
    let xi_tot = resolve_xi_tot(args)?;
    let analytic = mutual_information(args.va + 1.0, xi_tot)?;
    let batch = simulate_batch_raw(args.va, xi_tot, args.n, args.seed)?;
    let est = estimate_mi(&batch)?;
    let text = report::render_mc_table(args.va, xi_tot, args.n, args.seed, analytic, &est);
    emit(args.output.as_deref(), &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> McValidateArgs {
        McValidateArgs {
            va: 2.0,
            xi_tot: None,
            model: None,
            length_km: None,
            alpha: 0.2,
            eta: 0.5,
            nu: 0.01,
            xi_const: 0.01,
            xi_slope: 0.01,
            n: 1000,
            seed: 1,
            output: None,
        }
    }

    #[test]
    fn direct_xi_tot_wins_only_when_alone() {
        let mut args = base();
        args.xi_tot = Some(1.0);
        assert_eq!(resolve_xi_tot(&args).unwrap(), 1.0);
        args.model = Some(NoiseModelKind::Trusted);
        assert!(resolve_xi_tot(&args).is_err());
    }

    #[test]
    fn model_form_needs_both_model_and_length() {
        let mut args = base();
        args.model = Some(NoiseModelKind::Trusted);
        assert!(resolve_xi_tot(&args).is_err());
        args.length_km = Some(0.0);
        // Perfect fiber, trusted detector: xi_ch = xi_a, xi_det/T added on top.
        let xi = resolve_xi_tot(&args).unwrap();
        let expected = 0.01 + 0.01 * 2.0 + (1.0 + 0.5 + 0.02) / 0.5;
        assert!((xi - expected).abs() < 1e-12, "xi_tot = {xi}");
    }

    #[test]
    fn neither_form_is_a_usage_error() {
        assert!(resolve_xi_tot(&base()).is_err());
    }
}
