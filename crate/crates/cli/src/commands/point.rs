//! `cvqkd point`: the key rate at one operating point, with the full noise
//! budget and covariance intermediates.

use std::path::PathBuf;

use clap::Args;
use cvqkd_core::{
    key_rate, AlicePrepNoise, ChannelParams, DetectorParams, NoiseModelKind, ProtocolParams,
    SystemParams,
};

use crate::commands::{emit, TableFormat};
use crate::error::CliError;
use crate::report;

#[derive(Args, Debug)]
pub struct PointArgs {
    /// Detector-noise model: trusted, untrusted, or calibrated.
    #[arg(long)]
    pub model: NoiseModelKind,

    /// Fiber length in km.
    #[arg(long = "L", value_name = "KM")]
    pub length_km: f64,

    /// Fiber attenuation in dB/km.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,

    /// Alice's modulation variance in shot-noise units.
    #[arg(long)]
    pub va: f64,

    /// Reconciliation efficiency in (0, 1].
    #[arg(long, default_value_t = 0.95)]
    pub f: f64,

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

    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &PointArgs) -> Result<(), CliError> {
    let params = SystemParams {
        protocol: ProtocolParams::new(args.va, args.f)?,
        prep: AlicePrepNoise::new(args.xi_const, args.xi_slope)?,
        detector: DetectorParams::new(args.eta, args.nu)?,
        channel: ChannelParams::new(args.length_km, args.alpha)?,
    };
    let result = key_rate(&params, args.model)?;
    let text = match args.format {
        TableFormat::Json => report::render_point_json(args.model, &params, &result),
        TableFormat::Csv => report::render_point_csv(args.model, &params, &result),
    };
    emit(args.output.as_deref(), &text)
}
