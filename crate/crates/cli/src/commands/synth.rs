//! `cvqkd synth`: writes a synthetic homodyne trace file with a chosen
//! electronic/quantum noise split.

use std::path::PathBuf;

use clap::Args;
use cvqkd_core::{
    synthesize_trace, write_trace, Quantization, SynthSpec, TraceFileFormat, TraceMeta,
};

use crate::error::CliError;

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Number of samples.
    #[arg(long)]
    pub n: usize,

    /// Stationary electronic-noise variance (> 0).
    #[arg(long, default_value_t = 1.0)]
    pub sigma_e2: f64,

    /// AR(1) coefficient of the electronic noise, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,

    /// Quantum-to-classical noise ratio in dB; -inf for a dark trace.
    #[arg(long, default_value = "-inf", allow_hyphen_values = true)]
    pub qcnr: f64,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Quantize to this many bits (requires --full-scale).
    #[arg(long)]
    pub quantize_bits: Option<u32>,

    /// Quantizer full scale (requires --quantize-bits).
    #[arg(long)]
    pub full_scale: Option<f64>,

    /// On-disk payload encoding: f64le or text.
    #[arg(long, default_value_t = TraceFileFormat::F64le)]
    pub trace_format: TraceFileFormat,

    /// Trace file to write.
    #[arg(long)]
    pub output: PathBuf,

    #[arg(long, default_value_t = 125e6)]
    pub sampling_rate_hz: f64,

    #[arg(long, default_value_t = 0.0)]
    pub lo_power_mw: f64,

    #[arg(long, default_value_t = 0.0)]
    pub gain_v_per_a: f64,

    #[arg(long, default_value_t = 0.0)]
    pub bandwidth_hz: f64,

    /// Free-form label stored in the trace header.
    #[arg(long, default_value = "")]
    pub label: String,
}

fn quantization(args: &SynthArgs) -> Result<Option<Quantization>, CliError> {
    match (args.quantize_bits, args.full_scale) {
        (None, None) => Ok(None),
        (Some(bits), Some(full_scale)) => Ok(Some(Quantization { bits, full_scale })),
        _ => Err(CliError::Usage(
            "--quantize-bits and --full-scale must be given together".into(),
        )),
    }
}

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        n: args.n,
        sigma_e2: args.sigma_e2,
        phi: args.phi,
        qcnr_db: args.qcnr,
        quantize: quantization(args)?,
        seed: args.seed,
        meta: TraceMeta {
            sampling_rate_hz: args.sampling_rate_hz,
            lo_power_mw: args.lo_power_mw,
            gain_v_per_a: args.gain_v_per_a,
            bandwidth_hz: args.bandwidth_hz,
            label: args.label.clone(),
        },
    };
    let trace = synthesize_trace(&spec)?;
    write_trace(&args.output, &trace, args.trace_format)?;
    println!(
        "wrote {} samples to {} ({})",
        trace.len(),
        args.output.display(),
        args.trace_format
    );
    Ok(())
}
