//! `cvqkd analyze`: variance decomposition, QCNR, autocorrelation, and
//! histogram statistics for recorded traces, against a dark reference.

use std::path::{Path, PathBuf};

use clap::Args;
use cvqkd_core::{
    autocorrelation, histogram, read_trace, variance_decompose, variance_vs_power,
    RunningMoments, SampleTrace,
};

use crate::commands::{emit, ReportFormat};
use crate::error::CliError;
use crate::report::{self, AnalyzeReport, SignalReport};

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Signal trace file. Repeatable; with two or more signals at distinct
    /// LO powers a variance-versus-power line is fitted.
    #[arg(long, required = true)]
    pub signal: Vec<PathBuf>,

    /// Dark (signal-blocked) trace file giving the electronic reference.
    #[arg(long)]
    pub dark: PathBuf,

    /// Largest autocorrelation lag (must stay below n/10).
    #[arg(long, default_value_t = 100)]
    pub max_lag: usize,

    /// Histogram bin count.
    #[arg(long, default_value_t = 200)]
    pub bins: usize,

    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Also write per-trace autocorrelation and histogram CSVs (and a
    /// linearity CSV when fitted) into this directory.
    #[arg(long)]
    pub report_dir: Option<PathBuf>,
}

/// File stem used for the per-trace report CSVs.
fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into())
}

pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let dark = read_trace(&args.dark)?;
    let dark_n = dark.len();
    let sigma_e2 = RunningMoments::from_samples(dark.samples()).variance();

    if let Some(dir) = &args.report_dir {
        std::fs::create_dir_all(dir)?;
    }

    let mut signals = Vec::with_capacity(args.signal.len());
    let mut traces: Vec<SampleTrace> = Vec::with_capacity(args.signal.len());
    for path in &args.signal {
        let trace = read_trace(path)?;
        let stats = variance_decompose(&trace, &dark)?;
        let ac = autocorrelation(&trace, args.max_lag)?;
        let hist = histogram(&trace, args.bins)?;
        let max_abs_r = ac.r[1..]
            .iter()
            .fold(0.0_f64, |acc, r| acc.max(r.abs()));

        if let Some(dir) = &args.report_dir {
            let base = stem(path);
            let label = &trace.meta().label;
            std::fs::write(
                dir.join(format!("{base}_autocorr.csv")),
                report::render_autocorr_csv(&ac, label, trace.len()),
            )?;
            std::fs::write(
                dir.join(format!("{base}_histogram.csv")),
                report::render_histogram_csv(&hist, label, trace.len()),
            )?;
        }

        signals.push(SignalReport {
            path: path.display().to_string(),
            label: trace.meta().label.clone(),
            stats,
            r1: ac.r[1],
            max_abs_r,
            max_lag: args.max_lag,
            white_noise_band: ac.white_noise_band,
        });
        traces.push(trace);
    }

    let linearity = if traces.len() >= 2 {
        let scan = variance_vs_power(&traces, &dark)?;
        if let Some(dir) = &args.report_dir {
            std::fs::write(dir.join("linearity.csv"), report::render_linearity_csv(&scan))?;
        }
        Some(scan)
    } else {
        None
    };

    let report = AnalyzeReport {
        dark_path: args.dark.display().to_string(),
        dark_n,
        sigma_e2,
        signals,
        linearity,
    };
    let text = match args.format {
        ReportFormat::Text => report::render_analyze_text(&report),
        ReportFormat::Json => report::render_analyze_json(&report),
    };
    emit(args.output.as_deref(), &text)
}
