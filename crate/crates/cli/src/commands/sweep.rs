//! `cvqkd sweep`: key rate versus distance with the modulation variance
//! optimized at every point, driven by a config file.

use std::path::PathBuf;

use clap::Args;
use cvqkd_core::run_sweep;

use crate::commands::{emit, TableFormat};
use crate::config::SweepConfig;
use crate::error::CliError;
use crate::report;

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Config file with one `key = value` per line.
    #[arg(long)]
    pub config: PathBuf,

    /// Override a config key, e.g. `--set nu_b=0.1`. Repeatable; applied in
    /// order after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,

    /// Write the table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let source = args.config.display().to_string();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Usage(format!("cannot read config {source}: {e}")))?;
    let mut config = SweepConfig::parse(&text, &source)?;
    config.apply_overrides(&args.set)?;
    let spec = config.into_spec()?;
    let rows = run_sweep(&spec)?;
    let out = match args.format {
        TableFormat::Csv => report::render_sweep_csv(&spec, &rows),
        TableFormat::Json => report::render_sweep_json(&spec, &rows),
    };
    emit(args.output.as_deref(), &out)
}
