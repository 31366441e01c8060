//! One module per subcommand, plus the output plumbing they share.

pub mod analyze;
pub mod mc_validate;
pub mod point;
pub mod sweep;
pub mod synth;

use std::path::Path;

use crate::error::CliError;

/// Machine-readable table formats.
#[derive(Clone, Copy, Debug, Eq, PartialEq, clap::ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

/// Human-first report formats.
#[derive(Clone, Copy, Debug, Eq, PartialEq, clap::ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Writes `content` to `output`, or to stdout when no path was given. The
/// bytes are identical either way.
pub(crate) fn emit(output: Option<&Path>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => Ok(std::fs::write(path, content)?),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
