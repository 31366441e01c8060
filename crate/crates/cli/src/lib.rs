//! Command-line front end for the CV-QKD key-rate and trace-analysis
//! library: argument parsing, config files, and deterministic report
//! rendering. All computation lives in `cvqkd-core`; this crate only maps
//! flags to parameters and results to bytes.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use error::CliError;
