use std::fmt;

/// Exit code 1: the request itself was malformed.
/// Exit code 2: the request was well-formed but physically inadmissible.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(cvqkd_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &cvqkd_core::Error) -> i32 {
    use cvqkd_core::Error::*;
    match e {
        Domain(_) | Unphysical { .. } | DegenerateData(_) => 2,
        SweepPoint { source, .. } => core_exit_code(source),
        Config(_) | TraceFormat { .. } | Io(_) => 1,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Usage(_) => None,
            CliError::Core(e) => Some(e),
        }
    }
}

impl From<cvqkd_core::Error> for CliError {
    fn from(e: cvqkd_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(cvqkd_core::Error::Io(e))
    }
}
