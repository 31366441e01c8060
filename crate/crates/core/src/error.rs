use crate::keyrate::HolevoIntermediates;
use crate::noise::NoiseModelKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter or intermediate value is outside its physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sweep, optimizer, or analysis request is internally inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// The covariance intermediates violate physicality beyond numerical
    /// tolerance (negative discriminant or symplectic eigenvalue below 1).
    #[error("unphysical covariance: {message}; intermediates: {intermediates:?}")]
    Unphysical {
        message: String,
        intermediates: Box<HolevoIntermediates>,
    },

    /// A statistic is undefined for the supplied data.
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A trace file does not conform to the `#cvqkd-trace v1` format.
    #[error("trace format error at byte {offset}: {message}")]
    TraceFormat { offset: u64, message: String },

    /// A sweep aborted; identifies the failing grid point.
    #[error("sweep failed at {distance_km} km ({model}): {source}")]
    SweepPoint {
        distance_km: f64,
        model: NoiseModelKind,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
