use thiserror::Error;

/// Errors surfaced by the simulation and numerics modules.
///
/// Every variant maps to a stable, module-tagged code (see [`Error::code`])
/// that the command-line front end reports verbatim.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("event outside the allowed space-time region: {0}")]
    EventOutsideRegion(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("SDE integration failed: {0}")]
    Integration(String),

    #[error("kernel evaluation failed: {0}")]
    Kernel(String),

    #[error("lattice window too small: {message} (suggested window [{suggested_lo}, {suggested_hi}])")]
    Window {
        message: String,
        suggested_lo: i64,
        suggested_hi: i64,
    },

    #[error("Fredholm determinant did not converge: {0}")]
    Fredholm(String),

    #[error("Painleve II solver failed: {0}")]
    Painleve(String),

    #[error("statistics: {0}")]
    Stats(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Config(_) => "CONFIG_INVALID",
            Error::OutOfRange(_) => "OUT_OF_RANGE",
            Error::EventOutsideRegion(_) => "PNG:EVENT_OUTSIDE_REGION",
            Error::ResourceLimit(_) => "RESOURCE_LIMIT",
            Error::Eigen(_) => "DYSON:EIGEN_FAILURE",
            Error::Integration(_) => "DYSON:INTEGRATION_FAILURE",
            Error::Kernel(_) => "KERNELS:EVALUATION_FAILURE",
            Error::Window { .. } => "KERNELS:WINDOW_TOO_SMALL",
            Error::Fredholm(_) => "FREDHOLM:NONCONVERGENCE",
            Error::Painleve(_) => "FREDHOLM:PAINLEVE_FAILURE",
            Error::Stats(_) => "STATS:DEGENERATE",
        }
    }

    /// True for failures caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::OutOfRange(_) | Error::EventOutsideRegion(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
