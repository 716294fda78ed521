use thiserror::Error;

pub type Result<T> = std::result::Result<T, PolyscarError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyscarError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit reached: {message} (best achieved error {best_error:.3e})")]
    Resource { message: String, best_error: f64 },
    #[error("irrational period relations need a rational approximation: {0}")]
    NeedsApproximation(String),
    #[error("periodic skeleton required: {0}")]
    PeriodicSkeletonRequired(String),
    #[error("size compatibility violated: {0}")]
    Compatibility(String),
    #[error("quantum numbers cannot be remapped: {0}")]
    Remap(String),
    #[error("wrong direction kind: {0}")]
    Kind(String),
    #[error("unsupported boundary condition: {0}")]
    UnsupportedBoundary(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl PolyscarError {
    /// Stable machine-readable tag, printed by the CLI next to the message.
    pub fn code(&self) -> &'static str {
        match self {
            PolyscarError::Config(_) => "E_CONFIG",
            PolyscarError::Usage(_) => "E_USAGE",
            PolyscarError::Domain(_) => "E_DOMAIN",
            PolyscarError::Resource { .. } => "E_RESOURCE",
            PolyscarError::NeedsApproximation(_) => "E_NEEDS_APPROX",
            PolyscarError::PeriodicSkeletonRequired(_) => "E_PERIODIC_REQUIRED",
            PolyscarError::Compatibility(_) => "E_COMPAT",
            PolyscarError::Remap(_) => "E_REMAP",
            PolyscarError::Kind(_) => "E_KIND",
            PolyscarError::UnsupportedBoundary(_) => "E_BOUNDARY",
            PolyscarError::Consistency(_) => "E_INTERNAL",
            PolyscarError::Io(_) => "E_IO",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            PolyscarError::Compatibility(_) | PolyscarError::Remap(_) => 3,
            PolyscarError::Consistency(_) | PolyscarError::Io(_) | PolyscarError::Resource { .. } => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for PolyscarError {
    fn from(e: std::io::Error) -> Self {
        PolyscarError::Io(e.to_string())
    }
}
