use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_REGIME: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("regime error: {0}")]
    Regime(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Regime(_) => EXIT_REGIME,
            CliError::Solver(_) | CliError::Io(_) => EXIT_SOLVER,
        }
    }
}

impl From<hardy_ground::Error> for CliError {
    fn from(e: hardy_ground::Error) -> Self {
        use hardy_ground::Error as E;
        match e {
            E::DimensionTooSmall(_)
            | E::HardyOutOfRange { .. }
            | E::ExponentMismatch { .. }
            | E::BadCoupling(_)
            | E::BadGrid(_)
            | E::InvalidOptions(_)
            | E::EmptyScan => CliError::Config(e.to_string()),
            E::OutOfRegime(_) | E::ConditionFailed { .. } | E::NotRecentered(_) => CliError::Regime(e.to_string()),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}
