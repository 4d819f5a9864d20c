use holoq_core::HoloError;

/// Failure of a command, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed or unreachable request.
    #[error("{0}")]
    Invalid(String),

    #[error("{0}")]
    Model(#[from] HoloError),

    /// A verified metric exceeded its tolerance.
    #[error("verification failed: {metric} = {value:.3e} exceeds tolerance {tolerance:.3e}")]
    Verification {
        metric: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Model(HoloError::NonConvergence { .. }) => 3,
            CliError::Model(_) => 2,
            CliError::Verification { .. } => 3,
            CliError::Io(_) => 1,
        }
    }
}
