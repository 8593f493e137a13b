use std::path::Path;

/// Failure of a command, classified by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or invalid configuration, unusable paths.
    #[error("configuration error: {0}")]
    Config(String),
    /// A module contract was violated while data flowed through it.
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Contract(_) => 3,
        }
    }

    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {e}", path.display()))
    }
}

impl From<wristsonar_core::Error> for CliError {
    fn from(e: wristsonar_core::Error) -> Self {
        match e {
            wristsonar_core::Error::Config(m) => CliError::Config(m),
            wristsonar_core::Error::Contract(m) => CliError::Contract(m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_keep_their_class() {
        let c: CliError = wristsonar_core::Error::Contract("x".into()).into();
        assert_eq!(c.exit_code(), 3);
        let c: CliError = wristsonar_core::Error::Config("x".into()).into();
        assert_eq!(c.exit_code(), 2);
    }
}
