use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVARIANT_FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const RUNTIME: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {precondition}: {detail}")]
    Validation {
        path: PathBuf,
        precondition: String,
        detail: String,
    },
    #[error("{context}: {source}")]
    Runtime {
        context: String,
        #[source]
        source: relframes::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => exit::PARSE,
            CliError::Validation { .. } => exit::VALIDATION,
            CliError::Runtime { .. } | CliError::Io { .. } => exit::RUNTIME,
        }
    }

    /// Validation failure named after the library error variant, e.g. `ZeroCurvature`.
    pub fn from_precondition(path: impl Into<PathBuf>, err: &relframes::Error) -> Self {
        CliError::Validation {
            path: path.into(),
            precondition: variant_name(err),
            detail: err.to_string(),
        }
    }

    pub fn validation(path: impl Into<PathBuf>, precondition: &str, detail: impl Into<String>) -> Self {
        CliError::Validation {
            path: path.into(),
            precondition: precondition.to_string(),
            detail: detail.into(),
        }
    }
}

fn variant_name(err: &relframes::Error) -> String {
    let debug = format!("{err:?}");
    debug.chars().take_while(|c| c.is_ascii_alphanumeric()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precondition_uses_variant_name() {
        let e = CliError::from_precondition("x.json", &relframes::Error::ZeroCurvature { a: 0.0 });
        assert!(e.to_string().contains("ZeroCurvature"));
        assert_eq!(e.exit_code(), exit::VALIDATION);
        let e = CliError::from_precondition("x.json", &relframes::Error::ZeroOmega);
        assert!(e.to_string().starts_with("x.json: ZeroOmega:"));
    }
}
