//! Error taxonomy for the command line: exit code 1 for anything wrong
//! with the invocation or its files, exit code 2 for inputs that parse
//! fine but are rejected by the model.

use serde::Serialize;

/// Exit code for IO, parse, and usage problems.
pub const EXIT_INPUT: i32 = 1;
/// Exit code for domain rejections (invalid states, orders, targets...).
pub const EXIT_DOMAIN: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Parse(#[from] serde_json::Error),
    /// Structurally bad input files (missing sections, wrong shapes).
    #[error("{0}")]
    Input(String),
    /// Inputs the model rejects.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        CliError::Domain(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) | CliError::Input(_) => EXIT_INPUT,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io(_) => "io",
            CliError::Parse(_) => "parse",
            CliError::Input(_) => "input",
            CliError::Domain(_) => "domain",
        }
    }

    /// The machine-readable form printed to stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct ErrorBody<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct ErrorObject<'a> {
            error: ErrorBody<'a>,
        }
        serde_json::to_string(&ErrorObject {
            error: ErrorBody { kind: self.kind(), message: self.to_string() },
        })
        .expect("error object serializes")
    }
}

/// Maps any displayable model error into the domain class.
pub fn domain_err(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}
