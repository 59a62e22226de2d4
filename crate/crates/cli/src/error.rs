use std::fmt;

use serde_json::json;

/// Process exit codes.
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_ACCEPTANCE: u8 = 4;

/// A failure reported on stderr as `{"error": {"code", "message"}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: u8,
}

impl CliError {
    pub fn config(code: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { code: code.into(), message: message.into(), exit: EXIT_CONFIG }
    }

    pub fn numeric(code: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { code: code.into(), message: message.into(), exit: EXIT_NUMERIC }
    }

    pub fn missing_param(name: &str) -> Self {
        Self::config(format!("MISSING_PARAM:{name}"), format!("parameter --{} is required here", name.to_lowercase()))
    }

    pub fn io(code: &str, path: &std::path::Path, err: std::io::Error) -> Self {
        Self::config(code, format!("{}: {err}", path.display()))
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<kpzlab_core::Error> for CliError {
    fn from(e: kpzlab_core::Error) -> Self {
        let exit = if e.is_config() { EXIT_CONFIG } else { EXIT_NUMERIC };
        CliError { code: e.code().to_string(), message: e.to_string(), exit }
    }
}

pub type CliResult<T> = Result<T, CliError>;
