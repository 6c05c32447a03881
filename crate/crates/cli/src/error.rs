use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("invalid scenario field `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("state invariant `{invariant}` violated at t={t}: residual {magnitude:e}")]
    Invariant { invariant: String, t: f64, magnitude: f64 },

    #[error("analytic propagation refused at t={t}: {message}")]
    OverflowRefusal { t: f64, message: String },

    #[error("numerical failure at t={t}: {source}")]
    Numerical { t: f64, source: dispersive_core::Error },
}

/// JSON shape written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suggestion: Option<String>,
}

impl CliError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid { field: field.into(), reason: reason.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Write { .. } => 1,
            CliError::Parse { .. } | CliError::Invalid { .. } => 2,
            CliError::Invariant { .. } | CliError::OverflowRefusal { .. } | CliError::Numerical { .. } => 3,
        }
    }

    pub fn report(&self) -> ErrorReport {
        let mut r = ErrorReport {
            kind: "",
            message: self.to_string(),
            field: None,
            invariant: None,
            line: None,
            column: None,
            suggestion: None,
        };
        match self {
            CliError::Read { .. } => r.kind = "read",
            CliError::Write { .. } => r.kind = "write",
            CliError::Parse { line, column, .. } => {
                r.kind = "parse";
                r.line = Some(*line);
                r.column = Some(*column);
            }
            CliError::Invalid { field, .. } => {
                r.kind = "invalid_field";
                r.field = Some(field.clone());
            }
            CliError::Invariant { invariant, .. } => {
                r.kind = "invariant_violation";
                r.invariant = Some(invariant.clone());
            }
            CliError::OverflowRefusal { .. } => {
                r.kind = "overflow_guard";
                r.suggestion = Some("rerun with method=oracle (--method oracle)".into());
            }
            CliError::Numerical { .. } => r.kind = "numerical",
        }
        r
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        let mut message = e.to_string();
        if let Some(at) = message.rfind(" at line ") {
            message.truncate(at);
        }
        CliError::Parse { line: e.line(), column: e.column(), message }
    }
}
