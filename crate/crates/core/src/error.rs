use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Location in the input text; line and column are 1-based, byte offsets
/// half-open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.span.line, self.span.column, sev, self.message)
    }
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("{}", join_diagnostics(.0))]
    Parse(Vec<Diagnostic>),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("evaluation error in {context}: {message}")]
    Eval { context: String, message: String },
    #[error("method inapplicable: {0}")]
    Inapplicable(String),
    #[error("unsolvable: {0}")]
    Unsolvable(String),
    #[error("contradictory constraint: {0}")]
    Contradiction(String),
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Structural(_) | Error::Config(_) => 2,
            Error::Eval { .. } => 1,
            Error::Inapplicable(_) | Error::Unsolvable(_) | Error::Contradiction(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
