use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// The variants are grouped by the stage that raises them so callers (the
/// CLI in particular) can map them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sweep produced no parameter sets: {0}")]
    EmptySweep(String),

    #[error("syntax error at offset {offset}: {message}")]
    FilterSyntax { offset: usize, message: String },

    #[error("unbound variable `{0}` in filter")]
    UnboundVariable(String),

    #[error("type error in filter: {0}")]
    FilterType(String),

    #[error("arithmetic error in filter: {0}")]
    Arithmetic(String),

    #[error("template syntax error at offset {offset}: {message}")]
    TemplateSyntax { offset: usize, message: String },

    #[error("template placeholder `{0}` has no matching parameter")]
    UnfilledPlaceholder(String),

    #[error("parameter `{0}` is not used by any template")]
    UnusedParameter(String),

    #[error("namer exhausted after {0} ids")]
    NamerExhausted(usize),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("refusing to overwrite existing files: {}", display_paths(.0))]
    Conflict(Vec<PathBuf>),

    #[error("scheduler submission failed for simulation {sim_id}: {message}")]
    Scheduler { sim_id: String, message: String },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("simulation id `{0}` not found")]
    UnknownSimId(String),

    #[error("no simulation matches the given parameter set")]
    NoMatchingSet,

    #[error("malformed document: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit status for this error: 2 for scheduler failures, 1 for
    /// everything else (validation, usage, I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Scheduler { .. } => 2,
            _ => 1,
        }
    }
}

fn display_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Parse(format!("csv: {err}"))
    }
}
