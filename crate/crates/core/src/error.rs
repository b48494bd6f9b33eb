use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("steady-state iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("steady-state solver internal error: {0}")]
    SolverInternal(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("degenerate dressed modes (lambda+ == lambda-); partial-fraction weights undefined")]
    DegenerateModes,

    #[error("critical drive ratio undefined: {0}")]
    UndefinedCriticalPoint(String),

    #[error("step size underflow at t = {t:e} s (h = {step:e} s); try the slow-envelope integrator")]
    Stiffness { t: f64, step: f64 },

    #[error("trajectory diverged at t = {t:e} s")]
    Instability { t: f64 },

    #[error("ill-conditioned demodulation: {0}")]
    Conditioning(String),

    #[error("need at least 3 rows to locate features, got {rows}")]
    InsufficientData { rows: usize },

    #[error("at grid index {index}: {source}")]
    AtGridIndex {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown figure preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("nothing to emit: {0}")]
    EmptyData(&'static str),

    #[error("refusing to overwrite existing file {} (pass --overwrite)", .0.display())]
    PathCollision(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed provenance: {0}")]
    Provenance(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("key `{key}` lacks a unit tag; use one of: {}", .accepted.join(", "))]
    UnitTagMissing { key: String, accepted: Vec<String> },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {reason}")]
    Validation { key: String, reason: String },
}

/// Coarse error classes used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Usage,
    Validation,
    Convergence,
    Io,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Usage => 2,
            Category::Validation => 3,
            Category::Convergence => 4,
            Category::Io => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Usage => "usage",
            Category::Validation => "validation",
            Category::Convergence => "convergence",
            Category::Io => "io",
        }
    }
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> Category {
        match self {
            Error::UnknownPreset(_) => Category::Usage,
            Error::Convergence { .. }
            | Error::SolverInternal(_)
            | Error::Singular(_)
            | Error::Stiffness { .. }
            | Error::Instability { .. }
            | Error::Conditioning(_) => Category::Convergence,
            Error::Io { .. } | Error::PathCollision(_) => Category::Io,
            Error::AtGridIndex { source, .. } => source.category(),
            _ => Category::Validation,
        }
    }
}
