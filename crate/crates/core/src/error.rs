//! Crate-wide error type with stage-tagged diagnostics.
//!
//! Every fallible pipeline stage maps into one variant here, so CLI failures
//! surface as a single line naming the stage that broke and why.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Edge-list text failed to parse; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A structurally invalid graph (duplicate edge, vertex bound, ...).
    #[error("graph error: {0}")]
    Graph(String),

    /// Invalid bitstring input.
    #[error("bitstring error: {0}")]
    Bitstring(String),

    /// Invalid schedule parameters or step index.
    #[error("schedule error: {0}")]
    Schedule(String),

    /// Mismatched operand dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// LAPACK failed to converge or rejected its arguments.
    #[error("eigendecomposition failed: zgees returned info = {0}")]
    Eigendecomposition(i32),

    /// Operator handed to the spectral stage was not unitary.
    #[error("matrix is not unitary: residual {0:.3e}")]
    NonUnitary(f64),

    /// A non-finite value appeared during evolution (numerical blow-up).
    #[error("non-finite value encountered at step {0}")]
    NonFinite(usize),

    /// Bad run configuration (CLI flags or config file).
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure, tagged with the path involved.
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A downstream failure wrapped with the pipeline stage that hit it.
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }

    /// Tag an I/O error with its path.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io { path: path.into(), source }
    }
}

/// Extension adding stage context to any crate `Result`.
pub trait StageContext<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageContext<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.in_stage(stage))
    }
}
