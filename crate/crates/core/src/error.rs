use std::path::PathBuf;

/// Errors raised by the algebra, lattice and flow layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input is not a 3/2-spinor: |c(psi)| = {residual:e} exceeds tolerance {tol:e}")]
    NotThreeHalf { residual: f64, tol: f64 },

    #[error("input is off W^mu: |mu(psi)| = {mu:e}, |c(psi)| = {contract:e} (tolerance {tol:e})")]
    OffWmu { mu: f64, contract: f64, tol: f64 },

    #[error("chart degenerates: (a, b, c, d) vanishes")]
    DegenerateChart,

    #[error("zero input where a nonzero spinor-hom is required")]
    ZeroInput,

    #[error("invalid lattice geometry: {0}")]
    InvalidGeometry(String),

    #[error("lattice geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),

    #[error("invalid flow config: {0}")]
    InvalidConfig(String),

    #[error("flow diverged at stage {stage} iteration {iteration}: energy {energy}")]
    Diverged {
        stage: usize,
        iteration: usize,
        energy: f64,
    },

    #[error("malformed checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
