use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("operator is not Hermitian (relative defect {relative_defect:.3e})")]
    NotHermitian { relative_defect: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace condition violated: {0}")]
    Trace(String),

    #[error("iteration did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("representation matrices do not commute (residual {0:.3e})")]
    NonCommuting(f64),

    #[error("automatic decomposition is only available for ordinary abelian representations; supply the decomposition explicitly")]
    ProjectiveDecomposition,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::InvalidArgument(_) => 2,
            Error::Dimension(_) => 3,
            Error::InvalidGroup(_)
            | Error::InvalidRepresentation(_)
            | Error::ProjectiveDecomposition
            | Error::NotHermitian { .. }
            | Error::NotPsd { .. }
            | Error::Trace(_) => 2,
            Error::NoConvergence { .. } | Error::NonCommuting(_) | Error::Numerical(_) => 4,
        }
    }
}
