use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GzError {
    #[error("matrix size {0} is too small for this algebra (need n >= {1})")]
    SizeTooSmall(usize, usize),
    #[error("chain index {index} outside {lo}..={hi}")]
    ChainIndex { index: usize, lo: usize, hi: usize },
    #[error("GZ index ({0}, {1}) does not exist in this chain")]
    GzIndex(usize, usize),
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Shape { expected: usize, rows: usize, cols: usize },
    #[error("matrix is not in the algebra (membership residual {0:.3e})")]
    NotMember(f64),
    #[error("operation requires the orthogonal family")]
    NotOrthogonal,
    #[error("operation requires the general linear family")]
    NotGeneralLinear,
    #[error("operation requires an even size, got {0}")]
    OddSize(usize),
    #[error("invalid root label {0}")]
    InvalidRoot(String),
    #[error("subspaces live in different ambient algebras")]
    AmbientMismatch,
    #[error("target has length {got}, the chain has {expected} GZ functions")]
    TargetLength { expected: usize, got: usize },
    #[error("element is not in the stratum g_Theta (smallest margin {0:.3e})")]
    NotInGTheta(f64),
    #[error("solver did not converge after {restarts} restarts (best residual {best_residual:.3e})")]
    NoConvergence { restarts: usize, best_residual: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GzError>;
