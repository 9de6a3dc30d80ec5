use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("{what} did not converge after {sweeps} sweeps (off-diagonal residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        sweeps: usize,
        residual: f64,
    },
    #[error("qubit index {index} out of range 1..={n}")]
    QubitRange { index: usize, n: usize },
    #[error("control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { expected: usize, got: usize },
    #[error("cannot normalize an all-zero vector")]
    ZeroVector,
    #[error("invalid label {0}")]
    Label(f64),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("prediction {0} outside (0, 1) for cross-entropy")]
    CrossEntropyDomain(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("not a descent direction (slope {0:.3e})")]
    NotDescent(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
