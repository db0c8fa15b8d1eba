use thiserror::Error;

/// Errors raised by the chain engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("time {t} outside schedule range [0, {total}]")]
    OutOfRange { t: f64, total: f64 },

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frame is not fermionizable: Jz[{site}] = {value} (must be 0)")]
    NotFermionizable { site: usize, value: f64 },

    #[error("frame is not homogeneous: {0}")]
    Inhomogeneous(String),

    #[error("degenerate ground state: smallest excitation {eps:e} below {tol:e}; start from a gapped frame")]
    DegenerateGround { eps: f64, tol: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("integration step {step:e} underflows for interval length {span:e}")]
    Stiffness { step: f64, span: f64 },

    #[error("covariance matrix is not pure: |G G^T - I| = {deviation:e}")]
    NotPure { deviation: f64 },

    #[error("{sites} sites exceed the dense capacity of {max} sites")]
    Capacity { sites: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsafe gate path: Jz = {jz} must stay below W/(N-1) = {limit}")]
    UnsafePath { jz: f64, limit: f64 },

    #[error("odd chain length {0}; the Neel qubit requires an even number of sites")]
    OddChain(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
