use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dim(String),

    #[error("size {n} exceeds the supported maximum {max}")]
    Size { n: usize, max: usize },

    #[error("complex adjoint structure defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    Structure { defect: f64, tol: f64 },

    #[error("matrix is singular: pivot {pivot:.3e} below threshold {threshold:.3e}")]
    Singular { pivot: f64, threshold: f64 },

    #[error("complex rank {rank} is odd; quaternionic structure is broken")]
    RankParity { rank: usize },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    Convergence { sweeps: usize },

    #[error("eigenvalue cluster at ({u:.6}, {v:.6}) has odd cardinality {count}")]
    Parity { u: f64, v: f64, count: usize },

    #[error("invalid contour: {0}")]
    Contour(String),

    #[error("projector not idempotent after {nodes} nodes: residual {residual:.3e}")]
    NonIdempotent { nodes: usize, residual: f64 },

    #[error("projector rank {rank} differs from sphere multiplicity {mult}")]
    RankMismatch { rank: usize, mult: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
