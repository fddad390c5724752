//! Finite-dimensional quantum information numerics and randomized checks of
//! the inequalities used by `ecdim`.
//!
//! States are dense complex matrices over `f64`. Tensor factors are tracked
//! explicitly so that marginals, conditional entropies and local channels can
//! be addressed by factor index.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod sample;
pub mod state;

pub use checks::{run_check, CheckKind, CheckReport, Comparison, Violation};
pub use state::{
    conditional_entropy, holevo_quantity, mutual_information, qcmi, trace_distance, von_neumann_entropy, ChannelRep,
    DensityMatrix, Ensemble,
};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("eigendecomposition did not converge")]
    Eigen,
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error(transparent)]
    Bound(#[from] ecdim::Error),
}

pub type Result<T, E = VerifyError> = std::result::Result<T, E>;
