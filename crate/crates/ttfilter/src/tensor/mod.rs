//! Dense tensors and the tensor-train (TT) / quantized tensor-train (QTT)
//! format, with the algebra needed by the offline and online filtering
//! stages: TT-SVD compression, rounding, addition, Hadamard product,
//! operator application and composition, Kronecker assembly, inner products,
//! and binary mode reshaping.
//!
//! Conventions, fixed once for determinism across implementations:
//!
//! - Dense data is linearized in row-major order (last index fastest).
//! - QTT folding uses little-endian bits within each physical dimension
//!   (least significant bit first), dimensions concatenated in order.
//! - SVDs use a deterministic sign convention: the first nonzero entry of
//!   each left singular vector is positive.

mod dense;
mod fused;
mod linalg;
mod serial;
mod ttop;
mod ttvec;

pub use dense::DenseTensor;
pub use fused::{apply_truncated, compose_truncated};
pub use serial::{read_tt_operator, read_tt_vector, write_tt_operator, write_tt_vector};
pub use ttop::TtOperator;
pub use ttvec::TtVector;

pub(crate) use linalg::{thin_lq, thin_qr, thin_svd, truncation_rank, ThinSvd};

use thiserror::Error;

/// Entry cap for densification; tensors above this never materialize.
pub const DENSE_CAP: usize = 1 << 24;

#[derive(Debug, Error)]
pub enum TtError {
    #[error("empty tensor")]
    Empty,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dense size {size} exceeds cap {cap}")]
    DenseCap { size: usize, cap: usize },
    #[error("rank {needed} at bond {bond} exceeds cap {cap}")]
    RankOverflow { bond: usize, needed: usize, cap: usize },
    #[error("SVD did not converge for a {rows}x{cols} unfolding")]
    SvdFailure { rows: usize, cols: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("mode size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),
    #[error("serialization: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt container: {0}")]
    Corrupt(String),
}

/// Relative truncation tolerance plus an optional hard rank cap.
///
/// The tolerance is a bound on the relative Frobenius error of the whole
/// compression or rounding call; it is split evenly (in squared norm) across
/// the sequential per-bond truncations. Exceeding `max_rank` is an error, so
/// experiments fail loudly instead of silently degrading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_rank: Option<usize>,
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_rank: Option<usize>) -> Result<Self, TtError> {
        if !(tol >= 0.0) {
            return Err(TtError::InvalidPolicy(format!(
                "tolerance must be nonnegative, got {tol}"
            )));
        }
        if max_rank == Some(0) {
            return Err(TtError::InvalidPolicy("max_rank must be positive".into()));
        }
        Ok(Self { tol, max_rank })
    }

    /// Tolerance-only policy with unbounded rank.
    pub fn tol(tol: f64) -> Self {
        Self::new(tol, None).expect("nonnegative tolerance")
    }

    /// Lossless policy: only exact zeros are discarded.
    pub fn exact() -> Self {
        Self { tol: 0.0, max_rank: None }
    }

    pub(crate) fn check_rank(&self, bond: usize, needed: usize) -> Result<usize, TtError> {
        match self.max_rank {
            Some(cap) if needed > cap => Err(TtError::RankOverflow { bond, needed, cap }),
            _ => Ok(needed),
        }
    }
}
