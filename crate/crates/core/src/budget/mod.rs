//! Multi-shot covertness arithmetic and a small density-matrix toolkit
//! (trace distance, quantum relative entropy, Pinsker checks).

use thiserror::Error;

mod covert;
mod density;
mod linalg;

pub use covert::{
    k_shot_budget, max_shots, pinsker_check, product_pinsker_demo, CovertBudget, PinskerCheck,
    ProductPinsker, MAX_PRODUCT_DIM, PINSKER_SLACK,
};
pub use density::{
    quantum_relative_entropy, trace_distance, DensityMatrix, LogBase, MAX_DIM, SUPPORT_EPS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BudgetError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("dimension {0} exceeds the limit of 8")]
    TooLarge(usize),
    #[error("matrix is not Hermitian (defect {0})")]
    NotHermitian(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPositive(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("tensor power {d}^{k} exceeds 64")]
    ProductTooLarge { d: usize, k: u32 },
    #[error("delta must be finite and nonnegative, got {0}")]
    InvalidDelta(f64),
    #[error("shot count must be at least 1")]
    InvalidShots,
}
