use serde::{Deserialize, Serialize};

use super::density::{
    relative_entropy_matrix, trace_distance, trace_norm_half, DensityMatrix, LogBase,
};
use super::linalg::CMatrix;
use super::BudgetError;

/// Slack on the Pinsker comparison.
pub const PINSKER_SLACK: f64 = 1e-9;
pub const MAX_PRODUCT_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PinskerCheck {
    /// `½‖ρ − σ‖₁`
    pub lhs: f64,
    /// `sqrt(D ln 2 / 2)` with `D` in bits.
    pub rhs: f64,
    pub holds: bool,
    /// The relative entropy was infinite, so the inequality holds trivially.
    pub infinite_qre: bool,
}

pub fn pinsker_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<PinskerCheck, BudgetError> {
    let lhs = trace_distance(rho, sigma)?;
    let d = relative_entropy_matrix(rho.matrix(), sigma.matrix(), LogBase::Two);
    if d.is_infinite() {
        return Ok(PinskerCheck {
            lhs,
            rhs: f64::INFINITY,
            holds: true,
            infinite_qre: true,
        });
    }
    let rhs = (d * std::f64::consts::LN_2 / 2.0).sqrt();
    Ok(PinskerCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + PINSKER_SLACK,
        infinite_qre: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductPinsker {
    pub k: u32,
    /// `¼‖ρ^⊗k − σ^⊗k‖₁`
    pub exact_lhs: f64,
    /// `sqrt(k D ln 2 / 8)` with `D` in bits.
    pub pinsker_rhs: f64,
    pub holds: bool,
}

fn tensor_power(m: &CMatrix, k: u32) -> CMatrix {
    let mut out = m.clone();
    for _ in 1..k {
        out = out.kron(m);
    }
    out
}

/// Pinsker over `k` independent copies, with the left side computed exactly
/// on the tensor powers.
pub fn product_pinsker_demo(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    k: u32,
) -> Result<ProductPinsker, BudgetError> {
    if rho.dim() != sigma.dim() {
        return Err(BudgetError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    if k == 0 {
        return Err(BudgetError::InvalidShots);
    }
    let dim = (rho.dim() as u64).checked_pow(k).unwrap_or(u64::MAX);
    if dim > MAX_PRODUCT_DIM as u64 {
        return Err(BudgetError::ProductTooLarge { d: rho.dim(), k });
    }
    let exact_lhs = 0.5
        * trace_norm_half(
            &tensor_power(rho.matrix(), k),
            &tensor_power(sigma.matrix(), k),
        );
    let d = relative_entropy_matrix(rho.matrix(), sigma.matrix(), LogBase::Two);
    let pinsker_rhs = (k as f64 * d * std::f64::consts::LN_2 / 8.0).sqrt();
    Ok(ProductPinsker {
        k,
        exact_lhs,
        pinsker_rhs,
        holds: exact_lhs <= pinsker_rhs + PINSKER_SLACK,
    })
}

/// Multi-shot covertness budget for a per-shot parameter `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovertBudget {
    pub delta: f64,
    pub k: u64,
    /// Per-shot relative-entropy budget `8 delta^2`.
    pub delta_qre: f64,
    /// `delta sqrt(k)`
    pub k_shot_bound: f64,
    /// `k delta_qre`: cap on the exponent of the adversary's missed-detection
    /// decay over `k` shots.
    pub stein_exponent_bound: f64,
}

pub fn k_shot_budget(delta: f64, k: u64) -> Result<CovertBudget, BudgetError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(BudgetError::InvalidDelta(delta));
    }
    if k == 0 {
        return Err(BudgetError::InvalidShots);
    }
    let delta_qre = 8.0 * delta * delta;
    Ok(CovertBudget {
        delta,
        k,
        delta_qre,
        k_shot_bound: delta * (k as f64).sqrt(),
        stein_exponent_bound: k as f64 * delta_qre,
    })
}

/// Largest `k` with `delta sqrt(k) <= target`; `None` when unbounded (`delta = 0`).
pub fn max_shots(delta: f64, target: f64) -> Result<Option<u64>, BudgetError> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(BudgetError::InvalidDelta(delta));
    }
    if !(target >= 0.0 && target.is_finite()) {
        return Err(BudgetError::InvalidDelta(target));
    }
    if delta == 0.0 {
        return Ok(None);
    }
    let ratio = target / delta;
    let mut k = (ratio * ratio).floor().min(u64::MAX as f64 / 2.0) as u64;
    while delta * ((k + 1) as f64).sqrt() <= target {
        k += 1;
    }
    while k > 0 && delta * (k as f64).sqrt() > target {
        k -= 1;
    }
    Ok(Some(k))
}
