use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use super::RamseyError;

/// Reference detection thresholds reported for the two hardware devices.
pub const EMERALD_THRESHOLD_HZ: f64 = 12.85e3;
pub const FEZ_THRESHOLD_HZ: f64 = 3.15e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub shift_hz: f64,
    pub detected: bool,
    pub fit_ok: bool,
}

/// `|shift| > threshold`; a tie is not a detection.
pub fn exceeds(shift_hz: f64, threshold_hz: f64) -> bool {
    shift_hz.abs() > threshold_hz
}

/// Shift between two fits; a non-converged fit is never a detection.
pub fn detect(baseline: &FitResult, active: &FitResult, threshold_hz: f64) -> Detection {
    let shift_hz = active.params.delta - baseline.params.delta;
    let fit_ok = baseline.converged && active.converged;
    Detection {
        shift_hz,
        detected: fit_ok && exceeds(shift_hz, threshold_hz),
        fit_ok,
    }
}

/// Twice the population standard deviation of the given shifts.
pub fn threshold_from_differences(diffs: &[f64]) -> Result<f64, RamseyError> {
    if diffs.len() < 2 {
        return Err(RamseyError::InsufficientPairs(diffs.len()));
    }
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    Ok(2.0 * var.sqrt())
}

/// Threshold from baseline-to-baseline differences. Pairs with a
/// non-converged fit are skipped.
pub fn calibrate_threshold(pairs: &[(FitResult, FitResult)]) -> Result<f64, RamseyError> {
    let diffs: Vec<f64> = pairs
        .iter()
        .filter(|(a, b)| a.converged && b.converged)
        .map(|(a, b)| b.params.delta - a.params.delta)
        .collect();
    threshold_from_differences(&diffs)
}

/// Per-run baseline jitter that, on top of a fit noise `fit_sigma_hz`, makes
/// the calibrated threshold come out near `threshold_hz`.
pub fn jitter_for_threshold(threshold_hz: f64, fit_sigma_hz: f64) -> f64 {
    let per_run = (threshold_hz / 2.0).powi(2) / 2.0;
    (per_run - fit_sigma_hz.powi(2)).max(0.0).sqrt()
}
