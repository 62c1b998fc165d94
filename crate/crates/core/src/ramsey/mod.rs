//! Spectator Ramsey protocol: signal model, shot simulation, curve fitting,
//! threshold detection and whole-experiment aggregation.
//!
//! Frequencies are in Hz and delays in seconds at the public surface.

use thiserror::Error;

mod detect;
mod experiment;
mod fit;
mod model;

pub use detect::{
    calibrate_threshold, detect, exceeds, jitter_for_threshold, threshold_from_differences,
    Detection, EMERALD_THRESHOLD_HZ, FEZ_THRESHOLD_HZ,
};
pub use experiment::{
    read_csv, run_experiment, summarize, write_csv, CrosstalkModel, ExperimentConfig,
    ExperimentResult, RamseyRecord, SummaryRow, TracePoint,
};
pub use fit::{fit, fit_probabilities, fit_with, FitOptions, FitResult};
pub use model::{
    model_probability, simulate, simulate_with, stream_id, stream_rng, RamseyConfig, SignalParams,
};

#[derive(Debug, Error)]
pub enum RamseyError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least 5 data points, got {0}")]
    TooFewPoints(usize),
    #[error("need at least 2 converged baseline pairs, got {0}")]
    InsufficientPairs(usize),
    #[error(transparent)]
    EdgeSet(#[from] crate::placement::IndexError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
