use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::detect::{calibrate_threshold, exceeds};
use super::fit::{fit_with, FitOptions, FitResult};
use super::model::{simulate_with, stream_id, stream_rng, RamseyConfig, SignalParams};
use super::RamseyError;
use crate::placement::{
    classify_spectators, DeviceTopology, EdgeSchedule, Placement, QubitId, SpectatorClass,
};

const ROLE_BASELINE_1: u64 = 1;
const ROLE_BASELINE_2: u64 = 2;
const ROLE_ACTIVE: u64 = 3;
const ROLE_ZETA: u64 = 4;
const ROLE_DETUNING: u64 = 5;

/// Injected frequency shifts, in Hz. A nearest-neighbour spectator receives
/// `zeta_nn + zeta_nn_spread * z` with `z` standard normal; a spectator `h >= 2`
/// couplers away receives `zeta_lr * lr_decay^(h - 2)`. Every simulated run
/// also drifts by a normal offset of scale `baseline_jitter_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkModel {
    pub zeta_nn: f64,
    pub zeta_nn_spread: f64,
    pub zeta_lr: f64,
    pub lr_decay: f64,
    pub baseline_jitter_hz: f64,
}

impl Default for CrosstalkModel {
    fn default() -> Self {
        CrosstalkModel {
            zeta_nn: 0.0,
            zeta_nn_spread: 0.0,
            zeta_lr: 0.0,
            lr_decay: 0.5,
            baseline_jitter_hz: 0.0,
        }
    }
}

impl CrosstalkModel {
    pub fn nearest_neighbour(zeta_nn: f64) -> CrosstalkModel {
        CrosstalkModel {
            zeta_nn,
            ..CrosstalkModel::default()
        }
    }

    /// Shift for a spectator `hops` couplers from the nearest active qubit.
    pub fn shift(&self, hops: Option<usize>, z: f64) -> f64 {
        match hops {
            Some(1) => self.zeta_nn + self.zeta_nn_spread * z,
            Some(h) if h >= 2 => self.zeta_lr * self.lr_decay.powi(h as i32 - 2),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub ramsey: RamseyConfig,
    /// Seconds.
    pub t2_star: f64,
    /// Half-width of the uniform spread of idle detunings around `f_osc`, Hz.
    pub detuning_spread_hz: f64,
    /// Seconds; only used for the CZ-count bookkeeping.
    pub cz_gate_time: f64,
    /// Fixed threshold; calibrated from the baselines when absent.
    pub threshold_hz: Option<f64>,
    pub fit: FitOptions,
    pub keep_traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: "exp".into(),
            ramsey: RamseyConfig::default(),
            t2_star: 20e-6,
            detuning_spread_hz: 50e3,
            cz_gate_time: 100e-9,
            threshold_hz: None,
            fit: FitOptions::default(),
            keep_traces: false,
        }
    }
}

/// One (spectator, edge set) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RamseyRecord {
    pub device: String,
    pub experiment: String,
    pub qubit: QubitId,
    pub edge_set: usize,
    pub nn: SpectatorClass,
    pub baseline_delta_hz: f64,
    pub active_delta_hz: f64,
    pub shift_hz: f64,
    pub detected: bool,
    pub fit_ok: bool,
    #[serde(skip)]
    pub injected_shift_hz: f64,
    #[serde(skip)]
    pub cz_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub n: usize,
    pub nn_detected: usize,
    pub nn_total: usize,
    pub nonnn_detected: usize,
    pub nonnn_total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub experiment: String,
    pub qubit: QubitId,
    pub edge_set: usize,
    pub role: String,
    pub tau_s: f64,
    pub p_hat: f64,
    pub p_fit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<RamseyRecord>,
    pub summary: SummaryRow,
    pub threshold_hz: f64,
    pub traces: Vec<TracePoint>,
}

/// Coupler-graph distance from every qubit to the nearest active endpoint.
fn hop_distances(device: &DeviceTopology, sources: &BTreeSet<QubitId>) -> BTreeMap<QubitId, usize> {
    let mut dist: BTreeMap<QubitId, usize> = sources.iter().map(|&q| (q, 0)).collect();
    let mut queue: VecDeque<QubitId> = sources.iter().copied().collect();
    while let Some(q) = queue.pop_front() {
        let d = dist[&q];
        for u in device.coupled(q) {
            if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(u) {
                slot.insert(d + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

struct Run {
    fit: FitResult,
    data: Vec<(f64, u32)>,
}

struct Task {
    qubit: QubitId,
    edge_set: usize,
    nn: SpectatorClass,
    hops: Option<usize>,
}

struct TaskOutcome {
    runs: [Run; 3],
    injected: f64,
}

fn simulate_run(
    cfg: &ExperimentConfig,
    model: &CrosstalkModel,
    base: &SignalParams,
    extra_hz: f64,
    stream: u64,
) -> Result<Run, RamseyError> {
    let mut rng = stream_rng(cfg.ramsey.seed, stream);
    let drift: f64 = rng.sample::<f64, _>(StandardNormal) * model.baseline_jitter_hz;
    let params = SignalParams {
        delta: base.delta + extra_hz + drift,
        ..*base
    };
    let data = simulate_with(&params, &cfg.ramsey, &mut rng);
    let fit = fit_with(&data, &cfg.ramsey, &cfg.fit)?;
    Ok(Run { fit, data })
}

fn run_task(
    cfg: &ExperimentConfig,
    model: &CrosstalkModel,
    task: &Task,
) -> Result<TaskOutcome, RamseyError> {
    let q = task.qubit as u64;
    let e = task.edge_set as u64;
    let mut det_rng = stream_rng(cfg.ramsey.seed, stream_id(&[q, ROLE_DETUNING]));
    let u: f64 = det_rng.random_range(-1.0..=1.0);
    let base = SignalParams::new(
        cfg.ramsey.f_osc + u * cfg.detuning_spread_hz,
        1.0 / cfg.t2_star,
    );
    let z: f64 = stream_rng(cfg.ramsey.seed, stream_id(&[q, e, ROLE_ZETA])).sample(StandardNormal);
    let injected = model.shift(task.hops, z);
    let b1 = simulate_run(cfg, model, &base, 0.0, stream_id(&[q, e, ROLE_BASELINE_1]))?;
    let b2 = simulate_run(cfg, model, &base, 0.0, stream_id(&[q, e, ROLE_BASELINE_2]))?;
    let active = simulate_run(cfg, model, &base, injected, stream_id(&[q, e, ROLE_ACTIVE]))?;
    Ok(TaskOutcome {
        runs: [b1, b2, active],
        injected,
    })
}

/// Simulates the spectator protocol for every edge set: two baselines and
/// one active run per (spectator, edge set). The recorded baseline is the
/// mean of the two baseline fits; the threshold is calibrated from the
/// baseline-to-baseline differences unless fixed in `cfg`.
pub fn run_experiment(
    device: &DeviceTopology,
    placement: &Placement,
    schedule: &EdgeSchedule,
    model: &CrosstalkModel,
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult, RamseyError> {
    cfg.ramsey.validate()?;
    if [cfg.t2_star, cfg.cz_gate_time]
        .iter()
        .any(|v| v.is_nan() || *v <= 0.0)
    {
        return Err(RamseyError::InvalidConfig(
            "t2_star and cz_gate_time must be positive".into(),
        ));
    }
    let mut tasks = Vec::new();
    for e in 0..schedule.len() {
        let classes = classify_spectators(device, placement, schedule, e)?;
        let endpoints: BTreeSet<QubitId> =
            schedule.sets[e].iter().flat_map(|&(a, b)| [a, b]).collect();
        let hops = hop_distances(device, &endpoints);
        for (q, nn) in classes {
            tasks.push(Task {
                qubit: q,
                edge_set: e,
                nn,
                hops: hops.get(&q).copied(),
            });
        }
    }
    let outcomes: Vec<TaskOutcome> = tasks
        .par_iter()
        .map(|t| run_task(cfg, model, t))
        .collect::<Result<_, _>>()?;

    let threshold_hz = match cfg.threshold_hz {
        Some(t) => t,
        None => {
            let pairs: Vec<(FitResult, FitResult)> = outcomes
                .iter()
                .map(|o| (o.runs[0].fit.clone(), o.runs[1].fit.clone()))
                .collect();
            calibrate_threshold(&pairs)?
        }
    };
    let max_tau = cfg.ramsey.tau_points.last().copied().unwrap_or(0.0);
    let cz_count = (max_tau / cfg.cz_gate_time + 1e-9).floor() as u64;

    let mut records = Vec::with_capacity(tasks.len());
    let mut traces = Vec::new();
    for (task, out) in tasks.iter().zip(&outcomes) {
        let [b1, b2, active] = &out.runs;
        let fit_ok = b1.fit.converged && b2.fit.converged && active.fit.converged;
        let baseline = 0.5 * (b1.fit.params.delta + b2.fit.params.delta);
        let shift = active.fit.params.delta - baseline;
        records.push(RamseyRecord {
            device: device.name().to_string(),
            experiment: cfg.experiment.clone(),
            qubit: task.qubit,
            edge_set: task.edge_set,
            nn: task.nn,
            baseline_delta_hz: baseline,
            active_delta_hz: active.fit.params.delta,
            shift_hz: shift,
            detected: fit_ok && exceeds(shift, threshold_hz),
            fit_ok,
            injected_shift_hz: out.injected,
            cz_count,
        });
        if cfg.keep_traces {
            for (role, run) in ["baseline1", "baseline2", "active"].iter().zip(&out.runs) {
                for (&(tau, count), p_fit) in
                    run.data.iter().zip(run.fit.curve(&cfg.ramsey.tau_points))
                {
                    traces.push(TracePoint {
                        experiment: cfg.experiment.clone(),
                        qubit: task.qubit,
                        edge_set: task.edge_set,
                        role: role.to_string(),
                        tau_s: tau,
                        p_hat: count as f64 / cfg.ramsey.shots as f64,
                        p_fit,
                    });
                }
            }
        }
    }
    let summary = summarize(&cfg.experiment, placement.n, &records);
    Ok(ExperimentResult {
        records,
        summary,
        threshold_hz,
        traces,
    })
}

/// Detected/total counts over the records with usable fits.
pub fn summarize(experiment: &str, n: usize, records: &[RamseyRecord]) -> SummaryRow {
    let mut row = SummaryRow {
        experiment: experiment.to_string(),
        n,
        nn_detected: 0,
        nn_total: 0,
        nonnn_detected: 0,
        nonnn_total: 0,
    };
    for r in records.iter().filter(|r| r.fit_ok) {
        match r.nn {
            SpectatorClass::Nn => {
                row.nn_total += 1;
                row.nn_detected += r.detected as usize;
            }
            SpectatorClass::NonNn => {
                row.nonnn_total += 1;
                row.nonnn_detected += r.detected as usize;
            }
        }
    }
    row
}

pub fn write_csv<W: Write, T: Serialize>(writer: W, rows: &[T]) -> Result<(), RamseyError> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>, RamseyError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}
