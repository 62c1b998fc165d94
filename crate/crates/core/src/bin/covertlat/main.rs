mod args;
mod manifest;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use args::{
    BoundsArgs, BudgetArgs, Cli, Command, FormatArg, PinskerArgs, PlanArgs, ShapeArg, SimulateArgs,
    WhichArg,
};
use covertlat::budget::{
    k_shot_budget, max_shots, pinsker_check, product_pinsker_demo, DensityMatrix,
};
use covertlat::isoperimetry::{evaluate_bound, BoundReport, Boundary};
use covertlat::lattice::{
    diamond, hex_disk, random_connected_set, random_scattered_set, square_block, LatticeKind,
    LatticeVertex, Site, VertexSet,
};
use covertlat::placement::{
    bundled_device, load_device, plan, schedule_edges, square_overhead_bound, DeviceTopology,
    Placement, PlanError,
};
use covertlat::ramsey::{
    run_experiment, write_csv, CrosstalkModel, ExperimentConfig, FitOptions, RamseyConfig,
};

pub const SEED_ENV: &str = "COVERTLAT_SEED";

/// A flag combination that parses but makes no sense; exits with code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Everything a command produces; files are written together at the end.
#[derive(Default)]
pub struct Output {
    pub stdout: String,
    pub files: Vec<(String, Vec<u8>)>,
    pub inputs: BTreeMap<String, String>,
    pub config: serde_json::Value,
    /// Set when a checked property failed; outputs are still written.
    pub failure: Option<String>,
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(buf)
}

/// Resolves a device argument to a topology plus an input-hash entry. File
/// paths are made absolute so the manifest stays valid from any directory.
fn resolve_device(arg: &mut String) -> Result<(DeviceTopology, (String, String))> {
    let path = Path::new(arg.as_str());
    if path.is_file() {
        let abs = std::fs::canonicalize(path)?;
        let text =
            std::fs::read_to_string(&abs).with_context(|| format!("reading {}", abs.display()))?;
        let device = load_device(&text)?;
        *arg = abs.to_string_lossy().into_owned();
        return Ok((device, (arg.clone(), sha256_hex(text.as_bytes()))));
    }
    let stem = arg.trim_end_matches(".json").to_string();
    match bundled_device(&stem) {
        Some(text) => {
            *arg = stem.clone();
            Ok((
                load_device(text)?,
                (format!("bundled:{stem}"), sha256_hex(text.as_bytes())),
            ))
        }
        None => Err(usage(format!(
            "device `{arg}` is neither a file nor a bundled device"
        ))),
    }
}

fn parse_anchor(anchor: &Option<String>) -> Result<Option<LatticeVertex>> {
    anchor
        .as_deref()
        .map(|a| serde_json::from_str(a).map_err(|e| usage(format!("bad anchor `{a}`: {e}"))))
        .transpose()
}

fn origin(kind: LatticeKind) -> LatticeVertex {
    match kind.base() {
        LatticeKind::Square => LatticeVertex::Base(Site::Square { i: 0, j: 0 }),
        _ => LatticeVertex::Base(Site::Hex { i: 0, j: 0, s: 0 }),
    }
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Output> {
    let kind: LatticeKind = a.kind.parse().map_err(|e| usage(format!("{e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let sets: Vec<VertexSet> = match a.shape {
        ShapeArg::Disk => {
            vec![hex_disk(a.radius, kind, a.include_outgoing).map_err(|e| usage(e.to_string()))?]
        }
        ShapeArg::Diamond => {
            if kind != LatticeKind::Square {
                return Err(usage("diamond is a square-lattice shape"));
            }
            vec![diamond(a.radius)]
        }
        ShapeArg::Block => {
            let block = square_block(0, 0, a.width, a.height.unwrap_or(a.width));
            match kind {
                LatticeKind::Square => vec![block],
                LatticeKind::HeavySquare => vec![block.subdivided_closure(false)?],
                _ => return Err(usage("block needs a square or heavy-square lattice")),
            }
        }
        ShapeArg::Random | ShapeArg::Scattered => (0..a.count)
            .map(|_| {
                let size = a.size.unwrap_or_else(|| rng.random_range(1..=200));
                match a.shape {
                    ShapeArg::Random => {
                        random_connected_set(kind, origin(kind), size, &mut rng).map_err(Into::into)
                    }
                    _ => Ok(random_scattered_set(kind, size, &mut rng)),
                }
            })
            .collect::<Result<_>>()?,
    };
    let which: Vec<Boundary> = match a.which {
        WhichArg::Vertex => vec![Boundary::Vertex],
        WhichArg::Edge => vec![Boundary::Edge],
        WhichArg::Both => vec![Boundary::Vertex, Boundary::Edge],
    };
    let reports: Vec<BoundReport> = sets
        .iter()
        .flat_map(|s| which.iter().map(move |w| evaluate_bound(s, *w)))
        .collect();

    let mut out = Output::default();
    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(BoundReport::CSV_HEADER)?;
    for r in &reports {
        csv.write_record(r.csv_row())?;
    }
    let csv = csv.into_inner().map_err(|e| anyhow!("{e}"))?;
    out.stdout = match a.format {
        FormatArg::Csv => String::from_utf8(csv.clone())?,
        FormatArg::Json => serde_json::to_string_pretty(&reports)? + "\n",
    };
    out.files.push(("bounds.csv".into(), csv));
    out.files.push((
        "bounds.json".into(),
        (serde_json::to_string_pretty(&reports)? + "\n").into_bytes(),
    ));
    let bad = reports.iter().filter(|r| !r.satisfied).count();
    if bad > 0 {
        out.failure = Some(format!("{bad} bound(s) unsatisfied"));
    }
    Ok(out)
}

fn placement_csv(p: &Placement) -> Result<Vec<u8>> {
    #[derive(Serialize)]
    struct Row {
        qubit: u32,
        role: &'static str,
    }
    let mut rows: Vec<Row> = Vec::new();
    for (set, role) in [
        (&p.computational, "computational"),
        (&p.interior_idle, "interior_idle"),
        (&p.buffer, "buffer"),
        (&p.willie, "willie"),
    ] {
        rows.extend(set.iter().map(|&qubit| Row { qubit, role }));
    }
    rows.sort_by_key(|r| r.qubit);
    csv_bytes(&rows)
}

fn cmd_plan(a: &mut PlanArgs) -> Result<Output> {
    let (device, input) = resolve_device(&mut a.device)?;
    let anchor = parse_anchor(&a.anchor)?;
    let p = plan(&device, a.n, anchor.as_ref())?;
    let mut out = Output::default();
    out.inputs.insert(input.0, input.1);
    let json = serde_json::to_string_pretty(&p)? + "\n";
    let map = p.ascii_map(&device);
    if a.json {
        out.stdout.push_str(&json);
    }
    if a.ascii || !a.json {
        out.stdout.push_str(&map);
    }
    writeln!(
        out.stdout,
        "overhead={} bound={}",
        p.overhead,
        square_overhead_bound(p.n)
    )?;
    out.files.push(("placement.json".into(), json.into_bytes()));
    out.files.push(("placement.csv".into(), placement_csv(&p)?));
    out.files.push(("map.txt".into(), map.into_bytes()));
    Ok(out)
}

fn cmd_simulate(a: &mut SimulateArgs) -> Result<Output> {
    let (device, input) = resolve_device(&mut a.device)?;
    let anchor = parse_anchor(&a.anchor)?;
    for (name, v) in [
        ("zeta-nn-spread", a.zeta_nn_spread),
        ("baseline-jitter", a.baseline_jitter),
        ("t2", a.t2),
        ("f-osc", a.f_osc),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(usage(format!("--{name} must be finite and nonnegative")));
        }
    }
    if a.shots == 0 {
        return Err(usage("--shots must be at least 1"));
    }
    let placement = plan(&device, a.n, anchor.as_ref())?;
    let schedule = schedule_edges(&placement, &device);
    let model = CrosstalkModel {
        zeta_nn: a.zeta_nn,
        zeta_nn_spread: a.zeta_nn_spread,
        zeta_lr: a.zeta_lr,
        lr_decay: a.lr_decay,
        baseline_jitter_hz: a.baseline_jitter,
    };
    let cfg = ExperimentConfig {
        experiment: a.experiment.clone(),
        ramsey: RamseyConfig {
            f_osc: a.f_osc,
            shots: a.shots,
            seed: a.seed,
            ..RamseyConfig::default()
        },
        t2_star: a.t2,
        threshold_hz: a.threshold,
        fit: FitOptions {
            weighted: a.weighted,
            ..FitOptions::default()
        },
        keep_traces: a.traces,
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&device, &placement, &schedule, &model, &cfg)?;

    let mut out = Output::default();
    out.inputs.insert(input.0, input.1);
    out.config =
        serde_json::json!({ "experiment": cfg, "crosstalk": model, "edge_sets": schedule.sizes() });
    writeln!(out.stdout, "threshold_hz={}", result.threshold_hz)?;
    writeln!(out.stdout, "edge_sets={:?}", schedule.sizes())?;
    out.stdout
        .push_str(&String::from_utf8(csv_bytes(std::slice::from_ref(
            &result.summary,
        ))?)?);
    out.files
        .push(("records.csv".into(), csv_bytes(&result.records)?));
    out.files
        .push(("summary.csv".into(), csv_bytes(&[result.summary])?));
    out.files.push((
        "placement.json".into(),
        (serde_json::to_string_pretty(&placement)? + "\n").into_bytes(),
    ));
    if a.traces {
        out.files
            .push(("traces.csv".into(), csv_bytes(&result.traces)?));
    }
    Ok(out)
}

fn cmd_budget(a: &BudgetArgs) -> Result<Output> {
    if !(a.delta >= 0.0 && a.delta.is_finite()) {
        return Err(usage("--delta must be finite and nonnegative"));
    }
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    if a.target.is_some_and(|t| !(t >= 0.0 && t.is_finite())) {
        return Err(usage("--target must be finite and nonnegative"));
    }
    let b = k_shot_budget(a.delta, a.k)?;
    let shots = a.target.map(|t| max_shots(a.delta, t)).transpose()?;
    let mut json = serde_json::to_value(b)?;
    if let Some(t) = a.target {
        json["target"] = serde_json::json!(t);
        json["max_shots"] = match shots.flatten() {
            Some(k) => serde_json::json!(k),
            None => serde_json::json!("unbounded"),
        };
    }
    #[derive(Serialize)]
    struct Row {
        delta: f64,
        k: u64,
        delta_qre: f64,
        k_shot_bound: f64,
        stein_exponent_bound: f64,
        target: Option<f64>,
        max_shots: Option<String>,
    }
    let row = Row {
        delta: b.delta,
        k: b.k,
        delta_qre: b.delta_qre,
        k_shot_bound: b.k_shot_bound,
        stein_exponent_bound: b.stein_exponent_bound,
        target: a.target,
        max_shots: shots.map(|s| s.map_or("unbounded".to_string(), |k| k.to_string())),
    };
    let text = serde_json::to_string_pretty(&json)? + "\n";
    Ok(Output {
        stdout: text.clone(),
        files: vec![
            ("budget.json".into(), text.into_bytes()),
            ("budget.csv".into(), csv_bytes(&[row])?),
        ],
        ..Output::default()
    })
}

fn cmd_pinsker(a: &PinskerArgs) -> Result<Output> {
    if a.dim == 0 || a.dim > covertlat::budget::MAX_DIM {
        return Err(usage("--dim must be in 1..=8"));
    }
    #[derive(Serialize)]
    struct Row {
        index: usize,
        dim: usize,
        k: u32,
        lhs: f64,
        rhs: f64,
        holds: bool,
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::new();
    for index in 0..a.count {
        let rho = DensityMatrix::random(a.dim, &mut rng)?;
        let sigma = DensityMatrix::random(a.dim, &mut rng)?;
        let c = pinsker_check(&rho, &sigma)?;
        rows.push(Row {
            index,
            dim: a.dim,
            k: 0,
            lhs: c.lhs,
            rhs: c.rhs,
            holds: c.holds,
        });
        for k in 1..=a.k_max {
            let p = product_pinsker_demo(&rho, &sigma, k).map_err(|e| usage(e.to_string()))?;
            rows.push(Row {
                index,
                dim: a.dim,
                k,
                lhs: p.exact_lhs,
                rhs: p.pinsker_rhs,
                holds: p.holds,
            });
        }
    }
    let failed = rows.iter().filter(|r| !r.holds).count();
    let csv = csv_bytes(&rows)?;
    Ok(Output {
        stdout: format!("pairs={} rows={} failed={failed}\n", a.count, rows.len()),
        files: vec![("pinsker.csv".into(), csv)],
        failure: (failed > 0).then(|| format!("{failed} Pinsker check(s) failed")),
        ..Output::default()
    })
}

/// Runs a resolved command. The seed and device paths in `cmd` are rewritten
/// in place to the values actually used.
pub fn execute(cmd: &mut Command) -> Result<Output> {
    match cmd {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Budget(a) => cmd_budget(a),
        Command::Pinsker(a) => cmd_pinsker(a),
        Command::Rerun(_) => Err(usage("rerun cannot be nested")),
    }
}

fn apply_env_seed(cmd: &mut Command) -> Result<()> {
    let Ok(raw) = std::env::var(SEED_ENV) else {
        return Ok(());
    };
    let seed: u64 = raw
        .trim()
        .parse()
        .map_err(|_| usage(format!("{SEED_ENV}={raw} is not an unsigned integer")))?;
    match cmd {
        Command::Bounds(a) => a.seed = seed,
        Command::Simulate(a) => a.seed = seed,
        Command::Pinsker(a) => a.seed = seed,
        _ => {}
    }
    Ok(())
}

pub fn out_dir(cmd: &Command) -> Option<PathBuf> {
    match cmd {
        Command::Bounds(a) => a.out.clone(),
        Command::Plan(a) => a.out.clone(),
        Command::Simulate(a) => Some(a.out.clone()),
        Command::Budget(a) => a.out.clone(),
        Command::Pinsker(a) => a.out.clone(),
        Command::Rerun(a) => a.out.clone(),
    }
}

pub fn set_out_dir(cmd: &mut Command, dir: PathBuf) {
    match cmd {
        Command::Bounds(a) => a.out = Some(dir),
        Command::Plan(a) => a.out = Some(dir),
        Command::Simulate(a) => a.out = dir,
        Command::Budget(a) => a.out = Some(dir),
        Command::Pinsker(a) => a.out = Some(dir),
        Command::Rerun(a) => a.out = Some(dir),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        2
    } else if matches!(
        err.downcast_ref::<PlanError>(),
        Some(PlanError::Infeasible { .. })
    ) {
        3
    } else {
        4
    }
}

fn run(cli: Cli) -> Result<Option<String>> {
    let mut cmd = cli.command;
    if let Command::Rerun(r) = &cmd {
        return manifest::rerun(r);
    }
    apply_env_seed(&mut cmd)?;
    let output = execute(&mut cmd)?;
    print!("{}", output.stdout);
    if let Some(dir) = out_dir(&cmd) {
        manifest::emit(&cmd, &output, &dir)?;
    }
    Ok(output.failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(failure)) => {
            eprintln!("error: {failure}");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
