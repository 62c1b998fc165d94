use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "covertlat",
    version,
    about = "Covert placement planning and spectator-detection simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate isoperimetric bounds on constructed or random vertex sets.
    Bounds(BoundsArgs),
    /// Plan a buffered placement on a device.
    Plan(PlanArgs),
    /// Simulate the spectator Ramsey experiment on a planned placement.
    Simulate(SimulateArgs),
    /// Multi-shot covertness budget.
    Budget(BudgetArgs),
    /// Check the quantum Pinsker inequality on random state pairs.
    Pinsker(PinskerArgs),
    /// Re-run a command from its manifest.
    #[serde(skip)]
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    Disk,
    Diamond,
    Block,
    Random,
    Scattered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WhichArg {
    Vertex,
    Edge,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    /// square, hex, heavy-hex or heavy-square.
    #[arg(long)]
    pub kind: String,
    #[arg(long, value_enum)]
    pub shape: ShapeArg,
    /// Radius for disk and diamond shapes.
    #[arg(long, default_value_t = 0)]
    pub radius: u32,
    /// Block width (or side when height is omitted).
    #[arg(long, default_value_t = 1)]
    pub width: u32,
    #[arg(long)]
    pub height: Option<u32>,
    /// Set size for random shapes; drawn in 1..=200 when omitted.
    #[arg(long)]
    pub size: Option<usize>,
    /// Number of random sets.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = WhichArg::Vertex)]
    pub which: WhichArg,
    /// Heavy-hex disks: also take the subdivision vertices on outgoing edges.
    #[arg(long)]
    pub include_outgoing: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PlanArgs {
    /// Device JSON file, or a bundled name (emerald, ibm_fez).
    #[arg(long)]
    pub device: String,
    #[arg(long)]
    pub n: usize,
    /// Anchor vertex as JSON, e.g. "[1,1]" or "[0,2,1]".
    #[arg(long)]
    pub anchor: Option<String>,
    /// Print the placement JSON.
    #[arg(long)]
    pub json: bool,
    /// Print the ASCII map (default when --json is absent).
    #[arg(long)]
    pub ascii: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long)]
    pub device: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub anchor: Option<String>,
    /// Nearest-neighbour shift, Hz.
    #[arg(long, default_value_t = 0.0)]
    pub zeta_nn: f64,
    /// Standard deviation of the nearest-neighbour shift, Hz.
    #[arg(long, default_value_t = 0.0)]
    pub zeta_nn_spread: f64,
    /// Long-range shift two hops away, Hz.
    #[arg(long, default_value_t = 0.0)]
    pub zeta_lr: f64,
    /// Factor applied per extra hop beyond two.
    #[arg(long, default_value_t = 0.5)]
    pub lr_decay: f64,
    /// Per-run random drift of the idle frequency, Hz.
    #[arg(long, default_value_t = 0.0)]
    pub baseline_jitter: f64,
    /// Fixed detection threshold, Hz (calibrated from baselines otherwise).
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, default_value_t = 1024)]
    pub shots: u32,
    #[arg(long, default_value_t = 3.0e5)]
    pub f_osc: f64,
    /// T2* in seconds.
    #[arg(long, default_value_t = 20e-6)]
    pub t2: f64,
    #[arg(long, default_value = "exp")]
    pub experiment: String,
    /// Also write per-run (tau, p_hat, p_fit) traces.
    #[arg(long)]
    pub traces: bool,
    /// Weight fit residuals by binomial standard errors.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BudgetArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    /// Report the largest shot count keeping delta*sqrt(k) <= target.
    #[arg(long, allow_negative_numbers = true)]
    pub target: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PinskerArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Largest tensor power for the product check (0 disables it).
    #[arg(long, default_value_t = 0)]
    pub k_max: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output directory (defaults to the manifest's directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Regenerate into a scratch directory and compare with the recorded outputs.
    #[arg(long)]
    pub check: bool,
}
