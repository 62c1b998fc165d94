//! Device topologies, buffered placements, CZ edge-set scheduling and
//! spectator classification.

mod device;
mod plan;
mod schedule;

pub use device::{
    bundled_device, load_bundled, load_device, DeviceError, DeviceTopology, Qubit, QubitId,
    BUNDLED_DEVICES,
};
pub use plan::{plan, square_overhead_bound, Placement, PlanError, Shape};
pub use schedule::{classify_spectators, schedule_edges, EdgeSchedule, IndexError, SpectatorClass};
