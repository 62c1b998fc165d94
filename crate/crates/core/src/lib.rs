//! Covert placement planning on superconducting qubit lattices.
//!
//! * [`lattice`]: the square, hexagonal, heavy-hex and heavy-square lattices,
//!   vertex and edge boundaries, and the extremal shapes (diamonds, blocks,
//!   hexagonal disks).
//! * [`isoperimetry`]: closed-form boundary lower bounds and a checker.
//! * [`subdivision`]: arbitrary graphs, their once-subdivided versions and the
//!   boundary comparison between the two.
//! * [`placement`]: device topologies, buffered placements of an `n`-qubit
//!   computation, CZ edge-set scheduling and spectator classification.
//! * [`ramsey`]: the spectator Ramsey signal model, shot simulation, curve
//!   fitting, detection thresholds and whole-experiment simulation.
//! * [`budget`]: multi-shot covertness arithmetic backed by a small
//!   density-matrix toolkit (trace distance, relative entropy, Pinsker).

pub mod budget;
pub mod isoperimetry;
pub mod lattice;
pub mod placement;
pub mod ramsey;
pub mod subdivision;
