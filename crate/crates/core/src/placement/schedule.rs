use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::device::{DeviceTopology, QubitId};
use super::plan::Placement;

/// Ordered CZ edge sets; every set is a matching.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeSchedule {
    pub sets: Vec<Vec<(QubitId, QubitId)>>,
}

impl EdgeSchedule {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = &(QubitId, QubitId)> {
        self.sets.iter().flatten()
    }
}

/// Greedy proper edge colouring of the couplers inside the computational set:
/// edges in sorted order, each into the lowest-index set it does not conflict with.
pub fn schedule_edges(placement: &Placement, device: &DeviceTopology) -> EdgeSchedule {
    let mut sets: Vec<Vec<(QubitId, QubitId)>> = Vec::new();
    let mut busy: Vec<BTreeSet<QubitId>> = Vec::new();
    for &(a, b) in device.couplers() {
        if !(placement.computational.contains(&a) && placement.computational.contains(&b)) {
            continue;
        }
        let slot = busy
            .iter()
            .position(|used| !used.contains(&a) && !used.contains(&b));
        let slot = slot.unwrap_or_else(|| {
            sets.push(Vec::new());
            busy.push(BTreeSet::new());
            sets.len() - 1
        });
        sets[slot].push((a, b));
        busy[slot].extend([a, b]);
    }
    EdgeSchedule { sets }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpectatorClass {
    #[serde(rename = "NN")]
    Nn,
    #[serde(rename = "nonNN")]
    NonNn,
}

impl SpectatorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectatorClass::Nn => "NN",
            SpectatorClass::NonNn => "nonNN",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("edge set index {index} out of range for a schedule of {len} sets")]
pub struct IndexError {
    pub index: usize,
    pub len: usize,
}

/// Classifies every buffer and willie qubit for one edge set: NN when coupled
/// to an endpoint of an active CZ pair.
pub fn classify_spectators(
    device: &DeviceTopology,
    placement: &Placement,
    schedule: &EdgeSchedule,
    edge_set_index: usize,
) -> Result<BTreeMap<QubitId, SpectatorClass>, IndexError> {
    let set = schedule.sets.get(edge_set_index).ok_or(IndexError {
        index: edge_set_index,
        len: schedule.len(),
    })?;
    let near: BTreeSet<QubitId> = set
        .iter()
        .flat_map(|&(a, b)| device.coupled(a).chain(device.coupled(b)))
        .collect();
    Ok(placement
        .buffer
        .iter()
        .chain(&placement.willie)
        .map(|&q| {
            let class = if near.contains(&q) {
                SpectatorClass::Nn
            } else {
                SpectatorClass::NonNn
            };
            (q, class)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::placement::device::load_bundled;
    use crate::placement::plan::plan;

    #[test]
    fn emerald_layouts() {
        let emerald = load_bundled("emerald").unwrap();
        let p = plan(&emerald, 2, None).unwrap();
        let s = schedule_edges(&p, &emerald);
        assert_eq!(s.sizes(), vec![1]);
        let classes = classify_spectators(&emerald, &p, &s, 0).unwrap();
        let nn = classes
            .values()
            .filter(|c| **c == SpectatorClass::Nn)
            .count();
        assert_eq!(nn, 6);

        let p = plan(&emerald, 4, None).unwrap();
        assert_eq!(schedule_edges(&p, &emerald).sizes(), vec![2, 2]);
    }

    #[test]
    fn bad_index_and_empty_set() {
        let g = DeviceTopology::square_grid(3, 3);
        let p = plan(&g, 1, None).unwrap();
        let s = schedule_edges(&p, &g);
        assert!(s.is_empty());
        assert_eq!(
            classify_spectators(&g, &p, &s, 0),
            Err(IndexError { index: 0, len: 0 })
        );
        let empty = EdgeSchedule { sets: vec![vec![]] };
        let classes = classify_spectators(&g, &p, &empty, 0).unwrap();
        assert_eq!(classes.len(), 8);
        assert!(classes.values().all(|c| *c == SpectatorClass::NonNn));
    }
}
