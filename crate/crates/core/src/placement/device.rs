use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeKind, LatticeVertex, VertexSet};

pub type QubitId = u32;

#[derive(Debug, Error)]
pub enum DeviceError {
    #[error("malformed device document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("duplicate qubit id {0}")]
    DuplicateId(QubitId),
    #[error("qubits {0} and {1} share the lattice vertex {2}")]
    DuplicateVertex(QubitId, QubitId, String),
    #[error("qubit {id}: {vertex} is not a {kind} vertex")]
    InvalidVertex {
        id: QubitId,
        vertex: String,
        kind: LatticeKind,
    },
    #[error("coupler ({0}, {1}) references an unknown qubit")]
    UnknownQubit(QubitId, QubitId),
    #[error("coupler ({0}, {0}) is a self loop")]
    SelfCoupler(QubitId),
    #[error("coupler ({a}, {b}) joins non-adjacent vertices {va} and {vb}")]
    Geometry {
        a: QubitId,
        b: QubitId,
        va: String,
        vb: String,
    },
    #[error("excluded qubit {0} does not exist")]
    UnknownExcluded(QubitId),
    #[error("unknown bundled device `{0}`")]
    UnknownBundled(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qubit {
    pub id: QubitId,
    pub vertex: LatticeVertex,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DeviceDocument {
    name: String,
    kind: LatticeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    qubits: Vec<Qubit>,
    couplers: Vec<(QubitId, QubitId)>,
    #[serde(default)]
    excluded: Vec<QubitId>,
}

/// A validated device: qubits on lattice coordinates joined by couplers that
/// are all lattice edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DeviceDocument", into = "DeviceDocument")]
pub struct DeviceTopology {
    name: String,
    kind: LatticeKind,
    note: Option<String>,
    qubits: BTreeMap<QubitId, LatticeVertex>,
    couplers: BTreeSet<(QubitId, QubitId)>,
    excluded: BTreeSet<QubitId>,
    by_vertex: HashMap<LatticeVertex, QubitId>,
    adjacency: BTreeMap<QubitId, BTreeSet<QubitId>>,
}

pub const BUNDLED_DEVICES: [&str; 2] = ["emerald", "ibm_fez"];

/// Raw JSON of a bundled device file.
pub fn bundled_device(name: &str) -> Option<&'static str> {
    match name {
        "emerald" => Some(include_str!("../../devices/emerald.json")),
        "ibm_fez" => Some(include_str!("../../devices/ibm_fez.json")),
        _ => None,
    }
}

pub fn load_device(document: &str) -> Result<DeviceTopology, DeviceError> {
    let doc: DeviceDocument = serde_json::from_str(document)?;
    DeviceTopology::try_from(doc)
}

pub fn load_bundled(name: &str) -> Result<DeviceTopology, DeviceError> {
    let doc = bundled_device(name).ok_or_else(|| DeviceError::UnknownBundled(name.to_string()))?;
    load_device(doc)
}

impl TryFrom<DeviceDocument> for DeviceTopology {
    type Error = DeviceError;

    fn try_from(doc: DeviceDocument) -> Result<Self, Self::Error> {
        let mut qubits = BTreeMap::new();
        let mut by_vertex = HashMap::new();
        for q in doc.qubits {
            if doc.kind.validate(&q.vertex).is_err() {
                return Err(DeviceError::InvalidVertex {
                    id: q.id,
                    vertex: q.vertex.to_string(),
                    kind: doc.kind,
                });
            }
            if qubits.insert(q.id, q.vertex).is_some() {
                return Err(DeviceError::DuplicateId(q.id));
            }
            if let Some(other) = by_vertex.insert(q.vertex, q.id) {
                return Err(DeviceError::DuplicateVertex(
                    other,
                    q.id,
                    q.vertex.to_string(),
                ));
            }
        }
        let mut couplers = BTreeSet::new();
        let mut adjacency: BTreeMap<QubitId, BTreeSet<QubitId>> =
            qubits.keys().map(|&id| (id, BTreeSet::new())).collect();
        for (a, b) in doc.couplers {
            if a == b {
                return Err(DeviceError::SelfCoupler(a));
            }
            let (Some(va), Some(vb)) = (qubits.get(&a), qubits.get(&b)) else {
                return Err(DeviceError::UnknownQubit(a, b));
            };
            if !va.adjacent(doc.kind).contains(vb) {
                return Err(DeviceError::Geometry {
                    a,
                    b,
                    va: va.to_string(),
                    vb: vb.to_string(),
                });
            }
            couplers.insert((a.min(b), a.max(b)));
            adjacency.entry(a).or_default().insert(b);
            adjacency.entry(b).or_default().insert(a);
        }
        let mut excluded = BTreeSet::new();
        for id in doc.excluded {
            if !qubits.contains_key(&id) {
                return Err(DeviceError::UnknownExcluded(id));
            }
            excluded.insert(id);
        }
        Ok(DeviceTopology {
            name: doc.name,
            kind: doc.kind,
            note: doc.note,
            qubits,
            couplers,
            excluded,
            by_vertex,
            adjacency,
        })
    }
}

impl From<DeviceTopology> for DeviceDocument {
    fn from(d: DeviceTopology) -> Self {
        DeviceDocument {
            name: d.name,
            kind: d.kind,
            note: d.note,
            qubits: d
                .qubits
                .into_iter()
                .map(|(id, vertex)| Qubit { id, vertex })
                .collect(),
            couplers: d.couplers.into_iter().collect(),
            excluded: d.excluded.into_iter().collect(),
        }
    }
}

impl DeviceTopology {
    /// Fully coupled device on a finite lattice region; ids follow vertex order.
    pub fn from_region(name: &str, region: &VertexSet) -> DeviceTopology {
        let kind = region.kind();
        let qubits: BTreeMap<QubitId, LatticeVertex> = region
            .iter()
            .enumerate()
            .map(|(k, v)| (k as QubitId, *v))
            .collect();
        let by_vertex: HashMap<LatticeVertex, QubitId> =
            qubits.iter().map(|(id, v)| (*v, *id)).collect();
        let mut couplers = BTreeSet::new();
        let mut adjacency: BTreeMap<QubitId, BTreeSet<QubitId>> =
            qubits.keys().map(|&id| (id, BTreeSet::new())).collect();
        for (&a, v) in &qubits {
            for u in v.adjacent(kind) {
                if let Some(&b) = by_vertex.get(&u) {
                    couplers.insert((a.min(b), a.max(b)));
                    adjacency.get_mut(&a).expect("known id").insert(b);
                }
            }
        }
        DeviceTopology {
            name: name.to_string(),
            kind,
            note: None,
            qubits,
            couplers,
            excluded: BTreeSet::new(),
            by_vertex,
            adjacency,
        }
    }

    /// `width × height` square grid with every coupler present.
    pub fn square_grid(width: u32, height: u32) -> DeviceTopology {
        let region = crate::lattice::square_block(0, 0, width, height);
        DeviceTopology::from_region(&format!("grid{width}x{height}"), &region)
    }

    /// Returns a copy with `ids` marked as excluded.
    pub fn with_excluded<I: IntoIterator<Item = QubitId>>(
        mut self,
        ids: I,
    ) -> Result<Self, DeviceError> {
        for id in ids {
            if !self.qubits.contains_key(&id) {
                return Err(DeviceError::UnknownExcluded(id));
            }
            self.excluded.insert(id);
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    /// Qubits that are usable, i.e. not excluded.
    pub fn active_count(&self) -> usize {
        self.qubits.len() - self.excluded.len()
    }

    pub fn qubits(&self) -> impl Iterator<Item = (QubitId, &LatticeVertex)> {
        self.qubits.iter().map(|(id, v)| (*id, v))
    }

    pub fn vertex(&self, id: QubitId) -> Option<&LatticeVertex> {
        self.qubits.get(&id)
    }

    pub fn qubit_at(&self, v: &LatticeVertex) -> Option<QubitId> {
        self.by_vertex.get(v).copied()
    }

    pub fn couplers(&self) -> &BTreeSet<(QubitId, QubitId)> {
        &self.couplers
    }

    pub fn has_coupler(&self, a: QubitId, b: QubitId) -> bool {
        self.couplers.contains(&(a.min(b), a.max(b)))
    }

    pub fn coupled(&self, id: QubitId) -> impl Iterator<Item = QubitId> + '_ {
        self.adjacency.get(&id).into_iter().flatten().copied()
    }

    pub fn excluded(&self) -> &BTreeSet<QubitId> {
        &self.excluded
    }

    pub fn is_excluded(&self, id: QubitId) -> bool {
        self.excluded.contains(&id)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("device serialization is infallible")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_devices_load() {
        let emerald = load_bundled("emerald").unwrap();
        assert_eq!(emerald.len(), 54);
        assert_eq!(emerald.kind(), LatticeKind::Square);
        let fez = load_bundled("ibm_fez").unwrap();
        assert_eq!(fez.len(), 156);
        assert_eq!(fez.kind(), LatticeKind::HeavyHex);
        assert!(fez.note().is_some());
        assert!(load_bundled("sycamore").is_err());
    }

    #[test]
    fn geometry_is_enforced() {
        let doc = r#"{"name":"bad","kind":"square",
            "qubits":[{"id":0,"vertex":[0,0]},{"id":1,"vertex":[2,0]}],
            "couplers":[[0,1]]}"#;
        assert!(matches!(
            load_device(doc),
            Err(DeviceError::Geometry { .. })
        ));
    }

    #[test]
    fn structural_errors() {
        let dup = r#"{"name":"d","kind":"square",
            "qubits":[{"id":0,"vertex":[0,0]},{"id":0,"vertex":[1,0]}],"couplers":[]}"#;
        assert!(matches!(load_device(dup), Err(DeviceError::DuplicateId(0))));
        let same = r#"{"name":"d","kind":"square",
            "qubits":[{"id":0,"vertex":[0,0]},{"id":1,"vertex":[0,0]}],"couplers":[]}"#;
        assert!(matches!(
            load_device(same),
            Err(DeviceError::DuplicateVertex(..))
        ));
        let unknown = r#"{"name":"d","kind":"square",
            "qubits":[{"id":0,"vertex":[0,0]}],"couplers":[[0,7]]}"#;
        assert!(matches!(
            load_device(unknown),
            Err(DeviceError::UnknownQubit(0, 7))
        ));
        let looped = r#"{"name":"d","kind":"square",
            "qubits":[{"id":0,"vertex":[0,0]}],"couplers":[[0,0]]}"#;
        assert!(matches!(
            load_device(looped),
            Err(DeviceError::SelfCoupler(0))
        ));
        let wrong_kind = r#"{"name":"d","kind":"hex",
            "qubits":[{"id":0,"vertex":[0,0]}],"couplers":[]}"#;
        assert!(matches!(
            load_device(wrong_kind),
            Err(DeviceError::InvalidVertex { .. })
        ));
        let excl = r#"{"name":"d","kind":"square",
            "qubits":[{"id":0,"vertex":[0,0]}],"couplers":[],"excluded":[3]}"#;
        assert!(matches!(
            load_device(excl),
            Err(DeviceError::UnknownExcluded(3))
        ));
        assert!(matches!(
            load_device("{\"name\":1}"),
            Err(DeviceError::Schema(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let fez = load_bundled("ibm_fez").unwrap();
        let text = serde_json::to_string(&fez).unwrap();
        let back = load_device(&text).unwrap();
        assert_eq!(back.couplers(), fez.couplers());
        assert_eq!(back.qubits().count(), 156);
    }

    #[test]
    fn grid_couplers() {
        let g = DeviceTopology::square_grid(3, 2);
        assert_eq!(g.len(), 6);
        assert_eq!(g.couplers().len(), 7);
        let corner = g.qubit_at(&LatticeVertex::square(0, 0)).unwrap();
        assert_eq!(g.coupled(corner).count(), 2);
    }
}
