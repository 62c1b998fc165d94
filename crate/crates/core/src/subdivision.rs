//! Once-subdivided graphs and the boundary comparison between a graph and its
//! subdivision.
//!
//! For `G` obtained from `G'` by inserting one degree-2 vertex on every edge and
//! any `S ⊆ V(G)` with `S ∩ V(G') = S'`:
//!
//! * `|N_G(S)| >= |N_G'(S')|`, with equality for `S'` plus every subdivision
//!   vertex touching `S'`;
//! * `|E_G(S)| >= |E_G'(S')|`, with equality for `S'` plus every subdivision
//!   vertex whose two endpoints lie in `S'`.
//!
//! [`SubdividedGraph::boundary_injection`] and
//! [`SubdividedGraph::edge_boundary_injection`] build the explicit injections
//! witnessing the two inequalities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeVertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(String),
    #[error("edge references unknown vertex {0}")]
    DanglingEdge(String),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(String),
    #[error("S ∩ V(G') differs from S' (first mismatch: {0})")]
    Incompatible(String),
}

/// Simple undirected graph with ordered vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "RawGraph<V>",
    into = "RawGraph<V>",
    bound(
        serialize = "V: Ord + Clone + Debug + Serialize",
        deserialize = "V: Ord + Clone + Debug + Deserialize<'de>"
    )
)]
pub struct FiniteGraph<V: Ord + Clone + Debug> {
    vertices: BTreeSet<V>,
    edges: BTreeSet<(V, V)>,
    adjacency: BTreeMap<V, BTreeSet<V>>,
}

/// JSON document form: `{"vertices": [...], "edges": [[u, w], ...]}`.
#[derive(Serialize, Deserialize)]
pub struct RawGraph<V> {
    pub vertices: Vec<V>,
    pub edges: Vec<(V, V)>,
}

impl<V: Ord + Clone + Debug> TryFrom<RawGraph<V>> for FiniteGraph<V> {
    type Error = SubdivisionError;

    fn try_from(raw: RawGraph<V>) -> Result<Self, Self::Error> {
        FiniteGraph::new(raw.vertices, raw.edges)
    }
}

impl<V: Ord + Clone + Debug> From<FiniteGraph<V>> for RawGraph<V> {
    fn from(g: FiniteGraph<V>) -> Self {
        RawGraph {
            vertices: g.vertices.into_iter().collect(),
            edges: g.edges.into_iter().collect(),
        }
    }
}

fn ordered<V: Ord>(a: V, b: V) -> (V, V) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl<V: Ord + Clone + Debug> FiniteGraph<V> {
    pub fn new<I, E>(vertices: I, edges: E) -> Result<Self, SubdivisionError>
    where
        I: IntoIterator<Item = V>,
        E: IntoIterator<Item = (V, V)>,
    {
        let vertices: BTreeSet<V> = vertices.into_iter().collect();
        let mut adjacency: BTreeMap<V, BTreeSet<V>> = vertices
            .iter()
            .map(|v| (v.clone(), BTreeSet::new()))
            .collect();
        let mut edge_set = BTreeSet::new();
        for (u, w) in edges {
            if u == w {
                return Err(SubdivisionError::SelfLoop(format!("{u:?}")));
            }
            for x in [&u, &w] {
                if !vertices.contains(x) {
                    return Err(SubdivisionError::DanglingEdge(format!("{x:?}")));
                }
            }
            adjacency.get_mut(&u).expect("checked").insert(w.clone());
            adjacency.get_mut(&w).expect("checked").insert(u.clone());
            edge_set.insert(ordered(u, w));
        }
        Ok(FiniteGraph {
            vertices,
            edges: edge_set,
            adjacency,
        })
    }

    pub fn vertices(&self) -> &BTreeSet<V> {
        &self.vertices
    }

    /// Edges as `(u, w)` with `u < w`.
    pub fn edges(&self) -> &BTreeSet<(V, V)> {
        &self.edges
    }

    pub fn neighbors(&self, v: &V) -> impl Iterator<Item = &V> {
        self.adjacency.get(v).into_iter().flatten()
    }

    pub fn degree(&self, v: &V) -> usize {
        self.adjacency.get(v).map_or(0, BTreeSet::len)
    }

    fn check_subset(&self, set: &BTreeSet<V>) -> Result<(), SubdivisionError> {
        match set.iter().find(|v| !self.vertices.contains(v)) {
            Some(v) => Err(SubdivisionError::UnknownVertex(format!("{v:?}"))),
            None => Ok(()),
        }
    }

    pub fn vertex_boundary(&self, set: &BTreeSet<V>) -> Result<BTreeSet<V>, SubdivisionError> {
        self.check_subset(set)?;
        Ok(set
            .iter()
            .flat_map(|v| self.neighbors(v))
            .filter(|u| !set.contains(u))
            .cloned()
            .collect())
    }

    pub fn edge_boundary(&self, set: &BTreeSet<V>) -> Result<BTreeSet<(V, V)>, SubdivisionError> {
        self.check_subset(set)?;
        Ok(self
            .edges
            .iter()
            .filter(|(u, w)| set.contains(u) != set.contains(w))
            .cloned()
            .collect())
    }
}

/// Vertex of a subdivided graph: an original vertex or the vertex inserted on
/// the original edge `{u, w}` (stored with `u < w`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node<V> {
    Base(V),
    Sub(V, V),
}

impl<V: Ord> Node<V> {
    pub fn sub(u: V, w: V) -> Self {
        let (u, w) = ordered(u, w);
        Node::Sub(u, w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdividedGraph<V: Ord + Clone + Debug> {
    base: FiniteGraph<V>,
    graph: FiniteGraph<Node<V>>,
}

/// Inserts one degree-2 vertex on every edge of `base`.
pub fn subdivide<V: Ord + Clone + Debug>(base: &FiniteGraph<V>) -> SubdividedGraph<V> {
    let vertices = base.vertices.iter().cloned().map(Node::Base).chain(
        base.edges
            .iter()
            .map(|(u, w)| Node::Sub(u.clone(), w.clone())),
    );
    let edges = base.edges.iter().flat_map(|(u, w)| {
        let mid = Node::Sub(u.clone(), w.clone());
        [
            (Node::Base(u.clone()), mid.clone()),
            (mid, Node::Base(w.clone())),
        ]
    });
    let graph = FiniteGraph::new(vertices, edges).expect("subdivision of a valid graph is valid");
    SubdividedGraph {
        base: base.clone(),
        graph,
    }
}

impl<V: Ord + Clone + Debug> SubdividedGraph<V> {
    pub fn base(&self) -> &FiniteGraph<V> {
        &self.base
    }

    pub fn graph(&self) -> &FiniteGraph<Node<V>> {
        &self.graph
    }

    /// `S ∩ V(G')`.
    pub fn base_part(set: &BTreeSet<Node<V>>) -> BTreeSet<V> {
        set.iter()
            .filter_map(|n| match n {
                Node::Base(v) => Some(v.clone()),
                Node::Sub(..) => None,
            })
            .collect()
    }

    fn superset(
        &self,
        base_set: &BTreeSet<V>,
        both: bool,
    ) -> Result<BTreeSet<Node<V>>, SubdivisionError> {
        self.base.check_subset(base_set)?;
        let mut out: BTreeSet<Node<V>> = base_set.iter().cloned().map(Node::Base).collect();
        for (u, w) in &self.base.edges {
            let (iu, iw) = (base_set.contains(u), base_set.contains(w));
            if (both && iu && iw) || (!both && (iu || iw)) {
                out.insert(Node::Sub(u.clone(), w.clone()));
            }
        }
        Ok(out)
    }

    /// `S'` plus every subdivision vertex with at least one endpoint in `S'`;
    /// its vertex boundary in `G` equals `N_G'(S')` as a set.
    pub fn optimal_vertex_superset(
        &self,
        base_set: &BTreeSet<V>,
    ) -> Result<BTreeSet<Node<V>>, SubdivisionError> {
        self.superset(base_set, false)
    }

    /// `S'` plus every subdivision vertex with both endpoints in `S'`; each
    /// boundary edge of `S'` then contributes exactly one boundary edge in `G`.
    pub fn optimal_edge_superset(
        &self,
        base_set: &BTreeSet<V>,
    ) -> Result<BTreeSet<Node<V>>, SubdivisionError> {
        self.superset(base_set, true)
    }

    fn check_compatible(
        &self,
        set: &BTreeSet<Node<V>>,
        base_set: &BTreeSet<V>,
    ) -> Result<(), SubdivisionError> {
        self.graph.check_subset(set)?;
        self.base.check_subset(base_set)?;
        let induced = Self::base_part(set);
        match induced.symmetric_difference(base_set).next() {
            Some(v) => Err(SubdivisionError::Incompatible(format!("{v:?}"))),
            None => Ok(()),
        }
    }

    /// Injection `f: N_G'(S') -> N_G(S)`.
    ///
    /// For `u ∈ N_G'(S')` take the witness `w(u)`, the smallest neighbour of `u`
    /// inside `S'`; then `f(u) = u` if the subdivision vertex of `{u, w(u)}` is
    /// in `S`, and `f(u)` is that subdivision vertex otherwise.
    pub fn boundary_injection(
        &self,
        set: &BTreeSet<Node<V>>,
        base_set: &BTreeSet<V>,
    ) -> Result<BTreeMap<V, Node<V>>, SubdivisionError> {
        self.check_compatible(set, base_set)?;
        let boundary = self.base.vertex_boundary(base_set)?;
        Ok(boundary
            .into_iter()
            .map(|u| {
                let witness = self
                    .base
                    .neighbors(&u)
                    .find(|w| base_set.contains(w))
                    .expect("boundary vertex has a neighbour in S'")
                    .clone();
                let mid = Node::sub(u.clone(), witness);
                let image = if set.contains(&mid) {
                    Node::Base(u.clone())
                } else {
                    mid
                };
                (u, image)
            })
            .collect())
    }

    /// Injection from `E_G'(S')` into `E_G(S)`: a boundary edge `{u, w}` with
    /// `u ∈ S'` maps to `{v_uw, w}` when `v_uw ∈ S` and to `{u, v_uw}` otherwise.
    #[allow(clippy::type_complexity)]
    pub fn edge_boundary_injection(
        &self,
        set: &BTreeSet<Node<V>>,
        base_set: &BTreeSet<V>,
    ) -> Result<BTreeMap<(V, V), (Node<V>, Node<V>)>, SubdivisionError> {
        self.check_compatible(set, base_set)?;
        let boundary = self.base.edge_boundary(base_set)?;
        Ok(boundary
            .into_iter()
            .map(|(a, b)| {
                let (inside, outside) = if base_set.contains(&a) {
                    (&a, &b)
                } else {
                    (&b, &a)
                };
                let mid = Node::sub(a.clone(), b.clone());
                let image = if set.contains(&mid) {
                    ordered(mid, Node::Base(outside.clone()))
                } else {
                    ordered(Node::Base(inside.clone()), mid)
                };
                ((a, b), image)
            })
            .collect())
    }
}

/// Induced subgraph of a lattice on the vertices of `set`.
pub fn lattice_patch(set: &VertexSet) -> FiniteGraph<LatticeVertex> {
    FiniteGraph::new(set.iter().copied(), set.induced_edges())
        .expect("lattice edges join lattice vertices")
}
