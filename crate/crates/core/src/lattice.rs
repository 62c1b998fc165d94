//! Infinite square, hexagonal, heavy-hex and heavy-square lattices.
//!
//! Vertices are integer-exact. The honeycomb uses a two-site basis: every unit
//! cell `(i, j)` carries an `A` site (`s = 0`) and a `B` site (`s = 1`) with
//!
//! ```text
//! A(i, j) ~ B(i, j),  A(i, j) ~ B(i - 1, j),  A(i, j) ~ B(i, j - 1)
//! ```
//!
//! The heavy lattices are the once-subdivided base lattices: a vertex is either
//! a base site or a `Sub` vertex sitting on one base edge.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("vertex {vertex} is not a valid {kind} vertex")]
    InvalidVertex { vertex: String, kind: LatticeKind },
    #[error("vertex {vertex} does not belong to a {expected} vertex set")]
    KindMismatch {
        vertex: String,
        expected: LatticeKind,
    },
    #[error("shape is not defined on the {0} lattice")]
    UnsupportedKind(LatticeKind),
    #[error("unknown lattice kind `{0}`")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Square,
    Hex,
    HeavyHex,
    HeavySquare,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 4] = [
        LatticeKind::Square,
        LatticeKind::Hex,
        LatticeKind::HeavyHex,
        LatticeKind::HeavySquare,
    ];

    /// The lattice that gets subdivided (identity for the non-heavy kinds).
    pub fn base(self) -> LatticeKind {
        match self {
            LatticeKind::Square | LatticeKind::HeavySquare => LatticeKind::Square,
            LatticeKind::Hex | LatticeKind::HeavyHex => LatticeKind::Hex,
        }
    }

    pub fn is_heavy(self) -> bool {
        matches!(self, LatticeKind::HeavyHex | LatticeKind::HeavySquare)
    }

    pub fn heavy(self) -> LatticeKind {
        match self.base() {
            LatticeKind::Square => LatticeKind::HeavySquare,
            _ => LatticeKind::HeavyHex,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LatticeKind::Square => "square",
            LatticeKind::Hex => "hex",
            LatticeKind::HeavyHex => "heavy-hex",
            LatticeKind::HeavySquare => "heavy-square",
        }
    }

    /// Degree of `v`, assuming `v` is a valid vertex of this kind.
    pub fn degree(self, v: &LatticeVertex) -> usize {
        match v {
            LatticeVertex::Sub(..) => 2,
            LatticeVertex::Base(_) => match self.base() {
                LatticeKind::Square => 4,
                _ => 3,
            },
        }
    }

    /// Checks that `v` is a vertex of this lattice.
    pub fn validate(self, v: &LatticeVertex) -> Result<(), LatticeError> {
        let ok = match (self, v) {
            (LatticeKind::Square, LatticeVertex::Base(Site::Square { .. })) => true,
            (LatticeKind::Hex, LatticeVertex::Base(Site::Hex { s, .. })) => *s <= 1,
            (LatticeKind::HeavySquare, LatticeVertex::Base(Site::Square { .. })) => true,
            (LatticeKind::HeavyHex, LatticeVertex::Base(Site::Hex { s, .. })) => *s <= 1,
            (LatticeKind::HeavySquare, LatticeVertex::Sub(a, b)) => {
                matches!(a, Site::Square { .. }) && a < b && a.base_neighbors().contains(b)
            }
            (LatticeKind::HeavyHex, LatticeVertex::Sub(a, b)) => {
                matches!(a, Site::Hex { s: 0..=1, .. }) && a < b && a.base_neighbors().contains(b)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(LatticeError::InvalidVertex {
                vertex: v.to_string(),
                kind: self,
            })
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LatticeKind {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square" => Ok(LatticeKind::Square),
            "hex" => Ok(LatticeKind::Hex),
            "heavy-hex" | "heavyhex" => Ok(LatticeKind::HeavyHex),
            "heavy-square" | "heavysquare" => Ok(LatticeKind::HeavySquare),
            other => Err(LatticeError::UnknownKind(other.to_string())),
        }
    }
}

/// A site of one of the two base lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Square { i: i32, j: i32 },
    Hex { i: i32, j: i32, s: u8 },
}

impl Site {
    pub fn cell(&self) -> (i32, i32) {
        match *self {
            Site::Square { i, j } | Site::Hex { i, j, .. } => (i, j),
        }
    }

    pub fn translate(&self, di: i32, dj: i32) -> Site {
        match *self {
            Site::Square { i, j } => Site::Square {
                i: i + di,
                j: j + dj,
            },
            Site::Hex { i, j, s } => Site::Hex {
                i: i + di,
                j: j + dj,
                s,
            },
        }
    }

    /// Neighbours in the base (non-subdivided) lattice.
    pub fn base_neighbors(&self) -> Vec<Site> {
        match *self {
            Site::Square { i, j } => vec![
                Site::Square { i: i + 1, j },
                Site::Square { i: i - 1, j },
                Site::Square { i, j: j + 1 },
                Site::Square { i, j: j - 1 },
            ],
            Site::Hex { i, j, s: 0 } => vec![
                Site::Hex { i, j, s: 1 },
                Site::Hex { i: i - 1, j, s: 1 },
                Site::Hex { i, j: j - 1, s: 1 },
            ],
            Site::Hex { i, j, .. } => vec![
                Site::Hex { i, j, s: 0 },
                Site::Hex { i: i + 1, j, s: 0 },
                Site::Hex { i, j: j + 1, s: 0 },
            ],
        }
    }

    /// Planar drawing position: unit bond length on both lattices.
    pub fn position(&self) -> (f64, f64) {
        const R3: f64 = 1.732_050_807_568_877_2;
        match *self {
            Site::Square { i, j } => (i as f64, j as f64),
            Site::Hex { i, j, s } => {
                let (i, j) = (i as f64, j as f64);
                let x = R3 * i + 0.5 * R3 * j;
                let y = 1.5 * j;
                if s == 0 {
                    (x, y)
                } else {
                    (x + 0.5 * R3, y + 0.5)
                }
            }
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::Square { i, j } => write!(f, "({i},{j})"),
            Site::Hex { i, j, s } => write!(f, "({i},{j},{s})"),
        }
    }
}

/// A vertex of one of the four lattices. `Sub(a, b)` always has `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeVertex {
    Base(Site),
    Sub(Site, Site),
}

impl LatticeVertex {
    pub fn square(i: i32, j: i32) -> Self {
        LatticeVertex::Base(Site::Square { i, j })
    }

    pub fn hex(i: i32, j: i32, s: u8) -> Self {
        LatticeVertex::Base(Site::Hex { i, j, s })
    }

    /// Subdivision vertex on the base edge `{a, b}`; order of the endpoints is irrelevant.
    pub fn sub(a: Site, b: Site) -> Self {
        if a <= b {
            LatticeVertex::Sub(a, b)
        } else {
            LatticeVertex::Sub(b, a)
        }
    }

    pub fn base_site(&self) -> Option<Site> {
        match self {
            LatticeVertex::Base(s) => Some(*s),
            LatticeVertex::Sub(..) => None,
        }
    }

    pub fn is_sub(&self) -> bool {
        matches!(self, LatticeVertex::Sub(..))
    }

    /// Lattice translation by `(di, dj)` unit cells.
    pub fn translate(&self, di: i32, dj: i32) -> Self {
        match self {
            LatticeVertex::Base(s) => LatticeVertex::Base(s.translate(di, dj)),
            LatticeVertex::Sub(a, b) => {
                LatticeVertex::sub(a.translate(di, dj), b.translate(di, dj))
            }
        }
    }

    pub fn position(&self) -> (f64, f64) {
        match self {
            LatticeVertex::Base(s) => s.position(),
            LatticeVertex::Sub(a, b) => {
                let (pa, pb) = (a.position(), b.position());
                (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1))
            }
        }
    }

    /// Neighbours assuming `self` is valid for `kind`.
    pub(crate) fn adjacent(&self, kind: LatticeKind) -> Vec<LatticeVertex> {
        match self {
            LatticeVertex::Base(s) if kind.is_heavy() => s
                .base_neighbors()
                .into_iter()
                .map(|n| LatticeVertex::sub(*s, n))
                .collect(),
            LatticeVertex::Base(s) => s
                .base_neighbors()
                .into_iter()
                .map(LatticeVertex::Base)
                .collect(),
            LatticeVertex::Sub(a, b) => vec![LatticeVertex::Base(*a), LatticeVertex::Base(*b)],
        }
    }
}

impl fmt::Display for LatticeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeVertex::Base(s) => write!(f, "{s}"),
            LatticeVertex::Sub(a, b) => write!(f, "sub{a}{b}"),
        }
    }
}

// JSON form: `[i, j]`, `[i, j, s]`, or `["sub", u, w]`.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SiteRepr {
    Hex(i32, i32, u8),
    Square(i32, i32),
}

impl From<Site> for SiteRepr {
    fn from(s: Site) -> Self {
        match s {
            Site::Square { i, j } => SiteRepr::Square(i, j),
            Site::Hex { i, j, s } => SiteRepr::Hex(i, j, s),
        }
    }
}

impl From<SiteRepr> for Site {
    fn from(r: SiteRepr) -> Self {
        match r {
            SiteRepr::Square(i, j) => Site::Square { i, j },
            SiteRepr::Hex(i, j, s) => Site::Hex { i, j, s },
        }
    }
}

struct SubTag;

impl Serialize for SubTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str("sub")
    }
}

impl<'de> Deserialize<'de> for SubTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let tag = String::deserialize(deserializer)?;
        if tag == "sub" {
            Ok(SubTag)
        } else {
            Err(serde::de::Error::custom(format!(
                "expected \"sub\", found {tag:?}"
            )))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum VertexRepr {
    Sub(SubTag, SiteRepr, SiteRepr),
    Base(SiteRepr),
}

impl Serialize for LatticeVertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match *self {
            LatticeVertex::Base(s) => VertexRepr::Base(s.into()),
            LatticeVertex::Sub(a, b) => VertexRepr::Sub(SubTag, a.into(), b.into()),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LatticeVertex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match VertexRepr::deserialize(deserializer)? {
            VertexRepr::Base(s) => LatticeVertex::Base(s.into()),
            VertexRepr::Sub(_, a, b) => LatticeVertex::sub(a.into(), b.into()),
        })
    }
}

pub type Edge = (LatticeVertex, LatticeVertex);

fn edge(a: LatticeVertex, b: LatticeVertex) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Neighbours of `v` on the given lattice.
pub fn neighbors(v: &LatticeVertex, kind: LatticeKind) -> Result<VertexSet, LatticeError> {
    kind.validate(v)?;
    Ok(VertexSet {
        kind,
        vertices: v.adjacent(kind).into_iter().collect(),
    })
}

/// A finite set of vertices of a single lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    kind: LatticeKind,
    vertices: BTreeSet<LatticeVertex>,
}

impl VertexSet {
    pub fn empty(kind: LatticeKind) -> Self {
        VertexSet {
            kind,
            vertices: BTreeSet::new(),
        }
    }

    pub fn new<I>(kind: LatticeKind, vertices: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = LatticeVertex>,
    {
        let mut set = VertexSet::empty(kind);
        for v in vertices {
            set.insert(v)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, v: LatticeVertex) -> Result<bool, LatticeError> {
        if self.kind.validate(&v).is_err() {
            return Err(LatticeError::KindMismatch {
                vertex: v.to_string(),
                expected: self.kind,
            });
        }
        Ok(self.vertices.insert(v))
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &LatticeVertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LatticeVertex> {
        self.vertices.iter()
    }

    pub fn as_btree(&self) -> &BTreeSet<LatticeVertex> {
        &self.vertices
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.kind == other.kind && self.vertices.is_subset(&other.vertices)
    }

    pub fn translate(&self, di: i32, dj: i32) -> VertexSet {
        VertexSet {
            kind: self.kind,
            vertices: self.vertices.iter().map(|v| v.translate(di, dj)).collect(),
        }
    }

    /// Base-lattice sites of the set (`S ∩ V(G')` for heavy kinds).
    pub fn base_projection(&self) -> VertexSet {
        VertexSet {
            kind: self.kind.base(),
            vertices: self
                .vertices
                .iter()
                .filter(|v| !v.is_sub())
                .copied()
                .collect(),
        }
    }

    /// Vertex boundary `N(S)`: outside vertices adjacent to the set.
    pub fn vertex_boundary(&self) -> VertexSet {
        let vertices = self
            .vertices
            .iter()
            .flat_map(|v| v.adjacent(self.kind))
            .filter(|u| !self.vertices.contains(u))
            .collect();
        VertexSet {
            kind: self.kind,
            vertices,
        }
    }

    /// Edge boundary: edges with exactly one endpoint in the set.
    pub fn edge_boundary(&self) -> BTreeSet<Edge> {
        self.vertices
            .iter()
            .flat_map(|v| {
                v.adjacent(self.kind)
                    .into_iter()
                    .filter(|u| !self.vertices.contains(u))
                    .map(move |u| edge(*v, u))
            })
            .collect()
    }

    /// Edges with both endpoints in the set.
    pub fn induced_edges(&self) -> BTreeSet<Edge> {
        self.vertices
            .iter()
            .flat_map(|v| {
                v.adjacent(self.kind)
                    .into_iter()
                    .filter(|u| self.vertices.contains(u))
                    .map(move |u| edge(*v, u))
            })
            .collect()
    }

    /// Lifts a base-lattice set onto its subdivided lattice. With `either`, every
    /// subdivision vertex touching the set is added; otherwise only those whose
    /// two endpoints are both in the set.
    pub fn subdivided_closure(&self, either: bool) -> Result<VertexSet, LatticeError> {
        if self.kind.is_heavy() {
            return Err(LatticeError::UnsupportedKind(self.kind));
        }
        let mut vertices: BTreeSet<LatticeVertex> = self.vertices.clone();
        for v in &self.vertices {
            let s = v.base_site().expect("base lattice vertex");
            for n in s.base_neighbors() {
                if either || self.vertices.contains(&LatticeVertex::Base(n)) {
                    vertices.insert(LatticeVertex::sub(s, n));
                }
            }
        }
        Ok(VertexSet {
            kind: self.kind.heavy(),
            vertices,
        })
    }

    /// Canonical JSON: sorted list of coordinate tuples.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.vertices).expect("vertex serialization is infallible")
    }

    pub fn from_json(kind: LatticeKind, value: &serde_json::Value) -> Result<Self, LatticeError> {
        let vertices: Vec<LatticeVertex> =
            serde_json::from_value(value.clone()).map_err(|e| LatticeError::InvalidVertex {
                vertex: e.to_string(),
                kind,
            })?;
        VertexSet::new(kind, vertices)
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.vertices.serialize(serializer)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a LatticeVertex;
    type IntoIter = std::collections::btree_set::Iter<'a, LatticeVertex>;

    fn into_iter(self) -> Self::IntoIter {
        self.vertices.iter()
    }
}

/// Square-lattice ball `{(i, j) : |i| + |j| <= r}`.
pub fn diamond(r: u32) -> VertexSet {
    let r = r as i32;
    let vertices = (-r..=r)
        .flat_map(|i| {
            let w = r - i.abs();
            (-w..=w).map(move |j| LatticeVertex::square(i, j))
        })
        .collect();
    VertexSet {
        kind: LatticeKind::Square,
        vertices,
    }
}

/// `width × height` square-lattice block with lower-left corner `(i0, j0)`.
pub fn square_block(i0: i32, j0: i32, width: u32, height: u32) -> VertexSet {
    let vertices = (0..width as i32)
        .flat_map(|di| (0..height as i32).map(move |dj| LatticeVertex::square(i0 + di, j0 + dj)))
        .collect();
    VertexSet {
        kind: LatticeKind::Square,
        vertices,
    }
}

/// The six sites of the honeycomb face indexed by `(a, b)`.
pub fn hex_face(a: i32, b: i32) -> [Site; 6] {
    [
        Site::Hex { i: a, j: b, s: 0 },
        Site::Hex { i: a, j: b, s: 1 },
        Site::Hex {
            i: a + 1,
            j: b,
            s: 0,
        },
        Site::Hex {
            i: a + 1,
            j: b - 1,
            s: 1,
        },
        Site::Hex {
            i: a + 1,
            j: b - 1,
            s: 0,
        },
        Site::Hex {
            i: a,
            j: b - 1,
            s: 1,
        },
    ]
}

/// Face-graph distance between honeycomb faces; faces adjacent across an
/// edge differ by `±(1,0)`, `±(0,1)` or `±(1,-1)`.
pub fn face_distance(a: i32, b: i32) -> i32 {
    a.abs().max(b.abs()).max((a + b).abs())
}

/// Hexagonal disk of radius `r`: every face within face distance `r` of the
/// central face. On `HeavyHex` the subdivision vertices of all interior edges
/// are included, and with `include_outgoing` also those on the outgoing edges.
pub fn hex_disk(
    r: u32,
    kind: LatticeKind,
    include_outgoing: bool,
) -> Result<VertexSet, LatticeError> {
    if kind.base() != LatticeKind::Hex {
        return Err(LatticeError::UnsupportedKind(kind));
    }
    let r = r as i32;
    let mut vertices = BTreeSet::new();
    for a in -r..=r {
        for b in -r..=r {
            if face_distance(a, b) <= r {
                vertices.extend(hex_face(a, b).into_iter().map(LatticeVertex::Base));
            }
        }
    }
    let base = VertexSet {
        kind: LatticeKind::Hex,
        vertices,
    };
    match kind {
        LatticeKind::Hex => Ok(base),
        _ => base.subdivided_closure(include_outgoing),
    }
}

/// Grows a connected set of `size` vertices from `start`, adding a uniformly
/// chosen frontier vertex at every step.
pub fn random_connected_set<R: Rng + ?Sized>(
    kind: LatticeKind,
    start: LatticeVertex,
    size: usize,
    rng: &mut R,
) -> Result<VertexSet, LatticeError> {
    kind.validate(&start)?;
    let mut set = VertexSet::empty(kind);
    if size == 0 {
        return Ok(set);
    }
    let mut frontier: Vec<LatticeVertex> = vec![start];
    let mut seen: HashSet<LatticeVertex> = HashSet::from([start]);
    while set.len() < size {
        let idx = rng.random_range(0..frontier.len());
        let v = frontier.swap_remove(idx);
        set.vertices.insert(v);
        for u in v.adjacent(kind) {
            if seen.insert(u) {
                frontier.push(u);
            }
        }
    }
    Ok(set)
}

/// Samples `size` distinct vertices uniformly-ish from a box around the origin
/// wide enough that the result is usually disconnected.
pub fn random_scattered_set<R: Rng + ?Sized>(
    kind: LatticeKind,
    size: usize,
    rng: &mut R,
) -> VertexSet {
    let half = 2 + (2.0 * (size as f64).sqrt()).ceil() as i32;
    let mut set = VertexSet::empty(kind);
    while set.len() < size {
        let (i, j) = (
            rng.random_range(-half..=half),
            rng.random_range(-half..=half),
        );
        let site = match kind.base() {
            LatticeKind::Square => Site::Square { i, j },
            _ => Site::Hex {
                i,
                j,
                s: rng.random_range(0..=1),
            },
        };
        let v = if kind.is_heavy() && rng.random_bool(0.5) {
            let n = *site.base_neighbors().choose(rng).expect("nonempty");
            LatticeVertex::sub(site, n)
        } else {
            LatticeVertex::Base(site)
        };
        set.vertices.insert(v);
    }
    set
}

/// Breadth-first order of `set` starting from its smallest vertex; vertices in
/// other components follow in sorted order.
pub fn bfs_order(set: &VertexSet) -> Vec<LatticeVertex> {
    let mut order = Vec::with_capacity(set.len());
    let mut seen = HashSet::new();
    for root in set.iter() {
        if !seen.insert(*root) {
            continue;
        }
        let mut queue = VecDeque::from([*root]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<_> = v
                .adjacent(set.kind)
                .into_iter()
                .filter(|u| set.contains(u))
                .collect();
            next.sort();
            for u in next {
                if seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
    }
    order
}
