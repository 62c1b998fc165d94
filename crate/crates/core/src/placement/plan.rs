use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::device::{DeviceTopology, QubitId};
use crate::lattice::{bfs_order, hex_disk, square_block, LatticeKind, LatticeVertex, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("n must be at least 1")]
    EmptyComputation,
    #[error(
        "no feasible placement of {n} qubits on {device}; {}",
        match largest_feasible { Some(m) => format!("largest feasible n is {m}"), None => "nothing fits".to_string() }
    )]
    Infeasible {
        n: usize,
        device: String,
        largest_feasible: Option<usize>,
    },
    #[error("anchor {0} cannot host the reference vertex of the placement shape")]
    InvalidAnchor(String),
}

/// Region shape before translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Shape {
    Block { width: u32, height: u32 },
    HeavyBlock { side: u32 },
    Disk { radius: u32 },
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Block { width, height } => write!(f, "{width}x{height} block"),
            Shape::HeavyBlock { side } => write!(f, "{side}x{side} heavy block"),
            Shape::Disk { radius } => write!(f, "disk r={radius}"),
        }
    }
}

/// A buffered placement. The four id sets partition the non-excluded qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Placement {
    pub device: String,
    pub kind: LatticeKind,
    pub n: usize,
    pub shape: Shape,
    /// Where the smallest vertex of the untranslated shape lands.
    pub anchor: LatticeVertex,
    pub computational: BTreeSet<QubitId>,
    pub interior_idle: BTreeSet<QubitId>,
    pub buffer: BTreeSet<QubitId>,
    pub willie: BTreeSet<QubitId>,
    pub overhead: usize,
}

/// Overhead ceiling for square devices: `2 sqrt(n) + 4 ceil(sqrt(n))`.
pub fn square_overhead_bound(n: usize) -> f64 {
    let r = (n as f64).sqrt();
    2.0 * r + 4.0 * ceil_sqrt(n) as f64
}

pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let mut k = (n as f64).sqrt() as usize;
    while k * k < n {
        k += 1;
    }
    while k > 0 && (k - 1) * (k - 1) >= n {
        k -= 1;
    }
    k
}

struct Template {
    shape: Shape,
    order: Vec<LatticeVertex>,
    boundary: VertexSet,
    reference: LatticeVertex,
}

impl Template {
    fn new(shape: Shape, region: VertexSet, order: Vec<LatticeVertex>) -> Template {
        let reference = *region.iter().next().expect("nonempty shape");
        Template {
            shape,
            boundary: region.vertex_boundary(),
            order,
            reference,
        }
    }
}

fn templates(kind: LatticeKind, n: usize) -> Vec<Template> {
    match kind {
        LatticeKind::Square => {
            let k = ceil_sqrt(n) as u32;
            let m = n.div_ceil(k as usize) as u32;
            let mut dims = vec![(k, m)];
            if m != k {
                dims.push((m, k));
            }
            dims.into_iter()
                .map(|(w, h)| {
                    let order = (0..h as i32)
                        .flat_map(|j| (0..w as i32).map(move |i| LatticeVertex::square(i, j)))
                        .collect();
                    Template::new(
                        Shape::Block {
                            width: w,
                            height: h,
                        },
                        square_block(0, 0, w, h),
                        order,
                    )
                })
                .collect()
        }
        LatticeKind::HeavySquare => {
            let mut k = 1u32;
            while ((k * k + 2 * k * (k - 1)) as usize) < n {
                k += 1;
            }
            let region = square_block(0, 0, k, k)
                .subdivided_closure(false)
                .expect("square base");
            let order = bfs_order(&region);
            vec![Template::new(Shape::HeavyBlock { side: k }, region, order)]
        }
        LatticeKind::Hex | LatticeKind::HeavyHex => {
            let mut r = 0u32;
            let region = loop {
                let disk = hex_disk(r, kind, false).expect("hex base");
                if disk.len() >= n {
                    break disk;
                }
                r += 1;
            };
            let order = bfs_order(&region);
            vec![Template::new(Shape::Disk { radius: r }, region, order)]
        }
    }
}

fn same_sublattice(a: &LatticeVertex, b: &LatticeVertex) -> bool {
    match (a.base_site(), b.base_site()) {
        (Some(sa), Some(sb)) => {
            std::mem::discriminant(&sa) == std::mem::discriminant(&sb)
                && sub_index(a) == sub_index(b)
        }
        _ => false,
    }
}

fn sub_index(v: &LatticeVertex) -> u8 {
    match v.base_site() {
        Some(crate::lattice::Site::Hex { s, .. }) => s,
        _ => 0,
    }
}

fn offset(from: &LatticeVertex, to: &LatticeVertex) -> (i32, i32) {
    let (fi, fj) = from.base_site().expect("base vertex").cell();
    let (ti, tj) = to.base_site().expect("base vertex").cell();
    (ti - fi, tj - fj)
}

fn evaluate(
    device: &DeviceTopology,
    n: usize,
    t: &Template,
    di: i32,
    dj: i32,
) -> Option<Placement> {
    let mut region = Vec::with_capacity(t.order.len());
    for v in &t.order {
        let id = device.qubit_at(&v.translate(di, dj))?;
        if device.is_excluded(id) {
            return None;
        }
        region.push(id);
    }
    if t.boundary
        .iter()
        .any(|b| device.qubit_at(&b.translate(di, dj)).is_none())
    {
        return None;
    }
    let computational: BTreeSet<QubitId> = region[..n].iter().copied().collect();
    let interior_idle: BTreeSet<QubitId> = region[n..].iter().copied().collect();
    let buffer: BTreeSet<QubitId> = region
        .iter()
        .flat_map(|&id| device.coupled(id))
        .filter(|id| {
            !computational.contains(id) && !interior_idle.contains(id) && !device.is_excluded(*id)
        })
        .collect();
    let willie: BTreeSet<QubitId> = device
        .qubits()
        .map(|(id, _)| id)
        .filter(|id| {
            !device.is_excluded(*id)
                && !computational.contains(id)
                && !interior_idle.contains(id)
                && !buffer.contains(id)
        })
        .collect();
    let overhead = interior_idle.len() + buffer.len();
    Some(Placement {
        device: device.name().to_string(),
        kind: device.kind(),
        n,
        shape: t.shape,
        anchor: t.reference.translate(di, dj),
        computational,
        interior_idle,
        buffer,
        willie,
        overhead,
    })
}

fn plan_once(
    device: &DeviceTopology,
    n: usize,
    anchor: Option<&LatticeVertex>,
) -> Result<Option<Placement>, PlanError> {
    if n > device.active_count() {
        return Ok(None);
    }
    let templates = templates(device.kind(), n);
    let mut candidates: Vec<(usize, i32, i32)> = Vec::new();
    for (ti, t) in templates.iter().enumerate() {
        match anchor {
            Some(a) => {
                if !same_sublattice(a, &t.reference) || device.kind().validate(a).is_err() {
                    return Err(PlanError::InvalidAnchor(a.to_string()));
                }
                let (di, dj) = offset(&t.reference, a);
                candidates.push((ti, di, dj));
            }
            None => {
                let offsets: BTreeSet<(i32, i32)> = device
                    .qubits()
                    .filter(|(_, v)| same_sublattice(v, &t.reference))
                    .map(|(_, v)| offset(&t.reference, v))
                    .collect();
                candidates.extend(offsets.into_iter().map(|(di, dj)| (ti, di, dj)));
            }
        }
    }
    let best = candidates
        .par_iter()
        .filter_map(|&(ti, di, dj)| evaluate(device, n, &templates[ti], di, dj).map(|p| (ti, p)))
        .min_by(|(ta, a), (tb, b)| (a.overhead, a.anchor, *ta).cmp(&(b.overhead, b.anchor, *tb)))
        .map(|(_, p)| p);
    Ok(best)
}

/// Places an `n`-qubit computation on the device with a minimal-overhead
/// buffer. Square devices use a `k × m` block (`k = ceil(sqrt(n))`,
/// `m = ceil(n / k)`), heavy-square devices the smallest lifted `k × k` block,
/// and hexagonal devices the smallest disk holding `n` vertices. The whole
/// lattice boundary of the region must exist on the device, so a placement is
/// never pushed against the chip edge. Without `anchor` every translation is
/// scanned; ties go to the smallest anchor vertex.
pub fn plan(
    device: &DeviceTopology,
    n: usize,
    anchor: Option<&LatticeVertex>,
) -> Result<Placement, PlanError> {
    if n == 0 {
        return Err(PlanError::EmptyComputation);
    }
    if let Some(p) = plan_once(device, n, anchor)? {
        return Ok(p);
    }
    let top = (n - 1).min(device.active_count());
    let mut largest_feasible = None;
    for m in (1..=top).rev() {
        if plan_once(device, m, anchor)?.is_some() {
            largest_feasible = Some(m);
            break;
        }
    }
    Err(PlanError::Infeasible {
        n,
        device: device.name().to_string(),
        largest_feasible,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Computational,
    Idle,
    Buffer,
    Willie,
    Excluded,
}

impl Placement {
    fn role(&self, id: QubitId, device: &DeviceTopology) -> Role {
        if device.is_excluded(id) {
            Role::Excluded
        } else if self.computational.contains(&id) {
            Role::Computational
        } else if self.interior_idle.contains(&id) {
            Role::Idle
        } else if self.buffer.contains(&id) {
            Role::Buffer
        } else {
            Role::Willie
        }
    }

    /// Region occupied by Alice: computational plus interior idle qubits.
    pub fn region(&self) -> BTreeSet<QubitId> {
        self.computational
            .union(&self.interior_idle)
            .copied()
            .collect()
    }

    /// Couplers joining Alice's region directly to a willie qubit.
    pub fn crossing_couplers(&self, device: &DeviceTopology) -> Vec<(QubitId, QubitId)> {
        device
            .couplers()
            .iter()
            .filter(|(a, b)| {
                let ra = self.role(*a, device);
                let rb = self.role(*b, device);
                let inside = |r| matches!(r, Role::Computational | Role::Idle);
                (inside(ra) && rb == Role::Willie) || (inside(rb) && ra == Role::Willie)
            })
            .copied()
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("placement serialization is infallible")
    }

    /// ASCII drawing of the device. `C` computational, `i` interior idle,
    /// `b` buffer, `.` willie, `x` excluded.
    pub fn ascii_map(&self, device: &DeviceTopology) -> String {
        let hex = device.kind().base() == LatticeKind::Hex;
        let (sx, sy) = if hex {
            (4.0 / 3f64.sqrt(), 4.0)
        } else {
            (4.0, 2.0)
        };
        let mut cells: BTreeMap<(i64, i64), char> = BTreeMap::new();
        for (id, v) in device.qubits() {
            let (x, y) = v.position();
            let key = (-(y * sy).round() as i64, (x * sx).round() as i64);
            let c = match self.role(id, device) {
                Role::Computational => 'C',
                Role::Idle => 'i',
                Role::Buffer => 'b',
                Role::Willie => '.',
                Role::Excluded => 'x',
            };
            cells.insert(key, c);
        }
        let rows: BTreeSet<i64> = cells.keys().map(|k| k.0).collect();
        let cols: Vec<i64> = cells
            .keys()
            .map(|k| k.1)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut out = String::new();
        for r in rows {
            let line: String = cols
                .iter()
                .map(|c| cells.get(&(r, *c)).copied().unwrap_or(' '))
                .collect();
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push_str(&format!(
            "n={} shape={} anchor={} computational={} idle={} buffer={} willie={} overhead={}\n",
            self.n,
            self.shape,
            self.anchor,
            self.computational.len(),
            self.interior_idle.len(),
            self.buffer.len(),
            self.willie.len(),
            self.overhead
        ));
        out
    }
}
