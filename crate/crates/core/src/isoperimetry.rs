//! Discrete isoperimetric lower bounds and a runtime checker.
//!
//! | lattice     | `|N(S)|`                  | `|E(S)|`        |
//! |-------------|---------------------------|-----------------|
//! | square      | `2 sqrt(2 n)`             | `4 sqrt(n)`     |
//! | hex         | `sqrt(6 n)`               | `sqrt(6 n)`     |
//! | heavy-hex   | `(-9 + sqrt(81 + 60 n))/5`| via base set    |
//! | heavy-square| via base set              | via base set    |
//!
//! "Via base set" means the subdivision inequality `|N(S)| >= |N(S')|`
//! (resp. `|E(S)| >= |E(S')|`) with `S' = S ∩ V(base)`, followed by the
//! base-lattice bound evaluated at `|S'|`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeKind, VertexSet};

/// Slack for comparing integral boundary sizes against irrational bounds.
pub const BOUND_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    /// A bound failed on a concrete set. Always a bug: the inequalities hold
    /// for every finite set.
    #[error("isoperimetric bound violated: {0:?}")]
    Violated(Box<BoundReport>),
    #[error("unknown boundary type `{0}` (expected vertex or edge)")]
    UnknownBoundary(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Vertex,
    Edge,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Vertex => "vertex",
            Boundary::Edge => "edge",
        })
    }
}

impl FromStr for Boundary {
    type Err = BoundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vertex" => Ok(Boundary::Vertex),
            "edge" => Ok(Boundary::Edge),
            other => Err(BoundError::UnknownBoundary(other.to_string())),
        }
    }
}

pub fn bound_square_vertex(n: usize) -> f64 {
    2.0 * (2.0 * n as f64).sqrt()
}

pub fn bound_square_edge(n: usize) -> f64 {
    4.0 * (n as f64).sqrt()
}

pub fn bound_hex_vertex(n: usize) -> f64 {
    (6.0 * n as f64).sqrt()
}

pub fn bound_hex_edge(n: usize) -> f64 {
    (6.0 * n as f64).sqrt()
}

/// Heavy-hex vertex bound. Follows from `|N| >= sqrt(6 |S_H|)` together with
/// `|S| <= 5/2 |S_H| + 3/2 |N|` (each selected subdivision vertex sits on a
/// base edge with both endpoints in `S_H ∪ N`, and the honeycomb is
/// 3-regular), solved for `|N|`.
pub fn bound_heavyhex_vertex(n: usize) -> f64 {
    (-9.0 + (81.0 + 60.0 * n as f64).sqrt()) / 5.0
}

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: LatticeKind,
    pub which: Boundary,
    pub set_size: usize,
    pub boundary_size: usize,
    pub bound: f64,
    pub gap: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 7] = [
        "kind",
        "which",
        "set_size",
        "boundary_size",
        "bound",
        "gap",
        "satisfied",
    ];

    pub fn csv_row(&self) -> [String; 7] {
        [
            self.kind.to_string(),
            self.which.to_string(),
            self.set_size.to_string(),
            self.boundary_size.to_string(),
            format!("{}", self.bound),
            format!("{}", self.gap),
            self.satisfied.to_string(),
        ]
    }
}

/// Lower bound on the chosen boundary of `set`.
///
/// For heavy kinds without a closed form the bound is computed on the base
/// projection of `set`, so it depends on the set and not only on its size.
pub fn bound_for(set: &VertexSet, which: Boundary) -> f64 {
    let n = set.len();
    match (set.kind(), which) {
        (LatticeKind::Square, Boundary::Vertex) => bound_square_vertex(n),
        (LatticeKind::Square, Boundary::Edge) => bound_square_edge(n),
        (LatticeKind::Hex, Boundary::Vertex) => bound_hex_vertex(n),
        (LatticeKind::Hex, Boundary::Edge) => bound_hex_edge(n),
        (LatticeKind::HeavyHex, Boundary::Vertex) => bound_heavyhex_vertex(n),
        (LatticeKind::HeavyHex, Boundary::Edge) => bound_hex_edge(set.base_projection().len()),
        (LatticeKind::HeavySquare, Boundary::Vertex) => {
            bound_square_vertex(set.base_projection().len())
        }
        (LatticeKind::HeavySquare, Boundary::Edge) => {
            bound_square_edge(set.base_projection().len())
        }
    }
}

/// Evaluates the bound without judging it.
pub fn evaluate_bound(set: &VertexSet, which: Boundary) -> BoundReport {
    let boundary_size = match which {
        Boundary::Vertex => set.vertex_boundary().len(),
        Boundary::Edge => set.edge_boundary().len(),
    };
    let bound = bound_for(set, which);
    let gap = boundary_size as f64 - bound;
    BoundReport {
        kind: set.kind(),
        which,
        set_size: set.len(),
        boundary_size,
        bound,
        gap,
        satisfied: gap >= -BOUND_EPS,
    }
}

/// Evaluates the bound and surfaces a violation as an error.
pub fn check_bound(set: &VertexSet, which: Boundary) -> Result<BoundReport, BoundError> {
    let report = evaluate_bound(set, which);
    if report.satisfied {
        Ok(report)
    } else {
        Err(BoundError::Violated(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{diamond, hex_disk, square_block};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn closed_forms() {
        assert_eq!(bound_square_vertex(0), 0.0);
        assert!(close(bound_square_vertex(5), 2.0 * 10f64.sqrt()));
        assert!(close(bound_square_vertex(13), 2.0 * 26f64.sqrt()));
        assert_eq!(bound_square_edge(0), 0.0);
        assert_eq!(bound_square_edge(1), 4.0);
        assert_eq!(bound_square_edge(4), 8.0);
        assert_eq!(bound_hex_vertex(0), 0.0);
        assert_eq!(bound_hex_vertex(6), 6.0);
        assert_eq!(bound_hex_edge(24), 12.0);
        assert_eq!(bound_heavyhex_vertex(0), 0.0);
        assert!(close(
            bound_heavyhex_vertex(12),
            (801f64.sqrt() - 9.0) / 5.0
        ));
        assert!((bound_heavyhex_vertex(12) - 3.8603).abs() < 1e-4);
        assert_eq!(bound_heavyhex_vertex(108), 14.4);
    }

    #[test]
    fn diamond_reports() {
        let r1 = check_bound(&diamond(1), Boundary::Vertex).unwrap();
        assert_eq!((r1.set_size, r1.boundary_size), (5, 8));
        let r2 = check_bound(&diamond(2), Boundary::Vertex).unwrap();
        assert_eq!((r2.set_size, r2.boundary_size), (13, 12));
        let r3 = check_bound(&diamond(3), Boundary::Vertex).unwrap();
        assert_eq!((r3.set_size, r3.boundary_size), (25, 16));
        assert!(close(r3.gap, 16.0 - 2.0 * 50f64.sqrt()));
    }

    #[test]
    fn equality_cases() {
        let block = square_block(0, 0, 2, 2);
        let r = check_bound(&block, Boundary::Edge).unwrap();
        assert_eq!(r.boundary_size, 8);
        assert!(close(r.gap, 0.0));

        let disk = hex_disk(0, LatticeKind::Hex, false).unwrap();
        let r = check_bound(&disk, Boundary::Edge).unwrap();
        assert!(close(r.gap, 0.0));
        let r = check_bound(&disk, Boundary::Vertex).unwrap();
        assert!(close(r.gap, 0.0));
    }

    #[test]
    fn empty_set_is_tight() {
        for kind in LatticeKind::ALL {
            let r = check_bound(&VertexSet::empty(kind), Boundary::Vertex).unwrap();
            assert!(r.satisfied && r.gap == 0.0);
        }
    }

    #[test]
    fn heavy_hex_disk_zero_gap() {
        let disk = hex_disk(0, LatticeKind::HeavyHex, false).unwrap();
        let r = check_bound(&disk, Boundary::Vertex).unwrap();
        assert_eq!((r.set_size, r.boundary_size), (12, 6));
        assert!(r.gap > 2.0);
    }

    #[test]
    fn csv_row_shape() {
        let r = evaluate_bound(&diamond(1), Boundary::Vertex);
        let row = r.csv_row();
        assert_eq!(row.len(), BoundReport::CSV_HEADER.len());
        assert_eq!(row[0], "square");
        assert_eq!(row[1], "vertex");
        assert_eq!(row[6], "true");
    }

    #[test]
    fn boundary_parse() {
        assert_eq!("edge".parse::<Boundary>().unwrap(), Boundary::Edge);
        assert!("area".parse::<Boundary>().is_err());
    }
}
