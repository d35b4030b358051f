//! Attributed relational graph (ARG) of a symbol.
//!
//! Nodes are primitives carrying their relative length. Arcs join primitives
//! that touch (within a tolerance relative to the bounding-box diagonal) and
//! carry the relative angle between the two strokes plus a junction label.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::geometry::{closest_points, relative_angle, Closest, Primitive, VectorSymbol};
use crate::error::{Error, Result};

/// Junction type of an arc.
///
/// * `L` corner: the two strokes meet at an endpoint of each.
/// * `P` parallel proximity: near-parallel strokes running side by side.
/// * `T` an endpoint of one stroke lands on the interior of the other.
/// * `X` crossing: the contact is interior to both strokes.
/// * `S` successive: near-collinear end-to-end continuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Junction {
    L,
    P,
    T,
    X,
    S,
}

impl Junction {
    /// Signature order: L, P, T, X, S.
    pub const ALL: [Junction; 5] = [Junction::L, Junction::P, Junction::T, Junction::X, Junction::S];

    pub fn index(self) -> usize {
        match self {
            Junction::L => 0,
            Junction::P => 1,
            Junction::T => 2,
            Junction::X => 3,
            Junction::S => 4,
        }
    }

    pub fn as_char(self) -> char {
        ['L', 'P', 'T', 'X', 'S'][self.index()]
    }

    pub fn from_char(c: char) -> Option<Self> {
        Junction::ALL.into_iter().find(|j| j.as_char() == c)
    }
}

impl fmt::Display for Junction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Knobs of ARG construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArgConfig {
    /// Connectivity tolerance as a fraction of the bounding-box diagonal.
    pub tolerance: f64,
    /// Fraction of a primitive's length, at either end, that counts as an endpoint contact.
    pub end_zone: f64,
    /// Relative angle (degrees) below which two strokes count as parallel.
    pub angle_eps: f64,
}

impl Default for ArgConfig {
    fn default() -> Self {
        ArgConfig {
            tolerance: 0.01,
            end_zone: 0.10,
            angle_eps: 10.0,
        }
    }
}

impl ArgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid("tolerance must be a non-negative number"));
        }
        if !(0.0..0.5).contains(&self.end_zone) {
            return Err(Error::invalid("end_zone must be in [0, 0.5)"));
        }
        if !(0.0..=90.0).contains(&self.angle_eps) {
            return Err(Error::invalid("angle_eps must be in [0, 90] degrees"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArgNode {
    pub primitive_id: u32,
    pub relative_length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArgArc {
    pub node_a: u32,
    pub node_b: u32,
    /// Degrees in [0, 90].
    pub relative_angle: f64,
    pub label: Junction,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttributedRelationalGraph {
    pub nodes: Vec<ArgNode>,
    pub arcs: Vec<ArgArc>,
}

impl AttributedRelationalGraph {
    /// Number of distinct neighbors of every node, in node order.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.nodes.len()];
        let index_of = |id: u32| self.nodes.iter().position(|n| n.primitive_id == id);
        let mut seen = std::collections::BTreeSet::new();
        for arc in &self.arcs {
            let key = (arc.node_a.min(arc.node_b), arc.node_a.max(arc.node_b));
            if arc.node_a == arc.node_b || !seen.insert(key) {
                continue;
            }
            if let (Some(a), Some(b)) = (index_of(arc.node_a), index_of(arc.node_b)) {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        deg
    }

    /// True when arcs reference existing nodes, with no self-loops or parallel arcs.
    pub fn is_simple(&self) -> bool {
        let ids: std::collections::BTreeSet<u32> = self.nodes.iter().map(|n| n.primitive_id).collect();
        let mut seen = std::collections::BTreeSet::new();
        self.arcs.iter().all(|a| {
            a.node_a != a.node_b
                && ids.contains(&a.node_a)
                && ids.contains(&a.node_b)
                && seen.insert((a.node_a.min(a.node_b), a.node_a.max(a.node_b)))
        })
    }

    /// Line-oriented debug dump: `node <id> <rel_len>` then `arc <a> <b> <angle> <label>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let _ = writeln!(out, "node {} {:.6}", n.primitive_id, n.relative_length);
        }
        for a in &self.arcs {
            let _ = writeln!(out, "arc {} {} {:.6} {}", a.node_a, a.node_b, a.relative_angle, a.label);
        }
        out
    }
}

fn is_end_contact(param: f64, end_zone: f64) -> bool {
    param <= end_zone || param >= 1.0 - end_zone
}

/// Length of the overlap of `b` projected onto the axis of `a`.
fn axial_overlap(a: &Primitive, b: &Primitive) -> f64 {
    let len = a.length();
    let u = a.direction().mul(1.0 / len);
    let s0 = b.p0.sub(a.p0).dot(u);
    let s1 = b.p1.sub(a.p0).dot(u);
    let hi = s0.max(s1).min(len);
    let lo = s0.min(s1).max(0.0);
    (hi - lo).max(0.0)
}

fn label_from_contact(a: &Primitive, b: &Primitive, contact: Closest, angle: f64, cfg: &ArgConfig) -> Junction {
    if angle < cfg.angle_eps {
        let shorter = a.length().min(b.length());
        if axial_overlap(a, b) > cfg.end_zone * shorter {
            return Junction::P;
        }
    }
    match (
        is_end_contact(contact.t, cfg.end_zone),
        is_end_contact(contact.s, cfg.end_zone),
    ) {
        (true, true) if angle >= cfg.angle_eps => Junction::L,
        (true, true) => Junction::S,
        (true, false) | (false, true) => Junction::T,
        (false, false) => Junction::X,
    }
}

/// Junction label of two connected primitives.
///
/// Near-parallel strokes whose axial overlap exceeds `end_zone` of the shorter
/// one are parallel neighbours (`P`). Otherwise the closest contact decides:
/// endpoint/endpoint gives `L` (or `S` when near-collinear), endpoint/interior
/// gives `T`, interior/interior gives `X`.
pub fn classify_junction(a: &Primitive, b: &Primitive, cfg: &ArgConfig) -> Junction {
    let contact = closest_points(a, b);
    label_from_contact(a, b, contact, relative_angle(a, b), cfg)
}

/// Builds the ARG of `symbol`. Two primitives are connected iff their minimum
/// distance is at most `cfg.tolerance` times the bounding-box diagonal.
pub fn build_arg(symbol: &VectorSymbol, cfg: &ArgConfig) -> AttributedRelationalGraph {
    let prims = symbol.primitives();
    let max_dist = cfg.tolerance * symbol.bbox_diagonal();
    let nodes = prims
        .iter()
        .map(|p| ArgNode {
            primitive_id: p.id,
            relative_length: symbol.relative_length(p),
        })
        .collect();
    let mut arcs = Vec::new();
    for (i, a) in prims.iter().enumerate() {
        for b in &prims[i + 1..] {
            let contact = closest_points(a, b);
            if contact.distance > max_dist {
                continue;
            }
            let angle = relative_angle(a, b);
            arcs.push(ArgArc {
                node_a: a.id,
                node_b: b.id,
                relative_angle: angle,
                label: label_from_contact(a, b, contact, angle, cfg),
            });
        }
    }
    AttributedRelationalGraph { nodes, arcs }
}
