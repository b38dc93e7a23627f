//! Bound tables and the tame-contact predicate.
//!
//! Table values with decimal coefficients are kept exactly as integers in
//! thousandths ("milli" units); the `f64` accessors divide by 1000.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypermap::{Hypermap, OrbitKind};
use crate::lpfeas::simplex::{minimize, LpOutcome, Q};
use crate::lpfeas::{self, Interval};
use crate::sphgeom::{dih, Constants, H0};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TameError {
    #[error("a face meets node {0} in more than one dart")]
    NotBiconnected(usize),
}

/// `tgt` in thousandths.
pub const TGT_MILLI: i64 = 1541;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTables {
    pub constants: Constants,
    alpha: [f64; 3],
    beta: [f64; 3],
}

static TABLES: OnceLock<BoundTables> = OnceLock::new();

/// The shared tables, built on first use.
pub fn tables() -> &'static BoundTables {
    TABLES.get_or_init(|| {
        let a3 = dih(2.0, 2.0, 2.0, 2.0, 2.0, 2.0).expect("regular tetrahedron");
        let a4 = dih(2.0, 2.0, 2.0, 2.0 * H0, 2.0, 2.0).expect("valid simplex");
        let b4 = 2.0 * dih(2.0, 2.0, 2.0, 2.0, 2.0 * H0, 2.0).expect("valid simplex");
        BoundTables { constants: Constants::new(), alpha: [a3, a4, a4], beta: [a3, b4, 2.0 * PI] }
    })
}

impl BoundTables {
    pub fn d1_milli(&self, k: usize) -> i64 {
        match k {
            0..=3 => 0,
            4..=8 => 206 + 270 * (k as i64 - 4),
            _ => TGT_MILLI,
        }
    }

    pub fn d2_milli(&self, r: usize, s: usize) -> i64 {
        if (r, s) == (3, 0) {
            return 0;
        }
        let (r, s) = (r as i64, s as i64);
        103 * (2 - s) + 270 * (r + 2 * s - 4)
    }

    pub fn d3_milli(&self, r: usize, s: usize, t: usize) -> i64 {
        if matches!((r, s, t), (3, 0, 0) | (2, 0, 1)) {
            return 0;
        }
        let (r, s, t) = (r as i64, s as i64, t as i64);
        103 * (2 - s) + 270 * (r + 2 * s + 2 * t - 4)
    }

    pub fn b_milli(&self, p: usize, q: usize) -> i64 {
        match (p, q) {
            (0, 3) | (1, 3) => 618,
            (2, 2) => 412,
            _ => TGT_MILLI,
        }
    }

    pub fn d1(&self, k: usize) -> f64 {
        self.d1_milli(k) as f64 / 1000.0
    }

    pub fn d2(&self, r: usize, s: usize) -> f64 {
        self.d2_milli(r, s) as f64 / 1000.0
    }

    pub fn d3(&self, r: usize, s: usize, t: usize) -> f64 {
        self.d3_milli(r, s, t) as f64 / 1000.0
    }

    pub fn b(&self, p: usize, q: usize) -> f64 {
        self.b_milli(p, q) as f64 / 1000.0
    }

    /// Lower bound on an interior angle of a `k`-gon, `k ≥ 3`.
    pub fn alpha(&self, k: usize) -> f64 {
        self.alpha[k.clamp(3, 5) - 3]
    }

    /// Upper bound on an interior angle of a `k`-gon, `k ≥ 3`.
    pub fn beta(&self, k: usize) -> f64 {
        self.beta[k.clamp(3, 5) - 3]
    }
}

/// Faces at a node: `p` triangles, `q` quadrilaterals, `r` larger faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeType {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl NodeType {
    pub fn new(p: usize, q: usize, r: usize) -> Self {
        NodeType { p, q, r }
    }

    pub fn faces(&self) -> usize {
        self.p + self.q + self.r
    }

    /// Adds one face of size `k`.
    pub fn add_face(&mut self, k: usize) {
        match k {
            0..=3 => self.p += 1,
            4 => self.q += 1,
            _ => self.r += 1,
        }
    }
}

/// Types of all nodes, indexed like the node orbits of `h`.
pub fn node_types(h: &Hypermap) -> Result<Vec<NodeType>, TameError> {
    let faces = h.orbits(OrbitKind::Face);
    let face_of = h.orbit_index(OrbitKind::Face);
    h.orbits(OrbitKind::Node)
        .classes
        .iter()
        .enumerate()
        .map(|(v, darts)| {
            let mut seen = BTreeSet::new();
            let mut t = NodeType::default();
            for &x in darts {
                if !seen.insert(face_of[x]) {
                    return Err(TameError::NotBiconnected(v));
                }
                t.add_face(faces.classes[face_of[x]].len());
            }
            Ok(t)
        })
        .collect()
}

impl Default for NodeType {
    fn default() -> Self {
        NodeType::new(0, 0, 0)
    }
}

/// Node types `(p,q,r)` satisfying
/// `pα₃ + qα₄ + rα₅ ≤ 2π ≤ pβ₃ + qβ₄ + rβ₅`, evaluated on rational
/// enclosures rounded so that borderline types are kept.
///
/// Only `p + q + r ≤ 8` is scanned: `α₃` is the smallest lower bound and
/// `6α₃ > 2π` already.
pub fn admissible_node_types() -> Vec<NodeType> {
    let t = tables();
    let lo = |v: f64| Interval::enclose(v).lo;
    let hi = |v: f64| Interval::enclose(v).hi;
    let two_pi = Interval::enclose(2.0 * PI);
    let alpha = [lo(t.alpha(3)), lo(t.alpha(4)), lo(t.alpha(5))];
    let beta = [hi(t.beta(3)), hi(t.beta(4)), two_pi.hi.clone()];
    let mut out = Vec::new();
    for p in 0..=8usize {
        for q in 0..=8 - p {
            for r in 0..=8 - p - q {
                let n = [p, q, r].map(|c| Q::from_integer(c.into()));
                let low: Q = n.iter().zip(&alpha).map(|(c, a)| c * a).sum();
                let high: Q = n.iter().zip(&beta).map(|(c, b)| c * b).sum();
                if low <= two_pi.hi && two_pi.lo <= high {
                    out.push(NodeType::new(p, q, r));
                }
            }
        }
    }
    out
}

/// The `(p, q)` of admissible types with `r = 0`.
pub fn admissible_r0() -> BTreeSet<(usize, usize)> {
    admissible_node_types().into_iter().filter(|t| t.r == 0).map(|t| (t.p, t.q)).collect()
}

/// Face weights in the order of the face orbits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightAssignment {
    #[serde(with = "lpfeas::rational_vec")]
    pub tau: Vec<Q>,
    #[serde(with = "lpfeas::rational_string")]
    pub total: Q,
}

impl WeightAssignment {
    pub fn total_f64(&self) -> f64 {
        self.total.to_f64().unwrap_or(f64::NAN)
    }

    /// Re-checks nonnegativity, the face bounds, and the node bounds.
    pub fn satisfies(&self, h: &Hypermap, tables: &BoundTables) -> bool {
        let faces = h.orbits(OrbitKind::Face).classes;
        if self.tau.len() != faces.len() || self.tau.iter().any(Signed::is_negative) {
            return false;
        }
        if self.tau.iter().sum::<Q>() != self.total {
            return false;
        }
        let milli = |m: i64| Q::new(m.into(), 1000.into());
        let faces_ok = faces.iter().zip(&self.tau).all(|(f, t)| *t >= milli(tables.d1_milli(f.len())));
        faces_ok
            && node_constraints(h, tables)
                .iter()
                .all(|(fs, b)| fs.iter().map(|&f| &self.tau[f]).sum::<Q>() >= milli(*b))
    }
}

/// For each node of type `(p,q,0)`: the faces meeting it and `b(p,q)`.
fn node_constraints(h: &Hypermap, tables: &BoundTables) -> Vec<(BTreeSet<usize>, i64)> {
    let face_of = h.orbit_index(OrbitKind::Face);
    let sizes: Vec<usize> = h.orbits(OrbitKind::Face).classes.iter().map(Vec::len).collect();
    h.orbits(OrbitKind::Node)
        .classes
        .iter()
        .filter_map(|darts| {
            let fs: BTreeSet<usize> = darts.iter().map(|&x| face_of[x]).collect();
            let mut t = NodeType::default();
            fs.iter().for_each(|&f| t.add_face(sizes[f]));
            (t.r == 0).then(|| (fs, tables.b_milli(t.p, t.q)))
        })
        .collect()
}

/// A weight assignment of least total weight.
pub fn minimal_weight(h: &Hypermap, tables: &BoundTables) -> WeightAssignment {
    let sizes: Vec<usize> = h.orbits(OrbitKind::Face).classes.iter().map(Vec::len).collect();
    let nodes = node_constraints(h, tables);
    let (nf, nn) = (sizes.len(), nodes.len());
    let milli = |m: i64| Q::new(m.into(), 1000.into());
    let base: Vec<Q> = sizes.iter().map(|&k| milli(tables.d1_milli(k))).collect();

    // τ_F = d1(k_F) + u_F; each node row is Σ u_F − s_v = b − Σ d1
    let mut a = Vec::with_capacity(nn);
    let mut rhs = Vec::with_capacity(nn);
    for (i, (fs, b)) in nodes.iter().enumerate() {
        let mut row = vec![Q::zero(); nf + nn];
        for &f in fs {
            row[f] = Q::from_integer(1.into());
        }
        row[nf + i] = Q::from_integer((-1).into());
        a.push(row);
        rhs.push(milli(*b) - fs.iter().map(|&f| &base[f]).sum::<Q>());
    }
    let c: Vec<Q> = (0..nf + nn).map(|j| Q::from_integer(i64::from(j < nf).into())).collect();
    let LpOutcome::Optimal { y, .. } = minimize(&a, &rhs, &c) else {
        unreachable!("raising every face weight satisfies all node rows, and the objective is bounded by 0")
    };
    let tau: Vec<Q> = base.iter().zip(&y).map(|(d, u)| d + u).collect();
    let total = tau.iter().sum();
    WeightAssignment { tau, total }
}

/// A contact weight assignment of total weight at most `tgt − 10⁻⁹`, if one
/// exists.
pub fn weight_feasible(h: &Hypermap, tables: &BoundTables) -> Option<WeightAssignment> {
    let w = minimal_weight(h, tables);
    let slack = Q::new(TGT_MILLI.into(), 1000.into()) - &w.total;
    (slack >= Q::new(1.into(), 1_000_000_000.into())).then_some(w)
}

/// One flag per tame-contact condition, with witnesses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TameReport {
    pub biconnected: bool,
    pub plain_planar: bool,
    pub nondegenerate: bool,
    pub no_loops: bool,
    pub no_double_join: bool,
    pub face_count: bool,
    pub face_size: bool,
    pub node_count: bool,
    pub node_size: bool,
    pub weights: bool,
    /// Every node type lies in the admissible set. Not part of the verdict.
    pub admissible_types: bool,
    pub violating_face: Option<usize>,
    pub violating_node: Option<usize>,
    #[serde(with = "lpfeas::rational_string")]
    pub minimal_weight: Q,
    pub weight_assignment: Option<WeightAssignment>,
}

impl TameReport {
    pub fn flags(&self) -> [(&'static str, bool); 10] {
        [
            ("biconnected", self.biconnected),
            ("plain_planar", self.plain_planar),
            ("nondegenerate", self.nondegenerate),
            ("no_loops", self.no_loops),
            ("no_double_join", self.no_double_join),
            ("face_count", self.face_count),
            ("face_size", self.face_size),
            ("node_count", self.node_count),
            ("node_size", self.node_size),
            ("weights", self.weights),
        ]
    }

    pub fn is_tame(&self) -> bool {
        self.flags().iter().all(|(_, ok)| *ok)
    }
}

pub fn is_tame_contact(h: &Hypermap) -> TameReport {
    let tables = tables();
    let structure = h.check_structure();
    let faces = h.orbits(OrbitKind::Face).classes;
    let nodes = h.orbits(OrbitKind::Node).classes;
    let violating_face = faces.iter().position(|f| !(3..=8).contains(&f.len()));
    let violating_node = nodes.iter().position(|v| !(2..=4).contains(&v.len()));
    let admissible = admissible_node_types();
    let admissible_types = node_types(h).is_ok_and(|ts| ts.iter().all(|t| admissible.contains(t)));
    let w = minimal_weight(h, tables);
    let weight_assignment = weight_feasible(h, tables);
    TameReport {
        biconnected: structure.biconnected && h.faces_meet_nodes_once(),
        plain_planar: structure.plain && structure.planar,
        nondegenerate: structure.nondegenerate,
        no_loops: structure.no_loops,
        no_double_join: structure.no_double_join,
        face_count: faces.len() >= 2,
        face_size: violating_face.is_none(),
        node_count: nodes.len() == 12,
        node_size: violating_node.is_none(),
        weights: weight_assignment.is_some(),
        admissible_types,
        violating_face,
        violating_node,
        minimal_weight: w.total,
        weight_assignment,
    }
}
