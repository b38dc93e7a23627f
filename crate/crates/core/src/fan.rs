//! Fans built from explicit point configurations and their hypermaps.
//!
//! A fan is a finite point set `V` (not containing the origin) with a set of
//! edges whose blades, the cones from the origin over the edges, meet only in
//! shared sub-cones. [`build_hypermap`] turns a fan into a [`Hypermap`] whose
//! darts are ordered pairs `(v, w)` over the edges, with the node map given by
//! the counterclockwise order of neighbors around each point.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypermap::{Hypermap, HypermapError, OrbitKind};
use crate::sphgeom::{self, azim, GeomError, Point3, EQ_TOL, H0, SPHERE_RADIUS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FanError {
    #[error("fan axiom violated: {0:?}")]
    FanAxiomViolation(FanAxiom),
    #[error("equal azimuths around point {0}")]
    AzimuthTie(usize),
    #[error("dart set is not a face of the fan's hypermap")]
    NotAFace,
    #[error("localization is not a local fan")]
    NotLocal,
    #[error("invalid kissing configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Hypermap(#[from] HypermapError),
}

/// The fan axioms, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FanAxiom {
    Cardinality,
    Origin,
    Nonparallel,
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanVerdict {
    pub is_fan: bool,
    pub violated: Option<FanAxiom>,
    /// Labels involved in the first violation.
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fan {
    pub points: Vec<Point3>,
    /// Unordered pairs, normalized to `(min, max)` and sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Fan {
    /// Stores the pair normalized; does not check the fan axioms.
    pub fn new(points: Vec<Point3>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges: BTreeSet<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Fan { points, edges: edges.into_iter().collect() }
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Classification of a pair of points of a kissing configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairClass {
    /// Distance 2.
    Contact,
    /// Distance in `[2h0, √8)`.
    Gap,
    /// Distance at least `√8`.
    Far,
}

/// Twelve points on the radius-2 sphere, pairwise at distance 2 or at least
/// `2h0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point3>", into = "Vec<Point3>")]
pub struct KissingConfig {
    points: Vec<Point3>,
}

impl TryFrom<Vec<Point3>> for KissingConfig {
    type Error = FanError;

    fn try_from(points: Vec<Point3>) -> Result<Self, FanError> {
        KissingConfig::new(points)
    }
}

impl From<KissingConfig> for Vec<Point3> {
    fn from(c: KissingConfig) -> Self {
        c.points
    }
}

impl KissingConfig {
    pub fn new(points: Vec<Point3>) -> Result<Self, FanError> {
        if points.len() != 12 {
            return Err(FanError::InvalidConfig(format!("expected 12 points, got {}", points.len())));
        }
        for (i, p) in points.iter().enumerate() {
            if (p.norm() - SPHERE_RADIUS).abs() > EQ_TOL {
                return Err(FanError::InvalidConfig(format!("point {i} has norm {}", p.norm())));
            }
        }
        for i in 0..12 {
            for j in i + 1..12 {
                let d = points[i].dist(points[j]);
                if (d - 2.0).abs() > EQ_TOL && d < 2.0 * H0 - EQ_TOL {
                    return Err(FanError::InvalidConfig(format!("points {i},{j} at distance {d}")));
                }
            }
        }
        Ok(KissingConfig { points })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn classify(&self, i: usize, j: usize) -> PairClass {
        let d = self.points[i].dist(self.points[j]);
        if (d - 2.0).abs() <= EQ_TOL {
            PairClass::Contact
        } else if d < 8f64.sqrt() - EQ_TOL {
            PairClass::Gap
        } else {
            PairClass::Far
        }
    }

    fn pairs_where(&self, keep: impl Fn(PairClass) -> bool) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..12 {
            for j in i + 1..12 {
                if keep(self.classify(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Applies a linear map to every point (used with rotations).
    pub fn transformed(&self, m: [[f64; 3]; 3]) -> Result<Self, FanError> {
        let apply = |p: &Point3| {
            Point3::new(
                m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
            )
        };
        KissingConfig::new(self.points.iter().map(apply).collect())
    }
}

/// Pairs at distance exactly 2 (within tolerance).
pub fn contact_edges(cfg: &KissingConfig) -> Vec<(usize, usize)> {
    cfg.pairs_where(|c| c == PairClass::Contact)
}

/// Pairs with `2 ≤ |u − v| < √8`.
pub fn extended_edges(cfg: &KissingConfig) -> Vec<(usize, usize)> {
    cfg.pairs_where(|c| c != PairClass::Far)
}

/// The twelve neighbors of a ball in the face-centered cubic packing.
pub fn fcc_points() -> KissingConfig {
    let s = 2f64.sqrt();
    let mut pts = Vec::with_capacity(12);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for (a, b) in [(s, s), (s, -s), (-s, s), (-s, -s)] {
            let mut c = [0.0; 3];
            c[i] = a;
            c[j] = b;
            pts.push(Point3::from(c));
        }
    }
    KissingConfig::new(pts).expect("FCC coordinates are a kissing configuration")
}

/// The twelve neighbors of a ball in the hexagonal close packing: an
/// equatorial hexagon with two contact triangles above and below it, the
/// lower one the mirror image of the upper one.
pub fn hcp_points() -> KissingConfig {
    let rho = 2.0 / 3f64.sqrt();
    let height = 2.0 * 6f64.sqrt() / 3.0;
    let mut pts = Vec::with_capacity(12);
    for k in 0..6 {
        let t = PI / 3.0 * k as f64;
        pts.push(Point3::new(2.0 * t.cos(), 2.0 * t.sin(), 0.0));
    }
    for z in [height, -height] {
        for k in 0..3 {
            let t = PI / 6.0 + 2.0 * PI / 3.0 * k as f64;
            pts.push(Point3::new(rho * t.cos(), rho * t.sin(), z));
        }
    }
    KissingConfig::new(pts).expect("HCP coordinates are a kissing configuration")
}

const CONE_EPS: f64 = 1e-12;

/// `p` lies in the closed planar cone spanned by `a` and `b` (all unit
/// vectors, `p` coplanar with them).
fn in_sector(p: Point3, a: Point3, b: Point3) -> bool {
    let n = a.cross(b);
    if n.norm() < CONE_EPS {
        return false;
    }
    n.dot(a.cross(p)) >= -CONE_EPS && n.dot(p.cross(b)) >= -CONE_EPS
}

fn coplanar(n: Point3, p: Point3) -> bool {
    n.normalized().dot(p).abs() < 1e-10
}

/// Whether the blades of two edges violate the intersection axiom.
fn blades_clash(pts: &[Point3], e1: (usize, usize), e2: (usize, usize)) -> bool {
    let u = |i: usize| pts[i].normalized();
    let shared: Vec<usize> = [e1.0, e1.1].into_iter().filter(|v| *v == e2.0 || *v == e2.1).collect();
    match shared.len() {
        2 => false,
        1 => {
            // the cones may only share the ray through the common point
            let v = shared[0];
            let w1 = if e1.0 == v { e1.1 } else { e1.0 };
            let w2 = if e2.0 == v { e2.1 } else { e2.0 };
            let n1 = u(v).cross(u(w1));
            if !coplanar(n1, u(w2)) {
                return false;
            }
            in_sector(u(w2), u(v), u(w1)) || in_sector(u(w1), u(v), u(w2))
        }
        _ => {
            let (a, b, c, d) = (u(e1.0), u(e1.1), u(e2.0), u(e2.1));
            let n1 = a.cross(b);
            let n2 = c.cross(d);
            let line = n1.normalized().cross(n2.normalized());
            if line.norm() < 1e-10 {
                // same plane: overlap iff an endpoint of one lies in the other
                return in_sector(c, a, b) || in_sector(d, a, b) || in_sector(a, c, d) || in_sector(b, c, d);
            }
            let l = line.normalized();
            [l, -l].into_iter().any(|p| in_sector(p, a, b) && in_sector(p, c, d))
        }
    }
}

/// Checks the four fan axioms and reports the first violation.
pub fn check_fan(points: &[Point3], edges: &[(usize, usize)]) -> FanVerdict {
    let fail = |axiom, witness| FanVerdict { is_fan: false, violated: Some(axiom), witness };
    if points.is_empty() || points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite())) {
        return fail(FanAxiom::Cardinality, vec![]);
    }
    if let Some(i) = points.iter().position(|p| p.norm() < CONE_EPS) {
        return fail(FanAxiom::Origin, vec![i]);
    }
    for &(a, b) in edges {
        if a == b || a >= points.len() || b >= points.len() {
            return fail(FanAxiom::Cardinality, vec![a, b]);
        }
        let (p, q) = (points[a].normalized(), points[b].normalized());
        if p.cross(q).norm() < 1e-10 {
            return fail(FanAxiom::Nonparallel, vec![a, b]);
        }
    }
    // singleton against singleton: distinct rays
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (p, q) = (points[i].normalized(), points[j].normalized());
            if p.cross(q).norm() < 1e-10 && p.dot(q) > 0.0 {
                return fail(FanAxiom::Intersection, vec![i, j]);
            }
        }
    }
    // singleton against blade
    for &(a, b) in edges {
        let n = points[a].cross(points[b]);
        for (i, p) in points.iter().enumerate() {
            if i == a || i == b {
                continue;
            }
            let p = p.normalized();
            if coplanar(n, p) && in_sector(p, points[a].normalized(), points[b].normalized()) {
                return fail(FanAxiom::Intersection, vec![i, a, b]);
            }
        }
    }
    for (k, &e1) in edges.iter().enumerate() {
        for &e2 in &edges[k + 1..] {
            if blades_clash(points, e1, e2) {
                return fail(FanAxiom::Intersection, vec![e1.0, e1.1, e2.0, e2.1]);
            }
        }
    }
    FanVerdict { is_fan: true, violated: None, witness: vec![] }
}

/// A fan's hypermap together with the dart labeling.
#[derive(Debug, Clone)]
pub struct FanHypermap {
    pub hypermap: Hypermap,
    /// `darts[x] = (v, w)`; isolated darts are `(v, v)`.
    pub darts: Vec<(usize, usize)>,
}

impl FanHypermap {
    /// Node labels visited by a face, in face order.
    pub fn face_nodes(&self, face: &[usize]) -> Vec<usize> {
        face.iter().map(|&x| self.darts[x].0).collect()
    }

    pub fn faces(&self) -> Vec<Vec<usize>> {
        self.hypermap.orbits(OrbitKind::Face).classes
    }
}

/// Counterclockwise cyclic order of the neighbors of `v`, starting from the
/// smallest label.
pub fn sigma(fan: &Fan, v: usize) -> Result<Vec<usize>, FanError> {
    let mut nbrs = fan.neighbors(v);
    nbrs.sort_unstable();
    if nbrs.len() <= 1 {
        return Ok(nbrs);
    }
    let p = fan.points[v];
    let r = fan.points[nbrs[0]];
    let mut keyed = Vec::with_capacity(nbrs.len());
    for &w in &nbrs {
        keyed.push((azim(p, r, fan.points[w])?, w));
    }
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    if keyed.windows(2).any(|w| (w[1].0 - w[0].0).abs() < 1e-12) {
        return Err(FanError::AzimuthTie(v));
    }
    Ok(keyed.into_iter().map(|(_, w)| w).collect())
}

/// Builds the hypermap of a fan: `e(v,w) = (w,v)`, `n(v,w) = (v, σ(v,w))`,
/// and `f` derived from them.
pub fn build_hypermap(fan: &Fan) -> Result<FanHypermap, FanError> {
    let verdict = check_fan(&fan.points, &fan.edges);
    if let Some(axiom) = verdict.violated {
        return Err(FanError::FanAxiomViolation(axiom));
    }
    let mut darts: Vec<(usize, usize)> = fan.edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    darts.sort_unstable();
    let isolated_start = darts.len();
    for v in 0..fan.points.len() {
        if fan.neighbors(v).is_empty() {
            darts.push((v, v));
        }
    }
    let index = |d: (usize, usize)| -> usize {
        if d.0 == d.1 {
            isolated_start + darts[isolated_start..].binary_search(&d).expect("isolated dart")
        } else {
            darts[..isolated_start].binary_search(&d).expect("dart")
        }
    };
    let mut e = vec![0; darts.len()];
    let mut n = vec![0; darts.len()];
    for v in 0..fan.points.len() {
        let order = sigma(fan, v)?;
        if order.is_empty() {
            let x = index((v, v));
            e[x] = x;
            n[x] = x;
            continue;
        }
        for (i, &w) in order.iter().enumerate() {
            let x = index((v, w));
            n[x] = index((v, order[(i + 1) % order.len()]));
            e[x] = index((w, v));
        }
    }
    Ok(FanHypermap { hypermap: Hypermap::new(e, n)?, darts })
}

/// Restriction of a fan to the nodes and edges of one face.
#[derive(Debug, Clone)]
pub struct LocalFan {
    pub fan: Fan,
    /// Labels of `fan` points in the original fan.
    pub labels: Vec<usize>,
    /// The face as darts of the original hypermap.
    pub face: Vec<usize>,
    /// `k`, with the local hypermap isomorphic to `Dih_{2k}`.
    pub k: usize,
}

pub fn localize(fan: &Fan, built: &FanHypermap, face: &[usize]) -> Result<LocalFan, FanError> {
    let f = built.hypermap.f();
    if face.is_empty() || face.iter().any(|&x| x >= f.len()) {
        return Err(FanError::NotAFace);
    }
    let orbit: BTreeSet<usize> = {
        let mut s = BTreeSet::new();
        let mut x = face[0];
        while s.insert(x) {
            x = f[x];
        }
        s
    };
    if orbit != face.iter().copied().collect::<BTreeSet<_>>() || orbit.len() != face.len() {
        return Err(FanError::NotAFace);
    }
    let labels: Vec<usize> = face.iter().map(|&x| built.darts[x].0).collect::<BTreeSet<_>>().into_iter().collect();
    let local = |v: usize| labels.binary_search(&v).expect("node of face");
    let edges: Vec<(usize, usize)> =
        face.iter().map(|&x| built.darts[x]).filter(|(v, w)| v != w).map(|(v, w)| (local(v), local(w))).collect();
    let sub = Fan::new(labels.iter().map(|&v| fan.points[v]).collect(), edges);
    let h = build_hypermap(&sub)?;
    let k = face.len();
    if h.hypermap.is_dihedral() != Some(k) {
        return Err(FanError::NotLocal);
    }
    Ok(LocalFan { fan: sub, labels, face: face.to_vec(), k })
}

/// `τ = sol(U_F) + (2 − k)·sol0`, with the face region bounded by the node
/// cycle of the face.
pub fn face_tau(fan: &Fan, built: &FanHypermap, face: &[usize]) -> Result<f64, FanError> {
    let nodes = built.face_nodes(face);
    // faces run counterclockwise around their region as seen from outside
    let pts: Vec<Point3> = nodes.iter().map(|&v| fan.points[v]).collect();
    let sol = sphgeom::solid_angle_polygon(&pts)?;
    Ok(sol + (2.0 - face.len() as f64) * sphgeom::sol0())
}

/// The fan of a kissing configuration with the given edge set.
pub fn config_fan(cfg: &KissingConfig, edges: Vec<(usize, usize)>) -> Fan {
    Fan::new(cfg.points().to_vec(), edges)
}

/// Contact fan and its hypermap for a kissing configuration.
pub fn contact_hypermap(cfg: &KissingConfig) -> Result<(Fan, FanHypermap), FanError> {
    let fan = config_fan(cfg, contact_edges(cfg));
    let built = build_hypermap(&fan)?;
    Ok((fan, built))
}
