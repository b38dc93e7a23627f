//! Numerical checks for the face-weight lower bound: edge caps from the
//! circumradius constraint, minimal spherical areas over edge boxes, the
//! per-triangle inequality `A ≥ sol0 + d3(r,s,t)`, and superadditivity of `d3`.
//!
//! Areas are minimized over box corners and cross-checked on a 21³ grid.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sphgeom::{circumradius, sol0, triangle_area_from_chords, EQ_TOL, H0, MARGIN};
use crate::tame::{tables, TGT_MILLI};

/// Circumradius bound for Delaunay triangles on the sphere of radius 2.
pub const MAX_CIRCUMRADIUS: f64 = 1.732_050_807_568_877_2;
/// Lower end of the long-edge class.
pub const LONG_EDGE: f64 = 3.0;
/// The longest chord of a triangle with circumradius `√3`.
pub const CHORD_CAP: f64 = 2.0 * MAX_CIRCUMRADIUS;
/// Cap used for the three long edges of a `(0,0,3)` triangle.
pub const LONG_CAP_003: f64 = 3.27;
/// Split points of the `(1,1,1)` case.
pub const SPLIT_LONG: f64 = 3.45;
pub const SPLIT_MID: f64 = 2.6;
/// Samples per axis of the grid oracle.
pub const GRID: usize = 21;
/// Largest region size in the superadditivity scan.
pub const MAX_REGION: usize = 8;
/// Largest polygon in the synthetic-partition scan.
pub const MAX_PARTITION: usize = 7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("no triangle with circumradius at most √3 has edges in the given ranges")]
    NoFeasibleTriangle,
    #[error("no corner of the box is a spherical triangle")]
    NothingRealizable,
    #[error("chord range [{0}, {1}] is outside [2, 2√3]")]
    OutOfDomain(f64, f64),
    #[error("a face needs at least three edges, got {0}")]
    TooFewEdges(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeClass {
    /// Length exactly 2.
    Contact,
    /// Length in `[2h0, 3.0)`.
    SmallGap,
    /// Length at least `3.0`.
    Large,
}

impl EdgeClass {
    pub fn symbol(self) -> char {
        match self {
            EdgeClass::Contact => 'r',
            EdgeClass::SmallGap => 's',
            EdgeClass::Large => 't',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChordRange {
    pub lo: f64,
    pub hi: f64,
}

impl ChordRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty chord range [{lo}, {hi}]");
        ChordRange { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        ChordRange { lo: v, hi: v }
    }

    /// `GRID` evenly spaced samples including both ends.
    fn samples(self) -> impl Iterator<Item = f64> {
        (0..GRID).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / (GRID - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaggedRange {
    pub class: EdgeClass,
    pub range: ChordRange,
}

/// Chord ranges for the three edges of a Delaunay triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeBox {
    pub edges: [TaggedRange; 3],
}

impl EdgeBox {
    pub fn contact() -> TaggedRange {
        TaggedRange { class: EdgeClass::Contact, range: ChordRange::point(2.0) }
    }

    pub fn small_gap() -> TaggedRange {
        TaggedRange { class: EdgeClass::SmallGap, range: ChordRange::new(2.0 * H0, LONG_EDGE) }
    }

    pub fn large(cap: f64) -> TaggedRange {
        TaggedRange { class: EdgeClass::Large, range: ChordRange::new(LONG_EDGE, cap) }
    }

    /// Checks that every range sits inside its class.
    pub fn is_consistent(&self) -> bool {
        self.edges.iter().all(|e| {
            let ChordRange { lo, hi } = e.range;
            lo <= hi
                && match e.class {
                    EdgeClass::Contact => lo == 2.0 && hi == 2.0,
                    EdgeClass::SmallGap => lo >= 2.0 * H0 && hi <= LONG_EDGE,
                    EdgeClass::Large => lo >= LONG_EDGE && hi <= CHORD_CAP,
                }
        })
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let n = |c| self.edges.iter().filter(|e| e.class == c).count();
        (n(EdgeClass::Contact), n(EdgeClass::SmallGap), n(EdgeClass::Large))
    }

    fn ranges(&self) -> [ChordRange; 3] {
        self.edges.map(|e| e.range)
    }

    fn corners(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        let [a, b, c] = self.ranges();
        (0..8).map(move |m| {
            let pick = |r: ChordRange, bit: usize| if m >> bit & 1 == 0 { r.lo } else { r.hi };
            [pick(a, 0), pick(b, 1), pick(c, 2)]
        })
    }

    fn grid(&self) -> impl Iterator<Item = [f64; 3]> {
        let [a, b, c] = self.ranges();
        a.samples().flat_map(move |x| b.samples().flat_map(move |y| c.samples().map(move |z| [x, y, z])))
    }
}

/// Which tolerance a report is judged by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tolerance {
    /// Slack at least `MARGIN`.
    Margin,
    /// Equality within `EQ_TOL`.
    Sharp,
    /// Exact integer bookkeeping; slack at least zero.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub id: String,
    pub inequality: String,
    pub minimum: f64,
    pub required: f64,
    pub slack: f64,
    pub tolerance: Tolerance,
    /// Grid minimum when the case was cross-checked on a grid.
    pub grid_minimum: Option<f64>,
    pub pass: bool,
}

impl CaseReport {
    fn new(id: String, inequality: String, minimum: f64, required: f64, tolerance: Tolerance) -> Self {
        let slack = minimum - required;
        let pass = match tolerance {
            Tolerance::Margin => slack >= MARGIN,
            Tolerance::Sharp => slack.abs() <= EQ_TOL,
            Tolerance::Exact => slack >= 0.0,
        };
        CaseReport { id, inequality, minimum, required, slack, tolerance, grid_minimum: None, pass }
    }

    fn with_grid(mut self, grid_minimum: f64, grid_agrees: bool) -> Self {
        self.grid_minimum = Some(grid_minimum);
        self.pass &= grid_agrees;
        self
    }
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{mark} {:<24} {:<36} slack {:+.3e}", self.id, self.inequality, self.slack)
    }
}

/// Largest third chord `c` such that some `a ∈ fa`, `b ∈ fb` gives a
/// triangle `(a, b, c)` of circumradius at most `√3`.
///
/// With circumradius `ρ`, the chord facing an inscribed angle `θ` is
/// `2ρ sin θ`, so the largest `c` is `2ρ sin(A + B)` with `A + B` pushed as
/// close to `π/2` as the ranges allow.
pub fn circumradius_edge_bound(fa: ChordRange, fb: ChordRange) -> Result<f64, EstimateError> {
    for r in [fa, fb] {
        if r.lo < 2.0 - EQ_TOL || r.hi > CHORD_CAP + EQ_TOL {
            return Err(EstimateError::OutOfDomain(r.lo, r.hi));
        }
    }
    let angle = |c: f64| (c / CHORD_CAP).min(1.0).asin();
    let lo = angle(fa.lo) + angle(fb.lo);
    let hi = angle(fa.hi) + angle(fb.hi);
    let c = CHORD_CAP * (PI / 2.0).clamp(lo, hi).sin();
    if c <= 0.0 {
        return Err(EstimateError::NoFeasibleTriangle);
    }
    Ok(c.min(CHORD_CAP))
}

/// Caps for the long edges of an `(r,s,t)` triangle, iterated to a fixed
/// point since each long edge bounds the others.
pub fn long_edge_cap(r: usize, s: usize, t: usize) -> Result<f64, EstimateError> {
    assert_eq!(r + s + t, 3);
    if t == 0 {
        return Ok(LONG_EDGE);
    }
    let mut cap = CHORD_CAP;
    loop {
        let mut others: Vec<ChordRange> = Vec::new();
        others.extend(std::iter::repeat_n(ChordRange::point(2.0), r));
        others.extend(std::iter::repeat_n(ChordRange::new(2.0 * H0, LONG_EDGE), s));
        others.extend(std::iter::repeat_n(ChordRange::new(LONG_EDGE, cap), t - 1));
        let next = circumradius_edge_bound(others[0], others[1])?;
        if next < LONG_EDGE - EQ_TOL {
            return Err(EstimateError::NoFeasibleTriangle);
        }
        let next = next.max(LONG_EDGE).min(cap);
        if cap - next <= 1e-15 {
            return Ok(next);
        }
        cap = next;
    }
}

fn area(c: [f64; 3]) -> Option<f64> {
    triangle_area_from_chords(c[0], c[1], c[2]).ok()
}

/// Minimal spherical area over the box, taken at the corners.
pub fn min_area_over_box(b: &EdgeBox) -> Result<f64, EstimateError> {
    b.corners().filter_map(area).reduce(f64::min).ok_or(EstimateError::NothingRealizable)
}

/// Minimal area over the `GRID³` sample points of the box.
pub fn grid_min_area(b: &EdgeBox) -> Option<f64> {
    b.grid().filter_map(area).reduce(f64::min)
}

/// Minimal circumradius over corners and grid. Unrealizable triples count
/// as `+∞`.
pub fn min_circumradius_over_box(b: &EdgeBox) -> f64 {
    b.corners()
        .chain(b.grid())
        .map(|[x, y, z]| circumradius(x, y, z).unwrap_or(f64::INFINITY))
        .fold(f64::INFINITY, f64::min)
}

fn triple_id(r: usize, s: usize, t: usize) -> String {
    format!("({r},{s},{t})")
}

fn area_case(id: String, b: &EdgeBox, required: f64, tolerance: Tolerance) -> Result<CaseReport, EstimateError> {
    let corner = min_area_over_box(b)?;
    let grid = grid_min_area(b).unwrap_or(f64::INFINITY);
    let inequality = format!("area ≥ {required:.9}");
    Ok(CaseReport::new(id, inequality, corner, required, tolerance).with_grid(grid, grid >= corner - EQ_TOL))
}

fn box_for(r: usize, s: usize, t: usize, cap: f64) -> EdgeBox {
    let mut edges = Vec::with_capacity(3);
    edges.extend(std::iter::repeat_n(EdgeBox::contact(), r));
    edges.extend(std::iter::repeat_n(EdgeBox::small_gap(), s));
    edges.extend(std::iter::repeat_n(EdgeBox::large(cap), t));
    EdgeBox { edges: [edges[0], edges[1], edges[2]] }
}

/// Every `(r,s,t)` with `r + s + t = 3`.
pub fn triangle_classes() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for r in (0..=3).rev() {
        for s in (0..=3 - r).rev() {
            out.push((r, s, 3 - r - s));
        }
    }
    out
}

/// The inequality `A ≥ sol0 + d3(r,s,t)` for every triangle class.
pub fn verify_d3_cases() -> Vec<CaseReport> {
    let t3 = tables();
    let sol0 = sol0();
    let mut out = Vec::new();
    for (r, s, t) in triangle_classes() {
        let id = triple_id(r, s, t);
        let required = sol0 + t3.d3(r, s, t);
        let sharp = matches!((r, s, t), (3, 0, 0) | (2, 0, 1));
        let tolerance = if sharp { Tolerance::Sharp } else { Tolerance::Margin };
        let report = match (r, s, t) {
            (1, 1, 1) => {
                out.extend(verify_111(required));
                continue;
            }
            (0, 0, 3) => {
                let computed = long_edge_cap(r, s, t);
                let cap_ok = computed.as_ref().is_ok_and(|&c| c <= LONG_CAP_003);
                let radius = circumradius(LONG_EDGE, LONG_EDGE, LONG_CAP_003).unwrap_or(f64::NAN);
                out.push(CaseReport::new(
                    format!("cap{id}"),
                    format!("circumradius(3,3,{LONG_CAP_003}) > √3"),
                    radius,
                    MAX_CIRCUMRADIUS,
                    Tolerance::Margin,
                ));
                if !cap_ok {
                    out.last_mut().unwrap().pass = false;
                }
                let b = box_for(r, s, t, LONG_CAP_003);
                if let Ok(rep) = area_case(format!("area{id} ≥ π/2"), &b, PI / 2.0, Tolerance::Margin) {
                    out.push(rep);
                }
                area_case(id, &b, required, tolerance)
            }
            _ => long_edge_cap(r, s, t).and_then(|cap| {
                if t > 0 {
                    out.push(cap_report(&id, r, s, cap));
                }
                area_case(id.clone(), &box_for(r, s, t, cap), required, tolerance)
            }),
        };
        out.push(report.unwrap_or_else(|e| failed(triple_id(r, s, t), e)));
    }
    out
}

fn cap_report(id: &str, r: usize, s: usize, cap: f64) -> CaseReport {
    // the cap is tight: the maximizing triangle sits on the circumradius bound
    let (a, b) = match (r, s) {
        (2, 0) => (2.0, 2.0),
        _ => {
            return CaseReport::new(format!("cap{id}"), "long edge cap ≥ 3.0".into(), cap, LONG_EDGE, Tolerance::Exact)
        }
    };
    let radius = circumradius(a, b, cap).unwrap_or(f64::NAN);
    CaseReport::new(
        format!("cap{id}"),
        format!("circumradius(2,2,{cap:.9}) = √3"),
        radius,
        MAX_CIRCUMRADIUS,
        Tolerance::Sharp,
    )
}

fn failed(id: String, e: EstimateError) -> CaseReport {
    let mut r = CaseReport::new(id, e.to_string(), f64::NAN, 0.0, Tolerance::Margin);
    r.pass = false;
    r
}

/// The `(1,1,1)` case split by the long edge at 3.45 and the middle edge at 2.6.
fn verify_111(required: f64) -> Vec<CaseReport> {
    let contact = EdgeBox::contact();
    let mut out = Vec::new();

    let short_long = EdgeBox { edges: [contact, EdgeBox::small_gap(), EdgeBox::large(SPLIT_LONG)] };
    out.push(
        area_case("(1,1,1) long ≤ 3.45".into(), &short_long, required, Tolerance::Margin)
            .unwrap_or_else(|e| failed("(1,1,1) long ≤ 3.45".into(), e)),
    );

    let wide_mid = TaggedRange { class: EdgeClass::SmallGap, range: ChordRange::new(SPLIT_MID, LONG_EDGE) };
    let mid = circumradius_edge_bound(contact.range, wide_mid.range).and_then(|cap| {
        let b = EdgeBox { edges: [contact, wide_mid, EdgeBox::large(cap)] };
        area_case("(1,1,1) mid ≥ 2.6".into(), &b, required, Tolerance::Margin)
    });
    out.push(mid.unwrap_or_else(|e| failed("(1,1,1) mid ≥ 2.6".into(), e)));

    let vacuous = EdgeBox {
        edges: [
            contact,
            TaggedRange { class: EdgeClass::SmallGap, range: ChordRange::new(2.0 * H0, SPLIT_MID) },
            TaggedRange { class: EdgeClass::Large, range: ChordRange::new(SPLIT_LONG, CHORD_CAP) },
        ],
    };
    out.push(CaseReport::new(
        "(1,1,1) vacuous".into(),
        "circumradius > √3".into(),
        min_circumradius_over_box(&vacuous),
        MAX_CIRCUMRADIUS,
        Tolerance::Margin,
    ));
    out
}

/// How two regions are glued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeRule {
    /// The shared edge is at least 3.0 long.
    SharedLong,
    /// The shared edge lies in `[2h0, 3.0)`.
    SharedSmallGap,
}

impl MergeRule {
    pub fn merge(self, a: (usize, usize, usize), b: (usize, usize, usize)) -> Option<(usize, usize, usize)> {
        let (r, s, t) = (a.0 + b.0, a.1 + b.1, a.2 + b.2);
        match self {
            MergeRule::SharedLong if a.2 > 0 && b.2 > 0 => Some((r, s, t - 2)),
            MergeRule::SharedSmallGap if a.1 > 0 && b.1 > 0 => Some((r, s - 2, t)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub reason: String,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperadditivityReport {
    /// One report per merge rule plus the partition chain.
    pub cases: Vec<CaseReport>,
    pub exclusions: Vec<Exclusion>,
    pub checked: usize,
    /// Size of the full ordered cross product over both rules.
    pub cross_product: usize,
    pub partitions: usize,
}

impl SuperadditivityReport {
    pub fn pass(&self) -> bool {
        let excluded: usize = self.exclusions.iter().map(|e| e.pairs).sum();
        self.cases.iter().all(|c| c.pass) && self.checked + excluded == self.cross_product
    }
}

pub const REASON_ALL_CONTACT: &str = "(3,0,0) has no edge to share";
pub const REASON_NO_SHARED: &str = "no edge of the shared class";
pub const REASON_DIAGONAL: &str = "diagonal ≤ √8";

/// Regions `(r,s,t)` with `3 ≤ r + s + t ≤ MAX_REGION`.
pub fn regions() -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for n in 3..=MAX_REGION {
        for r in 0..=n {
            for s in 0..=n - r {
                out.push((r, s, n - r - s));
            }
        }
    }
    out
}

fn d3(c: (usize, usize, usize)) -> i64 {
    tables().d3_milli(c.0, c.1, c.2)
}

/// Exhaustive superadditivity of `d3` under both merge rules, and the chain
/// `Σ d3 ≥ d2(r,s)` on every triangulated polygon up to `MAX_PARTITION` sides.
pub fn verify_superadditivity() -> SuperadditivityReport {
    let all = regions();
    let mut cases = Vec::new();
    let mut counts = [0usize; 3];
    let mut checked = 0;
    let mut cross_product = 0;
    for rule in [MergeRule::SharedLong, MergeRule::SharedSmallGap] {
        let mut worst = i64::MAX;
        for &a in &all {
            for &b in &all {
                cross_product += 1;
                if a == (3, 0, 0) || b == (3, 0, 0) {
                    counts[0] += 1;
                    continue;
                }
                let Some(m) = rule.merge(a, b) else {
                    counts[1] += 1;
                    continue;
                };
                if rule == MergeRule::SharedLong && a == (2, 0, 1) && b == (2, 0, 1) {
                    counts[2] += 1;
                    continue;
                }
                checked += 1;
                worst = worst.min(d3(a) + d3(b) - d3(m));
            }
        }
        let id = match rule {
            MergeRule::SharedLong => "superadditive, long",
            MergeRule::SharedSmallGap => "superadditive, small gap",
        };
        let w = worst as f64 / 1000.0;
        cases.push(CaseReport::new(id.into(), "d3(a) + d3(b) ≥ d3(merged)".into(), w, 0.0, Tolerance::Exact));
    }
    let (partitions, worst) = partition_chain();
    cases.push(CaseReport::new(
        "partition chain".into(),
        "Σ d3 ≥ d2(r,s)".into(),
        worst as f64 / 1000.0,
        0.0,
        Tolerance::Exact,
    ));
    let exclusions = [REASON_ALL_CONTACT, REASON_NO_SHARED, REASON_DIAGONAL]
        .iter()
        .zip(counts)
        .map(|(r, n)| Exclusion { reason: r.to_string(), pairs: n })
        .collect();
    SuperadditivityReport { cases, exclusions, checked, cross_product, partitions }
}

/// Triangulations of the polygon `i..=j` as vertex triples.
pub fn triangulations(i: usize, j: usize) -> Vec<Vec<[usize; 3]>> {
    if j < i + 2 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for m in i + 1..j {
        for left in triangulations(i, m) {
            for right in triangulations(m, j) {
                let mut t = left.clone();
                t.extend_from_slice(&right);
                t.push([i, m, j]);
                out.push(t);
            }
        }
    }
    out
}

/// Walks every polygon with boundary classes in `{r, s}`, every
/// triangulation and every diagonal class in `{s, t}`. Returns the number of
/// partitions checked and the smallest `Σ d3 − d2`, in thousandths.
fn partition_chain() -> (usize, i64) {
    let t3 = tables();
    let mut count = 0;
    let mut worst = i64::MAX;
    for k in 3..=MAX_PARTITION {
        let tris = triangulations(0, k - 1);
        for boundary in 0u32..1 << k {
            // bit set on edge (v, v+1) means a small gap
            let s = boundary.count_ones() as usize;
            let d2 = t3.d2_milli(k - s, s);
            for tri in &tris {
                let is_boundary = |a: usize, b: usize| b == a + 1 || (a == 0 && b == k - 1);
                let mut diagonals: Vec<(usize, usize)> = tri
                    .iter()
                    .flat_map(|&[a, b, c]| [(a, b), (b, c), (a, c)])
                    .filter(|&(a, b)| !is_boundary(a, b))
                    .collect();
                diagonals.sort_unstable();
                diagonals.dedup();
                for long in 0u32..1 << diagonals.len() {
                    let class = |a: usize, b: usize| -> EdgeClass {
                        if is_boundary(a, b) {
                            let e = if b == a + 1 { a } else { k - 1 };
                            if boundary >> e & 1 == 1 {
                                EdgeClass::SmallGap
                            } else {
                                EdgeClass::Contact
                            }
                        } else {
                            let d = diagonals.binary_search(&(a, b)).unwrap();
                            if long >> d & 1 == 1 {
                                EdgeClass::Large
                            } else {
                                EdgeClass::SmallGap
                            }
                        }
                    };
                    let kinds: Vec<(usize, usize, usize)> = tri
                        .iter()
                        .map(|&[a, b, c]| {
                            let cs = [class(a, b), class(b, c), class(a, c)];
                            let n = |x| cs.iter().filter(|&&y| y == x).count();
                            (n(EdgeClass::Contact), n(EdgeClass::SmallGap), n(EdgeClass::Large))
                        })
                        .collect();
                    let forbidden = diagonals.iter().any(|&(a, b)| {
                        class(a, b) == EdgeClass::Large && {
                            let sides: Vec<usize> = tri
                                .iter()
                                .enumerate()
                                .filter(|(_, t)| t.contains(&a) && t.contains(&b))
                                .map(|(i, _)| i)
                                .collect();
                            sides.iter().all(|&i| kinds[i] == (2, 0, 1))
                        }
                    });
                    if forbidden {
                        continue;
                    }
                    count += 1;
                    let sum: i64 = kinds.iter().map(|&c| d3(c)).sum();
                    worst = worst.min(sum - d2);
                }
            }
        }
    }
    (count, worst)
}

fn cached() -> &'static (Vec<CaseReport>, SuperadditivityReport) {
    static CACHE: OnceLock<(Vec<CaseReport>, SuperadditivityReport)> = OnceLock::new();
    CACHE.get_or_init(|| (verify_d3_cases(), verify_superadditivity()))
}

/// `τ ≥ min(d2(r,s), tgt)` for a face with `r` contact and `s` small-gap
/// edges, derived from the triangle cases and superadditivity.
pub fn verify_face_bound(r: usize, s: usize) -> Result<CaseReport, EstimateError> {
    if r + s < 3 {
        return Err(EstimateError::TooFewEdges(r + s));
    }
    let (cases, sup) = cached();
    let d2 = tables().d2_milli(r, s);
    let bound = d2.min(TGT_MILLI);
    let mut report = CaseReport::new(
        format!("face ({r},{s})"),
        format!("τ ≥ Σ(A_i − sol0) ≥ Σ d3 ≥ d2({r},{s}) ≥ {:.3}", bound as f64 / 1000.0),
        d2 as f64 / 1000.0,
        bound as f64 / 1000.0,
        Tolerance::Exact,
    );
    report.pass &= cases.iter().all(|c| c.pass) && sup.pass();
    Ok(report)
}

/// Everything this module checks, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub triangles: Vec<CaseReport>,
    pub superadditivity: SuperadditivityReport,
    pub faces: Vec<CaseReport>,
}

impl EstimateReport {
    pub fn pass(&self) -> bool {
        self.triangles.iter().all(|c| c.pass) && self.superadditivity.pass() && self.faces.iter().all(|c| c.pass)
    }

    pub fn all_cases(&self) -> impl Iterator<Item = &CaseReport> {
        self.triangles.iter().chain(&self.superadditivity.cases).chain(&self.faces)
    }
}

/// Runs every check. Face bounds cover `3 ≤ r + s ≤ 9`.
pub fn verify_all() -> EstimateReport {
    let (triangles, superadditivity) = cached().clone();
    let faces = (3..=9)
        .flat_map(|k| (0..=k).map(move |s| (k - s, s)))
        .map(|(r, s)| verify_face_bound(r, s).expect("at least three edges"))
        .collect();
    EstimateReport { triangles, superadditivity, faces }
}
