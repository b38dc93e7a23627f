//! Exact linear feasibility with certificates, and the eliminations of
//! candidate contact hypermaps.
//!
//! Systems are lists of rows `lo ≤ aᵀx ≤ hi` over free rational variables.
//! [`solve`] returns either a witness point or a Farkas certificate, and
//! both are re-checked before they are returned.

pub(crate) mod simplex;

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypermap::{Hypermap, OrbitKind};
use crate::tame;

use simplex::phase_one;
pub use simplex::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed system: {0}")]
    Malformed(String),
    #[error("unsupported face size {0}")]
    UnsupportedFaceSize(usize),
    #[error("solver verdict failed validation")]
    Unverified,
}

/// Where a row of an angle system comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RowTag {
    /// Angles around a node sum to 2π.
    NodeSum { node: usize },
    /// A quadrilateral angle lies in `[α₄, β₄]`; one row per side.
    QuadRange { dart: usize },
    /// An angle of a face with five or more sides lies in `[α₅, β₅]`.
    LargeRange { dart: usize },
    /// The weight `τ(F) = Σ angles − (k−2)(π + sol₀)` of a face is at least
    /// `d₁(k)`.
    FaceWeight { face: usize },
    /// Opposite angles of a quadrilateral are equal.
    OppositeEquality { dart: usize, opposite: usize },
    /// A row supplied directly by the caller.
    Given,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// Sparse coefficients `(variable, value)`.
    pub coeffs: Vec<(usize, Q)>,
    pub lo: Option<Q>,
    pub hi: Option<Q>,
    pub tag: RowTag,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, Q)>, lo: Option<Q>, hi: Option<Q>, tag: RowTag) -> Self {
        Row { coeffs, lo, hi, tag }
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn holds_at(&self, x: &[Q]) -> bool {
        let v = self.eval(x);
        self.lo.as_ref().is_none_or(|lo| *lo <= v) && self.hi.as_ref().is_none_or(|hi| v <= *hi)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LpSystem {
    pub vars: Vec<String>,
    pub rows: Vec<Row>,
}

impl LpSystem {
    pub fn new(vars: Vec<String>) -> Self {
        LpSystem { vars, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn count_tag(&self, pred: impl Fn(&RowTag) -> bool) -> usize {
        self.rows.iter().filter(|r| pred(&r.tag)).count()
    }

    fn validate(&self) -> Result<(), LpError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.lo.is_none() && row.hi.is_none() {
                return Err(LpError::Malformed(format!("row {i} has no bounds")));
            }
            if let Some((j, _)) = row.coeffs.iter().find(|(j, _)| *j >= self.vars.len()) {
                return Err(LpError::Malformed(format!("row {i} refers to variable {j}")));
            }
        }
        Ok(())
    }

    /// Rows as `gᵀx ≤ h`, lower bounds negated.
    fn inequalities(&self) -> Vec<(usize, Side, Vec<Q>, Q)> {
        let nv = self.vars.len();
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut dense = vec![Q::zero(); nv];
            for (j, a) in &row.coeffs {
                dense[*j] += a;
            }
            if let Some(lo) = &row.lo {
                out.push((i, Side::Lower, dense.iter().map(|v| -v).collect(), -lo));
            }
            if let Some(hi) = &row.hi {
                out.push((i, Side::Upper, dense, hi.clone()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// Nonnegative weight on one side of one row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub row: usize,
    pub side: Side,
    #[serde(with = "rational_string")]
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum FeasibilityVerdict {
    Feasible {
        #[serde(with = "rational_vec")]
        witness: Vec<Q>,
    },
    Infeasible {
        certificate: Vec<Multiplier>,
    },
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityVerdict::Feasible { .. })
    }

    /// Checks the verdict against `system` without the solver: a witness must
    /// satisfy every row, and a certificate must combine the rows into
    /// `0 ≤ negative`.
    pub fn verify(&self, system: &LpSystem) -> bool {
        match self {
            FeasibilityVerdict::Feasible { witness } => {
                witness.len() == system.vars.len() && system.rows.iter().all(|r| r.holds_at(witness))
            }
            FeasibilityVerdict::Infeasible { certificate } => {
                let mut combo = vec![Q::zero(); system.vars.len()];
                let mut rhs = Q::zero();
                for m in certificate {
                    let Some(row) = system.rows.get(m.row) else { return false };
                    if m.value.is_negative() {
                        return false;
                    }
                    let (sign, bound) = match m.side {
                        Side::Upper => (Q::from_integer(1.into()), row.hi.as_ref()),
                        Side::Lower => (Q::from_integer((-1).into()), row.lo.as_ref()),
                    };
                    let Some(bound) = bound else { return false };
                    for (j, a) in &row.coeffs {
                        combo[*j] += &m.value * &sign * a;
                    }
                    rhs += &m.value * &sign * bound;
                }
                combo.iter().all(Zero::is_zero) && rhs.is_negative()
            }
        }
    }
}

/// Decides feasibility of `system` exactly.
pub fn solve(system: &LpSystem) -> Result<FeasibilityVerdict, LpError> {
    system.validate()?;
    let nv = system.vars.len();
    let ineq = system.inequalities();
    let k = ineq.len();
    if k == 0 {
        return Ok(FeasibilityVerdict::Feasible { witness: vec![Q::zero(); nv] });
    }

    // G p − G q + s = h with p, q, s ≥ 0
    let a: Vec<Vec<Q>> = ineq
        .iter()
        .enumerate()
        .map(|(i, (_, _, g, _))| {
            let mut row: Vec<Q> = g.clone();
            row.extend(g.iter().map(|v| -v));
            row.extend((0..k).map(|t| if t == i { Q::from_integer(1.into()) } else { Q::zero() }));
            row
        })
        .collect();
    let b: Vec<Q> = ineq.iter().map(|(_, _, _, h)| h.clone()).collect();
    let verdict = if let Some(y) = phase_one(&a, &b) {
        FeasibilityVerdict::Feasible { witness: (0..nv).map(|j| &y[j] - &y[nv + j]).collect() }
    } else {
        // Gᵀy = 0, hᵀy = −1, y ≥ 0
        let mut ft: Vec<Vec<Q>> = (0..nv).map(|j| ineq.iter().map(|(_, _, g, _)| g[j].clone()).collect()).collect();
        ft.push(b.clone());
        let mut rhs = vec![Q::zero(); nv];
        rhs.push(Q::from_integer((-1).into()));
        let y = phase_one(&ft, &rhs).ok_or(LpError::Unverified)?;
        let certificate = ineq
            .iter()
            .zip(y)
            .filter(|(_, v)| !v.is_zero())
            .map(|((row, side, _, _), value)| Multiplier { row: *row, side: *side, value })
            .collect();
        FeasibilityVerdict::Infeasible { certificate }
    };
    if verdict.verify(system) {
        Ok(verdict)
    } else {
        Err(LpError::Unverified)
    }
}

/// A closed rational interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational_string")]
    pub lo: Q,
    #[serde(with = "rational_string")]
    pub hi: Q,
}

const ENCLOSURE_SCALE: i64 = 1_000_000_000_000;
const ENCLOSURE_PAD: i64 = 400;

impl Interval {
    /// Encloses a double-precision value with a pad of `4·10⁻¹⁰` on each
    /// side, on a grid of `10⁻¹²`.
    pub fn enclose(v: f64) -> Interval {
        let scaled = v * ENCLOSURE_SCALE as f64;
        let lo = BigInt::from(scaled.floor() as i64 - ENCLOSURE_PAD);
        let hi = BigInt::from(scaled.ceil() as i64 + ENCLOSURE_PAD);
        let d = BigInt::from(ENCLOSURE_SCALE);
        Interval { lo: Q::new(lo, d.clone()), hi: Q::new(hi, d) }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo.to_f64().is_some_and(|lo| lo <= v) && self.hi.to_f64().is_some_and(|hi| v <= hi)
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn widened(&self, eps: &Q) -> Interval {
        Interval { lo: &self.lo - eps, hi: &self.hi + eps }
    }
}

/// Rational enclosures of the constants an angle system uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleBounds {
    pub two_pi: Interval,
    pub alpha3: Interval,
    pub alpha4: Interval,
    pub beta4: Interval,
    pub alpha5: Interval,
    pub beta5: Interval,
    /// `π + sol₀`, the per-vertex constant in a face weight.
    pub pi_plus_sol0: Interval,
}

impl Default for AngleBounds {
    fn default() -> Self {
        let t = tame::tables();
        AngleBounds {
            two_pi: Interval::enclose(2.0 * PI),
            alpha3: Interval::enclose(t.alpha(3)),
            alpha4: Interval::enclose(t.alpha(4)),
            beta4: Interval::enclose(t.beta(4)),
            alpha5: Interval::enclose(t.alpha(5)),
            beta5: Interval::enclose(t.beta(5)),
            pi_plus_sol0: Interval::enclose(PI + t.constants.sol0),
        }
    }
}

impl AngleBounds {
    /// Every interval widened by `eps`; the system only gets easier.
    pub fn widened(&self, eps: &Q) -> Self {
        AngleBounds {
            two_pi: self.two_pi.widened(eps),
            alpha3: self.alpha3.widened(eps),
            alpha4: self.alpha4.widened(eps),
            beta4: self.beta4.widened(eps),
            alpha5: self.alpha5.widened(eps),
            beta5: self.beta5.widened(eps),
            pi_plus_sol0: self.pi_plus_sol0.widened(eps),
        }
    }

    /// Every one-sided bound made stricter by `eps`: the angle ranges pulled
    /// in, and the face weight constant raised. The node-sum enclosures stay
    /// as they are, since they stand for equalities.
    pub fn shrunk(&self, eps: &Q) -> Self {
        let mut out = self.clone();
        for iv in [&mut out.alpha4, &mut out.alpha5] {
            iv.lo += eps;
        }
        for iv in [&mut out.beta4, &mut out.beta5] {
            iv.hi -= eps;
        }
        out.pi_plus_sol0.lo += eps;
        out
    }
}

/// `10⁻⁶` as a rational.
pub fn micro() -> Q {
    Q::new(1.into(), 1_000_000.into())
}

/// An angle system plus the dart behind each variable.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSystem {
    pub system: LpSystem,
    /// `var_darts[j]` is the dart whose angle variable `j` is.
    pub var_darts: Vec<usize>,
}

/// Builds the linear constraints on the angles of a hypermap with faces of
/// size 3 to 8. Each dart of a face with four or more sides carries one angle
/// variable; triangle angles enter as the constant `α₃`. Quadrilateral
/// angles lie in `[α₄, β₄]` with opposite angles equal, and angles of larger
/// faces lie in `[α₅, β₅]`.
pub fn build_angle_system(h: &Hypermap, bounds: &AngleBounds) -> Result<AngleSystem, LpError> {
    let faces = h.orbits(OrbitKind::Face);
    let face_of = h.orbit_index(OrbitKind::Face);
    if let Some(bad) = faces.classes.iter().find(|c| !(3..=8).contains(&c.len())) {
        return Err(LpError::UnsupportedFaceSize(bad.len()));
    }
    let size = |x: usize| faces.classes[face_of[x]].len();
    let var_darts: Vec<usize> = (0..h.dart_count()).filter(|&x| size(x) >= 4).collect();
    let var_of = |x: usize| var_darts.binary_search(&x).expect("dart of a face with four or more sides");
    let mut system = LpSystem::new(var_darts.iter().map(|x| format!("x{x}")).collect());
    let one = || Q::from_integer(1.into());

    for (node, darts) in h.orbits(OrbitKind::Node).classes.iter().enumerate() {
        let t = Q::from_integer(darts.iter().filter(|&&x| size(x) == 3).count().into());
        let coeffs = darts.iter().filter(|&&x| size(x) >= 4).map(|&x| (var_of(x), one())).collect();
        let lo = &bounds.two_pi.lo - &t * &bounds.alpha3.hi;
        let hi = &bounds.two_pi.hi - &t * &bounds.alpha3.lo;
        system.push(Row::new(coeffs, Some(lo), Some(hi), RowTag::NodeSum { node }));
    }
    let f = h.f();
    for quad in faces.classes.iter().filter(|c| c.len() == 4) {
        let x = quad[0];
        for d in [x, f[x]] {
            let opp = f[f[d]];
            let coeffs = vec![(var_of(d), one()), (var_of(opp), -one())];
            let tag = RowTag::OppositeEquality { dart: d, opposite: opp };
            system.push(Row::new(coeffs, Some(Q::zero()), Some(Q::zero()), tag));
        }
    }
    for (j, &x) in var_darts.iter().enumerate() {
        let (tag, lo, hi) = if size(x) == 4 {
            (RowTag::QuadRange { dart: x }, &bounds.alpha4.lo, &bounds.beta4.hi)
        } else {
            (RowTag::LargeRange { dart: x }, &bounds.alpha5.lo, &bounds.beta5.hi)
        };
        system.push(Row::new(vec![(j, one())], Some(lo.clone()), None, tag.clone()));
        system.push(Row::new(vec![(j, one())], None, Some(hi.clone()), tag));
    }
    Ok(AngleSystem { system, var_darts })
}

/// Adds `τ(F) ≥ d₁(k)` for every face with four or more sides, with `τ`
/// written through the angles: the area of a spherical `k`-gon is its angle
/// sum minus `(k−2)π`. Triangles are skipped; with all angles `α₃` their
/// weight is exactly `0 = d₁(3)`.
pub fn add_face_weight_rows(angles: &mut AngleSystem, h: &Hypermap, bounds: &AngleBounds) {
    let t = tame::tables();
    for (face, darts) in h.orbits(OrbitKind::Face).classes.iter().enumerate() {
        let k = darts.len();
        if k < 4 {
            continue;
        }
        let coeffs = darts
            .iter()
            .map(|x| (angles.var_darts.binary_search(x).expect("angle variable"), Q::from_integer(1.into())))
            .collect();
        let lo = Q::from_integer((k as i64 - 2).into()) * &bounds.pi_plus_sol0.lo
            + Q::new(t.d1_milli(k).into(), 1000.into());
        angles.system.push(Row::new(coeffs, Some(lo), None, RowTag::FaceWeight { face }));
    }
}

/// Which rows an angle system was built with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleSet {
    /// Node sums, triangle angles, angle ranges, opposite angles.
    Angles,
    /// The above plus the face weight rows.
    AnglesAndFaceWeights,
}

/// The angle system of `h` under `rules`.
pub fn candidate_system(h: &Hypermap, bounds: &AngleBounds, rules: RuleSet) -> Result<AngleSystem, LpError> {
    let mut angles = build_angle_system(h, bounds)?;
    if rules == RuleSet::AnglesAndFaceWeights {
        add_face_weight_rows(&mut angles, h, bounds);
    }
    Ok(angles)
}

pub const HEXAGON_RULE: &str = "a convex hexagon with six sides of arc π/3 would have perimeter 2π";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HexagonElimination {
    /// Darts of the offending face.
    pub face: Vec<usize>,
    pub perimeter: f64,
    pub rule: String,
}

/// Eliminates a hypermap containing a hexagonal face: each contact edge has
/// arc `π/3`, and a geodesically convex hexagon has perimeter strictly less
/// than `2π`.
pub fn hexagon_rule(h: &Hypermap) -> Option<HexagonElimination> {
    let face = h.orbits(OrbitKind::Face).classes.into_iter().find(|c| c.len() == 6)?;
    Some(HexagonElimination { face, perimeter: 2.0 * PI, rule: HEXAGON_RULE.to_string() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fate", rename_all = "kebab-case")]
pub enum Fate {
    Survivor {
        #[serde(with = "rational_vec")]
        witness: Vec<Q>,
    },
    LpInfeasible {
        rules: RuleSet,
        certificate: Vec<Multiplier>,
    },
    HexagonEliminated(HexagonElimination),
}

impl Fate {
    pub fn survives(&self) -> bool {
        matches!(self, Fate::Survivor { .. })
    }
}

impl fmt::Display for Fate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fate::Survivor { .. } => "survivor",
            Fate::LpInfeasible { .. } => "lp-infeasible",
            Fate::HexagonEliminated(_) => "hexagon-eliminated",
        })
    }
}

/// Fate of one candidate: the hexagon rule first, then the angle system,
/// then the angle system with face weight rows. Every bound is widened by
/// `10⁻⁶`.
pub fn fate_of(h: &Hypermap) -> Result<Fate, LpError> {
    if let Some(rec) = hexagon_rule(h) {
        return Ok(Fate::HexagonEliminated(rec));
    }
    let bounds = AngleBounds::default().widened(&micro());
    let mut witness = Vec::new();
    for rules in [RuleSet::Angles, RuleSet::AnglesAndFaceWeights] {
        match solve(&candidate_system(h, &bounds, rules)?.system)? {
            FeasibilityVerdict::Feasible { witness: w } => witness = w,
            FeasibilityVerdict::Infeasible { certificate } => return Ok(Fate::LpInfeasible { rules, certificate }),
        }
    }
    Ok(Fate::Survivor { witness })
}

/// Re-validates a fate from scratch: the hexagon is present, or the
/// certificate refutes the rebuilt widened system, or the witness satisfies
/// it.
pub fn recheck(h: &Hypermap, fate: &Fate) -> Result<bool, LpError> {
    let bounds = AngleBounds::default().widened(&micro());
    Ok(match fate {
        Fate::HexagonEliminated(rec) => hexagon_rule(h).as_ref() == Some(rec),
        Fate::LpInfeasible { rules, certificate } => {
            let sys = candidate_system(h, &bounds, *rules)?;
            FeasibilityVerdict::Infeasible { certificate: certificate.clone() }.verify(&sys.system)
        }
        Fate::Survivor { witness } => {
            let sys = candidate_system(h, &bounds, RuleSet::AnglesAndFaceWeights)?;
            FeasibilityVerdict::Feasible { witness: witness.clone() }.verify(&sys.system)
        }
    })
}

/// Feasibility with every range pulled in by `10⁻⁶`.
pub fn feasible_when_shrunk(h: &Hypermap) -> Result<bool, LpError> {
    let bounds = AngleBounds::default().shrunk(&micro());
    Ok(solve(&candidate_system(h, &bounds, RuleSet::AnglesAndFaceWeights)?.system)?.is_feasible())
}

/// Fates of all candidates, in input order.
pub fn eliminate(candidates: &[Hypermap]) -> Result<Vec<Fate>, LpError> {
    candidates.par_iter().map(fate_of).collect()
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn rational_to_string(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => Some(Q::from_integer(s.trim().parse().ok()?)),
    }
}

pub(crate) mod rational_string {
    use super::{parse_rational, rational_to_string, Q};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

pub(crate) mod rational_vec {
    use super::{parse_rational, rational_to_string, Q};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&rational_to_string(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}
