//! Euclidean and spherical trigonometry on the sphere of radius 2.
//!
//! Interfaces take Euclidean chord lengths; arcs are an internal
//! representation. Degenerate inputs are rejected with typed errors instead
//! of being clamped.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Truncation parameter.
pub const H0: f64 = 1.26;
/// Target weight.
pub const TGT: f64 = 1.541;
/// Radius of the sphere carrying the kissing configuration.
pub const SPHERE_RADIUS: f64 = 2.0;
/// Absolute tolerance for equality assertions.
pub const EQ_TOL: f64 = 1e-9;
/// Required slack for verified inequalities.
pub const MARGIN: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("value {0} outside the admissible range")]
    OutOfRange(f64),
    #[error("degenerate spherical triangle")]
    DegenerateTriangle,
    #[error("edge lengths do not embed as a nondegenerate simplex")]
    NotEmbeddable,
    #[error("chords do not form a spherical triangle")]
    NotRealizable,
    #[error("side lengths violate the triangle inequality")]
    NotATriangle,
    #[error("spherical polygon is self-intersecting")]
    SelfIntersecting,
    #[error("points are collinear with the origin")]
    Collinear,
}

/// The constants of the proof, evaluated in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub h0: f64,
    pub tgt: f64,
    /// Solid angle of the equilateral spherical triangle with side π/3.
    pub sol0: f64,
    /// `4π − 20·sol0`, the total weight of every twelve-point contact map.
    pub total: f64,
}

impl Constants {
    pub fn new() -> Self {
        let sol0 = sol0();
        Constants { h0: H0, tgt: TGT, sol0, total: 4.0 * PI - 20.0 * sol0 }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new()
    }
}

pub fn sol0() -> f64 {
    3.0 * (1.0f64 / 3.0).acos() - PI
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl From<Point3> for [f64; 3] {
    fn from(p: Point3) -> Self {
        [p.x, p.y, p.z]
    }
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(self.y * o.z - self.z * o.y, self.z * o.x - self.x * o.z, self.x * o.y - self.y * o.x)
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Point3 {
        self * (1.0 / self.norm())
    }

    pub fn triple(a: Point3, b: Point3, c: Point3) -> f64 {
        a.dot(b.cross(c))
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// `L(h) = (h0 − h)/(h0 − 1)`.
pub fn lfun(h: f64) -> f64 {
    (H0 - h) / (H0 - 1.0)
}

/// Arc (in radians) subtended on the radius-2 sphere by a chord.
pub fn chord_to_arc(c: f64) -> Result<f64, GeomError> {
    if !(0.0..=2.0 * SPHERE_RADIUS).contains(&c) {
        return Err(GeomError::OutOfRange(c));
    }
    Ok(2.0 * (c / (2.0 * SPHERE_RADIUS)).asin())
}

/// Vertex angle of a spherical triangle, by the spherical law of cosines.
/// `opp` is the side facing the angle.
pub fn spherical_angle(opp: f64, adj1: f64, adj2: f64) -> Result<f64, GeomError> {
    let in_range = |a: f64| a > 0.0 && a < PI;
    if !(in_range(opp) && in_range(adj1) && in_range(adj2)) {
        return Err(GeomError::DegenerateTriangle);
    }
    if opp > adj1 + adj2 + EQ_TOL || adj1 > opp + adj2 + EQ_TOL || adj2 > opp + adj1 + EQ_TOL {
        return Err(GeomError::DegenerateTriangle);
    }
    let denom = adj1.sin() * adj2.sin();
    if denom < 1e-15 {
        return Err(GeomError::DegenerateTriangle);
    }
    let c = (opp.cos() - adj1.cos() * adj2.cos()) / denom;
    if c.abs() > 1.0 + 1e-12 {
        return Err(GeomError::DegenerateTriangle);
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

/// Cayley–Menger type determinant of a simplex given squared edge lengths.
pub fn delta(x1: f64, x2: f64, x3: f64, x4: f64, x5: f64, x6: f64) -> f64 {
    x1 * x4 * (-x1 + x2 + x3 - x4 + x5 + x6)
        + x2 * x5 * (x1 - x2 + x3 + x4 - x5 + x6)
        + x3 * x6 * (x1 + x2 - x3 + x4 + x5 - x6)
        - x2 * x3 * x4
        - x1 * x3 * x5
        - x1 * x2 * x6
        - x4 * x5 * x6
}

fn delta_x4(x1: f64, x2: f64, x3: f64, x4: f64, x5: f64, x6: f64) -> f64 {
    -x2 * x3 - x1 * x4 + x2 * x5 + x3 * x6 - x5 * x6 + x1 * (-x1 + x2 + x3 - x4 + x5 + x6)
}

/// Dihedral angle along the edge `0–v1` of the simplex `{0, v1, v2, v3}`,
/// with `y1..y3 = |0vᵢ|`, `y4 = |v2v3|`, `y5 = |v1v3|`, `y6 = |v1v2|`.
pub fn dih(y1: f64, y2: f64, y3: f64, y4: f64, y5: f64, y6: f64) -> Result<f64, GeomError> {
    let ys = [y1, y2, y3, y4, y5, y6];
    if ys.iter().any(|&y| !y.is_finite() || y <= 0.0) {
        return Err(GeomError::NotEmbeddable);
    }
    let [x1, x2, x3, x4, x5, x6] = ys.map(|y| y * y);
    let d = delta(x1, x2, x3, x4, x5, x6);
    let scale = ys.iter().fold(0.0f64, |m, &y| m.max(y)).powi(6);
    if d <= 1e-12 * scale {
        return Err(GeomError::NotEmbeddable);
    }
    let d4 = delta_x4(x1, x2, x3, x4, x5, x6);
    Ok(PI / 2.0 + (-d4).atan2((4.0 * x1 * d).sqrt()))
}

fn arcs_of(c1: f64, c2: f64, c3: f64) -> Result<[f64; 3], GeomError> {
    let arc = |c| chord_to_arc(c).map_err(|_| GeomError::NotRealizable);
    Ok([arc(c1)?, arc(c2)?, arc(c3)?])
}

/// Solid angle (area on the unit sphere) of the spherical triangle whose
/// vertices on the radius-2 sphere are at the given chord distances.
/// Uses l'Huilier's formula.
pub fn triangle_area_from_chords(c1: f64, c2: f64, c3: f64) -> Result<f64, GeomError> {
    let [a, b, c] = arcs_of(c1, c2, c3)?;
    if a + b < c || a + c < b || b + c < a || a + b + c > 2.0 * PI {
        return Err(GeomError::NotRealizable);
    }
    let s = 0.5 * (a + b + c);
    let t = (0.5 * s).tan() * (0.5 * (s - a)).tan() * (0.5 * (s - b)).tan() * (0.5 * (s - c)).tan();
    Ok(4.0 * t.max(0.0).sqrt().atan())
}

/// Euclidean circumradius `abc / (4·area)`. Flat triangles give `+∞`.
pub fn circumradius(a: f64, b: f64, c: f64) -> Result<f64, GeomError> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(GeomError::NotATriangle);
    }
    let tol = EQ_TOL * (a + b + c);
    if a > b + c + tol || b > a + c + tol || c > a + b + tol {
        return Err(GeomError::NotATriangle);
    }
    let area = heron_area(a, b, c);
    if area <= 1e-14 * (a + b + c).powi(2) {
        return Ok(f64::INFINITY);
    }
    Ok(a * b * c / (4.0 * area))
}

/// Heron's formula in the numerically stable ordering.
pub fn heron_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

/// Signed solid angle at the origin of the triangle `(a, b, c)`; positive when
/// the vertices run counterclockwise as seen from outside the sphere.
pub fn signed_triangle_solid_angle(a: Point3, b: Point3, c: Point3) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = Point3::triple(a, b, c);
    let den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
    2.0 * num.atan2(den)
}

/// Whether the minor great-circle arcs `ab` and `cd` meet. Arcs sharing an
/// endpoint are reported as meeting only if they overlap beyond it.
pub fn arcs_cross(a: Point3, b: Point3, c: Point3, d: Point3) -> bool {
    let (a, b, c, d) = (a.normalized(), b.normalized(), c.normalized(), d.normalized());
    let n1 = a.cross(b);
    let n2 = c.cross(d);
    let line = n1.cross(n2);
    if line.norm() < 1e-12 {
        return false;
    }
    let strictly_inside =
        |p: Point3, u: Point3, v: Point3, n: Point3| n.dot(u.cross(p)) > 1e-12 && n.dot(p.cross(v)) > 1e-12;
    [line.normalized(), -line.normalized()]
        .into_iter()
        .any(|p| strictly_inside(p, a, b, n1) && strictly_inside(p, c, d, n2))
}

/// Solid angle of a simple spherical polygon given by its cyclically ordered
/// vertices (counterclockwise seen from outside). Triangulates from the first
/// vertex and sums signed excesses.
pub fn solid_angle_polygon(vertices: &[Point3]) -> Result<f64, GeomError> {
    let k = vertices.len();
    if k < 3 {
        return Err(GeomError::DegenerateTriangle);
    }
    for i in 0..k {
        for j in i + 1..k {
            let adjacent = j == i + 1 || (i == 0 && j == k - 1);
            if adjacent {
                continue;
            }
            let (a, b) = (vertices[i], vertices[(i + 1) % k]);
            let (c, d) = (vertices[j], vertices[(j + 1) % k]);
            if arcs_cross(a, b, c, d) {
                return Err(GeomError::SelfIntersecting);
            }
        }
    }
    let v0 = vertices[0];
    let sum: f64 = (1..k - 1).map(|i| signed_triangle_solid_angle(v0, vertices[i], vertices[i + 1])).sum();
    Ok(sum.rem_euclid(4.0 * PI))
}

/// Counterclockwise angle in `[0, 2π)` from the projection of `u` to the
/// projection of `w` in the plane orthogonal to `v`, using a right-handed
/// frame whose third axis is `v`.
pub fn azim(v: Point3, u: Point3, w: Point3) -> Result<f64, GeomError> {
    let z = v.normalized();
    let pu = u - z * u.dot(z);
    if pu.norm() < 1e-12 * u.norm().max(1.0) {
        return Err(GeomError::Collinear);
    }
    let x = pu.normalized();
    let y = z.cross(x);
    let pw = w - z * w.dot(z);
    if pw.norm() < 1e-12 * w.norm().max(1.0) {
        return Err(GeomError::Collinear);
    }
    Ok(pw.dot(y).atan2(pw.dot(x)).rem_euclid(2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constants_are_in_range() {
        let c = Constants::new();
        assert!(c.sol0 > 0.5512855 && c.sol0 < 0.5512857);
        assert!(c.total > 1.5406 && c.total < 1.5407);
        assert!(c.total < c.tgt);
    }

    #[test]
    fn lfun_values() {
        assert!(close(lfun(1.0), 1.0, 1e-15));
        assert_eq!(lfun(H0), 0.0);
        assert!(close(lfun(1.13), 0.5, 1e-12));
    }

    #[test]
    fn chord_to_arc_values() {
        assert!(close(chord_to_arc(2.0).unwrap(), PI / 3.0, 1e-15));
        assert!(close(chord_to_arc(4.0).unwrap(), PI, 1e-15));
        // 2·asin(0.63) from a 30-digit evaluation
        assert!(close(chord_to_arc(2.0 * H0).unwrap(), 1.363_106_423_126_234, 1e-12));
        assert_eq!(chord_to_arc(4.5), Err(GeomError::OutOfRange(4.5)));
        assert!(chord_to_arc(-0.1).is_err());
    }

    #[test]
    fn spherical_angle_values() {
        let third = PI / 3.0;
        assert!(close(spherical_angle(third, third, third).unwrap(), (1.0f64 / 3.0).acos(), 1e-12));
        assert!(close(spherical_angle(PI / 2.0, PI / 2.0, PI / 2.0).unwrap(), PI / 2.0, 1e-12));
        assert_eq!(spherical_angle(2.0, 0.5, 0.5), Err(GeomError::DegenerateTriangle));
        assert_eq!(spherical_angle(0.0, 0.5, 0.5), Err(GeomError::DegenerateTriangle));
    }

    #[test]
    fn dih_regular_tetrahedron() {
        let d = dih(2.0, 2.0, 2.0, 2.0, 2.0, 2.0).unwrap();
        assert!(close(d, (1.0f64 / 3.0).acos(), 1e-12));
    }

    #[test]
    fn dih_rejects_flat_simplex() {
        // v3 on the segment through v1 and v2 in a plane with 0
        assert_eq!(dih(2.0, 2.0, 2.0, 4.0, 4.0, 2.0 * 3f64.sqrt()), Err(GeomError::NotEmbeddable));
        assert!(dih(2.0, 2.0, 2.0, 10.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn area_of_contact_triangle_is_sol0() {
        assert!(close(triangle_area_from_chords(2.0, 2.0, 2.0).unwrap(), sol0(), 1e-12));
    }

    #[test]
    fn area_of_half_square_face() {
        // a cuboctahedron square face is two such triangles
        let half = triangle_area_from_chords(2.0, 2.0, 8f64.sqrt()).unwrap();
        let square = (4.0 * PI - 8.0 * sol0()) / 6.0;
        assert!(close(2.0 * half, square, 1e-12));
    }

    #[test]
    fn degenerate_area_is_rejected() {
        assert_eq!(triangle_area_from_chords(2.0, 2.0, 4.0 - 1e-9), Err(GeomError::NotRealizable));
        assert_eq!(triangle_area_from_chords(2.0, 2.0, 4.1), Err(GeomError::NotRealizable));
    }

    #[test]
    fn circumradius_values() {
        assert!(close(circumradius(2.0, 2.0, 2.0).unwrap(), 2.0 / 3f64.sqrt(), 1e-12));
        let r = circumradius(3.0, 3.0, 3.27).unwrap();
        assert!(r > 3f64.sqrt());
        assert!(close(r, 1.789, 1e-3));
        assert!(close(circumradius(2.0, 2.0, 8f64.sqrt()).unwrap(), 2f64.sqrt(), 1e-12));
        assert_eq!(circumradius(1.0, 1.0, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(circumradius(1.0, 1.0, 3.0), Err(GeomError::NotATriangle));
    }

    #[test]
    fn azim_values() {
        let (ex, ey, ez) = (Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0), Point3::new(0.0, 0.0, 1.0));
        assert_eq!(azim(ez, ex, ex).unwrap(), 0.0);
        assert!(close(azim(ez, ex, ey).unwrap(), PI / 2.0, 1e-15));
        let a = azim(ez, ex, ey).unwrap() + azim(ez, ey, ex).unwrap();
        assert!(close(a, 2.0 * PI, 1e-15));
        assert_eq!(azim(ez, ez * 2.0, ex), Err(GeomError::Collinear));
    }

    #[test]
    fn polygon_rejects_bow_tie() {
        let s = 2f64.sqrt();
        let pts = [
            Point3::new(s, s, 0.0),
            Point3::new(-s, s, 0.0).normalized() * 2.0 + Point3::new(0.0, 0.0, 0.5),
            Point3::new(-s, -s, 1.0),
            Point3::new(s, -s, 1.0),
        ];
        // swap two vertices to make the boundary cross itself
        let bow = [pts[0], pts[2], pts[1], pts[3]];
        assert!(solid_angle_polygon(&pts).is_ok());
        assert_eq!(solid_angle_polygon(&bow), Err(GeomError::SelfIntersecting));
    }

    #[test]
    fn octant_polygon() {
        let pts = [Point3::new(2.0, 0.0, 0.0), Point3::new(0.0, 2.0, 0.0), Point3::new(0.0, 0.0, 2.0)];
        assert!(close(solid_angle_polygon(&pts).unwrap(), PI / 2.0, 1e-12));
        let rev = [pts[2], pts[1], pts[0]];
        assert!(close(solid_angle_polygon(&rev).unwrap(), 4.0 * PI - PI / 2.0, 1e-12));
    }
}
