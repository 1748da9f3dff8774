//! Planar primitives: points, circles, lines, powers, bisectors and the
//! tolerance policy shared by every predicate in the crate.
//!
//! All quantities are plain `f64` in scene length units. Predicates never
//! compare against a bare epsilon; they take a [`Tolerance`] built from the
//! size of the scene so that translating or scaling the input does not change
//! which branch a computation takes.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Failures of the primitive constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("general form does not describe a real circle (r^2 = {0})")]
    ImaginaryCircle(f64),
    #[error("points coincide within tolerance")]
    CoincidentPoints,
    #[error("points are collinear within tolerance")]
    CollinearPoints,
    #[error("lines are parallel within tolerance")]
    ParallelLines,
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("relative tolerance {0} outside (0, 1e-3]")]
    InvalidTolerance(f64),
}

/// A point (or displacement) in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn distance_squared(self, other: Point2) -> f64 {
        (self - other).norm_squared()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    #[inline]
    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// Unit vector in the same direction, `None` for the zero vector.
    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A circle with finite center and strictly positive radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Result<Self, GeomError> {
        if !center.is_finite() {
            return Err(GeomError::NonFinite);
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeomError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn from_coords(cx: f64, cy: f64, radius: f64) -> Result<Self, GeomError> {
        Self::new(Point2::new(cx, cy), radius)
    }

    /// Point on the boundary at `angle` radians from the +x axis.
    pub fn point_at(&self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        self.center + Point2::new(c, s) * self.radius
    }

    /// Axis-aligned bounds as `(min, max)`.
    pub fn bounds(&self) -> (Point2, Point2) {
        let r = Point2::new(self.radius, self.radius);
        (self.center - r, self.center + r)
    }
}

/// Coefficients of `x² + y² + a·x + b·y + c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl GeneralForm {
    pub const fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    /// Squared radius of the described circle, `¼(a² + b²) − c`.
    pub fn radius_squared(&self) -> f64 {
        0.25 * (self.a * self.a + self.b * self.b) - self.c
    }

    /// Value of the left-hand side at `p`. Equals the power of `p`.
    pub fn eval(&self, p: Point2) -> f64 {
        p.x * p.x + p.y * p.y + self.a * p.x + self.b * p.y + self.c
    }
}

/// A line `{P : normal · P = offset}` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line2 {
    pub normal: Point2,
    pub offset: f64,
}

impl Line2 {
    /// Builds a line from any nonzero normal; both parts are rescaled so the
    /// stored normal has unit length.
    pub fn new(normal: Point2, offset: f64) -> Result<Self, GeomError> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let len = normal.norm();
        if len == 0.0 {
            return Err(GeomError::CoincidentPoints);
        }
        Ok(Self {
            normal: normal * (1.0 / len),
            offset: offset / len,
        })
    }

    /// Line through `point` perpendicular to `normal`.
    pub fn with_normal_through(normal: Point2, point: Point2) -> Result<Self, GeomError> {
        let n = normal.normalized().ok_or(GeomError::CoincidentPoints)?;
        Line2::new(n, n.dot(point))
    }

    /// Line through `p` and `q`.
    pub fn through(p: Point2, q: Point2) -> Result<Self, GeomError> {
        Line2::with_normal_through((q - p).perp(), p)
    }

    /// Positive on the side the normal points to.
    #[inline]
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    /// Unit direction vector, the normal turned clockwise.
    #[inline]
    pub fn direction(&self) -> Point2 {
        Point2::new(self.normal.y, -self.normal.x)
    }

    /// The point of the line closest to the origin.
    #[inline]
    pub fn anchor(&self) -> Point2 {
        self.normal * self.offset
    }
}

/// Scene-scaled tolerance.
///
/// `scale` is the diameter of the scene (the diagonal of the bounding box of
/// every input circle). Length comparisons use [`Tolerance::abs`], squared
/// length comparisons use [`Tolerance::squared`], and dimensionless ones use
/// [`Tolerance::eps_rel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    scale: f64,
    eps_rel: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS_REL: f64 = 1e-9;

    pub fn new(scale: f64, eps_rel: f64) -> Result<Self, GeomError> {
        if !(eps_rel > 0.0 && eps_rel <= 1e-3) {
            return Err(GeomError::InvalidTolerance(eps_rel));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(GeomError::InvalidRadius(scale));
        }
        Ok(Self { scale, eps_rel })
    }

    /// Unit-scale tolerance with the default relative epsilon.
    pub fn unit() -> Self {
        Self {
            scale: 1.0,
            eps_rel: Self::DEFAULT_EPS_REL,
        }
    }

    /// Tolerance scaled to the bounding box of `circles`.
    pub fn for_circles(circles: &[Circle], eps_rel: f64) -> Result<Self, GeomError> {
        Self::new(scene_scale(circles), eps_rel)
    }

    #[inline]
    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    pub fn eps_rel(&self) -> f64 {
        self.eps_rel
    }

    /// Absolute length tolerance, `eps_rel · max(scale, 1)`.
    #[inline]
    pub fn abs(&self) -> f64 {
        self.eps_rel * self.scale.max(1.0)
    }

    /// Tolerance for quantities measured in squared length.
    #[inline]
    pub fn squared(&self) -> f64 {
        let s = self.scale.max(1.0);
        self.eps_rel * s * s
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::unit()
    }
}

/// Diagonal of the bounding box of all circles; 1.0 for an empty slice.
pub fn scene_scale(circles: &[Circle]) -> f64 {
    let mut iter = circles.iter().map(Circle::bounds);
    let Some((mut lo, mut hi)) = iter.next() else {
        return 1.0;
    };
    for (a, b) in iter {
        lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
    }
    hi.distance(lo)
}

pub fn circle_from_general(g: GeneralForm, tol: &Tolerance) -> Result<Circle, GeomError> {
    let r2 = g.radius_squared();
    let floor = tol.abs() * tol.abs();
    if !(r2 > floor) {
        return Err(GeomError::ImaginaryCircle(r2));
    }
    Circle::new(Point2::new(-0.5 * g.a, -0.5 * g.b), r2.sqrt())
}

pub fn general_from_circle(c: &Circle) -> GeneralForm {
    let o = c.center;
    GeneralForm::new(
        -2.0 * o.x,
        -2.0 * o.y,
        o.x * o.x + o.y * o.y - c.radius * c.radius,
    )
}

/// Signed power `|p − center|² − r²`: negative inside, zero on the circle.
#[inline]
pub fn power_of_point(p: Point2, c: &Circle) -> f64 {
    p.distance_squared(c.center) - c.radius * c.radius
}

pub fn perpendicular_bisector(p: Point2, q: Point2, tol: &Tolerance) -> Result<Line2, GeomError> {
    if p.distance(q) <= tol.abs() {
        return Err(GeomError::CoincidentPoints);
    }
    Line2::with_normal_through(q - p, p.midpoint(q))
}

/// Twice the signed area of the triangle `p1 p2 p3`.
#[inline]
fn twice_area(p1: Point2, p2: Point2, p3: Point2) -> f64 {
    (p2 - p1).cross(p3 - p1)
}

/// True when the triangle is flat relative to its longest side.
pub fn collinear(p1: Point2, p2: Point2, p3: Point2, tol: &Tolerance) -> bool {
    let longest = p1.distance(p2).max(p2.distance(p3)).max(p1.distance(p3));
    twice_area(p1, p2, p3).abs() <= tol.abs() * longest
}

pub fn circumcenter(p1: Point2, p2: Point2, p3: Point2, tol: &Tolerance) -> Result<Point2, GeomError> {
    if collinear(p1, p2, p3, tol) {
        return Err(GeomError::CollinearPoints);
    }
    // Solve relative to p1 to keep magnitudes small.
    let b = p2 - p1;
    let c = p3 - p1;
    let d = 2.0 * b.cross(c);
    let b2 = b.norm_squared();
    let c2 = c.norm_squared();
    let ux = (c.y * b2 - b.y * c2) / d;
    let uy = (b.x * c2 - c.x * b2) / d;
    Ok(p1 + Point2::new(ux, uy))
}

pub fn line_intersection(l1: &Line2, l2: &Line2, tol: &Tolerance) -> Result<Point2, GeomError> {
    let det = l1.normal.cross(l2.normal);
    if det.abs() <= tol.eps_rel() {
        return Err(GeomError::ParallelLines);
    }
    // Cramer's rule on [n1; n2] X = [o1; o2].
    let x = (l1.offset * l2.normal.y - l2.offset * l1.normal.y) / det;
    let y = (l1.normal.x * l2.offset - l2.normal.x * l1.offset) / det;
    Ok(Point2::new(x, y))
}

pub fn foot_of_perpendicular(p: Point2, l: &Line2) -> Point2 {
    p - l.normal * l.signed_distance(p)
}

/// How two circles touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangencyKind {
    External,
    Internal,
    None,
}

impl fmt::Display for TangencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TangencyKind::External => "external",
            TangencyKind::Internal => "internal",
            TangencyKind::None => "none",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyClass {
    pub kind: TangencyKind,
    /// `min(|d − (r₁ + r₂)|, |d − |r₁ − r₂||)`.
    pub residual: f64,
}

pub fn tangency_classify(c1: &Circle, c2: &Circle, tol: &Tolerance) -> TangencyClass {
    let d = c1.center.distance(c2.center);
    let external = (d - (c1.radius + c2.radius)).abs();
    let internal = (d - (c1.radius - c2.radius).abs()).abs();
    let (residual, branch) = if external <= internal {
        (external, TangencyKind::External)
    } else {
        (internal, TangencyKind::Internal)
    };
    let kind = if residual <= tol.abs() {
        branch
    } else {
        TangencyKind::None
    };
    TangencyClass { kind, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn circle(cx: f64, cy: f64, r: f64) -> Circle {
        Circle::from_coords(cx, cy, r).unwrap()
    }

    fn vertical(x: f64) -> Line2 {
        Line2::new(Point2::new(1.0, 0.0), x).unwrap()
    }

    fn horizontal(y: f64) -> Line2 {
        Line2::new(Point2::new(0.0, 1.0), y).unwrap()
    }

    #[test]
    fn general_form_conversions() {
        let tol = Tolerance::unit();
        let unit = circle_from_general(GeneralForm::new(0.0, 0.0, -1.0), &tol).unwrap();
        assert_eq!(unit, circle(0.0, 0.0, 1.0));
        let shifted = circle_from_general(GeneralForm::new(-6.0, 0.0, 8.0), &tol).unwrap();
        assert_eq!(shifted, circle(3.0, 0.0, 1.0));
        assert!(matches!(
            circle_from_general(GeneralForm::new(0.0, 0.0, 1.0), &tol),
            Err(GeomError::ImaginaryCircle(_))
        ));

        assert_eq!(general_from_circle(&circle(0.0, 0.0, 1.0)), GeneralForm::new(0.0, 0.0, -1.0));
        assert_eq!(general_from_circle(&circle(3.0, 0.0, 1.0)), GeneralForm::new(-6.0, 0.0, 8.0));
    }

    #[test]
    fn power_signs() {
        let c = circle(3.0, 0.0, 1.0);
        assert_eq!(power_of_point(Point2::new(0.0, 0.0), &c), 8.0);
        assert_eq!(power_of_point(Point2::new(3.0, 0.0), &c), -1.0);
        assert_eq!(power_of_point(Point2::new(2.0, 0.0), &c), 0.0);
        // the general form evaluates to the same power
        let g = general_from_circle(&c);
        assert_eq!(g.eval(Point2::new(0.0, 0.0)), 8.0);
    }

    #[test]
    fn bisectors() {
        let tol = Tolerance::unit();
        let l = perpendicular_bisector(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), &tol).unwrap();
        assert_eq!(l, vertical(2.0));
        let l = perpendicular_bisector(Point2::new(0.0, 0.0), Point2::new(0.0, 2.0), &tol).unwrap();
        assert_eq!(l, horizontal(1.0));
        assert_eq!(
            perpendicular_bisector(Point2::ORIGIN, Point2::ORIGIN, &tol),
            Err(GeomError::CoincidentPoints)
        );
    }

    #[test]
    fn circumcenters() {
        let tol = Tolerance::unit();
        let c = circumcenter(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 4.0), &tol)
            .unwrap();
        assert_abs_diff_eq!(c.x, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.y, 2.0, epsilon = 1e-12);

        let c = circumcenter(
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 3f64.sqrt()),
            &tol,
        )
        .unwrap();
        assert_abs_diff_eq!(c.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.y, 1.0 / 3f64.sqrt(), epsilon = 1e-12);

        assert_eq!(
            circumcenter(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0), &tol),
            Err(GeomError::CollinearPoints)
        );
    }

    #[test]
    fn intersections() {
        let tol = Tolerance::unit();
        let p = line_intersection(&vertical(2.0), &horizontal(3.0), &tol).unwrap();
        assert_eq!(p, Point2::new(2.0, 3.0));
        assert_eq!(
            line_intersection(&vertical(1.0), &vertical(2.0), &tol),
            Err(GeomError::ParallelLines)
        );
        let slanted = Line2::new(Point2::new(1.0, 3.0), 6.0).unwrap();
        let p = line_intersection(&slanted, &vertical(1.9), &tol).unwrap();
        assert_abs_diff_eq!(p.x, 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(p.y, 4.1 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn feet() {
        assert_eq!(foot_of_perpendicular(Point2::new(5.0, 5.0), &vertical(2.0)), Point2::new(2.0, 5.0));
        let on = Point2::new(2.0, -7.5);
        assert_eq!(foot_of_perpendicular(on, &vertical(2.0)), on);
        let diag = Line2::new(Point2::new(1.0, 1.0), 2.0).unwrap();
        let f = foot_of_perpendicular(Point2::ORIGIN, &diag);
        assert_abs_diff_eq!(f.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.y, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tangency_kinds() {
        let tol = Tolerance::unit();
        let t = tangency_classify(&circle(0.0, 0.0, 1.0), &circle(3.0, 0.0, 2.0), &tol);
        assert_eq!(t, TangencyClass { kind: TangencyKind::External, residual: 0.0 });
        let t = tangency_classify(&circle(0.0, 0.0, 3.0), &circle(1.0, 0.0, 2.0), &tol);
        assert_eq!(t, TangencyClass { kind: TangencyKind::Internal, residual: 0.0 });
        let t = tangency_classify(&circle(0.0, 0.0, 1.0), &circle(10.0, 0.0, 1.0), &tol);
        assert_eq!(t, TangencyClass { kind: TangencyKind::None, residual: 8.0 });
    }

    #[test]
    fn collinearity() {
        let tol = Tolerance::unit();
        assert!(collinear(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0), &tol));
        assert!(!collinear(Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 4.0), &tol));
        assert!(collinear(Point2::new(0.0, 0.0), Point2::new(1.0, 1e-15), Point2::new(2.0, 0.0), &tol));
    }

    #[test]
    fn tolerance_policy() {
        assert!(Tolerance::new(10.0, 0.0).is_err());
        assert!(Tolerance::new(10.0, 1e-2).is_err());
        let t = Tolerance::new(0.5, 1e-9).unwrap();
        assert_eq!(t.abs(), 1e-9);
        let t = Tolerance::new(200.0, 1e-9).unwrap();
        assert_abs_diff_eq!(t.abs(), 2e-7, epsilon = 1e-20);
        let s = scene_scale(&[circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 2.0), circle(2.0, 6.0, 3.0)]);
        // x in [-1, 7], y in [-2, 9]
        assert_abs_diff_eq!(s, (64.0f64 + 121.0).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn invalid_circles_rejected() {
        assert!(Circle::from_coords(0.0, 0.0, 0.0).is_err());
        assert!(Circle::from_coords(0.0, 0.0, -1.0).is_err());
        assert!(Circle::from_coords(f64::NAN, 0.0, 1.0).is_err());
        assert!(Circle::from_coords(0.0, 0.0, f64::INFINITY).is_err());
    }
}
