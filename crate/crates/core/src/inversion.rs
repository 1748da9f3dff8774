//! Inversion in a circle.
//!
//! An [`InversionMap`] with center `A` and power `k²` sends a point `P ≠ A` to
//! the point `P'` on the ray `AP` with `|AP| · |AP'| = k²`. Circles and lines
//! (together, [`GeneralizedCircle`]s) map to circles and lines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    power_of_point, tangency_classify, Circle, Line2, Point2, TangencyClass, TangencyKind, Tolerance,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InversionError {
    #[error("the center of inversion has no image")]
    CenterHasNoImage,
    #[error("dimension mismatch: center has {center} coordinates, point has {point}")]
    DimensionMismatch { center: usize, point: usize },
    #[error("power of inversion must be positive and finite, got {0}")]
    InvalidPower(f64),
    #[error("vector must have at least one finite coordinate")]
    InvalidVector,
}

/// Reflection center plus power of inversion `k²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionMap {
    pub center: Point2,
    pub power: f64,
}

/// A circle or a straight line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GeneralizedCircle {
    Circle(Circle),
    Line(Line2),
}

impl GeneralizedCircle {
    pub fn as_circle(&self) -> Option<&Circle> {
        match self {
            GeneralizedCircle::Circle(c) => Some(c),
            GeneralizedCircle::Line(_) => None,
        }
    }

    pub fn as_line(&self) -> Option<&Line2> {
        match self {
            GeneralizedCircle::Line(l) => Some(l),
            GeneralizedCircle::Circle(_) => None,
        }
    }

    /// Distance from `p` to the curve itself (not to the enclosed disk).
    pub fn distance_to(&self, p: Point2) -> f64 {
        match self {
            GeneralizedCircle::Circle(c) => (p.distance(c.center) - c.radius).abs(),
            GeneralizedCircle::Line(l) => l.signed_distance(p).abs(),
        }
    }
}

/// Tangency of a circle or line against a circle. A line counts as an
/// external tangent when its distance from the center equals the radius.
pub fn generalized_tangency(g: &GeneralizedCircle, c: &Circle, tol: &Tolerance) -> TangencyClass {
    match g {
        GeneralizedCircle::Circle(g) => tangency_classify(g, c, tol),
        GeneralizedCircle::Line(l) => {
            let residual = (l.signed_distance(c.center).abs() - c.radius).abs();
            let kind = if residual <= tol.abs() {
                TangencyKind::External
            } else {
                TangencyKind::None
            };
            TangencyClass { kind, residual }
        }
    }
}

impl From<Circle> for GeneralizedCircle {
    fn from(c: Circle) -> Self {
        GeneralizedCircle::Circle(c)
    }
}

impl From<Line2> for GeneralizedCircle {
    fn from(l: Line2) -> Self {
        GeneralizedCircle::Line(l)
    }
}

impl InversionMap {
    pub fn new(center: Point2, power: f64) -> Result<Self, InversionError> {
        if !(power > 0.0 && power.is_finite()) {
            return Err(InversionError::InvalidPower(power));
        }
        if !center.is_finite() {
            return Err(InversionError::InvalidVector);
        }
        Ok(Self { center, power })
    }

    /// Radius `k` of the circle of inversion, which is fixed pointwise.
    pub fn radius(&self) -> f64 {
        self.power.sqrt()
    }

    pub fn invert_point(&self, p: Point2, tol: &Tolerance) -> Result<Point2, InversionError> {
        let v = p - self.center;
        if v.norm() <= tol.abs() {
            return Err(InversionError::CenterHasNoImage);
        }
        Ok(self.center + v * (self.power / v.norm_squared()))
    }

    /// Image of a circle or line.
    ///
    /// A circle whose power with respect to the center is nonzero maps by the
    /// homothety about the center with ratio `k² / power`; the ratio is
    /// negative when the center is inside the circle, which puts the image on
    /// the opposite ray. A circle through the center maps to a line, a line
    /// missing the center maps to a circle through it, and a line through the
    /// center is fixed.
    pub fn invert_generalized(&self, g: &GeneralizedCircle, tol: &Tolerance) -> GeneralizedCircle {
        let a = self.center;
        match *g {
            GeneralizedCircle::Circle(c) => {
                let pow = power_of_point(a, &c);
                if pow.abs() > tol.squared() {
                    let ratio = self.power / pow;
                    GeneralizedCircle::Circle(Circle {
                        center: a + (c.center - a) * ratio,
                        radius: ratio.abs() * c.radius,
                    })
                } else {
                    // The antipode of the center on `c` lands at distance k²/2r
                    // along the center line; the image line is perpendicular there.
                    let u = (c.center - a).normalized().unwrap_or(Point2::new(1.0, 0.0));
                    let foot = a + u * (self.power / (2.0 * c.radius));
                    GeneralizedCircle::Line(Line2 {
                        normal: u,
                        offset: u.dot(foot),
                    })
                }
            }
            GeneralizedCircle::Line(l) => {
                let s = -l.signed_distance(a);
                if s.abs() > tol.abs() {
                    let half = self.power / (2.0 * s);
                    GeneralizedCircle::Circle(Circle {
                        center: a + l.normal * half,
                        radius: half.abs(),
                    })
                } else {
                    GeneralizedCircle::Line(l)
                }
            }
        }
    }
}

/// Ratio of the homothety obtained by inverting with power `r2` and then with
/// power `k2` about the same center.
pub fn concentric_composition_ratio(k2: f64, r2: f64) -> f64 {
    k2 / r2
}

/// A point of `Rⁿ`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorN(Vec<f64>);

impl VectorN {
    pub fn new(coords: Vec<f64>) -> Result<Self, InversionError> {
        if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
            return Err(InversionError::InvalidVector);
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Inversion in the `(n−1)`-sphere of squared radius `power` about `center`:
/// each coordinate offset `xᵢ` becomes `power · xᵢ / Σⱼ xⱼ²`.
pub fn invert_point_nd(center: &VectorN, power: f64, p: &VectorN) -> Result<VectorN, InversionError> {
    if center.dim() != p.dim() {
        return Err(InversionError::DimensionMismatch {
            center: center.dim(),
            point: p.dim(),
        });
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(InversionError::InvalidPower(power));
    }
    let offsets: Vec<f64> = p.0.iter().zip(&center.0).map(|(x, c)| x - c).collect();
    let norm2: f64 = offsets.iter().map(|x| x * x).sum();
    if norm2 == 0.0 {
        return Err(InversionError::CenterHasNoImage);
    }
    let scale = power / norm2;
    Ok(VectorN(
        offsets.iter().zip(&center.0).map(|(x, c)| c + scale * x).collect(),
    ))
}
