//! Algebraic solver for circles tangent to three given circles.
//!
//! For each sign triple `s ∈ {±1}³` the unknown circle `(x, y, r)` satisfies
//!
//! ```text
//! (x − xᵢ)² + (y − yᵢ)² = (r + sᵢ·rᵢ)²      i = 1, 2, 3
//! ```
//!
//! with `sᵢ = +1` for external and `−1` for internal tangency. Subtracting the
//! first equation from the other two leaves two linear equations in
//! `(x, y, r)`. Two of the unknowns are written affinely in the third, and the
//! first equation becomes a quadratic in that third unknown. The pivot pair is
//! whichever 2×2 minor is best conditioned, so collinear centers (where the
//! `(x, y)` minor vanishes) are handled by solving for the position along the
//! center line and the radius instead.
//!
//! This module shares no code path with the inversion construction; it is the
//! ground truth the construction is measured against.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::Scene;
use crate::geom::{Circle, Point2, TangencyClass};
use crate::inversion::{generalized_tangency, GeneralizedCircle};

/// Joint center/radius distance below which two roots are the same circle.
pub const DEDUP_EPS_REL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("solution set is empty")]
    EmptySolutionSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedSolution {
    pub circle: Circle,
    /// `+1` external, `−1` internal tangency to each given circle.
    pub signs: [i8; 3],
    /// Largest tangency residual over the three given circles.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSet {
    /// At most eight circles, sorted by radius, then center x, then center y.
    pub solutions: Vec<SignedSolution>,
    pub scale: f64,
    pub tolerance: f64,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Residual of `circle` against `given` for a fixed tangency sign.
fn signed_residual(circle: &Circle, given: &Circle, sign: f64) -> f64 {
    (circle.center.distance(given.center) - (circle.radius + sign * given.radius).abs()).abs()
}

fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

/// Real roots of `a·t² + b·t + c`, tolerating a slightly negative
/// discriminant (double roots from flush tangencies).
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let size = a.abs().max(b.abs()).max(c.abs());
    if size == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-12 * size {
        return if b.abs() > 1e-12 * size { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc >= -1e-10 * b.mul_add(b, (4.0 * a * c).abs()) {
            return vec![-b / (2.0 * a)];
        }
        return Vec::new();
    }
    // Avoid cancellation: q = −(b + sign(b)√disc)/2.
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// A few Newton steps on the three squared-distance equations.
fn polish(mut v: [f64; 3], centers: &[Point2; 3], signed_radii: &[f64; 3]) -> [f64; 3] {
    for _ in 0..4 {
        let mut f = [0.0; 3];
        let mut jac = [[0.0; 3]; 3];
        for i in 0..3 {
            let dx = v[0] - centers[i].x;
            let dy = v[1] - centers[i].y;
            let w = v[2] + signed_radii[i];
            f[i] = dx * dx + dy * dy - w * w;
            jac[i] = [2.0 * dx, 2.0 * dy, -2.0 * w];
        }
        let Some(step) = solve3(&jac, &f) else {
            break;
        };
        let next = [v[0] - step[0], v[1] - step[1], v[2] - step[2]];
        if !next.iter().all(|x| x.is_finite()) {
            break;
        }
        v = next;
    }
    v
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> Option<[f64; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let size: f64 = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if det.abs() <= 1e-12 * size * size * size || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = *m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        let d = mc[0][0] * (mc[1][1] * mc[2][2] - mc[1][2] * mc[2][1])
            - mc[0][1] * (mc[1][0] * mc[2][2] - mc[1][2] * mc[2][0])
            + mc[0][2] * (mc[1][0] * mc[2][1] - mc[1][1] * mc[2][0]);
        *slot = d / det;
    }
    Some(out)
}

/// Candidate `(x, y, r)` roots for one sign triple, in coordinates relative
/// to the first center. Empty when the linear part has rank below two.
fn roots_for_signs(rel: &[Point2; 3], radii: &[f64; 3], signs: [f64; 3]) -> Vec<[f64; 3]> {
    let sr = [signs[0] * radii[0], signs[1] * radii[1], signs[2] * radii[2]];
    // Rows: 2(Oⱼ − O₁)·(x, y) + 2(sⱼrⱼ − s₁r₁)·r = |Oⱼ|² − rⱼ² + r₁².
    let mut m = [[0.0; 3]; 2];
    let mut rhs = [0.0; 2];
    for (row, j) in [1usize, 2].into_iter().enumerate() {
        m[row] = [2.0 * rel[j].x, 2.0 * rel[j].y, 2.0 * (sr[j] - sr[0])];
        rhs[row] = rel[j].norm_squared() - radii[j] * radii[j] + radii[0] * radii[0];
    }

    // Choose the best-conditioned pair of pivot columns.
    let pairs = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)];
    let (p, q, free) = pairs
        .into_iter()
        .max_by(|a, b| {
            let da = det2(m[0][a.0], m[0][a.1], m[1][a.0], m[1][a.1]).abs();
            let db = det2(m[0][b.0], m[0][b.1], m[1][b.0], m[1][b.1]).abs();
            da.total_cmp(&db)
        })
        .expect("three pivot pairs");
    let det = det2(m[0][p], m[0][q], m[1][p], m[1][q]);
    let size = m.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    if det.abs() <= 1e-12 * size * size {
        return Vec::new();
    }

    // u_p, u_q = α + β·t where t is the free unknown.
    let solve = |b0: f64, b1: f64| {
        (
            det2(b0, m[0][q], b1, m[1][q]) / det,
            det2(m[0][p], b0, m[1][p], b1) / det,
        )
    };
    let (alpha_p, alpha_q) = solve(rhs[0], rhs[1]);
    let (beta_p, beta_q) = solve(-m[0][free], -m[1][free]);
    let mut base = [0.0; 3];
    let mut slope = [0.0; 3];
    base[p] = alpha_p;
    base[q] = alpha_q;
    slope[p] = beta_p;
    slope[q] = beta_q;
    slope[free] = 1.0;

    // First equation, relative to O₁: x² + y² − (r + s₁r₁)² = 0.
    let (ax, bx) = (base[0], slope[0]);
    let (ay, by) = (base[1], slope[1]);
    let (aw, bw) = (base[2] + sr[0], slope[2]);
    let qa = bx * bx + by * by - bw * bw;
    let qb = 2.0 * (ax * bx + ay * by - aw * bw);
    let qc = ax * ax + ay * ay - aw * aw;

    quadratic_roots(qa, qb, qc)
        .into_iter()
        .map(|t| [base[0] + slope[0] * t, base[1] + slope[1] * t, base[2] + slope[2] * t])
        .collect()
}

/// All circles tangent to the three scene circles.
pub fn solve_ccc(scene: &Scene) -> SolutionSet {
    let tol = *scene.tolerance();
    let circles = scene.circles();
    let origin = circles[0].center;
    let rel = circles.map(|c| c.center - origin);
    let radii = circles.map(|c| c.radius);
    let dedup = DEDUP_EPS_REL * tol.scale();

    let mut found: Vec<SignedSolution> = Vec::new();
    for bits in 0..8u8 {
        let signs = [0, 1, 2].map(|i| if bits & (1 << i) == 0 { 1.0 } else { -1.0 });
        let signed_radii = [signs[0] * radii[0], signs[1] * radii[1], signs[2] * radii[2]];
        for root in roots_for_signs(&rel, &radii, signs) {
            let [x, y, r] = polish(root, &rel, &signed_radii);
            if !(r > tol.abs()) {
                continue;
            }
            let circle = Circle { center: origin + Point2::new(x, y), radius: r };
            let residual = (0..3)
                .map(|i| signed_residual(&circle, &circles[i], signs[i]))
                .fold(0.0, f64::max);
            if !(residual < tol.abs()) {
                continue;
            }
            let duplicate = found.iter().any(|s| {
                s.circle.center.distance(circle.center) < dedup && (s.circle.radius - circle.radius).abs() < dedup
            });
            if !duplicate {
                found.push(SignedSolution {
                    circle,
                    signs: signs.map(|s| s as i8),
                    residual,
                });
            }
        }
    }
    found.sort_by(|a, b| {
        a.circle
            .radius
            .total_cmp(&b.circle.radius)
            .then(a.circle.center.x.total_cmp(&b.circle.center.x))
            .then(a.circle.center.y.total_cmp(&b.circle.center.y))
    });
    SolutionSet {
        solutions: found,
        scale: tol.scale(),
        tolerance: tol.abs(),
    }
}

/// Tangency of a candidate against each scene circle.
pub fn verify_candidate(candidate: &GeneralizedCircle, scene: &Scene) -> [TangencyClass; 3] {
    scene.circles().map(|c| generalized_tangency(candidate, &c, scene.tolerance()))
}

/// Distance between circles as center distance plus radius difference.
pub fn circle_metric(a: &Circle, b: &Circle) -> f64 {
    a.center.distance(b.center) + (a.radius - b.radius).abs()
}

/// The member of `set` closest to `candidate` under [`circle_metric`].
pub fn nearest_solution(candidate: &Circle, set: &SolutionSet) -> Result<(SignedSolution, f64), OracleError> {
    set.solutions
        .iter()
        .map(|s| (*s, circle_metric(candidate, &s.circle)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(OracleError::EmptySolutionSet)
}
