//! The inversion construction of a circle tangent to three given circles.
//!
//! Three equal circles of radius `R` are drawn concentric with the given
//! circles `C₁, C₂, C₃`. A circle `C₄` tangent to the equal circles is easy to
//! find: it is centered at the circumcenter of the three centers. The
//! construction then inverts the equal circles and `C₄` about a reflection
//! center `A` with power `k²`, and inverts the image of `C₄` once more with
//! power `k'² = M·k²` (where `M² = m_squared`) to obtain the candidate `C''₄`.
//!
//! `A` is the common point of three locus lines. On the line for the pair
//! `(i, j)` every point `X` satisfies
//!
//! ```text
//! |XOⱼ|² − |XOᵢ|² = (Rⱼ² − Rᵢ²) / (1 − M²)
//! ```
//!
//! which is what makes the ratio `pow(A, Cᵢ) / pow(A, uCᵢ)` equal to `M²` for
//! all three circles at once. Given `A` and `M²`, the shrink radius `R` is
//! forced:
//!
//! ```text
//! R² = (Rᵢ² − (1 − M²)|AOᵢ|²) / M²
//! ```
//!
//! Whether `C''₄` really touches `C₁, C₂, C₃` is measured by
//! [`residual_report`], never assumed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{
    circumcenter, collinear, foot_of_perpendicular, line_intersection, perpendicular_bisector,
    power_of_point, scene_scale, Circle, GeomError, Line2, Point2, TangencyClass, TangencyKind,
    Tolerance,
};
use crate::inversion::{generalized_tangency, GeneralizedCircle, InversionError, InversionMap};
use crate::trace::{ConstructionTrace, Geometry};

/// Coarse grid scanned when the requested `m_squared` is infeasible.
pub const SCAN_GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
    0.80, 0.85, 0.90, 0.95,
];

/// Width to which the feasibility boundary is bisected.
pub const SCAN_BISECT_WIDTH: f64 = 1e-6;

pub const DEFAULT_M_SQUARED: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Inversion(#[from] InversionError),
    #[error("circles {0} and {1} are identical")]
    DuplicateCircle(usize, usize),
    #[error("circles {0} and {1} are concentric")]
    ConcentricInput(usize, usize),
    #[error("circle {inner} lies inside circle {outer} while the third circle is outside it")]
    NestedInput { inner: usize, outer: usize },
    #[error("circle centers {0} and {1} coincide")]
    CoincidentCenters(usize, usize),
    #[error("locus lines are parallel; no reflection center exists")]
    ParallelLoci,
    #[error("degenerate scene: {0}")]
    DegenerateScene(String),
    #[error("m_squared = {m_squared} gives shrink radius squared {r_squared}, outside (0, R1^2)")]
    InfeasibleShrink { m_squared: f64, r_squared: f64 },
    #[error("reflection center lies inside or on circle {0}")]
    CenterInsideCircle(String),
    #[error("no feasible m_squared found on the scan grid")]
    NoFeasibleM2(Box<ScanDiagnostics>),
    #[error("outer tangent radius is not positive (center distance {distance}, shrink radius {radius})")]
    TangentRadiusNonpositive { distance: f64, radius: f64 },
    #[error("reflection center lies on {0}, which must be inverted")]
    CenterOnObject(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Coarse grouping of errors, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    InvalidInput,
    Infeasible,
    Degenerate,
}

impl ConstructionError {
    pub fn category(&self) -> ErrorCategory {
        use ConstructionError::*;
        match self {
            Geom(_) | Inversion(_) | InvalidConfig(_) => ErrorCategory::InvalidInput,
            InfeasibleShrink { .. }
            | CenterInsideCircle(_)
            | NoFeasibleM2(_)
            | TangentRadiusNonpositive { .. } => ErrorCategory::Infeasible,
            DuplicateCircle(..)
            | ConcentricInput(..)
            | NestedInput { .. }
            | CoincidentCenters(..)
            | ParallelLoci
            | DegenerateScene(_)
            | CenterOnObject(_) => ErrorCategory::Degenerate,
        }
    }
}

/// Three validated circles, sorted by radius ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scene {
    circles: [Circle; 3],
    /// Position of each sorted circle in the caller's original order.
    original_index: [usize; 3],
    tol: Tolerance,
}

impl Scene {
    pub fn new(circles: [Circle; 3]) -> Result<Self, ConstructionError> {
        validate_scene(circles, Tolerance::DEFAULT_EPS_REL)
    }

    pub fn circles(&self) -> &[Circle; 3] {
        &self.circles
    }

    pub fn circle(&self, i: usize) -> &Circle {
        &self.circles[i]
    }

    pub fn centers(&self) -> [Point2; 3] {
        self.circles.map(|c| c.center)
    }

    pub fn original_index(&self) -> [usize; 3] {
        self.original_index
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    pub fn scale(&self) -> f64 {
        self.tol.scale()
    }

    /// Same circles under a different relative tolerance.
    pub fn with_eps_rel(&self, eps_rel: f64) -> Result<Self, ConstructionError> {
        Ok(Self {
            tol: Tolerance::new(self.tol.scale(), eps_rel)?,
            ..self.clone()
        })
    }
}

/// Sorts the circles by radius (stably) and rejects configurations the
/// construction cannot handle: identical or concentric circles, and one circle
/// strictly inside another while the third is outside it.
pub fn validate_scene(circles: [Circle; 3], eps_rel: f64) -> Result<Scene, ConstructionError> {
    for c in &circles {
        Circle::new(c.center, c.radius)?;
    }
    let tol = Tolerance::new(scene_scale(&circles), eps_rel)?;
    let eps = tol.abs();

    for i in 0..3 {
        for j in i + 1..3 {
            let (a, b) = (&circles[i], &circles[j]);
            if a.center.distance(b.center) <= eps {
                if (a.radius - b.radius).abs() <= eps {
                    return Err(ConstructionError::DuplicateCircle(i, j));
                }
                return Err(ConstructionError::ConcentricInput(i, j));
            }
        }
    }

    let strictly_inside =
        |inner: &Circle, outer: &Circle| inner.center.distance(outer.center) + inner.radius < outer.radius - eps;
    for outer in 0..3 {
        for inner in 0..3 {
            if inner == outer || !strictly_inside(&circles[inner], &circles[outer]) {
                continue;
            }
            let third = 3 - inner - outer;
            let t = &circles[third];
            let o = &circles[outer];
            if !strictly_inside(t, o) && !strictly_inside(o, t) {
                return Err(ConstructionError::NestedInput { inner, outer });
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| circles[a].radius.total_cmp(&circles[b].radius));
    Ok(Scene {
        circles: order.map(|i| circles[i]),
        original_index: order,
        tol,
    })
}

/// Which circle tangent to the three equal circles plays the role of `C₄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TangentVariant {
    /// Touches each equal circle from outside: radius `d − R`.
    #[default]
    OuterTangent,
    /// Encloses the equal circles: radius `d + R`.
    Enclosing,
}

impl TangentVariant {
    pub const ALL: [TangentVariant; 2] = [TangentVariant::OuterTangent, TangentVariant::Enclosing];

    pub fn as_str(&self) -> &'static str {
        match self {
            TangentVariant::OuterTangent => "outer_tangent",
            TangentVariant::Enclosing => "enclosing",
        }
    }
}

impl fmt::Display for TangentVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TangentVariant {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "outer_tangent" => Ok(TangentVariant::OuterTangent),
            "enclosing" => Ok(TangentVariant::Enclosing),
            other => Err(ConstructionError::InvalidConfig(format!("unknown tangent variant {other:?}"))),
        }
    }
}

/// Power of the first inversion.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KSquared {
    /// Square of the largest distance between two given centers.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub m_squared: f64,
    /// Scan for a feasible `m_squared` when the requested one fails.
    pub scan: bool,
    pub k_squared: KSquared,
    pub variant: TangentVariant,
    /// Overrides the scene's relative tolerance.
    pub eps_rel: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            m_squared: DEFAULT_M_SQUARED,
            scan: true,
            k_squared: KSquared::Auto,
            variant: TangentVariant::OuterTangent,
            eps_rel: None,
        }
    }
}

fn check_m_squared(m2: f64) -> Result<(), ConstructionError> {
    if m2 > 0.0 && m2 < 1.0 {
        Ok(())
    } else {
        Err(ConstructionError::InvalidConfig(format!("m_squared must lie in (0, 1), got {m2}")))
    }
}

/// Locus of points `X` with `|XOⱼ|² − |XOᵢ|² = (Rⱼ² − Rᵢ²)/(1 − m²)`, a line
/// perpendicular to `OᵢOⱼ`. Indices are zero-based positions in the sorted
/// scene.
pub fn difference_line(scene: &Scene, i: usize, j: usize, m_squared: f64) -> Result<Line2, ConstructionError> {
    check_m_squared(m_squared)?;
    let (ci, cj) = (scene.circle(i), scene.circle(j));
    let axis = cj.center - ci.center;
    let len = axis.norm();
    if len <= scene.tol.abs() {
        return Err(ConstructionError::CoincidentCenters(i, j));
    }
    let n = axis * (1.0 / len);
    let target = (cj.radius * cj.radius - ci.radius * ci.radius) / (1.0 - m_squared);
    let mid = ci.center.midpoint(cj.center);
    Ok(Line2 {
        normal: n,
        offset: n.dot(mid) - target / (2.0 * len),
    })
}

/// Pairs behind the three locus lines, in the order `K₂−K₁`, `K₃−K₂`, `K₃−K₁`.
pub const LOCUS_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

fn locus_lines(scene: &Scene, m_squared: f64) -> Result<[Line2; 3], ConstructionError> {
    let mut lines = [Line2 { normal: Point2::new(1.0, 0.0), offset: 0.0 }; 3];
    for (slot, &(i, j)) in lines.iter_mut().zip(LOCUS_PAIRS.iter()) {
        *slot = difference_line(scene, i, j, m_squared)?;
    }
    Ok(lines)
}

/// Reflection center `A`: the intersection of the `K₂−K₁` and `K₃−K₁` lines.
/// The third line passes through the same point because the three pairwise
/// differences sum to zero.
pub fn reflection_center(scene: &Scene, m_squared: f64) -> Result<(Point2, [Line2; 3]), ConstructionError> {
    let lines = locus_lines(scene, m_squared)?;
    match line_intersection(&lines[0], &lines[2], &scene.tol) {
        Ok(a) => Ok((a, lines)),
        Err(GeomError::ParallelLines) => Err(ConstructionError::ParallelLoci),
        Err(e) => Err(e.into()),
    }
}

/// Squared shrink radius implied by circle `i` for a given `A` and `m²`.
pub fn shrink_radius_squared(circle: &Circle, a: Point2, m_squared: f64) -> f64 {
    (circle.radius * circle.radius - (1.0 - m_squared) * a.distance_squared(circle.center)) / m_squared
}

/// Common radius of the equal circles, forced by `A` and `m²`. Fails unless
/// `0 < R < R₁`.
pub fn shrink_radius(scene: &Scene, a: Point2, m_squared: f64) -> Result<f64, ConstructionError> {
    check_m_squared(m_squared)?;
    let r2 = scene
        .circles
        .iter()
        .map(|c| shrink_radius_squared(c, a, m_squared))
        .sum::<f64>()
        / 3.0;
    let r1 = scene.circles[0].radius;
    let floor = scene.tol.squared();
    if !(r2 > floor && r2 < r1 * r1 - floor) {
        return Err(ConstructionError::InfeasibleShrink { m_squared, r_squared: r2 });
    }
    Ok(r2.sqrt())
}

/// One probe of the feasibility scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub m_squared: f64,
    /// Shrink radius squared when a reflection center existed.
    pub r_squared: Option<f64>,
    pub feasible: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanDiagnostics {
    pub requested: f64,
    /// Set when collinear centers force a single `m_squared`.
    pub forced: Option<f64>,
    pub entries: Vec<ScanEntry>,
    /// Smallest feasible `m_squared` in the first feasible bracket, to
    /// [`SCAN_BISECT_WIDTH`].
    pub boundary: Option<f64>,
}

/// Outcome of [`choose_feasible_m2`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Feasible {
    pub m_squared: f64,
    pub reflection_center: Point2,
    pub shrink_radius: f64,
    pub locus_lines: [Line2; 3],
    /// Centers are collinear and the tangent-line fallback applies.
    pub collinear: bool,
    pub diagnostics: ScanDiagnostics,
}

fn check_outside(scene: &Scene, a: Point2, r: f64) -> Result<(), ConstructionError> {
    let floor = scene.tol.squared();
    for (i, c) in scene.circles.iter().enumerate() {
        if power_of_point(a, c) <= floor {
            return Err(ConstructionError::CenterInsideCircle(format!("C_{}", i + 1)));
        }
        let equal = Circle { center: c.center, radius: r };
        if power_of_point(a, &equal) <= floor {
            return Err(ConstructionError::CenterInsideCircle(format!("uC_{}", i + 1)));
        }
    }
    Ok(())
}

fn evaluate(scene: &Scene, m_squared: f64) -> Result<(Point2, [Line2; 3], f64), ConstructionError> {
    let (a, lines) = reflection_center(scene, m_squared)?;
    let r = shrink_radius(scene, a, m_squared)?;
    check_outside(scene, a, r)?;
    Ok((a, lines, r))
}

fn probe(scene: &Scene, m_squared: f64) -> (ScanEntry, Option<(Point2, [Line2; 3], f64)>) {
    let r_squared = reflection_center(scene, m_squared)
        .ok()
        .map(|(a, _)| scene.circles.iter().map(|c| shrink_radius_squared(c, a, m_squared)).sum::<f64>() / 3.0);
    match evaluate(scene, m_squared) {
        Ok(found) => (
            ScanEntry { m_squared, r_squared, feasible: true, reason: None },
            Some(found),
        ),
        Err(e) => (
            ScanEntry { m_squared, r_squared, feasible: false, reason: Some(e.to_string()) },
            None,
        ),
    }
}

/// Picks `m²` for the construction.
///
/// The requested value is tried first. If it is infeasible and `scan` is set,
/// the grid [`SCAN_GRID`] is walked upward and the first feasible grid point is
/// returned; the boundary between it and the previous grid point is bisected
/// to [`SCAN_BISECT_WIDTH`] and reported in the diagnostics.
///
/// Collinear centers make every locus line perpendicular to the center line,
/// so they only meet when they coincide. That happens for exactly one `m²`,
/// which is then used regardless of the request.
pub fn choose_feasible_m2(scene: &Scene, requested: f64, scan: bool) -> Result<Feasible, ConstructionError> {
    check_m_squared(requested)?;
    let [o1, o2, o3] = scene.centers();
    if collinear(o1, o2, o3, &scene.tol) {
        return collinear_feasible(scene, requested);
    }

    let mut diagnostics = ScanDiagnostics { requested, ..Default::default() };
    let (entry, found) = probe(scene, requested);
    diagnostics.entries.push(entry);
    if let Some((a, lines, r)) = found {
        return Ok(Feasible {
            m_squared: requested,
            reflection_center: a,
            shrink_radius: r,
            locus_lines: lines,
            collinear: false,
            diagnostics,
        });
    }
    if !scan {
        return Err(evaluate(scene, requested).expect_err("probe reported infeasible"));
    }

    let mut previous: Option<f64> = None;
    for &m2 in SCAN_GRID.iter() {
        let (entry, found) = probe(scene, m2);
        diagnostics.entries.push(entry);
        if let Some((a, lines, r)) = found {
            if let Some(lo) = previous {
                diagnostics.boundary = Some(bisect_boundary(scene, lo, m2));
            }
            return Ok(Feasible {
                m_squared: m2,
                reflection_center: a,
                shrink_radius: r,
                locus_lines: lines,
                collinear: false,
                diagnostics,
            });
        }
        previous = Some(m2);
    }
    Err(ConstructionError::NoFeasibleM2(Box::new(diagnostics)))
}

fn bisect_boundary(scene: &Scene, mut infeasible: f64, mut feasible: f64) -> f64 {
    while feasible - infeasible > SCAN_BISECT_WIDTH {
        let mid = 0.5 * (infeasible + feasible);
        if evaluate(scene, mid).is_ok() {
            feasible = mid;
        } else {
            infeasible = mid;
        }
    }
    feasible
}

fn collinear_feasible(scene: &Scene, requested: f64) -> Result<Feasible, ConstructionError> {
    let [o1, o2, o3] = scene.centers();
    let axis = (o3 - o1).normalized().ok_or(ConstructionError::CoincidentCenters(0, 2))?;
    let normal = axis.perp();
    let along = |p: Point2| axis.dot(p - o1);
    let (p1, p2, p3) = (0.0, along(o2), along(o3));
    let sq = |i: usize| scene.circles[i].radius * scene.circles[i].radius;
    let eps = scene.tol.abs();
    if (p2 - p1).abs() <= eps || (p3 - p1).abs() <= eps {
        return Err(ConstructionError::DegenerateScene("collinear centers project onto one point".into()));
    }

    // Locus (1, j) sits at mid_j − t·slope_j along the axis, t = 1/(1 − m²).
    let mid2 = 0.5 * (p1 + p2);
    let mid3 = 0.5 * (p1 + p3);
    let slope2 = (sq(1) - sq(0)) / (2.0 * (p2 - p1));
    let slope3 = (sq(2) - sq(0)) / (2.0 * (p3 - p1));
    let denom = slope3 - slope2;
    if denom.abs() <= scene.tol.eps_rel() * (slope2.abs() + slope3.abs()).max(1.0) {
        return Err(ConstructionError::ParallelLoci);
    }
    let t = (mid3 - mid2) / denom;
    if !(t > 1.0 && t.is_finite()) {
        return Err(ConstructionError::ParallelLoci);
    }
    let m_squared = 1.0 - 1.0 / t;
    let x = mid2 - t * slope2;

    // Aim for R² = R₁²/2, i.e. |AO₁|² = (1 + t)R₁²/2, on the side opposite the
    // tangent line; fall back to A on the center line.
    let target = 0.5 * (1.0 + t) * sq(0);
    let h = (target - x * x).max(0.0).sqrt();
    let a = o1 + axis * x - normal * h;

    let mut diagnostics = ScanDiagnostics {
        requested,
        forced: Some(m_squared),
        ..Default::default()
    };
    let lines = locus_lines(scene, m_squared)?;
    let outcome = shrink_radius(scene, a, m_squared).and_then(|r| check_outside(scene, a, r).map(|_| r));
    let r_squared = scene.circles.iter().map(|c| shrink_radius_squared(c, a, m_squared)).sum::<f64>() / 3.0;
    diagnostics.entries.push(ScanEntry {
        m_squared,
        r_squared: Some(r_squared),
        feasible: outcome.is_ok(),
        reason: outcome.as_ref().err().map(|e| e.to_string()),
    });
    match outcome {
        Ok(r) => Ok(Feasible {
            m_squared,
            reflection_center: a,
            shrink_radius: r,
            locus_lines: lines,
            collinear: true,
            diagnostics,
        }),
        Err(_) => Err(ConstructionError::NoFeasibleM2(Box::new(diagnostics))),
    }
}

/// Circle (or, for collinear centers, line) tangent to three circles of
/// common radius `r` centered at `centers`.
///
/// The collinear line lies on the left of the directed line from the first
/// to the last center, at distance `r`.
pub fn tangent_to_equal_circles(
    centers: [Point2; 3],
    r: f64,
    variant: TangentVariant,
    tol: &Tolerance,
) -> Result<GeneralizedCircle, ConstructionError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeomError::InvalidRadius(r).into());
    }
    let [o1, o2, o3] = centers;
    if collinear(o1, o2, o3, tol) {
        let base = Line2::through(o1, o3)?;
        return Ok(GeneralizedCircle::Line(Line2 {
            normal: base.normal,
            offset: base.offset + r,
        }));
    }
    let center = circumcenter(o1, o2, o3, tol)?;
    let d = centers.iter().map(|o| o.distance(center)).sum::<f64>() / 3.0;
    let radius = match variant {
        TangentVariant::OuterTangent => d - r,
        TangentVariant::Enclosing => d + r,
    };
    if radius <= tol.abs() {
        return Err(ConstructionError::TangentRadiusNonpositive { distance: d, radius: r });
    }
    Ok(GeneralizedCircle::Circle(Circle { center, radius }))
}

/// Measured deviations of a construction run. Every entry is recomputed from
/// the geometry by [`residual_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `maxᵢ |pow(A, Cᵢ)/pow(A, uCᵢ) − m²|`.
    pub power_ratio_dev: f64,
    /// Distance from `A` to the `K₃−K₂` line.
    pub concurrency_dev: f64,
    /// `C₄` against each equal circle.
    pub c4_tangency: [f64; 3],
    /// `C'₄` against each inverted equal circle.
    pub c4p_tangency: [f64; 3],
    /// Center distance plus radius difference between the `(A, k'²)` image of
    /// `Cᵢ` and `uC'ᵢ`.
    pub second_inversion_dev: [f64; 3],
    /// `C''₄` against the given circles.
    pub final_tangency: [TangencyClass; 3],
    /// All three final tangencies are within tolerance.
    pub final_tangent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineResult {
    pub reflection_center: Point2,
    pub m_squared: f64,
    pub shrink_radius: f64,
    pub k2: f64,
    pub kp2: f64,
    pub variant: TangentVariant,
    pub collinear: bool,
    /// `K₂−K₁`, `K₃−K₂`, `K₃−K₁`.
    pub locus_lines: [Line2; 3],
    pub equal_circles: [Circle; 3],
    pub c4: GeneralizedCircle,
    pub inverted_equal: [GeneralizedCircle; 3],
    pub c4p: GeneralizedCircle,
    pub c4pp: GeneralizedCircle,
    pub residuals: ResidualReport,
    pub scan: ScanDiagnostics,
    pub trace: ConstructionTrace,
}

impl PipelineResult {
    pub fn first_inversion(&self) -> InversionMap {
        InversionMap { center: self.reflection_center, power: self.k2 }
    }

    pub fn second_inversion(&self) -> InversionMap {
        InversionMap { center: self.reflection_center, power: self.kp2 }
    }
}

/// Square of the largest distance between two centers.
pub fn auto_k_squared(scene: &Scene) -> f64 {
    let c = scene.centers();
    c[0].distance_squared(c[1])
        .max(c[1].distance_squared(c[2]))
        .max(c[0].distance_squared(c[2]))
}

pub fn run_pipeline(scene: &Scene, config: &PipelineConfig) -> Result<PipelineResult, ConstructionError> {
    let owned;
    let scene = match config.eps_rel {
        Some(eps) => {
            owned = scene.with_eps_rel(eps)?;
            &owned
        }
        None => scene,
    };
    let tol = scene.tol;

    let feasible = choose_feasible_m2(scene, config.m_squared, config.scan)?;
    let a = feasible.reflection_center;
    let r = feasible.shrink_radius;
    let m2 = feasible.m_squared;

    let equal_circles = scene.circles.map(|c| Circle { center: c.center, radius: r });
    let c4 = tangent_to_equal_circles(scene.centers(), r, config.variant, &tol)?;

    let k2 = match config.k_squared {
        KSquared::Auto => auto_k_squared(scene),
        KSquared::Fixed(k2) => k2,
    };
    let first = InversionMap::new(a, k2)?;
    let kp2 = m2.sqrt() * k2;
    let second = InversionMap::new(a, kp2)?;

    let guard = tol.abs();
    for (i, c) in scene.circles.iter().enumerate() {
        if GeneralizedCircle::Circle(*c).distance_to(a) < guard {
            return Err(ConstructionError::CenterOnObject(format!("C_{}", i + 1)));
        }
    }
    for (i, c) in equal_circles.iter().enumerate() {
        if GeneralizedCircle::Circle(*c).distance_to(a) < guard {
            return Err(ConstructionError::CenterOnObject(format!("uC_{}", i + 1)));
        }
    }
    if c4.distance_to(a) < guard {
        return Err(ConstructionError::CenterOnObject("C_4".into()));
    }

    let inverted_equal = equal_circles.map(|c| first.invert_generalized(&c.into(), &tol));
    let c4p = first.invert_generalized(&c4, &tol);
    let c4pp = second.invert_generalized(&c4p, &tol);

    let mut result = PipelineResult {
        reflection_center: a,
        m_squared: m2,
        shrink_radius: r,
        k2,
        kp2,
        variant: config.variant,
        collinear: feasible.collinear,
        locus_lines: feasible.locus_lines,
        equal_circles,
        c4,
        inverted_equal,
        c4p,
        c4pp,
        residuals: placeholder_residuals(),
        scan: feasible.diagnostics,
        trace: ConstructionTrace::new(),
    };
    result.trace = build_trace(scene, &result);
    result.residuals = residual_report(&result, scene);
    Ok(result)
}

fn placeholder_residuals() -> ResidualReport {
    let none = TangencyClass { kind: TangencyKind::None, residual: 0.0 };
    ResidualReport {
        power_ratio_dev: 0.0,
        concurrency_dev: 0.0,
        c4_tangency: [0.0; 3],
        c4p_tangency: [0.0; 3],
        second_inversion_dev: [0.0; 3],
        final_tangency: [none; 3],
        final_tangent: false,
    }
}

fn generalized_deviation(a: &GeneralizedCircle, b: &GeneralizedCircle) -> f64 {
    match (a, b) {
        (GeneralizedCircle::Circle(a), GeneralizedCircle::Circle(b)) => {
            a.center.distance(b.center) + (a.radius - b.radius).abs()
        }
        (GeneralizedCircle::Line(a), GeneralizedCircle::Line(b)) => {
            // Orientation-free: compare against both signs of the normal.
            let same = (a.normal - b.normal).norm() + (a.offset - b.offset).abs();
            let flipped = (a.normal + b.normal).norm() + (a.offset + b.offset).abs();
            same.min(flipped)
        }
        _ => f64::MAX,
    }
}

/// Recomputes every residual of a run from its geometry.
pub fn residual_report(result: &PipelineResult, scene: &Scene) -> ResidualReport {
    let tol = scene.tol;
    let a = result.reflection_center;
    let m2 = result.m_squared;

    let power_ratio_dev = scene
        .circles
        .iter()
        .zip(&result.equal_circles)
        .map(|(c, u)| (power_of_point(a, c) / power_of_point(a, u) - m2).abs())
        .fold(0.0, f64::max);

    let concurrency_dev = result.locus_lines[1].signed_distance(a).abs();

    let c4_tangency = result
        .equal_circles
        .map(|u| generalized_tangency(&result.c4, &u, &tol).residual);

    let c4p_tangency = result.inverted_equal.map(|u| match u {
        GeneralizedCircle::Circle(u) => generalized_tangency(&result.c4p, &u, &tol).residual,
        GeneralizedCircle::Line(l) => match result.c4p {
            GeneralizedCircle::Circle(c) => generalized_tangency(&l.into(), &c, &tol).residual,
            // Two lines touch only at infinity.
            GeneralizedCircle::Line(_) => f64::MAX,
        },
    });

    let second = result.second_inversion();
    let mut second_inversion_dev = [0.0; 3];
    for (i, c) in scene.circles.iter().enumerate() {
        let image = second.invert_generalized(&(*c).into(), &tol);
        second_inversion_dev[i] = generalized_deviation(&image, &result.inverted_equal[i]);
    }

    let final_tangency = scene.circles.map(|c| generalized_tangency(&result.c4pp, &c, &tol));
    let final_tangent = final_tangency.iter().all(|t| t.kind != TangencyKind::None);

    ResidualReport {
        power_ratio_dev,
        concurrency_dev,
        c4_tangency,
        c4p_tangency,
        second_inversion_dev,
        final_tangency,
        final_tangent,
    }
}

fn line_through(p: Point2, q: Point2) -> Line2 {
    Line2::through(p, q).unwrap_or(Line2 { normal: Point2::new(1.0, 0.0), offset: p.x })
}

fn build_trace(scene: &Scene, r: &PipelineResult) -> ConstructionTrace {
    const O: [&str; 3] = ["O_1", "O_2", "O_3"];
    let tol = scene.tol;
    let centers = scene.centers();
    let mut t = ConstructionTrace::new();

    for i in 0..3 {
        t.push("4.1", Geometry::Point { at: centers[i] }, Some(O[i]), &[]);
    }
    const EQUAL: [&str; 3] = ["uC_1", "uC_2", "uC_3"];
    for i in 0..3 {
        t.push("4.1", Geometry::Circle { circle: r.equal_circles[i] }, Some(EQUAL[i]), &[O[i]]);
    }

    for &(i, j) in LOCUS_PAIRS.iter() {
        t.push("4.2", Geometry::Segment { from: centers[i], to: centers[j] }, None, &[O[i], O[j]]);
    }

    for &(i, j) in LOCUS_PAIRS.iter() {
        if let Ok(line) = perpendicular_bisector(centers[i], centers[j], &tol) {
            t.push("4.3", Geometry::Line { line }, None, &[O[i], O[j]]);
        }
    }

    match r.c4 {
        GeneralizedCircle::Circle(c4) => {
            let opp = c4.center;
            t.push("4.3", Geometry::Point { at: opp }, Some("O''"), &[O[0], O[1], O[2]]);
            t.push("4.4", Geometry::Segment { from: opp, to: centers[2] }, None, &["O''", O[2]]);
            let u = (centers[2] - opp).normalized().unwrap_or(Point2::new(1.0, 0.0));
            let z = match r.variant {
                TangentVariant::OuterTangent => centers[2] - u * r.shrink_radius,
                TangentVariant::Enclosing => centers[2] + u * r.shrink_radius,
            };
            t.push("4.4", Geometry::Point { at: z }, Some("Z"), &["O''", EQUAL[2]]);
            t.push("4.5", Geometry::Circle { circle: c4 }, Some("C_4"), &["O''", "Z"]);
        }
        GeneralizedCircle::Line(line) => {
            t.push("3.1.8", Geometry::Line { line }, Some("C_4"), &EQUAL);
        }
    }

    // Locus lines: midpoints M, radical-axis feet H', locus feet H.
    // Pair (1,2) carries M_1/H_2, pair (2,3) M_2/H_3, pair (1,3) M_3/H_1.
    const MID: [&str; 3] = ["M_1", "M_2", "M_3"];
    const FOOT: [&str; 3] = ["H_2", "H_3", "H_1"];
    const RADICAL_FOOT: [&str; 3] = ["H'_2", "H'_3", "H'_1"];
    const LOCUS: [&str; 3] = ["K_2-K_1", "K_3-K_2", "K_3-K_1"];
    let mut radical_axes = Vec::with_capacity(3);
    for (k, &(i, j)) in LOCUS_PAIRS.iter().enumerate() {
        let mid = centers[i].midpoint(centers[j]);
        t.push("4.6", Geometry::Point { at: mid }, Some(MID[k]), &[O[i], O[j]]);
        let center_line = line_through(centers[i], centers[j]);
        // Radical axis of (Cᵢ, Cⱼ) is the locus line with m² = 0.
        let (ci, cj) = (scene.circle(i), scene.circle(j));
        let n = (cj.center - ci.center).normalized().unwrap_or(Point2::new(1.0, 0.0));
        let len = ci.center.distance(cj.center);
        let radical = Line2 {
            normal: n,
            offset: n.dot(mid) - (cj.radius * cj.radius - ci.radius * ci.radius) / (2.0 * len),
        };
        radical_axes.push(radical);
        t.push("4.6", Geometry::Line { line: radical }, None, &[O[i], O[j]]);
        let radical_foot = line_intersection(&radical, &center_line, &tol).unwrap_or(mid);
        t.push("4.6", Geometry::Point { at: radical_foot }, Some(RADICAL_FOOT[k]), &[MID[k]]);
        let locus = r.locus_lines[k];
        let foot = line_intersection(&locus, &center_line, &tol)
            .unwrap_or_else(|_| foot_of_perpendicular(mid, &locus));
        t.push("4.6", Geometry::Point { at: foot }, Some(FOOT[k]), &[MID[k], RADICAL_FOOT[k]]);
        t.push("4.6", Geometry::Line { line: locus }, Some(LOCUS[k]), &[FOOT[k]]);
    }
    if let Ok(radical_center) = line_intersection(&radical_axes[0], &radical_axes[2], &tol) {
        t.push("4.6", Geometry::Point { at: radical_center }, Some("O'"), &[]);
    }
    t.push("4.6", Geometry::Point { at: r.reflection_center }, Some("A"), &LOCUS);

    let first = r.first_inversion();
    let second = r.second_inversion();
    t.push(
        "4.7",
        Geometry::Circle { circle: Circle { center: first.center, radius: first.radius() } },
        Some("k"),
        &["A"],
    );
    const INVERTED: [&str; 3] = ["uC'_1", "uC'_2", "uC'_3"];
    for i in 0..3 {
        t.push("4.7", r.inverted_equal[i].into(), Some(INVERTED[i]), &["k", EQUAL[i]]);
    }
    t.push("4.7", r.c4p.into(), Some("C'_4"), &["k", "C_4"]);
    t.push(
        "4.8",
        Geometry::Label { anchor: r.reflection_center },
        Some("uC'_i = inv(A, k'^2)(C_i)"),
        &["A", INVERTED[0], INVERTED[1], INVERTED[2]],
    );
    t.push(
        "4.9",
        Geometry::Circle { circle: Circle { center: second.center, radius: second.radius() } },
        Some("k'"),
        &["A", "k"],
    );
    t.push("4.10", r.c4pp.into(), Some("C''_4"), &["k'", "C'_4"]);
    t
}
