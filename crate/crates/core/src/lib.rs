//! Inversive geometry in the plane, and a construction of circles tangent to
//! three given circles built from it.
//!
//! The crate has four layers:
//!
//! - [`geom`]: points, circles, lines, powers and the scene-scaled
//!   [`Tolerance`] every predicate takes.
//! - [`inversion`]: inversion of points (in any dimension), circles and lines.
//! - [`construction`]: the inversion construction itself, which finds a
//!   reflection center `A`, shrinks the given circles to equal circles,
//!   solves the easy equal-radius problem and inverts the answer back. The
//!   run is recorded as a [`trace::ConstructionTrace`].
//! - [`oracle`]: an independent algebraic solver that enumerates every
//!   tangent circle, used to check the construction.
//!
//! [`svg`] draws any of the above.
//!
//! ```
//! use apollonius::{Circle, PipelineConfig, Scene, run_pipeline, solve_ccc};
//!
//! let scene = Scene::new([
//!     Circle::from_coords(0.0, 0.0, 1.0)?,
//!     Circle::from_coords(5.0, 0.0, 2.0)?,
//!     Circle::from_coords(2.0, 6.0, 3.0)?,
//! ])?;
//! let run = run_pipeline(&scene, &PipelineConfig::default())?;
//! assert!(run.residuals.power_ratio_dev < 1e-9);
//!
//! let oracle = solve_ccc(&scene);
//! assert_eq!(oracle.len(), 8);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! A longer walk-through lives in the guide under `book/`; its code samples
//! are compiled and run as doc-tests of this crate.

pub mod construction;
pub mod geom;
pub mod inversion;
pub mod oracle;
pub mod svg;
pub mod trace;

pub use construction::{
    choose_feasible_m2, difference_line, reflection_center, residual_report, run_pipeline,
    shrink_radius, tangent_to_equal_circles, validate_scene, ConstructionError, ErrorCategory,
    KSquared, PipelineConfig, PipelineResult, ResidualReport, Scene, TangentVariant,
};
pub use geom::{
    circle_from_general, circumcenter, collinear, foot_of_perpendicular, general_from_circle,
    line_intersection, perpendicular_bisector, power_of_point, tangency_classify, Circle,
    GeneralForm, GeomError, Line2, Point2, TangencyClass, TangencyKind, Tolerance,
};
pub use inversion::{
    concentric_composition_ratio, invert_point_nd, GeneralizedCircle, InversionError,
    InversionMap, VectorN,
};
pub use oracle::{nearest_solution, solve_ccc, verify_candidate, SignedSolution, SolutionSet};
pub use svg::{render, Layer, Layers, RenderOptions, SvgDocument};
pub use trace::{ConstructionTrace, Geometry, TraceStep};

// The guide's code samples run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/primitives.md")]
    mod primitives {}
    #[doc = include_str!("../../../book/src/inversion.md")]
    mod inversion {}
    #[doc = include_str!("../../../book/src/reflection-center.md")]
    mod reflection_center {}
    #[doc = include_str!("../../../book/src/construction.md")]
    mod construction {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
