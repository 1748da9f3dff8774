//! Replayable record of a straightedge-and-compass construction.

use serde::{Deserialize, Serialize};

use crate::geom::{Circle, Line2, Point2};
use crate::inversion::GeneralizedCircle;

/// What a step draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Point { at: Point2 },
    Segment { from: Point2, to: Point2 },
    Line { line: Line2 },
    Circle { circle: Circle },
    /// Counter-clockwise arc between two angles in radians.
    Arc { center: Point2, radius: f64, start: f64, end: f64 },
    /// A text annotation with no drawn geometry of its own.
    Label { anchor: Point2 },
}

impl Geometry {
    pub fn kind(&self) -> &'static str {
        match self {
            Geometry::Point { .. } => "point",
            Geometry::Segment { .. } => "segment",
            Geometry::Line { .. } => "line",
            Geometry::Circle { .. } => "circle",
            Geometry::Arc { .. } => "arc",
            Geometry::Label { .. } => "label",
        }
    }

    /// Where a text label for this step is placed.
    pub fn anchor(&self) -> Point2 {
        match *self {
            Geometry::Point { at } => at,
            Geometry::Segment { from, to } => from.midpoint(to),
            Geometry::Line { line } => line.anchor(),
            Geometry::Circle { circle } => circle.center + Point2::new(0.0, circle.radius),
            Geometry::Arc { center, radius, end, .. } => {
                let (s, c) = end.sin_cos();
                center + Point2::new(c, s) * radius
            }
            Geometry::Label { anchor } => anchor,
        }
    }
}

impl From<GeneralizedCircle> for Geometry {
    fn from(g: GeneralizedCircle) -> Self {
        match g {
            GeneralizedCircle::Circle(circle) => Geometry::Circle { circle },
            GeneralizedCircle::Line(line) => Geometry::Line { line },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub id: u32,
    pub geometry: Geometry,
    pub label: Option<String>,
    /// Labels of earlier steps this one is built from.
    pub refs: Vec<String>,
    /// Construction step this belongs to, e.g. `"4.6"` or `"3.1.8"`.
    pub tag: String,
}

/// Ordered list of construction steps with strictly increasing ids.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    steps: Vec<TraceStep>,
}

impl ConstructionTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub(crate) fn push(&mut self, tag: &str, geometry: Geometry, label: Option<&str>, refs: &[&str]) {
        let id = self.steps.last().map_or(1, |s| s.id + 1);
        debug_assert!(
            refs.iter().all(|r| self.find(r).is_some()),
            "step {id} references an undefined label in {refs:?}"
        );
        self.steps.push(TraceStep {
            id,
            geometry,
            label: label.map(str::to_owned),
            refs: refs.iter().map(|r| (*r).to_owned()).collect(),
            tag: tag.to_owned(),
        });
    }

    pub fn find(&self, label: &str) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.label.as_deref() == Some(label))
    }

    /// Steps carrying the given tag, in order.
    pub fn tagged<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = &'a TraceStep> + 'a {
        self.steps.iter().filter(move |s| s.tag == tag)
    }

    /// Checks ids are strictly increasing and that every reference names a
    /// label defined by an earlier step.
    pub fn is_well_formed(&self) -> bool {
        let ids_ok = self.steps.windows(2).all(|w| w[0].id < w[1].id);
        let refs_ok = self.steps.iter().enumerate().all(|(i, step)| {
            step.refs
                .iter()
                .all(|r| self.steps[..i].iter().any(|s| s.label.as_deref() == Some(r.as_str())))
        });
        ids_ok && refs_ok
    }
}
