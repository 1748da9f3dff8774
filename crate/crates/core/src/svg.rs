//! Deterministic SVG rendering of scenes, construction traces and oracle
//! solutions.
//!
//! Output is SVG 1.1. Layers are emitted as `<g>` elements in a fixed order
//! with fixed ids (`scene`, `equal_circles`, `loci`, `inverted`, `candidate`,
//! `oracle`, `labels`); inside a layer, trace objects follow trace order and
//! carry `id="step-N"`. Every number is printed with exactly six decimals and
//! negative zero is printed as zero, so identical input gives identical bytes.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::construction::{PipelineResult, Scene};
use crate::geom::{Circle, Line2, Point2};
use crate::oracle::SolutionSet;
use crate::trace::{Geometry, TraceStep};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("all layers are disabled")]
    EmptyRender,
    #[error("unknown layer {0:?}")]
    UnknownLayer(String),
    #[error("margin fraction {0} outside [0, 0.4]")]
    InvalidMargin(f64),
    #[error("canvas size must be positive")]
    InvalidSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Scene,
    EqualCircles,
    Loci,
    Inverted,
    Candidate,
    Oracle,
    Labels,
}

impl Layer {
    /// Emission order.
    pub const ALL: [Layer; 7] = [
        Layer::Scene,
        Layer::EqualCircles,
        Layer::Loci,
        Layer::Inverted,
        Layer::Candidate,
        Layer::Oracle,
        Layer::Labels,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Layer::Scene => "scene",
            Layer::EqualCircles => "equal_circles",
            Layer::Loci => "loci",
            Layer::Inverted => "inverted",
            Layer::Candidate => "candidate",
            Layer::Oracle => "oracle",
            Layer::Labels => "labels",
        }
    }

    fn style(&self) -> &'static str {
        match self {
            Layer::Scene => r##"fill="none" stroke="#000000" stroke-width="2""##,
            Layer::EqualCircles => r##"fill="none" stroke="#1f77b4" stroke-width="1""##,
            Layer::Loci => r##"fill="none" stroke="#7f7f7f" stroke-width="1" stroke-dasharray="4 3""##,
            Layer::Inverted => r##"fill="none" stroke="#2ca02c" stroke-width="1""##,
            Layer::Candidate => r##"fill="none" stroke="#d62728" stroke-width="2""##,
            Layer::Oracle => r##"fill="none" stroke="#9467bd" stroke-width="1" stroke-dasharray="2 2""##,
            Layer::Labels => r##"fill="#000000" font-family="sans-serif" font-size="12""##,
        }
    }

    /// Layer a trace step is drawn in, from its construction tag.
    pub fn for_tag(tag: &str) -> Layer {
        match tag {
            "4.1" | "4.5" | "3.1.8" => Layer::EqualCircles,
            "4.7" | "4.8" | "4.9" => Layer::Inverted,
            "4.10" => Layer::Candidate,
            _ => Layer::Loci,
        }
    }
}

impl FromStr for Layer {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Layer::ALL
            .into_iter()
            .find(|l| l.id() == s)
            .ok_or_else(|| RenderError::UnknownLayer(s.to_owned()))
    }
}

/// Set of enabled layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers([bool; 7]);

impl Layers {
    pub fn all() -> Self {
        Layers([true; 7])
    }

    pub fn none() -> Self {
        Layers([false; 7])
    }

    pub fn with(mut self, layer: Layer, on: bool) -> Self {
        self.0[layer as usize] = on;
        self
    }

    pub fn contains(&self, layer: Layer) -> bool {
        self.0[layer as usize]
    }

    /// Parses a comma-separated list such as `scene,oracle`.
    pub fn parse(list: &str) -> Result<Self, RenderError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .try_fold(Layers::none(), |acc, name| Ok(acc.with(name.parse()?, true)))
    }
}

impl Default for Layers {
    fn default() -> Self {
        Layers::all()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub width_px: u32,
    pub height_px: u32,
    pub margin_fraction: f64,
    pub layers: Layers,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            width_px: 1000,
            height_px: 1000,
            margin_fraction: 0.05,
            layers: Layers::all(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgDocument {
    pub text: String,
}

impl SvgDocument {
    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl fmt::Display for SvgDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Six decimals, no negative zero.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_owned()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    lo: Point2,
    hi: Point2,
}

impl Bounds {
    fn empty() -> Self {
        Bounds {
            lo: Point2::new(f64::INFINITY, f64::INFINITY),
            hi: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn add(&mut self, p: Point2) {
        if p.is_finite() {
            self.lo = Point2::new(self.lo.x.min(p.x), self.lo.y.min(p.y));
            self.hi = Point2::new(self.hi.x.max(p.x), self.hi.y.max(p.y));
        }
    }

    fn add_circle(&mut self, c: &Circle) {
        let (lo, hi) = c.bounds();
        self.add(lo);
        self.add(hi);
    }

    fn is_empty(&self) -> bool {
        self.lo.x > self.hi.x
    }

    fn center(&self) -> Point2 {
        self.lo.midpoint(self.hi)
    }
}

/// World-to-pixel mapping with y pointing up in world space.
struct Frame {
    world_lo: Point2,
    world_hi: Point2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(b: Bounds, opts: &RenderOptions) -> Self {
        let (w_px, h_px) = (f64::from(opts.width_px), f64::from(opts.height_px));
        let mut size = b.hi - b.lo;
        // Degenerate extents still need a positive scale.
        let floor = size.x.max(size.y).max(1e-9);
        size = Point2::new(size.x.max(floor * 1e-3), size.y.max(floor * 1e-3));
        let m = opts.margin_fraction;
        let padded = Point2::new(size.x * (1.0 + 2.0 * m), size.y * (1.0 + 2.0 * m));
        let scale = (w_px / padded.x).min(h_px / padded.y);
        let view = Point2::new(w_px / scale, h_px / scale);
        let c = b.center();
        Frame {
            world_lo: c - view * 0.5,
            world_hi: c + view * 0.5,
            scale,
            height: h_px,
        }
    }

    fn px(&self, p: Point2) -> (String, String) {
        let x = (p.x - self.world_lo.x) * self.scale;
        let y = self.height - (p.y - self.world_lo.y) * self.scale;
        (fmt_num(x), fmt_num(y))
    }

    fn len(&self, l: f64) -> String {
        fmt_num(l * self.scale)
    }

    /// Segment of `line` inside the visible world rectangle.
    fn clip(&self, line: &Line2) -> Option<(Point2, Point2)> {
        let origin = line.anchor();
        let dir = line.direction();
        let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
        for (o, d, lo, hi) in [
            (origin.x, dir.x, self.world_lo.x, self.world_hi.x),
            (origin.y, dir.y, self.world_lo.y, self.world_hi.y),
        ] {
            if d.abs() < 1e-300 {
                if o < lo || o > hi {
                    return None;
                }
            } else {
                let (a, b) = ((lo - o) / d, (hi - o) / d);
                t0 = t0.max(a.min(b));
                t1 = t1.min(a.max(b));
            }
        }
        (t0 <= t1).then(|| (origin + dir * t0, origin + dir * t1))
    }
}

struct Item<'a> {
    step: &'a TraceStep,
    layer: Layer,
}

fn extend_bounds(b: &mut Bounds, g: &Geometry) {
    match g {
        Geometry::Point { at } => b.add(*at),
        Geometry::Segment { from, to } => {
            b.add(*from);
            b.add(*to);
        }
        Geometry::Circle { circle } => b.add_circle(circle),
        Geometry::Arc { center, radius, .. } => b.add_circle(&Circle { center: *center, radius: *radius }),
        Geometry::Label { anchor } => b.add(*anchor),
        Geometry::Line { .. } => {}
    }
}

/// Renders the scene and whichever of the construction and oracle results
/// are supplied.
pub fn render(
    scene: &Scene,
    result: Option<&PipelineResult>,
    oracle: Option<&SolutionSet>,
    opts: &RenderOptions,
) -> Result<SvgDocument, RenderError> {
    if Layer::ALL.iter().all(|l| !opts.layers.contains(*l)) {
        return Err(RenderError::EmptyRender);
    }
    if !(0.0..=0.4).contains(&opts.margin_fraction) {
        return Err(RenderError::InvalidMargin(opts.margin_fraction));
    }
    if opts.width_px == 0 || opts.height_px == 0 {
        return Err(RenderError::InvalidSize);
    }
    let on = |l: Layer| opts.layers.contains(l);

    let items: Vec<Item> = result
        .map(|r| {
            r.trace
                .steps()
                .iter()
                .map(|step| Item { step, layer: Layer::for_tag(&step.tag) })
                .filter(|it| on(it.layer))
                .collect()
        })
        .unwrap_or_default();

    let mut bounds = Bounds::empty();
    if on(Layer::Scene) {
        scene.circles().iter().for_each(|c| bounds.add_circle(c));
    }
    for it in &items {
        extend_bounds(&mut bounds, &it.step.geometry);
    }
    if on(Layer::Oracle) {
        if let Some(set) = oracle {
            set.solutions.iter().for_each(|s| bounds.add_circle(&s.circle));
        }
    }
    if bounds.is_empty() {
        scene.circles().iter().for_each(|c| bounds.add_circle(c));
    }
    // Pull every drawn line into view through its point nearest the scene.
    let center = bounds.center();
    for it in &items {
        if let Geometry::Line { line } = it.step.geometry {
            bounds.add(center - line.normal * line.signed_distance(center));
        }
    }
    let frame = Frame::new(bounds, opts);

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = opts.width_px,
        h = opts.height_px
    );

    for layer in Layer::ALL {
        if !on(layer) {
            continue;
        }
        let _ = writeln!(out, r#"  <g id="{}" {}>"#, layer.id(), layer.style());
        match layer {
            Layer::Scene => {
                for (i, c) in scene.circles().iter().enumerate() {
                    let (x, y) = frame.px(c.center);
                    let _ = writeln!(
                        out,
                        r#"    <circle id="C_{}" cx="{x}" cy="{y}" r="{}"/>"#,
                        i + 1,
                        frame.len(c.radius)
                    );
                }
            }
            Layer::Oracle => {
                for (i, s) in oracle.map(|o| o.solutions.as_slice()).unwrap_or_default().iter().enumerate() {
                    let (x, y) = frame.px(s.circle.center);
                    let _ = writeln!(
                        out,
                        r#"    <circle id="oracle-{}" cx="{x}" cy="{y}" r="{}"/>"#,
                        i + 1,
                        frame.len(s.circle.radius)
                    );
                }
            }
            Layer::Labels => {
                for it in &items {
                    if let Some(label) = &it.step.label {
                        let (x, y) = frame.px(it.step.geometry.anchor());
                        let _ = writeln!(
                            out,
                            r#"    <text id="label-{}" x="{x}" y="{y}">{}</text>"#,
                            it.step.id,
                            escape(label)
                        );
                    }
                }
            }
            _ => {
                for it in items.iter().filter(|it| it.layer == layer) {
                    write_geometry(&mut out, &frame, it.step);
                }
            }
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(SvgDocument { text: out })
}

fn write_geometry(out: &mut String, frame: &Frame, step: &TraceStep) {
    let id = step.id;
    match step.geometry {
        Geometry::Point { at } => {
            let (x, y) = frame.px(at);
            let _ = writeln!(out, r#"    <circle id="step-{id}" class="point" cx="{x}" cy="{y}" r="3.000000"/>"#);
        }
        Geometry::Segment { from, to } => {
            let ((x1, y1), (x2, y2)) = (frame.px(from), frame.px(to));
            let _ = writeln!(out, r#"    <line id="step-{id}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
        Geometry::Line { line } => {
            // Bounds were extended so every line crosses the view.
            let (a, b) = frame.clip(&line).unwrap_or((line.anchor(), line.anchor()));
            let ((x1, y1), (x2, y2)) = (frame.px(a), frame.px(b));
            let _ = writeln!(out, r#"    <line id="step-{id}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
        Geometry::Circle { circle } => {
            let (x, y) = frame.px(circle.center);
            let _ = writeln!(
                out,
                r#"    <circle id="step-{id}" cx="{x}" cy="{y}" r="{}"/>"#,
                frame.len(circle.radius)
            );
        }
        Geometry::Arc { center, radius, start, end } => {
            let at = |t: f64| center + Point2::new(t.cos(), t.sin()) * radius;
            let ((x1, y1), (x2, y2)) = (frame.px(at(start)), frame.px(at(end)));
            let large = u8::from((end - start).rem_euclid(std::f64::consts::TAU) > std::f64::consts::PI);
            let r = frame.len(radius);
            // y is flipped, so counter-clockwise in world space is sweep 0.
            let _ = writeln!(
                out,
                r#"    <path id="step-{id}" d="M {x1} {y1} A {r} {r} 0 {large} 0 {x2} {y2}"/>"#
            );
        }
        Geometry::Label { .. } => {}
    }
}
