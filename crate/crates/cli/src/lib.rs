//! Command implementations behind the `apollonius` binary.
//!
//! Every command reads a scene file, does its work and hands back the bytes
//! to write. Errors carry the process exit code they map to:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | invalid input (unreadable or malformed scene, bad flag values) |
//! | 3 | infeasible construction |
//! | 4 | degenerate geometry |
//! | 5 | output could not be written |
//!
//! Reports are JSON with keys in sorted order and floats in shortest
//! round-trip form, so parsing a report and writing it again reproduces the
//! same bytes.

use std::fs;
use std::path::{Path, PathBuf};

use apollonius::construction::ScanDiagnostics;
use apollonius::oracle::circle_metric;
use apollonius::svg::RenderError;
use apollonius::{
    render, run_pipeline, solve_ccc, validate_scene, verify_candidate, Circle, ConstructionError, ErrorCategory,
    GeneralizedCircle, KSquared, Layers, PipelineConfig, PipelineResult, RenderOptions, Scene, SolutionSet,
    TangentVariant,
};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("infeasible construction: {message}")]
    Infeasible {
        message: String,
        /// Partial report with the scan diagnostics, written before exiting.
        report: Option<Value>,
    },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("cannot write {path}: {source}")]
    Unwritable {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Infeasible { .. } => 3,
            CliError::Degenerate(_) => 4,
            CliError::Unwritable { .. } => 5,
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        match e.category() {
            ErrorCategory::InvalidInput => CliError::Invalid(e.to_string()),
            ErrorCategory::Degenerate => CliError::Degenerate(e.to_string()),
            ErrorCategory::Infeasible => {
                let report = match &e {
                    ConstructionError::NoFeasibleM2(diag) => Some(json!({
                        "schema_version": SCHEMA_VERSION,
                        "error": { "kind": "no_feasible_m2", "message": e.to_string() },
                        "scan": scan_json(diag),
                    })),
                    _ => Some(json!({
                        "schema_version": SCHEMA_VERSION,
                        "error": { "kind": "infeasible", "message": e.to_string() },
                    })),
                };
                CliError::Infeasible { message: e.to_string(), report }
            }
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircleSpec {
    cx: f64,
    cy: f64,
    r: f64,
}

/// Contents of a scene file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    circles: Vec<CircleSpec>,
    #[serde(default)]
    pub m_squared: Option<f64>,
    #[serde(default)]
    pub k_squared: Option<f64>,
    #[serde(default)]
    pub tangent_variant: Option<TangentVariant>,
    #[serde(default)]
    pub eps_rel: Option<f64>,
}

impl SceneFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: SceneFile = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("scene file: {e}")))?;
        if file.circles.len() != 3 {
            return Err(CliError::Invalid(format!(
                "scene file: expected 3 circles, found {}",
                file.circles.len()
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn circles(&self) -> Result<[Circle; 3], CliError> {
        let mut out = [Circle::from_coords(0.0, 0.0, 1.0).expect("unit circle"); 3];
        for (slot, c) in out.iter_mut().zip(&self.circles) {
            *slot = Circle::from_coords(c.cx, c.cy, c.r).map_err(|e| CliError::Invalid(e.to_string()))?;
        }
        Ok(out)
    }
}

/// Flag values shared by the commands; `None` defers to the scene file.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub m_squared: Option<f64>,
    pub k_squared: Option<f64>,
    pub variant: Option<TangentVariant>,
    pub no_scan: bool,
    pub eps_rel: Option<f64>,
}

/// Scene plus the configuration the flags and file resolve to.
pub struct Job {
    pub scene: Scene,
    pub config: PipelineConfig,
}

impl Job {
    pub fn new(file: &SceneFile, opts: &Options) -> Result<Self, CliError> {
        let eps_rel = opts.eps_rel.or(file.eps_rel).unwrap_or(apollonius::Tolerance::DEFAULT_EPS_REL);
        let scene = validate_scene(file.circles()?, eps_rel)?;
        let config = PipelineConfig {
            m_squared: opts.m_squared.or(file.m_squared).unwrap_or(apollonius::construction::DEFAULT_M_SQUARED),
            scan: !opts.no_scan,
            k_squared: match opts.k_squared.or(file.k_squared) {
                Some(k2) => KSquared::Fixed(k2),
                None => KSquared::Auto,
            },
            variant: opts.variant.or(file.tangent_variant).unwrap_or_default(),
            eps_rel: Some(eps_rel),
        };
        Ok(Job { scene, config })
    }

    pub fn load(path: &Path, opts: &Options) -> Result<Self, CliError> {
        Self::new(&SceneFile::read(path)?, opts)
    }
}

fn to_value<T: serde::Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn scene_json(scene: &Scene) -> Value {
    let circles: Vec<Value> = scene
        .circles()
        .iter()
        .map(|c| json!({ "cx": c.center.x, "cy": c.center.y, "r": c.radius }))
        .collect();
    json!({
        "circles": circles,
        "original_index": scene.original_index(),
        "scale": scene.scale(),
        "eps_rel": scene.tolerance().eps_rel(),
    })
}

fn scan_json(diag: &ScanDiagnostics) -> Value {
    to_value(diag)
}

fn solutions_json(set: &SolutionSet) -> Value {
    let list: Vec<Value> = set
        .solutions
        .iter()
        .map(|s| {
            json!({
                "cx": s.circle.center.x,
                "cy": s.circle.center.y,
                "r": s.circle.radius,
                "signs": s.signs,
                "residual": s.residual,
            })
        })
        .collect();
    Value::Array(list)
}

fn construct_json(run: &PipelineResult) -> Value {
    let r = &run.residuals;
    json!({
        "A": to_value(&run.reflection_center),
        "m_squared": run.m_squared,
        "shrink_radius": run.shrink_radius,
        "k2": run.k2,
        "kp2": run.kp2,
        "variant": run.variant.as_str(),
        "collinear": run.collinear,
        "c4": to_value(&run.c4),
        "c4p": to_value(&run.c4p),
        "c4pp": to_value(&run.c4pp),
        "residuals": {
            "power_ratio_dev": r.power_ratio_dev,
            "concurrency_dev": r.concurrency_dev,
            "c4_tangency": r.c4_tangency,
            "c4p_tangency": r.c4p_tangency,
            "second_inversion_dev": r.second_inversion_dev,
            "final_tangency": to_value(&r.final_tangency),
            "final_tangent": r.final_tangent,
        },
        "scan": scan_json(&run.scan),
    })
}

/// Comparison of one construction run against the oracle's solutions.
fn compare_entry(run: &PipelineResult, scene: &Scene, set: &SolutionSet) -> Value {
    let final_tangency = verify_candidate(&run.c4pp, scene);
    let nearest = match &run.c4pp {
        // a line is not comparable with circles under the metric
        GeneralizedCircle::Line(_) => Value::Null,
        GeneralizedCircle::Circle(c) => set
            .solutions
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s, circle_metric(c, &s.circle)))
            .min_by(|a, b| a.2.total_cmp(&b.2))
            .map_or(Value::Null, |(i, s, metric)| {
                json!({
                    "metric": metric,
                    "index": i,
                    "signs": s.signs,
                    "relative": metric / scene.scale(),
                })
            }),
    };
    json!({
        "variant": run.variant.as_str(),
        "ran": true,
        "c4pp": to_value(&run.c4pp),
        "final_tangency": to_value(&final_tangency),
        "max_residual": final_tangency.iter().map(|t| t.residual).fold(0.0, f64::max),
        "nearest": nearest,
    })
}

/// Serializes a report in canonical form, with a trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn cmd_solve(job: &Job) -> Value {
    let set = solve_ccc(&job.scene);
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": "solve",
        "scene": scene_json(&job.scene),
        "tolerance": set.tolerance,
        "solutions": solutions_json(&set),
    })
}

pub fn cmd_construct(job: &Job) -> Result<(Value, PipelineResult), CliError> {
    let run = run_pipeline(&job.scene, &job.config)?;
    let report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "construct",
        "scene": scene_json(&job.scene),
        "construct": construct_json(&run),
        "trace": to_value(run.trace.steps()),
    });
    Ok((report, run))
}

/// Runs the oracle and both tangent variants. Succeeds when the oracle and at
/// least one variant ran; variants that failed are reported with their error.
pub fn cmd_compare(job: &Job) -> Result<Value, CliError> {
    let set = solve_ccc(&job.scene);
    let mut entries = Vec::new();
    let mut first_error = None;
    let mut trace = None;
    for variant in TangentVariant::ALL {
        let config = PipelineConfig { variant, ..job.config };
        match run_pipeline(&job.scene, &config) {
            Ok(run) => {
                entries.push(compare_entry(&run, &job.scene, &set));
                if variant == job.config.variant {
                    trace = Some(to_value(run.trace.steps()));
                }
            }
            Err(e) => {
                entries.push(json!({
                    "variant": variant.as_str(),
                    "ran": false,
                    "error": e.to_string(),
                }));
                first_error.get_or_insert(e);
            }
        }
    }
    if entries.iter().all(|e| e["ran"] == false) {
        return Err(first_error.expect("a failed variant").into());
    }
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "compare",
        "scene": scene_json(&job.scene),
        "solutions": solutions_json(&set),
        "compare": { "variants": entries },
        "trace": trace.unwrap_or(Value::Array(Vec::new())),
    }))
}

pub fn parse_layers(list: Option<&str>) -> Result<Layers, CliError> {
    list.map_or(Ok(Layers::all()), |l| Layers::parse(l).map_err(CliError::from))
}

/// SVG for the scene, with the construction and oracle drawn when their
/// layers are enabled.
pub fn cmd_render(job: &Job, layers: Layers, run: Option<&PipelineResult>) -> Result<String, CliError> {
    use apollonius::Layer;
    let wants_construction = Layer::ALL
        .iter()
        .any(|l| !matches!(l, Layer::Scene | Layer::Oracle) && layers.contains(*l));
    let owned;
    let run = match (run, wants_construction) {
        (Some(r), _) => Some(r),
        (None, true) => {
            owned = run_pipeline(&job.scene, &job.config)?;
            Some(&owned)
        }
        (None, false) => None,
    };
    let set = layers.contains(Layer::Oracle).then(|| solve_ccc(&job.scene));
    let opts = RenderOptions { layers, ..RenderOptions::default() };
    Ok(render(&job.scene, run, set.as_ref(), &opts)?.text)
}

/// Writes `text` to `path`, or to standard output when there is no path.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Unwritable { path: p.to_owned(), source }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|source| CliError::Unwritable { path: PathBuf::from("<stdout>"), source })
        }
    }
}
