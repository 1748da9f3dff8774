#![allow(dead_code)]

use apollonius::{run_pipeline, Circle, PipelineConfig, PipelineResult, Scene};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn circle(cx: f64, cy: f64, r: f64) -> Circle {
    Circle::from_coords(cx, cy, r).unwrap()
}

pub fn pinned() -> Scene {
    Scene::new([circle(0.0, 0.0, 1.0), circle(5.0, 0.0, 2.0), circle(2.0, 6.0, 3.0)]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid scene with separated-ish circles; `None` when validation
/// rejects the draw.
pub fn random_scene(rng: &mut impl Rng) -> Option<Scene> {
    let mut draw = || circle(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(0.2..3.0));
    Scene::new([draw(), draw(), draw()]).ok()
}

/// `count` scenes on which the default pipeline succeeds, with their runs.
pub fn feasible_runs(seed: u64, count: usize) -> Vec<(Scene, PipelineResult)> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100 * count, "too few feasible scenes");
        let Some(scene) = random_scene(&mut rng) else { continue };
        if let Ok(run) = run_pipeline(&scene, &PipelineConfig::default()) {
            out.push((scene, run));
        }
    }
    out
}
