use super::manifest::{GeneratorKind, SceneManifest};
use super::params::NaiveParams;
use super::structured::check_inputs;
use crate::error::{Error, Result};
use crate::geometry::Pixel;
use crate::io::Background;
use crate::leafbank::LeafBank;
use crate::raster::{composite_leaf, Scene};
use crate::rng::SceneRng;
use crate::Placement;

/// Generates naive scene `image_index`: leaves scattered with independent
/// horizontal/vertical scale, free rotation and a uniformly drawn anchor
/// (the leaf center) anywhere inside the canvas.
pub fn generate_naive(
    params: &NaiveParams,
    bank: &LeafBank,
    backgrounds: &[Background],
    global_seed: u64,
    image_index: u64,
) -> Result<(Scene, SceneManifest)> {
    params.validate()?;
    check_inputs(bank, backgrounds, params.canvas())?;
    for leaf in bank.leaves() {
        let (w, h) = leaf.pixels.dimensions();
        if w.max(h) != params.prescale_longest_dim {
            return Err(Error::Config(format!(
                "leaf `{}` is {w}x{h}; naive generation expects leaves prescaled to {} px",
                leaf.id(),
                params.prescale_longest_dim
            )));
        }
        if (w.min(h) as f64 * params.scale_min).round() < 1.0 {
            return Err(Error::Config(format!(
                "leaf `{}` ({w}x{h}) vanishes at scale {}",
                leaf.id(),
                params.scale_min
            )));
        }
    }

    let mut rng = SceneRng::for_scene(global_seed, image_index);
    let background = &backgrounds[rng.index(backgrounds.len())];
    let n = rng.int_inclusive(params.leaves_min as u64, params.leaves_max as u64) as u32;
    let (width, height) = params.canvas();

    let mut scene = Scene::new(background.pixels.clone());
    let mut placements = Vec::with_capacity(n as usize);
    for z in 1..=n {
        let leaf = &bank.leaves()[rng.index(bank.len())];
        let scale_x = rng.uniform(params.scale_min, params.scale_max);
        let scale_y = rng.uniform(params.scale_min, params.scale_max);
        let angle_deg = rng.uniform(0.0, 360.0);
        let x = rng.int_inclusive(0, width as u64 - 1) as u32;
        let y = rng.int_inclusive(0, height as u64 - 1) as u32;
        let p = Placement {
            leaf_id: leaf.id(),
            position: Pixel::new(x, y),
            angle_deg,
            scale_x,
            scale_y,
            z,
        };
        composite_leaf(&mut scene, leaf, &p)?;
        placements.push(p);
    }
    let map = scene.keep_visible(params.min_visible as usize);
    let visible_count = map.iter().copied().max().unwrap_or(0);

    let manifest = SceneManifest {
        image_id: super::image_id(image_index),
        kind: GeneratorKind::Naive,
        global_seed,
        image_index,
        background_id: background.id.clone(),
        width,
        height,
        plant_center: None,
        min_visible: params.min_visible,
        placements,
        placed_count: n,
        visible_count,
    };
    Ok((scene, manifest))
}
