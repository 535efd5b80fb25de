use super::manifest::{GeneratorKind, SceneManifest};
use super::params::{pick_plant_center, LeafOrder, SubsetParams};
use crate::error::{Error, Result};
use crate::io::Background;
use crate::leafbank::LeafBank;
use crate::raster::{composite_leaf, Scene};
use crate::rng::SceneRng;
use crate::Placement;

pub(crate) fn check_inputs(bank: &LeafBank, backgrounds: &[Background], canvas: (u32, u32)) -> Result<()> {
    if bank.is_empty() {
        return Err(Error::Config("leaf bank is empty".into()));
    }
    if backgrounds.is_empty() {
        return Err(Error::Config("no background images".into()));
    }
    if let Some(bg) = backgrounds.iter().find(|b| b.pixels.dimensions() != canvas) {
        let (w, h) = bg.pixels.dimensions();
        return Err(Error::Config(format!(
            "background `{}` is {w}x{h}, expected {}x{}",
            bg.id, canvas.0, canvas.1
        )));
    }
    Ok(())
}

/// Generates structured scene `image_index` of the dataset seeded with
/// `global_seed`.
///
/// Draw order: background, leaf count, plant center, the leaves (uniform
/// with replacement), then one angle per leaf. Every leaf is anchored at the
/// plant center at native size.
pub fn generate_structured(
    params: &SubsetParams,
    bank: &LeafBank,
    backgrounds: &[Background],
    global_seed: u64,
    image_index: u64,
) -> Result<(Scene, SceneManifest)> {
    params.validate()?;
    check_inputs(bank, backgrounds, params.canvas())?;
    if !bank.all_aligned() {
        return Err(Error::Config(
            "structured generation needs an aligned leaf bank".into(),
        ));
    }

    let mut rng = SceneRng::for_scene(global_seed, image_index);
    let background = &backgrounds[rng.index(backgrounds.len())];
    let n = rng.int_inclusive(params.leaves_min as u64, params.leaves_max as u64) as u32;
    let center = pick_plant_center::<f64>(params, &mut rng)
        .round_to_pixel()
        .map(|(x, y)| crate::geometry::Pixel::new(x, y))
        .expect("plant center is clamped into the canvas");

    let mut leaves: Vec<usize> = (0..n).map(|_| rng.index(bank.len())).collect();
    if params.order == LeafOrder::AreaDescending {
        leaves.sort_by_key(|&i| std::cmp::Reverse(bank.leaves()[i].area_px));
    }
    let angles = params.schedule.sequence(n, &mut rng);

    let mut scene = Scene::new(background.pixels.clone());
    let mut placements = Vec::with_capacity(n as usize);
    for (i, (&leaf_idx, &angle)) in leaves.iter().zip(&angles).enumerate() {
        let leaf = &bank.leaves()[leaf_idx];
        let p = Placement {
            leaf_id: leaf.id(),
            position: center,
            angle_deg: angle,
            scale_x: 1.0,
            scale_y: 1.0,
            z: i as u32 + 1,
        };
        composite_leaf(&mut scene, leaf, &p)?;
        placements.push(p);
    }
    let map = scene.keep_visible(params.min_visible as usize);
    let visible_count = map.iter().copied().max().unwrap_or(0);
    let (width, height) = scene.dimensions();

    let manifest = SceneManifest {
        image_id: super::image_id(image_index),
        kind: GeneratorKind::Structured,
        global_seed,
        image_index,
        background_id: background.id.clone(),
        width,
        height,
        plant_center: Some(center),
        min_visible: params.min_visible,
        placements,
        placed_count: n,
        visible_count,
    };
    Ok((scene, manifest))
}
