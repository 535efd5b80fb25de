use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use leafcollage::io::{read_scene, render_overlay, SceneFiles, SceneNaming};

use super::Context;
use crate::config::{to_table, InspectArgs, Problems};

pub fn inspect(ctx: &Context, args: InspectArgs) -> Result<ExitCode> {
    let mut problems = Problems::default();
    let out = ctx.out(&mut problems);
    let scene = problems.require(&args.scene, "scene (positional)");
    problems.finish()?;
    let (out, scene) = (out.unwrap(), scene.unwrap());

    let (id, files) = scene_files(&scene);
    let missing: Vec<String> = [&files.rgb, &files.label]
        .into_iter()
        .filter(|p| !p.is_file())
        .map(|p| format!("  - {}", p.display()))
        .collect();
    if !missing.is_empty() {
        anyhow::bail!("scene `{id}` is incomplete; missing:\n{}", missing.join("\n"));
    }

    let mut resolved = toml::Table::new();
    resolved.insert("image_id".into(), id.clone().into());
    ctx.metadata("inspect", to_table(&args)?, Some(resolved)).write(&out)?;

    let (rgb, labels) = read_scene(&files)?;
    let overlay = render_overlay(&rgb, &labels);
    let path = out.join(format!("{id}_overlay.png"));
    overlay
        .save(&path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    println!(
        "scene {id}: {}x{}, {} labeled leaves",
        rgb.width(),
        rgb.height(),
        labels.instance_count()
    );
    println!("overlay: {}", path.display());
    Ok(ExitCode::SUCCESS)
}

/// Accepts `dir/scene_000003` or the path of any file of that scene.
fn scene_files(scene: &Path) -> (String, SceneFiles) {
    let naming = SceneNaming::default();
    let name = scene
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let suffixes = [&naming.rgb, &naming.label, &naming.foreground, &naming.manifest];
    let id = suffixes
        .iter()
        .find_map(|s| name.strip_suffix(s.as_str()))
        .unwrap_or(&name)
        .to_string();
    let dir = scene.parent().map(Path::to_path_buf).unwrap_or_default();
    let files = naming.files(&dir, &id);
    (id, files)
}
