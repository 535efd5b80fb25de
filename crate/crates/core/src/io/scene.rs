use std::fs;
use std::path::{Path, PathBuf};

use image::RgbImage;

use super::{csv_writer, read_label_png, write_foreground_png, write_label_png};
use crate::error::{Error, Result};
use crate::raster::{LabelMap, Scene};
use crate::synth::SceneManifest;

/// File name suffixes for the per-scene outputs. The defaults give
/// `{id}_rgb.png`, `{id}_label.png`, `{id}_fg.png` and `{id}_manifest.json`;
/// other conventions can be targeted by overriding them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneNaming {
    pub rgb: String,
    pub label: String,
    pub foreground: String,
    pub manifest: String,
}

impl Default for SceneNaming {
    fn default() -> Self {
        Self {
            rgb: "_rgb.png".into(),
            label: "_label.png".into(),
            foreground: "_fg.png".into(),
            manifest: "_manifest.json".into(),
        }
    }
}

impl SceneNaming {
    pub fn files(&self, dir: &Path, image_id: &str) -> SceneFiles {
        SceneFiles {
            rgb: dir.join(format!("{image_id}{}", self.rgb)),
            label: dir.join(format!("{image_id}{}", self.label)),
            foreground: dir.join(format!("{image_id}{}", self.foreground)),
            manifest: dir.join(format!("{image_id}{}", self.manifest)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SceneFiles {
    pub rgb: PathBuf,
    pub label: PathBuf,
    pub foreground: PathBuf,
    pub manifest: PathBuf,
}

pub fn write_scene(scene: &Scene, manifest: &SceneManifest, out_dir: &Path) -> Result<SceneFiles> {
    write_scene_with(scene, manifest, out_dir, &SceneNaming::default())
}

pub fn write_scene_with(
    scene: &Scene,
    manifest: &SceneManifest,
    out_dir: &Path,
    naming: &SceneNaming,
) -> Result<SceneFiles> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = naming.files(out_dir, &manifest.image_id);
    scene
        .pixels
        .save(&files.rgb)
        .map_err(|e| Error::image(&files.rgb, e))?;
    write_label_png(&files.label, &scene.labels)?;
    write_foreground_png(&files.foreground, &scene.labels)?;
    fs::write(&files.manifest, manifest.to_json()).map_err(|e| Error::io(&files.manifest, e))?;
    Ok(files)
}

pub fn read_manifest(path: &Path) -> Result<SceneManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SceneManifest::from_json(&text).map_err(|e| Error::Ingestion {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Loads the RGB and label rasters of a written scene.
pub fn read_scene(files: &SceneFiles) -> Result<(RgbImage, LabelMap)> {
    let rgb = image::open(&files.rgb)
        .map_err(|e| Error::image(&files.rgb, e))?
        .to_rgb8();
    let labels = read_label_png(&files.label)?;
    if rgb.dimensions() != labels.dimensions() {
        return Err(Error::Ingestion {
            path: files.label.clone(),
            reason: "label raster and RGB image differ in size".into(),
        });
    }
    Ok((rgb, labels))
}

/// Writes the dataset-level `image_id,count` file.
pub fn write_counts(path: &Path, counts: &[(String, u32)]) -> Result<()> {
    let mut wtr = csv_writer(path)?;
    wtr.write_record(["image_id", "count"]).map_err(|e| Error::csv(path, e))?;
    for (id, n) in counts {
        wtr.write_record([id.as_str(), &n.to_string()])
            .map_err(|e| Error::csv(path, e))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}
