use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Pixel;
use crate::io::Background;
use crate::leafbank::LeafBank;
use crate::raster::{composite_leaf, Scene};
use crate::Placement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Naive,
    Structured,
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Naive => "naive",
            GeneratorKind::Structured => "structured",
        })
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(GeneratorKind::Naive),
            "structured" => Ok(GeneratorKind::Structured),
            other => Err(Error::InvalidInput(format!(
                "unknown generator kind `{other}` (expected naive or structured)"
            ))),
        }
    }
}

/// Complete, replayable record of one generated scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    pub image_id: String,
    pub kind: GeneratorKind,
    pub global_seed: u64,
    pub image_index: u64,
    pub background_id: String,
    pub width: u32,
    pub height: u32,
    /// Common anchor of all leaves; structured scenes only.
    pub plant_center: Option<Pixel>,
    pub min_visible: u32,
    pub placements: Vec<Placement>,
    pub placed_count: u32,
    pub visible_count: u32,
}

impl SceneManifest {
    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.placements.iter().enumerate() {
            if p.z != i as u32 + 1 {
                return Err(Error::InvalidInput(format!(
                    "manifest `{}`: placement {i} has z = {}, expected {}",
                    self.image_id,
                    p.z,
                    i + 1
                )));
            }
            p.validate()?;
        }
        if self.placed_count as usize != self.placements.len() {
            return Err(Error::InvalidInput(format!(
                "manifest `{}`: placed_count {} but {} placements",
                self.image_id,
                self.placed_count,
                self.placements.len()
            )));
        }
        if self.visible_count > self.placed_count {
            return Err(Error::InvalidInput(format!(
                "manifest `{}`: visible_count {} exceeds placed_count {}",
                self.image_id, self.visible_count, self.placed_count
            )));
        }
        Ok(())
    }

    /// Canonical serialized form: same manifest, same bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: SceneManifest = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("malformed manifest: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}

/// Rebuilds a scene from its manifest: same background, same placements in
/// z order, same visibility relabeling.
pub fn replay_manifest(manifest: &SceneManifest, bank: &LeafBank, backgrounds: &[Background]) -> Result<Scene> {
    manifest.validate()?;
    let bg = backgrounds
        .iter()
        .find(|b| b.id == manifest.background_id)
        .ok_or_else(|| Error::Config(format!("background `{}` not available", manifest.background_id)))?;
    let mut scene = Scene::new(bg.pixels.clone());
    for p in &manifest.placements {
        let leaf = bank
            .get(&p.leaf_id)
            .ok_or_else(|| Error::Config(format!("leaf `{}` not in bank", p.leaf_id)))?;
        composite_leaf(&mut scene, leaf, p)?;
    }
    scene.keep_visible(manifest.min_visible as usize);
    Ok(scene)
}
