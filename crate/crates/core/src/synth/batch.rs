use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::manifest::{GeneratorKind, SceneManifest};
use super::{generate_naive, generate_structured, NaiveParams, SubsetParams};
use crate::error::{Error, Result};
use crate::io::{write_counts, write_scene, Background};
use crate::leafbank::LeafBank;
use crate::raster::Scene;

pub const COUNTS_FILE: &str = "counts.csv";

#[derive(Clone, Debug, PartialEq)]
pub enum GeneratorConfig {
    Naive(NaiveParams),
    Structured(SubsetParams),
}

impl GeneratorConfig {
    pub fn kind(&self) -> GeneratorKind {
        match self {
            GeneratorConfig::Naive(_) => GeneratorKind::Naive,
            GeneratorConfig::Structured(_) => GeneratorKind::Structured,
        }
    }

    pub fn generate(
        &self,
        bank: &LeafBank,
        backgrounds: &[Background],
        global_seed: u64,
        image_index: u64,
    ) -> Result<(Scene, SceneManifest)> {
        match self {
            GeneratorConfig::Naive(p) => generate_naive(p, bank, backgrounds, global_seed, image_index),
            GeneratorConfig::Structured(p) => {
                generate_structured(p, bank, backgrounds, global_seed, image_index)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct BatchSpec {
    pub config: GeneratorConfig,
    pub count: u64,
    pub global_seed: u64,
    /// Worker threads; has no influence on the output.
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchOutcome {
    /// `(image_id, visible leaf count)` in index order.
    pub counts: Vec<(String, u32)>,
}

/// Generates scenes `0..count` into `out_dir` with the scene files plus a
/// dataset-level `counts.csv`.
pub fn generate_batch(
    spec: &BatchSpec,
    bank: &LeafBank,
    backgrounds: &[Background],
    out_dir: &Path,
) -> Result<BatchOutcome> {
    if spec.count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let counts = pool.install(|| {
        (0..spec.count)
            .into_par_iter()
            .map(|i| {
                let (scene, manifest) = spec.config.generate(bank, backgrounds, spec.global_seed, i)?;
                write_scene(&scene, &manifest, out_dir)?;
                Ok((manifest.image_id, manifest.visible_count))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    write_counts(&out_dir.join(COUNTS_FILE), &counts)?;
    Ok(BatchOutcome { counts })
}
