//! Command options, the TOML config file, and how the two are merged.
//!
//! Every option is optional at parse time so that a value can come from
//! either the command line or the config file; flags win field by field.
//! Config keys are the flag names with `-` replaced by `_`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const RUN_METADATA_FILE: &str = "run_metadata.txt";

/// Flags accepted by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct SharedArgs {
    /// Global seed; fully determines every random choice
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores); never changes outputs
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    #[default]
    Structured,
    Naive,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Structured => "structured",
            Kind::Naive => "naive",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crop {
    #[default]
    Center,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Order {
    Random,
    AreaDescending,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestArgs {
    /// Directory of `{id}_rgb.png` / `{id}_label.png` pairs
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Bank flavor: aligned leaves (structured) or prescaled loose leaves (naive)
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Subset tag stamped on every leaf: A1, A2, A3, A4 or custom
    #[arg(long)]
    pub tag: Option<String>,
    /// CSV of `source_id,x,y` plant centers
    #[arg(long)]
    pub centers: Option<PathBuf>,
    /// Largest base-to-center distance as a fraction of the source diagonal
    #[arg(long)]
    pub base_dist_frac: Option<f64>,
    /// Largest fraction of boundary pixels touching another leaf
    #[arg(long)]
    pub occlusion_frac: Option<f64>,
    /// Smallest leaf area in pixels
    #[arg(long)]
    pub min_area: Option<u32>,
    /// Longest side of every naive leaf after rescaling
    #[arg(long)]
    pub prescale: Option<u32>,
    /// Directory of background photographs copied into `{out}/backgrounds`
    #[arg(long)]
    pub backgrounds: Option<PathBuf>,
    /// Crop backgrounds to this width (requires --canvas-h)
    #[arg(long)]
    pub canvas_w: Option<u32>,
    /// Crop backgrounds to this height (requires --canvas-w)
    #[arg(long)]
    pub canvas_h: Option<u32>,
    /// Crop window placement when cropping backgrounds
    #[arg(long, value_enum)]
    pub crop: Option<Crop>,
    /// Upscale backgrounds smaller than the canvas instead of failing
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub allow_resize: Option<bool>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateArgs {
    /// Leaf bank directory written by `ingest`
    #[arg(long)]
    pub bank: Option<PathBuf>,
    /// Background directory (default: `{bank}/backgrounds`)
    #[arg(long)]
    pub backgrounds: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Structured preset: A1, A2, A3, A4, or custom (config file only)
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of scenes
    #[arg(long)]
    pub count: Option<u64>,
    #[arg(long)]
    pub train_w: Option<u32>,
    #[arg(long)]
    pub train_h: Option<u32>,
    #[arg(long)]
    pub center_x: Option<u32>,
    #[arg(long)]
    pub center_y: Option<u32>,
    #[arg(long)]
    pub center_delta_w: Option<u32>,
    #[arg(long)]
    pub center_delta_h: Option<u32>,
    #[arg(long)]
    pub leaves_min: Option<u32>,
    #[arg(long)]
    pub leaves_max: Option<u32>,
    /// Placed leaves with fewer visible pixels lose their label
    #[arg(long)]
    pub min_visible: Option<u32>,
    #[arg(long)]
    pub within_triad_mean: Option<f64>,
    #[arg(long)]
    pub within_triad_jitter: Option<f64>,
    #[arg(long)]
    pub triad_offset_base: Option<f64>,
    #[arg(long)]
    pub triad_offset_jitter_base: Option<f64>,
    /// Use interval midpoints instead of random angle draws
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub zero_jitter: Option<bool>,
    #[arg(long, value_enum)]
    pub order: Option<Order>,
    #[arg(long)]
    pub canvas_w: Option<u32>,
    #[arg(long)]
    pub canvas_h: Option<u32>,
    #[arg(long)]
    pub scale_min: Option<f64>,
    #[arg(long)]
    pub scale_max: Option<f64>,
    /// Longest leaf side the naive bank was prescaled to (must match ingest)
    #[arg(long)]
    pub prescale: Option<u32>,
    /// Upscale backgrounds smaller than the canvas instead of failing
    #[arg(long, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub allow_resize: Option<bool>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateArgs {
    /// Directory of predicted label PNGs
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// Directory of ground-truth label PNGs
    #[arg(long)]
    pub gt: Option<PathBuf>,
    /// File name suffix identifying label PNGs (default `_label.png`)
    #[arg(long)]
    pub suffix: Option<String>,
}

#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InspectArgs {
    /// Scene prefix (`dir/scene_000003`) or the path of any of its files
    pub scene: Option<PathBuf>,
}

/// On-disk config: shared keys at the top, one table per subcommand.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub ingest: Option<IngestArgs>,
    pub generate: Option<GenerateArgs>,
    pub evaluate: Option<EvaluateArgs>,
    pub inspect: Option<InspectArgs>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Shared settings with `flags` taking precedence. Merged by hand
    /// because TOML integers cannot hold every u64 seed.
    pub fn shared(&self, flags: &SharedArgs) -> SharedArgs {
        SharedArgs {
            seed: flags.seed.or(self.seed),
            workers: flags.workers.or(self.workers),
            out: flags.out.clone().or_else(|| self.out.clone()),
        }
    }
}

/// Fields set in `flags` replace the same fields of `file`.
pub fn overlay<T: Serialize + DeserializeOwned>(file: Option<&T>, flags: &T) -> Result<T> {
    let mut merged = match file {
        Some(f) => to_table(f)?,
        None => toml::Table::new(),
    };
    merged.extend(to_table(flags)?);
    Ok(toml::Value::Table(merged).try_into()?)
}

pub fn to_table<T: Serialize>(value: &T) -> Result<toml::Table> {
    match toml::Value::try_from(value)? {
        toml::Value::Table(t) => Ok(t),
        other => anyhow::bail!("expected a table, got {other}"),
    }
}

/// Collects every configuration problem before reporting any of them.
#[derive(Debug, Default)]
pub struct Problems(Vec<String>);

impl Problems {
    pub fn push(&mut self, problem: impl Into<String>) {
        self.0.push(problem.into());
    }

    pub fn require<T: Clone>(&mut self, value: &Option<T>, flag: &str) -> Option<T> {
        if value.is_none() {
            self.push(format!("--{flag} is required"));
        }
        value.clone()
    }

    pub fn check(&mut self, result: leafcollage::Result<()>) {
        if let Err(e) = result {
            self.push(e.to_string());
        }
    }

    pub fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            return Ok(());
        }
        let list: Vec<String> = self.0.iter().map(|p| format!("  - {p}")).collect();
        anyhow::bail!("invalid configuration:\n{}", list.join("\n"))
    }
}

/// Echo of one invocation, written as TOML next to the command's outputs.
pub struct RunMetadata<'a> {
    pub command: &'a str,
    pub config: Option<&'a Path>,
    pub shared: &'a SharedArgs,
    pub options: toml::Table,
    pub resolved: Option<toml::Table>,
}

impl RunMetadata<'_> {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut doc = toml::Table::new();
        doc.insert("command".into(), self.command.into());
        doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        let argv: Vec<toml::Value> = std::env::args().map(toml::Value::from).collect();
        doc.insert("argv".into(), argv.into());
        if let Some(path) = self.config {
            doc.insert("config".into(), path.display().to_string().into());
        }
        // TOML integers are signed, so the full u64 seed range goes in as text.
        let mut shared = toml::Table::new();
        if let Some(seed) = self.shared.seed {
            shared.insert("seed".into(), seed.to_string().into());
        }
        if let Some(workers) = self.shared.workers {
            shared.insert("workers".into(), (workers as i64).into());
        }
        if let Some(out) = &self.shared.out {
            shared.insert("out".into(), out.display().to_string().into());
        }
        doc.insert("shared".into(), shared.into());
        doc.insert("options".into(), self.options.clone().into());
        if let Some(resolved) = &self.resolved {
            doc.insert("resolved".into(), resolved.clone().into());
        }
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let path = dir.join(RUN_METADATA_FILE);
        fs::write(&path, toml::to_string(&doc)?).with_context(|| format!("cannot write {}", path.display()))
    }
}
