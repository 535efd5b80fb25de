mod evaluate;
mod generate;
mod ingest;
mod inspect;

use std::path::{Path, PathBuf};

use anyhow::{Context as _, Result};
use leafcollage::leafbank::SubsetTag;

use crate::config::{Problems, RunMetadata, SharedArgs};

pub use evaluate::evaluate;
pub use generate::generate;
pub use ingest::ingest;
pub use inspect::inspect;

/// Settings shared by every subcommand after merging flags and config.
pub struct Context<'a> {
    pub config: Option<&'a Path>,
    pub shared: SharedArgs,
}

impl Context<'_> {
    pub fn seed(&self) -> u64 {
        self.shared.seed.unwrap_or(0)
    }

    pub fn out(&self, problems: &mut Problems) -> Option<PathBuf> {
        problems.require(&self.shared.out, "out")
    }

    pub fn workers(&self, problems: &mut Problems) -> usize {
        match self.shared.workers {
            Some(0) => {
                problems.push("--workers must be at least 1");
                1
            }
            Some(n) => n,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn metadata<'b>(
        &'b self,
        command: &'b str,
        options: toml::Table,
        resolved: Option<toml::Table>,
    ) -> RunMetadata<'b> {
        RunMetadata {
            command,
            config: self.config,
            shared: &self.shared,
            options,
            resolved,
        }
    }
}

/// Sizes the global pool used by ingestion and evaluation.
fn init_pool(workers: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .context("cannot start worker pool")
}

fn parse_tag(value: Option<&str>, flag: &str, default: SubsetTag, problems: &mut Problems) -> SubsetTag {
    match value.map(str::parse::<SubsetTag>) {
        None => default,
        Some(Ok(tag)) => tag,
        Some(Err(_)) => {
            problems.push(format!(
                "--{flag} `{}` is not one of A1, A2, A3, A4, custom",
                value.unwrap_or_default()
            ));
            default
        }
    }
}

fn require_dir(problems: &mut Problems, dir: Option<&Path>, what: &str) {
    if let Some(d) = dir {
        if !d.is_dir() {
            problems.push(format!("{what} directory {} does not exist", d.display()));
        }
    }
}

fn reject_flags(problems: &mut Problems, flags: &[(bool, &str)], reason: &str) {
    for (set, flag) in flags {
        if *set {
            problems.push(format!("--{flag} {reason}"));
        }
    }
}
