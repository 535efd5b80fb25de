use std::collections::HashMap;
use std::fs;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use leafcollage::io::{discover_sources, load_annotated, load_image_dir, prepare_backgrounds, read_centers_csv, CropMode};
use leafcollage::leafbank::{
    build_naive_bank, build_structured_bank, DiscardReason, FilterThresholds, SubsetTag,
};
use leafcollage::synth::NaiveParams;
use rayon::prelude::*;

use super::{init_pool, parse_tag, reject_flags, require_dir, Context};
use crate::config::{to_table, Crop, IngestArgs, Kind, Problems};

pub const BACKGROUND_DIR: &str = "backgrounds";

pub fn ingest(ctx: &Context, args: IngestArgs) -> Result<ExitCode> {
    let mut problems = Problems::default();
    let out = ctx.out(&mut problems);
    let workers = ctx.workers(&mut problems);
    let sources = problems.require(&args.sources, "sources");
    require_dir(&mut problems, sources.as_deref(), "sources");
    let kind = args.kind.unwrap_or_default();
    let tag = parse_tag(args.tag.as_deref(), "tag", SubsetTag::Custom, &mut problems);

    let mut thresholds = match kind {
        Kind::Structured => FilterThresholds::default(),
        Kind::Naive => FilterThresholds::naive(),
    };
    if kind == Kind::Naive {
        reject_flags(
            &mut problems,
            &[(args.base_dist_frac.is_some(), "base-dist-frac"), (args.centers.is_some(), "centers")],
            "does not apply to naive banks (loose leaves have no plant center)",
        );
    } else {
        reject_flags(
            &mut problems,
            &[(args.prescale.is_some(), "prescale")],
            "applies only to --kind naive",
        );
    }
    if let Some(f) = args.base_dist_frac {
        if f.is_finite() && f > 0.0 {
            thresholds.base_dist_frac = Some(f);
        } else {
            problems.push(format!("--base-dist-frac must be positive, got {f}"));
        }
    }
    if let Some(f) = args.occlusion_frac {
        if (0.0..=1.0).contains(&f) {
            thresholds.occlusion_frac = f;
        } else {
            problems.push(format!("--occlusion-frac must lie in [0, 1], got {f}"));
        }
    }
    if let Some(a) = args.min_area {
        thresholds.min_area = a;
    }
    let prescale = args.prescale.unwrap_or(NaiveParams::default().prescale_longest_dim);
    if prescale == 0 {
        problems.push("--prescale must be positive");
    }
    if let Some(c) = &args.centers {
        if !c.is_file() {
            problems.push(format!("centers file {} does not exist", c.display()));
        }
    }

    let canvas = match (args.canvas_w, args.canvas_h) {
        (Some(w), Some(h)) if w > 0 && h > 0 => Some((w, h)),
        (Some(_), Some(_)) => {
            problems.push("--canvas-w and --canvas-h must be positive");
            None
        }
        (None, None) => None,
        _ => {
            problems.push("--canvas-w and --canvas-h must be given together");
            None
        }
    };
    require_dir(&mut problems, args.backgrounds.as_deref(), "backgrounds");
    if args.backgrounds.is_none() {
        reject_flags(
            &mut problems,
            &[
                (args.canvas_w.is_some() || args.canvas_h.is_some(), "canvas-w/--canvas-h"),
                (args.crop.is_some(), "crop"),
                (args.allow_resize.is_some(), "allow-resize"),
            ],
            "needs --backgrounds",
        );
    } else if canvas.is_none() {
        reject_flags(
            &mut problems,
            &[(args.crop.is_some(), "crop"), (args.allow_resize.is_some(), "allow-resize")],
            "needs --canvas-w and --canvas-h",
        );
    }
    problems.finish()?;
    let (sources, out) = (sources.unwrap(), out.unwrap());

    let mut resolved = toml::Table::new();
    resolved.insert("kind".into(), kind.to_string().into());
    resolved.insert("tag".into(), tag.to_string().into());
    resolved.insert("thresholds".into(), to_table(&thresholds)?.into());
    if kind == Kind::Naive {
        resolved.insert("prescale".into(), i64::from(prescale).into());
    }
    ctx.metadata("ingest", to_table(&args)?, Some(resolved)).write(&out)?;
    init_pool(workers)?;

    let centers = match &args.centers {
        Some(path) => read_centers_csv(path)?,
        None => HashMap::new(),
    };
    let (records, unpaired) = discover_sources(&sources, tag, &centers)?;
    for id in &unpaired {
        eprintln!("warning: source `{id}` has no label image; skipped");
    }
    if records.is_empty() {
        anyhow::bail!("no `{{id}}_rgb.png` / `{{id}}_label.png` pairs in {}", sources.display());
    }
    let images = records
        .par_iter()
        .map(load_annotated)
        .collect::<leafcollage::Result<Vec<_>>>()?;
    let build = match kind {
        Kind::Structured => build_structured_bank(&images, &thresholds)?,
        Kind::Naive => build_naive_bank(&images, &thresholds, prescale)?,
    };
    for warning in &build.warnings {
        eprintln!("warning: {warning}");
    }
    build.bank.save(&out)?;

    let mut background_count = None;
    if let Some(dir) = &args.backgrounds {
        let loaded = load_image_dir(dir)?;
        if loaded.is_empty() {
            anyhow::bail!("no PNG backgrounds in {}", dir.display());
        }
        let images = match canvas {
            Some(canvas) => {
                let mode = match args.crop.unwrap_or_default() {
                    Crop::Center => CropMode::Center,
                    Crop::Random => CropMode::Random { seed: ctx.seed() },
                };
                prepare_backgrounds(loaded, canvas, mode, args.allow_resize.unwrap_or(false), tag)?.images
            }
            None => loaded,
        };
        let bg_dir = out.join(BACKGROUND_DIR);
        fs::create_dir_all(&bg_dir).with_context(|| format!("cannot create {}", bg_dir.display()))?;
        for bg in &images {
            let path = bg_dir.join(format!("{}.png", bg.id));
            bg.pixels
                .save(&path)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        background_count = Some(images.len());
    }

    let report = &build.report;
    println!("sources: {}", images.len());
    println!("kept: {}", report.kept.len());
    println!("discarded: {}", report.discarded.len());
    for reason in DiscardReason::ALL {
        println!("  {}: {}", reason.as_str(), report.count(reason));
    }
    if let Some(n) = background_count {
        println!("backgrounds: {n}");
    }
    println!("bank: {}", out.display());
    Ok(ExitCode::SUCCESS)
}
