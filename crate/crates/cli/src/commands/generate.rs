use std::process::ExitCode;

use anyhow::Result;
use leafcollage::geometry::Pixel;
use leafcollage::io::{load_image_dir, prepare_backgrounds, CropMode};
use leafcollage::leafbank::{LeafBank, SubsetTag, BANK_INDEX_FILE};
use leafcollage::synth::{generate_batch, BatchSpec, GeneratorConfig, LeafOrder, NaiveParams, SubsetParams};
use leafcollage::Angles;

use super::ingest::BACKGROUND_DIR;
use super::{parse_tag, reject_flags, require_dir, Context};
use crate::config::{to_table, GenerateArgs, Kind, Order, Problems};

const STRUCTURED_ONLY: &str = "applies only to --kind structured";
const NAIVE_ONLY: &str = "applies only to --kind naive";

pub fn generate(ctx: &Context, args: GenerateArgs) -> Result<ExitCode> {
    let mut problems = Problems::default();
    let out = ctx.out(&mut problems);
    let workers = ctx.workers(&mut problems);
    let seed = ctx.seed();
    let bank_dir = problems.require(&args.bank, "bank");
    if let Some(dir) = &bank_dir {
        if !dir.join(BANK_INDEX_FILE).is_file() {
            problems.push(format!("{} is not a leaf bank (no {BANK_INDEX_FILE})", dir.display()));
        }
    }
    let background_dir = args
        .backgrounds
        .clone()
        .or_else(|| bank_dir.as_ref().map(|b| b.join(BACKGROUND_DIR)));
    require_dir(&mut problems, background_dir.as_deref(), "backgrounds");
    let count = args.count.unwrap_or(1);
    if count == 0 {
        problems.push("--count must be at least 1");
    }
    let kind = args.kind.unwrap_or_default();
    let config = match kind {
        Kind::Structured => structured_params(&args, &mut problems).map(GeneratorConfig::Structured),
        Kind::Naive => Some(GeneratorConfig::Naive(naive_params(&args, &mut problems))),
    };
    problems.finish()?;
    let (out, bank_dir, background_dir) = (out.unwrap(), bank_dir.unwrap(), background_dir.unwrap());
    let config = config.expect("validated above");

    let (canvas, tag, params) = match &config {
        GeneratorConfig::Structured(p) => (p.canvas(), p.tag, to_table(p)?),
        GeneratorConfig::Naive(p) => (p.canvas(), SubsetTag::Custom, to_table(p)?),
    };
    let mut resolved = toml::Table::new();
    resolved.insert("kind".into(), kind.to_string().into());
    resolved.insert("count".into(), (count as i64).into());
    resolved.insert("seed".into(), seed.to_string().into());
    resolved.insert("params".into(), params.clone().into());
    ctx.metadata("generate", to_table(&args)?, Some(resolved)).write(&out)?;

    let bank = LeafBank::load(&bank_dir)?;
    let sources = load_image_dir(&background_dir)?;
    let backgrounds = prepare_backgrounds(
        sources,
        canvas,
        CropMode::Center,
        args.allow_resize.unwrap_or(false),
        tag,
    )?;
    let spec = BatchSpec {
        config,
        count,
        global_seed: seed,
        workers,
    };
    let outcome = generate_batch(&spec, &bank, &backgrounds.images, &out)?;

    let visible: Vec<u32> = outcome.counts.iter().map(|(_, n)| *n).collect();
    let mean = visible.iter().map(|&n| n as f64).sum::<f64>() / visible.len() as f64;
    println!("generated {count} {kind} scenes into {} (seed {seed})", out.display());
    println!(
        "visible leaves per scene: min {}, mean {mean:.2}, max {}",
        visible.iter().min().unwrap(),
        visible.iter().max().unwrap()
    );
    println!("leaf bank: {} leaves; backgrounds: {}", bank.len(), backgrounds.images.len());
    println!("parameters:");
    for line in toml::to_string(&params)?.lines().filter(|l| !l.is_empty()) {
        println!("  {line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn structured_params(args: &GenerateArgs, problems: &mut Problems) -> Option<SubsetParams> {
    reject_flags(
        problems,
        &[
            (args.canvas_w.is_some(), "canvas-w"),
            (args.canvas_h.is_some(), "canvas-h"),
            (args.scale_min.is_some(), "scale-min"),
            (args.scale_max.is_some(), "scale-max"),
            (args.prescale.is_some(), "prescale"),
        ],
        NAIVE_ONLY,
    );
    let tag = parse_tag(args.preset.as_deref(), "preset", SubsetTag::A1, problems);
    let mut params = match SubsetParams::preset(tag) {
        Some(p) => p,
        None => {
            // A custom subset has no preset to fall back on.
            let train_w = problems.require(&args.train_w, "train-w (custom preset)");
            let train_h = problems.require(&args.train_h, "train-h (custom preset)");
            let leaves_min = problems.require(&args.leaves_min, "leaves-min (custom preset)");
            let leaves_max = problems.require(&args.leaves_max, "leaves-max (custom preset)");
            let (train_w, train_h) = (train_w?, train_h?);
            SubsetParams {
                tag,
                train_w,
                train_h,
                center: Pixel::new(train_w / 2, train_h / 2),
                center_delta_w: 0,
                center_delta_h: 0,
                leaves_min: leaves_min?,
                leaves_max: leaves_max?,
                schedule: Angles::default(),
                min_visible: 50,
                order: LeafOrder::Random,
            }
        }
    };
    if let Some(w) = args.train_w {
        params.train_w = w;
        params.center.x = w / 2;
    }
    if let Some(h) = args.train_h {
        params.train_h = h;
        params.center.y = h / 2;
    }
    set(&mut params.center.x, args.center_x);
    set(&mut params.center.y, args.center_y);
    set(&mut params.center_delta_w, args.center_delta_w);
    set(&mut params.center_delta_h, args.center_delta_h);
    set(&mut params.leaves_min, args.leaves_min);
    set(&mut params.leaves_max, args.leaves_max);
    set(&mut params.min_visible, args.min_visible);
    let schedule = &mut params.schedule;
    set(&mut schedule.within_triad_mean, args.within_triad_mean);
    set(&mut schedule.within_triad_jitter, args.within_triad_jitter);
    set(&mut schedule.triad_offset_base, args.triad_offset_base);
    set(&mut schedule.triad_offset_jitter_base, args.triad_offset_jitter_base);
    set(&mut schedule.zero_jitter, args.zero_jitter);
    if let Some(order) = args.order {
        params.order = match order {
            Order::Random => LeafOrder::Random,
            Order::AreaDescending => LeafOrder::AreaDescending,
        };
    }
    problems.check(params.validate());
    Some(params)
}

fn naive_params(args: &GenerateArgs, problems: &mut Problems) -> NaiveParams {
    reject_flags(
        problems,
        &[
            (args.preset.is_some(), "preset"),
            (args.train_w.is_some(), "train-w"),
            (args.train_h.is_some(), "train-h"),
            (args.center_x.is_some(), "center-x"),
            (args.center_y.is_some(), "center-y"),
            (args.center_delta_w.is_some(), "center-delta-w"),
            (args.center_delta_h.is_some(), "center-delta-h"),
            (args.within_triad_mean.is_some(), "within-triad-mean"),
            (args.within_triad_jitter.is_some(), "within-triad-jitter"),
            (args.triad_offset_base.is_some(), "triad-offset-base"),
            (args.triad_offset_jitter_base.is_some(), "triad-offset-jitter-base"),
            (args.zero_jitter.is_some(), "zero-jitter"),
            (args.order.is_some(), "order"),
        ],
        STRUCTURED_ONLY,
    );
    let mut params = NaiveParams::default();
    set(&mut params.canvas_w, args.canvas_w);
    set(&mut params.canvas_h, args.canvas_h);
    set(&mut params.leaves_min, args.leaves_min);
    set(&mut params.leaves_max, args.leaves_max);
    set(&mut params.scale_min, args.scale_min);
    set(&mut params.scale_max, args.scale_max);
    set(&mut params.min_visible, args.min_visible);
    set(&mut params.prescale_longest_dim, args.prescale);
    problems.check(params.validate());
    params
}

fn set<T>(field: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *field = v;
    }
}
