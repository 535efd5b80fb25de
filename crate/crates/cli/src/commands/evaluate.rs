use std::process::ExitCode;

use anyhow::Result;
use leafcollage::metrics::{evaluate_dataset, EvalOptions, AGGREGATE_HEADER};
use leafcollage::MetricsReport;

use super::{init_pool, require_dir, Context};
use crate::config::{to_table, EvaluateArgs, Problems};

pub const PER_IMAGE_FILE: &str = "per_image.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";

pub fn evaluate(ctx: &Context, args: EvaluateArgs) -> Result<ExitCode> {
    let mut problems = Problems::default();
    let out = ctx.out(&mut problems);
    let workers = ctx.workers(&mut problems);
    let pred = problems.require(&args.pred, "pred");
    let gt = problems.require(&args.gt, "gt");
    require_dir(&mut problems, pred.as_deref(), "prediction");
    require_dir(&mut problems, gt.as_deref(), "ground-truth");
    let options = EvalOptions {
        suffix: args.suffix.clone().unwrap_or_else(|| EvalOptions::default().suffix),
    };
    if options.suffix.is_empty() {
        problems.push("--suffix must not be empty");
    }
    problems.finish()?;
    let (out, pred, gt) = (out.unwrap(), pred.unwrap(), gt.unwrap());

    let mut resolved = toml::Table::new();
    resolved.insert("suffix".into(), options.suffix.clone().into());
    ctx.metadata("evaluate", to_table(&args)?, Some(resolved)).write(&out)?;
    init_pool(workers)?;

    let report: MetricsReport = evaluate_dataset(&pred, &gt, &options)?;
    report.write_per_image_csv(&out.join(PER_IMAGE_FILE))?;
    report.write_aggregate_csv(&out.join(AGGREGATE_FILE))?;

    for (name, value) in AGGREGATE_HEADER.iter().zip(report.aggregate_fields()) {
        println!("{name}: {value}");
    }
    if !report.has_missing() {
        return Ok(ExitCode::SUCCESS);
    }
    for id in &report.missing_pred {
        eprintln!("missing prediction: {id}{}", options.suffix);
    }
    for id in &report.missing_gt {
        eprintln!("missing ground truth: {id}{}", options.suffix);
    }
    eprintln!(
        "error: {} image(s) without a counterpart; scores cover the {} matched pair(s)",
        report.missing_pred.len() + report.missing_gt.len(),
        report.records.len()
    );
    Ok(ExitCode::FAILURE)
}
