//! End-to-end runs of the `leafcollage` binary on small synthetic sources.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::{Rgb, RgbImage};
use leafcollage::io::write_label_png;
use leafcollage::raster::LabelMap;
use tempfile::TempDir;

const SOURCE_SIZE: u32 = 160;
const BACKGROUND_SIZE: u32 = 1100;

fn leafcollage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leafcollage"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = leafcollage(args);
    assert!(
        out.status.success(),
        "`leafcollage {}` failed:\n{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Rosette labels: `n` lens-shaped leaves radiating from the image center,
/// plus, when `split` is set, one extra label made of two separate blobs.
fn rosette_labels(n: u32, phase: f64, split: bool) -> LabelMap {
    let c = SOURCE_SIZE as f64 / 2.0;
    LabelMap::from_fn(SOURCE_SIZE, SOURCE_SIZE, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        for k in 0..n {
            let theta = phase + 2.0 * PI * k as f64 / n as f64;
            let along = dx * theta.cos() + dy * theta.sin() - 10.0;
            let across = -dx * theta.sin() + dy * theta.cos();
            if (0.0..=60.0).contains(&along) && across.abs() <= 1.0 + 8.0 * (PI * along / 60.0).sin() {
                return k + 1;
            }
        }
        let blob = |x0: u32, y0: u32| (x0..x0 + 12).contains(&x) && (y0..y0 + 12).contains(&y);
        if split && (blob(2, 2) || blob(2, 30)) {
            return n + 1;
        }
        0
    })
}

fn rgb_for(labels: &LabelMap) -> RgbImage {
    RgbImage::from_fn(labels.width(), labels.height(), |x, y| match labels.get(x, y) {
        0 => Rgb([120, 90, 60]),
        l => Rgb([30, 110 + (l * 13 % 100) as u8, 40]),
    })
}

/// Three annotated sources (one with a split label), a centers CSV, and two
/// large backgrounds.
struct Fixture {
    _dir: TempDir,
    root: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().to_path_buf();
        let sources = root.join("sources");
        fs::create_dir_all(&sources).unwrap();
        let mut centers = String::from("source_id,x,y\n");
        for (i, (n, phase, split)) in [(5, 0.1, false), (6, 0.7, true), (7, 1.3, false)].into_iter().enumerate() {
            let id = format!("plant{i}");
            let labels = rosette_labels(n, phase, split);
            rgb_for(&labels).save(sources.join(format!("{id}_rgb.png"))).unwrap();
            write_label_png(&sources.join(format!("{id}_label.png")), &labels).unwrap();
            centers.push_str(&format!("{id},80,80\n"));
        }
        fs::write(root.join("centers.csv"), centers).unwrap();
        let backgrounds = root.join("backgrounds");
        fs::create_dir_all(&backgrounds).unwrap();
        for i in 0..2u32 {
            RgbImage::from_fn(BACKGROUND_SIZE, BACKGROUND_SIZE, |x, y| {
                Rgb([(x / 5 + i * 40) as u8, (y / 5) as u8, 90])
            })
            .save(backgrounds.join(format!("bg{i}.png")))
            .unwrap();
        }
        Self { _dir: dir, root }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn ingest(&self, kind: &str) -> PathBuf {
        let bank = self.path(&format!("bank_{kind}"));
        let (sources, backgrounds, centers) = (self.path("sources"), self.path("backgrounds"), self.path("centers.csv"));
        let mut args = vec!["ingest", "--sources", s(&sources), "--kind", kind, "--backgrounds", s(&backgrounds)];
        if kind == "structured" {
            args.extend(["--centers", s(&centers)]);
        }
        args.extend(["--out", s(&bank)]);
        ok(&args);
        bank
    }
}

fn tree_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if path.is_dir() {
            for (k, v) in tree_bytes(&path) {
                out.insert(format!("{name}/{k}"), v);
            }
        } else {
            out.insert(name, fs::read(&path).unwrap());
        }
    }
    out
}

fn counts(dir: &Path) -> Vec<u32> {
    let mut rdr = csv::Reader::from_path(dir.join("counts.csv")).unwrap();
    rdr.deserialize::<(String, u32)>().map(|r| r.unwrap().1).collect()
}

#[test]
fn ingest_tallies_reasons_and_reruns_byte_identically() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let (sources, centers) = (fx.path("sources"), fx.path("centers.csv"));
    let stdout = ok(&[
        "ingest", "--sources", s(&sources), "--centers", s(&centers), "--out", s(&bank), "--seed", "3",
    ]);
    assert!(stdout.contains("sources: 3"), "{stdout}");
    assert!(stdout.contains("kept: 18"), "{stdout}");
    assert!(stdout.contains("discarded: 1"), "{stdout}");
    assert!(stdout.contains("  multi_component: 1"), "{stdout}");
    assert!(stdout.contains("  occluded: 0"), "{stdout}");

    let index = fs::read_to_string(bank.join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 1 + 18);
    assert!(bank.join("plant0_1.png").is_file());
    assert!(bank.join("backgrounds/bg1.png").is_file());

    let before = tree_bytes(&bank);
    ok(&[
        "ingest", "--sources", s(&sources), "--centers", s(&centers), "--out", s(&bank), "--seed", "3",
    ]);
    assert_eq!(before, tree_bytes(&bank));
}

#[test]
fn ingest_crops_backgrounds_to_a_requested_canvas() {
    let fx = Fixture::new();
    let out = fx.path("bank");
    let (sources, backgrounds) = (fx.path("sources"), fx.path("backgrounds"));
    ok(&[
        "ingest", "--sources", s(&sources), "--backgrounds", s(&backgrounds), "--canvas-w", "448", "--canvas-h",
        "448", "--crop", "random", "--out", s(&out),
    ]);
    let bg = image::open(out.join("backgrounds/bg0.png")).unwrap();
    assert_eq!((bg.width(), bg.height()), (448, 448));
}

#[test]
fn generate_a1_gives_ten_scenes_with_table_counts() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let data = fx.path("a1");
    let stdout = ok(&[
        "generate", "--bank", s(&bank), "--preset", "A1", "--count", "10", "--seed", "7", "--out", s(&data),
    ]);
    assert!(stdout.contains("generated 10 structured scenes"), "{stdout}");
    assert!(stdout.contains("(seed 7)"), "{stdout}");
    assert!(stdout.contains("train_w = 512"), "{stdout}");

    let n = counts(&data);
    assert_eq!(n.len(), 10);
    assert!(n.iter().all(|c| (5..=25).contains(c)), "{n:?}");
    for i in 0..10 {
        let rgb = image::open(data.join(format!("scene_{i:06}_rgb.png"))).unwrap();
        assert_eq!((rgb.width(), rgb.height()), (512, 512));
        assert!(data.join(format!("scene_{i:06}_manifest.json")).is_file());
    }
    let meta = fs::read_to_string(data.join("run_metadata.txt")).unwrap();
    assert!(meta.contains("command = \"generate\""), "{meta}");
    assert!(meta.contains("--preset"), "{meta}");
    assert!(meta.contains("seed = \"7\""), "{meta}");
}

#[test]
fn generate_is_reproducible_across_runs_and_worker_counts() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let trees: Vec<_> = ["1", "3", "3"]
        .iter()
        .enumerate()
        .map(|(i, workers)| {
            let data = fx.path(&format!("run{i}"));
            ok(&[
                "generate", "--bank", s(&bank), "--preset", "A2", "--count", "6", "--seed", "11", "--workers",
                workers, "--out", s(&data),
            ]);
            let mut tree = tree_bytes(&data);
            // The run record echoes argv, which names the output directory.
            tree.remove("run_metadata.txt").expect("run metadata written");
            tree
        })
        .collect();
    assert_eq!(trees[0].len(), 6 * 4 + 1);
    assert_eq!(trees[0], trees[1]);
    assert_eq!(trees[1], trees[2]);

    let other = fx.path("other_seed");
    ok(&["generate", "--bank", s(&bank), "--preset", "A2", "--count", "6", "--seed", "12", "--out", s(&other)]);
    assert_ne!(tree_bytes(&other).get("scene_000000_label.png"), trees[0].get("scene_000000_label.png"));
}

#[test]
fn naive_generation_uses_the_1024_canvas() {
    let fx = Fixture::new();
    let bank = fx.ingest("naive");
    let index = fs::read_to_string(bank.join("index.csv")).unwrap();
    assert!(index.lines().skip(1).all(|l| l.ends_with(",false")), "{index}");
    let data = fx.path("naive");
    ok(&["generate", "--bank", s(&bank), "--kind", "naive", "--count", "1", "--out", s(&data)]);
    let rgb = image::open(data.join("scene_000000_rgb.png")).unwrap();
    assert_eq!((rgb.width(), rgb.height()), (1024, 1024));
    assert_eq!(counts(&data).len(), 1);
}

#[test]
fn naive_prescale_is_carried_from_ingest_to_generate() {
    let fx = Fixture::new();
    let bank = fx.path("small_naive");
    let sources = fx.path("sources");
    let backgrounds = fx.path("backgrounds");
    ok(&[
        "ingest", "--sources", s(&sources), "--kind", "naive", "--prescale", "120", "--backgrounds",
        s(&backgrounds), "--out", s(&bank),
    ]);
    let leaf = image::open(bank.join("plant0_1.png")).unwrap();
    assert_eq!(leaf.width().max(leaf.height()), 120);

    let data = fx.path("naive");
    let out = leafcollage(&["generate", "--bank", s(&bank), "--kind", "naive", "--out", s(&data)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("prescaled to 600 px"));
    ok(&["generate", "--bank", s(&bank), "--kind", "naive", "--prescale", "120", "--out", s(&data)]);
    assert_eq!(counts(&data).len(), 1);
}

#[test]
fn config_file_supplies_values_and_flags_override_them() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let data = fx.path("custom");
    let config = fx.path("run.toml");
    fs::write(
        &config,
        format!(
            "seed = 5\nout = \"{}\"\n\n[generate]\nbank = \"{}\"\npreset = \"custom\"\ntrain_w = 256\ntrain_h = 192\nleaves_min = 4\nleaves_max = 6\ncount = 2\nzero_jitter = true\n",
            s(&data),
            s(&bank)
        ),
    )
    .unwrap();
    ok(&["generate", "--config", s(&config), "--count", "3"]);
    assert_eq!(counts(&data).len(), 3);
    let rgb = image::open(data.join("scene_000002_rgb.png")).unwrap();
    assert_eq!((rgb.width(), rgb.height()), (256, 192));
    let manifest = fs::read_to_string(data.join("scene_000000_manifest.json")).unwrap();
    assert!(manifest.contains("\"global_seed\":5") || manifest.contains("\"global_seed\": 5"), "{manifest}");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let fx = Fixture::new();
    let config = fx.path("bad.toml");
    fs::write(&config, "[generate]\npreset = \"A1\"\nleaf_count = 12\n").unwrap();
    let out = leafcollage(&["generate", "--config", s(&config), "--out", s(&fx.path("x"))]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("leaf_count"), "{stderr}");
    assert!(!fx.path("x").exists());
}

#[test]
fn validation_lists_every_problem_at_once() {
    let out = leafcollage(&["generate", "--kind", "naive", "--preset", "A2", "--count", "0", "--scale-min", "2"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    for needle in [
        "--out is required",
        "--bank is required",
        "--count must be at least 1",
        "--preset applies only to --kind structured",
        "scale range",
    ] {
        assert!(stderr.contains(needle), "missing `{needle}` in:\n{stderr}");
    }

    let out = leafcollage(&["generate", "--preset", "B7", "--leaves-min", "9", "--leaves-max", "3", "--out", "/nonexistent/x"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(!out.status.success());
    assert!(stderr.contains("`B7` is not one of"), "{stderr}");
    assert!(stderr.contains("leaves_min 9 exceeds leaves_max 3"), "{stderr}");
}

fn aggregate_csv(dir: &Path) -> Vec<(String, String)> {
    let text = fs::read_to_string(dir.join("aggregate.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let values: Vec<&str> = lines.next().unwrap().split(',').collect();
    header.into_iter().zip(values).map(|(h, v)| (h.to_string(), v.to_string())).collect()
}

fn console_pairs(stdout: &str) -> Vec<(String, String)> {
    stdout
        .lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn evaluating_ground_truth_against_itself_is_perfect() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let data = fx.path("data");
    ok(&["generate", "--bank", s(&bank), "--count", "4", "--seed", "2", "--out", s(&data)]);
    let report = fx.path("report");
    let stdout = ok(&["evaluate", "--pred", s(&data), "--gt", s(&data), "--out", s(&report)]);
    let console = console_pairs(&stdout);
    assert_eq!(console, aggregate_csv(&report));
    let get = |k: &str| console.iter().find(|(n, _)| n == k).unwrap().1.parse::<f64>().unwrap();
    assert_eq!(get("images"), 4.0);
    assert_eq!(get("best_dice"), 1.0);
    assert_eq!(get("fgbg_dice"), 1.0);
    assert_eq!(get("diff_fg"), 0.0);
    assert_eq!(get("abs_diff_fg"), 0.0);
    let per_image = fs::read_to_string(report.join("per_image.csv")).unwrap();
    assert_eq!(per_image.lines().count(), 5);
}

#[test]
fn mismatched_trees_list_missing_files_and_fail() {
    let fx = Fixture::new();
    let (pred, gt) = (fx.path("pred"), fx.path("gt"));
    fs::create_dir_all(&pred).unwrap();
    fs::create_dir_all(&gt).unwrap();
    let labels = LabelMap::from_fn(8, 8, |x, _| u32::from(x > 3));
    for id in ["a", "b", "c"] {
        write_label_png(&gt.join(format!("{id}_label.png")), &labels).unwrap();
    }
    for id in ["a", "d"] {
        write_label_png(&pred.join(format!("{id}_label.png")), &labels).unwrap();
    }
    let report = fx.path("report");
    let out = leafcollage(&["evaluate", "--pred", s(&pred), "--gt", s(&gt), "--out", s(&report)]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing prediction: b_label.png"), "{stderr}");
    assert!(stderr.contains("missing prediction: c_label.png"), "{stderr}");
    assert!(stderr.contains("missing ground truth: d_label.png"), "{stderr}");
    assert!(report.join("per_image.csv").is_file());
}

#[test]
fn console_numbers_match_csv_on_a_hand_built_pair() {
    let fx = Fixture::new();
    let (pred, gt) = (fx.path("pred"), fx.path("gt"));
    fs::create_dir_all(&pred).unwrap();
    fs::create_dir_all(&gt).unwrap();
    // gt: two 4x8 halves. pred: one of them, plus a shifted copy of the other.
    let g = LabelMap::from_fn(8, 8, |x, _| if x < 4 { 1 } else { 2 });
    let p = LabelMap::from_fn(8, 8, |x, y| if x < 4 { 5 } else if y > 0 { 9 } else { 0 });
    write_label_png(&gt.join("t_label.png"), &g).unwrap();
    write_label_png(&pred.join("t_label.png"), &p).unwrap();
    write_label_png(&gt.join("u_label.png"), &g).unwrap();
    write_label_png(&pred.join("u_label.png"), &LabelMap::from_fn(8, 8, |x, _| u32::from(x < 4))).unwrap();

    let report = fx.path("report");
    let stdout = ok(&["evaluate", "--pred", s(&pred), "--gt", s(&gt), "--out", s(&report)]);
    let console = console_pairs(&stdout);
    assert_eq!(console, aggregate_csv(&report));
    let get = |k: &str| console.iter().find(|(n, _)| n == k).unwrap().1.parse::<f64>().unwrap();
    // t: counts 2 vs 2; u: 1 vs 2.
    assert_eq!(get("diff_fg"), -0.5);
    assert_eq!(get("abs_diff_fg"), 0.5);
    // t: 1 and 2*28/(28+32); u: min(1, (1 + 0)/2).
    let t = (1.0 + 56.0 / 60.0) / 2.0;
    assert!((get("best_dice") - (t + 0.5) / 2.0).abs() < 1e-12);
}

#[test]
fn inspect_writes_an_overlay_the_size_of_the_scene() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let data = fx.path("data");
    ok(&["generate", "--bank", s(&bank), "--preset", "A4", "--count", "1", "--out", s(&data)]);
    let previews = fx.path("previews");
    let stdout = ok(&["inspect", s(&data.join("scene_000000_rgb.png")), "--out", s(&previews)]);
    assert!(stdout.contains("448x448"), "{stdout}");
    let overlay = image::open(previews.join("scene_000000_overlay.png")).unwrap().to_rgb8();
    let rgb = image::open(data.join("scene_000000_rgb.png")).unwrap().to_rgb8();
    assert_eq!(overlay.dimensions(), rgb.dimensions());
    assert_ne!(overlay, rgb);
    assert!(previews.join("run_metadata.txt").is_file());
}

#[test]
fn inspecting_an_empty_scene_leaves_the_rgb_untouched() {
    let fx = Fixture::new();
    let dir = fx.path("scene");
    fs::create_dir_all(&dir).unwrap();
    let rgb = RgbImage::from_fn(40, 30, |x, y| Rgb([x as u8 * 6, y as u8 * 8, 77]));
    rgb.save(dir.join("empty_rgb.png")).unwrap();
    write_label_png(&dir.join("empty_label.png"), &LabelMap::new(40, 30)).unwrap();
    let previews = fx.path("previews");
    ok(&["inspect", s(&dir.join("empty")), "--out", s(&previews)]);
    let overlay = image::open(previews.join("empty_overlay.png")).unwrap().to_rgb8();
    assert_eq!(overlay, rgb);

    let out = leafcollage(&["inspect", s(&dir.join("nothing")), "--out", s(&previews)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nothing_rgb.png"));
}

#[test]
fn run_metadata_echoes_flags_even_for_huge_seeds() {
    let fx = Fixture::new();
    let bank = fx.ingest("structured");
    let data = fx.path("data");
    let seed = u64::MAX.to_string();
    ok(&[
        "generate", "--bank", s(&bank), "--preset", "A4", "--zero-jitter", "--count", "1", "--seed", &seed,
        "--out", s(&data),
    ]);
    let meta: toml::Table = fs::read_to_string(data.join("run_metadata.txt")).unwrap().parse().unwrap();
    assert_eq!(meta["command"].as_str(), Some("generate"));
    assert_eq!(meta["shared"]["seed"].as_str(), Some(seed.as_str()));
    assert_eq!(meta["options"]["preset"].as_str(), Some("A4"));
    assert_eq!(meta["options"]["zero_jitter"].as_bool(), Some(true));
    assert_eq!(meta["resolved"]["params"]["train_w"].as_integer(), Some(448));
    let argv: Vec<&str> = meta["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(argv.contains(&"--zero-jitter"));
}
