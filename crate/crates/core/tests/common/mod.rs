//! Synthetic rosettes, backgrounds and banks shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use image::{Rgb, RgbImage};
use leafcollage::io::Background;
use leafcollage::leafbank::{
    build_naive_bank, build_structured_bank, AnnotatedImage, FilterThresholds, LeafBank, SubsetTag,
};
use leafcollage::raster::{composite_leaf, connected_components, LabelMap, Scene};
use leafcollage::synth::SceneManifest;
use leafcollage::{Placement, Point2};

/// Cheap deterministic per-pixel noise.
pub fn hash(a: u32, b: u32, c: u32) -> u32 {
    let mut h = a.wrapping_mul(0x9E37_79B1) ^ b.wrapping_mul(0x85EB_CA77) ^ c.wrapping_mul(0xC2B2_AE3D);
    h ^= h >> 15;
    h = h.wrapping_mul(0x2C1B_3C6D);
    h ^= h >> 12;
    h
}

/// A top-down rosette: lens-shaped leaves radiating from a center, painted in
/// order so later leaves cover earlier ones.
#[derive(Clone, Debug)]
pub struct Rosette {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub center: (f64, f64),
    pub leaves: u32,
    pub phase_deg: f64,
    /// Distance from the center to each leaf base.
    pub inner: f64,
    pub length: f64,
    pub half_width: f64,
    pub tag: SubsetTag,
}

impl Rosette {
    pub fn new(id: &str, width: u32, height: u32) -> Self {
        Self {
            id: id.to_string(),
            width,
            height,
            center: (width as f64 / 2.0, height as f64 / 2.0),
            leaves: 6,
            phase_deg: 0.0,
            inner: 6.0,
            length: 70.0,
            half_width: 14.0,
            tag: SubsetTag::A1,
        }
    }

    /// Leaf `k` direction in degrees, counter-clockwise on screen.
    pub fn leaf_angle(&self, k: u32) -> f64 {
        self.phase_deg + k as f64 * 360.0 / self.leaves as f64
    }

    /// Label (1-based) painted at a pixel, before occlusion by later leaves.
    fn covers(&self, k: u32, x: u32, y: u32) -> bool {
        let a = self.leaf_angle(k).to_radians();
        let (ux, uy) = (a.cos(), -a.sin());
        let dx = x as f64 - self.center.0;
        let dy = y as f64 - self.center.1;
        let t = dx * ux + dy * uy - self.inner;
        let s = -dx * uy + dy * ux;
        t >= 0.0 && t <= self.length && s.abs() <= self.half_width * (std::f64::consts::PI * t / self.length).sin()
    }

    /// Painted labels, each reduced to its largest 4-connected piece the way
    /// a hand annotation would be (thin rasterized tips can otherwise hang
    /// on by a diagonal).
    pub fn labels(&self) -> LabelMap {
        let mut labels = LabelMap::from_fn(self.width, self.height, |x, y| {
            (0..self.leaves).rev().find(|&k| self.covers(k, x, y)).map_or(0, |k| k + 1)
        });
        for label in labels.instances() {
            let (pieces, n) = connected_components(&labels.mask_of(label));
            if n < 2 {
                continue;
            }
            let mut sizes = vec![0usize; n as usize + 1];
            for &p in pieces.as_slice() {
                sizes[p as usize] += 1;
            }
            let keep = (1..=n as usize).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))).unwrap() as u32;
            for (l, &p) in labels.as_mut_slice().iter_mut().zip(pieces.as_slice()) {
                if p != 0 && p != keep {
                    *l = 0;
                }
            }
        }
        labels
    }

    pub fn render(&self) -> AnnotatedImage {
        let labels = self.labels();
        let seed = hash(self.id.len() as u32, self.leaves, self.width);
        let pixels = RgbImage::from_fn(self.width, self.height, |x, y| {
            let n = hash(x, y, seed);
            match labels.get(x, y) {
                0 => Rgb([90 + (n % 30) as u8, 60 + (n >> 8) as u8 % 20, 40]),
                l => Rgb([20 + (l * 13 % 40) as u8, 110 + (n % 90) as u8, 30 + (n >> 16) as u8 % 30]),
            }
        });
        AnnotatedImage::new(
            pixels,
            labels,
            Some(Point2::new(self.center.0, self.center.1)),
            self.id.clone(),
            self.tag,
        )
        .expect("fixture dimensions agree")
    }
}

/// `count` varied, non-overlapping rosettes on `size`x`size` rasters.
pub fn rosettes(count: u32, size: u32, tag: SubsetTag) -> Vec<AnnotatedImage> {
    (0..count)
        .map(|i| {
            let mut r = Rosette::new(&format!("plant{i:02}"), size, size);
            r.leaves = 5 + i % 4;
            r.phase_deg = (i * 37 % 360) as f64;
            r.length = size as f64 * (0.28 + 0.04 * (i % 4) as f64);
            r.half_width = r.length * (0.14 + 0.02 * (i % 3) as f64);
            r.center = (size as f64 / 2.0 + (i % 3) as f64 - 1.0, size as f64 / 2.0 - (i % 2) as f64);
            r.tag = tag;
            r.render()
        })
        .collect()
}

/// Textured soil-like backgrounds of the given size.
pub fn backgrounds(count: u32, width: u32, height: u32) -> Vec<Background> {
    (0..count)
        .map(|i| Background {
            id: format!("bg{i}"),
            pixels: RgbImage::from_fn(width, height, |x, y| {
                let n = hash(x / 3, y / 3, i + 1);
                Rgb([70 + (n % 40) as u8, 50 + (n >> 8) as u8 % 30, 30 + (i * 20) as u8])
            }),
        })
        .collect()
}

pub fn structured_bank() -> LeafBank {
    let build = build_structured_bank(&rosettes(8, 256, SubsetTag::A1), &FilterThresholds::default())
        .expect("fixture bank builds");
    assert!(build.bank.len() >= 30, "fixture bank unexpectedly small");
    build.bank
}

pub fn naive_bank() -> LeafBank {
    let build = build_naive_bank(&rosettes(4, 256, SubsetTag::Custom), &FilterThresholds::naive(), 600)
        .expect("fixture bank builds");
    assert!(build.bank.len() >= 15, "fixture bank unexpectedly small");
    build.bank
}

/// Independent label oracle for a generated scene: each placement is
/// composited alone to find the pixels it covers, every pixel takes the
/// highest covering z, and placements with too few visible pixels are
/// dropped and the rest renumbered in z order.
pub fn oracle_labels(manifest: &SceneManifest, bank: &LeafBank) -> LabelMap {
    let (w, h) = (manifest.width, manifest.height);
    let mut top = LabelMap::new(w, h);
    for p in &manifest.placements {
        let leaf = bank.get(&p.leaf_id).expect("placement leaf in bank");
        let mut alone = Scene::new(RgbImage::new(w, h));
        composite_leaf(&mut alone, leaf, &Placement { z: 1, ..p.clone() }).unwrap();
        for (t, &c) in top.as_mut_slice().iter_mut().zip(alone.labels.as_slice()) {
            if c != 0 {
                *t = p.z;
            }
        }
    }
    let mut areas = vec![0usize; manifest.placements.len() + 1];
    for &l in top.as_slice() {
        areas[l as usize] += 1;
    }
    let mut renumber = vec![0u32; areas.len()];
    let mut next = 0;
    for z in 1..areas.len() {
        if areas[z] >= manifest.min_visible as usize && areas[z] > 0 {
            next += 1;
            renumber[z] = next;
        }
    }
    for l in top.as_mut_slice() {
        *l = renumber[*l as usize];
    }
    top
}

/// Every file under `dir` with its bytes, keyed by relative path.
pub fn tree_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_file() {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            out.insert(name, std::fs::read(&path).unwrap());
        }
    }
    out
}

/// Wrapped difference `b - a` in `[0, 360)`.
pub fn step(a: f64, b: f64) -> f64 {
    (b - a).rem_euclid(360.0)
}

/// Reference implementations working directly on raw label slices.
pub mod brute {
    pub fn dice_of(a: &[u32], la: u32, b: &[u32], lb: u32) -> f64 {
        let (mut inter, mut na, mut nb) = (0usize, 0usize, 0usize);
        for (&x, &y) in a.iter().zip(b) {
            let (ia, ib) = (x == la, y == lb);
            na += ia as usize;
            nb += ib as usize;
            inter += (ia && ib) as usize;
        }
        if na + nb == 0 { 1.0 } else { 2.0 * inter as f64 / (na + nb) as f64 }
    }

    pub fn labels(v: &[u32]) -> Vec<u32> {
        let mut l: Vec<u32> = v.iter().copied().filter(|&x| x != 0).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Mean over `b`'s instances of the best Dice against any of `a`'s.
    pub fn directional(a: &[u32], b: &[u32]) -> f64 {
        let (la, lb) = (labels(a), labels(b));
        let total: f64 = lb
            .iter()
            .map(|&j| la.iter().map(|&i| dice_of(a, i, b, j)).fold(0.0, f64::max))
            .sum();
        total / lb.len() as f64
    }

    pub fn best_dice(pred: &[u32], gt: &[u32]) -> (f64, f64, f64) {
        let (np, ng) = (labels(pred).len(), labels(gt).len());
        if np == 0 || ng == 0 {
            let v = if np == ng { 1.0 } else { 0.0 };
            return (v, v, v);
        }
        let p2g = directional(pred, gt);
        let g2p = directional(gt, pred);
        (p2g, g2p, p2g.min(g2p))
    }

    pub fn fgbg(pred: &[u32], gt: &[u32]) -> f64 {
        let bin = |v: &[u32]| v.iter().map(|&x| u32::from(x != 0)).collect::<Vec<_>>();
        dice_of(&bin(pred), 1, &bin(gt), 1)
    }
}
