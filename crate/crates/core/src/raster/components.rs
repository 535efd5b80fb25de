use super::{LabelMap, Mask};

fn find(parent: &mut [u32], mut i: u32) -> u32 {
    while parent[i as usize] != i {
        parent[i as usize] = parent[parent[i as usize] as usize];
        i = parent[i as usize];
    }
    i
}

/// 4-connected component labeling.
///
/// Components are numbered `1..=count` in the raster-scan order of their
/// first pixel; background stays 0.
pub fn connected_components(mask: &Mask) -> (LabelMap, u32) {
    let (w, h) = mask.dimensions();
    let mut provisional = LabelMap::new(w, h);
    // parent[0] is unused so provisional labels index directly.
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let left = if x > 0 { provisional.get(x - 1, y) } else { 0 };
            let up = if y > 0 { provisional.get(x, y - 1) } else { 0 };
            let label = match (left, up) {
                (0, 0) => {
                    let l = parent.len() as u32;
                    parent.push(l);
                    l
                }
                (l, 0) | (0, l) => l,
                (a, b) => {
                    let ra = find(&mut parent, a);
                    let rb = find(&mut parent, b);
                    if ra != rb {
                        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                        parent[hi as usize] = lo;
                    }
                    a.min(b)
                }
            };
            provisional.set(x, y, label);
        }
    }

    // Roots are unioned toward the smaller label, and provisional labels are
    // issued in scan order, so numbering roots on first sight keeps the
    // scan-order guarantee.
    let mut final_label = vec![0u32; parent.len()];
    let mut count = 0;
    let mut out = LabelMap::new(w, h);
    for y in 0..h {
        for x in 0..w {
            let p = provisional.get(x, y);
            if p == 0 {
                continue;
            }
            let root = find(&mut parent, p) as usize;
            if final_label[root] == 0 {
                count += 1;
                final_label[root] = count;
            }
            out.set(x, y, final_label[root]);
        }
    }
    (out, count)
}
