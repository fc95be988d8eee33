//! Binarization and finder-pattern location for axis-aligned symbols.

use crate::RasterImage;

const BLOCK: usize = 8;
const MIN_DYNAMIC_RANGE: u8 = 24;

/// Dark/light classification of every pixel.
#[derive(Debug, Clone)]
pub struct BitMatrix {
    pub width: usize,
    pub height: usize,
    dark: Vec<bool>,
}

impl BitMatrix {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.dark[y * self.width + x]
    }

    /// Samples at a fractional position; out-of-range reads are light.
    pub fn sample(&self, x: f64, y: f64) -> bool {
        if x < 0.0 || y < 0.0 {
            return false;
        }
        let (xi, yi) = (x as usize, y as usize);
        xi < self.width && yi < self.height && self.get(xi, yi)
    }
}

/// Adaptive mean threshold over 8x8 pixel blocks: each block's threshold is
/// the mean of the block averages in the surrounding 5x5 block window.
/// Images too small for the window fall back to one global threshold.
pub fn binarize(image: &RasterImage) -> BitMatrix {
    let (w, h) = (image.width(), image.height());
    let luma = image.to_luma();
    let bw = w.div_ceil(BLOCK);
    let bh = h.div_ceil(BLOCK);
    if bw < 5 || bh < 5 {
        let t = otsu(&luma);
        return BitMatrix { width: w, height: h, dark: luma.iter().map(|&p| p <= t).collect() };
    }

    let mut averages = vec![0u32; bw * bh];
    for by in 0..bh {
        // Edge blocks are shifted inward so every block covers a full 8x8 area
        // when the image allows it.
        let y0 = (by * BLOCK).min(h.saturating_sub(BLOCK));
        for bx in 0..bw {
            let x0 = (bx * BLOCK).min(w.saturating_sub(BLOCK));
            let (mut lo, mut hi, mut sum, mut n) = (255u8, 0u8, 0u32, 0u32);
            for y in y0..(y0 + BLOCK).min(h) {
                for &p in &luma[y * w + x0..y * w + (x0 + BLOCK).min(w)] {
                    lo = lo.min(p);
                    hi = hi.max(p);
                    sum += p as u32;
                    n += 1;
                }
            }
            let mut avg = sum / n;
            if hi - lo <= MIN_DYNAMIC_RANGE {
                // Flat block: assume it is background unless its neighbours
                // say the local threshold is above it.
                avg = lo as u32 / 2;
                if bx > 0 && by > 0 {
                    let neighbours = (averages[(by - 1) * bw + bx]
                        + 2 * averages[by * bw + bx - 1]
                        + averages[(by - 1) * bw + bx - 1])
                        / 4;
                    if (lo as u32) < neighbours {
                        avg = neighbours;
                    }
                }
            }
            averages[by * bw + bx] = avg;
        }
    }

    let mut dark = vec![false; w * h];
    for by in 0..bh {
        let cy = by.clamp(2, bh - 3);
        let y0 = (by * BLOCK).min(h.saturating_sub(BLOCK));
        for bx in 0..bw {
            let cx = bx.clamp(2, bw - 3);
            let mut sum = 0;
            for yy in cy - 2..=cy + 2 {
                for xx in cx - 2..=cx + 2 {
                    sum += averages[yy * bw + xx];
                }
            }
            let threshold = sum / 25;
            let x0 = (bx * BLOCK).min(w.saturating_sub(BLOCK));
            for y in y0..(y0 + BLOCK).min(h) {
                for x in x0..(x0 + BLOCK).min(w) {
                    dark[y * w + x] = (luma[y * w + x] as u32) <= threshold;
                }
            }
        }
    }
    BitMatrix { width: w, height: h, dark }
}

fn otsu(luma: &[u8]) -> u8 {
    let mut hist = [0u64; 256];
    luma.iter().for_each(|&p| hist[p as usize] += 1);
    let total = luma.len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut best_t, mut best_var) = (127u8, -1.0);
    let (mut w0, mut sum0) = (0.0, 0.0);
    for t in 0..255 {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let (m0, m1) = (sum0 / w0, (sum_all - sum0) / w1);
        let var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    best_t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinderCandidate {
    pub x: f64,
    pub y: f64,
    pub module: f64,
    pub hits: usize,
}

fn ratio_ok(counts: &[usize; 5]) -> bool {
    let total: usize = counts.iter().sum();
    if total < 7 {
        return false;
    }
    let m = total as f64 / 7.0;
    let tol = m / 2.0;
    let c = counts.map(|c| c as f64);
    (c[0] - m).abs() < tol
        && (c[1] - m).abs() < tol
        && (c[2] - 3.0 * m).abs() < 3.0 * tol
        && (c[3] - m).abs() < tol
        && (c[4] - m).abs() < tol
}

/// Counts the 1:1:3:1:1 runs through (x, y) along one axis. Returns the
/// refined centre coordinate and the total run length.
fn cross_check(bits: &BitMatrix, x: usize, y: usize, vertical: bool, max_total: usize) -> Option<(f64, usize)> {
    let len = if vertical { bits.height } else { bits.width };
    let at = |i: usize| if vertical { bits.get(x, i) } else { bits.get(i, y) };
    let start = if vertical { y } else { x };
    if !at(start) {
        return None;
    }
    let mut counts = [0usize; 5];

    // Backward from the centre: counts[2] (dark), [1] (light), [0] (dark).
    let mut i = start as isize;
    for (state, want_dark) in [(2usize, true), (1, false), (0, true)] {
        while i >= 0 && at(i as usize) == want_dark {
            counts[state] += 1;
            if counts[state] > max_total {
                return None;
            }
            i -= 1;
        }
        if counts[state] == 0 || (i < 0 && state != 0) {
            return None;
        }
    }
    // Forward.
    let mut j = start + 1;
    for (state, want_dark) in [(2usize, true), (3, false), (4, true)] {
        while j < len && at(j) == want_dark {
            counts[state] += 1;
            if counts[state] > max_total {
                return None;
            }
            j += 1;
        }
        if counts[state] == 0 || (j >= len && state != 4) {
            return None;
        }
    }
    if !ratio_ok(&counts) {
        return None;
    }
    let end = j as f64;
    let centre = end - counts[4] as f64 - counts[3] as f64 - counts[2] as f64 / 2.0;
    Some((centre, counts.iter().sum()))
}

/// All finder-pattern candidates, merged, most frequently confirmed first.
pub fn finder_candidates(bits: &BitMatrix) -> Vec<FinderCandidate> {
    let mut found: Vec<FinderCandidate> = Vec::new();
    for y in 0..bits.height {
        let mut counts = [0usize; 5];
        let mut state = 0usize;
        let mut x = 0;
        while x <= bits.width {
            let dark = x < bits.width && bits.get(x, y);
            if x < bits.width && dark {
                if state % 2 == 1 {
                    state += 1;
                }
                counts[state] += 1;
            } else if state % 2 == 0 {
                if counts[state] == 0 {
                    x += 1;
                    continue;
                }
                if state == 4 {
                    if ratio_ok(&counts) {
                        let total: usize = counts.iter().sum();
                        let cx = x as f64 - counts[4] as f64 - counts[3] as f64 - counts[2] as f64 / 2.0;
                        if let Some(c) = confirm(bits, cx, y, total) {
                            merge(&mut found, c);
                        }
                    }
                    counts = [counts[2], counts[3], counts[4], 1, 0];
                    state = 3;
                } else {
                    state += 1;
                    counts[state] += 1;
                }
            } else {
                counts[state] += 1;
            }
            x += 1;
        }
    }
    found.sort_by(|a, b| b.hits.cmp(&a.hits));
    found
}

fn confirm(bits: &BitMatrix, cx: f64, y: usize, h_total: usize) -> Option<FinderCandidate> {
    let limit = h_total * 2;
    let (cy, v_total) = cross_check(bits, cx as usize, y, true, limit)?;
    if 5 * v_total.abs_diff(h_total) >= 2 * h_total {
        return None;
    }
    let (cx2, h_total2) = cross_check(bits, cx as usize, cy as usize, false, limit)?;
    if 5 * h_total2.abs_diff(h_total) >= 2 * h_total {
        return None;
    }
    Some(FinderCandidate {
        x: cx2,
        y: cy,
        module: (h_total2 + v_total) as f64 / 14.0,
        hits: 1,
    })
}

fn merge(found: &mut Vec<FinderCandidate>, c: FinderCandidate) {
    for f in found.iter_mut() {
        if (f.x - c.x).abs() <= f.module && (f.y - c.y).abs() <= f.module && (f.module - c.module).abs() <= f.module {
            let n = f.hits as f64;
            f.x = (f.x * n + c.x) / (n + 1.0);
            f.y = (f.y * n + c.y) / (n + 1.0);
            f.module = (f.module * n + c.module) / (n + 1.0);
            f.hits += 1;
            return;
        }
    }
    found.push(c);
}

/// Three finder centres of an axis-aligned symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    pub top_left: (f64, f64),
    pub top_right: (f64, f64),
    pub bottom_left: (f64, f64),
    pub module: f64,
}

impl Located {
    /// Side length in modules implied by the finder spacing.
    pub fn estimated_side(&self) -> f64 {
        let dx = self.top_right.0 - self.top_left.0;
        let dy = self.bottom_left.1 - self.top_left.1;
        (dx + dy) / 2.0 / self.module + 7.0
    }
}

/// Candidate finder triples ordered from most to least plausible.
pub fn locate(bits: &BitMatrix) -> Vec<Located> {
    let cands: Vec<FinderCandidate> = finder_candidates(bits).into_iter().take(10).collect();
    let mut triples: Vec<(f64, Located)> = Vec::new();
    for (i, tl) in cands.iter().enumerate() {
        for (j, tr) in cands.iter().enumerate() {
            for (k, bl) in cands.iter().enumerate() {
                if i == j || j == k || i == k {
                    continue;
                }
                let modules = [tl.module, tr.module, bl.module];
                let m = modules.iter().sum::<f64>() / 3.0;
                if modules.iter().any(|&x| (x - m).abs() > 0.35 * m) {
                    continue;
                }
                let dx = tr.x - tl.x;
                let dy = bl.y - tl.y;
                if dx < 10.0 * m || dy < 10.0 * m {
                    continue;
                }
                let skew_tr = (tr.y - tl.y).abs();
                let skew_bl = (bl.x - tl.x).abs();
                if skew_tr > 2.0 * m || skew_bl > 2.0 * m || (dx - dy).abs() > 0.1 * dx.max(dy) {
                    continue;
                }
                let score = (skew_tr + skew_bl + (dx - dy).abs()) / m
                    - 0.01 * (tl.hits + tr.hits + bl.hits) as f64;
                triples.push((
                    score,
                    Located {
                        top_left: (tl.x, tl.y),
                        top_right: (tr.x, tr.y),
                        bottom_left: (bl.x, bl.y),
                        module: m,
                    },
                ));
            }
        }
    }
    triples.sort_by(|a, b| a.0.total_cmp(&b.0));
    triples.into_iter().map(|(_, l)| l).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{encode, render, EcLevel};

    #[test]
    fn finds_three_finders_in_clean_render() {
        let symbol = encode(&[7u8; 100], EcLevel::H).unwrap();
        let img = render(&symbol, 5, 4).unwrap();
        let bits = binarize(&img);
        let found = locate(&bits);
        let best = found.first().expect("symbol located");
        // Finder centres sit 3.5 modules into the symbol.
        let c = (4.0 + 3.5) * 5.0;
        assert!((best.top_left.0 - c).abs() < 1.0 && (best.top_left.1 - c).abs() < 1.0);
        assert!((best.module - 5.0).abs() < 0.5);
        assert!((best.estimated_side() - symbol.side() as f64).abs() < 0.5);
    }

    #[test]
    fn binarize_preserves_clean_render() {
        let symbol = encode(b"binarize", EcLevel::M).unwrap();
        let img = render(&symbol, 4, 4).unwrap();
        let bits = binarize(&img);
        for y in 0..img.height() {
            for x in 0..img.width() {
                assert_eq!(bits.get(x, y), img.luma(x, y) < 128, "({x},{y})");
            }
        }
    }

    #[test]
    fn blank_image_has_no_candidates() {
        let img = RasterImage::filled(200, 200, 1, 255).unwrap();
        assert!(locate(&binarize(&img)).is_empty());
    }
}
