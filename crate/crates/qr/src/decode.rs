use crate::bits::BitReader;
use crate::detect::{binarize, locate, BitMatrix, Located};
use crate::layout::{format_positions, format_word, mask_applies, version_word, FunctionPatterns};
use crate::tables::BlockLayout;
use crate::{reed_solomon, EcLevel, QrError, QrSymbol, RasterImage, Version};

/// Decodes the single symbol in `image`.
pub fn decode(image: &RasterImage) -> Result<Vec<u8>, QrError> {
    let bits = binarize(image);
    let candidates = locate(&bits);
    if candidates.is_empty() {
        return Err(QrError::NoSymbolFound);
    }
    let mut worst = QrError::NoSymbolFound;
    for located in candidates.iter().take(4) {
        match decode_located(&bits, located) {
            Ok(payload) => return Ok(payload),
            Err(e) => {
                if severity(&e) > severity(&worst) {
                    worst = e;
                }
            }
        }
    }
    Err(worst)
}

/// How far decoding progressed before failing; the furthest error is reported.
fn severity(e: &QrError) -> u8 {
    match e {
        QrError::NoSymbolFound => 0,
        QrError::VersionInfoUnreadable => 1,
        QrError::FormatInfoUnreadable => 2,
        QrError::UnrecoverableErrors { .. } => 3,
        QrError::MalformedData(_) => 4,
        _ => 0,
    }
}

/// Decodes a module matrix directly, skipping image analysis.
pub fn decode_symbol(symbol: &QrSymbol) -> Result<Vec<u8>, QrError> {
    let grid: Vec<bool> = symbol.rows().flatten().copied().collect();
    decode_grid(symbol.version(), &grid)
}

fn decode_located(bits: &BitMatrix, loc: &Located) -> Result<Vec<u8>, QrError> {
    let estimated = ((loc.estimated_side() - 17.0) / 4.0).round() as i32;
    let mut versions: Vec<Version> = Vec::new();
    if estimated >= 7 {
        versions.extend(read_version(bits, loc));
    }
    for delta in [0, 1, -1, 2, -2] {
        let n = estimated + delta;
        if (1..=40).contains(&n) {
            let v = Version(n as u8);
            if !versions.contains(&v) {
                versions.push(v);
            }
        }
    }
    if versions.is_empty() {
        return Err(QrError::NoSymbolFound);
    }

    // Versions whose timing pattern has the expected number of modules go first.
    let mut grids: Vec<(bool, Version, Vec<bool>)> = versions
        .into_iter()
        .map(|v| {
            let (grid, timing_ok) = sample_grid(bits, loc, v);
            (timing_ok, v, grid)
        })
        .collect();
    grids.sort_by_key(|(ok, _, _)| !ok);

    let mut worst = QrError::NoSymbolFound;
    for (_, version, grid) in grids {
        match decode_grid(version, &grid) {
            Ok(payload) => return Ok(payload),
            Err(e) if severity(&e) > severity(&worst) => worst = e,
            Err(_) => {}
        }
    }
    Err(worst)
}

fn sample_grid(bits: &BitMatrix, loc: &Located, version: Version) -> (Vec<bool>, bool) {
    let side = version.side();
    let span = (side - 7) as f64;
    let pitch_x = (loc.top_right.0 - loc.top_left.0) / span;
    let pitch_y = (loc.bottom_left.1 - loc.top_left.1) / span;
    // Residual skew between the finder rows/columns.
    let slope_x = (loc.top_right.1 - loc.top_left.1) / span;
    let slope_y = (loc.bottom_left.0 - loc.top_left.0) / span;

    let uniform = |k: usize, origin: f64, pitch: f64| origin + (k as f64 - 3.0) * pitch;
    let row6_y = uniform(6, loc.top_left.1, pitch_y);
    let col6_x = uniform(6, loc.top_left.0, pitch_x);
    let (xs, x_ok) = timing_centres(side, pitch_x, |k| uniform(k, loc.top_left.0, pitch_x), |p| bits.sample(p, row6_y));
    let (ys, y_ok) = timing_centres(side, pitch_y, |k| uniform(k, loc.top_left.1, pitch_y), |p| bits.sample(col6_x, p));

    let mut grid = vec![false; side * side];
    for my in 0..side {
        for mx in 0..side {
            let px = xs[mx] + (my as f64 - 3.0) * slope_y;
            let py = ys[my] + (mx as f64 - 3.0) * slope_x;
            grid[my * side + mx] = bits.sample(px, py);
        }
    }
    (grid, x_ok && y_ok)
}

/// Module centres along one axis. Between the finders the timing pattern's
/// run boundaries give each centre directly, which absorbs the uneven module
/// widths left by nearest-neighbour rescaling; beyond them, and whenever the
/// run count disagrees with the version, centres are extrapolated uniformly.
fn timing_centres(
    side: usize,
    pitch: f64,
    uniform: impl Fn(usize) -> f64,
    dark_at: impl Fn(f64) -> bool,
) -> (Vec<f64>, bool) {
    let mut centres: Vec<f64> = (0..side).map(&uniform).collect();
    let (start, end) = (uniform(7), uniform(side - 8));
    let mut transitions = Vec::with_capacity(side);
    let mut prev = dark_at(start);
    if prev {
        return (centres, false);
    }
    let mut p = start.floor() + 0.5;
    while p <= end {
        let d = dark_at(p);
        if d != prev {
            transitions.push(p - 0.5);
            prev = d;
        }
        p += 1.0;
    }
    if transitions.len() != side - 15 {
        return (centres, false);
    }
    for k in 8..=side - 9 {
        centres[k] = (transitions[k - 8] + transitions[k - 7]) / 2.0;
    }
    for k in 0..8 {
        centres[k] = centres[8] - (8 - k) as f64 * pitch;
    }
    for k in side - 8..side {
        centres[k] = centres[side - 9] + (k - (side - 9)) as f64 * pitch;
    }
    (centres, true)
}

/// Reads the version block next to the top-right finder, falling back to the
/// bottom-left copy.
fn read_version(bits: &BitMatrix, loc: &Located) -> Option<Version> {
    let m = loc.module;
    let read = |origin: (f64, f64), transpose: bool| -> u32 {
        let mut word = 0u32;
        for i in 0..18 {
            // Offsets from the finder centre, in modules.
            let (a, b) = (-7.0 + (i % 3) as f64, (i / 3) as f64 - 3.0);
            let (dx, dy) = if transpose { (b, a) } else { (a, b) };
            if bits.sample(origin.0 + dx * m, origin.1 + dy * m) {
                word |= 1 << i;
            }
        }
        word
    };
    for word in [read(loc.top_right, false), read(loc.bottom_left, true)] {
        let best = (7..=40u8)
            .map(|n| Version::new(n).unwrap())
            .map(|v| ((version_word(v) ^ word).count_ones(), v))
            .min_by_key(|&(d, _)| d);
        if let Some((d, v)) = best {
            if d <= 3 {
                return Some(v);
            }
        }
    }
    None
}

fn read_format(version: Version, grid: &[bool]) -> Result<(EcLevel, u8), QrError> {
    let side = version.side();
    let mut best: Option<(u32, EcLevel, u8)> = None;
    for copy in format_positions(side) {
        let word = copy
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &(x, y))| acc | (u32::from(grid[y * side + x]) << i));
        for level in EcLevel::ALL {
            for mask in 0..8u8 {
                let d = (format_word(level, mask) ^ word).count_ones();
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, level, mask));
                }
            }
        }
    }
    match best {
        Some((d, level, mask)) if d <= 3 => Ok((level, mask)),
        _ => Err(QrError::FormatInfoUnreadable),
    }
}

fn decode_grid(version: Version, grid: &[bool]) -> Result<Vec<u8>, QrError> {
    let side = version.side();
    let (level, mask) = read_format(version, grid)?;
    let fp = FunctionPatterns::new(version);
    let layout = BlockLayout::of(version, level);

    let mut stream = vec![0u8; layout.total_codewords()];
    for (i, &(x, y)) in fp.data_positions().iter().enumerate().take(stream.len() * 8) {
        let dark = grid[y * side + x] ^ mask_applies(mask, x, y);
        if dark {
            stream[i / 8] |= 0x80 >> (i % 8);
        }
    }

    let mut blocks: Vec<Vec<u8>> = (0..layout.num_blocks).map(|b| vec![0; layout.block_len(b)]).collect();
    for ((b, i), c) in layout.stream_order().into_iter().zip(stream) {
        blocks[b][i] = c;
    }

    let mut data = Vec::with_capacity(layout.total_data_codewords());
    for (b, mut block) in blocks.into_iter().enumerate() {
        reed_solomon::decode(&mut block, layout.ec_per_block)
            .map_err(|_| QrError::UnrecoverableErrors { block: b })?;
        data.extend_from_slice(&block[..layout.data_len(b)]);
    }
    parse_segments(version, &data)
}

const ALPHANUMERIC: &[u8; 45] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:";

fn count_bits(version: Version, mode: u32) -> usize {
    let tier = match version.number() {
        1..=9 => 0,
        10..=26 => 1,
        _ => 2,
    };
    match mode {
        1 => [10, 12, 14][tier],
        2 => [9, 11, 13][tier],
        _ => [8, 16, 16][tier],
    }
}

fn parse_segments(version: Version, data: &[u8]) -> Result<Vec<u8>, QrError> {
    let mut r = BitReader::new(data);
    let mut out = Vec::new();
    let truncated = QrError::MalformedData("segment runs past end of data");
    while r.remaining() >= 4 {
        let mode = r.read(4).unwrap();
        match mode {
            0 => break,
            1 => {
                let mut n = r.read(count_bits(version, 1)).ok_or(truncated.clone())? as usize;
                while n > 0 {
                    let digits = n.min(3);
                    let width = [0, 4, 7, 10][digits];
                    let v = r.read(width).ok_or(truncated.clone())?;
                    if v >= 10u32.pow(digits as u32) {
                        return Err(QrError::MalformedData("numeric group out of range"));
                    }
                    out.extend(format!("{v:0digits$}").bytes());
                    n -= digits;
                }
            }
            2 => {
                let mut n = r.read(count_bits(version, 2)).ok_or(truncated.clone())? as usize;
                while n > 0 {
                    if n >= 2 {
                        let v = r.read(11).ok_or(truncated.clone())? as usize;
                        if v >= 45 * 45 {
                            return Err(QrError::MalformedData("alphanumeric pair out of range"));
                        }
                        out.push(ALPHANUMERIC[v / 45]);
                        out.push(ALPHANUMERIC[v % 45]);
                        n -= 2;
                    } else {
                        let v = r.read(6).ok_or(truncated.clone())? as usize;
                        out.push(*ALPHANUMERIC.get(v).ok_or(QrError::MalformedData("alphanumeric out of range"))?);
                        n -= 1;
                    }
                }
            }
            4 => {
                let n = r.read(count_bits(version, 4)).ok_or(truncated.clone())?;
                for _ in 0..n {
                    out.push(r.read(8).ok_or(truncated.clone())? as u8);
                }
            }
            7 => {
                // ECI designator; the payload is passed through as raw bytes.
                let first = r.read(8).ok_or(truncated.clone())?;
                let extra = match first {
                    f if f & 0x80 == 0 => 0,
                    f if f & 0xC0 == 0x80 => 8,
                    _ => 16,
                };
                r.read(extra).ok_or(truncated.clone())?;
            }
            _ => return Err(QrError::MalformedData("unsupported segment mode")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitWriter;
    use crate::{encode, render};

    #[test]
    fn symbol_round_trip_without_imaging() {
        for level in EcLevel::ALL {
            let payload: Vec<u8> = (0..=255).collect();
            let s = encode(&payload, level).unwrap();
            assert_eq!(decode_symbol(&s).unwrap(), payload);
        }
    }

    #[test]
    fn numeric_and_alphanumeric_segments_are_read() {
        let v = Version::new(1).unwrap();
        let mut w = BitWriter::default();
        // "01234567" numeric
        w.push(1, 4);
        w.push(8, 10);
        w.push(12, 10);
        w.push(345, 10);
        w.push(67, 7);
        // "AC-42" alphanumeric
        w.push(2, 4);
        w.push(5, 9);
        w.push(10 * 45 + 12, 11);
        w.push(41 * 45 + 4, 11);
        w.push(2, 6);
        w.push(0, 4);
        let bytes = w.into_bytes();
        assert_eq!(parse_segments(v, &bytes).unwrap(), b"01234567AC-42");
    }

    #[test]
    fn format_word_far_from_every_codeword_is_unreadable() {
        let distance = |word: u32| {
            EcLevel::ALL
                .iter()
                .flat_map(|&l| (0..8).map(move |m| (format_word(l, m) ^ word).count_ones()))
                .min()
                .unwrap()
        };
        let bad = (0..1u32 << 15).find(|&w| distance(w) >= 4).unwrap();
        let mut s = encode(b"format", EcLevel::Q).unwrap();
        for copy in format_positions(s.side()) {
            for (i, (x, y)) in copy.into_iter().enumerate() {
                s.set_dark(x, y, (bad >> i) & 1 != 0);
            }
        }
        assert_eq!(decode_symbol(&s), Err(QrError::FormatInfoUnreadable));
    }

    #[test]
    fn image_round_trip_small_versions() {
        for len in [1usize, 10, 50, 120] {
            let payload: Vec<u8> = (0..len as u32).map(|i| (i * 37 % 251) as u8).collect();
            let s = encode(&payload, EcLevel::M).unwrap();
            let img = render(&s, 3, 4).unwrap();
            assert_eq!(decode(&img).unwrap(), payload, "len {len}");
        }
    }
}
