use crate::bits::BitWriter;
use crate::layout::{format_positions, format_word, mask_applies, version_positions, version_word, FunctionPatterns};
use crate::tables::{byte_count_bits, select_version, BlockLayout};
use crate::{reed_solomon, EcLevel, QrError, Version};

/// One of the eight data mask patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mask(u8);

impl Mask {
    pub fn new(index: u8) -> Option<Self> {
        (index < 8).then_some(Mask(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }
}

/// A complete symbol: a square matrix of dark (`true`) and light modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QrSymbol {
    version: Version,
    ec_level: EcLevel,
    mask: Mask,
    modules: Vec<bool>,
}

impl QrSymbol {
    pub fn version(&self) -> Version {
        self.version
    }

    pub fn ec_level(&self) -> EcLevel {
        self.ec_level
    }

    pub fn mask(&self) -> Mask {
        self.mask
    }

    pub fn side(&self) -> usize {
        self.version.side()
    }

    pub fn is_dark(&self, x: usize, y: usize) -> bool {
        self.modules[y * self.side() + x]
    }

    pub fn set_dark(&mut self, x: usize, y: usize, dark: bool) {
        let side = self.side();
        self.modules[y * side + x] = dark;
    }

    pub fn toggle(&mut self, x: usize, y: usize) {
        let side = self.side();
        self.modules[y * side + x] ^= true;
    }

    /// Rows of modules, top to bottom.
    pub fn rows(&self) -> impl Iterator<Item = &[bool]> {
        self.modules.chunks(self.side())
    }
}

/// Encodes `payload` as a single byte-mode segment in the smallest version
/// that fits at `level`.
pub fn encode(payload: &[u8], level: EcLevel) -> Result<QrSymbol, QrError> {
    let version = select_version(payload.len(), level)?;
    encode_with_version(payload, version, level)
}

/// Encodes into exactly `version`, failing if the payload does not fit.
pub fn encode_with_version(
    payload: &[u8],
    version: Version,
    level: EcLevel,
) -> Result<QrSymbol, QrError> {
    let capacity = crate::tables::byte_capacity(version, level);
    if payload.len() > capacity {
        return Err(QrError::CapacityExceeded { len: payload.len(), level, max: capacity });
    }
    let layout = BlockLayout::of(version, level);
    let data = data_codewords(payload, version, &layout);
    let stream = interleave_with_ec(&data, &layout);

    let fp = FunctionPatterns::new(version);
    let positions = fp.data_positions();
    let mut base = fp.dark.clone();
    for (i, &(x, y)) in positions.iter().enumerate() {
        let bit = stream.get(i / 8).map_or(false, |b| (b >> (7 - i % 8)) & 1 != 0);
        base[y * fp.side + x] = bit;
    }

    let mut best: Option<(u32, QrSymbol)> = None;
    for m in 0..8u8 {
        let mut modules = base.clone();
        for &(x, y) in &positions {
            if mask_applies(m, x, y) {
                modules[y * fp.side + x] ^= true;
            }
        }
        let mut symbol = QrSymbol { version, ec_level: level, mask: Mask(m), modules };
        draw_format(&mut symbol);
        draw_version(&mut symbol);
        let score = penalty(&symbol);
        // Strict comparison keeps the lowest index on ties.
        if best.as_ref().map_or(true, |(s, _)| score < *s) {
            best = Some((score, symbol));
        }
    }
    Ok(best.expect("eight masks evaluated").1)
}

fn data_codewords(payload: &[u8], version: Version, layout: &BlockLayout) -> Vec<u8> {
    let capacity_bits = layout.total_data_codewords() * 8;
    let mut bits = BitWriter::default();
    bits.push(0b0100, 4);
    bits.push(payload.len() as u32, byte_count_bits(version));
    for &b in payload {
        bits.push(b as u32, 8);
    }
    let terminator = (capacity_bits - bits.len()).min(4);
    bits.push(0, terminator);
    let pad_to_byte = (8 - bits.len() % 8) % 8;
    bits.push(0, pad_to_byte);
    let mut out = bits.into_bytes();
    for pad in [0xEC, 0x11].into_iter().cycle() {
        if out.len() >= layout.total_data_codewords() {
            break;
        }
        out.push(pad);
    }
    out
}

fn interleave_with_ec(data: &[u8], layout: &BlockLayout) -> Vec<u8> {
    let mut blocks = Vec::with_capacity(layout.num_blocks);
    let mut offset = 0;
    for b in 0..layout.num_blocks {
        let len = layout.data_len(b);
        let chunk = &data[offset..offset + len];
        offset += len;
        blocks.push((chunk.to_vec(), reed_solomon::encode(chunk, layout.ec_per_block)));
    }
    let max_data = layout.data_len(layout.num_blocks - 1);
    let mut out = Vec::with_capacity(layout.total_codewords());
    for i in 0..max_data {
        for (d, _) in &blocks {
            if let Some(&c) = d.get(i) {
                out.push(c);
            }
        }
    }
    for i in 0..layout.ec_per_block {
        for (_, ec) in &blocks {
            out.push(ec[i]);
        }
    }
    out
}

fn draw_format(symbol: &mut QrSymbol) {
    let word = format_word(symbol.ec_level, symbol.mask.0);
    for copy in format_positions(symbol.side()) {
        for (i, (x, y)) in copy.into_iter().enumerate() {
            symbol.set_dark(x, y, (word >> i) & 1 != 0);
        }
    }
}

fn draw_version(symbol: &mut QrSymbol) {
    if symbol.version.number() < 7 {
        return;
    }
    let word = version_word(symbol.version);
    for copy in version_positions(symbol.side()) {
        for (i, (x, y)) in copy.into_iter().enumerate() {
            symbol.set_dark(x, y, (word >> i) & 1 != 0);
        }
    }
}

const N1: u32 = 3;
const N2: u32 = 3;
const N3: u32 = 40;
const N4: u32 = 10;

fn penalty(symbol: &QrSymbol) -> u32 {
    let side = symbol.side();
    let at = |x: usize, y: usize| symbol.is_dark(x, y);
    let mut score = 0;

    for horizontal in [true, false] {
        for a in 0..side {
            let line: Vec<bool> = (0..side)
                .map(|b| if horizontal { at(b, a) } else { at(a, b) })
                .collect();
            score += run_penalty(&line) + finder_like_penalty(&line);
        }
    }

    for y in 0..side - 1 {
        for x in 0..side - 1 {
            let c = at(x, y);
            if c == at(x + 1, y) && c == at(x, y + 1) && c == at(x + 1, y + 1) {
                score += N2;
            }
        }
    }

    let dark = symbol.modules.iter().filter(|&&d| d).count();
    let total = side * side;
    // Smallest k with (45 - 5k)% <= dark ratio <= (55 + 5k)%.
    let deviation = (dark * 20).abs_diff(total * 10);
    let k = (deviation + total - 1) / total - 1;
    score + k as u32 * N4
}

fn run_penalty(line: &[bool]) -> u32 {
    let mut score = 0;
    let mut run = 1;
    for i in 1..=line.len() {
        if i < line.len() && line[i] == line[i - 1] {
            run += 1;
        } else {
            if run >= 5 {
                score += N1 + (run - 5) as u32;
            }
            run = 1;
        }
    }
    score
}

/// 1:1:3:1:1 dark pattern with four light modules on either side; modules
/// beyond the symbol edge count as light.
fn finder_like_penalty(line: &[bool]) -> u32 {
    const CORE: [bool; 7] = [true, false, true, true, true, false, true];
    let n = line.len() as isize;
    let get = |i: isize| i >= 0 && i < n && line[i as usize];
    let mut score = 0;
    for start in 0..=n - 7 {
        if !(0..7).all(|k| get(start + k) == CORE[k as usize]) {
            continue;
        }
        let light_before = (1..=4).all(|k| !get(start - k));
        let light_after = (0..4).all(|k| !get(start + 7 + k));
        if light_before || light_after {
            score += N3;
        }
    }
    score
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_follows_version() {
        let s = encode(&[0u8; 256], EcLevel::H).unwrap();
        assert_eq!(s.version().number(), 17);
        assert_eq!(s.side(), 85);
    }

    #[test]
    fn finder_patterns_at_three_corners() {
        let s = encode(b"HELLO", EcLevel::H).unwrap();
        let side = s.side();
        for (ox, oy) in [(0, 0), (side - 7, 0), (0, side - 7)] {
            for dy in 0..7 {
                for dx in 0..7 {
                    let ring = dx.min(dy).min(6 - dx).min(6 - dy);
                    assert_eq!(s.is_dark(ox + dx, oy + dy), ring != 1, "({dx},{dy})");
                }
            }
        }
    }

    #[test]
    fn format_copies_agree_and_carry_level() {
        for level in EcLevel::ALL {
            let s = encode(b"format", level).unwrap();
            let [a, b] = format_positions(s.side());
            let read = |copy: [(usize, usize); 15]| {
                copy.iter().enumerate().fold(0u32, |acc, (i, &(x, y))| {
                    acc | (u32::from(s.is_dark(x, y)) << i)
                })
            };
            assert_eq!(read(a), read(b));
            assert_eq!(read(a), format_word(level, s.mask().index()));
        }
    }

    #[test]
    fn data_codewords_for_standard_example() {
        // "01234567" is numeric in the standard's example; here the byte-mode
        // header is checked instead: mode 0100, count 8 bits.
        let layout = BlockLayout::of(Version::new(1).unwrap(), EcLevel::M);
        let cw = data_codewords(b"AB", Version::new(1).unwrap(), &layout);
        assert_eq!(&cw[..4], &[0x40, 0x24, 0x14, 0x20]);
        assert_eq!(&cw[4..6], &[0xEC, 0x11]);
        assert_eq!(cw.len(), 16);
    }

    #[test]
    fn oversize_payload_rejected_at_fixed_version() {
        let v = Version::new(1).unwrap();
        assert!(matches!(
            encode_with_version(&[0; 18], v, EcLevel::L),
            Err(QrError::CapacityExceeded { max: 17, .. })
        ));
    }
}
