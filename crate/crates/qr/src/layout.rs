//! Module geometry shared by the encoder and the decoder: function patterns,
//! format and version information placement, masks, and the data zigzag.

use crate::{EcLevel, Version};

pub(crate) type Pos = (usize, usize);

/// Function patterns of one version. `dark` holds the fixed pattern colours;
/// format and version areas are reserved but left light.
pub(crate) struct FunctionPatterns {
    pub side: usize,
    pub dark: Vec<bool>,
    pub reserved: Vec<bool>,
}

impl FunctionPatterns {
    pub fn new(version: Version) -> Self {
        let side = version.side();
        let mut fp = FunctionPatterns {
            side,
            dark: vec![false; side * side],
            reserved: vec![false; side * side],
        };

        for i in 0..side {
            fp.set(6, i, i % 2 == 0);
            fp.set(i, 6, i % 2 == 0);
        }

        for (cx, cy) in [(3, 3), (side - 4, 3), (3, side - 4)] {
            for dy in -4i32..=4 {
                for dx in -4i32..=4 {
                    let (x, y) = (cx as i32 + dx, cy as i32 + dy);
                    if x < 0 || y < 0 || x >= side as i32 || y >= side as i32 {
                        continue;
                    }
                    let dist = dx.abs().max(dy.abs());
                    fp.set(x as usize, y as usize, dist != 2 && dist != 4);
                }
            }
        }

        let centers = alignment_centers(version);
        let last = centers.len().saturating_sub(1);
        for (i, &cy) in centers.iter().enumerate() {
            for (j, &cx) in centers.iter().enumerate() {
                if (i == 0 && j == 0) || (i == 0 && j == last) || (i == last && j == 0) {
                    continue;
                }
                for dy in -2i32..=2 {
                    for dx in -2i32..=2 {
                        let dark = dx.abs().max(dy.abs()) != 1;
                        fp.set((cx as i32 + dx) as usize, (cy as i32 + dy) as usize, dark);
                    }
                }
            }
        }

        let [first, second] = format_positions(side);
        for (x, y) in first.into_iter().chain(second) {
            fp.set(x, y, false);
        }
        fp.set(8, side - 8, true);

        if version.number() >= 7 {
            for (x, y) in version_positions(side).into_iter().flatten() {
                fp.set(x, y, false);
            }
        }
        fp
    }

    fn set(&mut self, x: usize, y: usize, dark: bool) {
        let i = y * self.side + x;
        self.dark[i] = dark;
        self.reserved[i] = true;
    }

    pub fn is_reserved(&self, x: usize, y: usize) -> bool {
        self.reserved[y * self.side + x]
    }

    /// Data module positions in placement order.
    pub fn data_positions(&self) -> Vec<Pos> {
        let side = self.side;
        let mut out = Vec::with_capacity(side * side);
        let mut right = side as i32 - 1;
        while right >= 1 {
            if right == 6 {
                right = 5;
            }
            let upward = (right + 1) & 2 == 0;
            for vert in 0..side {
                let y = if upward { side - 1 - vert } else { vert };
                for j in 0..2 {
                    let x = (right - j) as usize;
                    if !self.is_reserved(x, y) {
                        out.push((x, y));
                    }
                }
            }
            right -= 2;
        }
        out
    }
}

pub(crate) fn alignment_centers(version: Version) -> Vec<usize> {
    let v = version.number() as usize;
    if v == 1 {
        return Vec::new();
    }
    let count = v / 7 + 2;
    let step = if v == 32 {
        26
    } else {
        (v * 4 + count * 2 + 1) / (count * 2 - 2) * 2
    };
    let side = version.side();
    let mut out: Vec<usize> = (0..count - 1).map(|i| side - 7 - i * step).collect();
    out.push(6);
    out.reverse();
    out
}

/// Both copies of the 15 format bits; entry `i` holds bit `i` (LSB first).
pub(crate) fn format_positions(side: usize) -> [[Pos; 15]; 2] {
    let mut first = [(0, 0); 15];
    let mut second = [(0, 0); 15];
    for i in 0..15 {
        first[i] = match i {
            0..=5 => (8, i),
            6 => (8, 7),
            7 => (8, 8),
            8 => (7, 8),
            _ => (14 - i, 8),
        };
        second[i] = if i < 8 { (side - 1 - i, 8) } else { (8, side - 15 + i) };
    }
    [first, second]
}

/// Both copies of the 18 version bits, LSB first.
pub(crate) fn version_positions(side: usize) -> [[Pos; 18]; 2] {
    let mut top_right = [(0, 0); 18];
    let mut bottom_left = [(0, 0); 18];
    for i in 0..18 {
        let a = side - 11 + i % 3;
        let b = i / 3;
        top_right[i] = (a, b);
        bottom_left[i] = (b, a);
    }
    [top_right, bottom_left]
}

/// Masked 15-bit format word for a level and mask.
pub(crate) fn format_word(level: EcLevel, mask: u8) -> u32 {
    let data = (level.format_bits() << 3) | mask as u32;
    let mut rem = data;
    for _ in 0..10 {
        rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    }
    ((data << 10) | (rem & 0x3FF)) ^ 0x5412
}

/// 18-bit version word with its BCH remainder.
pub(crate) fn version_word(version: Version) -> u32 {
    let v = version.number() as u32;
    let mut rem = v;
    for _ in 0..12 {
        rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
    }
    (v << 12) | (rem & 0xFFF)
}

pub(crate) fn mask_applies(mask: u8, x: usize, y: usize) -> bool {
    match mask {
        0 => (x + y) % 2 == 0,
        1 => y % 2 == 0,
        2 => x % 3 == 0,
        3 => (x + y) % 3 == 0,
        4 => (x / 3 + y / 2) % 2 == 0,
        5 => x * y % 2 + x * y % 3 == 0,
        6 => (x * y % 2 + x * y % 3) % 2 == 0,
        7 => ((x + y) % 2 + x * y % 3) % 2 == 0,
        _ => unreachable!("mask index out of range"),
    }
}

/// Module positions of each codeword in transmission order, most significant
/// bit first. Remainder bits are not included.
pub fn codeword_modules(version: Version) -> Vec<[Pos; 8]> {
    let positions = FunctionPatterns::new(version).data_positions();
    positions
        .chunks_exact(8)
        .map(|c| <[Pos; 8]>::try_from(c).unwrap())
        .collect()
}
