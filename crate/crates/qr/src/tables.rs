//! Version and error-correction tables from ISO/IEC 18004, plus the
//! model-level capacity summary.

use crate::{EcLevel, QrError, Version};

#[rustfmt::skip]
static ECC_CODEWORDS_PER_BLOCK: [[u8; 41]; 4] = [
    // 0,  1,  2,  3,  4,  5,  6,  7,  8,  9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40
    [0,  7, 10, 15, 20, 26, 18, 20, 24, 30, 18, 20, 24, 26, 30, 22, 24, 28, 30, 28, 28, 28, 28, 30, 30, 26, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30], // L
    [0, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26, 30, 22, 22, 24, 24, 28, 28, 26, 26, 26, 26, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28, 28], // M
    [0, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24, 28, 26, 24, 20, 30, 24, 28, 28, 26, 30, 28, 30, 30, 30, 30, 28, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30], // Q
    [0, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28, 24, 28, 22, 24, 24, 30, 28, 28, 26, 28, 30, 24, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30], // H
];

#[rustfmt::skip]
static NUM_BLOCKS: [[u8; 41]; 4] = [
    // 0, 1, 2, 3, 4, 5, 6, 7, 8, 9,10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34, 35, 36, 37, 38, 39, 40
    [0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4,  4,  4,  4,  4,  6,  6,  6,  6,  7,  8,  8,  9,  9, 10, 12, 12, 12, 13, 14, 15, 16, 17, 18, 19, 19, 20, 21, 22, 24, 25], // L
    [0, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5,  5,  8,  9,  9, 10, 10, 11, 13, 14, 16, 17, 17, 18, 20, 21, 23, 25, 26, 28, 29, 31, 33, 35, 37, 38, 40, 43, 45, 47, 49], // M
    [0, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8,  8, 10, 12, 16, 12, 17, 16, 18, 21, 20, 23, 23, 25, 27, 29, 34, 34, 35, 38, 40, 43, 45, 48, 51, 53, 56, 59, 62, 65, 68], // Q
    [0, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8, 11, 11, 16, 16, 18, 16, 19, 21, 25, 25, 25, 34, 30, 32, 35, 37, 40, 42, 45, 48, 51, 54, 57, 60, 63, 66, 70, 74, 77, 81], // H
];

/// Block structure for one (version, level) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub ec_per_block: usize,
    pub num_blocks: usize,
    /// Blocks that carry one data codeword fewer than the rest.
    pub num_short_blocks: usize,
    /// Total codewords (data + EC) in a short block.
    pub short_block_len: usize,
}

impl BlockLayout {
    pub fn of(version: Version, level: EcLevel) -> Self {
        let v = version.number() as usize;
        let ec_per_block = ECC_CODEWORDS_PER_BLOCK[level.table_row()][v] as usize;
        let num_blocks = NUM_BLOCKS[level.table_row()][v] as usize;
        let raw = raw_data_modules(version) / 8;
        BlockLayout {
            ec_per_block,
            num_blocks,
            num_short_blocks: num_blocks - raw % num_blocks,
            short_block_len: raw / num_blocks,
        }
    }

    pub fn data_len(&self, block: usize) -> usize {
        self.short_block_len - self.ec_per_block + usize::from(block >= self.num_short_blocks)
    }

    pub fn block_len(&self, block: usize) -> usize {
        self.data_len(block) + self.ec_per_block
    }

    pub fn total_data_codewords(&self) -> usize {
        (0..self.num_blocks).map(|b| self.data_len(b)).sum()
    }

    pub fn total_codewords(&self) -> usize {
        self.total_data_codewords() + self.ec_per_block * self.num_blocks
    }

    /// `(block, index within block)` for each codeword in transmission order.
    pub fn stream_order(&self) -> Vec<(usize, usize)> {
        let max_data = self.data_len(self.num_blocks - 1);
        let mut out = Vec::with_capacity(self.total_codewords());
        for i in 0..max_data {
            out.extend((0..self.num_blocks).filter(|&b| i < self.data_len(b)).map(|b| (b, i)));
        }
        for i in 0..self.ec_per_block {
            out.extend((0..self.num_blocks).map(|b| (b, self.data_len(b) + i)));
        }
        out
    }
}

/// Number of modules available for data and EC bits (including remainder bits).
pub fn raw_data_modules(version: Version) -> usize {
    let v = version.number() as usize;
    let mut result = (16 * v + 128) * v + 64;
    if v >= 2 {
        let num_align = v / 7 + 2;
        result -= (25 * num_align - 10) * num_align - 55;
        if v >= 7 {
            result -= 36;
        }
    }
    result
}

pub fn data_codewords(version: Version, level: EcLevel) -> usize {
    BlockLayout::of(version, level).total_data_codewords()
}

/// Width of the byte-mode character count field.
pub fn byte_count_bits(version: Version) -> usize {
    if version.number() <= 9 {
        8
    } else {
        16
    }
}

/// Maximum byte-mode payload for a single segment.
pub fn byte_capacity(version: Version, level: EcLevel) -> usize {
    let bits = data_codewords(version, level) * 8;
    (bits - 4 - byte_count_bits(version)) / 8
}

/// Smallest version whose byte-mode capacity at `level` holds `payload_len` bytes.
pub fn select_version(payload_len: usize, level: EcLevel) -> Result<Version, QrError> {
    if payload_len == 0 {
        return Err(QrError::EmptyPayload);
    }
    Version::all()
        .find(|&v| byte_capacity(v, level) >= payload_len)
        .ok_or(QrError::CapacityExceeded {
            len: payload_len,
            level,
            max: byte_capacity(Version::MAX, level),
        })
}

/// A capacity figure as printed in the model summary; some are approximate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Figure {
    pub value: u32,
    pub approximate: bool,
}

impl Figure {
    const fn exact(value: u32) -> Self {
        Figure { value, approximate: false }
    }
    const fn about(value: u32) -> Self {
        Figure { value, approximate: true }
    }
}

impl std::fmt::Display for Figure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.approximate {
            write!(f, "~{}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// Maximum size and capacities of one QR code family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelCapacity {
    pub name: &'static str,
    pub max_side_modules: u32,
    pub numeric: Figure,
    pub alphanumeric: Figure,
    pub binary_bytes: Figure,
}

pub const MODEL_CAPACITIES: [ModelCapacity; 4] = [
    ModelCapacity {
        name: "QR code Model 1",
        max_side_modules: 73,
        numeric: Figure::exact(1101),
        alphanumeric: Figure::exact(667),
        binary_bytes: Figure::exact(458),
    },
    ModelCapacity {
        name: "QR code Model 2",
        max_side_modules: 177,
        numeric: Figure::exact(7089),
        alphanumeric: Figure::exact(4296),
        binary_bytes: Figure::exact(2953),
    },
    ModelCapacity {
        name: "Micro QR code",
        max_side_modules: 17,
        numeric: Figure::exact(35),
        alphanumeric: Figure::exact(21),
        binary_bytes: Figure::exact(15),
    },
    ModelCapacity {
        name: "iQR code",
        max_side_modules: 422,
        numeric: Figure::exact(40637),
        alphanumeric: Figure::about(24626),
        binary_bytes: Figure::about(16928),
    },
];

/// Per-(version, level) byte capacities together with the model summary rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityTable {
    /// `byte_capacity[v - 1][level.table_row()]`.
    pub byte_capacity: Vec<[usize; 4]>,
    pub models: [ModelCapacity; 4],
}

impl CapacityTable {
    pub fn get(&self, version: Version, level: EcLevel) -> usize {
        self.byte_capacity[version.number() as usize - 1][level.table_row()]
    }

    pub fn model(&self, name: &str) -> Option<&ModelCapacity> {
        self.models.iter().find(|m| m.name == name)
    }
}

pub fn capacity_table() -> CapacityTable {
    CapacityTable {
        byte_capacity: Version::all()
            .map(|v| EcLevel::ALL.map(|l| byte_capacity(v, l)))
            .collect(),
        models: MODEL_CAPACITIES,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u8) -> Version {
        Version::new(n).unwrap()
    }

    #[test]
    fn codeword_totals_match_raw_modules() {
        for version in Version::all() {
            for level in EcLevel::ALL {
                let layout = BlockLayout::of(version, level);
                assert_eq!(layout.total_codewords(), raw_data_modules(version) / 8);
            }
        }
    }

    #[test]
    fn spot_check_against_published_capacities() {
        // Byte-mode capacities printed in the standard's capacity table.
        assert_eq!(byte_capacity(v(1), EcLevel::L), 17);
        assert_eq!(byte_capacity(v(1), EcLevel::H), 7);
        assert_eq!(byte_capacity(v(10), EcLevel::M), 213);
        assert_eq!(byte_capacity(v(17), EcLevel::H), 280);
        assert_eq!(byte_capacity(v(19), EcLevel::H), 338);
        assert_eq!(byte_capacity(v(40), EcLevel::L), 2953);
        assert_eq!(byte_capacity(v(40), EcLevel::H), 1273);
    }

    #[test]
    fn version_17_h_block_structure() {
        let layout = BlockLayout::of(v(17), EcLevel::H);
        assert_eq!(layout.ec_per_block, 28);
        assert_eq!(layout.num_blocks, 19);
        assert_eq!(layout.num_short_blocks, 2);
        assert_eq!(layout.short_block_len, 42);
        assert_eq!(layout.total_data_codewords(), 283);
    }

    #[test]
    fn selection_boundaries() {
        assert_eq!(select_version(1, EcLevel::L).unwrap().number(), 1);
        assert_eq!(select_version(256, EcLevel::H).unwrap().number(), 17);
        assert_eq!(select_version(2953, EcLevel::L).unwrap().number(), 40);
        assert!(matches!(
            select_version(2954, EcLevel::L),
            Err(QrError::CapacityExceeded { max: 2953, .. })
        ));
        assert!(matches!(select_version(0, EcLevel::L), Err(QrError::EmptyPayload)));
    }

    #[test]
    fn capacity_is_monotonic() {
        let table = capacity_table();
        for version in Version::all() {
            let row: Vec<usize> = EcLevel::ALL.iter().map(|&l| table.get(version, l)).collect();
            assert!(row.windows(2).all(|w| w[0] > w[1]), "v{}: {row:?}", version.number());
        }
        for level in EcLevel::ALL {
            let col: Vec<usize> = Version::all().map(|v| table.get(v, level)).collect();
            assert!(col.windows(2).all(|w| w[0] < w[1]), "{level:?}");
        }
    }
}
