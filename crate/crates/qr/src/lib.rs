//! QR Code symbology for key distribution: byte-mode encoding with
//! Reed–Solomon error correction, rendering to raster images, and a decoder
//! for axis-aligned symbols that survives rescaling and lossy recompression.
//!
//! ```
//! use socialkey_qr::{decode, encode, render, EcLevel};
//!
//! let symbol = encode(b"hello", EcLevel::H).unwrap();
//! let image = render(&symbol, 4, 4).unwrap();
//! assert_eq!(decode(&image).unwrap(), b"hello");
//! ```

mod bits;
mod decode;
mod detect;
mod error;
mod gf256;
mod layout;
mod raster;
pub mod reed_solomon;
mod symbol;
mod tables;

pub use decode::{decode, decode_symbol};
pub use detect::{binarize, locate, Located};
pub use error::QrError;
pub use layout::codeword_modules;
pub use raster::{render, RasterImage};
pub use symbol::{encode, encode_with_version, Mask, QrSymbol};
pub use tables::{
    byte_capacity, capacity_table, data_codewords, select_version, BlockLayout, CapacityTable,
    Figure, ModelCapacity, MODEL_CAPACITIES,
};

/// Symbol version, 1 through 40. Side length is `17 + 4 * version` modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Version(pub(crate) u8);

impl Version {
    pub const MIN: Version = Version(1);
    pub const MAX: Version = Version(40);

    pub fn new(n: u8) -> Result<Self, QrError> {
        if (1..=40).contains(&n) {
            Ok(Version(n))
        } else {
            Err(QrError::InvalidVersion(n))
        }
    }

    pub fn number(self) -> u8 {
        self.0
    }

    pub fn side(self) -> usize {
        17 + 4 * self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Version> {
        (1..=40).map(Version)
    }
}

/// Error-correction level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EcLevel {
    /// ~7% recovery
    L,
    /// ~15%
    M,
    /// ~25%
    Q,
    /// ~30%
    H,
}

impl EcLevel {
    pub const ALL: [EcLevel; 4] = [EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H];

    pub(crate) fn table_row(self) -> usize {
        match self {
            EcLevel::L => 0,
            EcLevel::M => 1,
            EcLevel::Q => 2,
            EcLevel::H => 3,
        }
    }

    /// Two-bit indicator used in the format information.
    pub(crate) fn format_bits(self) -> u32 {
        match self {
            EcLevel::L => 1,
            EcLevel::M => 0,
            EcLevel::Q => 3,
            EcLevel::H => 2,
        }
    }
}

impl std::str::FromStr for EcLevel {
    type Err = QrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "L" => Ok(EcLevel::L),
            "M" => Ok(EcLevel::M),
            "Q" => Ok(EcLevel::Q),
            "H" => Ok(EcLevel::H),
            _ => Err(QrError::UnknownEcLevel(s.to_string())),
        }
    }
}
