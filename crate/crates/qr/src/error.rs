use crate::EcLevel;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QrError {
    #[error("payload is empty")]
    EmptyPayload,
    #[error("payload of {len} bytes exceeds the largest capacity at level {level:?} ({max} bytes)")]
    CapacityExceeded { len: usize, level: EcLevel, max: usize },
    #[error("version {0} is outside 1..=40")]
    InvalidVersion(u8),
    #[error("unknown error-correction level {0:?}")]
    UnknownEcLevel(String),
    #[error("invalid render parameters: {0}")]
    InvalidRender(&'static str),
    #[error("invalid raster: {0}")]
    InvalidRaster(&'static str),
    #[error("no QR symbol found in image")]
    NoSymbolFound,
    #[error("format information unreadable")]
    FormatInfoUnreadable,
    #[error("version information unreadable")]
    VersionInfoUnreadable,
    #[error("block {block} has more errors than its error correction can repair")]
    UnrecoverableErrors { block: usize },
    #[error("data segments malformed: {0}")]
    MalformedData(&'static str),
}

impl QrError {
    /// Stable category name for CLI and report output.
    pub fn category(&self) -> &'static str {
        match self {
            QrError::EmptyPayload | QrError::CapacityExceeded { .. } => "capacity-exceeded",
            QrError::InvalidVersion(_) | QrError::UnknownEcLevel(_) => "invalid-argument",
            QrError::InvalidRender(_) | QrError::InvalidRaster(_) => "invalid-argument",
            QrError::NoSymbolFound => "no-symbol-found",
            QrError::FormatInfoUnreadable | QrError::VersionInfoUnreadable => {
                "format-info-unreadable"
            }
            QrError::UnrecoverableErrors { .. } => "unrecoverable-errors",
            QrError::MalformedData(_) => "malformed-data",
        }
    }
}
