//! Compact binary form of a [`PublicKeyRecord`], the QR payload.
//!
//! ```text
//! "QKR1" | version 0x01 | algorithm_id | u8 len ‖ owner_id | issued_at u64 LE
//!        | u8 len ‖ exponent | modulus (256) | fingerprint (32)
//! ```

use thiserror::Error;

use crate::identity::{Fingerprint, IdentityError, PublicKeyRecord, MODULUS_LEN};

pub const RECORD_MAGIC: &[u8; 4] = b"QKR1";
pub const RECORD_VERSION: u8 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecordError {
    #[error("bad record magic")]
    BadMagic,
    #[error("unsupported record version {0}")]
    UnsupportedVersion(u8),
    #[error("record truncated")]
    Truncated,
    #[error("{0} trailing bytes after record")]
    TrailingBytes(usize),
    #[error("owner id is not valid UTF-8")]
    OwnerNotUtf8,
    #[error("invalid record field: {0}")]
    Field(#[from] IdentityError),
    #[error("fingerprint mismatch: stored {stored}, computed {computed}")]
    FingerprintMismatch { stored: Fingerprint, computed: Fingerprint },
}

impl RecordError {
    pub fn category(&self) -> &'static str {
        match self {
            RecordError::BadMagic => "bad-magic",
            RecordError::UnsupportedVersion(_) => "unsupported-version",
            RecordError::Truncated => "truncated",
            RecordError::TrailingBytes(_) => "trailing-bytes",
            RecordError::OwnerNotUtf8 | RecordError::Field(_) => "invalid-record",
            RecordError::FingerprintMismatch { .. } => "fingerprint-mismatch",
        }
    }
}

pub fn serialize_record(record: &PublicKeyRecord) -> Vec<u8> {
    let owner = record.owner_id().as_bytes();
    let exp = record.public_exponent();
    let mut out = Vec::with_capacity(4 + 2 + 1 + owner.len() + 8 + 1 + exp.len() + MODULUS_LEN + 32);
    out.extend_from_slice(RECORD_MAGIC);
    out.push(RECORD_VERSION);
    out.push(record.algorithm_id());
    out.push(owner.len() as u8);
    out.extend_from_slice(owner);
    out.extend_from_slice(&record.issued_at().to_le_bytes());
    out.push(exp.len() as u8);
    out.extend_from_slice(exp);
    out.extend_from_slice(record.modulus());
    out.extend_from_slice(&record.fingerprint().0);
    out
}

pub(crate) struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    pub fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let out = self.buf.get(self.pos..end)?;
        self.pos = end;
        Some(out)
    }

    pub fn u8(&mut self) -> Option<u8> {
        self.take(1).map(|b| b[0])
    }

    pub fn u16_le(&mut self) -> Option<u16> {
        self.take(2).map(|b| u16::from_le_bytes([b[0], b[1]]))
    }

    pub fn u32_le(&mut self) -> Option<u32> {
        self.take(4).map(|b| u32::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn u64_le(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().unwrap()))
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

pub fn parse_record(bytes: &[u8]) -> Result<PublicKeyRecord, RecordError> {
    let mut r = Reader::new(bytes);
    if r.take(4).ok_or(RecordError::Truncated)? != RECORD_MAGIC {
        return Err(RecordError::BadMagic);
    }
    let version = r.u8().ok_or(RecordError::Truncated)?;
    if version != RECORD_VERSION {
        return Err(RecordError::UnsupportedVersion(version));
    }
    let algorithm_id = r.u8().ok_or(RecordError::Truncated)?;
    let owner_len = r.u8().ok_or(RecordError::Truncated)? as usize;
    let owner = r.take(owner_len).ok_or(RecordError::Truncated)?;
    let owner = std::str::from_utf8(owner).map_err(|_| RecordError::OwnerNotUtf8)?;
    let issued_at = r.u64_le().ok_or(RecordError::Truncated)?;
    let exp_len = r.u8().ok_or(RecordError::Truncated)? as usize;
    let exponent = r.take(exp_len).ok_or(RecordError::Truncated)?;
    let modulus = r.take(MODULUS_LEN).ok_or(RecordError::Truncated)?;
    let stored = Fingerprint(r.take(32).ok_or(RecordError::Truncated)?.try_into().unwrap());
    if r.remaining() != 0 {
        return Err(RecordError::TrailingBytes(r.remaining()));
    }
    let record = PublicKeyRecord::from_parts(owner, algorithm_id, modulus, exponent, issued_at)?;
    if record.fingerprint() != stored {
        return Err(RecordError::FingerprintMismatch { stored, computed: record.fingerprint() });
    }
    Ok(record)
}
