//! Message envelope and its text armor.
//!
//! ```text
//! "QKE1" | mode u8 | u8 len ‖ sender_id
//! modes 1-3: chunk_count u16 LE | chunk_count × 256-byte RSA-OAEP blocks
//! mode 4:    nonce (12) | u32 LE len ‖ AES-GCM ciphertext with tag
//! ```
//!
//! Armor is `QK|` + standard padded base64 of the envelope + `|KQ`.
//! Whitespace anywhere in armored text is ignored.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use thiserror::Error;

use crate::identity::{validate_user_id, MODULUS_LEN};
use crate::record::Reader;

pub const ENVELOPE_MAGIC: &[u8; 4] = b"QKE1";
pub const CHUNK_LEN: usize = MODULUS_LEN;
pub const ARMOR_PREFIX: &str = "QK|";
pub const ARMOR_SUFFIX: &str = "|KQ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Confidentiality and integrity.
    Confidential = 1,
    /// Adds a sender signature.
    Signed = 2,
    /// Carries a session secret.
    SecretExchange = 3,
    /// Session traffic under the derived key.
    SessionData = 4,
}

impl Mode {
    pub fn from_byte(b: u8) -> Option<Mode> {
        match b {
            1 => Some(Mode::Confidential),
            2 => Some(Mode::Signed),
            3 => Some(Mode::SecretExchange),
            4 => Some(Mode::SessionData),
            _ => None,
        }
    }

    pub fn byte(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvelopeError {
    #[error("bad envelope magic")]
    BadMagic,
    #[error("unknown envelope mode {0}")]
    UnknownMode(u8),
    #[error("envelope truncated")]
    Truncated,
    #[error("{0} trailing bytes after envelope")]
    TrailingBytes(usize),
    #[error("invalid sender id")]
    InvalidSender,
    #[error("envelope has no chunks")]
    NoChunks,
    #[error("armor: {0}")]
    BadArmor(&'static str),
    #[error("armor: invalid base64")]
    BadBase64,
}

impl EnvelopeError {
    pub fn category(&self) -> &'static str {
        match self {
            EnvelopeError::BadArmor(_) | EnvelopeError::BadBase64 => "bad-armor",
            _ => "bad-envelope",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Chunks(Vec<[u8; CHUNK_LEN]>),
    Sealed { nonce: [u8; 12], ciphertext: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    mode: Mode,
    sender_id: String,
    body: Body,
}

impl Envelope {
    pub(crate) fn chunked(mode: Mode, sender_id: &str, chunks: Vec<[u8; CHUNK_LEN]>) -> Self {
        debug_assert!(mode != Mode::SessionData && !chunks.is_empty());
        Envelope { mode, sender_id: sender_id.to_string(), body: Body::Chunks(chunks) }
    }

    pub(crate) fn sealed(sender_id: &str, nonce: [u8; 12], ciphertext: Vec<u8>) -> Self {
        Envelope { mode: Mode::SessionData, sender_id: sender_id.to_string(), body: Body::Sealed { nonce, ciphertext } }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Empty for unsigned messages.
    pub fn sender_id(&self) -> &str {
        &self.sender_id
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn chunk_count(&self) -> usize {
        match &self.body {
            Body::Chunks(c) => c.len(),
            Body::Sealed { .. } => 0,
        }
    }

    /// Magic, mode and sender: the bytes that precede the body.
    pub(crate) fn header_bytes(mode: Mode, sender_id: &str) -> Vec<u8> {
        let mut out = Vec::with_capacity(6 + sender_id.len());
        out.extend_from_slice(ENVELOPE_MAGIC);
        out.push(mode.byte());
        out.push(sender_id.len() as u8);
        out.extend_from_slice(sender_id.as_bytes());
        out
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Self::header_bytes(self.mode, &self.sender_id);
        match &self.body {
            Body::Chunks(chunks) => {
                out.extend_from_slice(&(chunks.len() as u16).to_le_bytes());
                for c in chunks {
                    out.extend_from_slice(c);
                }
            }
            Body::Sealed { nonce, ciphertext } => {
                out.extend_from_slice(nonce);
                out.extend_from_slice(&(ciphertext.len() as u32).to_le_bytes());
                out.extend_from_slice(ciphertext);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EnvelopeError> {
        let mut r = Reader::new(bytes);
        if r.take(4).ok_or(EnvelopeError::Truncated)? != ENVELOPE_MAGIC {
            return Err(EnvelopeError::BadMagic);
        }
        let mode_byte = r.u8().ok_or(EnvelopeError::Truncated)?;
        let mode = Mode::from_byte(mode_byte).ok_or(EnvelopeError::UnknownMode(mode_byte))?;
        let sender_len = r.u8().ok_or(EnvelopeError::Truncated)? as usize;
        let sender = r.take(sender_len).ok_or(EnvelopeError::Truncated)?;
        let sender_id = std::str::from_utf8(sender).map_err(|_| EnvelopeError::InvalidSender)?;
        if !sender_id.is_empty() && validate_user_id(sender_id).is_err() {
            return Err(EnvelopeError::InvalidSender);
        }
        let body = if mode == Mode::SessionData {
            let nonce: [u8; 12] = r.take(12).ok_or(EnvelopeError::Truncated)?.try_into().unwrap();
            let len = r.u32_le().ok_or(EnvelopeError::Truncated)? as usize;
            let ciphertext = r.take(len).ok_or(EnvelopeError::Truncated)?.to_vec();
            Body::Sealed { nonce, ciphertext }
        } else {
            let count = r.u16_le().ok_or(EnvelopeError::Truncated)? as usize;
            if count == 0 {
                return Err(EnvelopeError::NoChunks);
            }
            let mut chunks = Vec::with_capacity(count);
            for _ in 0..count {
                chunks.push(r.take(CHUNK_LEN).ok_or(EnvelopeError::Truncated)?.try_into().unwrap());
            }
            Body::Chunks(chunks)
        };
        if r.remaining() != 0 {
            return Err(EnvelopeError::TrailingBytes(r.remaining()));
        }
        Ok(Envelope { mode, sender_id: sender_id.to_string(), body })
    }
}

pub fn armor(env: &Envelope) -> String {
    format!("{ARMOR_PREFIX}{}{ARMOR_SUFFIX}", STANDARD.encode(env.to_bytes()))
}

pub fn dearmor(text: &str) -> Result<Envelope, EnvelopeError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact.strip_prefix(ARMOR_PREFIX).ok_or(EnvelopeError::BadArmor("missing QK| prefix"))?;
    let inner = inner.strip_suffix(ARMOR_SUFFIX).ok_or(EnvelopeError::BadArmor("missing |KQ suffix"))?;
    let bytes = STANDARD.decode(inner).map_err(|_| EnvelopeError::BadBase64)?;
    Envelope::from_bytes(&bytes)
}
