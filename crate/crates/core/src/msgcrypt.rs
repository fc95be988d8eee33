//! Short messages under the receiver's RSA key, optionally signed by the
//! sender.
//!
//! The plaintext travels in an inner frame
//!
//! ```text
//! mode u8 | plaintext_len u32 LE | chunk_count u32 LE | plaintext | trailer
//! ```
//!
//! where the trailer is SHA-256(plaintext) for unsigned messages and an
//! RSA-PSS-SHA256 signature over the plaintext for signed ones. The frame is
//! cut into 190-byte slices, each encrypted with RSA-OAEP-SHA256 under the
//! label `QKE1/m<mode>/i<index>/n<count>`, which ties every chunk to its
//! position and to the message length.

use rand::{CryptoRng, RngCore};
use rsa::pss::{BlindedSigningKey, Signature, VerifyingKey};
use rsa::signature::{RandomizedSigner, SignatureEncoding, Verifier};
use rsa::Oaep;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::envelope::{Body, Envelope, EnvelopeError, Mode, CHUNK_LEN};
use crate::identity::{Identity, IdentityError, PublicKeyRecord};

pub const SLICE_LEN: usize = 190;
pub const FRAME_HEADER_LEN: usize = 9;
pub const DIGEST_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 256;
pub const MAX_PLAINTEXT: usize = 4096;
pub const MAX_SIGNED_PLAINTEXT: usize = MAX_PLAINTEXT - SIGNATURE_LEN;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("plaintext of {len} bytes exceeds the {max}-byte limit")]
    PlaintextTooLarge { len: usize, max: usize },
    #[error("invalid key: {0}")]
    InvalidKey(#[from] IdentityError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error("expected a mode {expected:?} envelope, got {found:?}")]
    WrongMode { expected: Mode, found: Mode },
    #[error("chunk decryption failed (wrong key or tampered ciphertext)")]
    DecryptFailure,
    #[error("integrity digest mismatch")]
    DigestMismatch,
    #[error("inner frame malformed")]
    MalformedFrame,
    #[error("sender authentication failed")]
    AuthenticationFailure,
    #[error("envelope is signed by {0}; their public key is required")]
    SenderKeyRequired(String),
    #[error("encryption failed: {0}")]
    Encryption(String),
}

impl CryptoError {
    pub fn category(&self) -> &'static str {
        match self {
            CryptoError::PlaintextTooLarge { .. } => "plaintext-too-large",
            CryptoError::InvalidKey(_) => "invalid-key",
            CryptoError::Envelope(e) => e.category(),
            CryptoError::WrongMode { .. } => "wrong-mode",
            CryptoError::DecryptFailure => "decrypt-failure",
            CryptoError::DigestMismatch => "digest-mismatch",
            CryptoError::MalformedFrame => "malformed-frame",
            CryptoError::AuthenticationFailure => "authentication-failure",
            CryptoError::SenderKeyRequired(_) => "sender-key-required",
            CryptoError::Encryption(_) => "encryption-failed",
        }
    }
}

pub fn chunk_count(payload_len: usize, signed: bool) -> usize {
    let trailer = if signed { SIGNATURE_LEN } else { DIGEST_LEN };
    (FRAME_HEADER_LEN + payload_len + trailer).div_ceil(SLICE_LEN)
}

fn oaep_label(mode: Mode, index: usize, count: usize) -> Oaep {
    Oaep::new_with_label::<Sha256, _>(format!("QKE1/m{}/i{index}/n{count}", mode.byte()))
}

/// Builds and encrypts a frame. A `sender` makes it signed.
pub(crate) fn seal_chunks<R: CryptoRng + RngCore>(
    mode: Mode,
    sender: Option<&Identity>,
    receiver: &PublicKeyRecord,
    payload: &[u8],
    rng: &mut R,
) -> Result<Envelope, CryptoError> {
    let key = receiver.public_key()?;
    let count = chunk_count(payload.len(), sender.is_some());
    let mut frame = Vec::with_capacity(count * SLICE_LEN);
    frame.push(mode.byte());
    frame.extend_from_slice(&(payload.len() as u32).to_le_bytes());
    frame.extend_from_slice(&(count as u32).to_le_bytes());
    frame.extend_from_slice(payload);
    match sender {
        Some(id) => {
            let signer = BlindedSigningKey::<Sha256>::new(id.private_key().clone());
            frame.extend_from_slice(&signer.sign_with_rng(rng, payload).to_bytes());
        }
        None => frame.extend_from_slice(&Sha256::digest(payload)),
    }
    let chunks = frame
        .chunks(SLICE_LEN)
        .enumerate()
        .map(|(i, slice)| {
            let ct = key
                .encrypt(rng, oaep_label(mode, i, count), slice)
                .map_err(|e| CryptoError::Encryption(e.to_string()))?;
            Ok(<[u8; CHUNK_LEN]>::try_from(ct.as_slice()).expect("2048-bit ciphertext"))
        })
        .collect::<Result<Vec<_>, CryptoError>>()?;
    Ok(Envelope::chunked(mode, sender.map_or("", |s| s.user_id()), chunks))
}

/// Decrypts and checks a frame. Signed envelopes need `sender`.
pub(crate) fn open_chunks(
    own: &Identity,
    env: &Envelope,
    expected: Mode,
    sender: Option<&PublicKeyRecord>,
) -> Result<Vec<u8>, CryptoError> {
    if env.mode() != expected {
        return Err(CryptoError::WrongMode { expected, found: env.mode() });
    }
    let Body::Chunks(chunks) = env.body() else {
        return Err(CryptoError::MalformedFrame);
    };
    let signed = !env.sender_id().is_empty();
    let verifier = if signed {
        let record = sender.ok_or_else(|| CryptoError::SenderKeyRequired(env.sender_id().to_string()))?;
        if record.owner_id() != env.sender_id() {
            return Err(CryptoError::AuthenticationFailure);
        }
        Some(VerifyingKey::<Sha256>::new(record.public_key()?))
    } else {
        None
    };

    let count = chunks.len();
    let mut frame = Vec::with_capacity(count * SLICE_LEN);
    for (i, chunk) in chunks.iter().enumerate() {
        let slice = own
            .private_key()
            .decrypt_blinded(&mut rand::rngs::OsRng, oaep_label(expected, i, count), chunk)
            .map_err(|_| CryptoError::DecryptFailure)?;
        frame.extend_from_slice(&slice);
    }

    if frame.len() < FRAME_HEADER_LEN || frame[0] != expected.byte() {
        return Err(CryptoError::MalformedFrame);
    }
    let len = u32::from_le_bytes(frame[1..5].try_into().unwrap()) as usize;
    let framed_count = u32::from_le_bytes(frame[5..9].try_into().unwrap()) as usize;
    let trailer_len = if signed { SIGNATURE_LEN } else { DIGEST_LEN };
    if framed_count != count
        || chunk_count(len, signed) != count
        || frame.len() != FRAME_HEADER_LEN + len + trailer_len
    {
        return Err(CryptoError::MalformedFrame);
    }
    let (payload, trailer) = frame[FRAME_HEADER_LEN..].split_at(len);
    match verifier {
        Some(v) => {
            let sig = Signature::try_from(trailer).map_err(|_| CryptoError::AuthenticationFailure)?;
            v.verify(payload, &sig).map_err(|_| CryptoError::AuthenticationFailure)?;
        }
        None => {
            if Sha256::digest(payload).as_slice() != trailer {
                return Err(CryptoError::DigestMismatch);
            }
        }
    }
    Ok(payload.to_vec())
}

/// Mode 1: confidentiality and integrity.
pub fn encrypt_for<R: CryptoRng + RngCore>(
    receiver: &PublicKeyRecord,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<Envelope, CryptoError> {
    if plaintext.len() > MAX_PLAINTEXT {
        return Err(CryptoError::PlaintextTooLarge { len: plaintext.len(), max: MAX_PLAINTEXT });
    }
    seal_chunks(Mode::Confidential, None, receiver, plaintext, rng)
}

pub fn decrypt(own: &Identity, env: &Envelope) -> Result<Vec<u8>, CryptoError> {
    if !env.sender_id().is_empty() && env.mode() == Mode::Confidential {
        return Err(CryptoError::MalformedFrame);
    }
    open_chunks(own, env, Mode::Confidential, None)
}

/// Mode 2: sign with the sender's key, then encrypt for the receiver.
pub fn encrypt_signed<R: CryptoRng + RngCore>(
    sender: &Identity,
    receiver: &PublicKeyRecord,
    plaintext: &[u8],
    rng: &mut R,
) -> Result<Envelope, CryptoError> {
    if plaintext.len() > MAX_SIGNED_PLAINTEXT {
        return Err(CryptoError::PlaintextTooLarge { len: plaintext.len(), max: MAX_SIGNED_PLAINTEXT });
    }
    seal_chunks(Mode::Signed, Some(sender), receiver, plaintext, rng)
}

/// Returns the plaintext only if the signature verifies under `sender`.
pub fn decrypt_verify(own: &Identity, sender: &PublicKeyRecord, env: &Envelope) -> Result<Vec<u8>, CryptoError> {
    if env.mode() == Mode::Signed && env.sender_id().is_empty() {
        return Err(CryptoError::MalformedFrame);
    }
    open_chunks(own, env, Mode::Signed, Some(sender))
}
