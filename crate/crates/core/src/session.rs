//! Hybrid sessions: each side draws a random secret, sends it to the other
//! inside a mode-3 envelope, and both use the XOR of the two secrets as an
//! AES-GCM key for mode-4 traffic.
//!
//! Mode-3 payload: `key_bits u16 LE ‖ secret`. Mode-4 nonce: a 4-byte
//! big-endian direction tag (initiator to responder 1, reverse 2) followed by
//! the sender's 8-byte big-endian message counter. The AAD is the envelope
//! header (magic, mode, sender) followed by the nonce.

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes128Gcm, Aes256Gcm, Nonce};
use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envelope::{armor, Body, Envelope, Mode};
use crate::identity::{Identity, PublicKeyRecord};
use crate::msgcrypt::{open_chunks, seal_chunks, CryptoError};

pub const DIR_INITIATOR_TO_RESPONDER: u32 = 0x0000_0001;
pub const DIR_RESPONDER_TO_INITIATOR: u32 = 0x0000_0002;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SessionError {
    #[error("unsupported key length {0} bits; use 128 or 256")]
    UnsupportedKeyLength(usize),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error("key length negotiation failed: own {own} bits, peer {peer} bits")]
    Negotiation { own: usize, peer: usize },
    #[error("secrets differ in length")]
    LengthMismatch,
    #[error("peer secret not received yet")]
    MissingPeerSecret,
    #[error("derived session key is all zero; regenerate secrets")]
    DegenerateKey,
    #[error("session not established")]
    NotEstablished,
    #[error("replayed or out-of-order message: counter {counter}, expected at least {expected}")]
    Replay { counter: u64, expected: u64 },
    #[error("message direction tag {0:#010x} is not the peer's")]
    WrongDirection(u32),
    #[error("session message failed authentication")]
    AuthenticationFailure,
    #[error("send counter exhausted")]
    CounterExhausted,
    #[error("secret-exchange payload malformed")]
    MalformedSecret,
}

impl SessionError {
    pub fn category(&self) -> &'static str {
        match self {
            SessionError::UnsupportedKeyLength(_) => "unsupported-key-length",
            SessionError::Crypto(e) => e.category(),
            SessionError::Negotiation { .. } => "negotiation",
            SessionError::LengthMismatch => "length-mismatch",
            SessionError::MissingPeerSecret => "missing-peer-secret",
            SessionError::DegenerateKey => "degenerate-key",
            SessionError::NotEstablished => "session-not-established",
            SessionError::Replay { .. } => "replay",
            SessionError::WrongDirection(_) => "wrong-direction",
            SessionError::AuthenticationFailure => "authentication-failure",
            SessionError::CounterExhausted => "counter-exhausted",
            SessionError::MalformedSecret => "malformed-secret",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Initiator,
    Responder,
}

impl Role {
    fn send_tag(self) -> u32 {
        match self {
            Role::Initiator => DIR_INITIATOR_TO_RESPONDER,
            Role::Responder => DIR_RESPONDER_TO_INITIATOR,
        }
    }

    fn recv_tag(self) -> u32 {
        match self {
            Role::Initiator => DIR_RESPONDER_TO_INITIATOR,
            Role::Responder => DIR_INITIATOR_TO_RESPONDER,
        }
    }
}

fn check_bits(bits: usize) -> Result<usize, SessionError> {
    match bits {
        128 | 256 => Ok(bits / 8),
        _ => Err(SessionError::UnsupportedKeyLength(bits)),
    }
}

/// 16 or 32 random bytes for AES-128 or AES-256.
pub fn generate_secret<R: CryptoRng + RngCore>(key_bits: usize, rng: &mut R) -> Result<Vec<u8>, SessionError> {
    let mut secret = vec![0u8; check_bits(key_bits)?];
    rng.fill_bytes(&mut secret);
    Ok(secret)
}

/// Bytewise XOR of two equal-length secrets.
pub fn xor_secrets(a: &[u8], b: &[u8]) -> Result<Vec<u8>, SessionError> {
    if a.len() != b.len() {
        return Err(SessionError::LengthMismatch);
    }
    Ok(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
}

/// Sends `secret` to `peer` in a mode-3 envelope, signed by `own` when
/// `authenticated`.
pub fn wrap_secret<R: CryptoRng + RngCore>(
    own: &Identity,
    peer: &PublicKeyRecord,
    secret: &[u8],
    authenticated: bool,
    rng: &mut R,
) -> Result<Envelope, SessionError> {
    check_bits(secret.len() * 8)?;
    let mut payload = ((secret.len() * 8) as u16).to_le_bytes().to_vec();
    payload.extend_from_slice(secret);
    let sender = authenticated.then_some(own);
    Ok(seal_chunks(Mode::SecretExchange, sender, peer, &payload, rng)?)
}

/// Recovers the secret and its key-length tag. Signed envelopes need the
/// sender's record.
pub fn unwrap_secret(
    own: &Identity,
    env: &Envelope,
    sender: Option<&PublicKeyRecord>,
) -> Result<(usize, Vec<u8>), SessionError> {
    let payload = open_chunks(own, env, Mode::SecretExchange, sender)?;
    if payload.len() < 2 {
        return Err(SessionError::MalformedSecret);
    }
    let bits = u16::from_le_bytes([payload[0], payload[1]]) as usize;
    let secret = payload[2..].to_vec();
    if check_bits(bits).ok() != Some(secret.len()) {
        return Err(SessionError::MalformedSecret);
    }
    Ok((bits, secret))
}

mod hex_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<u8>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(b) => s.serialize_some(&hex::encode(b)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u8>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|h| hex::decode(h).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// One party's view of a session. Serializable so the CLI can keep it in a
/// file between handshake steps.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub role: Role,
    pub key_bits: usize,
    #[serde(with = "hex")]
    own_secret: Vec<u8>,
    #[serde(with = "hex_opt")]
    peer_secret: Option<Vec<u8>>,
    #[serde(with = "hex_opt")]
    session_key: Option<Vec<u8>>,
    pub send_counter: u64,
    /// Lowest counter the next incoming message may carry.
    pub recv_counter: u64,
}

impl std::fmt::Debug for SessionState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionState")
            .field("role", &self.role)
            .field("key_bits", &self.key_bits)
            .field("established", &self.session_key.is_some())
            .field("send_counter", &self.send_counter)
            .field("recv_counter", &self.recv_counter)
            .finish_non_exhaustive()
    }
}

impl SessionState {
    pub fn new(role: Role, own_secret: Vec<u8>) -> Result<Self, SessionError> {
        let key_bits = own_secret.len() * 8;
        check_bits(key_bits)?;
        Ok(SessionState {
            role,
            key_bits,
            own_secret,
            peer_secret: None,
            session_key: None,
            send_counter: 0,
            recv_counter: 0,
        })
    }

    pub fn own_secret(&self) -> &[u8] {
        &self.own_secret
    }

    pub fn peer_secret(&self) -> Option<&[u8]> {
        self.peer_secret.as_deref()
    }

    pub fn session_key(&self) -> Option<&[u8]> {
        self.session_key.as_deref()
    }

    pub fn is_established(&self) -> bool {
        self.session_key.is_some()
    }

    /// Records the peer's secret and derives the session key.
    pub fn accept_peer_secret(&mut self, peer_secret: Vec<u8>) -> Result<(), SessionError> {
        self.peer_secret = Some(peer_secret);
        self.session_key = None;
        let key = derive_session_key(self)?;
        self.session_key = Some(key);
        Ok(())
    }

    fn cipher_op(&self, nonce: &[u8; 12], aad: &[u8], data: &[u8], encrypt: bool) -> Result<Vec<u8>, SessionError> {
        let key = self.session_key.as_deref().ok_or(SessionError::NotEstablished)?;
        let nonce = Nonce::from_slice(nonce);
        let payload = Payload { msg: data, aad };
        let out = match key.len() {
            16 => {
                let c = Aes128Gcm::new_from_slice(key).expect("16-byte key");
                if encrypt { c.encrypt(nonce, payload) } else { c.decrypt(nonce, payload) }
            }
            _ => {
                let c = Aes256Gcm::new_from_slice(key).expect("32-byte key");
                if encrypt { c.encrypt(nonce, payload) } else { c.decrypt(nonce, payload) }
            }
        };
        out.map_err(|_| SessionError::AuthenticationFailure)
    }

    fn aad(env_sender: &str, nonce: &[u8; 12]) -> Vec<u8> {
        let mut aad = Envelope::header_bytes(Mode::SessionData, env_sender);
        aad.extend_from_slice(nonce);
        aad
    }

    /// Encrypts one message and advances the send counter.
    pub fn seal(&mut self, plaintext: &[u8]) -> Result<Envelope, SessionError> {
        if !self.is_established() {
            return Err(SessionError::NotEstablished);
        }
        let counter = self.send_counter;
        let next = counter.checked_add(1).ok_or(SessionError::CounterExhausted)?;
        let mut nonce = [0u8; 12];
        nonce[..4].copy_from_slice(&self.role.send_tag().to_be_bytes());
        nonce[4..].copy_from_slice(&counter.to_be_bytes());
        let ciphertext = self.cipher_op(&nonce, &Self::aad("", &nonce), plaintext, true)?;
        self.send_counter = next;
        Ok(Envelope::sealed("", nonce, ciphertext))
    }

    /// Decrypts a peer message. Counters must strictly increase.
    pub fn open(&mut self, env: &Envelope) -> Result<Vec<u8>, SessionError> {
        if !self.is_established() {
            return Err(SessionError::NotEstablished);
        }
        let Body::Sealed { nonce, ciphertext } = env.body() else {
            return Err(CryptoError::WrongMode { expected: Mode::SessionData, found: env.mode() }.into());
        };
        let tag = u32::from_be_bytes(nonce[..4].try_into().unwrap());
        if tag != self.role.recv_tag() {
            return Err(SessionError::WrongDirection(tag));
        }
        let counter = u64::from_be_bytes(nonce[4..].try_into().unwrap());
        if counter < self.recv_counter {
            return Err(SessionError::Replay { counter, expected: self.recv_counter });
        }
        let plaintext = self.cipher_op(nonce, &Self::aad(env.sender_id(), nonce), ciphertext, false)?;
        self.recv_counter = counter.saturating_add(1);
        Ok(plaintext)
    }
}

/// XOR of both secrets. Fails if the peer secret is missing, the lengths
/// disagree, or the result is all zero.
pub fn derive_session_key(state: &SessionState) -> Result<Vec<u8>, SessionError> {
    let peer = state.peer_secret.as_deref().ok_or(SessionError::MissingPeerSecret)?;
    if peer.len() != state.own_secret.len() {
        return Err(SessionError::Negotiation { own: state.key_bits, peer: peer.len() * 8 });
    }
    let key = xor_secrets(&state.own_secret, peer)?;
    if key.iter().all(|&b| b == 0) {
        return Err(SessionError::DegenerateKey);
    }
    Ok(key)
}

/// First handshake step: a fresh secret for `peer`.
pub fn initiate<R: CryptoRng + RngCore>(
    own: &Identity,
    peer: &PublicKeyRecord,
    key_bits: usize,
    authenticated: bool,
    rng: &mut R,
) -> Result<(SessionState, Envelope), SessionError> {
    let secret = generate_secret(key_bits, rng)?;
    let env = wrap_secret(own, peer, &secret, authenticated, rng)?;
    Ok((SessionState::new(Role::Initiator, secret)?, env))
}

/// Second step: take the initiator's secret, answer with our own, and
/// establish. The responder's secret is redrawn if it equals the
/// initiator's.
pub fn respond<R: CryptoRng + RngCore>(
    own: &Identity,
    initiator: &PublicKeyRecord,
    env: &Envelope,
    authenticated: bool,
    rng: &mut R,
) -> Result<(SessionState, Envelope), SessionError> {
    let signer = (!env.sender_id().is_empty()).then_some(initiator);
    let (bits, peer_secret) = unwrap_secret(own, env, signer)?;
    let mut secret = generate_secret(bits, rng)?;
    while secret == peer_secret {
        secret = generate_secret(bits, rng)?;
    }
    let reply = wrap_secret(own, initiator, &secret, authenticated, rng)?;
    let mut state = SessionState::new(Role::Responder, secret)?;
    state.accept_peer_secret(peer_secret)?;
    Ok((state, reply))
}

/// Final step on the initiator side. On [`SessionError::DegenerateKey`] the
/// initiator starts over with a new secret.
pub fn complete(
    state: &mut SessionState,
    own: &Identity,
    responder: &PublicKeyRecord,
    env: &Envelope,
) -> Result<(), SessionError> {
    let signer = (!env.sender_id().is_empty()).then_some(responder);
    let (bits, secret) = unwrap_secret(own, env, signer)?;
    if bits != state.key_bits {
        return Err(SessionError::Negotiation { own: state.key_bits, peer: bits });
    }
    state.accept_peer_secret(secret)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub from: Role,
    pub mode: Mode,
    pub armored: String,
}

/// Every envelope of one session in wire order, as JSON for analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub key_bits: usize,
    pub authenticated: bool,
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn record(&mut self, from: Role, env: &Envelope) {
        self.entries.push(TranscriptEntry { from, mode: env.mode(), armored: armor(env) });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }
}
