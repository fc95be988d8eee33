//! Passphrase-protected key storage.
//!
//! ```text
//! "QKS1" | version 0x01 | salt (16) | pbkdf2 iterations u32 LE | entry count u32 LE
//! entries: u32 LE length ‖ entry
//! SHA-256 of every preceding byte
//!
//! entry 0x01 (own identity):  u8 len ‖ user_id | created_at u64 LE | nonce (12)
//!                             | u32 LE len ‖ AES-256-GCM(PKCS#1 DER private key)
//! entry 0x02 (peer record):   serialized record
//! ```
//!
//! The AES key is PBKDF2-HMAC-SHA256 of the passphrase; the AAD of each
//! private key is the magic followed by its user id.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes256Gcm, Nonce};
use rand::{rngs::OsRng, RngCore};
use rsa::pkcs1::{DecodeRsaPrivateKey, EncodeRsaPrivateKey};
use rsa::RsaPrivateKey;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::identity::{Identity, IdentityError, PublicKeyRecord};
use crate::record::{parse_record, serialize_record, Reader, RecordError};

pub const KEYSTORE_MAGIC: &[u8; 4] = b"QKS1";
pub const KEYSTORE_VERSION: u8 = 1;
pub const DEFAULT_KDF_ITERATIONS: u32 = 100_000;
pub const PASSPHRASE_ENV: &str = "QK_PASSPHRASE";

const KIND_OWN: u8 = 1;
const KIND_PEER: u8 = 2;

#[derive(Debug, Error)]
pub enum KeystoreError {
    #[error("keystore not found: {0}")]
    NotFound(PathBuf),
    #[error("keystore I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("keystore corrupt: {0}")]
    Corrupt(String),
    #[error("wrong passphrase")]
    WrongPassphrase,
    #[error("no entry for {0}")]
    UnknownEntry(String),
    #[error("{0} is a local identity; refusing to overwrite it with a peer key")]
    OwnEntryExists(String),
}

impl KeystoreError {
    pub fn category(&self) -> &'static str {
        match self {
            KeystoreError::NotFound(_) => "keystore-not-found",
            KeystoreError::Io(_) => "io",
            KeystoreError::Corrupt(_) => "keystore-corrupt",
            KeystoreError::WrongPassphrase => "wrong-passphrase",
            KeystoreError::UnknownEntry(_) => "unknown-entry",
            KeystoreError::OwnEntryExists(_) => "own-entry-exists",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyEntry {
    Own(Identity),
    Peer(PublicKeyRecord),
}

impl KeyEntry {
    pub fn record(&self) -> &PublicKeyRecord {
        match self {
            KeyEntry::Own(id) => id.public_record(),
            KeyEntry::Peer(rec) => rec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Keystore {
    path: PathBuf,
    entries: BTreeMap<String, KeyEntry>,
    iterations: u32,
}

impl Keystore {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Keystore { path: path.into(), entries: BTreeMap::new(), iterations: DEFAULT_KDF_ITERATIONS }
    }

    /// Overrides the PBKDF2 iteration count used by the next save.
    pub fn with_iterations(mut self, iterations: u32) -> Self {
        self.iterations = iterations.max(1);
        self
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &BTreeMap<String, KeyEntry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert_identity(&mut self, identity: Identity) {
        self.entries.insert(identity.user_id().to_string(), KeyEntry::Own(identity));
    }

    pub fn insert_peer(&mut self, record: PublicKeyRecord) -> Result<(), KeystoreError> {
        let id = record.owner_id().to_string();
        if let Some(KeyEntry::Own(_)) = self.entries.get(&id) {
            return Err(KeystoreError::OwnEntryExists(id));
        }
        self.entries.insert(id, KeyEntry::Peer(record));
        Ok(())
    }

    pub fn get(&self, user_id: &str) -> Option<&KeyEntry> {
        self.entries.get(user_id)
    }

    pub fn identity(&self, user_id: &str) -> Result<&Identity, KeystoreError> {
        match self.entries.get(user_id) {
            Some(KeyEntry::Own(id)) => Ok(id),
            _ => Err(KeystoreError::UnknownEntry(user_id.to_string())),
        }
    }

    /// Public record for any entry, local or peer.
    pub fn record(&self, user_id: &str) -> Result<&PublicKeyRecord, KeystoreError> {
        self.entries
            .get(user_id)
            .map(KeyEntry::record)
            .ok_or_else(|| KeystoreError::UnknownEntry(user_id.to_string()))
    }

    pub fn remove(&mut self, user_id: &str) -> Option<KeyEntry> {
        self.entries.remove(user_id)
    }
}

fn derive_key(passphrase: &str, salt: &[u8], iterations: u32) -> Aes256Gcm {
    let mut key = [0u8; 32];
    pbkdf2::pbkdf2_hmac::<Sha256>(passphrase.as_bytes(), salt, iterations, &mut key);
    Aes256Gcm::new(&key.into())
}

fn aad(user_id: &str) -> Vec<u8> {
    let mut out = KEYSTORE_MAGIC.to_vec();
    out.extend_from_slice(user_id.as_bytes());
    out
}

/// Serializes a store to bytes. Fresh salt and nonces are drawn on every call.
pub fn encode_keystore(store: &Keystore, passphrase: &str) -> Vec<u8> {
    let mut salt = [0u8; 16];
    OsRng.fill_bytes(&mut salt);
    let cipher = derive_key(passphrase, &salt, store.iterations);

    let mut out = Vec::new();
    out.extend_from_slice(KEYSTORE_MAGIC);
    out.push(KEYSTORE_VERSION);
    out.extend_from_slice(&salt);
    out.extend_from_slice(&store.iterations.to_le_bytes());
    out.extend_from_slice(&(store.entries.len() as u32).to_le_bytes());
    for entry in store.entries.values() {
        let mut body = Vec::new();
        match entry {
            KeyEntry::Own(id) => {
                body.push(KIND_OWN);
                body.push(id.user_id().len() as u8);
                body.extend_from_slice(id.user_id().as_bytes());
                body.extend_from_slice(&id.created_at().to_le_bytes());
                let mut nonce = [0u8; 12];
                OsRng.fill_bytes(&mut nonce);
                let der = id.private_key().to_pkcs1_der().expect("DER encoding of a valid key");
                let sealed = cipher
                    .encrypt(Nonce::from_slice(&nonce), Payload { msg: der.as_bytes(), aad: &aad(id.user_id()) })
                    .expect("AES-GCM encryption does not fail for in-memory buffers");
                body.extend_from_slice(&nonce);
                body.extend_from_slice(&(sealed.len() as u32).to_le_bytes());
                body.extend_from_slice(&sealed);
            }
            KeyEntry::Peer(rec) => {
                body.push(KIND_PEER);
                body.extend_from_slice(&serialize_record(rec));
            }
        }
        out.extend_from_slice(&(body.len() as u32).to_le_bytes());
        out.extend_from_slice(&body);
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

fn corrupt(msg: impl Into<String>) -> KeystoreError {
    KeystoreError::Corrupt(msg.into())
}

pub fn decode_keystore(path: impl Into<PathBuf>, bytes: &[u8], passphrase: &str) -> Result<Keystore, KeystoreError> {
    if bytes.len() < 32 {
        return Err(corrupt("file too short"));
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("digest mismatch"));
    }
    let mut r = Reader::new(body);
    let short = || corrupt("truncated");
    if r.take(4).ok_or_else(short)? != KEYSTORE_MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = r.u8().ok_or_else(short)?;
    if version != KEYSTORE_VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let salt = r.take(16).ok_or_else(short)?;
    let iterations = r.u32_le().ok_or_else(short)?;
    if iterations == 0 {
        return Err(corrupt("zero kdf iterations"));
    }
    let count = r.u32_le().ok_or_else(short)?;
    let mut cipher = None;
    let mut store = Keystore::new(path).with_iterations(iterations);
    for _ in 0..count {
        let len = r.u32_le().ok_or_else(short)? as usize;
        let entry = r.take(len).ok_or_else(short)?;
        let mut e = Reader::new(entry);
        match e.u8().ok_or_else(short)? {
            KIND_OWN => {
                let id_len = e.u8().ok_or_else(short)? as usize;
                let user_id = std::str::from_utf8(e.take(id_len).ok_or_else(short)?)
                    .map_err(|_| corrupt("user id not UTF-8"))?;
                let created_at = e.u64_le().ok_or_else(short)?;
                let nonce = e.take(12).ok_or_else(short)?;
                let ct_len = e.u32_le().ok_or_else(short)? as usize;
                let ct = e.take(ct_len).ok_or_else(short)?;
                if e.remaining() != 0 {
                    return Err(corrupt("trailing bytes in entry"));
                }
                let cipher = cipher.get_or_insert_with(|| derive_key(passphrase, salt, iterations));
                let der = cipher
                    .decrypt(Nonce::from_slice(nonce), Payload { msg: ct, aad: &aad(user_id) })
                    .map_err(|_| KeystoreError::WrongPassphrase)?;
                let key = RsaPrivateKey::from_pkcs1_der(&der).map_err(|e| corrupt(e.to_string()))?;
                let id = Identity::from_private_key(user_id, key, created_at)
                    .map_err(|e: IdentityError| corrupt(e.to_string()))?;
                store.insert_identity(id);
            }
            KIND_PEER => {
                let rec = parse_record(&entry[1..]).map_err(|e: RecordError| corrupt(e.to_string()))?;
                store.insert_peer(rec)?;
            }
            kind => return Err(corrupt(format!("unknown entry kind {kind}"))),
        }
    }
    if r.remaining() != 0 {
        return Err(corrupt("trailing bytes"));
    }
    Ok(store)
}

/// Writes the store to its path, replacing the previous file atomically.
pub fn save_keystore(store: &Keystore, passphrase: &str) -> Result<(), KeystoreError> {
    let bytes = encode_keystore(store, passphrase);
    if let Some(dir) = store.path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut tmp = store.path.clone().into_os_string();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, &store.path)?;
    Ok(())
}

pub fn load_keystore(path: impl AsRef<Path>, passphrase: &str) -> Result<Keystore, KeystoreError> {
    let path = path.as_ref();
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(KeystoreError::NotFound(path.to_path_buf())),
        Err(e) => return Err(e.into()),
    };
    decode_keystore(path, &bytes, passphrase)
}
