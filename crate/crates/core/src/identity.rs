//! Keypairs, public key records and fingerprints.
//!
//! A fingerprint is SHA-256 over the record's canonical fields, each preceded
//! by its length as a little-endian u32:
//!
//! ```text
//! len ‖ owner_id (UTF-8)
//! len ‖ algorithm_id (1 byte)
//! len ‖ modulus (256 bytes, big-endian)
//! len ‖ public_exponent (minimal big-endian)
//! len ‖ issued_at (u64 little-endian)
//! ```

use std::fmt;
use std::str::FromStr;

use rand::{CryptoRng, RngCore};
use rsa::traits::PublicKeyParts;
use rsa::{BigUint, RsaPrivateKey, RsaPublicKey};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const ALG_RSA_2048: u8 = 0x01;
pub const MODULUS_BITS: usize = 2048;
pub const MODULUS_LEN: usize = MODULUS_BITS / 8;
pub const MAX_EXPONENT_LEN: usize = 8;
pub const MAX_USER_ID_LEN: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdentityError {
    #[error("invalid user id: {0}")]
    InvalidUserId(&'static str),
    #[error("unsupported algorithm id {0:#04x}")]
    UnsupportedAlgorithm(u8),
    #[error("modulus must be exactly {MODULUS_BITS} bits")]
    BadModulus,
    #[error("public exponent must be 1 to {MAX_EXPONENT_LEN} bytes without leading zeros")]
    BadExponent,
    #[error("key generation failed: {0}")]
    KeyGeneration(String),
    #[error("public and private halves do not match")]
    KeyMismatch,
}

impl IdentityError {
    pub fn category(&self) -> &'static str {
        match self {
            IdentityError::InvalidUserId(_) => "invalid-user-id",
            IdentityError::UnsupportedAlgorithm(_) => "unsupported-algorithm",
            IdentityError::BadModulus => "bad-modulus",
            IdentityError::BadExponent => "bad-exponent",
            IdentityError::KeyGeneration(_) => "key-generation",
            IdentityError::KeyMismatch => "key-mismatch",
        }
    }
}

pub fn validate_user_id(user_id: &str) -> Result<(), IdentityError> {
    if user_id.is_empty() {
        return Err(IdentityError::InvalidUserId("empty"));
    }
    if user_id.len() > MAX_USER_ID_LEN {
        return Err(IdentityError::InvalidUserId("longer than 64 bytes"));
    }
    if user_id.chars().any(char::is_control) {
        return Err(IdentityError::InvalidUserId("contains control characters"));
    }
    Ok(())
}

/// SHA-256 key fingerprint.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// First 8 hex characters, as used in key image names.
    pub fn short(&self) -> String {
        hex::encode(&self.0[..4])
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", self.to_hex())
    }
}

impl FromStr for Fingerprint {
    type Err = hex::FromHexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = [0u8; 32];
        hex::decode_to_slice(s.trim(), &mut out)?;
        Ok(Fingerprint(out))
    }
}

/// A published public key with its owner and issue time.
#[derive(Clone, PartialEq, Eq)]
pub struct PublicKeyRecord {
    owner_id: String,
    algorithm_id: u8,
    modulus: [u8; MODULUS_LEN],
    public_exponent: Vec<u8>,
    issued_at: u64,
    fingerprint: Fingerprint,
}

impl fmt::Debug for PublicKeyRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PublicKeyRecord")
            .field("owner_id", &self.owner_id)
            .field("issued_at", &self.issued_at)
            .field("fingerprint", &self.fingerprint)
            .finish_non_exhaustive()
    }
}

impl PublicKeyRecord {
    /// Builds a record from raw fields and computes its fingerprint.
    pub fn from_parts(
        owner_id: &str,
        algorithm_id: u8,
        modulus: &[u8],
        public_exponent: &[u8],
        issued_at: u64,
    ) -> Result<Self, IdentityError> {
        validate_user_id(owner_id)?;
        if algorithm_id != ALG_RSA_2048 {
            return Err(IdentityError::UnsupportedAlgorithm(algorithm_id));
        }
        let modulus: [u8; MODULUS_LEN] = modulus.try_into().map_err(|_| IdentityError::BadModulus)?;
        if modulus[0] & 0x80 == 0 {
            return Err(IdentityError::BadModulus);
        }
        if public_exponent.is_empty() || public_exponent.len() > MAX_EXPONENT_LEN || public_exponent[0] == 0 {
            return Err(IdentityError::BadExponent);
        }
        let fingerprint = compute_fingerprint(owner_id, algorithm_id, &modulus, public_exponent, issued_at);
        Ok(PublicKeyRecord {
            owner_id: owner_id.to_string(),
            algorithm_id,
            modulus,
            public_exponent: public_exponent.to_vec(),
            issued_at,
            fingerprint,
        })
    }

    pub fn from_public_key(owner_id: &str, key: &RsaPublicKey, issued_at: u64) -> Result<Self, IdentityError> {
        let n = key.n().to_bytes_be();
        if n.len() != MODULUS_LEN {
            return Err(IdentityError::BadModulus);
        }
        Self::from_parts(owner_id, ALG_RSA_2048, &n, &key.e().to_bytes_be(), issued_at)
    }

    pub fn owner_id(&self) -> &str {
        &self.owner_id
    }

    pub fn algorithm_id(&self) -> u8 {
        self.algorithm_id
    }

    pub fn modulus(&self) -> &[u8; MODULUS_LEN] {
        &self.modulus
    }

    pub fn public_exponent(&self) -> &[u8] {
        &self.public_exponent
    }

    pub fn issued_at(&self) -> u64 {
        self.issued_at
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn public_key(&self) -> Result<RsaPublicKey, IdentityError> {
        RsaPublicKey::new(
            BigUint::from_bytes_be(&self.modulus),
            BigUint::from_bytes_be(&self.public_exponent),
        )
        .map_err(|_| IdentityError::BadExponent)
    }
}

/// Recomputes the fingerprint of a record from its fields.
pub fn fingerprint(record: &PublicKeyRecord) -> Fingerprint {
    compute_fingerprint(
        &record.owner_id,
        record.algorithm_id,
        &record.modulus,
        &record.public_exponent,
        record.issued_at,
    )
}

pub(crate) fn canonical_bytes(
    owner_id: &str,
    algorithm_id: u8,
    modulus: &[u8],
    public_exponent: &[u8],
    issued_at: u64,
) -> Vec<u8> {
    let fields: [&[u8]; 5] = [
        owner_id.as_bytes(),
        &[algorithm_id],
        modulus,
        public_exponent,
        &issued_at.to_le_bytes(),
    ];
    let mut out = Vec::with_capacity(20 + fields.iter().map(|f| f.len()).sum::<usize>());
    for field in fields {
        out.extend_from_slice(&(field.len() as u32).to_le_bytes());
        out.extend_from_slice(field);
    }
    out
}

fn compute_fingerprint(
    owner_id: &str,
    algorithm_id: u8,
    modulus: &[u8],
    public_exponent: &[u8],
    issued_at: u64,
) -> Fingerprint {
    let bytes = canonical_bytes(owner_id, algorithm_id, modulus, public_exponent, issued_at);
    Fingerprint(Sha256::digest(bytes).into())
}

/// A local user's keypair.
#[derive(Clone)]
pub struct Identity {
    user_id: String,
    private: RsaPrivateKey,
    created_at: u64,
    record: PublicKeyRecord,
}

impl fmt::Debug for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Identity")
            .field("user_id", &self.user_id)
            .field("created_at", &self.created_at)
            .field("fingerprint", &self.record.fingerprint)
            .finish_non_exhaustive()
    }
}

impl PartialEq for Identity {
    fn eq(&self, other: &Self) -> bool {
        self.user_id == other.user_id && self.created_at == other.created_at && self.private == other.private
    }
}

impl Eq for Identity {}

impl Identity {
    /// Wraps an existing private key, checking the modulus size and that the
    /// halves sign and verify.
    pub fn from_private_key(user_id: &str, private: RsaPrivateKey, created_at: u64) -> Result<Self, IdentityError> {
        validate_user_id(user_id)?;
        if private.size() != MODULUS_LEN || private.n().bits() != MODULUS_BITS {
            return Err(IdentityError::BadModulus);
        }
        private.validate().map_err(|_| IdentityError::KeyMismatch)?;
        let record = PublicKeyRecord::from_public_key(user_id, &private.to_public_key(), created_at)?;
        Ok(Identity { user_id: user_id.to_string(), private, created_at, record })
    }

    pub fn user_id(&self) -> &str {
        &self.user_id
    }

    pub fn created_at(&self) -> u64 {
        self.created_at
    }

    pub fn private_key(&self) -> &RsaPrivateKey {
        &self.private
    }

    pub fn public_key(&self) -> RsaPublicKey {
        self.private.to_public_key()
    }

    pub fn public_record(&self) -> &PublicKeyRecord {
        &self.record
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.record.fingerprint
    }
}

/// Generates a fresh identity using the operating system's CSPRNG.
pub fn generate_identity(user_id: &str) -> Result<Identity, IdentityError> {
    generate_identity_with(user_id, now_secs(), &mut rand::rngs::OsRng)
}

pub fn generate_identity_with<R: CryptoRng + RngCore>(
    user_id: &str,
    created_at: u64,
    rng: &mut R,
) -> Result<Identity, IdentityError> {
    validate_user_id(user_id)?;
    let private = RsaPrivateKey::new(rng, MODULUS_BITS).map_err(|e| IdentityError::KeyGeneration(e.to_string()))?;
    Identity::from_private_key(user_id, private, created_at)
}

pub fn now_secs() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::sync::OnceLock;

    /// A small pool of deterministic identities shared by unit tests, so the
    /// suite does not pay for a fresh RSA keygen in every test.
    pub fn identity(ix: usize) -> Identity {
        static POOL: OnceLock<Vec<Identity>> = OnceLock::new();
        let pool = POOL.get_or_init(|| {
            let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
            ["alice", "bob", "mallory", "carol"]
                .iter()
                .map(|name| generate_identity_with(name, 1_700_000_000, &mut rng).unwrap())
                .collect()
        });
        pool[ix].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::identity;
    use super::*;
    use rsa::pss::{SigningKey, VerifyingKey};
    use rsa::signature::{RandomizedSigner, Verifier};
    use rand::SeedableRng;

    #[test]
    fn user_id_bounds() {
        assert_eq!(validate_user_id(""), Err(IdentityError::InvalidUserId("empty")));
        assert!(validate_user_id(&"a".repeat(64)).is_ok());
        assert!(validate_user_id(&"a".repeat(65)).is_err());
        // 64 bytes of UTF-8 but only 32 chars is still fine; 66 bytes is not.
        assert!(validate_user_id(&"é".repeat(32)).is_ok());
        assert!(validate_user_id(&"é".repeat(33)).is_err());
        assert!(generate_identity("").is_err());
    }

    #[test]
    fn generated_key_has_2048_bit_modulus() {
        let alice = identity(0);
        assert_eq!(alice.private_key().n().bits(), 2048);
        assert_eq!(alice.public_record().modulus().len(), 256);
        assert_eq!(alice.public_record().public_exponent(), &[1, 0, 1]);
        assert_eq!(fingerprint(alice.public_record()), alice.fingerprint());
    }

    #[test]
    fn sign_verify_round_trip_over_random_messages() {
        let alice = identity(0);
        let signer = SigningKey::<Sha256>::new(alice.private_key().clone());
        let verifier = VerifyingKey::<Sha256>::new(alice.public_key());
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(9);
        for i in 0..100 {
            let mut msg = vec![0u8; i * 7];
            rng.fill_bytes(&mut msg);
            let sig = signer.sign_with_rng(&mut rng, &msg);
            assert!(verifier.verify(&msg, &sig).is_ok());
        }
    }

    #[test]
    fn fingerprint_changes_with_every_modulus_byte() {
        let rec = identity(1).public_record().clone();
        let base = rec.fingerprint();
        for i in 1..MODULUS_LEN {
            let mut m = *rec.modulus();
            m[i] ^= 0x01;
            let other = PublicKeyRecord::from_parts("bob", ALG_RSA_2048, &m, &[1, 0, 1], rec.issued_at()).unwrap();
            assert_ne!(other.fingerprint(), base, "byte {i}");
        }
    }

    #[test]
    fn fingerprint_is_injective_over_sample() {
        let rec = identity(0).public_record().clone();
        let mut seen = std::collections::HashSet::new();
        for t in 0..10_000u64 {
            let r = PublicKeyRecord::from_parts("alice", ALG_RSA_2048, rec.modulus(), &[1, 0, 1], t).unwrap();
            assert!(seen.insert(r.fingerprint()));
        }
    }

    #[test]
    fn golden_fingerprint() {
        // Digest computed with Python hashlib over the documented layout:
        // owner "alice", modulus bytes 0x80,1,2,...,255, exponent 01 00 01,
        // issued_at 1700000000.
        let mut modulus = [0u8; 256];
        for (i, b) in modulus.iter_mut().enumerate() {
            *b = i as u8;
        }
        modulus[0] = 0x80;
        let rec = PublicKeyRecord::from_parts("alice", ALG_RSA_2048, &modulus, &[1, 0, 1], 1_700_000_000).unwrap();
        assert_eq!(rec.fingerprint().to_hex(), include_str!("../tests/fixtures/golden_fingerprint.hex").trim());
    }

    #[test]
    fn record_rejects_bad_fields() {
        let rec = identity(0).public_record().clone();
        assert_eq!(
            PublicKeyRecord::from_parts("alice", 2, rec.modulus(), &[1, 0, 1], 0),
            Err(IdentityError::UnsupportedAlgorithm(2))
        );
        assert_eq!(
            PublicKeyRecord::from_parts("alice", 1, &rec.modulus()[1..], &[1, 0, 1], 0),
            Err(IdentityError::BadModulus)
        );
        assert_eq!(
            PublicKeyRecord::from_parts("alice", 1, rec.modulus(), &[0, 1, 0, 1], 0),
            Err(IdentityError::BadExponent)
        );
        assert_eq!(
            PublicKeyRecord::from_parts("alice", 1, rec.modulus(), &[1; 9], 0),
            Err(IdentityError::BadExponent)
        );
    }

    #[test]
    fn fingerprint_hex_round_trip() {
        let fp = identity(0).fingerprint();
        assert_eq!(fp.to_hex().parse::<Fingerprint>().unwrap(), fp);
        assert_eq!(fp.short().len(), 8);
        assert!("zz".parse::<Fingerprint>().is_err());
    }
}
