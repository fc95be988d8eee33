//! Publishing a public key as a QR image in the owner's gallery, and
//! fetching and validating a peer's key from theirs.

use std::fmt;

use socialkey_qr::{decode, encode, render, EcLevel, QrError};
use thiserror::Error;

use crate::identity::{Fingerprint, Identity, PublicKeyRecord};
use crate::imagepipe::{decode_raster, encode_png, PipeError};
use crate::portal::{AuthToken, PortalClient, PortalError};
pub use crate::record::{parse_record, serialize_record, RecordError};

pub const KEY_IMAGE_PREFIX: &str = "pubkey-";
pub const KEY_IMAGE_SUFFIX: &str = ".png";
pub const KEY_MODULE_PX: usize = 6;
pub const KEY_QUIET_ZONE: usize = 4;
pub const KEY_EC_LEVEL: EcLevel = EcLevel::H;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error(transparent)]
    Portal(#[from] PortalError),
    #[error("no {KEY_IMAGE_PREFIX}* image in the gallery of {0}")]
    NoKeyImage(String),
    #[error("gallery of {0} holds more than one key image")]
    MultipleKeyImages(String),
    #[error("QR decode failed: {0}")]
    Decode(#[from] QrError),
    #[error("key image unreadable: {0}")]
    Image(#[from] PipeError),
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error("image name {name} does not match key fingerprint {fingerprint}")]
    NameMismatch { name: String, fingerprint: Fingerprint },
    #[error("key image in the gallery of {expected} names owner {found}")]
    OwnerMismatch { expected: String, found: String },
    #[error("pinned fingerprint {expected} but portal serves {found}")]
    PinMismatch { expected: Fingerprint, found: Fingerprint },
}

impl FlowError {
    pub fn category(&self) -> &'static str {
        match self {
            FlowError::Portal(e) => e.category(),
            FlowError::NoKeyImage(_) => "no-key-image",
            FlowError::MultipleKeyImages(_) => "multiple-key-images",
            FlowError::Decode(e) => e.category(),
            FlowError::Image(e) => e.category(),
            FlowError::Record(e) => e.category(),
            FlowError::NameMismatch { .. } | FlowError::OwnerMismatch { .. } => "fingerprint-mismatch",
            FlowError::PinMismatch { .. } => "pin-mismatch",
        }
    }
}

/// Gallery name of a key image: `pubkey-<first 8 hex of fingerprint>.png`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KeyImageName(String);

impl KeyImageName {
    pub fn for_fingerprint(fp: &Fingerprint) -> Self {
        KeyImageName(format!("{KEY_IMAGE_PREFIX}{}{KEY_IMAGE_SUFFIX}", fp.short()))
    }

    pub fn parse(name: &str) -> Option<Self> {
        let hex8 = name.strip_prefix(KEY_IMAGE_PREFIX)?.strip_suffix(KEY_IMAGE_SUFFIX)?;
        let ok = hex8.len() == 8 && hex8.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'));
        ok.then(|| KeyImageName(name.to_string()))
    }

    /// The eight hex digits naming the fingerprint prefix.
    pub fn fingerprint_prefix(&self) -> &str {
        &self.0[KEY_IMAGE_PREFIX.len()..KEY_IMAGE_PREFIX.len() + 8]
    }

    pub fn matches(&self, fp: &Fingerprint) -> bool {
        self.fingerprint_prefix() == fp.short()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for KeyImageName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Any gallery name that claims to be a key image, well-formed or not.
fn looks_like_key_image(name: &str) -> bool {
    name.starts_with(KEY_IMAGE_PREFIX)
}

/// PNG of the record's QR symbol at level H.
pub fn key_image(record: &PublicKeyRecord) -> Result<Vec<u8>, FlowError> {
    let symbol = encode(&serialize_record(record), KEY_EC_LEVEL)?;
    let raster = render(&symbol, KEY_MODULE_PX, KEY_QUIET_ZONE)?;
    Ok(encode_png(&raster)?)
}

pub fn read_key_image(file: &[u8]) -> Result<PublicKeyRecord, FlowError> {
    let raster = decode_raster(file)?;
    let payload = decode(&raster)?;
    Ok(parse_record(&payload)?)
}

/// Uploads `record` as the key image of `owner_id` and removes every other
/// key image, so exactly one remains.
pub fn publish_record<C: PortalClient + ?Sized>(
    client: &C,
    token: &AuthToken,
    owner_id: &str,
    record: &PublicKeyRecord,
) -> Result<KeyImageName, FlowError> {
    let name = KeyImageName::for_fingerprint(&record.fingerprint());
    let file = key_image(record)?;
    client.upload_image(token, owner_id, name.as_str(), &file)?;
    for old in client.list_gallery(Some(token), owner_id)? {
        if looks_like_key_image(&old) && old != name.as_str() {
            match client.delete_image(token, owner_id, &old) {
                Ok(()) | Err(PortalError::NotFound(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(name)
}

pub fn publish_key<C: PortalClient + ?Sized>(
    identity: &Identity,
    client: &C,
    token: &AuthToken,
) -> Result<KeyImageName, FlowError> {
    publish_record(client, token, identity.user_id(), identity.public_record())
}

/// Downloads and validates the key image of `owner_id`. With `pin`, the full
/// fingerprint must equal it.
pub fn fetch_key<C: PortalClient + ?Sized>(
    client: &C,
    requester: Option<&AuthToken>,
    owner_id: &str,
    pin: Option<&Fingerprint>,
) -> Result<PublicKeyRecord, FlowError> {
    let names: Vec<String> =
        client.list_gallery(requester, owner_id)?.into_iter().filter(|n| looks_like_key_image(n)).collect();
    let name = match names.as_slice() {
        [] => return Err(FlowError::NoKeyImage(owner_id.to_string())),
        [one] => one,
        _ => return Err(FlowError::MultipleKeyImages(owner_id.to_string())),
    };
    let file = client.download_image(requester, owner_id, name)?;
    let record = read_key_image(&file)?;
    let fp = record.fingerprint();
    if !KeyImageName::parse(name).is_some_and(|n| n.matches(&fp)) {
        return Err(FlowError::NameMismatch { name: name.clone(), fingerprint: fp });
    }
    if record.owner_id() != owner_id {
        return Err(FlowError::OwnerMismatch { expected: owner_id.to_string(), found: record.owner_id().to_string() });
    }
    if let Some(expected) = pin {
        if *expected != fp {
            return Err(FlowError::PinMismatch { expected: *expected, found: fp });
        }
    }
    Ok(record)
}
