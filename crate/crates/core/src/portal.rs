//! In-memory social portal: accounts, galleries run through the upload
//! pipeline, friend lists and gallery visibility.
//!
//! [`Portal`] is the service state. [`PortalClient`] is the request surface
//! shared by the in-process portal and the HTTP client, so the key flows run
//! unchanged against either.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Mutex, RwLock};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::{now_secs, validate_user_id, IdentityError};
use crate::imagepipe::{optimize, OptimizationProfile, PipeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PortalError {
    #[error("account {0} already exists")]
    Conflict(String),
    #[error(transparent)]
    InvalidUserId(#[from] IdentityError),
    #[error("missing or invalid auth token")]
    Unauthorized,
    #[error("gallery of {0} is not visible to this requester")]
    Forbidden(String),
    #[error("no account {0}")]
    UnknownAccount(String),
    #[error("no gallery entry {0}")]
    NotFound(String),
    #[error("invalid image name: {0}")]
    InvalidName(&'static str),
    #[error("image rejected: {0}")]
    BadImage(#[from] PipeError),
    #[error("portal unreachable: {0}")]
    Unreachable(String),
    #[error("portal protocol error: {0}")]
    Protocol(String),
    #[error("snapshot error: {0}")]
    Snapshot(String),
    /// An error reported by a remote portal that has no local detail type.
    #[error("{message}")]
    Rejected { category: &'static str, message: String },
}

impl PortalError {
    pub fn category(&self) -> &'static str {
        match self {
            PortalError::Conflict(_) => "conflict",
            PortalError::InvalidUserId(_) => "invalid-user-id",
            PortalError::Unauthorized => "unauthorized",
            PortalError::Forbidden(_) => "forbidden",
            PortalError::UnknownAccount(_) => "unknown-account",
            PortalError::NotFound(_) => "not-found",
            PortalError::InvalidName(_) => "invalid-name",
            PortalError::BadImage(_) => "bad-image",
            PortalError::Unreachable(_) => "portal-unreachable",
            PortalError::Protocol(_) => "protocol",
            PortalError::Snapshot(_) => "snapshot",
            PortalError::Rejected { category, .. } => category,
        }
    }
}

/// Bearer token for one account.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuthToken(pub String);

impl AuthToken {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for AuthToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AuthToken({}…)", &self.0[..self.0.len().min(6)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    #[default]
    Public,
    Friends,
}

impl FromStr for Visibility {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "public" => Ok(Visibility::Public),
            "friends" => Ok(Visibility::Friends),
            other => Err(format!("unknown visibility {other:?}, expected public or friends")),
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Visibility::Public => "public",
            Visibility::Friends => "friends",
        })
    }
}

mod b64 {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let text = String::deserialize(d)?;
        STANDARD.decode(text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalleryEntry {
    pub name: String,
    #[serde(with = "b64")]
    pub image: Vec<u8>,
    pub uploaded_at: u64,
}

/// What an upload returns: the stored entry without its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryInfo {
    pub name: String,
    pub size: usize,
    pub uploaded_at: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub user_id: String,
    pub auth_token: AuthToken,
    pub gallery: Vec<GalleryEntry>,
    pub visibility: Visibility,
    pub friends: BTreeSet<String>,
}

impl Account {
    fn can_read(&self, requester: Option<&str>) -> bool {
        match self.visibility {
            Visibility::Public => true,
            Visibility::Friends => {
                requester.is_some_and(|r| r == self.user_id || self.friends.contains(r))
            }
        }
    }
}

/// Complete portal state, as written to a snapshot file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortalSnapshot {
    pub accounts: BTreeMap<String, Account>,
}

pub fn validate_image_name(name: &str) -> Result<(), PortalError> {
    if name.is_empty() || name.len() > 128 {
        return Err(PortalError::InvalidName("must be 1 to 128 bytes"));
    }
    if name.starts_with('.') {
        return Err(PortalError::InvalidName("must not start with a dot"));
    }
    if !name.bytes().all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-')) {
        return Err(PortalError::InvalidName("allowed characters are A-Z a-z 0-9 . _ -"));
    }
    Ok(())
}

enum Clock {
    System,
    Logical(AtomicU64),
}

pub struct Portal {
    state: RwLock<PortalSnapshot>,
    profile: OptimizationProfile,
    rng: Mutex<ChaCha20Rng>,
    clock: Clock,
}

impl Default for Portal {
    fn default() -> Self {
        Self::new(OptimizationProfile::default())
    }
}

impl Portal {
    pub fn new(profile: OptimizationProfile) -> Self {
        Portal {
            state: RwLock::new(PortalSnapshot::default()),
            profile,
            rng: Mutex::new(ChaCha20Rng::from_entropy()),
            clock: Clock::System,
        }
    }

    /// Deterministic portal: tokens from a seeded generator and a logical
    /// clock that ticks once per upload.
    pub fn seeded(profile: OptimizationProfile, seed: u64) -> Self {
        Portal {
            state: RwLock::new(PortalSnapshot::default()),
            profile,
            rng: Mutex::new(ChaCha20Rng::seed_from_u64(seed)),
            clock: Clock::Logical(AtomicU64::new(0)),
        }
    }

    pub fn from_snapshot(profile: OptimizationProfile, snapshot: PortalSnapshot) -> Self {
        let portal = Self::new(profile);
        *portal.state.write().unwrap() = snapshot;
        portal
    }

    pub fn profile(&self) -> &OptimizationProfile {
        &self.profile
    }

    pub fn snapshot(&self) -> PortalSnapshot {
        self.state.read().unwrap().clone()
    }

    pub fn save_snapshot(&self, path: &Path) -> Result<(), PortalError> {
        let json = serde_json::to_vec(&self.snapshot()).map_err(|e| PortalError::Snapshot(e.to_string()))?;
        std::fs::write(path, json).map_err(|e| PortalError::Snapshot(e.to_string()))
    }

    pub fn load_snapshot(profile: OptimizationProfile, path: &Path) -> Result<Self, PortalError> {
        let bytes = std::fs::read(path).map_err(|e| PortalError::Snapshot(e.to_string()))?;
        let snapshot = serde_json::from_slice(&bytes).map_err(|e| PortalError::Snapshot(e.to_string()))?;
        Ok(Self::from_snapshot(profile, snapshot))
    }

    fn now(&self) -> u64 {
        match &self.clock {
            Clock::System => now_secs(),
            Clock::Logical(t) => t.fetch_add(1, Ordering::SeqCst) + 1,
        }
    }

    fn new_token(&self) -> AuthToken {
        let mut bytes = [0u8; 32];
        self.rng.lock().unwrap().fill_bytes(&mut bytes);
        AuthToken(hex::encode(bytes))
    }

    pub fn create_account(&self, user_id: &str) -> Result<AuthToken, PortalError> {
        validate_user_id(user_id)?;
        let token = self.new_token();
        let mut state = self.state.write().unwrap();
        if state.accounts.contains_key(user_id) {
            return Err(PortalError::Conflict(user_id.to_string()));
        }
        state.accounts.insert(
            user_id.to_string(),
            Account {
                user_id: user_id.to_string(),
                auth_token: token.clone(),
                gallery: Vec::new(),
                visibility: Visibility::Public,
                friends: BTreeSet::new(),
            },
        );
        Ok(token)
    }

    /// Account id the token belongs to.
    pub fn resolve_token(&self, token: &AuthToken) -> Option<String> {
        self.state
            .read()
            .unwrap()
            .accounts
            .values()
            .find(|a| a.auth_token == *token)
            .map(|a| a.user_id.clone())
    }

    fn with_owned_account<T>(
        &self,
        token: &AuthToken,
        f: impl FnOnce(&mut Account, &BTreeMap<String, Account>) -> Result<T, PortalError>,
    ) -> Result<T, PortalError> {
        let mut state = self.state.write().unwrap();
        let id = state
            .accounts
            .values()
            .find(|a| a.auth_token == *token)
            .map(|a| a.user_id.clone())
            .ok_or(PortalError::Unauthorized)?;
        let mut account = state.accounts.remove(&id).expect("resolved above");
        let result = f(&mut account, &state.accounts);
        state.accounts.insert(id, account);
        result
    }

    /// Stores `optimize(file)` under `name`, replacing any entry of that name.
    pub fn upload_image(&self, token: &AuthToken, name: &str, file: &[u8]) -> Result<EntryInfo, PortalError> {
        if self.resolve_token(token).is_none() {
            return Err(PortalError::Unauthorized);
        }
        validate_image_name(name)?;
        let image = optimize(file, &self.profile)?;
        let uploaded_at = self.now();
        self.with_owned_account(token, |account, _| {
            let info = EntryInfo { name: name.to_string(), size: image.len(), uploaded_at };
            let entry = GalleryEntry { name: name.to_string(), image, uploaded_at };
            match account.gallery.iter_mut().find(|e| e.name == name) {
                Some(existing) => *existing = entry,
                None => account.gallery.push(entry),
            }
            Ok(info)
        })
    }

    pub fn delete_image(&self, token: &AuthToken, name: &str) -> Result<(), PortalError> {
        self.with_owned_account(token, |account, _| {
            let before = account.gallery.len();
            account.gallery.retain(|e| e.name != name);
            if account.gallery.len() == before {
                return Err(PortalError::NotFound(name.to_string()));
            }
            Ok(())
        })
    }

    pub fn add_friend(&self, token: &AuthToken, friend_id: &str) -> Result<(), PortalError> {
        self.with_owned_account(token, |account, others| {
            if friend_id != account.user_id && !others.contains_key(friend_id) {
                return Err(PortalError::UnknownAccount(friend_id.to_string()));
            }
            account.friends.insert(friend_id.to_string());
            Ok(())
        })
    }

    pub fn set_visibility(&self, token: &AuthToken, mode: Visibility) -> Result<(), PortalError> {
        self.with_owned_account(token, |account, _| {
            account.visibility = mode;
            Ok(())
        })
    }

    fn readable<T>(
        &self,
        requester: Option<&str>,
        owner_id: &str,
        f: impl FnOnce(&Account) -> Result<T, PortalError>,
    ) -> Result<T, PortalError> {
        let state = self.state.read().unwrap();
        let account = state
            .accounts
            .get(owner_id)
            .ok_or_else(|| PortalError::UnknownAccount(owner_id.to_string()))?;
        if !account.can_read(requester) {
            return Err(PortalError::Forbidden(owner_id.to_string()));
        }
        f(account)
    }

    /// Entry names in upload order. `requester` is an authenticated account
    /// id, or `None` for an anonymous reader.
    pub fn list_gallery(&self, requester: Option<&str>, owner_id: &str) -> Result<Vec<String>, PortalError> {
        self.readable(requester, owner_id, |a| Ok(a.gallery.iter().map(|e| e.name.clone()).collect()))
    }

    pub fn download_image(&self, requester: Option<&str>, owner_id: &str, name: &str) -> Result<Vec<u8>, PortalError> {
        self.readable(requester, owner_id, |a| {
            a.gallery
                .iter()
                .find(|e| e.name == name)
                .map(|e| e.image.clone())
                .ok_or_else(|| PortalError::NotFound(name.to_string()))
        })
    }

    fn requester(&self, token: Option<&AuthToken>) -> Result<Option<String>, PortalError> {
        match token {
            None => Ok(None),
            Some(t) => self.resolve_token(t).map(Some).ok_or(PortalError::Unauthorized),
        }
    }

    fn require_owner(&self, token: &AuthToken, owner_id: &str) -> Result<(), PortalError> {
        match self.resolve_token(token) {
            Some(id) if id == owner_id => Ok(()),
            _ => Err(PortalError::Unauthorized),
        }
    }
}

/// Request surface of a portal, local or remote. Mutations name the account
/// in the path and must carry that account's token; reads may be anonymous.
pub trait PortalClient {
    fn create_account(&self, user_id: &str) -> Result<AuthToken, PortalError>;
    fn upload_image(&self, token: &AuthToken, owner_id: &str, name: &str, file: &[u8]) -> Result<EntryInfo, PortalError>;
    fn delete_image(&self, token: &AuthToken, owner_id: &str, name: &str) -> Result<(), PortalError>;
    fn list_gallery(&self, token: Option<&AuthToken>, owner_id: &str) -> Result<Vec<String>, PortalError>;
    fn download_image(&self, token: Option<&AuthToken>, owner_id: &str, name: &str) -> Result<Vec<u8>, PortalError>;
    fn add_friend(&self, token: &AuthToken, owner_id: &str, friend_id: &str) -> Result<(), PortalError>;
    fn set_visibility(&self, token: &AuthToken, owner_id: &str, mode: Visibility) -> Result<(), PortalError>;
}

impl PortalClient for Portal {
    fn create_account(&self, user_id: &str) -> Result<AuthToken, PortalError> {
        Portal::create_account(self, user_id)
    }

    fn upload_image(&self, token: &AuthToken, owner_id: &str, name: &str, file: &[u8]) -> Result<EntryInfo, PortalError> {
        self.require_owner(token, owner_id)?;
        Portal::upload_image(self, token, name, file)
    }

    fn delete_image(&self, token: &AuthToken, owner_id: &str, name: &str) -> Result<(), PortalError> {
        self.require_owner(token, owner_id)?;
        Portal::delete_image(self, token, name)
    }

    fn list_gallery(&self, token: Option<&AuthToken>, owner_id: &str) -> Result<Vec<String>, PortalError> {
        let requester = self.requester(token)?;
        Portal::list_gallery(self, requester.as_deref(), owner_id)
    }

    fn download_image(&self, token: Option<&AuthToken>, owner_id: &str, name: &str) -> Result<Vec<u8>, PortalError> {
        let requester = self.requester(token)?;
        Portal::download_image(self, requester.as_deref(), owner_id, name)
    }

    fn add_friend(&self, token: &AuthToken, owner_id: &str, friend_id: &str) -> Result<(), PortalError> {
        self.require_owner(token, owner_id)?;
        Portal::add_friend(self, token, friend_id)
    }

    fn set_visibility(&self, token: &AuthToken, owner_id: &str, mode: Visibility) -> Result<(), PortalError> {
        self.require_owner(token, owner_id)?;
        Portal::set_visibility(self, token, mode)
    }
}

impl<T: PortalClient + ?Sized> PortalClient for &T {
    fn create_account(&self, user_id: &str) -> Result<AuthToken, PortalError> {
        (**self).create_account(user_id)
    }
    fn upload_image(&self, token: &AuthToken, owner_id: &str, name: &str, file: &[u8]) -> Result<EntryInfo, PortalError> {
        (**self).upload_image(token, owner_id, name, file)
    }
    fn delete_image(&self, token: &AuthToken, owner_id: &str, name: &str) -> Result<(), PortalError> {
        (**self).delete_image(token, owner_id, name)
    }
    fn list_gallery(&self, token: Option<&AuthToken>, owner_id: &str) -> Result<Vec<String>, PortalError> {
        (**self).list_gallery(token, owner_id)
    }
    fn download_image(&self, token: Option<&AuthToken>, owner_id: &str, name: &str) -> Result<Vec<u8>, PortalError> {
        (**self).download_image(token, owner_id, name)
    }
    fn add_friend(&self, token: &AuthToken, owner_id: &str, friend_id: &str) -> Result<(), PortalError> {
        (**self).add_friend(token, owner_id, friend_id)
    }
    fn set_visibility(&self, token: &AuthToken, owner_id: &str, mode: Visibility) -> Result<(), PortalError> {
        (**self).set_visibility(token, owner_id, mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagepipe::{decode_raster, encode_png, extract_metadata, embed_metadata, synthetic_photo, MetadataBlock};

    fn small_png() -> Vec<u8> {
        encode_png(&synthetic_photo(40, 30, 5)).unwrap()
    }

    #[test]
    fn create_account_conflict_and_empty_gallery() {
        let portal = Portal::seeded(OptimizationProfile::default(), 1);
        let t = portal.create_account("alice").unwrap();
        assert_eq!(portal.create_account("alice"), Err(PortalError::Conflict("alice".into())));
        assert!(portal.list_gallery(None, "alice").unwrap().is_empty());
        assert_eq!(portal.resolve_token(&t).as_deref(), Some("alice"));
        assert!(matches!(portal.create_account(""), Err(PortalError::InvalidUserId(_))));
    }

    #[test]
    fn tokens_are_distinct() {
        let portal = Portal::seeded(OptimizationProfile::default(), 2);
        let tokens: BTreeSet<_> = (0..100).map(|i| portal.create_account(&format!("u{i}")).unwrap()).collect();
        assert_eq!(tokens.len(), 100);
    }

    #[test]
    fn upload_applies_profile() {
        let portal = Portal::seeded(OptimizationProfile::default(), 3);
        let t = portal.create_account("alice").unwrap();
        let file = embed_metadata(
            &encode_png(&synthetic_photo(2000, 1000, 1)).unwrap(),
            &MetadataBlock::new().with("pubkey", "secret"),
        )
        .unwrap();
        portal.upload_image(&t, "photo.png", &file).unwrap();
        let stored = portal.download_image(None, "alice", "photo.png").unwrap();
        assert_eq!(decode_raster(&stored).unwrap().width(), 1024);
        assert!(extract_metadata(&stored).unwrap().is_empty());
    }

    #[test]
    fn same_name_replaces() {
        let portal = Portal::seeded(OptimizationProfile::lossless(), 4);
        let t = portal.create_account("alice").unwrap();
        let first = encode_png(&synthetic_photo(20, 20, 1)).unwrap();
        let second = encode_png(&synthetic_photo(20, 20, 2)).unwrap();
        portal.upload_image(&t, "k.png", &first).unwrap();
        portal.upload_image(&t, "k.png", &second).unwrap();
        assert_eq!(portal.list_gallery(None, "alice").unwrap(), vec!["k.png"]);
        let stored = portal.download_image(None, "alice", "k.png").unwrap();
        assert_eq!(decode_raster(&stored).unwrap(), decode_raster(&second).unwrap());
    }

    #[test]
    fn bad_token_and_bad_image() {
        let portal = Portal::seeded(OptimizationProfile::default(), 5);
        let t = portal.create_account("alice").unwrap();
        let bogus = AuthToken("00".repeat(32));
        assert_eq!(portal.upload_image(&bogus, "a.png", &small_png()), Err(PortalError::Unauthorized));
        assert!(matches!(portal.upload_image(&t, "a.png", b"not an image"), Err(PortalError::BadImage(_))));
        assert!(matches!(portal.upload_image(&t, "../x", &small_png()), Err(PortalError::InvalidName(_))));
        assert_eq!(portal.add_friend(&t, "nobody"), Err(PortalError::UnknownAccount("nobody".into())));
    }

    #[test]
    fn visibility_truth_table() {
        let portal = Portal::seeded(OptimizationProfile::lossless(), 6);
        let owner = portal.create_account("owner").unwrap();
        let friend = portal.create_account("friend").unwrap();
        let stranger = portal.create_account("stranger").unwrap();
        portal.upload_image(&owner, "p.png", &small_png()).unwrap();
        portal.add_friend(&owner, "friend").unwrap();

        for mode in [Visibility::Public, Visibility::Friends] {
            portal.set_visibility(&owner, mode).unwrap();
            let cases: [(Option<&AuthToken>, bool); 4] = [
                (Some(&owner), true),
                (Some(&friend), true),
                (Some(&stranger), mode == Visibility::Public),
                (None, mode == Visibility::Public),
            ];
            for (token, allowed) in cases {
                let list = PortalClient::list_gallery(&portal, token, "owner");
                let get = PortalClient::download_image(&portal, token, "owner", "p.png");
                assert_eq!(list.is_ok(), allowed, "{mode:?} list {token:?}");
                assert_eq!(get.is_ok(), allowed, "{mode:?} get {token:?}");
                if !allowed {
                    assert!(matches!(list, Err(PortalError::Forbidden(_))));
                }
            }
        }
    }

    #[test]
    fn friends_only_with_no_friends_is_owner_only() {
        let portal = Portal::seeded(OptimizationProfile::lossless(), 7);
        let owner = portal.create_account("owner").unwrap();
        let other = portal.create_account("other").unwrap();
        portal.set_visibility(&owner, Visibility::Friends).unwrap();
        assert!(PortalClient::list_gallery(&portal, Some(&owner), "owner").is_ok());
        assert!(PortalClient::list_gallery(&portal, Some(&other), "owner").is_err());
        assert!(PortalClient::list_gallery(&portal, None, "owner").is_err());
    }

    #[test]
    fn mutations_require_the_owners_token() {
        let portal = Portal::seeded(OptimizationProfile::lossless(), 8);
        let alice = portal.create_account("alice").unwrap();
        let eve = portal.create_account("eve").unwrap();
        portal.upload_image(&alice, "p.png", &small_png()).unwrap();
        let before = portal.snapshot();
        assert_eq!(
            PortalClient::upload_image(&portal, &eve, "alice", "x.png", &small_png()),
            Err(PortalError::Unauthorized)
        );
        assert_eq!(PortalClient::delete_image(&portal, &eve, "alice", "p.png"), Err(PortalError::Unauthorized));
        assert_eq!(
            PortalClient::set_visibility(&portal, &eve, "alice", Visibility::Friends),
            Err(PortalError::Unauthorized)
        );
        assert_eq!(PortalClient::add_friend(&portal, &eve, "alice", "eve"), Err(PortalError::Unauthorized));
        assert_eq!(portal.snapshot(), before);
    }

    #[test]
    fn delete_and_not_found() {
        let portal = Portal::seeded(OptimizationProfile::lossless(), 9);
        let t = portal.create_account("alice").unwrap();
        portal.upload_image(&t, "p.png", &small_png()).unwrap();
        assert_eq!(portal.download_image(None, "alice", "q.png"), Err(PortalError::NotFound("q.png".into())));
        portal.delete_image(&t, "p.png").unwrap();
        assert_eq!(portal.delete_image(&t, "p.png"), Err(PortalError::NotFound("p.png".into())));
        assert_eq!(portal.list_gallery(None, "ghost"), Err(PortalError::UnknownAccount("ghost".into())));
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let portal = Portal::seeded(OptimizationProfile::default(), 10);
        let t = portal.create_account("alice").unwrap();
        portal.upload_image(&t, "p.png", &small_png()).unwrap();
        let path = dir.path().join("portal.json");
        portal.save_snapshot(&path).unwrap();
        let restored = Portal::load_snapshot(OptimizationProfile::default(), &path).unwrap();
        assert_eq!(restored.snapshot(), portal.snapshot());
        assert_eq!(restored.resolve_token(&t).as_deref(), Some("alice"));
    }
}
