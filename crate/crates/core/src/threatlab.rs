//! Scripted attack scenarios against the key distribution scheme.
//!
//! Each scenario runs on a private seeded [`Portal`] with seeded key
//! generation and encryption, so the same seed gives a byte-identical
//! report. Reports serialize as
//!
//! ```json
//! {"name": "...", "steps": [{"actor": "...", "action": "...", "outcome": "..."}], "verdict": "..."}
//! ```
//!
//! Checkpoints are steps whose action starts with `checkpoint:` and whose
//! outcome is `observed` or `missed`. A verdict of `expected-failure-observed`
//! means every predicted outcome happened: attacks failed where they should,
//! and control runs communicated normally. `unexpected-success` means an
//! attack step succeeded where it should have failed. `error` means the
//! scenario itself could not proceed or a predicted success did not happen.

use std::fmt::Display;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::envelope::Envelope;
use crate::identity::{generate_identity_with, Identity, IdentityError, PublicKeyRecord, ALG_RSA_2048};
use crate::imagepipe::{
    bit_error_rate, decode_raster, embed_lsb, embed_metadata, encode_png, extract_lsb, extract_metadata, fit_within,
    synthetic_photo, MetadataBlock, OptimizationProfile, PipeError, LSB_BER_THRESHOLD,
};
use crate::msgcrypt::{decrypt, encrypt_for, CryptoError};
use crate::portal::{AuthToken, Portal, PortalError};
use crate::pubkeyflow::{fetch_key, publish_key, publish_record, serialize_record, FlowError};
use crate::session::{complete, initiate, respond, unwrap_secret, Role, SessionError, SessionState, Transcript};

pub const CHECKPOINT_PREFIX: &str = "checkpoint:";
pub const METADATA_KEY: &str = "qk-record";
pub const COVER_WIDTH: usize = 1280;
pub const COVER_HEIGHT: usize = 960;

/// Fixed creation time for scenario identities so records are reproducible.
const SCENARIO_EPOCH: u64 = 1_700_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExpectedFailureObserved,
    UnexpectedSuccess,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub actor: String,
    pub action: String,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub steps: Vec<Step>,
    pub verdict: Verdict,
}

impl ScenarioReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Checkpoint names with whether each was observed.
    pub fn checkpoints(&self) -> Vec<(&str, bool)> {
        self.steps
            .iter()
            .filter_map(|s| s.action.strip_prefix(CHECKPOINT_PREFIX).map(|n| (n, s.outcome == "observed")))
            .collect()
    }

    pub fn checkpoint_observed(&self, name: &str) -> bool {
        self.checkpoints().iter().any(|&(n, ok)| n == name && ok)
    }
}

trait Categorized: Display {
    fn category(&self) -> &'static str;
}

macro_rules! categorized {
    ($($t:ty),*) => {$(
        impl Categorized for $t {
            fn category(&self) -> &'static str {
                <$t>::category(self)
            }
        }
    )*};
}

categorized!(FlowError, CryptoError, SessionError, PipeError, PortalError, IdentityError);

/// The scenario could not continue.
struct Abort;

#[derive(Default)]
struct Run {
    steps: Vec<Step>,
    unexpected_success: bool,
    prediction_missed: bool,
}

impl Run {
    fn note(&mut self, actor: &str, action: &str, outcome: impl Into<String>) {
        self.steps.push(Step { actor: actor.into(), action: action.into(), outcome: outcome.into() });
    }

    fn checkpoint(&mut self, name: &str, observed: bool) {
        self.note("harness", &format!("{CHECKPOINT_PREFIX}{name}"), if observed { "observed" } else { "missed" });
        if !observed {
            self.prediction_missed = true;
        }
    }

    /// A step the scenario depends on. Failure aborts the run.
    fn must<T, E: Categorized>(&mut self, actor: &str, action: &str, r: Result<T, E>) -> Result<T, Abort> {
        match r {
            Ok(v) => {
                self.note(actor, action, "ok");
                Ok(v)
            }
            Err(e) => {
                self.note(actor, action, format!("error: {} ({e})", e.category()));
                Err(Abort)
            }
        }
    }

    /// A step predicted to fail. Returns true when it did.
    fn expect_failure<T, E: Categorized>(&mut self, actor: &str, action: &str, r: Result<T, E>) -> bool {
        match r {
            Ok(_) => {
                self.note(actor, action, "succeeded");
                self.unexpected_success = true;
                false
            }
            Err(e) => {
                self.note(actor, action, format!("failed: {}", e.category()));
                true
            }
        }
    }

    /// A step predicted to succeed that does not abort the run if it fails.
    fn expect_success<T, E: Categorized>(&mut self, actor: &str, action: &str, r: Result<T, E>) -> Option<T> {
        match r {
            Ok(v) => {
                self.note(actor, action, "ok");
                Some(v)
            }
            Err(e) => {
                self.note(actor, action, format!("error: {}", e.category()));
                self.prediction_missed = true;
                None
            }
        }
    }

    fn finish(self, name: &str, result: Result<(), Abort>) -> ScenarioReport {
        let verdict = if result.is_err() || self.prediction_missed && !self.unexpected_success {
            Verdict::Error
        } else if self.unexpected_success {
            Verdict::UnexpectedSuccess
        } else {
            Verdict::ExpectedFailureObserved
        };
        ScenarioReport { name: name.into(), steps: self.steps, verdict }
    }
}

fn scenario_identity(run: &mut Run, user: &str, rng: &mut ChaCha20Rng) -> Result<Identity, Abort> {
    let id = generate_identity_with(user, SCENARIO_EPOCH, rng);
    let action = "generate RSA-2048 identity";
    let id = run.must(user, action, id)?;
    run.note(user, "fingerprint", id.fingerprint().to_hex());
    Ok(id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubstitutionVariant {
    /// Substitution, unpinned traffic under the fake key, owner recovery, and
    /// a pinned fetch.
    Full,
    /// Substitution with alice fetching only under her pin.
    PinnedOnly,
    /// No substitution.
    Control,
}

impl SubstitutionVariant {
    pub fn scenario_name(self) -> &'static str {
        match self {
            SubstitutionVariant::Full => "key-substitution",
            SubstitutionVariant::PinnedOnly => "key-substitution-pinned",
            SubstitutionVariant::Control => "key-substitution-control",
        }
    }
}

pub mod checkpoints {
    pub const NEW_TRAFFIC_UNDECRYPTABLE: &str = "new-traffic-undecryptable";
    pub const PRIOR_TRAFFIC_SAFE: &str = "prior-traffic-safe";
    pub const OWNER_DETECTS_AND_REPUBLISHES: &str = "owner-detects-and-republishes";
    pub const PIN_DETECTS_AT_FETCH: &str = "pin-detects-at-fetch";
    pub const CONTROL_COMMUNICATION: &str = "control-communication";
    pub const SANITY_INVERSION: &str = "sanity-inversion";
}

/// Mallory steals bob's portal token and replaces his key image with her
/// own key under bob's name.
pub fn run_key_substitution(seed: u64, variant: SubstitutionVariant) -> ScenarioReport {
    let mut run = Run::default();
    let result = key_substitution(&mut run, seed, variant);
    run.finish(variant.scenario_name(), result)
}

fn key_substitution(run: &mut Run, seed: u64, variant: SubstitutionVariant) -> Result<(), Abort> {
    use checkpoints::*;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    // Alice only sends unsigned messages here, so she needs no key pair.
    let bob = scenario_identity(run, "bob", &mut rng)?;
    let mallory = scenario_identity(run, "mallory", &mut rng)?;
    let portal = Portal::seeded(OptimizationProfile::default(), seed);
    let bob_token = run.must("bob", "create portal account", portal.create_account("bob"))?;
    run.must("alice", "create portal account", portal.create_account("alice"))?;
    run.must("mallory", "create portal account", portal.create_account("mallory"))?;

    let name = run.must("bob", "publish key image", publish_key(&bob, &portal, &bob_token))?;
    run.note("portal", "stored key image", name.to_string());
    let bob_record = run.must("alice", "fetch bob's key", fetch_key(&portal, None, "bob", None))?;
    let pin = bob_record.fingerprint();
    run.note("alice", "pin bob's fingerprint", pin.to_hex());

    let m1_text = b"m1: meet at the usual place".as_slice();
    let m1 = run.must("alice", "encrypt m1 for bob", encrypt_for(&bob_record, m1_text, &mut rng))?;
    run.note("mallory", "capture m1 from the wire", format!("{} bytes", m1.to_bytes().len()));
    let got = run.must("bob", "decrypt m1", decrypt(&bob, &m1))?;
    if got != m1_text {
        run.note("bob", "compare m1", "plaintext differs");
        return Err(Abort);
    }

    if variant == SubstitutionVariant::Control {
        let fetched =
            run.expect_success("alice", "fetch bob's key with pin", fetch_key(&portal, None, "bob", Some(&pin)));
        let m2_text = b"m2: control traffic".as_slice();
        let ok = match fetched {
            Some(rec) => {
                let m2 = run.must("alice", "encrypt m2 for bob", encrypt_for(&rec, m2_text, &mut rng))?;
                run.expect_success("bob", "decrypt m2", decrypt(&bob, &m2)).as_deref() == Some(m2_text)
            }
            None => false,
        };
        run.checkpoint(CONTROL_COMMUNICATION, ok);
        return Ok(());
    }

    // Token theft: mallory holds bob's bearer token from here on.
    let stolen: AuthToken = bob_token.clone();
    run.note("mallory", "steal bob's portal token", "ok");
    let fake = run.must(
        "mallory",
        "build record for owner bob with mallory's modulus",
        PublicKeyRecord::from_parts(
            "bob",
            ALG_RSA_2048,
            mallory.public_record().modulus(),
            mallory.public_record().public_exponent(),
            SCENARIO_EPOCH + 1,
        ),
    )?;
    let fake_name = run.must("mallory", "publish fake key image as bob", publish_record(&portal, &stolen, "bob", &fake))?;
    run.note("portal", "stored key image", fake_name.to_string());

    let pinned = fetch_key(&portal, None, "bob", Some(&pin));
    let pin_caught = matches!(pinned, Err(FlowError::PinMismatch { .. }));
    run.expect_failure("alice", "fetch bob's key with pin", pinned);
    run.checkpoint(PIN_DETECTS_AT_FETCH, pin_caught);
    if variant == SubstitutionVariant::PinnedOnly {
        run.note("alice", "send message to bob", "not sent: fetch rejected");
        return Ok(());
    }

    let served = run.must("alice", "fetch bob's key without pin", fetch_key(&portal, None, "bob", None))?;
    run.note("alice", "received fingerprint", served.fingerprint().to_hex());
    let m2_text = b"m2: the new door code is 4711".as_slice();
    let m2 = run.must("alice", "encrypt m2 for bob under served key", encrypt_for(&served, m2_text, &mut rng))?;
    let undecryptable = run.expect_failure("bob", "decrypt m2", decrypt(&bob, &m2));
    run.checkpoint(NEW_TRAFFIC_UNDECRYPTABLE, undecryptable);
    // The fake key is mallory's, so new traffic is hers to read.
    let read = decrypt(&mallory, &m2);
    let outcome = match &read {
        Ok(p) if p == m2_text => "succeeded (consequence of the substituted key)".to_string(),
        Ok(_) => "succeeded with wrong plaintext".to_string(),
        Err(e) => format!("failed: {}", e.category()),
    };
    run.note("mallory", "decrypt m2 with her own key", outcome);

    let prior_safe = run.expect_failure("mallory", "decrypt captured m1 with her own key", decrypt(&mallory, &m1));
    run.checkpoint(PRIOR_TRAFFIC_SAFE, prior_safe);

    // Bob's failed decryption prompts him to look at his own gallery.
    let shown = run.must("bob", "fetch own key image", fetch_key(&portal, None, "bob", None))?;
    let differs = shown.fingerprint() != bob.fingerprint();
    run.note("bob", "compare gallery fingerprint with own key", if differs { "differs" } else { "matches" });
    let mut recovered = false;
    if differs {
        run.must("bob", "republish original key image", publish_key(&bob, &portal, &bob_token))?;
        if let Some(rec) =
            run.expect_success("alice", "refetch bob's key with pin", fetch_key(&portal, None, "bob", Some(&pin)))
        {
            let m3_text = b"m3: resend of m2".as_slice();
            let m3 = run.must("alice", "encrypt m3 for bob", encrypt_for(&rec, m3_text, &mut rng))?;
            recovered = run.expect_success("bob", "decrypt m3", decrypt(&bob, &m3)).as_deref() == Some(m3_text);
        }
    }
    run.checkpoint(OWNER_DETECTS_AND_REPUBLISHES, differs && recovered);
    Ok(())
}

fn contains(haystack: &[u8], needle: &[u8]) -> bool {
    !needle.is_empty() && haystack.windows(needle.len()).any(|w| w == needle)
}

fn sender_of<'a>(env: &Envelope, alice: &'a Identity, bob: &'a Identity) -> Option<&'a PublicKeyRecord> {
    match env.sender_id() {
        "" => None,
        "alice" => Some(alice.public_record()),
        _ => Some(bob.public_record()),
    }
}

/// Eve records every envelope of `sessions` hybrid sessions between alice and
/// bob and tries to read them with her own key and with guessed session keys.
pub fn run_eavesdropper(seed: u64, sessions: usize) -> ScenarioReport {
    let mut run = Run::default();
    let result = eavesdropper(&mut run, seed, sessions);
    run.finish("eavesdropper", result)
}

fn eavesdropper(run: &mut Run, seed: u64, sessions: usize) -> Result<(), Abort> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let alice = scenario_identity(run, "alice", &mut rng)?;
    let bob = scenario_identity(run, "bob", &mut rng)?;
    let eve = scenario_identity(run, "eve", &mut rng)?;

    let (mut exchange_attempts, mut exchange_leaks) = (0usize, 0usize);
    let (mut data_attempts, mut data_leaks) = (0usize, 0usize);
    let mut substring_hits = 0usize;
    let mut captured_bytes = 0usize;

    for i in 0..sessions {
        let bits = if i % 2 == 0 { 128 } else { 256 };
        let authenticated = i % 4 >= 2;
        let mut transcript = Transcript { key_bits: bits, authenticated, entries: Vec::new() };
        let (a, b, m_a, m_b, data) = match hybrid_session(&alice, &bob, i, bits, authenticated, &mut rng) {
            Ok(v) => v,
            Err(e) => {
                run.note("harness", &format!("session {i}"), format!("error: {}", e.category()));
                return Err(Abort);
            }
        };
        if a.session_key() != b.session_key() {
            run.note("harness", &format!("session {i}: compare session keys"), "differ");
            return Err(Abort);
        }
        for env in [&m_a, &m_b] {
            transcript.record(if env.sender_id() == "bob" { Role::Responder } else { Role::Initiator }, env);
        }
        for (k, env) in data.iter().enumerate() {
            transcript.record(if k % 2 == 0 { Role::Initiator } else { Role::Responder }, env);
        }

        for env in [&m_a, &m_b] {
            exchange_attempts += 1;
            if unwrap_secret(&eve, env, sender_of(env, &alice, &bob)).is_ok() {
                exchange_leaks += 1;
            }
        }
        for env in &data {
            data_attempts += 1;
            let mut guess_own = vec![0u8; bits / 8];
            rng.fill(&mut guess_own[..]);
            let mut guess = SessionState::new(Role::Responder, guess_own).expect("valid key length");
            let mut guess_secret = vec![0u8; bits / 8];
            rng.fill(&mut guess_secret[..]);
            if guess.accept_peer_secret(guess_secret).is_ok() {
                let mut guess_a = guess.clone();
                guess_a.role = Role::Initiator;
                if guess.open(env).is_ok() || guess_a.open(env).is_ok() {
                    data_leaks += 1;
                }
            }
        }

        let mut wire: Vec<u8> = Vec::new();
        for env in [&m_a, &m_b].into_iter().chain(data.iter()) {
            wire.extend(env.to_bytes());
        }
        wire.extend(transcript.to_json().into_bytes());
        captured_bytes += wire.len();
        for secret in [a.own_secret(), b.own_secret(), a.session_key().unwrap()] {
            if contains(&wire, secret) {
                substring_hits += 1;
            }
        }

        if i == 0 {
            sanity_inversion(run, &alice, &bob, &m_a, &m_b, &a, &data[0])?;
        }
    }

    run.note("harness", "sessions captured", format!("{sessions} sessions, {captured_bytes} bytes"));
    run.expect_failure_count("eve", "open secret-exchange envelopes with her own key", exchange_leaks, exchange_attempts);
    run.expect_failure_count("eve", "open session messages with guessed keys", data_leaks, data_attempts);
    run.note("eve", "scan captures for secrets and session keys", format!("{substring_hits} hits"));
    if substring_hits > 0 {
        run.unexpected_success = true;
    }
    Ok(())
}

/// One handshake plus two messages each way. Returns both states, the two
/// secret-exchange envelopes and the session messages in send order.
#[allow(clippy::type_complexity)]
fn hybrid_session(
    alice: &Identity,
    bob: &Identity,
    i: usize,
    bits: usize,
    authenticated: bool,
    rng: &mut ChaCha20Rng,
) -> Result<(SessionState, SessionState, Envelope, Envelope, Vec<Envelope>), SessionError> {
    let (mut a, m_a) = initiate(alice, bob.public_record(), bits, authenticated, rng)?;
    let (mut b, m_b) = respond(bob, alice.public_record(), &m_a, authenticated, rng)?;
    complete(&mut a, alice, bob.public_record(), &m_b)?;
    let mut data = Vec::new();
    for k in 0..2 {
        data.push(a.seal(format!("session {i} message {k} from alice").as_bytes())?);
        data.push(b.seal(format!("session {i} message {k} from bob").as_bytes())?);
    }
    Ok((a, b, m_a, m_b, data))
}

impl Run {
    fn expect_failure_count(&mut self, actor: &str, action: &str, successes: usize, attempts: usize) {
        self.note(actor, action, format!("{successes}/{attempts} succeeded"));
        if successes > 0 {
            self.unexpected_success = true;
        }
    }
}

/// Confirms the capture is readable once the private keys are known, so a
/// clean eavesdropper result reflects the keys and not the harness.
fn sanity_inversion(
    run: &mut Run,
    alice: &Identity,
    bob: &Identity,
    m_a: &Envelope,
    m_b: &Envelope,
    a: &SessionState,
    first: &Envelope,
) -> Result<(), Abort> {
    let from_alice = run.must(
        "harness",
        "open alice's secret with bob's private key",
        unwrap_secret(bob, m_a, sender_of(m_a, alice, bob)),
    )?;
    let from_bob = run.must(
        "harness",
        "open bob's secret with alice's private key",
        unwrap_secret(alice, m_b, sender_of(m_b, alice, bob)),
    )?;
    let ok_secrets = from_alice.1 == a.own_secret() && Some(from_bob.1.as_slice()) == a.peer_secret();
    let mut reader = SessionState::new(Role::Responder, from_bob.1).map_err(|_| Abort)?;
    let opened = reader.accept_peer_secret(from_alice.1).and_then(|_| reader.open(first));
    let ok_open = run.must("harness", "open first session message with the recovered key", opened).is_ok();
    run.checkpoint(checkpoints::SANITY_INVERSION, ok_secrets && ok_open);
    if ok_secrets && ok_open {
        Ok(())
    } else {
        Err(Abort)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Survival {
    Intact,
    Absent,
    Corrupted,
}

fn survival_label(s: Survival) -> &'static str {
    match s {
        Survival::Intact => "intact",
        Survival::Absent => "absent",
        Survival::Corrupted => "corrupted",
    }
}

/// What the pipeline under `profile` is predicted to do to each carrier:
/// (metadata, lsb, qr).
pub fn predicted_survival(profile: &OptimizationProfile) -> (Survival, Survival, Survival) {
    let resized = fit_within(COVER_WIDTH, COVER_HEIGHT, profile.max_dimension as usize) != (COVER_WIDTH, COVER_HEIGHT);
    let metadata = if profile.strip_metadata { Survival::Absent } else { Survival::Intact };
    let lsb = if profile.force_jpeg || resized { Survival::Corrupted } else { Survival::Intact };
    (metadata, lsb, Survival::Intact)
}

/// Pushes one serialized key record through three carriers and the portal
/// upload pipeline: a metadata entry, blue-channel LSBs of a photo, and the
/// QR key image.
pub fn run_carrier_comparison(seed: u64, profile: &OptimizationProfile) -> ScenarioReport {
    let mut run = Run::default();
    let result = carrier_comparison(&mut run, seed, profile);
    let name = if *profile == OptimizationProfile::default() {
        "carrier-comparison".to_string()
    } else if *profile == OptimizationProfile::lossless() {
        "carrier-comparison-lossless".to_string()
    } else {
        format!(
            "carrier-comparison-max{}-q{}{}{}",
            profile.max_dimension,
            profile.jpeg_quality,
            if profile.strip_metadata { "-strip" } else { "" },
            if profile.force_jpeg { "-jpeg" } else { "" }
        )
    };
    run.finish(&name, result)
}

fn judge(run: &mut Run, carrier: &str, predicted: Survival, observed: Survival) {
    let action = format!("{carrier} carrier after upload");
    run.note("harness", &action, format!("{} (predicted {})", survival_label(observed), survival_label(predicted)));
    match (predicted, observed) {
        (p, o) if p == o => {}
        (Survival::Intact, _) => run.prediction_missed = true,
        _ => run.unexpected_success = true,
    }
}

fn carrier_comparison(run: &mut Run, seed: u64, profile: &OptimizationProfile) -> Result<(), Abort> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bob = scenario_identity(run, "bob", &mut rng)?;
    let portal = Portal::seeded(*profile, seed);
    let token = run.must("bob", "create portal account", portal.create_account("bob"))?;
    let payload = serialize_record(bob.public_record());
    run.note("bob", "serialize key record", format!("{} bytes", payload.len()));
    let (p_meta, p_lsb, p_qr) = predicted_survival(profile);

    let cover = synthetic_photo(COVER_WIDTH, COVER_HEIGHT, seed);
    let cover_png = run.must("bob", "encode cover photo", encode_png(&cover))?;

    // Metadata carrier.
    let block = MetadataBlock::new().with(METADATA_KEY, &hex::encode(&payload));
    let file = run.must("bob", "embed record in metadata", embed_metadata(&cover_png, &block))?;
    run.must("bob", "upload metadata carrier", portal.upload_image(&token, "meta-carrier.png", &file))?;
    let stored = run.must("bob", "download metadata carrier", portal.download_image(None, "bob", "meta-carrier.png"))?;
    let found = run.must("harness", "extract metadata", extract_metadata(&stored))?;
    let observed = match found.get(METADATA_KEY) {
        None => Survival::Absent,
        Some(v) if hex::decode(v).ok().as_deref() == Some(payload.as_slice()) => Survival::Intact,
        Some(_) => Survival::Corrupted,
    };
    judge(run, "metadata", p_meta, observed);

    // LSB carrier.
    let stego = run.must("bob", "embed record in blue-channel LSBs", embed_lsb(&cover, &payload))?;
    let file = run.must("bob", "encode stego photo", encode_png(&stego))?;
    run.must("bob", "upload LSB carrier", portal.upload_image(&token, "lsb-carrier.png", &file))?;
    let stored = run.must("bob", "download LSB carrier", portal.download_image(None, "bob", "lsb-carrier.png"))?;
    let img = run.must("harness", "decode stored photo", decode_raster(&stored))?;
    run.note("harness", "stored photo size", format!("{}x{}", img.width(), img.height()));
    let extracted = run.must("harness", "extract LSB payload", extract_lsb(&img, payload.len()))?;
    let ber = bit_error_rate(&payload, &extracted);
    run.note("harness", "LSB bit error rate", format!("{ber:.4} (threshold {LSB_BER_THRESHOLD})"));
    let observed = if ber == 0.0 {
        Survival::Intact
    } else if ber > LSB_BER_THRESHOLD {
        Survival::Corrupted
    } else {
        // Partially damaged: neither usable nor clearly destroyed.
        run.prediction_missed = true;
        Survival::Corrupted
    };
    judge(run, "LSB", p_lsb, observed);

    // QR carrier.
    run.must("bob", "publish key image", publish_key(&bob, &portal, &token))?;
    let observed = match fetch_key(&portal, None, "bob", Some(&bob.fingerprint())) {
        Ok(rec) if rec == *bob.public_record() => Survival::Intact,
        Ok(_) => Survival::Corrupted,
        Err(e) => {
            run.note("harness", "fetch key image", format!("error: {}", e.category()));
            Survival::Corrupted
        }
    };
    judge(run, "QR", p_qr, observed);
    Ok(())
}

pub const SWEEP_QUALITIES: [u8; 3] = [90, 75, 60];

/// The QR key image through the default pipeline at several JPEG qualities.
pub fn run_quality_sweep(seed: u64, qualities: &[u8]) -> ScenarioReport {
    let mut run = Run::default();
    let result = quality_sweep(&mut run, seed, qualities);
    run.finish("quality-sweep", result)
}

fn quality_sweep(run: &mut Run, seed: u64, qualities: &[u8]) -> Result<(), Abort> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let bob = scenario_identity(run, "bob", &mut rng)?;
    for &q in qualities {
        let profile = OptimizationProfile { jpeg_quality: q, ..OptimizationProfile::default() };
        let portal = Portal::seeded(profile, seed);
        let token = run.must("bob", &format!("q{q}: create portal account"), portal.create_account("bob"))?;
        run.must("bob", &format!("q{q}: publish key image"), publish_key(&bob, &portal, &token))?;
        let fetched = run.expect_success(
            "alice",
            &format!("q{q}: fetch bob's key with pin"),
            fetch_key(&portal, None, "bob", Some(&bob.fingerprint())),
        );
        judge(run, &format!("q{q} QR"), Survival::Intact, if fetched.is_some() { Survival::Intact } else { Survival::Corrupted });
    }
    Ok(())
}

/// Scenario names accepted by [`run_named`].
pub const SCENARIOS: [&str; 7] = [
    "key-substitution",
    "key-substitution-pinned",
    "key-substitution-control",
    "eavesdropper",
    "carrier-comparison",
    "carrier-comparison-lossless",
    "quality-sweep",
];

pub const DEFAULT_EAVESDROPPER_SESSIONS: usize = 100;

pub fn run_named(name: &str, seed: u64) -> Option<ScenarioReport> {
    Some(match name {
        "key-substitution" => run_key_substitution(seed, SubstitutionVariant::Full),
        "key-substitution-pinned" => run_key_substitution(seed, SubstitutionVariant::PinnedOnly),
        "key-substitution-control" => run_key_substitution(seed, SubstitutionVariant::Control),
        "eavesdropper" => run_eavesdropper(seed, DEFAULT_EAVESDROPPER_SESSIONS),
        "carrier-comparison" => run_carrier_comparison(seed, &OptimizationProfile::default()),
        "carrier-comparison-lossless" => run_carrier_comparison(seed, &OptimizationProfile::lossless()),
        "quality-sweep" => run_quality_sweep(seed, &SWEEP_QUALITIES),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::checkpoints::*;
    use super::*;

    #[test]
    fn full_substitution_reaches_all_checkpoints() {
        let r = run_key_substitution(7, SubstitutionVariant::Full);
        assert_eq!(r.verdict, Verdict::ExpectedFailureObserved, "{}", r.to_json());
        for cp in [NEW_TRAFFIC_UNDECRYPTABLE, PRIOR_TRAFFIC_SAFE, OWNER_DETECTS_AND_REPUBLISHES, PIN_DETECTS_AT_FETCH] {
            assert!(r.checkpoint_observed(cp), "{cp}");
        }
    }

    #[test]
    fn pinned_run_stops_before_any_message_under_the_fake_key() {
        let r = run_key_substitution(8, SubstitutionVariant::PinnedOnly);
        assert_eq!(r.verdict, Verdict::ExpectedFailureObserved, "{}", r.to_json());
        assert_eq!(r.checkpoints(), vec![(PIN_DETECTS_AT_FETCH, true)]);
        let pin_ix = r.steps.iter().position(|s| s.action == "checkpoint:pin-detects-at-fetch").unwrap();
        assert!(!r.steps[pin_ix..].iter().any(|s| s.action.starts_with("encrypt")));
    }

    #[test]
    fn control_communicates() {
        let r = run_key_substitution(9, SubstitutionVariant::Control);
        assert_eq!(r.verdict, Verdict::ExpectedFailureObserved, "{}", r.to_json());
        assert_eq!(r.checkpoints(), vec![(CONTROL_COMMUNICATION, true)]);
        assert!(!r.steps.iter().any(|s| s.actor == "mallory" && s.action.contains("publish")));
    }

    #[test]
    fn reports_are_reproducible() {
        let a = run_key_substitution(11, SubstitutionVariant::Full).to_json();
        let b = run_key_substitution(11, SubstitutionVariant::Full).to_json();
        assert_eq!(a, b);
        let c = run_eavesdropper(12, 3).to_json();
        assert_eq!(c, run_eavesdropper(12, 3).to_json());
    }

    #[test]
    fn eavesdropper_small() {
        let r = run_eavesdropper(13, 4);
        assert_eq!(r.verdict, Verdict::ExpectedFailureObserved, "{}", r.to_json());
        assert!(r.checkpoint_observed(SANITY_INVERSION));
        assert!(r.steps.iter().any(|s| s.outcome == "0 hits"));
    }

    #[test]
    fn carrier_comparison_default_and_lossless() {
        let r = run_carrier_comparison(14, &OptimizationProfile::default());
        assert_eq!(r.verdict, Verdict::ExpectedFailureObserved, "{}", r.to_json());
        let outcomes: Vec<&str> =
            r.steps.iter().filter(|s| s.action.ends_with("carrier after upload")).map(|s| s.outcome.as_str()).collect();
        assert_eq!(
            outcomes,
            ["absent (predicted absent)", "corrupted (predicted corrupted)", "intact (predicted intact)"]
        );
        let r = run_carrier_comparison(14, &OptimizationProfile::lossless());
        assert_eq!(r.verdict, Verdict::ExpectedFailureObserved, "{}", r.to_json());
        assert!(r.steps.iter().filter(|s| s.action.ends_with("carrier after upload")).all(|s| s.outcome.starts_with("intact")));
    }

    #[test]
    fn verdict_rules() {
        let mut run = Run::default();
        run.expect_failure::<(), PortalError>("eve", "x", Ok(()));
        assert_eq!(run.finish("t", Ok(())).verdict, Verdict::UnexpectedSuccess);
        let mut run = Run::default();
        run.checkpoint("c", false);
        assert_eq!(run.finish("t", Ok(())).verdict, Verdict::Error);
        assert_eq!(Run::default().finish("t", Err(Abort)).verdict, Verdict::Error);
        assert_eq!(Run::default().finish("t", Ok(())).verdict, Verdict::ExpectedFailureObserved);
    }

    #[test]
    fn report_schema_is_locked() {
        let report = ScenarioReport {
            name: "example".into(),
            steps: vec![
                Step { actor: "alice".into(), action: "fetch bob's key with pin".into(), outcome: "failed: pin-mismatch".into() },
                Step { actor: "harness".into(), action: "checkpoint:pin-detects-at-fetch".into(), outcome: "observed".into() },
            ],
            verdict: Verdict::ExpectedFailureObserved,
        };
        let fixture = include_str!("../tests/fixtures/scenario_report.json");
        assert_eq!(report.to_json(), fixture.trim_end());
        assert_eq!(serde_json::from_str::<ScenarioReport>(fixture).unwrap(), report);
    }

    #[test]
    fn named_scenarios_resolve() {
        assert!(run_named("no-such-scenario", 0).is_none());
        assert_eq!(SCENARIOS.len(), 7);
    }
}
