//! The `socialkey` command line.
//!
//! Messages and session traffic go to stdout as armored text (`QK|...|KQ`),
//! never raw binary. Errors go to stderr as `error[<category>]: <message>`
//! with exit status 1.

pub mod config;
mod error;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::builder::PossibleValuesParser;
use clap::{Parser, Subcommand};
use rand::rngs::OsRng;
use serde::{Deserialize, Serialize};
use socialkey_core::envelope::{armor, dearmor, Envelope, Mode};
use socialkey_core::identity::{generate_identity, Fingerprint, Identity, PublicKeyRecord};
use socialkey_core::keystore::{load_keystore, save_keystore, KeyEntry, Keystore, KeystoreError, PASSPHRASE_ENV};
use socialkey_core::msgcrypt::{decrypt, decrypt_verify, encrypt_for, encrypt_signed, CryptoError};
use socialkey_core::portal::{AuthToken, Portal, PortalClient};
use socialkey_core::pubkeyflow::{fetch_key, publish_key};
use socialkey_core::session::{complete, initiate, respond, SessionError, SessionState, Role};
use socialkey_core::threatlab::{run_named, Verdict, SCENARIOS};
use socialkey_portal::{serve_forever, AppState, HttpPortal};
use socialkey_qr::MODEL_CAPACITIES;

pub use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "socialkey", version, about = "Public keys distributed as QR images in social-portal galleries")]
pub struct Cli {
    /// Config file (key = value lines)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Keystore file (overrides config and QK_KEYSTORE)
    #[arg(long, global = true, value_name = "PATH")]
    pub keystore: Option<PathBuf>,
    /// Portal base URL (overrides config and QK_PORTAL)
    #[arg(long, global = true, value_name = "URL")]
    pub portal: Option<String>,
    /// Local identity to act as
    #[arg(long, global = true, value_name = "USER")]
    pub user: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an RSA-2048 identity and store it in the keystore
    Keygen {
        user: String,
        /// Replace an existing identity of the same name
        #[arg(long)]
        force: bool,
    },
    /// Publish a local identity's key image to its portal gallery
    Publish {
        user: String,
        /// Portal token of the account; created and remembered when absent
        #[arg(long, env = "QK_TOKEN", hide_env_values = true)]
        token: Option<String>,
    },
    /// Fetch and validate a peer's key image, then store the key
    Fetch {
        peer: String,
        /// Expected full fingerprint (64 hex digits)
        #[arg(long, value_name = "FP")]
        pin: Option<String>,
    },
    /// Encrypt stdin for a peer; prints an armored envelope
    Encrypt {
        peer: String,
        /// Sign with the local identity
        #[arg(long)]
        sign: bool,
    },
    /// Decrypt an armored envelope from stdin; prints the plaintext
    Decrypt {
        /// Require a signature from this peer
        #[arg(long, value_name = "PEER")]
        from: Option<String>,
    },
    /// Start a session with a peer; prints the secret-exchange envelope
    SessionInit {
        peer: String,
        /// Session state file to create
        #[arg(long, value_name = "PATH")]
        state: PathBuf,
        /// Session key length
        #[arg(long, value_parser = PossibleValuesParser::new(["128", "256"]))]
        bits: Option<String>,
        /// Sign the secret-exchange envelope
        #[arg(long)]
        sign: bool,
    },
    /// Answer a session-init envelope from stdin; prints the reply envelope
    SessionAccept {
        peer: String,
        /// Session state file to create
        #[arg(long, value_name = "PATH")]
        state: PathBuf,
        /// Sign the reply envelope
        #[arg(long)]
        sign: bool,
    },
    /// Encrypt stdin under an established session
    SessionSend {
        #[arg(long, value_name = "PATH")]
        state: PathBuf,
    },
    /// Read a session envelope from stdin: completes the handshake or prints the plaintext
    SessionRecv {
        #[arg(long, value_name = "PATH")]
        state: PathBuf,
    },
    /// Run the portal HTTP service
    PortalServe {
        #[arg(long, default_value_t = config::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Persist portal state to this file and reload it on start
        #[arg(long, value_name = "PATH")]
        snapshot: Option<PathBuf>,
    },
    /// Run an attack scenario and print its JSON report
    AttackDemo {
        #[arg(value_parser = PossibleValuesParser::new(SCENARIOS))]
        scenario: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print the QR capacity summary for the four code families
    Capacity,
}

/// Session state plus who it is between, as stored in a session file.
#[derive(Serialize, Deserialize)]
struct SessionFile {
    user: String,
    peer: String,
    authenticated: bool,
    state: SessionState,
}

type Tokens = BTreeMap<String, BTreeMap<String, String>>;

struct Ctx {
    cfg: Config,
}

impl Ctx {
    fn passphrase(&self) -> Result<String, CliError> {
        std::env::var(PASSPHRASE_ENV).ok().filter(|p| !p.is_empty()).ok_or(CliError::MissingPassphrase)
    }

    fn open_store(&self) -> Result<Keystore, CliError> {
        Ok(load_keystore(&self.cfg.keystore, &self.passphrase()?)?)
    }

    fn open_or_create_store(&self) -> Result<Keystore, CliError> {
        match load_keystore(&self.cfg.keystore, &self.passphrase()?) {
            Err(KeystoreError::NotFound(_)) => {
                Ok(Keystore::new(&self.cfg.keystore).with_iterations(self.cfg.kdf_iterations))
            }
            other => Ok(other?),
        }
    }

    fn save_store(&self, store: &Keystore) -> Result<(), CliError> {
        save_keystore(store, &self.passphrase()?)?;
        restrict(store.path())?;
        Ok(())
    }

    fn me<'a>(&self, store: &'a Keystore) -> Result<&'a Identity, CliError> {
        if let Some(user) = &self.cfg.user {
            return Ok(store.identity(user)?);
        }
        let own: Vec<&Identity> = store
            .entries()
            .values()
            .filter_map(|e| match e {
                KeyEntry::Own(id) => Some(id),
                KeyEntry::Peer(_) => None,
            })
            .collect();
        match own.as_slice() {
            [] => Err(CliError::NoIdentity),
            [one] => Ok(one),
            many => Err(CliError::AmbiguousIdentity(
                many.iter().map(|i| i.user_id()).collect::<Vec<_>>().join(", "),
            )),
        }
    }

    fn client(&self) -> Result<HttpPortal, CliError> {
        Ok(HttpPortal::new(&self.cfg.portal)?)
    }

    fn tokens_path(&self) -> PathBuf {
        let mut p = self.cfg.keystore.clone().into_os_string();
        p.push(".tokens");
        PathBuf::from(p)
    }

    fn load_tokens(&self) -> Result<Tokens, CliError> {
        match std::fs::read(self.tokens_path()) {
            Ok(b) => serde_json::from_slice(&b).map_err(|e| CliError::Config(format!("token file: {e}"))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Tokens::new()),
            Err(e) => Err(e.into()),
        }
    }

    fn token_for(&self, user: &str) -> Result<Option<AuthToken>, CliError> {
        let tokens = self.load_tokens()?;
        Ok(tokens.get(&self.cfg.portal).and_then(|m| m.get(user)).map(|t| AuthToken(t.clone())))
    }

    fn remember_token(&self, user: &str, token: &AuthToken) -> Result<(), CliError> {
        let mut tokens = self.load_tokens()?;
        tokens.entry(self.cfg.portal.clone()).or_default().insert(user.to_string(), token.0.clone());
        let path = self.tokens_path();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, serde_json::to_vec_pretty(&tokens).expect("tokens serialize"))?;
        restrict(&path)?;
        Ok(())
    }

    /// The stored record of `peer`, fetching it from the portal when absent.
    fn peer_record(&self, store: &mut Keystore, peer: &str, err: &mut dyn Write) -> Result<PublicKeyRecord, CliError> {
        if let Some(entry) = store.get(peer) {
            return Ok(entry.record().clone());
        }
        let record = self.fetch_into(store, peer, None)?;
        writeln!(err, "fetched key of {peer}: {}", record.fingerprint())?;
        Ok(record)
    }

    fn fetch_into(&self, store: &mut Keystore, peer: &str, pin: Option<&Fingerprint>) -> Result<PublicKeyRecord, CliError> {
        let client = self.client()?;
        let requester = match self.me(store) {
            Ok(me) => self.token_for(me.user_id())?,
            Err(_) => None,
        };
        let record = fetch_key(&client, requester.as_ref(), peer, pin)?;
        match store.insert_peer(record.clone()) {
            Ok(()) => self.save_store(store)?,
            // Fetching one's own key only checks it; the local identity stays.
            Err(KeystoreError::OwnEntryExists(_)) => {}
            Err(e) => return Err(e.into()),
        }
        Ok(record)
    }
}

#[cfg(unix)]
fn restrict(path: &Path) -> std::io::Result<()> {
    use std::os::unix::fs::PermissionsExt;
    std::fs::set_permissions(path, std::fs::Permissions::from_mode(0o600))
}

#[cfg(not(unix))]
fn restrict(_path: &Path) -> std::io::Result<()> {
    Ok(())
}

fn read_all(input: &mut dyn Read) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    Ok(buf)
}

fn read_envelope(input: &mut dyn Read) -> Result<Envelope, CliError> {
    let text = String::from_utf8_lossy(&read_all(input)?).into_owned();
    Ok(dearmor(&text)?)
}

fn load_session(path: &Path) -> Result<SessionFile, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::SessionFile(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::SessionFile(format!("{}: {e}", path.display())))
}

fn save_session(path: &Path, file: &SessionFile) -> Result<(), CliError> {
    let json = serde_json::to_vec_pretty(file).expect("session serializes");
    std::fs::write(path, json).map_err(|e| CliError::SessionFile(format!("{}: {e}", path.display())))?;
    restrict(path)?;
    Ok(())
}

fn check_sender(env: &Envelope, peer: &str) -> Result<(), CliError> {
    if !env.sender_id().is_empty() && env.sender_id() != peer {
        return Err(CliError::SenderMismatch { expected: peer.to_string(), found: env.sender_id().to_string() });
    }
    Ok(())
}

/// Lines of the capacity summary, header first.
pub fn capacity_lines() -> Vec<String> {
    let mut lines = vec![format!("{:<16} {:>9} {:>8} {:>9} {:>13}", "type", "max size", "binary", "numerals", "alphanumeric")];
    for m in MODEL_CAPACITIES {
        lines.push(format!(
            "{:<16} {:>9} {:>8} {:>9} {:>13}",
            m.name,
            format!("{0}x{0}", m.max_side_modules),
            m.binary_bytes.to_string(),
            m.numeric.to_string(),
            m.alphanumeric.to_string()
        ));
    }
    lines
}

pub fn run(cli: Cli, input: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(k) = cli.keystore {
        cfg.keystore = k;
    }
    if let Some(p) = cli.portal {
        cfg.portal = p;
    }
    if let Some(u) = cli.user {
        cfg.user = Some(u);
    }
    let ctx = Ctx { cfg };

    match cli.command {
        Command::Keygen { user, force } => {
            let mut store = ctx.open_or_create_store()?;
            if matches!(store.get(&user), Some(KeyEntry::Own(_))) && !force {
                return Err(CliError::IdentityExists(user));
            }
            let identity = generate_identity(&user)?;
            writeln!(out, "{user} {}", identity.fingerprint())?;
            store.insert_identity(identity);
            ctx.save_store(&store)?;
        }
        Command::Publish { user, token } => {
            let store = ctx.open_store()?;
            let identity = store.identity(&user)?;
            let client = ctx.client()?;
            let token = match token.map(AuthToken).or(ctx.token_for(&user)?) {
                Some(t) => t,
                None => {
                    let t = client.create_account(&user)?;
                    ctx.remember_token(&user, &t)?;
                    writeln!(err, "created portal account {user}")?;
                    t
                }
            };
            let name = publish_key(identity, &client, &token)?;
            writeln!(out, "{name} {}", identity.fingerprint())?;
        }
        Command::Fetch { peer, pin } => {
            let mut store = ctx.open_or_create_store()?;
            let explicit = pin
                .map(|p| p.parse::<Fingerprint>().map_err(|_| CliError::Config(format!("--pin: not a fingerprint: {p}"))))
                .transpose()?;
            let known = store.get(&peer).map(|e| e.record().fingerprint());
            let pin = explicit.or(if ctx.cfg.pinning { known } else { None });
            let record = ctx.fetch_into(&mut store, &peer, pin.as_ref())?;
            if known.is_some_and(|k| k != record.fingerprint()) {
                writeln!(err, "warning: replaced stored key of {peer} (was {})", known.unwrap())?;
            }
            writeln!(out, "{peer} {}", record.fingerprint())?;
        }
        Command::Encrypt { peer, sign } => {
            let mut store = ctx.open_or_create_store()?;
            let receiver = ctx.peer_record(&mut store, &peer, err)?;
            let plaintext = read_all(input)?;
            let env = if sign {
                encrypt_signed(ctx.me(&store)?, &receiver, &plaintext, &mut OsRng)?
            } else {
                encrypt_for(&receiver, &plaintext, &mut OsRng)?
            };
            writeln!(out, "{}", armor(&env))?;
        }
        Command::Decrypt { from } => {
            let store = ctx.open_store()?;
            let me = ctx.me(&store)?;
            let env = read_envelope(input)?;
            let plaintext = match env.mode() {
                Mode::Confidential if from.is_some() => return Err(CliError::Unsigned),
                Mode::Confidential => decrypt(me, &env)?,
                Mode::Signed => {
                    if let Some(expected) = &from {
                        check_sender(&env, expected)?;
                    }
                    decrypt_verify(me, store.record(env.sender_id())?, &env)?
                }
                found => return Err(CryptoError::WrongMode { expected: Mode::Confidential, found }.into()),
            };
            out.write_all(&plaintext)?;
        }
        Command::SessionInit { peer, state, bits, sign } => {
            let mut store = ctx.open_store()?;
            let peer_rec = ctx.peer_record(&mut store, &peer, err)?;
            let me = ctx.me(&store)?;
            let bits = bits.map_or(ctx.cfg.key_bits, |b| b.parse().expect("restricted by clap"));
            let (st, env) = initiate(me, &peer_rec, bits, sign, &mut OsRng)?;
            let file = SessionFile { user: me.user_id().into(), peer, authenticated: sign, state: st };
            save_session(&state, &file)?;
            writeln!(out, "{}", armor(&env))?;
        }
        Command::SessionAccept { peer, state, sign } => {
            let mut store = ctx.open_store()?;
            let peer_rec = ctx.peer_record(&mut store, &peer, err)?;
            let me = ctx.me(&store)?;
            let env = read_envelope(input)?;
            check_sender(&env, &peer)?;
            let (st, reply) = respond(me, &peer_rec, &env, sign, &mut OsRng)?;
            let file = SessionFile { user: me.user_id().into(), peer, authenticated: sign, state: st };
            save_session(&state, &file)?;
            writeln!(out, "{}", armor(&reply))?;
        }
        Command::SessionSend { state } => {
            let mut file = load_session(&state)?;
            let plaintext = read_all(input)?;
            let env = file.state.seal(&plaintext)?;
            save_session(&state, &file)?;
            writeln!(out, "{}", armor(&env))?;
        }
        Command::SessionRecv { state } => {
            let mut file = load_session(&state)?;
            let env = read_envelope(input)?;
            if env.mode() == Mode::SecretExchange {
                if file.state.role != Role::Initiator || file.state.is_established() {
                    return Err(SessionError::Crypto(CryptoError::WrongMode {
                        expected: Mode::SessionData,
                        found: env.mode(),
                    })
                    .into());
                }
                check_sender(&env, &file.peer)?;
                let mut store = ctx.open_store()?;
                let peer_rec = ctx.peer_record(&mut store, &file.peer, err)?;
                let me = store.identity(&file.user)?;
                complete(&mut file.state, me, &peer_rec, &env)?;
                save_session(&state, &file)?;
                writeln!(err, "session with {} established ({} bits)", file.peer, file.state.key_bits)?;
            } else {
                let plaintext = file.state.open(&env)?;
                save_session(&state, &file)?;
                out.write_all(&plaintext)?;
            }
        }
        Command::PortalServe { port, bind, snapshot } => {
            let portal = match &snapshot {
                Some(p) if p.exists() => Portal::load_snapshot(ctx.cfg.profile, p)?,
                _ => Portal::new(ctx.cfg.profile),
            };
            let mut state = AppState::new(portal);
            if let Some(p) = snapshot {
                state = state.with_snapshot(p);
            }
            serve_forever(SocketAddr::new(bind, port), state, |addr| {
                let _ = writeln!(out, "listening on http://{addr}");
                let _ = out.flush();
            })?;
        }
        Command::AttackDemo { scenario, seed } => {
            let report = run_named(&scenario, seed).ok_or_else(|| CliError::UnknownScenario(scenario.clone()))?;
            writeln!(out, "{}", report.to_json())?;
            if report.verdict != Verdict::ExpectedFailureObserved {
                let verdict = serde_json::to_value(report.verdict).expect("verdict serializes");
                return Err(CliError::ScenarioVerdict {
                    name: report.name,
                    verdict: verdict.as_str().unwrap_or_default().to_string(),
                });
            }
        }
        Command::Capacity => {
            for line in capacity_lines() {
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}
