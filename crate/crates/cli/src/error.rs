use socialkey_core::envelope::EnvelopeError;
use socialkey_core::identity::IdentityError;
use socialkey_core::keystore::KeystoreError;
use socialkey_core::msgcrypt::CryptoError;
use socialkey_core::portal::PortalError;
use socialkey_core::pubkeyflow::FlowError;
use socialkey_core::session::SessionError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("passphrase not set; export QK_PASSPHRASE")]
    MissingPassphrase,
    #[error("no local identity; run keygen or pass --user")]
    NoIdentity,
    #[error("several local identities ({0}); pass --user")]
    AmbiguousIdentity(String),
    #[error("{0} already has a key; pass --force to replace it")]
    IdentityExists(String),
    #[error("no portal token for {0}; pass --token or publish from the keystore that created the account")]
    NoToken(String),
    #[error("message is from {found}, expected {expected}")]
    SenderMismatch { expected: String, found: String },
    #[error("message is not signed; --from needs a signed message")]
    Unsigned,
    #[error("session file: {0}")]
    SessionFile(String),
    #[error("unknown scenario {0}")]
    UnknownScenario(String),
    #[error("scenario {name} ended with verdict {verdict}")]
    ScenarioVerdict { name: String, verdict: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Keystore(#[from] KeystoreError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error(transparent)]
    Portal(#[from] PortalError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Envelope(#[from] EnvelopeError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

impl CliError {
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::MissingPassphrase => "missing-passphrase",
            CliError::NoIdentity => "no-identity",
            CliError::AmbiguousIdentity(_) => "ambiguous-identity",
            CliError::IdentityExists(_) => "identity-exists",
            CliError::NoToken(_) => "no-token",
            CliError::SenderMismatch { .. } => "sender-mismatch",
            CliError::Unsigned => "unsigned-message",
            CliError::SessionFile(_) => "session-file",
            CliError::UnknownScenario(_) => "unknown-scenario",
            CliError::ScenarioVerdict { .. } => "scenario-verdict",
            CliError::Io(_) => "io",
            CliError::Keystore(e) => e.category(),
            CliError::Identity(e) => e.category(),
            CliError::Portal(e) => e.category(),
            CliError::Flow(e) => e.category(),
            CliError::Envelope(e) => e.category(),
            CliError::Crypto(e) => e.category(),
            CliError::Session(e) => e.category(),
        }
    }
}
