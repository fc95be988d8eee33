//! Public-key distribution through images on a social portal.
//!
//! An [`identity`] holds an RSA-2048 keypair, sealed at rest by
//! [`keystore`]. [`pubkeyflow`] serializes the public half as a
//! [`record`], renders it as a QR key image and publishes it to a
//! [`portal`] gallery, whose upload path runs the [`imagepipe`]
//! optimizer. Peers fetch and decode the image, optionally pinning the
//! fingerprint. [`msgcrypt`] and [`session`] exchange messages in the
//! [`envelope`] format, and [`threatlab`] replays the attacks against
//! this setup as deterministic scenarios.

pub mod identity;
pub mod keystore;
pub mod record;
pub mod imagepipe;
pub mod portal;
pub mod pubkeyflow;
pub mod envelope;
pub mod msgcrypt;
pub mod session;
pub mod threatlab;
