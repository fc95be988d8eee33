//! REST front end for [`socialkey_core::portal::Portal`] and a blocking
//! client that implements [`PortalClient`](socialkey_core::portal::PortalClient).
//!
//! | method | path | auth | body / result |
//! |---|---|---|---|
//! | POST | `/accounts` | none | `{user_id}` → `{token}` |
//! | POST | `/accounts/{id}/gallery` | owner | `{name, image: base64}` → `{name, size, uploaded_at}` |
//! | GET | `/accounts/{id}/gallery` | optional | → `["name", ...]` |
//! | GET | `/accounts/{id}/gallery/{name}` | optional | → image bytes |
//! | DELETE | `/accounts/{id}/gallery/{name}` | owner | → 204 |
//! | POST | `/accounts/{id}/friends` | owner | `{friend_id}` → 204 |
//! | POST | `/accounts/{id}/visibility` | owner | `{mode: "public" \| "friends"}` → 204 |
//!
//! Auth is `Authorization: Bearer <token>`. Errors come back as
//! `{error: <category>, message, subject?}` with a matching HTTP status.

mod client;
mod server;
pub mod wire;

pub use client::HttpPortal;
pub use server::{router, serve_forever, AppState, ServerHandle, MAX_BODY_BYTES};
