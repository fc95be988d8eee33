//! JSON bodies shared by server and client.

use serde::{Deserialize, Serialize};
use socialkey_core::portal::{PortalError, Visibility};

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateAccount {
    pub user_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TokenResponse {
    pub token: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Upload {
    pub name: String,
    /// Standard base64 of the file.
    pub image: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AddFriend {
    pub friend_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SetVisibility {
    pub mode: Visibility,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    /// Account or entry name the error is about, when it has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
}

impl From<&PortalError> for ErrorBody {
    fn from(err: &PortalError) -> Self {
        let subject = match err {
            PortalError::Conflict(s)
            | PortalError::Forbidden(s)
            | PortalError::UnknownAccount(s)
            | PortalError::NotFound(s) => Some(s.clone()),
            _ => None,
        };
        ErrorBody { error: err.category().to_string(), message: err.to_string(), subject }
    }
}

/// Every category a portal error can carry over the wire.
pub const ERROR_CATEGORIES: [&str; 11] = [
    "conflict",
    "invalid-user-id",
    "unauthorized",
    "forbidden",
    "unknown-account",
    "not-found",
    "invalid-name",
    "bad-image",
    "portal-unreachable",
    "protocol",
    "snapshot",
];

pub fn status_of(err: &PortalError) -> u16 {
    match err {
        PortalError::Conflict(_) => 409,
        PortalError::Unauthorized => 401,
        PortalError::Forbidden(_) => 403,
        PortalError::UnknownAccount(_) | PortalError::NotFound(_) => 404,
        PortalError::BadImage(_) => 422,
        PortalError::InvalidUserId(_) | PortalError::InvalidName(_) | PortalError::Protocol(_) => 400,
        PortalError::Unreachable(_) => 502,
        PortalError::Snapshot(_) => 500,
        PortalError::Rejected { .. } => 400,
    }
}

/// Rebuilds a portal error from a response body.
pub fn error_from_body(body: ErrorBody) -> PortalError {
    let subject = body.subject.unwrap_or_default();
    match body.error.as_str() {
        "conflict" => PortalError::Conflict(subject.clone()),
        "unauthorized" => PortalError::Unauthorized,
        "forbidden" => PortalError::Forbidden(subject.clone()),
        "unknown-account" => PortalError::UnknownAccount(subject.clone()),
        "not-found" => PortalError::NotFound(subject.clone()),
        other => match ERROR_CATEGORIES.iter().find(|c| **c == other) {
            Some(category) => PortalError::Rejected { category, message: body.message },
            None => PortalError::Protocol(format!("unknown error category {other}: {}", body.message)),
        },
    }
}
