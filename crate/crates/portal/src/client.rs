use std::time::Duration;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use reqwest::blocking::{Client, RequestBuilder, Response};
use reqwest::Url;
use serde::de::DeserializeOwned;
use socialkey_core::portal::{AuthToken, EntryInfo, PortalClient, PortalError, Visibility};

use crate::wire::{error_from_body, AddFriend, CreateAccount, ErrorBody, SetVisibility, TokenResponse, Upload};

/// Blocking HTTP client for a portal server.
pub struct HttpPortal {
    base: Url,
    http: Client,
}

impl HttpPortal {
    pub fn new(base_url: &str) -> Result<Self, PortalError> {
        let base = Url::parse(base_url).map_err(|e| PortalError::Protocol(format!("bad portal URL {base_url}: {e}")))?;
        if base.cannot_be_a_base() {
            return Err(PortalError::Protocol(format!("bad portal URL {base_url}")));
        }
        let http = Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| PortalError::Protocol(e.to_string()))?;
        Ok(HttpPortal { base, http })
    }

    pub fn base_url(&self) -> &Url {
        &self.base
    }

    fn url(&self, segments: &[&str]) -> Url {
        let mut url = self.base.clone();
        url.path_segments_mut().expect("checked in new").pop_if_empty().extend(segments);
        url
    }

    fn send(&self, req: RequestBuilder) -> Result<Response, PortalError> {
        let resp = req.send().map_err(|e| {
            if e.is_connect() || e.is_timeout() {
                PortalError::Unreachable(format!("{}: {e}", self.base))
            } else {
                PortalError::Protocol(e.to_string())
            }
        })?;
        if resp.status().is_success() {
            return Ok(resp);
        }
        let status = resp.status();
        match resp.json::<ErrorBody>() {
            Ok(body) => Err(error_from_body(body)),
            Err(_) => Err(PortalError::Protocol(format!("HTTP {status} without error body"))),
        }
    }

    fn json<T: DeserializeOwned>(&self, req: RequestBuilder) -> Result<T, PortalError> {
        self.send(req)?.json().map_err(|e| PortalError::Protocol(format!("bad response body: {e}")))
    }

    fn authed(req: RequestBuilder, token: Option<&AuthToken>) -> RequestBuilder {
        match token {
            Some(t) => req.bearer_auth(t.as_str()),
            None => req,
        }
    }
}

impl PortalClient for HttpPortal {
    fn create_account(&self, user_id: &str) -> Result<AuthToken, PortalError> {
        let req = self.http.post(self.url(&["accounts"])).json(&CreateAccount { user_id: user_id.into() });
        let resp: TokenResponse = self.json(req)?;
        Ok(AuthToken(resp.token))
    }

    fn upload_image(&self, token: &AuthToken, owner_id: &str, name: &str, file: &[u8]) -> Result<EntryInfo, PortalError> {
        let body = Upload { name: name.into(), image: STANDARD.encode(file) };
        let req = self.http.post(self.url(&["accounts", owner_id, "gallery"])).json(&body);
        self.json(Self::authed(req, Some(token)))
    }

    fn delete_image(&self, token: &AuthToken, owner_id: &str, name: &str) -> Result<(), PortalError> {
        let req = self.http.delete(self.url(&["accounts", owner_id, "gallery", name]));
        self.send(Self::authed(req, Some(token))).map(drop)
    }

    fn list_gallery(&self, token: Option<&AuthToken>, owner_id: &str) -> Result<Vec<String>, PortalError> {
        let req = self.http.get(self.url(&["accounts", owner_id, "gallery"]));
        self.json(Self::authed(req, token))
    }

    fn download_image(&self, token: Option<&AuthToken>, owner_id: &str, name: &str) -> Result<Vec<u8>, PortalError> {
        let req = self.http.get(self.url(&["accounts", owner_id, "gallery", name]));
        let resp = self.send(Self::authed(req, token))?;
        resp.bytes().map(|b| b.to_vec()).map_err(|e| PortalError::Protocol(e.to_string()))
    }

    fn add_friend(&self, token: &AuthToken, owner_id: &str, friend_id: &str) -> Result<(), PortalError> {
        let req = self.http.post(self.url(&["accounts", owner_id, "friends"])).json(&AddFriend { friend_id: friend_id.into() });
        self.send(Self::authed(req, Some(token))).map(drop)
    }

    fn set_visibility(&self, token: &AuthToken, owner_id: &str, mode: Visibility) -> Result<(), PortalError> {
        let req = self.http.post(self.url(&["accounts", owner_id, "visibility"])).json(&SetVisibility { mode });
        self.send(Self::authed(req, Some(token))).map(drop)
    }
}
