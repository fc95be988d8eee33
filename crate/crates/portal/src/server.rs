use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use socialkey_core::imagepipe::{sniff, ImageFormat};
use socialkey_core::portal::{AuthToken, EntryInfo, Portal, PortalClient, PortalError};
use tokio::sync::oneshot;

use crate::wire::{status_of, AddFriend, CreateAccount, ErrorBody, SetVisibility, TokenResponse, Upload};

/// Largest accepted request body. Base64 adds a third on top of the file.
pub const MAX_BODY_BYTES: usize = 48 << 20;

#[derive(Clone)]
pub struct AppState {
    pub portal: Arc<Portal>,
    /// When set, the full state is written here after every mutation.
    pub snapshot: Option<PathBuf>,
}

impl AppState {
    pub fn new(portal: Portal) -> Self {
        AppState { portal: Arc::new(portal), snapshot: None }
    }

    pub fn with_snapshot(mut self, path: PathBuf) -> Self {
        self.snapshot = Some(path);
        self
    }
}

struct ApiError(PortalError);

impl From<PortalError> for ApiError {
    fn from(e: PortalError) -> Self {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(PortalError::Protocol(e.body_text()))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(status_of(&self.0)).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(ErrorBody::from(&self.0))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn bearer(headers: &HeaderMap) -> Option<AuthToken> {
    let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
    value.strip_prefix("Bearer ").map(|t| AuthToken(t.trim().to_string()))
}

fn require_bearer(headers: &HeaderMap) -> Result<AuthToken, PortalError> {
    bearer(headers).ok_or(PortalError::Unauthorized)
}

/// Runs a portal call off the async workers and saves the snapshot after a
/// successful mutation.
async fn blocking<T: Send + 'static>(
    state: &AppState,
    mutates: bool,
    f: impl FnOnce(&Portal) -> Result<T, PortalError> + Send + 'static,
) -> ApiResult<T> {
    let state = state.clone();
    tokio::task::spawn_blocking(move || {
        let out = f(&state.portal)?;
        if let (true, Some(path)) = (mutates, &state.snapshot) {
            state.portal.save_snapshot(path)?;
        }
        Ok(out)
    })
    .await
    .map_err(|e| ApiError(PortalError::Protocol(format!("request task failed: {e}"))))?
    .map_err(ApiError)
}

async fn create_account(
    State(state): State<AppState>,
    body: Result<Json<CreateAccount>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<TokenResponse>)> {
    let Json(req) = body?;
    let token = blocking(&state, true, move |p| p.create_account(&req.user_id)).await?;
    Ok((StatusCode::CREATED, Json(TokenResponse { token: token.0 })))
}

async fn upload(
    State(state): State<AppState>,
    Path(owner): Path<String>,
    headers: HeaderMap,
    body: Result<Json<Upload>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<EntryInfo>)> {
    let token = require_bearer(&headers)?;
    let Json(req) = body?;
    let file = STANDARD.decode(&req.image).map_err(|_| PortalError::Protocol("image is not valid base64".into()))?;
    let info =
        blocking(&state, true, move |p| PortalClient::upload_image(p, &token, &owner, &req.name, &file)).await?;
    Ok((StatusCode::CREATED, Json(info)))
}

/// The `as` query parameter some harnesses send is ignored: reads are
/// authorized by the bearer token alone, and without one the reader is
/// anonymous.
async fn list(State(state): State<AppState>, Path(owner): Path<String>, headers: HeaderMap) -> ApiResult<Json<Vec<String>>> {
    let token = bearer(&headers);
    let names = blocking(&state, false, move |p| PortalClient::list_gallery(p, token.as_ref(), &owner)).await?;
    Ok(Json(names))
}

async fn download(
    State(state): State<AppState>,
    Path((owner, name)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let token = bearer(&headers);
    let file =
        blocking(&state, false, move |p| PortalClient::download_image(p, token.as_ref(), &owner, &name)).await?;
    let mime = match sniff(&file) {
        Some(ImageFormat::Png) => "image/png",
        Some(ImageFormat::Jpeg) => "image/jpeg",
        None => "application/octet-stream",
    };
    Ok(([(header::CONTENT_TYPE, mime)], file).into_response())
}

async fn delete(
    State(state): State<AppState>,
    Path((owner, name)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult<StatusCode> {
    let token = require_bearer(&headers)?;
    blocking(&state, true, move |p| PortalClient::delete_image(p, &token, &owner, &name)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn add_friend(
    State(state): State<AppState>,
    Path(owner): Path<String>,
    headers: HeaderMap,
    body: Result<Json<AddFriend>, JsonRejection>,
) -> ApiResult<StatusCode> {
    let token = require_bearer(&headers)?;
    let Json(req) = body?;
    blocking(&state, true, move |p| PortalClient::add_friend(p, &token, &owner, &req.friend_id)).await?;
    Ok(StatusCode::NO_CONTENT)
}

async fn set_visibility(
    State(state): State<AppState>,
    Path(owner): Path<String>,
    headers: HeaderMap,
    body: Result<Json<SetVisibility>, JsonRejection>,
) -> ApiResult<StatusCode> {
    let token = require_bearer(&headers)?;
    let Json(req) = body?;
    blocking(&state, true, move |p| PortalClient::set_visibility(p, &token, &owner, req.mode)).await?;
    Ok(StatusCode::NO_CONTENT)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/accounts", post(create_account))
        .route("/accounts/{id}/gallery", post(upload).get(list))
        .route("/accounts/{id}/gallery/{name}", get(download).delete(delete))
        .route("/accounts/{id}/friends", post(add_friend))
        .route("/accounts/{id}/visibility", post(set_visibility))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

/// Serves until the process ends.
pub fn serve_forever(addr: SocketAddr, state: AppState, on_bound: impl FnOnce(SocketAddr)) -> std::io::Result<()> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        on_bound(listener.local_addr()?);
        axum::serve(listener, router(state)).await
    })
}

/// A server on a background thread. Dropping the handle stops it.
pub struct ServerHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<std::io::Result<()>>>,
}

impl ServerHandle {
    /// Binds `addr` (port 0 picks a free port) and starts serving.
    pub fn spawn(addr: SocketAddr, state: AppState) -> std::io::Result<Self> {
        let std_listener = std::net::TcpListener::bind(addr)?;
        std_listener.set_nonblocking(true)?;
        let addr = std_listener.local_addr()?;
        let (tx, rx) = oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(std_listener)?;
                axum::serve(listener, router(state))
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await
            })
        });
        Ok(ServerHandle { addr, shutdown: Some(tx), thread: Some(thread) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
