//! HTTP service for the explorer. Each client token (header `x-session`, or `default`)
//! owns one session; every request locks its session for the whole transition.

use std::collections::HashMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::Mutex;

use crate::mutation::Direction;
use crate::session::{Failure, FailureKind, Session};

#[derive(Default)]
pub struct Sessions {
    map: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

type Shared = Arc<Sessions>;

pub const TOKEN_HEADER: &str = "x-session";

fn token(headers: &HeaderMap) -> String {
    headers.get(TOKEN_HEADER).and_then(|v| v.to_str().ok()).unwrap_or("default").to_string()
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: Failure,
}

pub struct ApiError(Failure);

impl From<Failure> for ApiError {
    fn from(f: Failure) -> Self {
        ApiError(f)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0.kind {
            FailureKind::Parse => StatusCode::BAD_REQUEST,
            FailureKind::Validation => StatusCode::UNPROCESSABLE_ENTITY,
            FailureKind::Precondition => StatusCode::CONFLICT,
        };
        (status, Json(ErrorBody { error: self.0 })).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents serialize")
}

/// Parse a JSON body ourselves so that malformed bodies get the error payload.
fn body<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::parse(format!("bad request body: {e}")))
}

async fn session(st: &Shared, headers: &HeaderMap) -> Result<Arc<Mutex<Session>>, Failure> {
    st.map
        .lock()
        .await
        .get(&token(headers))
        .cloned()
        .ok_or_else(|| Failure::precondition("no algebra loaded in this session"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadBody {
    algebra: Value,
    #[serde(default)]
    dissection: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MutateBody {
    arc: String,
    direction: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CutBody {
    arc: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitBody {
    curve: Value,
}

#[derive(Deserialize)]
struct HomQuery {
    src: Option<String>,
    dst: Option<String>,
}

async fn load(State(st): State<Shared>, headers: HeaderMap, text: String) -> ApiResult {
    let b: LoadBody = body(&text)?;
    let alg = b.algebra.to_string();
    let diss = b.dissection.map(|d| d.to_string());
    let s = Session::load(&alg, diss.as_deref())?;
    let state = to_value(&s.state());
    st.map.lock().await.insert(token(&headers), Arc::new(Mutex::new(s)));
    Ok(Json(state))
}

async fn state(State(st): State<Shared>, headers: HeaderMap) -> ApiResult {
    let s = session(&st, &headers).await?;
    let s = s.lock().await;
    Ok(Json(to_value(&s.state())))
}

async fn surface(State(st): State<Shared>, headers: HeaderMap) -> ApiResult {
    let s = session(&st, &headers).await?;
    let s = s.lock().await;
    Ok(Json(serde_json::json!({ "surface": s.surface.dump(), "dual": s.surface.dual_dump() })))
}

async fn hom(State(st): State<Shared>, headers: HeaderMap, Query(q): Query<HomQuery>) -> ApiResult {
    let (Some(src), Some(dst)) = (q.src, q.dst) else {
        return Err(Failure::parse("hom needs the query parameters src and dst").into());
    };
    let s = session(&st, &headers).await?;
    let s = s.lock().await;
    Ok(Json(to_value(&s.hom(&src, &dst)?)))
}

async fn mutate(State(st): State<Shared>, headers: HeaderMap, text: String) -> ApiResult {
    let b: MutateBody = body(&text)?;
    let dir = Direction::parse(&b.direction)
        .ok_or_else(|| Failure::validation(format!("direction must be left or right, not `{}`", b.direction)))?;
    let s = session(&st, &headers).await?;
    let mut s = s.lock().await;
    let ex = s.mutate(&b.arc, dir)?;
    Ok(Json(serde_json::json!({ "exchange": ex, "state": s.state() })))
}

async fn cut(State(st): State<Shared>, headers: HeaderMap, text: String) -> ApiResult {
    let b: CutBody = body(&text)?;
    let s = session(&st, &headers).await?;
    let mut s = s.lock().await;
    let c = s.cut(&b.arc)?;
    Ok(Json(serde_json::json!({ "cut": c, "state": s.state() })))
}

async fn orbit(State(st): State<Shared>, headers: HeaderMap, text: String) -> ApiResult {
    let b: OrbitBody = body(&text)?;
    let s = session(&st, &headers).await?;
    let s = s.lock().await;
    Ok(Json(to_value(&s.orbit(&b.curve)?)))
}

async fn undo(State(st): State<Shared>, headers: HeaderMap) -> ApiResult {
    let s = session(&st, &headers).await?;
    let mut s = s.lock().await;
    s.undo()?;
    Ok(Json(to_value(&s.state())))
}

pub fn router() -> Router {
    Router::new()
        .route("/state", get(state))
        .route("/surface", get(surface))
        .route("/hom", get(hom))
        .route("/load", post(load))
        .route("/mutate", post(mutate))
        .route("/cut", post(cut))
        .route("/orbit", post(orbit))
        .route("/undo", post(undo))
        .with_state(Arc::new(Sessions::default()))
}

pub async fn serve(host: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
