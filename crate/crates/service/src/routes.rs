use std::collections::HashMap;
use std::path::Path as FsPath;
use std::sync::Arc;

use axum::extract::rejection::{PathRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use tower_http::services::{ServeDir, ServeFile};

use crate::api::{Cooccurring, ErrorBody, ErrorDetail, KeywordSearch, PaperList};
use crate::index::paginate;
use crate::store::SnapshotStore;

pub const DEFAULT_LIMIT: usize = 50;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::NOT_FOUND,
            code: "not_found",
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "bad_request",
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code.to_owned(),
                message: self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        ApiError::bad_request(e.body_text())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;
type Params = Result<Query<HashMap<String, String>>, QueryRejection>;

fn number(params: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, ApiError> {
    match params.get(name) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| ApiError::bad_request(format!("`{name}` must be a non-negative integer"))),
    }
}

fn window(params: &HashMap<String, String>) -> Result<(usize, usize), ApiError> {
    let offset = number(params, "offset", 0)?;
    let limit = number(params, "limit", DEFAULT_LIMIT)?;
    if limit == 0 {
        return Err(ApiError::bad_request("`limit` must be at least 1"));
    }
    Ok((offset, limit))
}

fn unknown_keyword(k: &str) -> ApiError {
    ApiError::not_found(format!("unknown keyword `{k}`"))
}

async fn keywords(
    State(store): State<Arc<SnapshotStore>>,
    params: Params,
) -> ApiResult<KeywordSearch> {
    let Query(params) = params?;
    let (offset, limit) = window(&params)?;
    let query = params.get("q").cloned().unwrap_or_default();
    let page = store.current().search(&query, offset, limit);
    Ok(Json(KeywordSearch { query, page }))
}

async fn keyword(
    State(store): State<Arc<SnapshotStore>>,
    path: Result<Path<String>, PathRejection>,
) -> Result<Response, ApiError> {
    let Path(k) = path?;
    let detail = store
        .current()
        .detail(&k)
        .ok_or_else(|| unknown_keyword(&k))?;
    Ok(Json(detail).into_response())
}

async fn cooccurring(
    State(store): State<Arc<SnapshotStore>>,
    path: Result<Path<String>, PathRejection>,
    params: Params,
) -> ApiResult<Cooccurring> {
    let Path(k) = path?;
    let Query(params) = params?;
    let (offset, limit) = window(&params)?;
    let index = store.current();
    let neighbors = index.neighbors(&k).ok_or_else(|| unknown_keyword(&k))?;
    let keyword = index.resolve(&k).unwrap_or(&k).to_owned();
    Ok(Json(Cooccurring {
        keyword,
        page: paginate(neighbors, offset, limit),
    }))
}

async fn trend(
    State(store): State<Arc<SnapshotStore>>,
    path: Result<Path<String>, PathRejection>,
) -> Result<Response, ApiError> {
    let Path(k) = path?;
    let trend = store
        .current()
        .trend(&k)
        .ok_or_else(|| unknown_keyword(&k))?;
    Ok(Json(trend).into_response())
}

async fn papers(State(store): State<Arc<SnapshotStore>>, params: Params) -> ApiResult<PaperList> {
    let Query(params) = params?;
    let (offset, limit) = window(&params)?;
    let keyword = params.get("keyword").cloned();
    let list = store
        .current()
        .papers(keyword.as_deref())
        .ok_or_else(|| unknown_keyword(keyword.as_deref().unwrap_or_default()))?;
    Ok(Json(PaperList {
        keyword,
        page: paginate(list, offset, limit),
    }))
}

async fn clusters(State(store): State<Arc<SnapshotStore>>) -> Response {
    Json(store.current().clusters()).into_response()
}

async fn cluster(
    State(store): State<Arc<SnapshotStore>>,
    path: Result<Path<String>, PathRejection>,
) -> Result<Response, ApiError> {
    let Path(raw) = path?;
    let id: usize = raw
        .parse()
        .map_err(|_| ApiError::not_found(format!("unknown cluster `{raw}`")))?;
    let detail = store
        .current()
        .cluster(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown cluster `{raw}`")))?;
    Ok(Json(detail).into_response())
}

async fn strategic(State(store): State<Arc<SnapshotStore>>) -> Response {
    Json(store.current().strategic()).into_response()
}

async fn meta(State(store): State<Arc<SnapshotStore>>) -> Response {
    Json(store.current().meta()).into_response()
}

async fn api_fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

#[derive(Serialize)]
struct Root {
    api: &'static str,
}

async fn root() -> Json<Root> {
    Json(Root { api: "/api/v1/" })
}

/// The `/api/v1/` routes, plus the web UI at `/` when `ui_dir` is given.
/// Unknown UI paths fall back to `index.html` so client-side routes can be
/// deep-linked.
pub fn router(store: Arc<SnapshotStore>, ui_dir: Option<&FsPath>) -> Router {
    let api = Router::new()
        .route("/keywords", get(keywords))
        .route("/keywords/{keyword}", get(keyword))
        .route("/keywords/{keyword}/cooccurring", get(cooccurring))
        .route("/keywords/{keyword}/trend", get(trend))
        .route("/papers", get(papers))
        .route("/clusters", get(clusters))
        .route("/clusters/{id}", get(cluster))
        .route("/strategic", get(strategic))
        .route("/meta", get(meta))
        .fallback(api_fallback)
        .with_state(store);
    let app = Router::new().nest("/api/v1", api);
    match ui_dir {
        Some(dir) => {
            let spa = ServeDir::new(dir).fallback(ServeFile::new(dir.join("index.html")));
            app.fallback_service(spa)
        }
        None => app.route("/", get(root)).fallback(api_fallback),
    }
}
