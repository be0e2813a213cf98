//! HTTP routes over a shared [`Engine`].

use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use oekg_core::engine::{Engine, EngineError, UploadMode};
use oekg_core::ingest::IngestError;
use oekg_core::linker::{ExternalRef, LinkError, RefSource};
use oekg_core::query::QueryError;
use oekg_core::store::NamedGraphId;

pub const TSV: &str = "text/tab-separated-values";

/// An error response: a status and a JSON body with at least `error`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        Self { status, body: json!({ "error": message.to_string() }) }
    }

    fn bad_request(message: impl ToString) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        let message = e.to_string();
        match e {
            QueryError::Syntax { offset, line, column, .. } => Self {
                status: StatusCode::BAD_REQUEST,
                body: json!({ "error": message, "offset": offset, "line": line, "column": column }),
            },
            QueryError::UnknownPrefix { prefix, line, column } => Self {
                status: StatusCode::BAD_REQUEST,
                body: json!({ "error": message, "prefix": prefix, "line": line, "column": column }),
            },
            QueryError::Unsupported { feature, line, column } => Self {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                body: json!({ "error": message, "feature": feature, "line": line, "column": column }),
            },
        }
    }
}

impl From<LinkError> for ApiError {
    fn from(e: LinkError) -> Self {
        let status = match e {
            LinkError::NotFound(_) => StatusCode::NOT_FOUND,
            LinkError::AliasConflict { .. } => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e)
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = match e {
            EngineError::Query(q) => return q.into(),
            EngineError::Link(l) => return l.into(),
            EngineError::ReadOnly => StatusCode::CONFLICT,
            EngineError::Schema(_) => StatusCode::UNPROCESSABLE_ENTITY,
            EngineError::MalformedSchema(_) | EngineError::Prefix(_) => StatusCode::BAD_REQUEST,
            EngineError::Ingest(IngestError::Io { .. }) => StatusCode::INTERNAL_SERVER_ERROR,
            EngineError::Ingest(_) => StatusCode::UNPROCESSABLE_ENTITY,
            EngineError::Io { .. } | EngineError::Log(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e)
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs blocking engine work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))
}

pub fn router(engine: Arc<Engine>, max_body_bytes: usize) -> Router {
    Router::new()
        .route("/api/getId", get(get_id))
        .route("/api/uploadGraph", post(upload_graph))
        .route("/api/query", post(query))
        .route("/api/stats", get(stats))
        .layer(DefaultBodyLimit::max(max_body_bytes))
        .with_state(engine)
}

#[derive(Deserialize)]
struct GetIdParams {
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    language: Option<String>,
    value: String,
}

/// `GET /api/getId?language=en&value=Barack_Obama`; `source` defaults to
/// `wikipedia-label`.
async fn get_id(State(engine): State<Arc<Engine>>, Query(p): Query<GetIdParams>) -> ApiResult<Json<serde_json::Value>> {
    let source: RefSource = match p.source.as_deref() {
        None => RefSource::WikipediaLabel,
        Some(s) => s.parse().map_err(ApiError::bad_request)?,
    };
    let reference = ExternalRef::new(source, p.language.as_deref(), &p.value)?;
    let id = engine.get_id(&reference)?;
    Ok(Json(json!({ "id": id.local(), "iri": id.iri().as_str() })))
}

#[derive(Deserialize)]
struct UploadParams {
    graph: String,
    #[serde(default)]
    mode: Option<String>,
}

/// `POST /api/uploadGraph?graph=news&mode=extend` with an N-Triples body.
async fn upload_graph(
    State(engine): State<Arc<Engine>>,
    Query(p): Query<UploadParams>,
    body: String,
) -> ApiResult<Json<serde_json::Value>> {
    let graph = NamedGraphId::new(&p.graph).map_err(ApiError::bad_request)?;
    let mode: UploadMode = match p.mode.as_deref() {
        None => UploadMode::default(),
        Some(m) => m.parse().map_err(ApiError::bad_request)?,
    };
    let report = blocking(move || engine.upload(&graph, &body, mode)).await??;
    Ok(Json(serde_json::to_value(report).expect("report serialises")))
}

#[derive(Deserialize)]
struct QueryParams {
    /// Comma-separated graph names restricting the default graph.
    #[serde(default)]
    graph: Option<String>,
}

enum Format {
    Json,
    Tsv,
}

fn negotiate(headers: &HeaderMap) -> ApiResult<Format> {
    let Some(accept) = headers.get(header::ACCEPT) else { return Ok(Format::Json) };
    let accept = accept.to_str().map_err(ApiError::bad_request)?;
    for range in accept.split(',') {
        let media = range.split(';').next().unwrap_or("").trim();
        match media {
            TSV | "text/tsv" => return Ok(Format::Tsv),
            "application/json" | "application/*" | "*/*" | "" => return Ok(Format::Json),
            _ => {}
        }
    }
    Err(ApiError::new(StatusCode::NOT_ACCEPTABLE, format!("cannot produce {accept}; use application/json or {TSV}")))
}

/// `POST /api/query` with the query text as body. JSON by default, TSV when
/// the `Accept` header asks for it.
async fn query(
    State(engine): State<Arc<Engine>>,
    Query(p): Query<QueryParams>,
    headers: HeaderMap,
    body: String,
) -> ApiResult<Response> {
    let format = negotiate(&headers)?;
    let scope = p
        .graph
        .filter(|g| !g.trim().is_empty())
        .map(|g| g.split(',').map(|name| NamedGraphId::new(name.trim())).collect::<Result<Vec<_>, _>>())
        .transpose()
        .map_err(ApiError::bad_request)?;
    let results = blocking(move || engine.query(&body, scope.as_deref())).await??;
    Ok(match format {
        Format::Json => Json(results.to_json()).into_response(),
        Format::Tsv => ([(header::CONTENT_TYPE, TSV)], results.to_tsv()).into_response(),
    })
}

/// `GET /api/stats`: triples per graph and their total.
async fn stats(State(engine): State<Arc<Engine>>) -> Json<serde_json::Value> {
    Json(serde_json::to_value(engine.stats()).expect("stats serialise"))
}
