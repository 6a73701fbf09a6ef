use std::sync::Arc;
use std::time::Instant;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use classilist_core::analytics::{
    build_all_histograms, confusion_matrix, feature_summary, reweight_whatif, select_bar,
    select_cell, select_samples,
};
use serde::Serialize;
use tower_http::services::ServeDir;

use crate::docs;
use crate::error::ApiError;
use crate::query::{json_body, HistogramQuery, IdsQuery, SelectionRequest, Selector, WhatIfRequest};
use crate::state::{AppState, Snapshot};

type Pairs = Query<Vec<(String, String)>>;

/// All API routes, static assets (when configured) and request logging.
pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/api/meta", get(get_meta))
        .route("/api/histograms", get(get_histograms))
        .route("/api/confusion", get(get_confusion))
        .route("/api/selection", post(post_selection))
        .route("/api/samples", get(get_samples))
        .route("/api/feature-stats", get(get_feature_stats))
        .route("/api/whatif", post(post_whatif))
        .route("/api/image/:id", get(get_image));
    let app = match state.assets() {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async { ApiError::not_found("no such route") }),
    };
    app.with_state(state).layer(middleware::from_fn(log_request))
}

async fn log_request(req: Request, next: Next) -> Response {
    let method = req.method().clone();
    let uri = req.uri().clone();
    let start = Instant::now();
    let res = next.run(req).await;
    tracing::info!(
        "{} {} {} {:.1}ms",
        method,
        uri,
        res.status().as_u16(),
        start.elapsed().as_secs_f64() * 1e3
    );
    res
}

fn snapshot(state: &AppState) -> Result<Arc<Snapshot>, ApiError> {
    state.snapshot().ok_or_else(ApiError::no_dataset)
}

/// Serializes `body` tagged with the dataset fingerprint as ETag; answers 304
/// when the client already holds it.
fn respond<T: Serialize>(snap: &Snapshot, headers: &HeaderMap, body: &T) -> Response {
    let etag = format!("\"{}\"", snap.fingerprint);
    let matches = headers
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"));
    let etag = HeaderValue::from_str(&etag).expect("hex digest is a valid header value");
    if matches {
        return (StatusCode::NOT_MODIFIED, [(header::ETAG, etag)]).into_response();
    }
    match serde_json::to_vec(body) {
        Ok(bytes) => (
            [(header::CONTENT_TYPE, HeaderValue::from_static("application/json")), (header::ETAG, etag)],
            bytes,
        )
            .into_response(),
        Err(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response(),
    }
}

async fn get_meta(State(state): State<AppState>, headers: HeaderMap) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    Ok(respond(&snap, &headers, &docs::meta(&snap)))
}

async fn get_histograms(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(pairs): Pairs,
) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let q = HistogramQuery::parse(&pairs)?;
    let ds = &snap.dataset;
    let classes = q.classes.iter().map(|c| c.resolve(ds)).collect::<Result<Vec<_>, _>>()?;
    let doc = docs::histograms(ds, &q.spec, &classes, q.members)?;
    Ok(respond(&snap, &headers, &doc))
}

async fn get_confusion(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(pairs): Pairs,
) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let mut members = false;
    for (key, value) in &pairs {
        match (key.as_str(), value.as_str()) {
            ("members", "" | "true" | "1") => members = true,
            ("members", "false" | "0") => members = false,
            _ => return Err(ApiError::bad_request(format!("unsupported parameter `{key}={value}`"))),
        }
    }
    let ds = &snap.dataset;
    let doc = docs::confusion(ds, &confusion_matrix(ds), members);
    Ok(respond(&snap, &headers, &doc))
}

async fn post_selection(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let req: SelectionRequest = json_body(&body)?;
    let ds = &snap.dataset;
    let histograms = build_all_histograms(ds, &req.spec)?;
    let result = match &req.selector {
        Selector::Bar { class, bin, group } => select_bar(ds, &histograms, class.resolve(ds)?, *bin, *group)?,
        Selector::Cell { actual, predicted } => {
            select_cell(ds, &histograms, actual.resolve(ds)?, predicted.resolve(ds)?)?
        }
        Selector::Samples { ids } => select_samples(ds, &histograms, ids)?,
    };
    let doc = docs::selection(ds, &req.selector, req.spec, &result);
    Ok(respond(&snap, &headers, &doc))
}

async fn get_samples(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(pairs): Pairs,
) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let q = IdsQuery::parse(&pairs, true)?;
    let ds = &snap.dataset;
    let docs: Vec<_> = ds
        .index_of_ids(&q.ids)?
        .into_iter()
        .map(|i| docs::sample(ds, i, q.outcomes))
        .collect();
    Ok(respond(&snap, &headers, &docs))
}

async fn get_feature_stats(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(pairs): Pairs,
) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let q = IdsQuery::parse(&pairs, false)?;
    let summary = feature_summary(&snap.dataset, &q.ids)?;
    Ok(respond(&snap, &headers, &summary))
}

async fn post_whatif(
    State(state): State<AppState>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let req: WhatIfRequest = json_body(&body)?;
    let report = reweight_whatif(&snap.dataset, &req.weights)?;
    Ok(respond(&snap, &headers, &docs::whatif(&snap.dataset, &report)))
}

async fn get_image(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = snapshot(&state)?;
    let ds = &snap.dataset;
    let i = ds
        .position(&id)
        .ok_or_else(|| ApiError::not_found(format!("unknown sample id `{id}`")))?;
    let path = ds
        .image_path(i)
        .ok_or_else(|| ApiError::not_found(format!("sample `{id}` has no image")))?;
    let bytes = tokio::fs::read(&path)
        .await
        .map_err(|e| ApiError::not_found(format!("image for `{id}` unreadable: {e}")))?;
    let mime = match path.extension().and_then(|e| e.to_str()) {
        Some("png") => "image/png",
        Some("jpg" | "jpeg") => "image/jpeg",
        _ => "application/octet-stream",
    };
    Ok(([(header::CONTENT_TYPE, mime)], Body::from(bytes)).into_response())
}
