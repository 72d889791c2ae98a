//! Read-only HTTP recommendation service.
//!
//! `GET /recommend?source_method=<id>[&n=<k>]` answers
//! `{"source": id, "recommendations": [{"target", "score"}]}` with the top
//! `k` (default 1) targets in the same order as top-1 recommendation.
//! `GET /health` answers 200. Requests arriving before the libraries are
//! profiled get 503.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use apimap_core::corpus::ApiLibrary;
use apimap_core::eval::{rank_targets, PairScorer, RapimScorer, ScoredTarget};
use apimap_core::features::MethodProfile;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use tokio::net::TcpListener;

pub struct Ready {
    scorer: RapimScorer,
    sources: BTreeMap<String, MethodProfile>,
    targets: Vec<MethodProfile>,
}

impl Ready {
    pub fn new(scorer: RapimScorer, source_lib: &ApiLibrary, target_lib: &ApiLibrary) -> Self {
        let fx = scorer.extractor();
        let sources = source_lib.methods().iter().map(|m| (m.id(), fx.profile(m))).collect();
        let targets = target_lib.methods().iter().map(|m| fx.profile(m)).collect();
        Self { scorer, sources, targets }
    }
}

/// Shared state; empty until startup finishes.
pub type ServiceState = Arc<OnceLock<Ready>>;

#[derive(Serialize)]
struct RecommendResponse<'a> {
    source: &'a str,
    recommendations: Vec<ScoredTarget>,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(ErrorBody { error: message.into() })).into_response()
}

async fn health() -> StatusCode {
    StatusCode::OK
}

async fn recommend(State(state): State<ServiceState>, Query(q): Query<HashMap<String, String>>) -> Response {
    let Some(ready) = state.get() else {
        return error(StatusCode::SERVICE_UNAVAILABLE, "starting up");
    };
    let Some(id) = q.get("source_method").map(|s| s.trim()).filter(|s| !s.is_empty()) else {
        return error(StatusCode::BAD_REQUEST, "missing source_method");
    };
    let n = match q.get("n").map(|s| s.trim().parse::<usize>()) {
        None => 1,
        Some(Ok(n)) if n >= 1 => n,
        Some(_) => return error(StatusCode::BAD_REQUEST, "n must be a positive integer"),
    };
    let Some(source) = ready.sources.get(id) else {
        return error(StatusCode::NOT_FOUND, format!("unknown source method {id}"));
    };
    if ready.targets.is_empty() {
        return error(StatusCode::NOT_FOUND, "target library has no methods");
    }
    let mut ranked = rank_targets(&ready.scorer, source, &ready.targets);
    ranked.truncate(n);
    Json(RecommendResponse { source: id, recommendations: ranked }).into_response()
}

pub fn router(state: ServiceState) -> Router {
    Router::new().route("/health", get(health)).route("/recommend", get(recommend)).with_state(state)
}

/// Serves on `listener`, profiling the libraries after the socket is open.
pub async fn serve(
    listener: TcpListener,
    scorer: RapimScorer,
    source_lib: ApiLibrary,
    target_lib: ApiLibrary,
) -> std::io::Result<()> {
    let state: ServiceState = Arc::new(OnceLock::new());
    let init = Arc::clone(&state);
    tokio::task::spawn_blocking(move || {
        let _ = init.set(Ready::new(scorer, &source_lib, &target_lib));
        log::info!("service ready");
    });
    axum::serve(listener, router(state)).await
}
