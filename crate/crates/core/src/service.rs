//! HTTP facade over one analysed corpus and its review session.
//!
//! Handlers only translate between JSON and [`SelectionSession`] calls, so the
//! service and the terminal dialog cannot disagree about ordering or
//! distances. Every response carries the corpus hash (body field and
//! `x-corpus-hash` header); mutating requests must send it back and get
//! `409 Conflict` when it does not match.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::cluster::Cluster;
use crate::ingest::{Encoding, Format, PublicationRecord};
use crate::session::{
    Decision, LogEntry, MeritSummary, PresentationMode, SelectionSession, SessionError,
    SessionFile, Verdict,
};

pub const API_SCHEMA_VERSION: u32 = 1;
pub const HASH_HEADER: &str = "x-corpus-hash";

pub struct AppState {
    analysis: Arc<Analysis>,
    session: RwLock<SelectionSession>,
    session_path: Option<PathBuf>,
}

impl AppState {
    /// `session_path`, when given, is rewritten after every mutation.
    pub fn new(
        analysis: Arc<Analysis>,
        session: SelectionSession,
        session_path: Option<PathBuf>,
    ) -> Arc<Self> {
        Arc::new(AppState {
            analysis,
            session: RwLock::new(session),
            session_path,
        })
    }

    pub fn session(&self) -> SelectionSession {
        self.session.read().expect("session lock").clone()
    }

    fn hash(&self) -> &str {
        &self.analysis.corpus.hash
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/v1/corpus", get(corpus_info))
        .route("/api/v1/clusters", get(list_clusters))
        .route("/api/v1/clusters/{id}", get(cluster_detail))
        .route("/api/v1/decisions", post(post_decision))
        .route("/api/v1/decisions/bulk", post(post_bulk))
        .route("/api/v1/mode", post(post_mode))
        .route("/api/v1/cutoff", post(post_cutoff))
        .route("/api/v1/auto-reject/preview", get(auto_reject_preview))
        .route("/api/v1/auto-reject", post(post_auto_reject))
        .route("/api/v1/selection", get(get_selection))
        .route("/api/v1/selection/export", get(export_selection))
        .route("/api/v1/log", get(get_log))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    hash: String,
}

impl ApiError {
    fn new(state: &AppState, status: StatusCode, code: &'static str, message: String) -> Self {
        ApiError {
            status,
            code,
            message,
            hash: state.hash().to_string(),
        }
    }

    fn session(state: &AppState, err: SessionError) -> Self {
        let (status, code) = match err {
            SessionError::UnknownCluster(_) => (StatusCode::NOT_FOUND, "unknown_cluster"),
            SessionError::NothingAccepted => (StatusCode::UNPROCESSABLE_ENTITY, "nothing_accepted"),
            SessionError::InvalidCutoff(_) => (StatusCode::BAD_REQUEST, "invalid_cutoff"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "session"),
        };
        ApiError::new(state, status, code, err.to_string())
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    schema_version: u32,
    corpus_hash: &'a str,
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            schema_version: API_SCHEMA_VERSION,
            corpus_hash: &self.hash,
            error: ErrorDetail {
                code: self.code,
                message: &self.message,
            },
        };
        with_hash(&self.hash, (self.status, Json(body)).into_response())
    }
}

fn with_hash(hash: &str, mut response: Response) -> Response {
    if let Ok(value) = HeaderValue::from_str(hash) {
        response.headers_mut().insert(HASH_HEADER, value);
    }
    response
}

/// Envelope shared by every successful JSON response.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub corpus_hash: String,
    #[serde(flatten)]
    pub body: T,
}

fn reply<T: Serialize>(state: &AppState, body: T) -> Response {
    let envelope = Envelope {
        schema_version: API_SCHEMA_VERSION,
        corpus_hash: state.hash().to_string(),
        body,
    };
    with_hash(state.hash(), Json(envelope).into_response())
}

type ApiResult = Result<Response, ApiError>;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct RecordView {
    pub id: usize,
    pub title: String,
    pub authors: Vec<String>,
    pub source: String,
    pub year: Option<i32>,
    pub citations: u64,
    pub address_words: Vec<String>,
}

impl From<&PublicationRecord> for RecordView {
    fn from(r: &PublicationRecord) -> Self {
        RecordView {
            id: r.id,
            title: r.display.title.clone(),
            authors: r.display.authors.clone(),
            source: r.display.source.clone(),
            year: r.year_value(),
            citations: r.citations,
            address_words: r.display.address_words.clone(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ClusterView {
    pub id: usize,
    pub papers: usize,
    pub citations: u64,
    pub period: String,
    pub decision: Decision,
    /// `null` while no cluster is accepted
    pub distance_to_selected: Option<f64>,
    pub representative: RecordView,
}

fn cluster_view(analysis: &Analysis, session: &SelectionSession, c: &Cluster) -> ClusterView {
    ClusterView {
        id: c.id,
        papers: c.paper_count,
        citations: c.total_citations,
        period: c.period(),
        decision: session.decision(c.id).unwrap_or(Decision::Undecided),
        distance_to_selected: session.distance_to_selected(c.id, &analysis.clusters),
        representative: (&analysis.corpus.records[c.representative_id]).into(),
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ClusterList {
    pub mode: PresentationMode,
    pub cutoff: f64,
    pub next: Option<usize>,
    pub undecided: usize,
    /// in presentation order
    pub clusters: Vec<ClusterView>,
}

fn cluster_list(analysis: &Analysis, session: &SelectionSession) -> ClusterList {
    let clusters = session
        .presentation_order(&analysis.clusters)
        .into_iter()
        .filter_map(|id| analysis.clusters.get(id))
        .map(|c| cluster_view(analysis, session, c))
        .collect();
    ClusterList {
        mode: session.presentation_mode,
        cutoff: session.cutoff,
        next: session.next_cluster(&analysis.clusters),
        undecided: session.undecided_count(),
        clusters,
    }
}

#[derive(Serialize)]
struct CorpusInfo<'a> {
    query_name: &'a str,
    records: usize,
    clusters: usize,
    format: Format,
    sources: Vec<&'a str>,
}

async fn corpus_info(State(state): State<Arc<AppState>>) -> Response {
    let corpus = &state.analysis.corpus;
    reply(
        &state,
        CorpusInfo {
            query_name: &corpus.query_name,
            records: corpus.len(),
            clusters: state.analysis.clusters.len(),
            format: corpus.format,
            sources: corpus.sources.iter().map(|s| s.name.as_str()).collect(),
        },
    )
}

async fn list_clusters(State(state): State<Arc<AppState>>) -> Response {
    let session = state.session.read().expect("session lock");
    reply(&state, cluster_list(&state.analysis, &session))
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ClusterDetail {
    pub cluster: ClusterView,
    pub members: Vec<RecordView>,
}

async fn cluster_detail(State(state): State<Arc<AppState>>, Path(id): Path<usize>) -> ApiResult {
    let analysis = &state.analysis;
    let cluster = analysis
        .clusters
        .get(id)
        .ok_or_else(|| ApiError::session(&state, SessionError::UnknownCluster(id)))?;
    let session = state.session.read().expect("session lock");
    let detail = ClusterDetail {
        cluster: cluster_view(analysis, &session, cluster),
        members: cluster
            .member_ids
            .iter()
            .map(|&r| (&analysis.corpus.records[r]).into())
            .collect(),
    };
    Ok(reply(&state, detail))
}

/// Apply `change` under the write lock after checking the echoed hash, then
/// persist and answer with the fresh cluster list plus `extra`.
fn mutate<T: Serialize>(
    state: &AppState,
    echoed: &str,
    change: impl FnOnce(&mut SelectionSession) -> Result<T, SessionError>,
) -> ApiResult {
    if echoed != state.hash() {
        return Err(ApiError::new(
            state,
            StatusCode::CONFLICT,
            "corpus_hash_mismatch",
            format!("request was made against corpus {echoed}"),
        ));
    }
    let mut session = state.session.write().expect("session lock");
    let mut candidate = session.clone();
    let extra = change(&mut candidate).map_err(|e| ApiError::session(state, e))?;
    if let Some(path) = &state.session_path {
        SessionFile::new(state.analysis.settings.clone(), candidate.clone())
            .save(path)
            .map_err(|e| {
                ApiError::new(
                    state,
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "save_failed",
                    format!("{}: {e}", path.display()),
                )
            })?;
    }
    *session = candidate;
    #[derive(Serialize)]
    struct Mutated<T> {
        result: T,
        #[serde(flatten)]
        list: ClusterList,
    }
    let list = cluster_list(&state.analysis, &session);
    Ok(reply(
        state,
        Mutated {
            result: extra,
            list,
        },
    ))
}

#[derive(Deserialize, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DecisionVerb {
    Accept,
    Reject,
    Undo,
}

#[derive(Deserialize, Serialize, Debug, Clone)]
pub struct DecisionRequest {
    pub corpus_hash: String,
    pub cluster: usize,
    pub verdict: DecisionVerb,
}

async fn post_decision(
    State(state): State<Arc<AppState>>,
    Json(req): Json<DecisionRequest>,
) -> ApiResult {
    mutate(&state, &req.corpus_hash, |s| {
        match req.verdict {
            DecisionVerb::Accept => s.decide(req.cluster, Verdict::Accept)?,
            DecisionVerb::Reject => s.decide(req.cluster, Verdict::Reject)?,
            DecisionVerb::Undo => s.undo(req.cluster)?,
        }
        Ok(req.cluster)
    })
}

#[derive(Deserialize, Serialize, Debug, Clone)]
pub struct BulkRequest {
    pub corpus_hash: String,
    pub verdict: Verdict,
}

async fn post_bulk(State(state): State<Arc<AppState>>, Json(req): Json<BulkRequest>) -> ApiResult {
    mutate(&state, &req.corpus_hash, |s| {
        Ok(match req.verdict {
            Verdict::Accept => s.accept_all_remaining(),
            Verdict::Reject => s.reject_all_remaining(),
        })
    })
}

#[derive(Deserialize, Serialize, Debug, Clone)]
pub struct ModeRequest {
    pub corpus_hash: String,
    pub mode: PresentationMode,
}

async fn post_mode(State(state): State<Arc<AppState>>, Json(req): Json<ModeRequest>) -> ApiResult {
    mutate(&state, &req.corpus_hash, |s| {
        s.set_mode(req.mode);
        Ok(req.mode)
    })
}

#[derive(Deserialize, Serialize, Debug, Clone)]
pub struct CutoffRequest {
    pub corpus_hash: String,
    pub cutoff: f64,
}

async fn post_cutoff(
    State(state): State<Arc<AppState>>,
    Json(req): Json<CutoffRequest>,
) -> ApiResult {
    mutate(&state, &req.corpus_hash, |s| {
        s.set_cutoff(req.cutoff)?;
        Ok(req.cutoff)
    })
}

#[derive(Deserialize)]
struct PreviewQuery {
    cutoff: Option<f64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AutoRejectPreview {
    pub cutoff: f64,
    pub count: usize,
    pub clusters: Vec<usize>,
}

async fn auto_reject_preview(
    State(state): State<Arc<AppState>>,
    Query(query): Query<PreviewQuery>,
) -> ApiResult {
    let session = state.session.read().expect("session lock");
    let cutoff = query.cutoff.unwrap_or(session.cutoff);
    let clusters = session
        .beyond_cutoff(&state.analysis.clusters, cutoff)
        .map_err(|e| ApiError::session(&state, e))?;
    Ok(reply(
        &state,
        AutoRejectPreview {
            cutoff,
            count: clusters.len(),
            clusters,
        },
    ))
}

#[derive(Deserialize, Serialize, Debug, Clone)]
pub struct HashOnly {
    pub corpus_hash: String,
}

async fn post_auto_reject(
    State(state): State<Arc<AppState>>,
    Json(req): Json<HashOnly>,
) -> ApiResult {
    let analysis = Arc::clone(&state.analysis);
    mutate(&state, &req.corpus_hash, |s| {
        s.auto_reject_beyond_cutoff(&analysis.clusters)
    })
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SelectionView {
    pub clusters: Vec<usize>,
    pub record_ids: Vec<usize>,
    pub summary: MeritSummary,
}

async fn get_selection(State(state): State<Arc<AppState>>) -> ApiResult {
    let session = state.session.read().expect("session lock");
    let selection = session
        .export_selection(&state.analysis.clusters, &state.analysis.corpus)
        .map_err(|e| ApiError::session(&state, e))?;
    Ok(reply(
        &state,
        SelectionView {
            clusters: session.accepted(),
            record_ids: selection.record_ids,
            summary: selection.summary,
        },
    ))
}

async fn export_selection(State(state): State<Arc<AppState>>) -> ApiResult {
    let session = state.session.read().expect("session lock");
    let corpus = &state.analysis.corpus;
    let selection = session
        .export_selection(&state.analysis.clusters, corpus)
        .map_err(|e| ApiError::session(&state, e))?;
    let extension = match corpus.format {
        Format::Tagged => "txt",
        Format::Tsv => "tsv",
    };
    let charset = if corpus
        .sources
        .iter()
        .all(|s| s.encoding == Encoding::Latin1)
    {
        "iso-8859-1"
    } else {
        "utf-8"
    };
    let response = (
        [
            (
                header::CONTENT_TYPE,
                format!("text/plain; charset={charset}"),
            ),
            (
                header::CONTENT_DISPOSITION,
                format!("attachment; filename=\"selection.{extension}\""),
            ),
        ],
        selection.export_bytes(corpus),
    )
        .into_response();
    Ok(with_hash(state.hash(), response))
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct LogView {
    pub entries: Vec<LogEntry>,
}

async fn get_log(State(state): State<Arc<AppState>>) -> Response {
    let session = state.session.read().expect("session lock");
    reply(
        &state,
        LogView {
            entries: session.log.clone(),
        },
    )
}
