use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use authorsep::ingest::Source;
use authorsep::service::{router, AppState, API_SCHEMA_VERSION, HASH_HEADER};
use authorsep::session::{
    Clock, CorpusRef, PresentationMode, SelectionSession, SessionFile, Verdict, DEFAULT_CUTOFF,
};
use authorsep::{Analysis, Settings};

fn analysis() -> Arc<Analysis> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/dialog/soler.txt");
    let source = Source::new("soler.txt", std::fs::read(path).unwrap());
    Arc::new(
        Analysis::from_sources(&[source], None, Some("Soler, JM"), Settings::default()).unwrap(),
    )
}

fn session(analysis: &Analysis) -> SelectionSession {
    SelectionSession::with_clock(
        CorpusRef::of(&analysis.corpus),
        &analysis.clusters,
        DEFAULT_CUTOFF,
        Clock::Fixed(7),
    )
    .unwrap()
}

struct Harness {
    analysis: Arc<Analysis>,
    state: Arc<AppState>,
    app: Router,
}

impl Harness {
    fn new(session_path: Option<PathBuf>) -> Self {
        let analysis = analysis();
        let state = AppState::new(Arc::clone(&analysis), session(&analysis), session_path);
        let app = router(Arc::clone(&state));
        Harness {
            analysis,
            state,
            app,
        }
    }

    fn hash(&self) -> String {
        self.analysis.corpus.hash.clone()
    }

    async fn send(&self, request: Request<Body>) -> (StatusCode, Option<String>, Vec<u8>) {
        let response = self.app.clone().oneshot(request).await.unwrap();
        let status = response.status();
        let hash = response
            .headers()
            .get(HASH_HEADER)
            .map(|v| v.to_str().unwrap().to_string());
        let body = response.into_body().collect().await.unwrap().to_bytes();
        (status, hash, body.to_vec())
    }

    async fn get(&self, uri: &str) -> (StatusCode, Value) {
        let (status, hash, body) = self
            .send(Request::get(uri).body(Body::empty()).unwrap())
            .await;
        assert_eq!(hash.as_deref(), Some(self.hash().as_str()));
        (status, serde_json::from_slice(&body).unwrap())
    }

    async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        let request = Request::post(uri)
            .header("content-type", "application/json")
            .body(Body::from(body.to_string()))
            .unwrap();
        let (status, hash, body) = self.send(request).await;
        assert_eq!(hash.as_deref(), Some(self.hash().as_str()));
        (status, serde_json::from_slice(&body).unwrap())
    }

    async fn decide(&self, cluster: usize, verdict: &str) -> (StatusCode, Value) {
        self.post(
            "/api/v1/decisions",
            json!({"corpus_hash": self.hash(), "cluster": cluster, "verdict": verdict}),
        )
        .await
    }
}

fn ids(list: &Value) -> Vec<u64> {
    list["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_u64().unwrap())
        .collect()
}

#[tokio::test]
async fn fresh_session_lists_undecided_clusters_by_citations() {
    let h = Harness::new(None);
    let (status, list) = h.get("/api/v1/clusters").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list["schema_version"], API_SCHEMA_VERSION);
    assert_eq!(list["corpus_hash"], h.hash());
    assert_eq!(ids(&list), [1, 2, 3, 4, 5]);
    for c in list["clusters"].as_array().unwrap() {
        assert_eq!(c["decision"], "undecided");
        assert!(c["distance_to_selected"].is_null());
    }
    let citations: Vec<u64> = list["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["citations"].as_u64().unwrap())
        .collect();
    assert!(citations.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(list["next"], 1);
    assert_eq!(
        list["clusters"][0]["representative"]["source"],
        "Int. J. Quantum Chem. (1997) 65, 453:461"
    );
}

#[tokio::test]
async fn accepting_populates_distances_and_next_follows_the_session() {
    let h = Harness::new(None);
    let (status, _) = h
        .post(
            "/api/v1/mode",
            json!({"corpus_hash": h.hash(), "mode": "by_distance_to_selected"}),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    let (status, list) = h.decide(1, "accept").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list["result"], 1);

    let session = h.state.session();
    let clusters = &h.analysis.clusters;
    let order: Vec<u64> = session
        .presentation_order(clusters)
        .into_iter()
        .map(|id| id as u64)
        .collect();
    assert_eq!(ids(&list), order);
    assert_eq!(
        list["next"].as_u64().map(|n| n as usize),
        session.next_cluster(clusters)
    );
    for c in list["clusters"].as_array().unwrap() {
        let id = c["id"].as_u64().unwrap() as usize;
        let expected = session.distance_to_selected(id, clusters).unwrap();
        assert_eq!(c["distance_to_selected"].as_f64().unwrap(), expected);
    }
    assert_eq!(list["clusters"][0]["decision"], "accepted");
}

#[tokio::test]
async fn stale_hash_is_a_conflict_and_changes_nothing() {
    let h = Harness::new(None);
    let before = h.state.session();
    let (status, body) = h
        .post(
            "/api/v1/decisions",
            json!({"corpus_hash": "0000", "cluster": 1, "verdict": "accept"}),
        )
        .await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"]["code"], "corpus_hash_mismatch");
    assert_eq!(h.state.session(), before);
}

#[tokio::test]
async fn unknown_clusters_are_not_found() {
    let h = Harness::new(None);
    let (status, body) = h.get("/api/v1/clusters/99").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "unknown_cluster");
    let (status, _) = h.decide(99, "reject").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(h.state.session().log.len(), 1);
}

#[tokio::test]
async fn cluster_detail_lists_members() {
    let h = Harness::new(None);
    let (status, body) = h.get("/api/v1/clusters/2").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["cluster"]["papers"], 3);
    let members = body["members"].as_array().unwrap();
    assert_eq!(members.len(), 3);
    assert_eq!(
        members[0]["title"],
        "Expression of maize genes in transgenic tobacco"
    );
}

#[tokio::test]
async fn preview_count_matches_auto_reject() {
    let h = Harness::new(None);
    let (status, body) = h.get("/api/v1/auto-reject/preview").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["code"], "nothing_accepted");

    h.decide(1, "accept").await;
    let (status, preview) = h.get("/api/v1/auto-reject/preview?cutoff=3").await;
    assert_eq!(status, StatusCode::OK);
    let (status, done) = h
        .post("/api/v1/auto-reject", json!({"corpus_hash": h.hash()}))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(preview["count"], done["result"]);
    assert_eq!(done["undecided"], 0);

    let (status, _) = h.get("/api/v1/auto-reject/preview?cutoff=-1").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn selection_and_export_follow_the_session() {
    let h = Harness::new(None);
    let (status, _) = h.get("/api/v1/selection").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    h.decide(1, "accept").await;
    let (status, selection) = h.get("/api/v1/selection").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(selection["summary"]["papers"], 4);
    assert_eq!(selection["summary"]["h_index"], 4);
    assert_eq!(selection["clusters"], json!([1]));

    let (status, hash, bytes) = h
        .send(
            Request::get("/api/v1/selection/export")
                .body(Body::empty())
                .unwrap(),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(hash, Some(h.hash()));
    let expected = h
        .state
        .session()
        .export_selection(&h.analysis.clusters, &h.analysis.corpus)
        .unwrap()
        .export_bytes(&h.analysis.corpus);
    assert_eq!(bytes, expected);
}

#[tokio::test]
async fn log_and_bulk_decisions() {
    let h = Harness::new(None);
    h.decide(1, "accept").await;
    h.decide(1, "undo").await;
    let (status, body) = h
        .post(
            "/api/v1/decisions/bulk",
            json!({"corpus_hash": h.hash(), "verdict": "reject"}),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["result"], 5);
    let (_, log) = h.get("/api/v1/log").await;
    let kinds: Vec<&str> = log["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["action"]["type"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["start", "decide", "undo", "reject_all_remaining"]);
}

#[tokio::test]
async fn invalid_cutoff_is_a_bad_request() {
    let h = Harness::new(None);
    let (status, _) = h
        .post(
            "/api/v1/cutoff",
            json!({"corpus_hash": h.hash(), "cutoff": 0.0}),
        )
        .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = h
        .post(
            "/api/v1/cutoff",
            json!({"corpus_hash": h.hash(), "cutoff": 5.5}),
        )
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["cutoff"], 5.5);
}

#[tokio::test]
async fn service_and_session_stay_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let h = Harness::new(Some(path.clone()));
    let clusters = &h.analysis.clusters;
    let mut direct = session(&h.analysis);

    h.decide(1, "accept").await;
    direct.decide(1, Verdict::Accept).unwrap();
    h.post(
        "/api/v1/mode",
        json!({"corpus_hash": h.hash(), "mode": "by_size"}),
    )
    .await;
    direct.set_mode(PresentationMode::BySize);
    h.decide(2, "reject").await;
    direct.decide(2, Verdict::Reject).unwrap();
    h.decide(2, "undo").await;
    direct.undo(2).unwrap();
    h.post("/api/v1/auto-reject", json!({"corpus_hash": h.hash()}))
        .await;
    direct.auto_reject_beyond_cutoff(clusters).unwrap();

    assert_eq!(h.state.session(), direct);
    let stored = SessionFile::load(&path).unwrap();
    assert_eq!(stored.session.log, direct.log);
    assert_eq!(stored.session.decisions, direct.decisions);
    stored
        .verify(&h.analysis.corpus, clusters)
        .expect("saved session replays");
}

#[tokio::test]
async fn corpus_info() {
    let h = Harness::new(None);
    let (status, body) = h.get("/api/v1/corpus").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["records"], 10);
    assert_eq!(body["clusters"], 5);
    assert_eq!(body["query_name"], "soler_jm");
    assert_eq!(body["format"], "tagged");
}
