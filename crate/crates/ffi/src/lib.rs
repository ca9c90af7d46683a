//! C interface to the author-separation engine.
//!
//! Handles are opaque and owned by the caller: every `*_open`/`*_new`/`*_load`
//! pairs with a `*_free`. Functions return an [`AsepStatus`]; on failure a
//! description is available from [`asep_last_error`] on the same thread.
//! Cluster ids are 1-based, as printed by the command-line tool.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::sync::Arc;

use authorsep::coincidence::{log_p_exact, log_p_tail};
use authorsep::ingest::Source;
use authorsep::session::{
    CorpusRef, Decision, PresentationMode, SelectionSession, SessionError, SessionFile, Verdict,
    DEFAULT_CUTOFF,
};
use authorsep::{Analysis, Config, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Model = 5,
    UnknownCluster = 6,
    NothingAccepted = 7,
    CorpusMismatch = 8,
    Session = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsepVerdict {
    Accept = 0,
    Reject = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsepDecision {
    Undecided = 0,
    Accepted = 1,
    Rejected = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsepMode {
    ByCitations = 0,
    BySize = 1,
    ByDistanceToSelected = 2,
}

/// Summary of one cluster. Years are 0 when unknown.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AsepClusterInfo {
    pub id: usize,
    pub papers: usize,
    pub citations: u64,
    pub year_min: i32,
    pub year_max: i32,
    pub representative: usize,
}

/// Merit indicators of an accepted selection. Years are 0 when unknown.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AsepMerit {
    pub papers: usize,
    pub citations: u64,
    pub citations_per_paper: f64,
    pub year_min: i32,
    pub year_max: i32,
    pub h_index: u64,
}

/// A parsed, clustered corpus. Immutable; may be shared across threads.
pub struct AsepEngine {
    analysis: Arc<Analysis>,
}

/// A review session over one engine's clusters. Not thread-safe.
pub struct AsepSession {
    analysis: Arc<Analysis>,
    session: SelectionSession,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

struct Failure(AsepStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let status = match &err {
            Error::Parse(_) => AsepStatus::Parse,
            Error::Model(_) | Error::Config(_) | Error::Distance(_) => AsepStatus::Model,
            Error::Io { .. } => AsepStatus::Io,
            Error::Session(e) => return Failure::from(e.clone()),
        };
        Failure(status, err.to_string())
    }
}

impl From<SessionError> for Failure {
    fn from(err: SessionError) -> Self {
        let status = match err {
            SessionError::UnknownCluster(_) => AsepStatus::UnknownCluster,
            SessionError::NothingAccepted => AsepStatus::NothingAccepted,
            SessionError::InvalidCutoff(_) => AsepStatus::InvalidArgument,
            SessionError::CorpusMismatch { .. } => AsepStatus::CorpusMismatch,
            SessionError::BadFile(_) | SessionError::ReplayDiverged(_) => AsepStatus::Session,
        };
        Failure(status, err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AsepStatus::NullPointer, format!("{what} is null"))
}

/// Run `body`, turning errors and panics into a status plus thread-local message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AsepStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AsepStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal error".to_string());
            AsepStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn opt_str<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| Failure(AsepStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    opt_str(p, what)?.ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or point to a live `T`.
unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or point to a live, unaliased `T`.
unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

/// # Safety
/// `p` must be null or point to writable memory for a `T`.
unsafe fn write_out<T>(p: *mut T, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null("output pointer"));
    }
    p.write(value);
    Ok(())
}

/// Message describing the most recent failure on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn asep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a string obtained from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn asep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// log10 of the probability that two random subsets of sizes `n_i` and `n_j`
/// of `n` values share exactly `common` values.
///
/// # Safety
/// `out` must point to writable memory for a `double`.
#[no_mangle]
pub unsafe extern "C" fn asep_log_p_exact(
    common: u64,
    n_i: u64,
    n_j: u64,
    n: u64,
    out: *mut f64,
) -> AsepStatus {
    guard(|| {
        let v = log_p_exact(common, n_i, n_j, n)
            .map_err(|e| Failure(AsepStatus::InvalidArgument, e.to_string()))?;
        write_out(out, v)
    })
}

/// As [`asep_log_p_exact`] for `common` or more shared values.
///
/// # Safety
/// `out` must point to writable memory for a `double`.
#[no_mangle]
pub unsafe extern "C" fn asep_log_p_tail(
    common: u64,
    n_i: u64,
    n_j: u64,
    n: u64,
    out: *mut f64,
) -> AsepStatus {
    guard(|| {
        let v = log_p_tail(common, n_i, n_j, n)
            .map_err(|e| Failure(AsepStatus::InvalidArgument, e.to_string()))?;
        write_out(out, v)
    })
}

/// Parse and cluster export files.
///
/// `query_name` (e.g. `"Soler, JM"`) and `config_path` (TOML) may be null.
///
/// # Safety
/// `paths` must point to `n_paths` valid strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_open(
    paths: *const *const c_char,
    n_paths: usize,
    query_name: *const c_char,
    config_path: *const c_char,
    out: *mut *mut AsepEngine,
) -> AsepStatus {
    guard(|| {
        if paths.is_null() || n_paths == 0 {
            return Err(Failure(
                AsepStatus::InvalidArgument,
                "at least one input path is required".into(),
            ));
        }
        let mut sources = Vec::with_capacity(n_paths);
        for i in 0..n_paths {
            let path = req_str(*paths.add(i), "input path")?;
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            sources.push(Source::new(path, bytes));
        }
        let settings = match opt_str(config_path, "config path")? {
            Some(p) => Config::load(Path::new(p))?.settings,
            None => Default::default(),
        };
        let query = opt_str(query_name, "query name")?;
        let analysis = Analysis::from_sources(&sources, None, query, settings)?;
        write_out(out, engine(analysis))
    })
}

/// Parse and cluster an in-memory export with default settings.
///
/// # Safety
/// `bytes` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_from_bytes(
    bytes: *const u8,
    len: usize,
    query_name: *const c_char,
    out: *mut *mut AsepEngine,
) -> AsepStatus {
    guard(|| {
        if bytes.is_null() {
            return Err(null("bytes"));
        }
        let data = std::slice::from_raw_parts(bytes, len).to_vec();
        let query = opt_str(query_name, "query name")?;
        let analysis = Analysis::from_sources(
            &[Source::new("memory", data)],
            None,
            query,
            Default::default(),
        )?;
        write_out(out, engine(analysis))
    })
}

fn engine(analysis: Analysis) -> *mut AsepEngine {
    Box::into_raw(Box::new(AsepEngine {
        analysis: Arc::new(analysis),
    }))
}

/// # Safety
/// `engine` must be null or a handle from this library, not yet freed.
/// Sessions opened on it stay valid.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_free(engine: *mut AsepEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Number of records, or 0 for a null handle.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_record_count(engine: *const AsepEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.analysis.corpus.len())
}

/// Number of clusters, or 0 for a null handle.
///
/// # Safety
/// `engine` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_cluster_count(engine: *const AsepEngine) -> usize {
    engine.as_ref().map_or(0, |e| e.analysis.clusters.len())
}

/// Hex digest identifying the parsed input; free with [`asep_string_free`].
///
/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_corpus_hash(
    engine: *const AsepEngine,
    out: *mut *mut c_char,
) -> AsepStatus {
    guard(|| {
        let engine = handle(engine, "engine")?;
        let hash = CString::new(engine.analysis.corpus.hash.as_str()).expect("hex has no nul");
        write_out(out, hash.into_raw())
    })
}

fn cluster(analysis: &Analysis, id: usize) -> Result<&authorsep::cluster::Cluster, Failure> {
    analysis
        .clusters
        .get(id)
        .ok_or_else(|| SessionError::UnknownCluster(id).into())
}

/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_cluster_info(
    engine: *const AsepEngine,
    id: usize,
    out: *mut AsepClusterInfo,
) -> AsepStatus {
    guard(|| {
        let engine = handle(engine, "engine")?;
        let c = cluster(&engine.analysis, id)?;
        write_out(
            out,
            AsepClusterInfo {
                id: c.id,
                papers: c.paper_count,
                citations: c.total_citations,
                year_min: c.year_min.unwrap_or(0),
                year_max: c.year_max.unwrap_or(0),
                representative: c.representative_id,
            },
        )
    })
}

/// Copy up to `capacity` member record ids of cluster `id` into `buffer`;
/// `len` receives the full member count, so a short buffer can be resized.
///
/// # Safety
/// `buffer` must have room for `capacity` ids (may be null when 0);
/// `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_cluster_members(
    engine: *const AsepEngine,
    id: usize,
    buffer: *mut usize,
    capacity: usize,
    len: *mut usize,
) -> AsepStatus {
    guard(|| {
        let engine = handle(engine, "engine")?;
        let members = &cluster(&engine.analysis, id)?.member_ids;
        if capacity > 0 {
            if buffer.is_null() {
                return Err(null("buffer"));
            }
            let n = capacity.min(members.len());
            ptr::copy_nonoverlapping(members.as_ptr(), buffer, n);
        }
        write_out(len, members.len())
    })
}

/// Closed (shortest-path) distance between records `i` and `j`.
///
/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_engine_distance(
    engine: *const AsepEngine,
    i: usize,
    j: usize,
    out: *mut f64,
) -> AsepStatus {
    guard(|| {
        let engine = handle(engine, "engine")?;
        let n = engine.analysis.matrix.n;
        if i >= n || j >= n {
            return Err(Failure(
                AsepStatus::InvalidArgument,
                format!("record index out of range (corpus has {n} records)"),
            ));
        }
        write_out(out, engine.analysis.matrix.closed().get(i, j))
    })
}

/// Start a review. A non-positive `cutoff` selects the default.
///
/// # Safety
/// `engine` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_new(
    engine: *const AsepEngine,
    cutoff: f64,
    out: *mut *mut AsepSession,
) -> AsepStatus {
    guard(|| {
        let engine = handle(engine, "engine")?;
        let analysis = Arc::clone(&engine.analysis);
        let cutoff = if cutoff > 0.0 { cutoff } else { DEFAULT_CUTOFF };
        let session =
            SelectionSession::new(CorpusRef::of(&analysis.corpus), &analysis.clusters, cutoff)?;
        write_out(
            out,
            Box::into_raw(Box::new(AsepSession { analysis, session })),
        )
    })
}

/// Resume a saved session; fails unless it belongs to this engine's corpus
/// and its log replays to the stored decisions.
///
/// # Safety
/// `engine` must be a live handle; `path` a valid string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_load(
    engine: *const AsepEngine,
    path: *const c_char,
    out: *mut *mut AsepSession,
) -> AsepStatus {
    guard(|| {
        let engine = handle(engine, "engine")?;
        let path = req_str(path, "path")?;
        let file = SessionFile::load(Path::new(path))?;
        let analysis = Arc::clone(&engine.analysis);
        let session = file.verify(&analysis.corpus, &analysis.clusters)?;
        write_out(
            out,
            Box::into_raw(Box::new(AsepSession { analysis, session })),
        )
    })
}

/// # Safety
/// `session` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn asep_session_free(session: *mut AsepSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Next undecided cluster in presentation order, or 0 when all are decided.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_next(
    session: *const AsepSession,
    out: *mut usize,
) -> AsepStatus {
    guard(|| {
        let s = handle(session, "session")?;
        write_out(
            out,
            s.session.next_cluster(&s.analysis.clusters).unwrap_or(0),
        )
    })
}

/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_decision(
    session: *const AsepSession,
    id: usize,
    out: *mut AsepDecision,
) -> AsepStatus {
    guard(|| {
        let s = handle(session, "session")?;
        let decision = match s
            .session
            .decision(id)
            .ok_or(SessionError::UnknownCluster(id))?
        {
            Decision::Undecided => AsepDecision::Undecided,
            Decision::Accepted => AsepDecision::Accepted,
            Decision::Rejected => AsepDecision::Rejected,
        };
        write_out(out, decision)
    })
}

/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asep_session_decide(
    session: *mut AsepSession,
    id: usize,
    verdict: AsepVerdict,
) -> AsepStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        let verdict = match verdict {
            AsepVerdict::Accept => Verdict::Accept,
            AsepVerdict::Reject => Verdict::Reject,
        };
        Ok(s.session.decide(id, verdict)?)
    })
}

/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asep_session_undo(session: *mut AsepSession, id: usize) -> AsepStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        Ok(s.session.undo(id)?)
    })
}

/// # Safety
/// `session` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn asep_session_set_mode(
    session: *mut AsepSession,
    mode: AsepMode,
) -> AsepStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        s.session.set_mode(match mode {
            AsepMode::ByCitations => PresentationMode::ByCitations,
            AsepMode::BySize => PresentationMode::BySize,
            AsepMode::ByDistanceToSelected => PresentationMode::ByDistanceToSelected,
        });
        Ok(())
    })
}

/// Distance from cluster `id` to the accepted clusters; fails with
/// `NothingAccepted` before the first acceptance.
///
/// # Safety
/// `session` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_distance_to_selected(
    session: *const AsepSession,
    id: usize,
    out: *mut f64,
) -> AsepStatus {
    guard(|| {
        let s = handle(session, "session")?;
        cluster(&s.analysis, id)?;
        let d = s
            .session
            .distance_to_selected(id, &s.analysis.clusters)
            .ok_or(SessionError::NothingAccepted)?;
        write_out(out, d)
    })
}

/// Reject every undecided cluster beyond the session cutoff.
///
/// # Safety
/// `session` must be a live handle; `rejected` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_auto_reject(
    session: *mut AsepSession,
    rejected: *mut usize,
) -> AsepStatus {
    guard(|| {
        let s = handle_mut(session, "session")?;
        let n = s.session.auto_reject_beyond_cutoff(&s.analysis.clusters)?;
        if !rejected.is_null() {
            rejected.write(n);
        }
        Ok(())
    })
}

/// # Safety
/// `session` must be a live handle; `path` a valid string.
#[no_mangle]
pub unsafe extern "C" fn asep_session_save(
    session: *const AsepSession,
    path: *const c_char,
) -> AsepStatus {
    guard(|| {
        let s = handle(session, "session")?;
        let path = req_str(path, "path")?;
        SessionFile::new(s.analysis.settings.clone(), s.session.clone())
            .save(Path::new(path))
            .map_err(|e| Error::io(path, e))?;
        Ok(())
    })
}

/// Write the accepted records as an export file and report their merit.
/// `path` may be null to only compute the merit.
///
/// # Safety
/// `session` must be a live handle; `path` null or a valid string; `merit`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn asep_session_export(
    session: *const AsepSession,
    path: *const c_char,
    merit: *mut AsepMerit,
) -> AsepStatus {
    guard(|| {
        let s = handle(session, "session")?;
        let selection = s
            .session
            .export_selection(&s.analysis.clusters, &s.analysis.corpus)?;
        if let Some(path) = opt_str(path, "path")? {
            std::fs::write(path, selection.export_bytes(&s.analysis.corpus))
                .map_err(|e| Error::io(path, e))?;
        }
        if !merit.is_null() {
            let m = &selection.summary;
            merit.write(AsepMerit {
                papers: m.papers,
                citations: m.citations,
                citations_per_paper: m.citations_per_paper,
                year_min: m.year_min.unwrap_or(0),
                year_max: m.year_max.unwrap_or(0),
                h_index: m.h_index,
            });
        }
        Ok(())
    })
}
