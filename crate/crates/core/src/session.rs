//! Review state for the cluster selection loop.
//!
//! A session records one verdict per cluster and an append-only action log.
//! Replaying the log against the same clusters reproduces the session, which
//! is how saved sessions are checked when they are loaded again.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterSet;
use crate::config::Settings;
use crate::ingest::{self, Corpus};

pub const DEFAULT_CUTOFF: f64 = 3.0;
pub const SESSION_SCHEMA: &str = "authorsep-session";
pub const SESSION_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("no group {0}")]
    UnknownCluster(usize),
    #[error("no group has been selected yet")]
    NothingAccepted,
    #[error("cutoff must be a positive number, got {0}")]
    InvalidCutoff(f64),
    #[error("session belongs to a different corpus (session {expected}, files {found})")]
    CorpusMismatch { expected: String, found: String },
    #[error("unsupported session file: {0}")]
    BadFile(String),
    #[error("session log does not replay: {0}")]
    ReplayDiverged(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Undecided,
    Accepted,
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accept,
    Reject,
}

impl From<Verdict> for Decision {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Accept => Decision::Accepted,
            Verdict::Reject => Decision::Rejected,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresentationMode {
    #[default]
    ByCitations,
    BySize,
    ByDistanceToSelected,
}

impl PresentationMode {
    pub fn cycle(self) -> Self {
        match self {
            PresentationMode::ByCitations => PresentationMode::BySize,
            PresentationMode::BySize => PresentationMode::ByDistanceToSelected,
            PresentationMode::ByDistanceToSelected => PresentationMode::ByCitations,
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            PresentationMode::ByCitations => "by number of citations",
            PresentationMode::BySize => "by number of papers",
            PresentationMode::ByDistanceToSelected => "by distance to selected groups",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Start { cutoff: f64, mode: PresentationMode },
    Decide { cluster: usize, verdict: Verdict },
    Undo { cluster: usize },
    AcceptAllRemaining { count: usize },
    RejectAllRemaining { count: usize },
    AutoReject { cutoff: f64, rejected: Vec<usize> },
    SetMode { mode: PresentationMode },
    SetCutoff { cutoff: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// seconds since the Unix epoch
    pub at: u64,
    pub action: Action,
}

/// Source of log timestamps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Clock {
    #[default]
    System,
    Fixed(u64),
}

impl Clock {
    fn now(self) -> u64 {
        match self {
            Clock::System => SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            Clock::Fixed(t) => t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRef {
    pub hash: String,
    pub records: usize,
    /// source file paths as given on the command line
    pub sources: Vec<String>,
    pub query_name: String,
}

impl CorpusRef {
    pub fn of(corpus: &Corpus) -> Self {
        CorpusRef {
            hash: corpus.hash.clone(),
            records: corpus.len(),
            sources: corpus.sources.iter().map(|s| s.name.clone()).collect(),
            query_name: corpus.query_name.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionSession {
    pub corpus_ref: CorpusRef,
    pub decisions: BTreeMap<usize, Decision>,
    pub presentation_mode: PresentationMode,
    pub cutoff: f64,
    pub log: Vec<LogEntry>,
    #[serde(skip)]
    clock: Clock,
}

impl SelectionSession {
    pub fn new(
        corpus_ref: CorpusRef,
        clusters: &ClusterSet,
        cutoff: f64,
    ) -> Result<Self, SessionError> {
        Self::with_clock(corpus_ref, clusters, cutoff, Clock::System)
    }

    pub fn with_clock(
        corpus_ref: CorpusRef,
        clusters: &ClusterSet,
        cutoff: f64,
        clock: Clock,
    ) -> Result<Self, SessionError> {
        check_cutoff(cutoff)?;
        let mut session = SelectionSession {
            corpus_ref,
            decisions: clusters
                .clusters()
                .iter()
                .map(|c| (c.id, Decision::Undecided))
                .collect(),
            presentation_mode: PresentationMode::default(),
            cutoff,
            log: Vec::new(),
            clock,
        };
        session.record(Action::Start {
            cutoff,
            mode: session.presentation_mode,
        });
        Ok(session)
    }

    pub fn set_clock(&mut self, clock: Clock) {
        self.clock = clock;
    }

    fn record(&mut self, action: Action) {
        let at = self.clock.now();
        self.log.push(LogEntry { at, action });
    }

    pub fn decision(&self, id: usize) -> Option<Decision> {
        self.decisions.get(&id).copied()
    }

    fn ids_with(&self, wanted: Decision) -> impl Iterator<Item = usize> + '_ {
        self.decisions
            .iter()
            .filter(move |(_, d)| **d == wanted)
            .map(|(id, _)| *id)
    }

    pub fn accepted(&self) -> Vec<usize> {
        self.ids_with(Decision::Accepted).collect()
    }

    pub fn undecided_count(&self) -> usize {
        self.ids_with(Decision::Undecided).count()
    }

    /// Single-linkage distance from `id` to the union of accepted clusters;
    /// `None` while nothing is accepted.
    pub fn distance_to_selected(&self, id: usize, clusters: &ClusterSet) -> Option<f64> {
        self.ids_with(Decision::Accepted)
            .map(|a| clusters.distance(id, a))
            .reduce(f64::min)
    }

    /// All cluster ids in the order of the current presentation mode.
    pub fn presentation_order(&self, clusters: &ClusterSet) -> Vec<usize> {
        let mut ids: Vec<usize> = clusters.clusters().iter().map(|c| c.id).collect();
        match self.presentation_mode {
            PresentationMode::ByCitations => {}
            PresentationMode::BySize => {
                ids.sort_by_key(|&id| {
                    (
                        std::cmp::Reverse(clusters.get(id).map_or(0, |c| c.paper_count)),
                        id,
                    )
                });
            }
            PresentationMode::ByDistanceToSelected => {
                let key = |id: usize| {
                    self.distance_to_selected(id, clusters)
                        .unwrap_or(f64::INFINITY)
                };
                ids.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
            }
        }
        ids
    }

    /// First undecided cluster in presentation order; `None` when exhausted.
    pub fn next_cluster(&self, clusters: &ClusterSet) -> Option<usize> {
        self.presentation_order(clusters)
            .into_iter()
            .find(|id| self.decision(*id) == Some(Decision::Undecided))
    }

    fn check_id(&self, id: usize) -> Result<(), SessionError> {
        if self.decisions.contains_key(&id) {
            Ok(())
        } else {
            Err(SessionError::UnknownCluster(id))
        }
    }

    pub fn decide(&mut self, id: usize, verdict: Verdict) -> Result<(), SessionError> {
        self.check_id(id)?;
        self.decisions.insert(id, verdict.into());
        self.record(Action::Decide {
            cluster: id,
            verdict,
        });
        Ok(())
    }

    /// Return a cluster to the undecided state.
    pub fn undo(&mut self, id: usize) -> Result<(), SessionError> {
        self.check_id(id)?;
        self.decisions.insert(id, Decision::Undecided);
        self.record(Action::Undo { cluster: id });
        Ok(())
    }

    /// Cluster of the most recent single decision that is still in force.
    pub fn last_decided(&self) -> Option<usize> {
        self.log.iter().rev().find_map(|e| match e.action {
            Action::Decide { cluster, .. }
                if self.decision(cluster) != Some(Decision::Undecided) =>
            {
                Some(cluster)
            }
            _ => None,
        })
    }

    fn settle_remaining(&mut self, decision: Decision) -> usize {
        let remaining: Vec<usize> = self.ids_with(Decision::Undecided).collect();
        for id in &remaining {
            self.decisions.insert(*id, decision);
        }
        remaining.len()
    }

    pub fn accept_all_remaining(&mut self) -> usize {
        let count = self.settle_remaining(Decision::Accepted);
        self.record(Action::AcceptAllRemaining { count });
        count
    }

    pub fn reject_all_remaining(&mut self) -> usize {
        let count = self.settle_remaining(Decision::Rejected);
        self.record(Action::RejectAllRemaining { count });
        count
    }

    /// Undecided clusters farther than `cutoff` from the accepted set.
    pub fn beyond_cutoff(
        &self,
        clusters: &ClusterSet,
        cutoff: f64,
    ) -> Result<Vec<usize>, SessionError> {
        check_cutoff(cutoff)?;
        if self.ids_with(Decision::Accepted).next().is_none() {
            return Err(SessionError::NothingAccepted);
        }
        Ok(self
            .ids_with(Decision::Undecided)
            .filter(|&id| {
                self.distance_to_selected(id, clusters)
                    .is_some_and(|d| d > cutoff)
            })
            .collect())
    }

    /// Reject every undecided cluster beyond the session cutoff; returns the
    /// number rejected.
    pub fn auto_reject_beyond_cutoff(
        &mut self,
        clusters: &ClusterSet,
    ) -> Result<usize, SessionError> {
        let rejected = self.beyond_cutoff(clusters, self.cutoff)?;
        for id in &rejected {
            self.decisions.insert(*id, Decision::Rejected);
        }
        let count = rejected.len();
        self.record(Action::AutoReject {
            cutoff: self.cutoff,
            rejected,
        });
        Ok(count)
    }

    pub fn set_mode(&mut self, mode: PresentationMode) {
        self.presentation_mode = mode;
        self.record(Action::SetMode { mode });
    }

    pub fn set_cutoff(&mut self, cutoff: f64) -> Result<(), SessionError> {
        check_cutoff(cutoff)?;
        self.cutoff = cutoff;
        self.record(Action::SetCutoff { cutoff });
        Ok(())
    }

    /// Rebuild a session by re-applying `log` to fresh clusters.
    pub fn replay(
        corpus_ref: CorpusRef,
        clusters: &ClusterSet,
        log: &[LogEntry],
    ) -> Result<Self, SessionError> {
        let diverged = |msg: String| SessionError::ReplayDiverged(msg);
        let Some(LogEntry {
            action: Action::Start { cutoff, mode },
            at,
        }) = log.first()
        else {
            return Err(diverged("log does not begin with a start entry".into()));
        };
        let mut session =
            SelectionSession::with_clock(corpus_ref, clusters, *cutoff, Clock::Fixed(*at))?;
        session.presentation_mode = *mode;
        if let Some(Action::Start { mode, .. }) = session.log.first_mut().map(|e| &mut e.action) {
            *mode = session.presentation_mode;
        }
        for entry in &log[1..] {
            session.clock = Clock::Fixed(entry.at);
            match &entry.action {
                Action::Start { .. } => return Err(diverged("repeated start entry".into())),
                Action::Decide { cluster, verdict } => session.decide(*cluster, *verdict)?,
                Action::Undo { cluster } => session.undo(*cluster)?,
                Action::AcceptAllRemaining { count } => {
                    let got = session.accept_all_remaining();
                    if got != *count {
                        return Err(diverged(format!(
                            "accept-all settled {got} groups, log says {count}"
                        )));
                    }
                }
                Action::RejectAllRemaining { count } => {
                    let got = session.reject_all_remaining();
                    if got != *count {
                        return Err(diverged(format!(
                            "reject-all settled {got} groups, log says {count}"
                        )));
                    }
                }
                Action::AutoReject { cutoff, rejected } => {
                    let previous = session.cutoff;
                    session.cutoff = *cutoff;
                    session.auto_reject_beyond_cutoff(clusters)?;
                    session.cutoff = previous;
                    match session.log.last().map(|e| &e.action) {
                        Some(Action::AutoReject { rejected: got, .. }) if got == rejected => {}
                        _ => return Err(diverged("auto-reject rejected different groups".into())),
                    }
                }
                Action::SetMode { mode } => session.set_mode(*mode),
                Action::SetCutoff { cutoff } => session.set_cutoff(*cutoff)?,
            }
        }
        session.clock = Clock::System;
        Ok(session)
    }

    /// Accepted records in source order plus their merit summary.
    pub fn export_selection(
        &self,
        clusters: &ClusterSet,
        corpus: &Corpus,
    ) -> Result<Selection, SessionError> {
        let accepted = self.accepted();
        if accepted.is_empty() {
            return Err(SessionError::NothingAccepted);
        }
        let mut record_ids: Vec<usize> = accepted
            .iter()
            .filter_map(|&id| clusters.get(id))
            .flat_map(|c| c.member_ids.iter().copied())
            .collect();
        record_ids.sort_unstable();
        record_ids.dedup();
        let summary = MeritSummary::of(record_ids.iter().map(|&id| &corpus.records[id]));
        Ok(Selection {
            record_ids,
            summary,
        })
    }
}

fn check_cutoff(cutoff: f64) -> Result<(), SessionError> {
    if cutoff.is_finite() && cutoff > 0.0 {
        Ok(())
    } else {
        Err(SessionError::InvalidCutoff(cutoff))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub record_ids: Vec<usize>,
    pub summary: MeritSummary,
}

impl Selection {
    /// The accepted records as an export file in the corpus' own format.
    pub fn export_bytes(&self, corpus: &Corpus) -> Vec<u8> {
        ingest::write_export(corpus, &self.record_ids)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeritSummary {
    pub papers: usize,
    pub citations: u64,
    pub citations_per_paper: f64,
    pub year_min: Option<i32>,
    pub year_max: Option<i32>,
    pub h_index: u64,
}

impl MeritSummary {
    pub fn of<'a>(records: impl IntoIterator<Item = &'a ingest::PublicationRecord>) -> Self {
        let records: Vec<_> = records.into_iter().collect();
        let citations: Vec<u64> = records.iter().map(|r| r.citations).collect();
        let total: u64 = citations.iter().sum();
        let years: Vec<i32> = records.iter().filter_map(|r| r.year_value()).collect();
        MeritSummary {
            papers: records.len(),
            citations: total,
            citations_per_paper: if records.is_empty() {
                0.0
            } else {
                total as f64 / records.len() as f64
            },
            year_min: years.iter().min().copied(),
            year_max: years.iter().max().copied(),
            h_index: h_index(&citations),
        }
    }

    pub fn period(&self) -> String {
        crate::cluster::format_period(self.year_min, self.year_max)
    }

    pub fn render(&self) -> String {
        format!(
            "Papers:          {:>10}\nCitations:       {:>10}\nCitations/paper: {:>10.2}\nPeriod:          {:>10}\nh-index:         {:>10}\n",
            self.papers,
            self.citations,
            self.citations_per_paper,
            self.period(),
            self.h_index
        )
    }
}

/// Largest `h` such that `h` papers have at least `h` citations each.
pub fn h_index(citations: &[u64]) -> u64 {
    let mut sorted = citations.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted
        .iter()
        .enumerate()
        .take_while(|(rank, &c)| c > *rank as u64)
        .count() as u64
}

/// On-disk form of a session: the clustering settings travel with it so a
/// later run rebuilds the same clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionFile {
    pub schema: String,
    pub version: u32,
    pub settings: Settings,
    pub session: SelectionSession,
}

impl SessionFile {
    pub fn new(settings: Settings, session: SelectionSession) -> Self {
        SessionFile {
            schema: SESSION_SCHEMA.to_string(),
            version: SESSION_VERSION,
            settings,
            session,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("session serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, SessionError> {
        let file: SessionFile =
            serde_json::from_str(text).map_err(|e| SessionError::BadFile(e.to_string()))?;
        if file.schema != SESSION_SCHEMA {
            return Err(SessionError::BadFile(format!("schema `{}`", file.schema)));
        }
        if file.version != SESSION_VERSION {
            return Err(SessionError::BadFile(format!("version {}", file.version)));
        }
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, self.to_json())?;
        std::fs::rename(&tmp, path)
    }

    pub fn load(path: &Path) -> crate::error::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| crate::error::Error::io(path, e))?;
        Ok(Self::from_json(&text)?)
    }

    /// Check the file against a freshly parsed corpus and its clusters, and
    /// confirm that the log reproduces the stored decisions.
    pub fn verify(
        &self,
        corpus: &Corpus,
        clusters: &ClusterSet,
    ) -> Result<SelectionSession, SessionError> {
        if self.session.corpus_ref.hash != corpus.hash {
            return Err(SessionError::CorpusMismatch {
                expected: self.session.corpus_ref.hash.clone(),
                found: corpus.hash.clone(),
            });
        }
        let replayed =
            SelectionSession::replay(self.session.corpus_ref.clone(), clusters, &self.session.log)?;
        if replayed.decisions != self.session.decisions
            || replayed.presentation_mode != self.session.presentation_mode
            || replayed.cutoff != self.session.cutoff
        {
            return Err(SessionError::ReplayDiverged(
                "stored decisions differ from the replayed log".into(),
            ));
        }
        Ok(replayed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::Cluster;
    use crate::distance::{close_distances, ClosureMode, DistanceMatrix, SymMatrix};
    use crate::ingest::{parse_export, Format};

    /// Three singleton-ish clusters over four records with known distances.
    fn fixture() -> (Corpus, ClusterSet) {
        let text = "PT J\nAU Soler, JM\nTC 50\nPY 1990\nER\n\
PT J\nAU Soler, JM\nTC 20\nPY 1995\nER\n\
PT J\nAU Soler, JM\nTC 10\nPY 2000\nER\n\
PT J\nAU Soler, JM\nTC 5\nPY 2001\nER\n";
        let corpus = parse_export(text.as_bytes(), Format::Tagged).unwrap();
        let rows = vec![
            vec![0.0, 2.9, 3.1, 7.0],
            vec![2.9, 0.0, 6.0, 6.0],
            vec![3.1, 6.0, 0.0, 6.0],
            vec![7.0, 6.0, 6.0, 0.0],
        ];
        let m = close_distances(
            DistanceMatrix::from_clamped(SymMatrix::from_rows(&rows)),
            ClosureMode::SinglePass,
        );
        let clusters: Vec<Cluster> = (0..4)
            .map(|i| Cluster {
                id: i + 1,
                member_ids: vec![i],
                paper_count: 1,
                total_citations: corpus.records[i].citations,
                year_min: corpus.records[i].year_value(),
                year_max: corpus.records[i].year_value(),
                representative_id: i,
            })
            .collect();
        let set = ClusterSet::new(clusters, &m);
        (corpus, set)
    }

    fn session(corpus: &Corpus, clusters: &ClusterSet) -> SelectionSession {
        SelectionSession::with_clock(CorpusRef::of(corpus), clusters, 3.0, Clock::Fixed(100))
            .unwrap()
    }

    #[test]
    fn first_presented_is_group_one() {
        let (corpus, clusters) = fixture();
        let s = session(&corpus, &clusters);
        assert_eq!(s.next_cluster(&clusters), Some(1));
        assert_eq!(s.distance_to_selected(2, &clusters), None);
    }

    #[test]
    fn distance_mode_ranks_by_distance() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        s.decide(1, Verdict::Accept).unwrap();
        s.set_mode(PresentationMode::ByDistanceToSelected);
        assert_eq!(s.presentation_order(&clusters), [1, 2, 3, 4]);
        assert_eq!(s.next_cluster(&clusters), Some(2));
        s.decide(2, Verdict::Reject).unwrap();
        assert_eq!(s.next_cluster(&clusters), Some(3));
    }

    #[test]
    fn reject_then_accept_is_last_write_wins() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        s.decide(1, Verdict::Reject).unwrap();
        s.decide(1, Verdict::Accept).unwrap();
        assert_eq!(s.decision(1), Some(Decision::Accepted));
        assert_eq!(s.log.len(), 3);
        assert_eq!(
            s.decide(9, Verdict::Accept),
            Err(SessionError::UnknownCluster(9))
        );
    }

    #[test]
    fn exhaustion_and_bulk_verbs() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        s.decide(1, Verdict::Accept).unwrap();
        assert_eq!(s.accept_all_remaining(), 3);
        assert_eq!(s.next_cluster(&clusters), None);
        s.undo(4).unwrap();
        assert_eq!(s.reject_all_remaining(), 1);
        assert_eq!(s.decision(4), Some(Decision::Rejected));
    }

    #[test]
    fn cutoff_rejections() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        assert_eq!(
            s.auto_reject_beyond_cutoff(&clusters),
            Err(SessionError::NothingAccepted)
        );
        s.decide(1, Verdict::Accept).unwrap();
        // undecided distances 2.9, 3.1, 7.0
        assert_eq!(s.beyond_cutoff(&clusters, 8.0).unwrap().len(), 0);
        assert_eq!(s.auto_reject_beyond_cutoff(&clusters), Ok(2));
        assert_eq!(s.decision(2), Some(Decision::Undecided));
        assert_eq!(s.decision(3), Some(Decision::Rejected));
        assert_eq!(s.auto_reject_beyond_cutoff(&clusters), Ok(0));
        s.decide(2, Verdict::Reject).unwrap();
        assert_eq!(s.auto_reject_beyond_cutoff(&clusters), Ok(0));
        assert!(s.set_cutoff(0.0).is_err());
    }

    #[test]
    fn export_and_merit() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        assert_eq!(
            s.export_selection(&clusters, &corpus),
            Err(SessionError::NothingAccepted)
        );
        s.decide(3, Verdict::Accept).unwrap();
        s.decide(1, Verdict::Accept).unwrap();
        let sel = s.export_selection(&clusters, &corpus).unwrap();
        assert_eq!(sel.record_ids, [0, 2]);
        assert_eq!(sel.summary.papers, 2);
        assert_eq!(sel.summary.citations, 60);
        assert_eq!(sel.summary.period(), "1990-2000");
        assert_eq!(sel.summary.h_index, 2);
        let text = String::from_utf8(sel.export_bytes(&corpus)).unwrap();
        assert_eq!(text.matches("\nER\n").count(), 2);
    }

    #[test]
    fn h_index_definition() {
        assert_eq!(h_index(&[10, 5, 3, 3, 1]), 3);
        assert_eq!(h_index(&[0]), 0);
        assert_eq!(h_index(&[]), 0);
        assert_eq!(h_index(&[100]), 1);
        assert_eq!(h_index(&[4, 4, 4, 4]), 4);
    }

    #[test]
    fn replay_reproduces_state() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        s.decide(1, Verdict::Accept).unwrap();
        s.set_mode(PresentationMode::ByDistanceToSelected);
        s.decide(2, Verdict::Reject).unwrap();
        s.undo(2).unwrap();
        s.auto_reject_beyond_cutoff(&clusters).unwrap();
        s.set_cutoff(2.0).unwrap();
        s.decide(2, Verdict::Accept).unwrap();
        let replayed = SelectionSession::replay(CorpusRef::of(&corpus), &clusters, &s.log).unwrap();
        assert_eq!(replayed.decisions, s.decisions);
        assert_eq!(replayed.log, s.log);
        assert_eq!(replayed.cutoff, 2.0);
    }

    #[test]
    fn session_file_round_trip_and_guards() {
        let (corpus, clusters) = fixture();
        let mut s = session(&corpus, &clusters);
        s.decide(1, Verdict::Accept).unwrap();
        let file = SessionFile::new(Settings::default(), s.clone());
        let text = file.to_json();
        let back = SessionFile::from_json(&text).unwrap();
        assert_eq!(back.session.decisions, s.decisions);
        assert!(back.verify(&corpus, &clusters).is_ok());

        let mut other = corpus.clone();
        other.hash = "00".into();
        assert!(matches!(
            back.verify(&other, &clusters),
            Err(SessionError::CorpusMismatch { .. })
        ));

        let mut tampered = back.clone();
        tampered.session.decisions.insert(2, Decision::Accepted);
        assert!(matches!(
            tampered.verify(&corpus, &clusters),
            Err(SessionError::ReplayDiverged(_))
        ));

        assert!(SessionFile::from_json(&text.replace("\"version\": 1", "\"version\": 7")).is_err());
    }
}
