use std::path::PathBuf;

use authorsep::dialog::{Dialog, Outcome, NO_DISTANCE, PROMPT};
use authorsep::ingest::Source;
use authorsep::session::{Clock, CorpusRef, Decision, SelectionSession, DEFAULT_CUTOFF};
use authorsep::{Analysis, Settings};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/dialog")
        .join(name)
}

fn analysis() -> Analysis {
    let path = fixture("soler.txt");
    let bytes = std::fs::read(&path).unwrap();
    let source = Source::new("tests/fixtures/dialog/soler.txt", bytes);
    Analysis::from_sources(&[source], None, Some("Soler, JM"), Settings::default()).unwrap()
}

fn fresh_session(analysis: &Analysis) -> SelectionSession {
    SelectionSession::with_clock(
        CorpusRef::of(&analysis.corpus),
        &analysis.clusters,
        DEFAULT_CUTOFF,
        Clock::Fixed(0),
    )
    .unwrap()
}

fn run(answers: &str) -> (String, SelectionSession, Outcome, Vec<SelectionSession>) {
    let analysis = analysis();
    let mut session = fresh_session(&analysis);
    let mut out = Vec::new();
    let mut saved = Vec::new();
    let mut dialog = Dialog::new(&analysis, &mut session, answers.as_bytes(), &mut out);
    dialog.echo = true;
    let outcome = dialog
        .run(|s| {
            saved.push(s.clone());
            Ok(())
        })
        .unwrap();
    (String::from_utf8(out).unwrap(), session, outcome, saved)
}

#[test]
fn scripted_answers_reproduce_the_golden_transcript() {
    let answers = std::fs::read_to_string(fixture("answers.txt")).unwrap();
    let expected = std::fs::read_to_string(fixture("transcript.txt")).unwrap();
    let (transcript, session, outcome, _) = run(&answers);
    assert_eq!(outcome, Outcome::Completed);
    assert_eq!(transcript, expected);
    assert_eq!(session.accepted(), vec![1]);
}

#[test]
fn transcript_follows_the_classic_line_formats() {
    let (transcript, ..) = run("y\n");
    let lines: Vec<&str> = transcript.lines().collect();
    assert_eq!(lines[0], "Found    10 papers in    5 groups");
    assert_eq!(lines[1], "group, papers, citations =   1     4    1112");
    assert_eq!(lines[6], "");
    assert_eq!(
        lines[7],
        "Group    1 has     4 papers and   1112 citations in period 1981-2002"
    );
    assert_eq!(
        lines[8],
        format!("Distance to selected groups is {NO_DISTANCE}   A sample paper is")
    );
    assert_eq!(
        lines[9],
        " Title: Density-functional method for very large systems with LCAO basis sets"
    );
    assert_eq!(
        lines[10],
        " Authors:  SanchezPortal, D; Ordejon, P; Artacho, E; Soler, JM;"
    );
    assert_eq!(
        lines[11],
        " Source:  Int. J. Quantum Chem. (1997) 65, 453:461"
    );
    assert_eq!(
        lines[12],
        " Address words: AUTONOMA MADRID FIS MAT CONDENSADA E-28049 SPAIN "
    );
    assert_eq!(lines[13], "   NICOLAS CABRERA OVIEDO E-33007");
    assert_eq!(lines[14], format!("{PROMPT}y"));
    // once something is selected the distance becomes a number
    assert_eq!(
        lines[17],
        "Distance to selected groups is   7.61   A sample paper is"
    );
}

#[test]
fn help_leaves_the_session_untouched() {
    let (transcript, session, outcome, saved) = run("help\n");
    assert_eq!(outcome, Outcome::EndOfInput);
    assert!(transcript.contains(" u     undo the most recent accept or reject"));
    assert!(saved.is_empty());
    assert_eq!(session, fresh_session(&analysis()));
}

#[test]
fn every_change_is_handed_to_the_saver() {
    let answers = std::fs::read_to_string(fixture("answers.txt")).unwrap();
    let (_, session, _, saved) = run(&answers);
    // y, n, u, n, c, c, r
    assert_eq!(saved.len(), 7);
    assert_eq!(saved.last(), Some(&session));
    for (earlier, later) in saved.iter().zip(&saved[1..]) {
        assert!(later.log.starts_with(&earlier.log));
    }
}

#[test]
fn end_of_input_keeps_partial_decisions() {
    let (transcript, session, outcome, _) = run("y\nn\n");
    assert_eq!(outcome, Outcome::EndOfInput);
    assert_eq!(session.decision(1), Some(Decision::Accepted));
    assert_eq!(session.decision(2), Some(Decision::Rejected));
    assert_eq!(session.undecided_count(), 3);
    assert!(transcript.ends_with(&format!("{PROMPT}\n")));
}

#[test]
fn bulk_answers_finish_the_review() {
    let (transcript, session, outcome, _) = run("y\nnone\n");
    assert_eq!(outcome, Outcome::Completed);
    assert_eq!(session.accepted(), vec![1]);
    assert!(transcript.contains(" Rejected 4 remaining groups\n"));
    assert!(transcript.contains("All groups decided: 1 selected, 4 rejected"));
}

#[test]
fn auto_reject_needs_a_selection() {
    let (transcript, session, ..) = run("r\n");
    assert!(transcript.contains(" no group has been selected yet\n"));
    assert_eq!(session.undecided_count(), 5);
}

#[test]
fn replaying_the_saved_log_gives_the_same_session() {
    let answers = std::fs::read_to_string(fixture("answers.txt")).unwrap();
    let (_, session, ..) = run(&answers);
    let analysis = analysis();
    let replayed =
        SelectionSession::replay(session.corpus_ref.clone(), &analysis.clusters, &session.log)
            .unwrap();
    assert_eq!(replayed.decisions, session.decisions);
    assert_eq!(replayed.log, session.log);
}
