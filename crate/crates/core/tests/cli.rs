use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use authorsep::ingest::{parse_sources, ParseOptions, Source};

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn authorsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_authorsep"))
        .args(args)
        .current_dir(manifest_dir())
        .env("AUTHORSEP_FIXED_CLOCK", "0")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const CORPUS: &str = "tests/fixtures/dialog/soler.txt";

fn filter(session: &Path) -> Output {
    authorsep(&[
        "filter",
        CORPUS,
        "--name",
        "Soler, JM",
        "--session",
        session.to_str().unwrap(),
        "--answers",
        "tests/fixtures/dialog/answers.txt",
    ])
}

#[test]
fn filter_prints_the_golden_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("soler.session.json");
    let out = filter(&session);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let expected =
        std::fs::read_to_string(manifest_dir().join("tests/fixtures/dialog/transcript.txt"))
            .unwrap();
    assert_eq!(stdout(&out), expected);
    assert!(session.exists());
}

#[test]
fn same_answers_give_byte_identical_session_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert!(filter(&a).status.success());
    assert!(filter(&b).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn merit_writes_the_accepted_records() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("soler.json");
    assert!(filter(&session).status.success());

    let out = authorsep(&["merit", session.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("Papers:                   4"));
    assert!(text.contains("h-index:                  4"));

    let exported = std::fs::read(dir.path().join("soler.selected.txt")).unwrap();
    let corpus = parse_sources(&[Source::new("out", exported)], &ParseOptions::default()).unwrap();
    assert_eq!(corpus.len(), 4);
    assert!(corpus
        .records
        .iter()
        .all(|r| r.display.authors.contains(&"Soler, JM".to_string())));
}

#[test]
fn merit_refuses_an_empty_selection() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("s.json");
    let answers = dir.path().join("answers.txt");
    std::fs::write(&answers, "none\n").unwrap();
    let out = authorsep(&[
        "filter",
        CORPUS,
        "--session",
        session.to_str().unwrap(),
        "--answers",
        answers.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = authorsep(&["merit", session.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("no group has been selected"));
}

#[test]
fn interrupted_session_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("s.json");
    let first = dir.path().join("first.txt");
    let second = dir.path().join("second.txt");
    std::fs::write(&first, "y\n").unwrap();
    std::fs::write(&second, "none\n").unwrap();
    let run = |answers: &Path| {
        authorsep(&[
            "filter",
            CORPUS,
            "--session",
            session.to_str().unwrap(),
            "--answers",
            answers.to_str().unwrap(),
        ])
    };
    assert!(run(&first).status.success());
    let out = run(&second);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Resuming"));
    // group 1 was settled in the first run, so the second starts at group 2
    assert!(stdout(&out).contains("\nGroup    2 has"));
    assert!(!stdout(&out).contains("\nGroup    1 has"));
}

#[test]
fn malformed_input_fails_with_the_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "PT J\nAU Soler, JM\nnot a tag line\nER\n").unwrap();
    let out = authorsep(&["cluster", bad.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("bad.txt:3: expected a two-letter tag"),
        "{err}"
    );
}

#[test]
fn missing_file_fails() {
    let out = authorsep(&["cluster", "no/such/file.txt"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read no/such/file.txt"));
}

#[test]
fn cluster_dumps_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = authorsep(&[
        "cluster",
        CORPUS,
        "--dump-matrix",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("Found    10 papers in    5 groups\n"));
    for name in ["raw", "clamped", "closed"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 11);
        assert!(text.starts_with("id,0,1,2"));
    }
}

#[test]
fn overrides_change_the_model() {
    // in a tiny database even a shared city and country are telling
    let out = authorsep(&["cluster", CORPUS, "--n-docs", "1", "--size", "journal=1"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("Found    10 papers in    4 groups\n"));
    let bad = authorsep(&["cluster", CORPUS, "--size", "colour=2"]);
    assert!(!bad.status.success());
}

#[test]
fn bench_writes_its_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = authorsep(&["bench", "--out", dir.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("false positive pairs 0"));
    let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
    assert!(metrics.contains("purity,1\n"));
    let truth = std::fs::read_to_string(dir.path().join("truth.csv")).unwrap();
    assert_eq!(truth.lines().count(), 101);
    assert!(dir.path().join("corpus.tsv").exists());
}
