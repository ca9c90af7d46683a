//! Compile and run a small C program against the generated header and the
//! static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include "authorsep.h"

int main(int argc, char **argv) {
    const char *paths[] = { argv[1] };
    AsepEngine *engine = NULL;
    if (asep_engine_open(paths, 1, "Soler, JM", NULL, &engine) != ASEP_STATUS_OK) {
        fprintf(stderr, "%s\n", asep_last_error());
        return 1;
    }
    AsepClusterInfo info;
    asep_engine_cluster_info(engine, 1, &info);

    AsepSession *session = NULL;
    asep_session_new(engine, 0.0, &session);
    asep_session_decide(session, 1, ASEP_VERDICT_ACCEPT);
    size_t rejected = 0;
    asep_session_auto_reject(session, &rejected);
    AsepMerit merit;
    asep_session_export(session, NULL, &merit);

    AsepStatus bad = asep_session_decide(session, 42, ASEP_VERDICT_REJECT);
    printf("%zu %zu %llu %zu %zu %llu %d %s\n",
           asep_engine_cluster_count(engine), info.papers,
           (unsigned long long)info.citations, rejected, merit.papers,
           (unsigned long long)merit.h_index, (int)bad, asep_last_error());

    asep_session_free(session);
    asep_engine_free(engine);
    return 0;
}
"#;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    if !have_cc() {
        eprintln!("no C compiler found; skipping");
        return;
    }
    let lib = target_dir().join("libauthorsep_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, PROGRAM).unwrap();

    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success());

    let corpus = manifest.join("../core/tests/fixtures/dialog/soler.txt");
    let out = Command::new(&exe).arg(corpus).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "5 4 1112 4 4 4 6 no group 42\n"
    );
}
