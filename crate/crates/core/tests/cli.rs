//! The command line binary: exit codes, file round trips and reproducible reports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use splitkit::session::desk;

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("splitkit-cli-{}-{tag}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for (name, text) in desk::all() {
        std::fs::write(dir.join(format!("{name}.json")), text).unwrap();
    }
    dir
}

fn splitkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitkit")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn split_then_verify_round_trip() {
    let dir = scratch("verify");
    let split = splitkit(&dir, &["split", "--session", "circle.json", "--out", "split.json"]);
    assert_eq!(code(&split), 0, "{}", String::from_utf8_lossy(&split.stderr));
    let verify = splitkit(&dir, &["verify", "--session", "circle.json", "--splitting", "split.json"]);
    assert_eq!(code(&verify), 0, "{}", String::from_utf8_lossy(&verify.stdout));

    let mut report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("split.json")).unwrap()).unwrap();
    report["sequence"][0]["edges"] = json!([]);
    std::fs::write(dir.join("tampered.json"), report.to_string()).unwrap();
    let verify = splitkit(&dir, &["verify", "--session", "circle.json", "--splitting", "tampered.json"]);
    assert_eq!(code(&verify), 1);
    assert!(String::from_utf8_lossy(&verify.stdout).contains("subtree-validity"));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = scratch("repeat");
    for (session, command) in [("circle.json", "split"), ("trefoil.json", "split"), ("wedge.json", "cw-split"), ("plus.json", "plus")] {
        let a = splitkit(&dir, &[command, "--session", session]);
        let b = splitkit(&dir, &[command, "--session", session]);
        assert_eq!(code(&a), 0, "{session} {command}: {}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout, "{session} {command}");
        let _: Value = serde_json::from_slice(&a.stdout).expect("a JSON report");
    }
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let dot = splitkit(&dir, &["export-dot", "--session", "circle.json"]);
    assert_eq!(code(&dot), 0);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("graph"));
    // an essential loop has no filling
    let plus = splitkit(&dir, &["plus", "--session", "plus.json", "--complex", "circle", "--word", "a"]);
    assert_eq!(code(&plus), 1);
    // usage errors
    assert_eq!(code(&splitkit(&dir, &["split", "--session", "missing.json"])), 2);
    assert_eq!(code(&splitkit(&dir, &["bogus", "--session", "circle.json"])), 2);
    assert_eq!(code(&splitkit(&dir, &["split", "--session", "circle.json", "--complex", "nope"])), 2);
    std::fs::write(dir.join("broken.json"), "{\"groups\": [}").unwrap();
    let broken = splitkit(&dir, &["split", "--session", "broken.json"]);
    assert_eq!(code(&broken), 2);
    assert!(String::from_utf8_lossy(&broken.stderr).contains("broken.json"));
}

#[test]
fn bundled_session_files_match_the_desk() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("sessions");
    for (name, text) in desk::all() {
        let on_disk = std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap();
        assert_eq!(on_disk, text, "{name}");
    }
}
