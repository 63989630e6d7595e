//! The command-line driver: exit codes, JSON reports and the cache.

use std::process::Command;

use wittlab::report::{self, parse_report, Status};

fn wittlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wittlab")).args(args).env_remove("WITTLAB_CACHE").output().unwrap()
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = wittlab(&["--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-suite"));
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(wittlab(&["--max-weight", "many"]).status.code(), Some(2));
}

#[test]
fn passing_suite_exits_zero() {
    let out = wittlab(&["--suite", "witt-identities"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("12 passed, 0 failed"));
}

#[test]
fn failing_check_exits_one_and_json_round_trips() {
    let dir = tempdir();
    let path = dir.join("chern.json");
    let out = wittlab(&["--suite", "chern-pairings", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(&path).unwrap();
    let rep = parse_report(&text).unwrap();
    assert_eq!(rep.schema, 1);
    assert_eq!(report::report_json(&rep.suites) + "\n", text);
    let det = rep.suites[0].checks.iter().find(|c| c.id == "det-pairing-matrix").unwrap();
    assert_eq!((det.status, det.value.as_str(), det.expected.as_str()), (Status::Pass, "-96", "nonzero"));
    for c in &rep.suites[0].checks {
        assert_eq!(c.status == Status::Fail, c.value != c.expected && c.expected != "nonzero", "{}", c.id);
    }
}

#[test]
fn unwritable_json_path_is_an_io_error() {
    let out = wittlab(&["--suite", "witt-identities", "--json", "/nonexistent-dir/x/report.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn empty_report() {
    assert_eq!(report::report_json(&[]), r#"{"schema":1,"suites":[]}"#);
}

#[test]
fn cache_does_not_change_reports() {
    let dir = tempdir();
    let cache = dir.join("cache");
    let plain = dir.join("plain.json");
    let cached = dir.join("cached.json");
    let suites = ["--suite", "l1-homology", "--suite", "w2-coeff-cohomology"];
    let run = |json: &std::path::Path, extra: &[&str]| {
        let mut args = suites.to_vec();
        args.extend(["--json", json.to_str().unwrap()]);
        args.extend(extra);
        assert_eq!(wittlab(&args).status.code(), Some(0));
        std::fs::read_to_string(json).unwrap()
    };
    let a = run(&plain, &[]);
    let b = run(&cached, &["--cache-dir", cache.to_str().unwrap()]);
    let c = run(&cached, &["--cache-dir", cache.to_str().unwrap()]);
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
}

#[test]
fn truncated_weights_are_inconclusive_not_zero() {
    let out = wittlab(&["--suite", "l1-homology", "--max-weight", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[INCONCLUSIVE] dim H2(L1) at weight 4"));
    assert!(text.contains("3 passed, 0 failed, 2 inconclusive"));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("wittlab-cli-{}-{}", std::process::id(), rand::random::<u64>()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
