use std::path::PathBuf;
use std::process::{Command, Output};

fn phin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phin")).args(args).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("phin-exit-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn success_is_zero() {
    let out = phin(&["phin-analyze", "tests/data/tate_curve.json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "phin-analyze");
}

#[test]
fn usage_errors_are_one() {
    assert_eq!(phin(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(phin(&["drinfeld-ball", "--d", "x"]).status.code(), Some(1));
}

#[test]
fn malformed_input_is_one() {
    let unknown = scratch("unknown.json", r#"{"schema": 1, "p": 2, "d": 1, "phi": [[1]], "n": [[0]], "fil": [], "extra": 0}"#);
    let out = phin(&["phin-analyze", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid input"));
    let garbage = scratch("garbage.json", "not json");
    assert_eq!(phin(&["ss-pages", garbage.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(phin(&["phin-analyze", "tests/data/does_not_exist.json"]).status.code(), Some(1));
}

#[test]
fn violated_preconditions_are_two() {
    // N phi != p phi N
    let bad = scratch(
        "commute.json",
        r#"{"schema": 1, "p": 2, "d": 1, "phi": [[1, 0], [0, 1]], "n": [[0, 1], [0, 0]],
            "fil": [{"index": 0, "basis": [[1, 0], [0, 1]]}, {"index": 1, "basis": []}]}"#,
    );
    let out = phin(&["phin-analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
    assert_eq!(phin(&["drinfeld-ball", "--d", "1", "--p", "4", "--n", "1"]).status.code(), Some(2));
}
