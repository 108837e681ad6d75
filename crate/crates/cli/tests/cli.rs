use std::path::PathBuf;
use std::process::{Command, Output};

fn mvba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvba")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mvba-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn run_writes_report_and_csv() {
    let out = scratch("run.json");
    let csv = scratch("run.csv");
    let o = mvba(&[
        "run",
        "--protocol",
        "hash",
        "--n",
        "7",
        "--msg-size",
        "64",
        "--runs",
        "2",
        "--adversary",
        "crash",
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
    assert_eq!(report["violations"], 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}

#[test]
fn rr_below_resilience_is_rejected() {
    let out = scratch("rejected.json");
    let o = mvba(&[
        "run",
        "--protocol",
        "rr",
        "--n",
        "5",
        "--t",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("5t+1"));
}

#[test]
fn campaign_then_fit() {
    let config = scratch("grid.json");
    std::fs::write(
        &config,
        r#"{"grid": {"protocols": ["hash"], "sizes": [[4, 1], [7, 2], [10, 3]], "msg_size_bytes": 64, "adversaries": ["none"]}}"#,
    )
    .unwrap();
    let out = scratch("campaign.json");
    let o = mvba(&[
        "campaign",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = mvba(&["fit", "--report", out.to_str().unwrap(), "--claim", "hash-bits"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("hash-bits: c = "));
    let o = mvba(&["fit", "--report", out.to_str().unwrap(), "--claim", "rr-bits"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_suite_is_an_error() {
    assert_eq!(mvba(&["suite", "--name", "nope"]).status.code(), Some(2));
    let o = mvba(&["suite", "--name", "abbba", "--sizes", "4", "--seeds", "1"]);
    assert!(o.status.success());
}
