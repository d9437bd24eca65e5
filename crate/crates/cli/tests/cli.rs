use std::fs;
use std::process::{Command, Output};

fn vmvt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmvt")).args(args).output().expect("run vmvt")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn counts() {
    let out = vmvt(&["count", "j", "--s", "6", "--k", "3", "--x", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1");
    assert_eq!(stdout(&vmvt(&["count", "j", "--s", "6", "--k", "3", "--x", "17/2"])), "72969024");
    assert_eq!(stdout(&vmvt(&["count", "n", "--p", "5", "--nu", "1", "--a", "1", "--c", "1"])), "45");
    let out = vmvt(&["--format", "json", "count", "i", "--s", "6", "--k", "3", "--x", "30", "--p", "5", "--a", "1", "--b", "1", "--m", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], "1275780");
    assert_eq!((v["argmax_xi"].as_u64(), v["argmax_eta"].as_u64()), (Some(1), Some(2)));
}

#[test]
fn exit_codes() {
    assert_eq!(vmvt(&["count", "j", "--s", "7", "--k", "3", "--x", "3"]).status.code(), Some(4));
    assert_eq!(vmvt(&["count", "j", "--s", "6", "--k", "3", "--x", "abc"]).status.code(), Some(3));
    assert_eq!(vmvt(&["nonsense"]).status.code(), Some(3));
    assert_eq!(vmvt(&["--engine", "nope", "count", "j", "--s", "1", "--k", "1", "--x", "3"]).status.code(), Some(3));
    assert_eq!(vmvt(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    fs::write(&cfg, r#"{"primes": [5], "bogus": 1}"#).unwrap();
    let out = vmvt(&["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    fs::write(&cfg, r#"{"primes": [4]}"#).unwrap();
    let out = vmvt(&["verify", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("reports");
    let cache = dir.path().join("counts.jsonl");
    let args = [
        "--cache", cache.to_str().unwrap(), "verify", "--lemmas", "1,3,8", "--primes", "5", "--x", "25,30",
        "--pairs", "1:1,1:2", "--levels", "0,1", "--out", out_dir.to_str().unwrap(),
    ];
    let out = vmvt(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("lemma_id,variant,x,p,a,b,c,lhs,rhs,holds,slack,status,note"));
    let report = fs::read_to_string(out_dir.join("report.json")).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["summary"]["failed"], 0);
    assert!(fs::metadata(&cache).unwrap().len() > 0);

    // Warm rerun: identical report, everything served from the cache.
    let out = vmvt(&args);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(out_dir.join("report.json")).unwrap(), report);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["cache"]["misses"], 0);
}

#[test]
fn recursion_output() {
    let out = vmvt(&["recursion", "--eigen", "--threshold", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["eigen"]["eigenvalues"], serde_json::json!(["1", "1/6"]));
    assert_eq!(v["eigen"]["reconstructs"], true);
    assert_eq!(v["threshold"], "13");
    let v: serde_json::Value = serde_json::from_str(&stdout(&vmvt(&["recursion", "--n", "0"]))).unwrap();
    assert_eq!((v["alpha"].as_str(), v["beta"].as_str()), (Some("-10/3"), Some("5/3")));
}

#[test]
fn trend_and_engines() {
    let out = vmvt(&["trend", "--x", "1,2,5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("5,5,2241225,")));
    let engines = stdout(&vmvt(&["engines"]));
    assert_eq!(engines.lines().map(|l| l.split('\t').next().unwrap()).collect::<Vec<_>>(), ["partitioned", "table", "naive"]);
}
