use std::path::Path;
use std::process::{Command, Output};

fn shadows(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shadows"))
        .args(args)
        .env_remove("SHADOWS_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const CONFIG: &str = r#"{
    "state": {"preset": "ghz", "n": 6},
    "protocols": [
        {"name": "dimers", "covering": {"kind": "dimer-chain", "parity": "even", "boundary": "open"}, "family": {"kind": "bell"}},
        {"name": "trimers", "covering": {"kind": "n-mer-chain", "size": 3}, "family": {"kind": "ghz"}}
    ],
    "reference": {"covering": {"kind": "singletons"}, "family": {"kind": "pauli-local"}},
    "operators": [
        {"kind": "explicit", "operators": ["ZZIIII", "XXXXXX", "IIIZZZ", "ZIIIII"]},
        {"kind": "contiguous", "weights": [2], "periodic": false}
    ],
    "shots": 3000,
    "master_seed": 5
}"#;

fn write_config(dir: &Path) -> String {
    let path = dir.join("campaign.json");
    std::fs::write(&path, CONFIG).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn preset_list_and_show() {
    let o = shadows(&["preset", "list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("string-1d\t"));
    let o = shadows(&["preset", "show", "honeycomb"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["analysis"]["summary"]["prefactor"], 54.0);
    assert_eq!(shadows(&["preset", "show", "nope"]).status.code(), Some(2));
}

#[test]
fn norm_table_for_preset() {
    let o = shadows(&["norm", "--preset", "multipoint"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let first = text.lines().nth(1).unwrap();
    assert!(first.ends_with(",9,81"), "{first}");
    assert_eq!(text.lines().count(), 1 + 135);
}

#[test]
fn estimate_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let mut outputs = Vec::new();
    for workers in ["1", "8"] {
        let out = dir.path().join(format!("report{workers}.csv"));
        let datasets = dir.path().join(format!("data{workers}"));
        let o = Command::new(env!("CARGO_BIN_EXE_shadows"))
            .args(["estimate", "--config", &config, "--out"])
            .arg(&out)
            .arg("--datasets")
            .arg(&datasets)
            .env("SHADOWS_WORKERS", workers)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let report = std::fs::read(&out).unwrap();
        let dimers = std::fs::read(datasets.join("dimers.jsonl")).unwrap();
        let trimers = std::fs::read(datasets.join("trimers.jsonl")).unwrap();
        outputs.push((report, dimers, trimers));
    }
    assert_eq!(outputs[0], outputs[1]);
    let report = String::from_utf8(outputs[0].0.clone()).unwrap();
    // ZIIIII is cut by both coverings
    assert!(report.lines().any(|l| l.starts_with("ZIIIII,ZIIIII,UNLEARNABLE")));
    let header = String::from_utf8(outputs[0].1.clone()).unwrap();
    assert!(header.lines().next().unwrap().contains("\"master_seed\""));
    assert_eq!(header.lines().count(), 3001);
}

#[test]
fn json_report_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let a = shadows(&["estimate", "--config", &config, "--format", "json", "--seed", "1", "--shots", "500"]);
    let b = shadows(&["estimate", "--config", &config, "--format", "json", "--seed", "2", "--shots", "500"]);
    assert!(a.status.success() && b.status.success());
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rows"][0]["estimate"]["shots_used"], 500);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn echoed_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let first = shadows(&["echo", "--config", &config, "--shots", "77"]);
    assert!(first.status.success());
    let echoed = dir.path().join("echoed.json");
    std::fs::write(&echoed, &first.stdout).unwrap();
    let second = shadows(&["echo", "--config", echoed.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("\"shots\": 77"));
    let n1 = shadows(&["norm", "--config", &config]);
    let n2 = shadows(&["norm", "--config", echoed.to_str().unwrap()]);
    assert_eq!(n1.stdout, n2.stdout);
}

#[test]
fn sweep_outputs() {
    let o = shadows(&["sweep", "--axis", "k", "--deltas", "0", "--ks", "1,2,3,4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().nth(1).unwrap().contains("UNLEARNABLE"));
    assert!(text.lines().nth(4).unwrap().starts_with("k,4,4,0,2,9,"));
    let o = shadows(&["sweep", "--axis", "n", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 8);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"state": {"preset": "ghz", "n": 4}}"#).unwrap();
    assert_eq!(shadows(&["norm", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(shadows(&["norm"]).status.code(), Some(2));
    assert_eq!(shadows(&["sweep", "--axis", "q"]).status.code(), Some(2));

    let huge = dir.path().join("huge.json");
    let text = CONFIG
        .replace("\"preset\": \"ghz\", \"n\": 6", "\"preset\": \"random-dense\", \"n\": 30")
        .replace(
            r#"{"kind": "explicit", "operators": ["ZZIIII", "XXXXXX", "IIIZZZ", "ZIIIII"]},"#,
            "",
        );
    std::fs::write(&huge, text).unwrap();
    let o = shadows(&["estimate", "--config", huge.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));

    let o = shadows(&["validate", "--tamper-bell"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL eigenvalues-bell-oracle"));
    assert!(shadows(&["validate"]).status.success());
}
