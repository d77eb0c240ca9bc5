use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const ZIGZAG: &str = r#"{
  "domain": ["0", "1"],
  "pieces": [
    {"kind": "linear", "params": {"slope": "4", "intercept": "0"}, "domain": ["0", "1/4"]},
    {"kind": "linear", "params": {"slope": "-4", "intercept": "2"}, "domain": ["1/4", "1/2"]},
    {"kind": "linear", "params": {"slope": "4", "intercept": "-2"}, "domain": ["1/2", "3/4"]},
    {"kind": "linear", "params": {"slope": "-4", "intercept": "4"}, "domain": ["3/4", "1"]}
  ]
}"#;

fn bvkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bvkit"))
        .args(args)
        .output()
        .unwrap()
}

fn zigzag(dir: &Path) -> PathBuf {
    let p = dir.join("zigzag.json");
    std::fs::write(&p, ZIGZAG).unwrap();
    p
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn variation_of_zigzag_is_four() {
    let d = tempfile::tempdir().unwrap();
    let spec = zigzag(d.path());
    let out = bvkit(&["variation", spec.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["lower"], "4");
    assert_eq!(v["upper"], "4");

    let out = bvkit(&["variation", spec.to_str().unwrap(), "--at", "1/4"]);
    assert_eq!(json(&out)["lower"], "1");
}

#[test]
fn certify_on_a_cantor_level() {
    let d = tempfile::tempdir().unwrap();
    let spec = zigzag(d.path());
    let trace = d.path().join("trace.json");
    let out = bvkit(&[
        "certify",
        spec.to_str().unwrap(),
        "--nullset",
        "cantor@8",
        "--eps",
        "1/2",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let s = json(&out);
    assert_eq!(s["holds"], true);
    assert_eq!(s["n_measure"], "256/6561");
    assert!(trace.exists());

    // zigzag is not monotone, so the shift certificate refuses it
    let out = bvkit(&[
        "certify",
        spec.to_str().unwrap(),
        "--nullset",
        "cantor@8",
        "--eps",
        "1/2",
        "--kind",
        "step2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recover_writes_a_density_csv() {
    let d = tempfile::tempdir().unwrap();
    let spec = zigzag(d.path());
    let csv = d.path().join("f.csv");
    let out = bvkit(&[
        "recover",
        spec.to_str().unwrap(),
        "--grid",
        "64",
        "--emit",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["sup_error"], "0");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,f"));
    for line in lines {
        let f: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(f.abs(), 4.0);
    }
}

#[test]
fn random_families_follow_the_seed() {
    let d = tempfile::tempdir().unwrap();
    let spec = zigzag(d.path());
    let run = |seed: &str| {
        bvkit(&[
            "--seed",
            seed,
            "lusin",
            spec.to_str().unwrap(),
            "--family",
            "random:4",
            "--levels",
            "3",
        ])
        .stdout
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}

#[test]
fn corpus_report_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let corpus = d.path().join("corpus.json");
    let out = bvkit(&[
        "corpus-report",
        "--out",
        d.path().join("ok").to_str().unwrap(),
        "--grid",
        "256",
        "--dump-corpus",
        corpus.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(d.path().join("ok/table.json").exists());

    // claim the identity is not absolutely continuous
    let mut c: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&corpus).unwrap()).unwrap();
    let entries = c["entries"].as_array_mut().unwrap();
    entries.retain(|e| e["name"] == "identity" || e["name"] == "cantor_2");
    for e in entries.iter_mut().filter(|e| e["name"] == "identity") {
        e["truth"]["lusin"] = false.into();
        e["truth"]["ac"] = false.into();
    }
    std::fs::write(&corpus, c.to_string()).unwrap();
    let out = bvkit(&[
        "corpus-report",
        "--corpus",
        corpus.to_str().unwrap(),
        "--out",
        d.path().join("bad").to_str().unwrap(),
        "--grid",
        "256",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("DISAGREE"));
}

#[test]
fn missing_spec_is_an_error() {
    let out = bvkit(&["variation", "/nonexistent/spec.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
