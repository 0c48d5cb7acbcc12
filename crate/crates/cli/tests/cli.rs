use std::process::Command;

fn asri(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_asri")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

#[test]
fn verify_hopf_passes() {
    let (code, out, _) = asri(&["verify", "hopf"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.starts_with("PASS [hopf]")), "{out}");
}

#[test]
fn verify_efficiency_gap_prints_norms() {
    let (code, out, _) = asri(&["verify", "efficiency-gap", "--n", "2", "--gram-seed", "7"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("n=2") && out.contains("taylor") && out.contains("asri") && out.contains("sym"), "{out}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let (code, _, err) = asri(&["verify", "nope"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown suite"), "{err}");
}

#[test]
fn scheme_prints_a_table() {
    let (code, out, _) = asri(&["scheme", "--kind", "taylor", "--grading", "ms", "--order", "2", "--wiener", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("w1w1"), "{out}");
    let (code, _, _) = asri(&["scheme", "--kind", "bogus", "--order", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn preset_round_trips() {
    let (code, out, _) = asri(&["preset", "desk"]);
    assert_eq!(code, 0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("desk.json");
    std::fs::write(&path, out.replace("\"paths\": 500", "\"paths\": 2")).unwrap();
    let (code, out, err) = asri(&["convergence", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("taylor-ms 1"), "{out}");
    assert!(dir.path().join("convergence.csv").exists());
    assert!(dir.path().join("convergence.svg").exists());
}
