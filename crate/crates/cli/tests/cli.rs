use std::path::PathBuf;
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lab"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("synthetic");
    let status = lab().arg("run").arg(config("synthetic.toml")).arg("--out").arg(&out).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let text = String::from_utf8_lossy(&status.stdout);
    assert!(text.contains("fit trace_error: slope 1.0000"), "{text}");
    assert!(out.join("report.json").exists());

    let before = std::fs::read(out.join("report.json")).unwrap();
    let report = lab().arg("report").arg(&out).output().unwrap();
    assert!(report.status.success());
    assert!(String::from_utf8_lossy(&report.stdout).contains("experiment hartree_vs_vlasov"));
    assert_eq!(std::fs::read(out.join("report.json")).unwrap(), before);

    let json = lab().arg("report").arg(&out).arg("--json").output().unwrap();
    assert_eq!(json.stdout, before);
}

#[test]
fn check_runs_a_named_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let r = lab()
        .args(["check", "gaussian_decomposition"])
        .arg(config("smoke.toml"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("check gaussian_decomposition: bounded"));
    assert!(out.join("checks.csv").exists());
}

#[test]
fn bad_inputs_fail_cleanly() {
    let r = lab().args(["check", "no_such_bound"]).arg(config("smoke.toml")).output().unwrap();
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).contains("unknown experiment"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "experiment = \"hartree_vs_vlasov\"\nhbar_ladder = [0.1, 0.2]\n").unwrap();
    let r = lab().arg("run").arg(&bad).output().unwrap();
    assert!(!r.status.success());
    assert!(String::from_utf8_lossy(&r.stderr).starts_with("lab: invalid config"));

    let r = lab().arg("report").arg(dir.path().join("missing")).output().unwrap();
    assert!(!r.status.success());
}
