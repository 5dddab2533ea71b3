use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn msa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msa"))
        .args(args)
        .output()
        .unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn happy_path_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "report.json");
    let o = msa(&[
        "analyze",
        &fixture("portal_frame.json"),
        "--ns",
        "4",
        "--gf",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["gap"]["k"], 1);
    assert_eq!(report["parameters"]["n_s"], 4);
    assert_eq!(report["input"]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(
        report["eigenvalues"]["smallest"].as_array().unwrap().len(),
        4
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains("suspects [7, 8]"));
}

#[test]
fn report_goes_to_stdout_without_out() {
    let o = msa(&["analyze", &fixture("portal_frame.json"), "--ns", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["tool"]["name"], "msa");
}

#[test]
fn missing_and_invalid_models_exit_3() {
    assert_eq!(
        msa(&["analyze", "/nonexistent/model.json"]).status.code(),
        Some(3)
    );
    assert_eq!(
        msa(&["check", "/nonexistent/model.json"]).status.code(),
        Some(3)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(
        &bad,
        r#"{"nodes": [{"id": 1, "x": 0, "y": 0}], "elements": [{"id": 1, "kind": "bar", "nodes": [1, 2], "props": {"ea": 1}}]}"#,
    )
    .unwrap();
    let o = msa(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        msa(&["analyze", bad.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn fully_restrained_model_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = path(&dir, "fixed.json");
    std::fs::write(
        &m,
        r#"{"nodes": [{"id": 1, "x": 0, "y": 0}, {"id": 2, "x": 1, "y": 0}],
            "elements": [{"id": 1, "kind": "spring", "nodes": [1, 2], "props": {"k": 1}}],
            "restraints": [{"node": 1, "fixed": ["ux", "uy", "rz"]}, {"node": 2, "fixed": ["ux", "uy", "rz"]}]}"#,
    )
    .unwrap();
    assert_eq!(
        msa(&["analyze", m.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

#[test]
fn usage_errors_exit_2() {
    let f = fixture("portal_frame.json");
    assert_eq!(msa(&[]).status.code(), Some(2));
    assert_eq!(msa(&["analyze"]).status.code(), Some(2));
    assert_eq!(msa(&["analyze", &f, "--ns", "abc"]).status.code(), Some(2));
    assert_eq!(msa(&["analyze", &f, "--gf", "0.5"]).status.code(), Some(2));
    assert_eq!(
        msa(&["analyze", &f, "--ns", "0", "--nl", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        msa(&["analyze", &f, "--svg-eigvec", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(msa(&["--help"]).status.code(), Some(0));
}

#[test]
fn flat_spectrum_warns_and_succeeds() {
    let o = msa(&[
        "analyze",
        &fixture("portal_frame_healthy.json"),
        "--ns",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("warning: no spectral gap; try a larger n_s")
    );
}

#[test]
fn svg_selection_and_matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let svg = path(&dir, "plots");
    let dump = path(&dir, "a.mtx");
    let out = path(&dir, "r.json");
    let o = msa(&[
        "analyze",
        &fixture("portal_frame_two_weak.json"),
        "--ns",
        "5",
        "--nl",
        "1",
        "--out",
        out.to_str().unwrap(),
        "--svg-dir",
        svg.to_str().unwrap(),
        "--svg-eigvec",
        "2,7,5",
        "--dump-matrix",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let mut names: Vec<String> = std::fs::read_dir(&svg)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, vec!["eig0002_v.svg", "eig0007_s.svg"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no energy field for eigenvector 5"));

    let text = std::fs::read_to_string(&dump).unwrap();
    let mut lines = text.lines();
    let header: Vec<usize> = lines.next().unwrap()[2..]
        .split(' ')
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(header[0], 7);
    assert_eq!(lines.count(), header[1]);
}

#[test]
fn check_prints_kappa() {
    let o = msa(&["check", &fixture("portal_frame.json")]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.starts_with("kappa: 1.55"), "{s}");
    let o = msa(&[
        "check",
        &fixture("portal_frame.json"),
        "--cond-threshold",
        "1e6",
    ]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("ill-conditioned"));
    let o = msa(&["check", &fixture("unrestrained_frame.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("kappa: inf"));
}
