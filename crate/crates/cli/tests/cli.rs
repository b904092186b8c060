use std::path::Path;
use std::process::{Command, Output};

fn muskat(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_muskat"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("MUSKAT_THREADS", t);
    }
    cmd.output().expect("spawn muskat")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const BUMP: &str = r#"{"geometry":"half_plane","L":8,"n":128,"t_end":0.05,"cadence":0.01,"epsilons":[0],
    "profile":{"bump":{"A":0.5,"w":1.5,"base":1}}}"#;

#[test]
fn verify_identities_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = muskat(
        &[
            "verify",
            "--suite",
            "identities",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("identities.json")).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    let csv = std::fs::read_to_string(dir.path().join("theta_convergence.csv")).unwrap();
    assert!(csv.starts_with("y,r,N,error"));
}

#[test]
fn flat_simulation_keeps_every_row_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "flat.json",
        r#"{"geometry":{"strip":3},"L":4,"n":64,"t_end":0.05,"cadence":0.01,"epsilons":[0],
            "profile":{"constant":{"value":1.25}}}"#,
    );
    let run = dir.path().join("run");
    let out = muskat(
        &["simulate", "--config", &cfg, "--out", run.to_str().unwrap()],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let series = std::fs::read_to_string(run.join("series.csv")).unwrap();
    let mut lines = series.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let sup = header.iter().position(|h| *h == "sup").unwrap();
    let inf = header.iter().position(|h| *h == "inf").unwrap();
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[sup], 1.25);
        assert_eq!(v[inf], 1.25);
        rows += 1;
    }
    assert_eq!(rows, 6);
}

#[test]
fn reruns_are_bit_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bump.json", BUMP);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(muskat(
        &["simulate", "--config", &cfg, "--out", a.to_str().unwrap()],
        Some("1")
    )
    .status
    .success());
    assert!(muskat(
        &["simulate", "--config", &cfg, "--out", b.to_str().unwrap()],
        Some("4")
    )
    .status
    .success());
    for file in ["series.csv", "verdicts.json", "snap_0000.csv", "snap_0005.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert!(x == y, "{file} differs between reruns");
    }
}

#[test]
fn compare_writes_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bump.json", BUMP);
    let a = dir.path().join("a");
    assert!(muskat(
        &["simulate", "--config", &cfg, "--out", a.to_str().unwrap()],
        None
    )
    .status
    .success());
    let cert = dir.path().join("cert.json");
    let out = muskat(
        &[
            "compare",
            a.to_str().unwrap(),
            a.to_str().unwrap(),
            "--mu",
            "1",
            "--out",
            cert.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    assert_eq!(json["mu"], 1.0);
    assert!(json["distance"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d.as_f64() == Some(0.0)));
}

#[test]
fn norms_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bump.json", BUMP);
    let a = dir.path().join("a");
    assert!(muskat(
        &["simulate", "--config", &cfg, "--out", a.to_str().unwrap()],
        None
    )
    .status
    .success());
    let out = muskat(
        &["norms", "--csv", a.join("snap_0000.csv").to_str().unwrap()],
        None,
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("norm,value\n"));
    let bracket = text.lines().find(|l| l.starts_with("t_psi_bracket,")).unwrap();
    let value: f64 = bracket.split(',').nth(1).unwrap().parse().unwrap();
    assert!(value > 0.0 && value.is_finite());
}

#[test]
fn bad_config_fails_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.json",
        r#"{"geometry":"half_plane","L":8,"n":128,"t_end":-1}"#,
    );
    let out = muskat(&["simulate", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn unknown_subcommand_exits_two() {
    assert_eq!(muskat(&["frobnicate"], None).status.code(), Some(2));
}
