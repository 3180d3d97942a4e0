//! The `geoextremes` binary.

use std::fs;
use std::process::{Command, Output};

fn geoextremes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoextremes")).args(args).output().unwrap()
}

#[test]
fn list_prints_the_catalog() {
    let out = geoextremes(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["knn-gumbel-2d", "voronoi-inradius-gumbel", "delaunay-rathie", "bp-all", "mecke", "lemma-pair"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
    let cfg = geoextremes(&["list", "--config", "mecke"]);
    assert!(cfg.status.success());
    assert!(String::from_utf8(cfg.stdout).unwrap().contains("kind = \"mecke-check\""));
}

#[test]
fn run_writes_a_bundle_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("knn.cfg");
    fs::write(&cfg, "kind = \"knn\"\nid = \"cli-knn\"\nreplicates = 50\ns = 1000.0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = geoextremes(&[
        "run",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--replicates",
        "30",
        "--workers",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let results = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 31);
    let echo = fs::read_to_string(out_dir.join("spec.echo")).unwrap();
    assert!(echo.contains("master_seed = 9") && echo.contains("replicates = 30"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["workers"], 2);
}

#[test]
fn catalog_ids_run_at_smoke_scale() {
    let dir = tempfile::tempdir().unwrap();
    let out = geoextremes(&["run", "lemma-xA", "--scale", "smoke", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "kind = \"knn\"\nradius = 0.1\n").unwrap();
    let out = geoextremes(&["run", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());

    let missing = geoextremes(&["run", "no-such-experiment"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn unparsable_arguments_are_rejected() {
    let out = geoextremes(&["run", "mecke", "--scale", "huge"]);
    assert!(!out.status.success());
}
