use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn ljl(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ljl"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn summary(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "{text}");
    serde_json::from_str(&text).unwrap()
}

const OCTAHEDRON: &str = "v 1 0 0\nv -1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nv 0 0 -1\n\
f 1 3 5\nf 3 2 5\nf 2 4 5\nf 4 1 5\nf 3 1 6\nf 2 3 6\nf 4 2 6\nf 1 4 6\n";

#[test]
fn score_two_points() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("two.xyz"), "# pair\n0 0\n0.25 0\n").unwrap();
    let s = summary(&ljl(&["score", "--cloud", "two.xyz"], dir.path()));
    assert_eq!(s["command"], "score");
    assert_eq!(s["distance_score"], 0.25);
    assert_eq!(s["seed"], 0);
}

#[test]
fn bluenoise_echoes_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&ljl(
        &["bluenoise", "--n", "64", "--max-iter", "30", "--seed", "7", "--out", "p.xyz", "--report", "r.json"],
        dir.path(),
    ));
    for key in ["n", "boundary", "sigma_mult", "sigma", "epsilon", "alpha", "beta", "k", "tol", "max_iter", "seed"] {
        assert!(!s[key].is_null(), "missing {key}");
    }
    assert_eq!(s["boundary"], "periodic");
    assert_eq!(s["sigma_mult"], 1.0);
    assert_eq!(s["alpha"], 0.5);
    assert_eq!(s["seed"], 7);
    let pts = std::fs::read_to_string(dir.path().join("p.xyz")).unwrap();
    assert_eq!(pts.lines().count(), 64);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["iterations"], s["iterations"]);
    assert_eq!(report["trace"]["distance_score"].as_array().unwrap().len() as u64, s["iterations"].as_u64().unwrap());
}

#[test]
fn redistribute_then_score_on_the_same_mesh() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("octa.obj"), OCTAHEDRON).unwrap();
    let s = summary(&ljl(
        &["redistribute", "--mesh", "octa.obj", "--n", "200", "--max-iter", "60", "--out", "m.xyz"],
        dir.path(),
    ));
    assert_eq!(s["sigma_mult"], 5.0);
    assert_eq!(s["mesh_normalized"], true);
    assert!(s["noise_score"].as_f64().unwrap() < 1e-9);
    let score = summary(&ljl(&["score", "--cloud", "m.xyz", "--mesh", "octa.obj"], dir.path()));
    // Coordinates are written at 9 significant digits.
    assert!(score["noise_score"].as_f64().unwrap() < 1e-8);
    assert!(score["distance_score_filtered"].as_f64().unwrap() > 0.0);
}

#[test]
fn embed_compare_reports_increments() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&ljl(&["embed", "--n", "128", "--t", "30", "--compare", "--seed", "3"], dir.path()));
    assert_eq!(s["ss"], 18);
    assert_eq!(s["tprime"], 28);
    assert_eq!(s["alpha"], 2.5);
    for key in ["distance_increment", "noise_increment", "distance_score_base", "noise_score_ljl"] {
        assert!(s[key].is_number(), "missing {key}");
    }
}

#[test]
fn analyze_writes_csv_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    summary(&ljl(&["bluenoise", "--n", "128", "--max-iter", "100", "--out", "a.xyz"], dir.path()));
    let s = summary(&ljl(&["analyze", "--cloud", "a.xyz", "--freq", "16", "--csv", "r.csv", "--pgm", "r.pgm"], dir.path()));
    assert_eq!(s["freq"], 16);
    let csv = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("radius,radial_power,anisotropy_db\n"));
    assert_eq!(csv.lines().count(), 17);
    let pgm = std::fs::read_to_string(dir.path().join("r.pgm")).unwrap();
    assert!(pgm.starts_with("P2\n33 33\n255\n"));
}

#[test]
fn sweep_writes_one_row_per_value_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&ljl(
        &["sweep", "--axis", "ss", "--range", "0:100:20", "--seeds", "0,1", "--n", "64", "--csv", "s.csv"],
        dir.path(),
    ));
    assert_eq!(s["rows"], 12);
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| ljl(args, dir.path()).status.code();
    assert_eq!(code(&["teleport"]), Some(2));
    assert_eq!(code(&["bluenoise", "--boundary", "torus"]), Some(2));
    assert_eq!(code(&["bluenoise", "--n", "64", "--alpha", "-1"]), Some(2));
    assert_eq!(code(&["bluenoise", "--n", "64", "--sigma-mult", "0"]), Some(2));
    assert_eq!(code(&["sweep", "--axis", "alpha"]), Some(2));
    assert_eq!(code(&["redistribute", "--n", "10"]), Some(2));
    assert_eq!(code(&["score", "--cloud", "missing.xyz"]), Some(1));
    std::fs::write(dir.path().join("bad.xyz"), "0 0\nnot numbers\n").unwrap();
    assert_eq!(code(&["score", "--cloud", "bad.xyz"]), Some(1));
    let out = ljl(&["bluenoise", "--n", "64", "--out", "no/such/dir/p.xyz"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_ljl"))
            .args(["embed", "--n", "200", "--t", "20", "--out", out])
            .env("LJL_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(o.status.success());
    };
    run("1", "one.xyz");
    run("3", "three.xyz");
    let a = std::fs::read(dir.path().join("one.xyz")).unwrap();
    let b = std::fs::read(dir.path().join("three.xyz")).unwrap();
    assert_eq!(a, b);
    let bad = Command::new(env!("CARGO_BIN_EXE_ljl"))
        .args(["score", "--cloud", "one.xyz"])
        .env("LJL_THREADS", "zero")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
