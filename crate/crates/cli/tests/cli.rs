use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hodgetree(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodgetree")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fig1(dir: &Path) {
    std::fs::write(dir.join("fig1.json"), r#"{"simplices": [{"v": [1, 2, 3]}, {"v": [2, 3, 4]}]}"#).unwrap();
    ok(&hodgetree(&["complex", "build", "--from-simplices", "fig1.json", "-o", "c.json"], dir));
}

fn edge_signal(dir: &Path) {
    let s = r#"{"kappa": 1, "values": [
        {"v": [1, 2], "x": 1.0}, {"v": [1, 3], "x": 2.0}, {"v": [2, 3], "x": 0.5},
        {"v": [2, 4], "x": -1.0}, {"v": [3, 4], "x": 3.0}]}"#;
    std::fs::write(dir.join("s.json"), s).unwrap();
}

fn parse_matrix(text: &str) -> Vec<Vec<f64>> {
    text.lines().map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn info_counts_fig1() {
    let dir = tempfile::tempdir().unwrap();
    fig1(dir.path());
    let out = ok(&hodgetree(&["complex", "info", "c.json"], dir.path()));
    assert_eq!(out.trim(), "4 vertices, 5 edges, 2 triangles");
}

#[test]
fn laplacian_prints_sym_adjacency() {
    let dir = tempfile::tempdir().unwrap();
    fig1(dir.path());
    let out = ok(&hodgetree(&["laplacian", "--kappa", "1", "--variant", "sym", "--format", "csv", "c.json"], dir.path()));
    let m = parse_matrix(&out);
    let r = 2f64.sqrt();
    let expect = [
        [0.0, 2.0, -r, 1.0, 0.0],
        [2.0, 0.0, r, 0.0, 1.0],
        [-r, r, 0.0, r, -r],
        [1.0, 0.0, r, 0.0, 2.0],
        [0.0, 1.0, -r, 2.0, 0.0],
    ];
    for (row, e) in m.iter().zip(expect) {
        for (x, y) in row.iter().zip(e) {
            assert!((x - y / 4.0).abs() < 1e-12);
        }
    }
    let b = ok(&hodgetree(&["laplacian", "--kappa", "0", "--matrix", "boundary", "--format", "coo", "c.json"], dir.path()));
    assert_eq!(b.lines().count(), 10);
}

#[test]
fn file_pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fig1(d);
    edge_signal(d);
    ok(&hodgetree(&["partition", "--kappa", "1", "c.json", "-o", "tree.json"], d));
    let tree: Value = serde_json::from_str(&std::fs::read_to_string(d.join("tree.json")).unwrap()).unwrap();
    assert_eq!(tree["n"], 5);
    for kind in ["haar", "hglet", "ghwt"] {
        let out = format!("{kind}.json");
        ok(&hodgetree(&["dict", "--kind", kind, "--kappa", "1", "c.json", "tree.json", "-o", &out], d));
    }
    ok(&hodgetree(&["dict", "--kind", "ghwt", "--kappa", "1", "--order", "f2c", "c.json", "tree.json", "-o", "f2c.json"], d));
    let fail = hodgetree(&["dict", "--kind", "hglet", "--kappa", "1", "--order", "f2c", "c.json", "tree.json"], d);
    assert_eq!(fail.status.code(), Some(2));

    ok(&hodgetree(&["bestbasis", "f2c.json", "s.json", "--direction", "f2c", "-o", "sel.json", "--coefficients", "co.csv"], d));
    let sel: Value = serde_json::from_str(&std::fs::read_to_string(d.join("sel.json")).unwrap()).unwrap();
    assert_eq!(sel["atoms"].as_array().unwrap().len(), 5);
    let csv = std::fs::read_to_string(d.join("co.csv")).unwrap();
    assert!(csv.starts_with("atom,j,k,l,coefficient\n"));
    assert_eq!(csv.lines().count(), 6);

    let omp: Value = serde_json::from_str(&ok(&hodgetree(&["omp", "ghwt.json", "s.json", "--terms", "5"], d))).unwrap();
    let last = omp["residual_norms"].as_array().unwrap().last().unwrap().as_f64().unwrap();
    assert!(last < 1e-10);
    let greedy: Value = serde_json::from_str(&ok(&hodgetree(&["greedy", "ghwt.json", "s.json", "--terms", "4"], d))).unwrap();
    assert_eq!(greedy["terms"].as_array().unwrap().len(), 4);
}

#[test]
fn approx_writes_curves() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fig1(d);
    edge_signal(d);
    let out = ok(&hodgetree(&["approx", "c.json", "s.json", "--kappa", "1", "--method", "ghwt-f2c"], d));
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "m,rel_error,method");
    assert_eq!(rows.len(), 7);
    let last: f64 = rows[6].split(',').nth(1).unwrap().parse().unwrap();
    assert!(last < 1e-12);
    let all = ok(&hodgetree(&["approx", "c.json", "s.json", "--kappa", "1"], d));
    assert_eq!(all.lines().count(), 1 + 8 * 6);
}

#[test]
fn delaunay_build_with_signals() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["complex", "build", "--delaunay", "40", "--synthetic", "bumps", "--signal-dir", "sig", "-o", "mesh.json"];
    ok(&hodgetree(&args, d));
    let info = ok(&hodgetree(&["complex", "info", "mesh.json"], d));
    assert!(info.starts_with("40 vertices"));
    for k in 0..3 {
        assert!(d.join(format!("sig/signal_{k}.json")).exists());
    }
    let out = ok(&hodgetree(&["approx", "mesh.json", "sig/signal_2.json", "--kappa", "2", "--method", "haar"], d));
    assert!(out.lines().count() > 10);
}

#[test]
fn seeded_output_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&hodgetree(&["complex", "build", "--delaunay", "30", "--seed", "3", "-o", "m.json"], d));
    let a = ok(&hodgetree(&["partition", "--kappa", "1", "m.json", "--threads", "1"], d));
    let b = ok(&hodgetree(&["partition", "--kappa", "1", "m.json", "--threads", "4"], d));
    assert_eq!(a, b);
    let c = hodgetree(&["partition", "--kappa", "1", "m.json"], d);
    assert_eq!(String::from_utf8(c.stdout).unwrap(), a);
}

#[test]
fn kscore_on_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&hodgetree(&["complex", "build", "--delaunay", "25", "-o", "m.json"], d));
    let args = ["kscore", "m.json", "--trajectories", "30", "--clusters", "2,3", "--features", "2", "--seed", "5"];
    let out = ok(&hodgetree(&args, d));
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "clusters,features,method,score");
    assert_eq!(rows.len(), 1 + 2 * 4);
    assert_eq!(out, ok(&hodgetree(&args, d)));
}

#[test]
fn citation_complex_build() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("rec.json"), r#"[{"authors": [1, 2, 3], "citations": 5}, {"authors": [2, 3], "citations": 2}]"#).unwrap();
    ok(&hodgetree(&["complex", "build", "--citations", "rec.json", "--signal-dir", "sig", "-o", "c.json"], d));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(d.join("sig/signal_2.json")).unwrap()).unwrap();
    assert_eq!(s["values"][0]["x"], 17.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(hodgetree(&["--help"], d).status.code(), Some(0));
    assert_eq!(hodgetree(&["--version"], d).status.code(), Some(0));
    assert_eq!(hodgetree(&["frobnicate"], d).status.code(), Some(1));
    assert_eq!(hodgetree(&["laplacian", "x.json"], d).status.code(), Some(1));

    std::fs::write(d.join("bad.json"), "{\"simplices\": [\n  {\"v\": [1, 2]},\n  oops\n]}").unwrap();
    let out = hodgetree(&["complex", "info", "bad.json"], d);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");

    std::fs::write(d.join("e.txt"), "1 2\n# comment\n2 three\n").unwrap();
    let out = hodgetree(&["complex", "build", "--from-edges", "e.txt"], d);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("e.txt") && err.contains("line 3"), "{err}");

    assert_eq!(hodgetree(&["complex", "info", "missing.json"], d).status.code(), Some(2));
}
