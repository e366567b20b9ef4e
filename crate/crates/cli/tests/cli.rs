use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::Value;

static COUNTER: AtomicUsize = AtomicUsize::new(0);

struct Scratch(PathBuf);

impl Scratch {
    fn new() -> Self {
        let n = COUNTER.fetch_add(1, Ordering::SeqCst);
        let dir = std::env::temp_dir().join(format!("treegrade-cli-{}-{n}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treegrade")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

/// Generate a family and its decomposition into `dir`.
fn generate(dir: &Scratch, spec: &str, certify: bool) -> (PathBuf, PathBuf) {
    let g = dir.path("graph.json");
    let p = dir.path("pieces.json");
    let mut args = vec!["gen", "--spec", spec, "--out", s(&g), "--pieces-out", s(&p)];
    if certify {
        args.push("--certify");
    }
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    (g, p)
}

const CYCLES: &str = r#"{"family":"tree_of_pieces","pieces":6,"template":"cycle","min_size":4,"max_size":7,"depth":null,"seed":3}"#;

#[test]
fn verify_accepts_tree_of_cycles() {
    let dir = Scratch::new();
    let (g, p) = generate(&dir, CYCLES, true);
    let out = run(&["verify", "--input", s(&g), "--pieces", s(&p)]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["m"], 2);
    assert_eq!(r["verified"], 15);
    assert_eq!(r["refuted"], 0);
}

#[test]
fn verify_refutes_grid_rows_with_witnesses() {
    let dir = Scratch::new();
    let (g, p) = generate(&dir, r#"{"family":"grid","n":6}"#, false);
    let out = run(&["verify", "--input", s(&g), "--pieces", s(&p), "--M", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["refuted"], 15);
    for pair in r["pairs"].as_array().unwrap() {
        let path = pair["witness"].as_array().expect("witness path");
        assert!(path.len() >= 2);
    }
}

#[test]
fn empty_piece_is_a_schema_error() {
    let dir = Scratch::new();
    let g = dir.write("g.json", r#"{"format":"treegrade-graph","version":1,"vertex_count":3,"edges":[[0,1],[1,2]]}"#);
    let p = dir.write(
        "p.json",
        r#"{"format":"treegrade-pieces","version":1,"base_piece":0,"pieces":[[0,1],[]],"constant":1}"#,
    );
    let out = run(&["verify", "--input", s(&g), "--pieces", s(&p)]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("pieces[1]"), "{err}");
}

#[test]
fn sampling_without_seed_is_rejected() {
    let dir = Scratch::new();
    let (g, p) = generate(&dir, CYCLES, true);
    let out = run(&["verify", "--input", s(&g), "--pieces", s(&p), "--pairs", "sample:3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_does_not_depend_on_threads() {
    let dir = Scratch::new();
    let spec = r#"{"family":"tree_of_pieces","pieces":12,"template":"mixed","min_size":3,"max_size":9,"depth":3,"seed":11}"#;
    let (g, p) = generate(&dir, spec, true);
    let base = ["--input", s(&g), "--pieces", s(&p)];
    for (cmd, extra) in [("verify", &[][..]), ("distort", &["--no-cut-check"][..])] {
        let with = |threads: &str| {
            let mut args = vec![cmd];
            args.extend(base);
            args.extend(extra);
            args.extend(["--threads", threads]);
            run(&args)
        };
        let (one, four) = (with("1"), with("4"));
        assert_eq!(one.status.code(), four.status.code());
        assert!(!one.stdout.is_empty());
        assert_eq!(one.stdout, four.stdout, "{cmd}");
    }
}

#[test]
fn build_single_piece() {
    let dir = Scratch::new();
    let g = dir.write("g.json", r#"{"format":"treegrade-graph","version":1,"vertex_count":4,"edges":[[0,1],[1,2],[2,3],[3,0]]}"#);
    let p = dir.write("p.json", r#"{"format":"treegrade-pieces","version":1,"base_piece":0,"pieces":[[0,1,2,3]],"constant":1}"#);
    let out = run(&["build", "--input", s(&g), "--pieces", s(&p), "--no-cut-check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["structure_check"]["passed"], true);
    assert_eq!(r["tree_graded"]["pieces"].as_array().unwrap().len(), 1);
    assert_eq!(r["tree_graded"]["arcs"].as_array().unwrap().len(), 0);
}

#[test]
fn build_reports_small_cut() {
    // two paths glued at a vertex: a unit ball cuts each piece
    let dir = Scratch::new();
    let g = dir.write(
        "g.json",
        r#"{"format":"treegrade-graph","version":1,"vertex_count":9,"edges":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,6],[6,7],[7,8]]}"#,
    );
    let p = dir.write(
        "p.json",
        r#"{"format":"treegrade-pieces","version":1,"base_piece":0,"pieces":[[0,1,2,3,4],[4,5,6,7,8]],"constant":1}"#,
    );
    let out = run(&["build", "--input", s(&g), "--pieces", s(&p)]);
    assert_eq!(out.status.code(), Some(3));
    let with_thickening = run(&["build", "--input", s(&g), "--pieces", s(&p), "--thicken", "--b", "2"]);
    assert_eq!(with_thickening.status.code(), Some(0), "{}", String::from_utf8_lossy(&with_thickening.stderr));
    let r = json(&with_thickening);
    assert_eq!(r["thickened"]["m_out"], 9);
}

#[test]
fn distort_path_example() {
    let dir = Scratch::new();
    let g = dir.write(
        "g.json",
        r#"{"format":"treegrade-graph","version":1,"vertex_count":9,"edges":[[0,1],[1,2],[2,3],[3,4],[4,5],[5,6],[6,7],[7,8]]}"#,
    );
    let p = dir.write(
        "p.json",
        r#"{"format":"treegrade-pieces","version":1,"base_piece":0,"pieces":[[0,1,2,3,4],[4,5,6,7,8]],"constant":1}"#,
    );
    let out = run(&["distort", "--input", s(&g), "--pieces", s(&p), "--no-cut-check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["lipschitz_violations"], 0);
    assert_eq!(r["bound_satisfied"], true);
    // vertex 0 is private to the base piece and serves as e; a copy of 8
    // sits at 4 + 4 + 8 from its other copy
    assert_eq!(r["max_excess"], 16);
    let text = run(&["distort", "--input", s(&g), "--pieces", s(&p), "--no-cut-check", "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("max excess"));
}

#[test]
fn embed_tree_pieces_isometrically() {
    let dir = Scratch::new();
    let spec = r#"{"family":"tree_of_pieces","pieces":4,"template":"path","min_size":3,"max_size":6,"depth":null,"seed":1}"#;
    let (g, p) = generate(&dir, spec, true);
    let dot = dir.path("coords.dot");
    let out = run(&["embed", "--input", s(&g), "--pieces", s(&p), "--no-cut-check", "--dot", s(&dot)]);
    let r = json(&out);
    assert_eq!(r["coordinates"], 1);
    assert_eq!(r["lipschitz_violations"], 0);
    assert_eq!(r["max_violations"], 0);
    for d in r["piece_distortion"].as_array().unwrap() {
        assert_eq!(d[0].as_f64(), Some(1.0));
        assert_eq!(d[1].as_f64(), Some(1.0));
    }
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(dot).unwrap().starts_with("graph coordinate_0 {"));
}

#[test]
fn bp_on_long_cycle_fails() {
    let dir = Scratch::new();
    let n = 40;
    let edges: Vec<String> = (0..n).map(|i| format!("[{i},{}]", (i + 1) % n)).collect();
    let g = dir.write(
        "c.json",
        &format!(r#"{{"format":"treegrade-graph","version":1,"vertex_count":{n},"edges":[{}]}}"#, edges.join(",")),
    );
    let out = run(&["bp", "--input", s(&g), "--delta", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pairs_checked"], 780);
    assert_eq!(r["failures"], 780 - 3 * 40);
}

#[test]
fn gen_round_trips_through_files() {
    let dir = Scratch::new();
    let spec = dir.write("spec.json", r#"{"family":"random_tree_graded","pieces":5,"min_size":3,"max_size":6,"max_arc":3,"seed":9}"#);
    let arg = format!("@{}", s(&spec));
    let first = run(&["gen", "--spec", &arg]);
    let second = run(&["gen", "--spec", &arg]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let t = dir.write("t.json", std::str::from_utf8(&first.stdout).unwrap());
    let out = run(&["embed", "--tree-graded", s(&t)]);
    assert!(matches!(out.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["lipschitz_violations"], 0);
    assert_eq!(r["sum_violations"], 0);

    let (g, p) = generate(&dir, r#"{"family":"subdivision","k":2,"base":{"family":"cycle_chain","count":3,"length":5}}"#, false);
    let graph: Value = serde_json::from_str(&std::fs::read_to_string(g).unwrap()).unwrap();
    assert_eq!(graph["vertex_count"], 3 * 4 + 1 + 3 * 5);
    let pieces: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(pieces["pieces"].as_array().unwrap().len(), 3);
}
