use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn domus(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domus")).current_dir(dir).args(args).output().unwrap()
}

fn example(name: &str) -> String {
    examples().join(name).to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn build_then_complexity() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(dir.path(), &["build", &example("row3.cvm"), "--dims", "4", "1", "1", "-o", "row.vox.txt"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("row.vox.txt")).unwrap();
    assert_eq!(text, "DIMS 4 1 1\nLAYER 0\n###.\n");

    let out = domus(dir.path(), &["complexity", "row.vox.txt"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["length"], 10);
    assert_eq!(v["cells"], 3);
    assert_eq!(v["program_text"], "FILL 3 1 1");
}

#[test]
fn missing_program() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(dir.path(), &["build", "missing.cvm"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.cvm"));
}

#[test]
fn render_small_worlds() {
    let dir = tempfile::tempdir().unwrap();
    for (text, expect) in [
        ("DIMS 1 1 1\nLAYER 0\n.", "DIMS 1 1 1\nLAYER 0\n.\n"),
        ("DIMS 1 1 1\nLAYER 0\n#", "DIMS 1 1 1\nLAYER 0\n#\n"),
        ("DIMS 2 1 1\nLAYER 0\n##", "DIMS 2 1 1\nLAYER 0\n##\n"),
    ] {
        std::fs::write(dir.path().join("s.vox.txt"), text).unwrap();
        let out = domus(dir.path(), &["render", "s.vox.txt"]);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), expect);
    }
}

#[test]
fn corpus_builds_at_default_dims() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["row3", "slab4", "pillar", "bridge", "sierpinski2", "sierpinski3", "sierpinski4"] {
        let out = domus(dir.path(), &["build", &example(&format!("{name}.cvm"))]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        // The carpet of depth 4 is 81 wide, so the world grows past 64.
        let first = String::from_utf8(out.stdout).unwrap().lines().next().unwrap().to_string();
        let expect = if name == "sierpinski4" { "DIMS 81 81 64" } else { "DIMS 64 64 64" };
        assert_eq!(first, expect);
    }
}

#[test]
fn natural_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(dir.path(), &["natural", &example("slab4.cvm"), "--dims", "4", "4", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["label"], "Artificial");
    let out = domus(dir.path(), &["natural", &example("slab4.cvm"), "--dims", "4", "4", "1", "--threshold", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn beauty_report_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(dir.path(), &["beauty", &example("row3.cvm"), "--dims", "4", "1", "1", "--dict", &example("brick.pat")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["D", "N", "r", "score", "placements", "residual_cells"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    // Stamps may overlap, so two bricks explain the row.
    assert_eq!(v["residual_cells"], 0);
    assert_eq!(v["placements"].as_array().unwrap().len(), 2);
    assert_eq!(v["N"], 1);
}

#[test]
fn optimize_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(
        dir.path(),
        &[
            "optimize",
            "--dict",
            &example("brick.pat"),
            "--constraints",
            &example("constraints.json"),
            "--dims",
            "8",
            "8",
            "8",
            "--seed",
            "7",
            "--iters",
            "300",
            "-o",
            "run",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["objective"], 0.0);
    let trace = std::fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 301);
    assert!(trace.starts_with("iter,objective,accepted,best\n"));
    let best = dir.path().join("run/best.cvm");
    let out = domus(dir.path(), &["build", best.to_str().unwrap(), "--dims", "8", "8", "8"]);
    assert_eq!(out.stdout, std::fs::read(dir.path().join("run/best.vox.txt")).unwrap());
}

#[test]
fn attack_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(dir.path(), &["attack", &example("bridge.cvm"), "--fleet", "10", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["transfer_rate"], 1.0);
    assert_eq!(v["report"]["distinct_structures"], 1);
    assert_eq!(v["attack"]["removed_cells"].as_array().unwrap().len(), 2);
}

#[test]
fn placement_budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let slab = example("slab4.cvm");
    let out = Command::new(env!("CARGO_BIN_EXE_domus"))
        .current_dir(dir.path())
        .env("DOMUS_MAX_PLACEMENTS", "10")
        .args(["build", &slab])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_domus"))
        .current_dir(dir.path())
        .env("DOMUS_MAX_PLACEMENTS", "lots")
        .args(["build", &slab])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = domus(dir.path(), &["complexity", &example("row3.cvm"), "--dims", "3", "1", "1", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "length: 10"), "{text}");
}
