use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn stoneforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stoneforge"))
        .args(args)
        .env_remove("STONEFORGE_MAX_BRUTE")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn check<'a>(r: &'a Value, id: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap_or_else(|| panic!("no check {id}"))
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(stoneforge(&[]).status.code(), Some(2));
    assert_eq!(stoneforge(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(stoneforge(&["star-sweep", "--max-depth", "deep"]).status.code(), Some(2));
    assert_eq!(stoneforge(&["--help"]).status.code(), Some(0));
}

#[test]
fn kernel_check_on_files() {
    let dir = TempDir::new().unwrap();
    let zero = write(&dir, "zero.json", r#"[{"U":["0","01"],"V":[]}]"#);
    let out = stoneforge(&["kernel-check", "--dnf", zero.to_str().unwrap(), "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check(&r, "decision")["detail"]["zero"], true);
    assert_eq!(check(&r, "oracle-agrees")["passed"], true);

    let term = write(
        &dir,
        "term.json",
        r#"{"op":"meet","args":[{"op":"var","id":"0"},{"op":"not","args":[{"op":"var","id":"1"}]}]}"#,
    );
    let out = stoneforge(&["kernel-check", "--dnf", term.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check(&r, "decision")["detail"]["zero"], false);
    assert_eq!(check(&r, "decision")["detail"]["witness"], serde_json::json!(["0"]));
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "[{\"U\": [\"0\"");
    let out = stoneforge(&["kernel-check", "--dnf", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let node = write(&dir, "node.json", r#"[{"U":["012"],"V":[]}]"#);
    assert_eq!(stoneforge(&["kernel-check", "--dnf", node.to_str().unwrap()]).status.code(), Some(2));

    let missing = dir.path().join("absent.json");
    assert_eq!(stoneforge(&["kernel-check", "--dnf", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn brute_bound_from_environment() {
    let dir = TempDir::new().unwrap();
    let d = write(&dir, "d.json", r#"[{"U":["0","1","00"],"V":["11"]}]"#);
    let run = |bound: &str| {
        Command::new(env!("CARGO_BIN_EXE_stoneforge"))
            .args(["kernel-check", "--dnf", d.to_str().unwrap(), "--oracle"])
            .env("STONEFORGE_MAX_BRUTE", bound)
            .output()
            .unwrap()
    };
    assert_eq!(run("4").status.code(), Some(0));
    assert_eq!(run("3").status.code(), Some(2));
    assert_eq!(run("lots").status.code(), Some(2));
}

#[test]
fn star_sweep_small() {
    let out = stoneforge(&["star-sweep", "--max-depth", "2", "--max-size", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["campaign"], "star-sweep");
    // depths 1 and 2 below the root, plus 2 + 2 below the depth-1 nodes
    assert_eq!(check(&r, "proper-prefix-pairs-vanish")["detail"]["pairs"], 10);
}

#[test]
fn independence_on_files() {
    let dir = TempDir::new().unwrap();
    let branches = write(
        &dir,
        "branches.json",
        r#"[{"prefix":"","period":"0"},{"prefix":"","period":"1"},{"prefix":"010","period":"01","selected":{"start":2,"step":2}}]"#,
    );
    let split = write(&dir, "f.json", "[0, 2]");
    let out = stoneforge(&["independence", "--branches", branches.to_str().unwrap(), "--split", split.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let detail = &check(&r, "split-101")["detail"];
    assert_eq!(detail["verified"], true);
    assert!(detail["witness"].is_array() && detail["depths"].is_array() && detail["checks"].is_object());

    let out = stoneforge(&["independence", "--branches", branches.to_str().unwrap(), "--all-splits"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["checks"].as_array().unwrap().len(), 8);

    let same = write(&dir, "same.json", r#"[{"prefix":"","period":"01"},{"prefix":"01","period":"01"}]"#);
    let out = stoneforge(&["independence", "--branches", same.to_str().unwrap(), "--all-splits"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn grothendieck_on_files() {
    let dir = TempDir::new().unwrap();
    let fam = write(&dir, "fam.json", r#""pair-difference""#);
    let singles = write(&dir, "ac.json", r#"{"blocks":{"start":0,"stride":2,"width":1}}"#);
    let args = |ac: &PathBuf| {
        stoneforge(&[
            "grothendieck",
            "--family",
            fam.to_str().unwrap(),
            "--antichain",
            ac.to_str().unwrap(),
            "--epsilon",
            "1/2",
            "--horizon",
            "10",
        ])
    };
    let out = args(&singles);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(check(&r, "alternation")["detail"]["lower"], "1/3");

    // μ_n(A_n) = 0 for the pairs {2n, 2n+1}: a violation, reported with exit 1
    let pairs = write(&dir, "pairs.json", r#"{"blocks":{"start":0,"stride":2,"width":2}}"#);
    let out = args(&pairs);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(check(&report(&out), "thinning")["passed"], false);

    let explicit = write(&dir, "explicit.json", r#"{"explicit":[{"atoms":[[0,1,1]]},{"atoms":[[2,-1,1]]},{"atoms":[[4,3,2]]}]}"#);
    let out = stoneforge(&[
        "grothendieck", "--family", explicit.to_str().unwrap(), "--antichain", singles.to_str().unwrap(), "--horizon", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = stoneforge(&[
        "grothendieck", "--family", explicit.to_str().unwrap(), "--antichain", singles.to_str().unwrap(), "--horizon", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn human_output_and_timing() {
    let out = stoneforge(&["ep-laws", "--triples", "50", "--memberships", "100", "--pairs", "50", "--human"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS") && text.contains("all checks passed"));

    let out = stoneforge(&["ep-laws", "--triples", "5", "--memberships", "10", "--pairs", "5", "--timing"]);
    assert!(report(&out)["runtime_ms"].is_u64());
    let out = stoneforge(&["ep-laws", "--triples", "5", "--memberships", "10", "--pairs", "5"]);
    assert!(report(&out).get("runtime_ms").is_none());
}

#[test]
fn seed_changes_digest_only_through_inputs() {
    let a = stoneforge(&["ep-laws", "--triples", "20", "--memberships", "20", "--pairs", "20", "--seed", "7"]);
    let b = stoneforge(&["ep-laws", "--triples", "20", "--memberships", "20", "--pairs", "20", "--seed", "7"]);
    let c = stoneforge(&["ep-laws", "--triples", "20", "--memberships", "20", "--pairs", "20", "--seed", "8"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(report(&a)["inputs_digest"], report(&c)["inputs_digest"]);
}
