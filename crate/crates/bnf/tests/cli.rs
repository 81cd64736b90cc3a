use bnf::cli::{run, RunManifest};
use std::path::{Path, PathBuf};

fn data(p: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(p).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("bnf-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn bnf(args: &[&str]) -> i32 {
    let argv: Vec<String> = std::iter::once("bnf").chain(args.iter().copied()).map(String::from).collect();
    run(&argv)
}

/// Runs once with `--out`, replays the manifest, and compares artifacts.
fn replay_identical(name: &str, args: &[&str]) -> i32 {
    let d = scratch(name);
    let (a, b) = (d.join("a"), d.join("b"));
    let mut first = vec!["--out", a.to_str().unwrap()];
    first.extend_from_slice(args);
    let code = bnf(&first);
    let manifest = a.join("manifest.json");
    let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m.subcommand, args[0]);
    assert_eq!(bnf(&["--from-manifest", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]), code);
    for f in ["report.txt", "result.json", "manifest.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{name}: {f} differs");
    }
    code
}

#[test]
fn bouquet_empty_tapes_passes() {
    assert_eq!(replay_identical("bouquet", &["bouquet", "--tapes", &data("tapes/empty.json"), "--horizon", "5", "--check"]), 0);
}

#[test]
fn every_subcommand_replays() {
    let corpus = data("structs/corpus.json");
    assert_eq!(replay_identical("bf", &["bf", "--structs", &corpus, "--level", "2", "--tuples", "1"]), 0);
    assert_eq!(replay_identical("bf-reps", &["bf", "--structs", &corpus, "--level", "1", "--ext", "representatives"]), 0);
    assert_eq!(replay_identical("type", &["synth", "type", "--structs", &corpus, "--n", "2", "--tuple", "0", "--index", "2"]), 0);
    assert_eq!(replay_identical("sep", &["synth", "sep", "--structs", &data("structs/pair.json"), "--n", "1"]), 0);
    assert_eq!(replay_identical("scott", &["synth", "scott", "--structs", &corpus, "--n", "1", "--index", "3"]), 0);
    let (g, p) = (data("graphs/path3.json"), data("packs/desk.json"));
    assert_eq!(replay_identical("inv", &["inv", "--graph", &g, "--pack", &p]), 0);
    assert_eq!(replay_identical("decode", &["inv", "--graph", &data("graphs/path3-star.json"), "--pack", &p, "--decode"]), 0);
    let phi = data("formulas/isolated-vertex.sexp");
    assert_eq!(replay_identical("transform", &["inv", "--graph", &g, "--pack", &p, "--transform", &phi]), 0);
    let sp = ["spectrum", "--k", "1", "--x", &data("spectrum/x.json"), "--wk", &data("spectrum/wk.json"), "--horizon", "4", "--check"];
    assert_eq!(replay_identical("spectrum", &sp), 0);
    assert_eq!(replay_identical("verify", &["verify", "--suite", "bouquet", "--seed", "3"]), 0);
}

#[test]
fn verify_writes_junit() {
    let d = scratch("junit");
    let j = d.join("report.xml");
    assert_eq!(bnf(&["verify", "--suite", "spectrum", "--junit", j.to_str().unwrap()]), 0);
    let xml = std::fs::read_to_string(j).unwrap();
    assert!(xml.starts_with("<?xml") && xml.contains("failures=\"0\""));
}

#[test]
fn verify_grid_quick_passes() {
    assert_eq!(bnf(&["verify", "--suite", "grid"]), 0);
}

#[test]
fn input_errors_exit_two() {
    let d = scratch("bad");
    let bad = d.join("bad.json");
    std::fs::write(&bad, r#"{"tapes":[{"i":"zero","j":0}]}"#).unwrap();
    assert_eq!(bnf(&["bouquet", "--tapes", bad.to_str().unwrap(), "--horizon", "5"]), 2);
    std::fs::write(&bad, "{\"tapes\": [").unwrap();
    assert_eq!(bnf(&["bouquet", "--tapes", bad.to_str().unwrap(), "--horizon", "5"]), 2);
    assert_eq!(bnf(&["bouquet", "--tapes", "/nonexistent.json", "--horizon", "5"]), 2);
    assert_eq!(bnf(&["frobnicate"]), 2);
    let x = d.join("x.json");
    std::fs::write(&x, "[1]").unwrap();
    let wk = d.join("wk.json");
    std::fs::write(&wk, r#"{"tapes":[{"i":0,"j":0,"events":[[1,1]]}]}"#).unwrap();
    assert_eq!(bnf(&["spectrum", "--k", "0", "--x", x.to_str().unwrap(), "--wk", wk.to_str().unwrap(), "--horizon", "5"]), 2);
}

#[test]
fn tampered_manifest_inputs_rejected() {
    let d = scratch("tamper");
    let tapes = d.join("t.json");
    std::fs::write(&tapes, r#"{"tapes":[]}"#).unwrap();
    let out = d.join("o");
    assert_eq!(bnf(&["--out", out.to_str().unwrap(), "bouquet", "--tapes", tapes.to_str().unwrap(), "--horizon", "3"]), 0);
    std::fs::write(&tapes, r#"{"tapes":[{"i":0,"j":0}]}"#).unwrap();
    assert_eq!(bnf(&["--from-manifest", out.join("manifest.json").to_str().unwrap()]), 2);
}

#[test]
fn resource_cap_exits_two() {
    std::env::set_var("BNF_MAX_CELLS", "3");
    let code = bnf(&["bf", "--structs", &data("structs/corpus.json"), "--level", "1"]);
    std::env::remove_var("BNF_MAX_CELLS");
    assert_eq!(code, 2);
}

#[test]
fn claim_failure_exits_one() {
    let d = scratch("claims");
    let s = d.join("twins.json");
    let corpus: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(data("structs/corpus.json")).unwrap()).unwrap();
    let one = corpus["structures"][2].clone();
    std::fs::write(&s, serde_json::json!({ "structures": [one.clone(), one] }).to_string()).unwrap();
    assert_eq!(bnf(&["synth", "sep", "--structs", s.to_str().unwrap(), "--n", "1"]), 1);
}
