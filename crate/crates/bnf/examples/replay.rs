//! Runs a CLI subcommand, then replays its manifest and compares artifacts.
//!
//! Run with `cargo run --example replay`.

use bnf::suites::{run_inv, SuiteResult};

fn bnf(args: &[&str]) -> i32 {
    let argv: Vec<String> = std::iter::once("bnf").chain(args.iter().copied()).map(String::from).collect();
    bnf::cli::run(&argv)
}

fn main() {
    let suite: SuiteResult = run_inv(0);
    for c in &suite.cases {
        println!("{} {}: {}", if c.pass { "ok" } else { "FAIL" }, c.name, c.detail);
    }

    let dir = std::env::temp_dir().join(format!("bnf-replay-example-{}", std::process::id()));
    let (a, b) = (dir.join("first"), dir.join("replay"));
    let (a_s, b_s) = (a.display().to_string(), b.display().to_string());
    let code = bnf(&["--out", &a_s, "verify", "--suite", "bouquet", "--seed", "5"]);
    let manifest = a.join("manifest.json").display().to_string();
    let again = bnf(&["--from-manifest", &manifest, "--out", &b_s]);
    println!("exit codes {code} and {again}");
    for f in ["report.txt", "result.json", "manifest.json"] {
        let same = std::fs::read(a.join(f)).ok() == std::fs::read(b.join(f)).ok();
        println!("{f}: {}", if same { "identical" } else { "DIFFERENT" });
    }
    let _ = std::fs::remove_dir_all(&dir);
}
