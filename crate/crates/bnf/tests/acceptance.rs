//! One PASS/FAIL line per acceptance criterion. Runs serially at full scale.

use bnf::jumpinv::{Pack, SOracle};
use bnf::structures::TruncationParams;
use bnf::suites::*;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn merge(cases: Vec<CaseResult>) -> Outcome {
    let pass = cases.iter().all(|c| c.pass);
    let detail = cases
        .iter()
        .map(|c| format!("{}{}: {}", if c.pass { "" } else { "FAILED " }, c.name, c.detail))
        .collect::<Vec<_>>()
        .join(" | ");
    Outcome { pass, detail }
}

fn data(p: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(p).display().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("bnf-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

/// Runs the built binary with captured output.
fn bnf(args: &[&str]) -> i32 {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_bnf")).args(args).output().expect("bnf binary runs");
    out.status.code().unwrap_or(-1)
}

fn replay(name: &str, args: &[&str]) -> CaseResult {
    let d = scratch(name);
    let (a, b) = (d.join("a"), d.join("b"));
    let (a_s, b_s) = (a.display().to_string(), b.display().to_string());
    let mut first = vec!["--out", a_s.as_str()];
    first.extend_from_slice(args);
    let code = bnf(&first);
    let manifest = a.join("manifest.json").display().to_string();
    let again = bnf(&["--from-manifest", &manifest, "--out", &b_s]);
    if code != again {
        return CaseResult::new(name, false, format!("exit {code} then {again}"));
    }
    for f in ["report.txt", "result.json", "manifest.json"] {
        match (std::fs::read(a.join(f)), std::fs::read(b.join(f))) {
            (Ok(x), Ok(y)) if x == y => {}
            _ => return CaseResult::new(name, false, format!("{f} differs")),
        }
    }
    let _ = std::fs::remove_dir_all(&d);
    CaseResult::new(name, true, format!("exit {code}"))
}

fn cli_replay() -> Vec<CaseResult> {
    let corpus = data("structs/corpus.json");
    let (g, p) = (data("graphs/path3.json"), data("packs/desk.json"));
    let (star, phi) = (data("graphs/path3-star.json"), data("formulas/triangle.sexp"));
    let (x, wk, tapes) = (data("spectrum/x.json"), data("spectrum/wk.json"), data("tapes/family03.json"));
    vec![
        replay("bf", &["bf", "--structs", &corpus, "--level", "2", "--tuples", "1"]),
        replay("synth-type", &["synth", "type", "--structs", &corpus, "--n", "2", "--tuple", "0", "--index", "2"]),
        replay("synth-sep", &["synth", "sep", "--structs", &data("structs/pair.json"), "--n", "1"]),
        replay("synth-scott", &["synth", "scott", "--structs", &corpus, "--n", "1", "--index", "3"]),
        replay("bouquet", &["bouquet", "--tapes", &tapes, "--horizon", "50", "--check"]),
        replay("inv", &["inv", "--graph", &g, "--pack", &p]),
        replay("inv-decode", &["inv", "--graph", &star, "--pack", &p, "--decode"]),
        replay("inv-transform", &["inv", "--graph", &g, "--pack", &p, "--transform", &phi]),
        replay("spectrum", &["spectrum", "--k", "1", "--x", &x, "--wk", &wk, "--horizon", "4", "--check"]),
        replay("verify", &["verify", "--suite", "inv", "--seed", "7"]),
    ]
}

fn main() {
    let full = grid_config(Scale::Full);
    let corpus = formula_corpus();
    let params = TruncationParams::default();
    let min = |m: u64| Duration::from_secs(60 * m);
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let criteria: Vec<(u32, &str, Duration, Check)> = vec![
        (1, "decision procedure agrees with the reference recursion", min(5), Box::new(|| merge(vec![oracle_agreement(&full)]))),
        (2, "Karp transfer in both directions", min(10), Box::new(|| merge(vec![karp(&full)]))),
        (3, "type formulas evaluate like bf and sit in Pi_n", min(10), Box::new(|| merge(vec![type_formulas(&corpus, 3)]))),
        (4, "separating and Scott synthesis", min(10), Box::new(|| merge(vec![separating(&corpus, 2), scott(&corpus, 20, 0)]))),
        (5, "bouquet claims on ten tape families", min(10), Box::new(|| merge(bouquet_claims(&params)))),
        (6, "jump inversion", min(10), Box::new(|| {
            let pack = Pack::desk().expect("shipped pack");
            merge(vec![inv_functoriality(&pack, 4), inv_round_trip(&pack, 50, 6, 0), inv_battery(&pack, 50, 6, 0)])
        })),
        (7, "spectrum sorts on five (X, Wk) pairs", min(5), Box::new(|| {
            let (pack, oracle) = (Pack::desk_predicate().unwrap(), SOracle::desk_predicate().unwrap());
            merge(spectrum_pairs().iter().map(|i| spectrum_case(i, &pack, &oracle)).collect())
        })),
        (8, "standard picture through three routes", min(5), Box::new(|| {
            let (pack, oracle) = (Pack::desk_predicate().unwrap(), SOracle::desk_predicate().unwrap());
            merge(vec![figure_one(&pack, &oracle)])
        })),
        (9, "unfriendly structure matches its table", min(10), Box::new(|| {
            merge(vec![unfriendly(&SOracle::desk_predicate().unwrap(), 2)])
        })),
        (10, "CLI manifest replay is byte-identical", min(10), Box::new(|| merge(cli_replay()))),
    ];
    let mut failed = 0;
    for (n, what, budget, check) in criteria {
        let t = Instant::now();
        let out = check();
        let took = t.elapsed();
        let in_budget = took <= budget;
        let pass = out.pass && in_budget;
        if !pass {
            failed += 1;
        }
        let over = if in_budget { String::new() } else { format!(" OVER BUDGET {budget:?}") };
        println!(
            "criterion {n:>2} {}: {what} ({:.1}s{over}) [{}]",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            out.detail
        );
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
