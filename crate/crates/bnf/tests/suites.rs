use bnf::suites::*;
use std::time::Instant;

fn show(s: &SuiteResult) {
    for c in &s.cases {
        eprintln!("{} {} {}: {}", s.suite, if c.pass { "ok" } else { "FAIL" }, c.name, c.detail);
    }
}

#[test]
fn quick_suites_pass() {
    for (name, f) in [
        ("grid", Box::new(|| run_grid(Scale::Quick)) as Box<dyn Fn() -> SuiteResult>),
        ("bouquet", Box::new(run_bouquet)),
        ("inv", Box::new(|| run_inv(0))),
        ("spectrum", Box::new(run_spectrum)),
    ] {
        let t = Instant::now();
        let s = f();
        show(&s);
        eprintln!("{name} in {:?}", t.elapsed());
        assert!(s.pass(), "{name}");
    }
}

#[test]
fn junit_report_counts_failures() {
    let s = SuiteResult {
        suite: "x".into(),
        cases: vec![CaseResult::new("a", true, "fine"), CaseResult::new("b<", false, "bad & worse")],
    };
    let xml = junit(&[s]);
    assert!(xml.contains("tests=\"2\" failures=\"1\""));
    assert!(xml.contains("b&lt;") && xml.contains("bad &amp; worse"));
}
