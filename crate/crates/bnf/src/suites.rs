//! Named verification cases shared by `bnf verify`, the acceptance target
//! and the examples. Case details are deterministic so reports can be
//! compared byte for byte.

use crate::backforth::{for_each_tuple, BfConfig, BfQuery, BfTable};
use crate::bouquet::{self, EnumTape, TapeFile};
use crate::error::{BnfError, Result};
use crate::formulas::{evaluate, synth_scott, synth_separating, Evaluator, TypeSynth};
use crate::jumpinv::{self, decode, inv, transform_sentence, DecodeRoute, Pack, Polarity, SOracle};
use crate::spectrum::{self, Set, SortInput, UnfriendlyIndices, WitnessSchedule};
use crate::structures::{ExtMode, FiniteStructure, TruncationParams};
use crate::symmetry::isomorphism;
use crate::verify::{self, iso, GridConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    /// Reduced grid, every other suite unchanged.
    Quick,
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CaseResult {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CaseResult { name: name.into(), pass, detail: detail.into() }
    }

    /// Errors become failing cases rather than aborting the suite.
    pub fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((pass, detail)) => CaseResult::new(name, pass, detail),
            Err(e) => CaseResult::new(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }
}

pub fn grid_config(scale: Scale) -> GridConfig {
    match scale {
        Scale::Full => GridConfig::default(),
        Scale::Quick => GridConfig { simple_max: 2, directed_max: 2, ..GridConfig::default() },
    }
}

fn grid_table(structs: &[FiniteStructure]) -> Result<BfTable> {
    BfTable::with_structures(structs.iter().cloned(), BfConfig { max_cells: None, ..BfConfig::default() })
}

/// Decision procedure against the unrestricted reference recursion.
pub fn oracle_agreement(cfg: &GridConfig) -> CaseResult {
    CaseResult::from_result("oracle-agreement", (|| {
        let structs = verify::grid_structures(cfg);
        let table = grid_table(&structs)?;
        let rep = verify::oracle_agreement(&table, &structs, cfg)?;
        Ok((
            rep.pass(),
            format!(
                "{} structures, {} queries, {} disagreements{}",
                rep.structures,
                rep.queries,
                rep.disagreements,
                rep.examples.first().map(|e| format!("; first: {e}")).unwrap_or_default()
            ),
        ))
    })())
}

/// Π and Σ transfer at every level up to `cfg.max_level`.
pub fn karp(cfg: &GridConfig) -> CaseResult {
    CaseResult::from_result("karp-transfer", (|| {
        let structs = verify::grid_structures(cfg);
        let table = grid_table(&structs)?;
        let mut pass = true;
        let mut parts = Vec::new();
        for level in 0..=cfg.max_level {
            let rep = verify::karp_transfer(&table, &structs, level)?;
            pass &= rep.pass();
            parts.push(format!(
                "level {level}: {} pairs, {} Pi / {} Sigma sentences, {} + {} failures",
                rep.pairs, rep.pi_sentences, rep.sigma_sentences, rep.pi_failures, rep.sigma_failures
            ));
        }
        Ok((pass, parts.join("; ")))
    })())
}

/// Five small structures over `{P/1, E/2}`, including the empty one.
pub fn formula_corpus() -> Vec<FiniteStructure> {
    let s = verify::grid_signature();
    let mk = |n, named: &[(&str, Vec<Vec<u32>>)]| FiniteStructure::from_named(s.clone(), n, named).expect("static corpus");
    vec![
        mk(0, &[]),
        mk(1, &[("P", vec![vec![0]])]),
        mk(3, &[("P", vec![vec![0]]), ("E", vec![vec![0, 1], vec![1, 2]])]),
        mk(3, &[("E", vec![vec![0, 1], vec![1, 2], vec![2, 0]])]),
        mk(4, &[("P", vec![vec![1]]), ("E", vec![vec![0, 1], vec![1, 0], vec![2, 3], vec![3, 2]])]),
    ]
}

fn all_tuples(n: usize, len: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for_each_tuple(n, len, |t| out.push(t.to_vec()));
    out
}

/// `φ^n_{i,a}` holds at `(S_j, b)` exactly when `(S_i, a) <=_n (S_j, b)`,
/// and it lies in Π_n. Tuples of length 0 and 1, levels `1..=max_level`.
pub fn type_formulas(corpus: &[FiniteStructure], max_level: usize) -> CaseResult {
    CaseResult::from_result("type-formulas", (|| {
        let mut ts = TypeSynth::new(corpus.to_vec())?;
        let table = BfTable::with_structures(
            corpus.iter().cloned(),
            BfConfig { max_cells: None, ..BfConfig::default().with_mode(ExtMode::FullDomain) },
        )?;
        let mut checked = 0u64;
        for n in 1..=max_level {
            for i in 0..corpus.len() {
                for len in 0..=1 {
                    for a in all_tuples(corpus[i].domain_size(), len) {
                        let phi = ts.type_formula(i, &a, n)?;
                        if !phi.rank().in_pi(n) {
                            return Ok((false, format!("formula of (S{i}, {a:?}) at level {n} has rank {}", phi.rank())));
                        }
                        for (j, s) in corpus.iter().enumerate() {
                            let mut ev = Evaluator::new(s);
                            for b in all_tuples(s.domain_size(), len) {
                                let want = table.leq(&BfQuery::new(i, a.clone(), j, b.clone(), n))?;
                                checked += 1;
                                if ev.eval(&phi, &b)? != want {
                                    return Ok((false, format!("(S{i}, {a:?}) vs (S{j}, {b:?}) at level {n}")));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok((true, format!("{checked} evaluations agree with the relation, levels 1..={max_level}")))
    })())
}

/// A separating sentence exists exactly when the relation fails, and it is
/// a Π_n sentence true in the first structure and false in the second.
pub fn separating(corpus: &[FiniteStructure], max_level: usize) -> CaseResult {
    CaseResult::from_result("synth-separating", (|| {
        let mut found = 0;
        let mut none = 0;
        for n in 1..=max_level {
            for (ia, a) in corpus.iter().enumerate() {
                for (ib, b) in corpus.iter().enumerate() {
                    let table = grid_table(&[a.clone(), b.clone()])?;
                    let leq = table.leq_structures(0, 1, n)?;
                    match synth_separating(a, b, n) {
                        Ok(f) => {
                            let ok = !leq && f.rank().in_pi(n) && evaluate(&f, a, &[])? && !evaluate(&f, b, &[])?;
                            if !ok {
                                return Ok((false, format!("S{ia} vs S{ib} at level {n}: sentence {f} is wrong")));
                            }
                            found += 1;
                        }
                        Err(BnfError::NotSeparable(_)) if leq => none += 1,
                        Err(e) => return Ok((false, format!("S{ia} vs S{ib} at level {n}: {e}"))),
                    }
                }
            }
        }
        Ok((true, format!("{found} separated pairs, {none} related pairs correctly refused")))
    })())
}

/// Scott sentences at the least level that admits one: true on random
/// renumberings, false on non-isomorphic corpus members.
pub fn scott(corpus: &[FiniteStructure], renumberings: usize, seed: u64) -> CaseResult {
    CaseResult::from_result("synth-scott", (|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut parts = Vec::new();
        for (i, s) in corpus.iter().enumerate() {
            let (chi, lvl) = (1..=3)
                .find_map(|n| synth_scott(s, n).ok().map(|f| (f, n)))
                .ok_or_else(|| BnfError::NoScott(4, format!("S{i} has no Scott sentence up to level 4")))?;
            for _ in 0..renumberings {
                let mut perm: Vec<u32> = (0..s.domain_size() as u32).collect();
                perm.shuffle(&mut rng);
                if !evaluate(&chi, &s.renumber(&perm)?, &[])? {
                    return Ok((false, format!("S{i}: Scott sentence false on renumbering {perm:?}")));
                }
            }
            for (j, other) in corpus.iter().enumerate() {
                if evaluate(&chi, other, &[])? != iso(s, other).is_iso() {
                    return Ok((false, format!("S{i}: Scott sentence wrong on S{j}")));
                }
            }
            parts.push(format!("S{i}: {} at n={lvl}", chi.rank()));
        }
        Ok((true, parts.join(", ")))
    })())
}

const FAMILIES: [&str; 10] = [
    include_str!("../data/tapes/family01.json"),
    include_str!("../data/tapes/family02.json"),
    include_str!("../data/tapes/family03.json"),
    include_str!("../data/tapes/family04.json"),
    include_str!("../data/tapes/family05.json"),
    include_str!("../data/tapes/family06.json"),
    include_str!("../data/tapes/family07.json"),
    include_str!("../data/tapes/family08.json"),
    include_str!("../data/tapes/family09.json"),
    include_str!("../data/tapes/family10.json"),
];

/// The ten shipped tape families.
pub fn tape_families() -> Vec<Vec<EnumTape>> {
    FAMILIES
        .iter()
        .map(|s| serde_json::from_str::<TapeFile>(s).expect("shipped tape file parses").tapes)
        .collect()
}

/// Claims 1 through 4 plus the stage invariants on every family.
pub fn bouquet_claims(params: &TruncationParams) -> Vec<CaseResult> {
    tape_families()
        .iter()
        .enumerate()
        .map(|(k, tapes)| {
            let name = format!("family{:02}", k + 1);
            CaseResult::from_result(&name, (|| {
                let suite = bouquet::build(tapes, params.horizon, params)?;
                let rep = bouquet::check_claims(&suite, params)?;
                let failing: Vec<&str> = [
                    ("claim1", &rep.claim1),
                    ("claim2", &rep.claim2),
                    ("claim3", &rep.claim3),
                    ("claim4", &rep.claim4),
                    ("invariants", &rep.invariants),
                ]
                .iter()
                .filter(|(_, v)| !v.pass)
                .map(|(n, _)| *n)
                .collect();
                let detail = if failing.is_empty() {
                    format!("{} tapes, {} indices, separating rank {}", tapes.len(), rep.indices.len(), rep.separating_rank)
                } else {
                    format!("failing: {}", failing.join(", "))
                };
                Ok((rep.pass(), detail))
            })())
        })
        .collect()
}

/// `G ≅ H ⟺ inv(G) ≅ inv(H)` over all graphs on at most `max_n` vertices.
pub fn inv_functoriality(pack: &Pack, max_n: usize) -> CaseResult {
    CaseResult::from_result("functoriality", (|| {
        let gs = jumpinv::all_graphs(max_n);
        let stars: Vec<FiniteStructure> = gs.iter().map(|g| inv(g, pack).map(|s| s.structure)).collect::<Result<_>>()?;
        let mut pairs = 0u64;
        for i in 0..gs.len() {
            for j in i..gs.len() {
                pairs += 1;
                let l = gs[i].domain_size() == gs[j].domain_size() && isomorphism(&gs[i], &gs[j]).is_some();
                if l != iso(&stars[i], &stars[j]).is_iso() {
                    return Ok((false, format!("graphs {i} and {j}")));
                }
            }
        }
        Ok((true, format!("{} graphs, {pairs} pairs", gs.len())))
    })())
}

fn random_graphs(count: usize, max_n: usize, seed: u64) -> Vec<FiniteStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(0..=max_n);
            jumpinv::random_graph(&mut rng, n, 0.5)
        })
        .collect()
}

/// `decode ∘ inv = id` through both decoding routes.
pub fn inv_round_trip(pack: &Pack, count: usize, max_n: usize, seed: u64) -> CaseResult {
    CaseResult::from_result("round-trip", (|| {
        for (k, g) in random_graphs(count, max_n, seed).iter().enumerate() {
            let s = inv(g, pack)?;
            if decode(&s.structure, pack, DecodeRoute::Both)? != *g {
                return Ok((false, format!("graph {k} does not decode to itself")));
            }
        }
        Ok((true, format!("{count} random graphs on at most {max_n} vertices")))
    })())
}

/// `G ⊨ φ ⟺ inv(G) ⊨ φ*` for the ten-sentence battery, with the rank of
/// `φ*` at most `n` levels above that of `φ`.
pub fn inv_battery(pack: &Pack, count: usize, max_n: usize, seed: u64) -> CaseResult {
    CaseResult::from_result("transfer-battery", (|| {
        let gs = random_graphs(count, max_n, seed);
        let stars: Vec<FiniteStructure> = gs.iter().map(|g| inv(g, pack).map(|s| s.structure)).collect::<Result<_>>()?;
        let mut ranks = Vec::new();
        for (name, phi) in jumpinv::battery() {
            let star = transform_sentence(&phi, pack, Polarity::Auto)?;
            let (r, rs) = (phi.rank(), star.rank());
            if !rs.in_sigma(r.sigma + pack.n) {
                return Ok((false, format!("{name}: {r} became {rs}")));
            }
            for (k, (g, s)) in gs.iter().zip(&stars).enumerate() {
                if evaluate(&phi, g, &[])? != evaluate(&star, s, &[])? {
                    return Ok((false, format!("{name} on graph {k}")));
                }
            }
            ranks.push(format!("{name}: {r} -> {rs}"));
        }
        Ok((true, ranks.join(", ")))
    })())
}

/// Five `(X, W_k)` pairs used by the spectrum checks.
pub fn spectrum_pairs() -> Vec<SortInput> {
    let raw: [(&[u32], &[(u32, u64)]); 5] = [
        (&[2], &[]),
        (&[0, 2], &[(1, 0)]),
        (&[1, 3], &[(2, 1)]),
        (&[0, 1, 3], &[(1, 0), (3, 1)]),
        (&[2, 3], &[(1, 1), (2, 0)]),
    ];
    raw.iter()
        .enumerate()
        .map(|(k, (x, ev))| {
            let wk = EnumTape::finite(k as u32, 0, ev.to_vec());
            let x: Set = x.iter().copied().collect();
            let horizon = spectrum::stabilization_stage(&wk).max(x.len() as u32) + 1;
            SortInput { k: k as u32, x, wk, horizon, m: 2 }
        })
        .collect()
}

/// Laws, route agreement and both family containments for one input.
pub fn spectrum_case(input: &SortInput, pack: &Pack, oracle: &SOracle) -> CaseResult {
    let name = format!("sort-k{}", input.k);
    CaseResult::from_result(&name, (|| {
        let (sort, sched, trace) = spectrum::build_sort(input, oracle)?;
        let sw = spectrum::check_single_witness(&sched, &trace);
        let rt = spectrum::check_r_trace(&trace, &input.x);
        if !sw.pass || !rt.pass {
            return Ok((false, format!("{}; {}", sw.detail, rt.detail)));
        }
        let ex = spectrum::extract_agreeing(&sort, pack, &sched)?;
        let rep = spectrum::check_family(&ex.family(), &spectrum::w_final(&input.wk), input.m);
        let detail = format!(
            "{} points, {} coded sets, {} augmented, forbidden hit {:?}, missing {:?}",
            sort.points.len(),
            rep.extracted,
            rep.augmented.len(),
            rep.forbidden_hit,
            rep.missing
        );
        Ok((rep.pass, detail))
    })())
}

/// The standard picture: `¬R_1(x)`, `R_2(x)`, witness in the fourth `D_2` class.
pub fn figure_one(pack: &Pack, oracle: &SOracle) -> CaseResult {
    CaseResult::from_result("figure-one", (|| {
        let sched = WitnessSchedule::figure_one();
        let sort = spectrum::materialize_sort(&sched, oracle)?;
        let mut detail = Vec::new();
        for route in [spectrum::Route::Schedule, spectrum::Route::Isomorphism, spectrum::Route::Formula] {
            let ex = spectrum::extract_family(&sort, route, pack, Some(&sched))?;
            let (name, _) = &sort.points[0];
            let set = &ex.sets[name];
            let wit = ex.witnesses[name].get(&2).cloned().unwrap_or_default();
            if set.contains(&1) || !set.contains(&2) || wit != vec![3] {
                return Ok((false, format!("{route:?}: set {set:?}, D_2 witnesses {wit:?}")));
            }
            detail.push(format!("{route:?} ok"));
        }
        Ok((true, detail.join(", ")))
    })())
}

/// Four membership tables over `k < 8`.
pub fn unfriendly_tables() -> Vec<BTreeMap<u32, bool>> {
    vec![
        (0..8).map(|k| (k, k % 2 == 0)).collect(),
        (0..8).map(|k| (k, true)).collect(),
        (0..8).map(|k| (k, false)).collect(),
        (0..8).map(|k| (k, k == 3 || k == 5 || k == 6)).collect(),
    ]
}

/// `(M, a*) >=_1 (M, a_k) ⟺ U(k)` on every table.
pub fn unfriendly(oracle: &SOracle, labels: u32) -> CaseResult {
    CaseResult::from_result("unfriendly", (|| {
        for (t, table) in unfriendly_tables().iter().enumerate() {
            let ix = UnfriendlyIndices::from_table(table, labels, oracle)?;
            let m = spectrum::build_unfriendly(&ix, oracle)?;
            let v = spectrum::unfriendly_verdicts(&m, 1)?;
            if v != *table {
                return Ok((false, format!("table {t}: verdicts {v:?}")));
            }
        }
        Ok((true, format!("{} tables, {labels} labels", unfriendly_tables().len())))
    })())
}

pub fn run_grid(scale: Scale) -> SuiteResult {
    let cfg = grid_config(scale);
    let c = formula_corpus();
    SuiteResult {
        suite: "grid".into(),
        cases: vec![oracle_agreement(&cfg), karp(&cfg), type_formulas(&c, 3), separating(&c, 2), scott(&c, 20, 0)],
    }
}

pub fn run_bouquet() -> SuiteResult {
    SuiteResult { suite: "bouquet".into(), cases: bouquet_claims(&TruncationParams::default()) }
}

pub fn run_inv(seed: u64) -> SuiteResult {
    let cases = match Pack::desk() {
        Ok(p) => vec![inv_functoriality(&p, 4), inv_round_trip(&p, 50, 6, seed), inv_battery(&p, 50, 6, seed)],
        Err(e) => vec![CaseResult::new("pack", false, e.to_string())],
    };
    SuiteResult { suite: "inv".into(), cases }
}

pub fn run_spectrum() -> SuiteResult {
    let cases = match (Pack::desk_predicate(), SOracle::desk_predicate()) {
        (Ok(p), Ok(o)) => {
            let mut v: Vec<CaseResult> = spectrum_pairs().iter().map(|i| spectrum_case(i, &p, &o)).collect();
            v.push(figure_one(&p, &o));
            v.push(unfriendly(&o, 2));
            v
        }
        (Err(e), _) | (_, Err(e)) => vec![CaseResult::new("pack", false, e.to_string())],
    };
    SuiteResult { suite: "spectrum".into(), cases }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// JUnit-style XML, one `testsuite` per suite.
pub fn junit(suites: &[SuiteResult]) -> String {
    let total: usize = suites.iter().map(|s| s.cases.len()).sum();
    let failed: usize = suites.iter().flat_map(|s| &s.cases).filter(|c| !c.pass).count();
    let mut out = format!("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<testsuites tests=\"{total}\" failures=\"{failed}\">\n");
    for s in suites {
        let f = s.cases.iter().filter(|c| !c.pass).count();
        out.push_str(&format!("  <testsuite name=\"{}\" tests=\"{}\" failures=\"{f}\">\n", xml_escape(&s.suite), s.cases.len()));
        for c in &s.cases {
            let name = xml_escape(&c.name);
            let detail = xml_escape(&c.detail);
            if c.pass {
                out.push_str(&format!("    <testcase classname=\"{}\" name=\"{name}\">\n      <system-out>{detail}</system-out>\n    </testcase>\n", xml_escape(&s.suite)));
            } else {
                out.push_str(&format!("    <testcase classname=\"{}\" name=\"{name}\">\n      <failure message=\"{detail}\"/>\n    </testcase>\n", xml_escape(&s.suite)));
            }
        }
        out.push_str("  </testsuite>\n");
    }
    out.push_str("</testsuites>\n");
    out
}
