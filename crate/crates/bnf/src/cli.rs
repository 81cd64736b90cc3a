//! Command-line entry point. Every run can write `report.txt`,
//! `result.json` and `manifest.json`; replaying the manifest reproduces the
//! first two byte for byte.

use crate::backforth::{build_table, env_max_cells, BfConfig, BfTable};
use crate::bouquet::{self, TapeFile};
use crate::error::{BnfError, Result};
use crate::formulas::{
    evaluate, parse, synth_scott_report, synth_separating, to_sexp, Evaluator, Formula, TypeSynth,
};
use crate::jumpinv::{
    decode, inv, transform_sentence, DecodeRoute, Pack, PackFile, Polarity, SOracle, StarStructure,
};
use crate::spectrum::{self, SortInput};
use crate::structures::{ExtMode, FiniteStructure, TruncationParams};
use crate::suites::{self, Scale, SuiteResult};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "bnf", version, about = "Back-and-forth relations and the constructions built on them")]
pub struct Cli {
    /// Directory for report.txt, result.json and manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed for every randomized corpus.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Re-run the invocation recorded in a manifest.
    #[arg(long)]
    pub from_manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
pub struct TruncArgs {
    #[arg(long, default_value_t = 3)]
    pub copies: u32,
    #[arg(long, default_value_t = 32)]
    pub label_bound: u32,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Tabulate the back-and-forth relation on a structure file.
    Bf {
        #[arg(long)]
        structs: PathBuf,
        #[arg(long)]
        level: usize,
        /// Longest tuple length tabulated.
        #[arg(long, default_value_t = 0)]
        tuples: usize,
        #[arg(long, value_enum, default_value_t = ExtArg::FullDomain)]
        ext: ExtArg,
        #[command(flatten)]
        trunc: TruncArgs,
    },
    /// Synthesize a type formula, separating sentence or Scott sentence.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long)]
        structs: PathBuf,
        #[arg(long)]
        n: usize,
        /// Comma-separated tuple for `type`.
        #[arg(long, default_value = "")]
        tuple: String,
        /// Structure index (`type`, `scott`); `sep` separates the first two.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Build the staged structures of a tape file.
    Bouquet {
        #[arg(long)]
        tapes: PathBuf,
        #[arg(long)]
        horizon: u32,
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        trunc: TruncArgs,
    },
    /// Apply the jump inversion to a graph, decode a star structure, or
    /// transform a graph sentence.
    Inv {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        pack: PathBuf,
        /// Treat the input as a star structure and decode it.
        #[arg(long, conflicts_with = "transform")]
        decode: bool,
        /// Graph sentence in s-expression syntax.
        #[arg(long)]
        transform: Option<PathBuf>,
    },
    /// Build one sort and extract its coded family.
    Spectrum {
        #[arg(long)]
        k: u32,
        /// JSON array of naturals.
        #[arg(long)]
        x: PathBuf,
        /// Tape file; the tape with `i = k` is used.
        #[arg(long)]
        wk: PathBuf,
        #[arg(long)]
        horizon: u32,
        /// Points are built for every `F ⊆ [0, m)`.
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long)]
        check: bool,
        /// Write the R-trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a verification suite and write a JUnit report.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, value_enum, default_value_t = Scale::Quick)]
        scale: Scale,
        /// JUnit file; defaults to `junit.xml` under `--out`.
        #[arg(long)]
        junit: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtArg {
    Representatives,
    FullDomain,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    Type,
    Sep,
    Scott,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteArg {
    Grid,
    Bouquet,
    Inv,
    Spectrum,
    All,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    /// Arguments after the global options.
    pub args: Vec<String>,
    /// SHA-256 of every input file, keyed by the path as given.
    pub input_digests: BTreeMap<String, String>,
    pub params: TruncationParams,
    pub seed: u64,
}

/// What a subcommand produced.
pub struct Outcome {
    pub report: String,
    pub result: Value,
    /// False when a checked claim failed.
    pub ok: bool,
    pub params: TruncationParams,
    pub extra: Vec<(String, String)>,
}

struct Inputs {
    digests: BTreeMap<String, String>,
}

impl Inputs {
    fn bytes(&mut self, p: &Path) -> Result<Vec<u8>> {
        let key = p.display().to_string();
        let data = std::fs::read(p).map_err(|e| BnfError::Input { path: key.clone(), msg: e.to_string() })?;
        self.digests.insert(key, digest(&data));
        Ok(data)
    }

    fn json<T: DeserializeOwned>(&mut self, p: &Path) -> Result<T> {
        let data = self.bytes(p)?;
        let de = &mut serde_json::Deserializer::from_slice(&data);
        serde_path_to_error::deserialize(de).map_err(|e| BnfError::Input {
            path: format!("{}:{}", p.display(), e.path()),
            msg: e.inner().to_string(),
        })
    }

    fn text(&mut self, p: &Path) -> Result<String> {
        String::from_utf8(self.bytes(p)?).map_err(|e| BnfError::Input { path: p.display().to_string(), msg: e.to_string() })
    }
}

pub fn digest(data: &[u8]) -> String {
    Sha256::digest(data).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Deserialize)]
struct StructFile {
    structures: Vec<FiniteStructure>,
}

/// Exit code of an error: failed claims (including a refused separation or
/// Scott synthesis) are 1, everything else 2.
pub fn exit_code(e: &BnfError) -> i32 {
    match e {
        BnfError::Claim { .. } | BnfError::RouteDisagreement { .. } | BnfError::NotSeparable(_) | BnfError::NoScott(..) => 1,
        _ => 2,
    }
}

fn trunc(t: &TruncArgs, horizon: u32, ext: ExtMode) -> TruncationParams {
    TruncationParams { copies: t.copies, label_bound: t.label_bound, horizon, ext_mode: ext }
}

fn parse_tuple(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| BnfError::Input { path: "--tuple".into(), msg: format!("not a natural: {p}") }))
        .collect()
}

fn struct_at(structs: &[FiniteStructure], i: usize, file: &Path) -> Result<FiniteStructure> {
    structs.get(i).cloned().ok_or_else(|| BnfError::Input {
        path: format!("{}:structures[{i}]", file.display()),
        msg: format!("only {} structures", structs.len()),
    })
}

fn formula_json(f: &Formula) -> Value {
    json!({ "sexp": to_sexp(f), "rank": f.rank().to_string(), "dag_size": f.dag_size() })
}

fn execute(cmd: &Command, seed: u64, inputs: &mut Inputs, out: Option<&Path>) -> Result<Outcome> {
    let default = TruncationParams::default();
    match cmd {
        Command::Bf { structs, level, tuples, ext, trunc: t } => {
            let file: StructFile = inputs.json(structs)?;
            let mode = match ext {
                ExtArg::Representatives => ExtMode::Representatives,
                ExtArg::FullDomain => ExtMode::FullDomain,
            };
            let params = trunc(t, default.horizon, mode);
            let table = BfTable::with_structures(file.structures.iter().cloned(), BfConfig::from_params(&params))?;
            let m = build_table(&table, *level, *tuples, env_max_cells())?;
            let rows: Vec<Value> = m.cells.iter().map(|(q, v)| json!([q.left.0, q.left.1, q.right.0, q.right.1, q.level, v])).collect();
            let mut report = format!("{} structures, level {level}, tuples up to {tuples}, {} cells\n", file.structures.len(), rows.len());
            for (q, v) in m.cells.iter().filter(|(q, _)| q.left.1.is_empty()) {
                let _ = writeln!(report, "S{} <=_{} S{}: {v}", q.left.0, q.level, q.right.0);
            }
            let _ = writeln!(report, "{} cells true", m.cells.iter().filter(|c| c.1).count());
            Ok(Outcome { report, result: json!({ "level": level, "tuples": tuples, "rows": rows }), ok: true, params, extra: vec![] })
        }
        Command::Synth { kind, structs, n, tuple, index } => {
            let file: StructFile = inputs.json(structs)?;
            let params = default;
            let (f, check, extra): (Formula, Vec<(String, bool)>, Value) = match kind {
                SynthKind::Type => {
                    let t = parse_tuple(tuple)?;
                    struct_at(&file.structures, *index, structs)?;
                    let mut ts = TypeSynth::new(file.structures.clone())?;
                    let f = ts.type_formula(*index, &t, *n)?;
                    let mut checks = vec![(format!("rank within Pi_{n}"), f.rank().in_pi(*n))];
                    for (j, s) in file.structures.iter().enumerate() {
                        let mut ev = Evaluator::new(s);
                        let mut agree = true;
                        crate::backforth::for_each_tuple(s.domain_size(), t.len(), |b| {
                            let want = ts.table().leq(&crate::backforth::BfQuery::new(*index, t.clone(), j, b.to_vec(), *n));
                            agree &= matches!((want, ev.eval(&f, b)), (Ok(w), Ok(g)) if w == g);
                        });
                        checks.push((format!("agrees with the relation on S{j}"), agree));
                    }
                    (f, checks, json!({ "index": index, "tuple": t }))
                }
                SynthKind::Sep => {
                    let a = struct_at(&file.structures, 0, structs)?;
                    let b = struct_at(&file.structures, 1, structs)?;
                    let f = synth_separating(&a, &b, *n)?;
                    let checks = vec![
                        (format!("rank within Pi_{n}"), f.rank().in_pi(*n)),
                        ("true in S0".into(), evaluate(&f, &a, &[])?),
                        ("false in S1".into(), !evaluate(&f, &b, &[])?),
                    ];
                    (f, checks, json!({}))
                }
                SynthKind::Scott => {
                    let a = struct_at(&file.structures, *index, structs)?;
                    let (f, rep) = synth_scott_report(&a, *n)?;
                    let mut checks = vec![(format!("rank within Pi_{}", n + 1), f.rank().in_pi(n + 1))];
                    for (j, s) in file.structures.iter().enumerate() {
                        let want = crate::verify::iso(&a, s).is_iso();
                        checks.push((format!("S{j}: holds iff isomorphic"), evaluate(&f, s, &[])? == want));
                    }
                    (f, checks, serde_json::to_value(&rep).unwrap_or(Value::Null))
                }
            };
            let ok = check.iter().all(|c| c.1);
            let mut report = format!("{}\nrank {}\n", to_sexp(&f), f.rank());
            for (name, pass) in &check {
                let _ = writeln!(report, "{} {name}", if *pass { "PASS" } else { "FAIL" });
            }
            let checks: Vec<Value> = check.iter().map(|(n, p)| json!({ "check": n, "pass": p })).collect();
            Ok(Outcome {
                report,
                result: json!({ "formula": formula_json(&f), "checks": checks, "details": extra }),
                ok,
                params,
                extra: vec![],
            })
        }
        Command::Bouquet { tapes, horizon, check, trunc: t } => {
            let file: TapeFile = inputs.json(tapes)?;
            let params = trunc(t, *horizon, ExtMode::Representatives);
            let suite = bouquet::build(&file.tapes, *horizon, &params)?;
            let fd = bouquet::final_description(&suite)?;
            let mut report = format!("{} tapes, horizon {horizon}, {} labels\n", file.tapes.len(), suite.labels.universe);
            for (name, m) in fd.structures() {
                let _ = writeln!(report, "{name}: {} point types", m.len());
            }
            let structures: BTreeMap<String, Vec<Value>> = fd
                .structures()
                .map(|(name, m)| (name, m.iter().map(|(l, mult)| json!({ "labels": l, "mult": mult })).collect()))
                .collect();
            let sizes: Vec<Value> = fd.sizes.iter().map(|((i, j), s)| json!({ "i": i, "j": j, "size": s })).collect();
            let mut result = json!({
                "structures": structures,
                "a_labels": fd.a_labels,
                "sizes": sizes,
                "dropped_labels": suite.dropped_labels,
            });
            let mut ok = true;
            if *check {
                let rep = bouquet::check_claims(&suite, &params)?;
                for (name, v) in [("claim1", &rep.claim1), ("claim2", &rep.claim2), ("claim3", &rep.claim3), ("claim4", &rep.claim4), ("invariants", &rep.invariants)] {
                    let _ = writeln!(report, "{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
                }
                ok = rep.pass();
                result["claims"] = serde_json::to_value(&rep).unwrap_or(Value::Null);
            }
            Ok(Outcome { report, result, ok, params, extra: vec![] })
        }
        Command::Inv { graph, pack, decode: dec, transform } => {
            let pf: PackFile = inputs.json(pack)?;
            let p = Pack::from_file(pf)?;
            let params = default;
            if *dec {
                let star: StarStructure = inputs.json(graph)?;
                let g = decode(&star.structure, &p, DecodeRoute::Both)?;
                let report = format!("decoded a graph on {} vertices with {} edges\n", g.domain_size(), g.tuples(0).len() / 2);
                return Ok(Outcome { report, result: json!({ "graph": g }), ok: true, params, extra: vec![] });
            }
            let g: FiniteStructure = inputs.json(graph)?;
            let star = inv(&g, &p)?;
            if let Some(phi_path) = transform {
                let phi = parse(&inputs.text(phi_path)?).map_err(|e| BnfError::Input { path: phi_path.display().to_string(), msg: e.to_string() })?;
                let star_phi = transform_sentence(&phi, &p, Polarity::Auto)?;
                let (a, b) = (evaluate(&phi, &g, &[])?, evaluate(&star_phi, &star.structure, &[])?);
                let report = format!(
                    "phi rank {}, phi* rank {}\nG |= phi: {a}\ninv(G) |= phi*: {b}\n{} transfer\n",
                    phi.rank(),
                    star_phi.rank(),
                    if a == b { "PASS" } else { "FAIL" }
                );
                let result = json!({ "phi": formula_json(&phi), "transformed": formula_json(&star_phi), "graph_value": a, "star_value": b });
                return Ok(Outcome { report, result, ok: a == b, params, extra: vec![] });
            }
            let back = decode(&star.structure, &p, DecodeRoute::Both)?;
            let ok = back == g;
            let report = format!(
                "star structure with {} elements, {} parts\n{} decode(inv(G)) = G\n",
                star.structure.domain_size(),
                star.parts.len(),
                if ok { "PASS" } else { "FAIL" }
            );
            Ok(Outcome { report, result: serde_json::to_value(&star).unwrap_or(Value::Null), ok, params, extra: vec![] })
        }
        Command::Spectrum { k, x, wk, horizon, m, check, trace } => {
            let xs: Vec<u32> = inputs.json(x)?;
            let file: TapeFile = inputs.json(wk)?;
            let tape = file.tapes.iter().find(|t| t.i == *k).cloned().ok_or_else(|| BnfError::Input {
                path: format!("{}:tapes", wk.display()),
                msg: format!("no tape with i = {k}"),
            })?;
            let params = TruncationParams { horizon: *horizon, ..default };
            let input = SortInput { k: *k, x: xs.into_iter().collect(), wk: tape, horizon: *horizon, m: *m };
            let pack = Pack::desk_predicate()?;
            let oracle = SOracle::desk_predicate()?;
            let (sort, sched, tr) = spectrum::build_sort(&input, &oracle)?;
            let lines = tr.json_lines(&sched);
            let mut extra = vec![];
            if let Some(p) = trace {
                std::fs::write(p, &lines)?;
            } else if out.is_some() {
                extra.push(("trace.jsonl".to_string(), lines));
            }
            let ex = if *check {
                spectrum::extract_agreeing(&sort, &pack, &sched)?
            } else {
                spectrum::extract_family(&sort, spectrum::Route::Schedule, &pack, Some(&sched))?
            };
            let mut report = format!("sort k={k}: {} points, {} elements, {} labels\n", sort.points.len(), sort.structure.domain_size(), sort.labels);
            for (name, set) in &ex.sets {
                let _ = writeln!(report, "{name}: {set:?}");
            }
            let mut result = json!({ "sets": ex.sets, "witnesses": ex.witnesses });
            let mut ok = true;
            if *check {
                let sw = spectrum::check_single_witness(&sched, &tr);
                let rt = spectrum::check_r_trace(&tr, &input.x);
                let fam = spectrum::check_family(&ex.family(), &spectrum::w_final(&input.wk), *m);
                for (name, pass, detail) in [
                    ("single-witness", sw.pass, sw.detail.clone()),
                    ("r-trace", rt.pass, rt.detail.clone()),
                    ("family", fam.pass, format!("forbidden hit {:?}, missing {:?}", fam.forbidden_hit, fam.missing)),
                    ("routes", true, "schedule, isomorphism and formula agree".to_string()),
                ] {
                    let _ = writeln!(report, "{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
                }
                ok = sw.pass && rt.pass && fam.pass;
                result["checks"] = json!({ "single_witness": sw, "r_trace": rt, "family": fam });
            }
            Ok(Outcome { report, result, ok, params, extra })
        }
        Command::Verify { suite, scale, junit } => {
            let which = match suite {
                SuiteArg::All => vec![SuiteArg::Grid, SuiteArg::Bouquet, SuiteArg::Inv, SuiteArg::Spectrum],
                s => vec![*s],
            };
            let results: Vec<SuiteResult> = which
                .iter()
                .map(|s| match s {
                    SuiteArg::Grid => suites::run_grid(*scale),
                    SuiteArg::Bouquet => suites::run_bouquet(),
                    SuiteArg::Inv => suites::run_inv(seed),
                    _ => suites::run_spectrum(),
                })
                .collect();
            let mut report = String::new();
            for s in &results {
                for c in &s.cases {
                    let _ = writeln!(report, "{} {}/{}: {}", if c.pass { "PASS" } else { "FAIL" }, s.suite, c.name, c.detail);
                }
            }
            let xml = suites::junit(&results);
            let mut extra = vec![];
            match junit {
                Some(p) => std::fs::write(p, &xml)?,
                None => extra.push(("junit.xml".to_string(), xml)),
            }
            let ok = results.iter().all(SuiteResult::pass);
            Ok(Outcome { report, result: serde_json::to_value(&results).unwrap_or(Value::Null), ok, params: default, extra })
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Bf { .. } => "bf",
        Command::Synth { .. } => "synth",
        Command::Bouquet { .. } => "bouquet",
        Command::Inv { .. } => "inv",
        Command::Spectrum { .. } => "spectrum",
        Command::Verify { .. } => "verify",
    }
}

/// Arguments with `--out` and `--from-manifest` removed.
fn replayable_args(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in argv.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--from-manifest" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") || a.starts_with("--from-manifest=") {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn write_artifacts(dir: &Path, o: &Outcome, manifest: &RunManifest) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.txt"), &o.report)?;
    let pretty = |v: &Value| serde_json::to_string_pretty(v).unwrap_or_default() + "\n";
    std::fs::write(dir.join("result.json"), pretty(&o.result))?;
    std::fs::write(dir.join("manifest.json"), pretty(&serde_json::to_value(manifest).unwrap_or(Value::Null)))?;
    for (name, body) in &o.extra {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn run_inner(argv: &[String]) -> Result<i32> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    let (args, seed, expected) = match &cli.from_manifest {
        Some(_) if cli.command.is_some() => {
            return Err(BnfError::Input { path: "argv".into(), msg: "--from-manifest takes no subcommand".into() });
        }
        Some(p) => {
            let mut inputs = Inputs { digests: BTreeMap::new() };
            let m: RunManifest = inputs.json(p)?;
            (m.args.clone(), m.seed, Some(m))
        }
        None => (replayable_args(argv), 0, None),
    };
    let full: Vec<String> = std::iter::once("bnf".to_string()).chain(args.iter().cloned()).collect();
    let parsed = Cli::try_parse_from(&full).map_err(|e| BnfError::Input { path: "manifest.args".into(), msg: e.to_string() })?;
    if expected.is_some() && parsed.seed != seed {
        return Err(BnfError::Input { path: "manifest.seed".into(), msg: "seed disagrees with the recorded arguments".into() });
    }
    let seed = parsed.seed;
    let Some(cmd) = parsed.command else {
        return Err(BnfError::Input { path: "argv".into(), msg: "no subcommand given".into() });
    };
    let mut inputs = Inputs { digests: BTreeMap::new() };
    let outcome = execute(&cmd, seed, &mut inputs, cli.out.as_deref())?;
    if let Some(m) = &expected {
        if m.input_digests != inputs.digests {
            return Err(BnfError::Input { path: "manifest.input_digests".into(), msg: "input files changed since the manifest was written".into() });
        }
    }
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: subcommand_name(&cmd).to_string(),
        args,
        input_digests: inputs.digests,
        params: outcome.params,
        seed,
    };
    print!("{}", outcome.report);
    if let Some(dir) = &cli.out {
        write_artifacts(dir, &outcome, &manifest)?;
    }
    Ok(if outcome.ok { 0 } else { 1 })
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    match run_inner(argv) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
