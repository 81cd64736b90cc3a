//! The sort construction `N_k^X` over finite tapes, family extraction by
//! three independent routes, and the maximally unfriendly structure.
//!
//! Sign convention: the witness flag `w(F, s, ℓ, t)` is 1 exactly when the
//! `t`-th class attached to `a_{F,s}` through `D_ℓ` carries `B` (and its
//! dual carries `A`). Such a class puts `ℓ` into the coded set `F(x)`.

use crate::backforth::{BfConfig, BfQuery, BfTable};
use crate::bouquet::EnumTape;
use crate::error::{BnfError, Result};
use crate::formulas::{Evaluator, Formula, Var};
use crate::jumpinv::{relativize, Pack, SOracle};
use crate::structures::{Elem, ExtMode, FiniteStructure, Signature};
use crate::verify::iso;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Set = BTreeSet<u32>;

/// A point `a_{F,s}` of the sort.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub f: Set,
    pub s: u32,
}

impl Point {
    pub fn name(&self) -> String {
        let f: Vec<String> = self.f.iter().map(|x| x.to_string()).collect();
        format!("a[{{{}}},{}]", f.join(","), self.s)
    }
}

/// Witness flags of one point: `w[ℓ][t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSchedule {
    pub point: Point,
    pub w: Vec<Vec<bool>>,
}

/// Flags for every point, label and class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSchedule {
    pub k: u32,
    pub labels: u32,
    pub classes: u32,
    pub points: Vec<PointSchedule>,
}

/// Per-stage record for one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceLine {
    pub t: u32,
    #[serde(rename = "F")]
    pub f: Set,
    pub s: u32,
    #[serde(rename = "R")]
    pub r: Set,
    #[serde(rename = "W")]
    pub w: Set,
    /// Labels whose flag is set at this stage.
    pub firings: Vec<u32>,
}

/// `R_{F,s}[t]` for every point and the tape snapshots `W_{k,t}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RTrace {
    pub w: Vec<Set>,
    pub r: BTreeMap<Point, Vec<Set>>,
}

impl RTrace {
    /// One JSON object per line, ordered by point then stage.
    pub fn json_lines(&self, sched: &WitnessSchedule) -> String {
        let mut out = String::new();
        for ps in &sched.points {
            let rs = &self.r[&ps.point];
            for (t, r) in rs.iter().enumerate() {
                let firings = (0..sched.labels).filter(|&l| ps.w[l as usize][t]).collect();
                let line = TraceLine {
                    t: t as u32,
                    f: ps.point.f.clone(),
                    s: ps.point.s,
                    r: r.clone(),
                    w: self.w[t].clone(),
                    firings,
                };
                out.push_str(&serde_json::to_string(&line).expect("trace line serializes"));
                out.push('\n');
            }
        }
        out
    }
}

/// Inputs of one sort.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortInput {
    pub k: u32,
    pub x: Set,
    pub wk: EnumTape,
    pub horizon: u32,
    /// Sets `F ⊆ [0, m)` get points.
    pub m: u32,
}

/// `W_{k,t}`: elements enumerated by stage `t` that are below `t`.
pub fn w_at(tape: &EnumTape, t: u32) -> Set {
    tape.events.iter().filter(|&&(st, e)| st <= t && e < t as u64).map(|&(_, e)| e as u32).collect()
}

pub fn w_final(tape: &EnumTape) -> Set {
    tape.events.iter().map(|&(_, e)| e as u32).collect()
}

/// First stage from which `W_{k,t}` equals its final value.
pub fn stabilization_stage(tape: &EnumTape) -> u32 {
    tape.events.iter().map(|&(st, e)| st.max(e as u32 + 1)).max().unwrap_or(0)
}

impl SortInput {
    /// Guard and horizon checks.
    pub fn validate(&self) -> Result<()> {
        if self.wk.unbounded {
            return Err(BnfError::Tape("the W_k tape must be finite".into()));
        }
        let fin = w_final(&self.wk);
        if self.x.iter().all(|e| fin.contains(e)) {
            return Err(BnfError::Guard(format!("X = {:?} has no element outside W_k = {:?}", self.x, fin)));
        }
        let need = stabilization_stage(&self.wk).max(self.x.len() as u32) + 1;
        if self.horizon < need {
            return Err(BnfError::Horizon(format!("horizon {} is below the required {need}", self.horizon)));
        }
        Ok(())
    }

    pub fn labels(&self) -> u32 {
        let top = self.x.iter().chain(w_final(&self.wk).iter()).max().map_or(0, |&m| m + 1);
        self.m.max(top)
    }

    /// `a_{F,s}` for every `F ⊆ [0, m)` and `s` up to the stabilization stage.
    pub fn points(&self) -> Vec<Point> {
        let smax = stabilization_stage(&self.wk);
        let mut out = Vec::new();
        for mask in 0u64..(1 << self.m) {
            let f: Set = (0..self.m).filter(|&l| mask >> l & 1 == 1).collect();
            for s in 0..=smax {
                out.push(Point { f: f.clone(), s });
            }
        }
        out
    }
}

/// Runs the rules stage by stage. Stage `t + 1` reads only stage-`t` state.
pub fn build_schedule(input: &SortInput) -> Result<(WitnessSchedule, RTrace)> {
    input.validate()?;
    let labels = input.labels();
    let classes = input.horizon + 1;
    let ws: Vec<Set> = (0..classes).map(|t| w_at(&input.wk, t)).collect();
    let xs: Vec<u32> = input.x.iter().copied().collect();
    let mut points = Vec::new();
    let mut rmap = BTreeMap::new();
    for p in input.points() {
        let mut w = vec![vec![false; classes as usize]; labels as usize];
        for &l in &p.f {
            w[l as usize][0] = true;
        }
        let mut r = vec![p.f.clone()];
        for t in 0..input.horizon {
            let cur = r[t as usize].clone();
            let mut next = cur.clone();
            if t + 1 > p.s && cur == ws[t as usize] {
                let pool = &xs[..(t as usize + 1).min(xs.len())];
                if let Some(&l) = pool.iter().find(|l| !ws[t as usize].contains(l)) {
                    w[l as usize][t as usize + 1] = true;
                    next.insert(l);
                }
            }
            r.push(next);
        }
        rmap.insert(p.clone(), r);
        points.push(PointSchedule { point: p, w });
    }
    Ok((WitnessSchedule { k: input.k, labels, classes, points }, RTrace { w: ws, r: rmap }))
}

/// Pass/fail with the first violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub pass: bool,
    pub detail: String,
}

impl LawReport {
    fn from(r: std::result::Result<(), String>, ok: &str) -> Self {
        match r {
            Ok(()) => LawReport { pass: true, detail: ok.into() },
            Err(e) => LawReport { pass: false, detail: e },
        }
    }
}

/// At most one late witness per label, the initial flag equals membership in
/// `F`, and no late witness lands on a label already in `R`.
pub fn check_single_witness(sched: &WitnessSchedule, trace: &RTrace) -> LawReport {
    let run = || -> std::result::Result<(), String> {
        for ps in &sched.points {
            let name = ps.point.name();
            for l in 0..sched.labels {
                let row = &ps.w[l as usize];
                if row[0] != ps.point.f.contains(&l) {
                    return Err(format!("{name}: initial flag of label {l} disagrees with F"));
                }
                let late: Vec<usize> = (1..row.len()).filter(|&t| row[t]).collect();
                if late.len() > 1 {
                    return Err(format!("{name}: label {l} fires at stages {late:?}"));
                }
                if let (Some(&t), Some(rs)) = (late.first(), trace.r.get(&ps.point)) {
                    if rs[t - 1].contains(&l) {
                        return Err(format!("{name}: label {l} re-fires at stage {t}"));
                    }
                }
            }
        }
        Ok(())
    };
    LawReport::from(run(), "single-witness law holds")
}

/// `R[t] = F` up to `s`, monotone, inside `F ∪ X`; `W_{k,t} ⊆ [0, t)`.
pub fn check_r_trace(trace: &RTrace, x: &Set) -> LawReport {
    let run = || -> std::result::Result<(), String> {
        for (t, w) in trace.w.iter().enumerate() {
            if let Some(&e) = w.iter().find(|&&e| e as usize >= t) {
                return Err(format!("W_(k,{t}) contains {e}"));
            }
        }
        for (p, rs) in &trace.r {
            let name = p.name();
            let allowed: Set = p.f.union(x).copied().collect();
            for (t, r) in rs.iter().enumerate() {
                if t as u32 <= p.s && *r != p.f {
                    return Err(format!("{name}: R[{t}] = {r:?} differs from F before stage s"));
                }
                if t > 0 && !rs[t - 1].is_subset(r) {
                    return Err(format!("{name}: R shrinks at stage {t}"));
                }
                if !r.is_subset(&allowed) {
                    return Err(format!("{name}: R[{t}] = {r:?} leaves F ∪ X"));
                }
            }
        }
        Ok(())
    };
    LawReport::from(run(), "R-trace laws hold")
}

impl WitnessSchedule {
    /// Random flags obeying the single-witness law (no late firing at all when
    /// the label is already in `F`).
    pub fn random(rng: &mut impl Rng, points: usize, labels: u32, classes: u32) -> Self {
        let mut out = Vec::new();
        for i in 0..points {
            let f: Set = (0..labels).filter(|_| rng.gen_bool(0.3)).collect();
            let mut w = vec![vec![false; classes as usize]; labels as usize];
            for l in 0..labels {
                w[l as usize][0] = f.contains(&l);
                if !f.contains(&l) && classes > 1 && rng.gen_bool(0.4) {
                    w[l as usize][rng.gen_range(1..classes) as usize] = true;
                }
            }
            out.push(PointSchedule { point: Point { f, s: i as u32 }, w });
        }
        WitnessSchedule { k: 0, labels, classes, points: out }
    }

    /// The pattern of the standard picture: one point, two labels past 0,
    /// six classes each, and only the fourth `D_2` class flagged.
    pub fn figure_one() -> Self {
        let mut w = vec![vec![false; 6]; 3];
        w[2][3] = true;
        WitnessSchedule { k: 0, labels: 3, classes: 6, points: vec![PointSchedule { point: Point { f: Set::new(), s: 0 }, w }] }
    }

    /// Coded sets read straight from the flags.
    pub fn family(&self) -> BTreeMap<String, Set> {
        self.points
            .iter()
            .map(|ps| (ps.point.name(), (0..self.labels).filter(|&l| ps.w[l as usize].iter().any(|&b| b)).collect()))
            .collect()
    }
}

/// Elements of one class: its `D`-part and `D̄`-part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub d: Vec<Elem>,
    pub dbar: Vec<Elem>,
}

/// A materialized sort.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SortStructure {
    pub structure: FiniteStructure,
    pub k: u32,
    pub labels: u32,
    /// Point names with their elements.
    pub points: Vec<(String, Elem)>,
    /// `classes[i][ℓ][t]` for the `i`-th point.
    pub classes: Vec<Vec<Vec<ClassRecord>>>,
}

pub fn sort_signature(base: &Signature, k: u32, labels: u32) -> Result<Signature> {
    let mut rels: Vec<(String, usize)> = vec![(format!("U{k}"), 1)];
    for l in 0..labels {
        rels.push((format!("D{l}"), 2));
        rels.push((format!("Db{l}"), 2));
    }
    rels.push(("E".into(), 2));
    base.concat(&Signature::new(rels)?)
}

/// Assembles the sort from oracle structures chosen by the flags. Membership
/// is never consulted: flag 1 takes `(false_index, true_index)`.
pub fn materialize_sort(sched: &WitnessSchedule, oracle: &SOracle) -> Result<SortStructure> {
    let yes = oracle.structure(oracle.true_index)?;
    let no = oracle.structure(oracle.false_index)?;
    let base = yes.signature().clone();
    let sig = sort_signature(&base, sched.k, sched.labels)?;
    let nb = base.len();
    let ui = nb;
    let d_rel = |l: u32| nb + 1 + 2 * l as usize;
    let e_rel = nb + 1 + 2 * sched.labels as usize;
    let mut extents: Vec<Vec<Vec<Elem>>> = vec![Vec::new(); sig.len()];
    let np = sched.points.len() as Elem;
    let mut next = np;
    let mut points = Vec::new();
    let mut classes = Vec::new();
    for (i, ps) in sched.points.iter().enumerate() {
        let x = i as Elem;
        extents[ui].push(vec![x]);
        points.push((ps.point.name(), x));
        let mut per_label = Vec::new();
        for l in 0..sched.labels {
            let mut per_class = Vec::new();
            for t in 0..sched.classes {
                let flag = ps.w[l as usize][t as usize];
                let (dpart, dbpart) = if flag { (no, yes) } else { (yes, no) };
                let mut rec = ClassRecord { d: Vec::new(), dbar: Vec::new() };
                for (s, rel, out) in [(dpart, d_rel(l), &mut rec.d), (dbpart, d_rel(l) + 1, &mut rec.dbar)] {
                    let off = next;
                    for e in 0..s.domain_size() as Elem {
                        extents[rel].push(vec![x, off + e]);
                        out.push(off + e);
                    }
                    for r in 0..nb {
                        for tup in s.tuples(r) {
                            extents[r].push(tup.iter().map(|&e| e + off).collect());
                        }
                    }
                    next += s.domain_size() as Elem;
                }
                let all: Vec<Elem> = rec.d.iter().chain(&rec.dbar).copied().collect();
                for &a in &all {
                    for &b in &all {
                        extents[e_rel].push(vec![a, b]);
                    }
                }
                per_class.push(rec);
            }
            per_label.push(per_class);
        }
        classes.push(per_label);
    }
    let structure = FiniteStructure::new(sig, next as usize, extents)?;
    Ok(SortStructure { structure, k: sched.k, labels: sched.labels, points, classes })
}

/// Schedule, trace and materialized sort in one call.
pub fn build_sort(input: &SortInput, oracle: &SOracle) -> Result<(SortStructure, WitnessSchedule, RTrace)> {
    let (sched, trace) = build_schedule(input)?;
    let sort = materialize_sort(&sched, oracle)?;
    Ok((sort, sched, trace))
}

/// How `R_ℓ(x)` is decided during extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Schedule,
    Isomorphism,
    Formula,
}

/// Coded sets per point, with the witnessing class indices per label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub sets: BTreeMap<String, Set>,
    pub witnesses: BTreeMap<String, BTreeMap<u32, Vec<u32>>>,
}

impl Extraction {
    pub fn family(&self) -> BTreeSet<Set> {
        self.sets.values().cloned().collect()
    }
}

/// E-classes of `D_ℓ(x)` in order of their least element, read from relations.
fn classes_of(s: &FiniteStructure, x: Elem, l: u32) -> Result<Vec<Vec<Elem>>> {
    let sig = s.signature();
    let d = sig.index_of(&format!("D{l}")).ok_or_else(|| BnfError::Structure(format!("no relation D{l}")))?;
    let e = sig.index_of("E").ok_or_else(|| BnfError::Structure("no relation E".into()))?;
    let mut members: Vec<Elem> = s.tuples(d).iter().filter(|t| t[0] == x).map(|t| t[1]).collect();
    members.sort_unstable();
    let mut out: Vec<Vec<Elem>> = Vec::new();
    let mut seen = BTreeSet::new();
    for &y in &members {
        if seen.contains(&y) {
            continue;
        }
        let class: Vec<Elem> = members.iter().copied().filter(|&z| s.holds(e, &[y, z])).collect();
        seen.extend(class.iter().copied());
        out.push(class);
    }
    Ok(out)
}

/// `R_ℓ(x0)`: some class of `D_ℓ(x0)` fails the distinguisher.
pub fn r_formula(pack: &Pack, l: u32) -> Formula {
    let offset: Var = pack.distinguisher.max_var().map_or(0, |m| m + 1) + 2;
    let d = format!("D{l}");
    let inner = class_formula(pack, l, offset).negate();
    Formula::exists(vec![1], Formula::and(vec![Formula::atom(&d, vec![0, 1]), inner]))
}

/// The distinguisher relativized to the `D_ℓ(x0)`-part of the class of `x1`.
fn class_formula(pack: &Pack, l: u32, offset: Var) -> Formula {
    let map = (0..=pack.distinguisher.max_var().unwrap_or(0)).map(|v| (v, v + offset)).collect();
    let d = format!("D{l}");
    relativize(&pack.distinguisher.rename(&map), &|y| {
        Formula::and(vec![Formula::atom(&d, vec![0, y]), Formula::atom("E", vec![1, y])])
    })
}

/// Coded family of a sort under one route.
pub fn extract_family(sort: &SortStructure, route: Route, pack: &Pack, sched: Option<&WitnessSchedule>) -> Result<Extraction> {
    let mut sets = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    if route == Route::Schedule {
        let sched = sched.ok_or_else(|| BnfError::Input { path: "schedule".into(), msg: "schedule route needs the schedule".into() })?;
        for ps in &sched.points {
            let mut wit = BTreeMap::new();
            for l in 0..sched.labels {
                let ts: Vec<u32> = (0..sched.classes).filter(|&t| ps.w[l as usize][t as usize]).collect();
                if !ts.is_empty() {
                    wit.insert(l, ts);
                }
            }
            sets.insert(ps.point.name(), wit.keys().copied().collect());
            witnesses.insert(ps.point.name(), wit);
        }
        return Ok(Extraction { sets, witnesses });
    }
    let s = &sort.structure;
    let offset: Var = pack.distinguisher.max_var().map_or(0, |m| m + 1) + 2;
    let per_class: Vec<Formula> = (0..sort.labels).map(|l| class_formula(pack, l, offset)).collect();
    let whole: Vec<Formula> = (0..sort.labels).map(|l| r_formula(pack, l)).collect();
    let mut ev = Evaluator::new(s);
    for (name, x) in &sort.points {
        let mut wit = BTreeMap::new();
        for l in 0..sort.labels {
            let mut ts = Vec::new();
            for (t, class) in classes_of(s, *x, l)?.iter().enumerate() {
                let is_b = match route {
                    Route::Isomorphism => {
                        let part = s.induced(class)?.reduct(pack.signature())?;
                        if iso(&part, &pack.b).is_iso() {
                            true
                        } else if iso(&part, &pack.a).is_iso() {
                            false
                        } else {
                            return Err(BnfError::Structure(format!("{name}: class {t} of D{l} is neither A nor B")));
                        }
                    }
                    _ => !ev.eval(&per_class[l as usize], &[*x, class[0]])?,
                };
                if is_b {
                    ts.push(t as u32);
                }
            }
            if route == Route::Formula && ev.eval(&whole[l as usize], &[*x])? != !ts.is_empty() {
                return Err(BnfError::RouteDisagreement {
                    point: name.clone(),
                    label: l,
                    detail: "class-wise and whole-formula evaluation differ".into(),
                });
            }
            if !ts.is_empty() {
                wit.insert(l, ts);
            }
        }
        sets.insert(name.clone(), wit.keys().copied().collect());
        witnesses.insert(name.clone(), wit);
    }
    Ok(Extraction { sets, witnesses })
}

/// Runs all three routes and names the first point and label where they differ.
pub fn extract_agreeing(sort: &SortStructure, pack: &Pack, sched: &WitnessSchedule) -> Result<Extraction> {
    let base = extract_family(sort, Route::Schedule, pack, Some(sched))?;
    for route in [Route::Isomorphism, Route::Formula] {
        let other = extract_family(sort, route, pack, None)?;
        for (name, wit) in &base.witnesses {
            let theirs = other.witnesses.get(name).cloned().unwrap_or_default();
            for l in 0..sort.labels {
                if wit.get(&l) != theirs.get(&l) {
                    return Err(BnfError::RouteDisagreement {
                        point: name.clone(),
                        label: l,
                        detail: format!("schedule {:?} vs {route:?} {:?}", wit.get(&l), theirs.get(&l)),
                    });
                }
            }
        }
    }
    Ok(base)
}

/// Result of comparing an extracted family with the target family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub pass: bool,
    pub wk_final: Set,
    pub extracted: usize,
    /// An extracted set equal to `W_k`, if any.
    pub forbidden_hit: Option<Set>,
    /// A set `F ⊆ [0, m)` other than `W_k` that was not extracted, if any.
    pub missing: Option<Set>,
    /// Extracted sets that are not of the form `F ⊆ [0, m)`.
    pub augmented: Vec<Set>,
}

/// (i) no coded set equals `W_k`; (ii) every `F ⊆ [0, m)` other than `W_k` is coded.
/// Transient augmentations `F ∪ {x}` are reported but allowed; at desk scale
/// the guard on `X` only approximates the non-arithmeticity that rules out a
/// later collision with `W_k`.
pub fn check_family(family: &BTreeSet<Set>, wk_final: &Set, m: u32) -> FamilyReport {
    let forbidden_hit = family.contains(wk_final).then(|| wk_final.clone());
    let mut missing = None;
    for mask in 0u64..(1 << m) {
        let f: Set = (0..m).filter(|&l| mask >> l & 1 == 1).collect();
        if f != *wk_final && !family.contains(&f) {
            missing = Some(f);
            break;
        }
    }
    let augmented = family.iter().filter(|f| f.iter().any(|&l| l >= m)).cloned().collect();
    FamilyReport {
        pass: forbidden_hit.is_none() && missing.is_none(),
        wk_final: wk_final.clone(),
        extracted: family.len(),
        forbidden_hit,
        missing,
        augmented,
    }
}

/// Per-`(k, ℓ)` indices into the oracle family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnfriendlyIndices {
    pub labels: u32,
    pub indices: BTreeMap<u32, Vec<u32>>,
}

impl UnfriendlyIndices {
    /// `k ∈ U` gets `true_index` everywhere; otherwise label `k mod labels`
    /// gets `false_index`.
    pub fn from_table(table: &BTreeMap<u32, bool>, labels: u32, oracle: &SOracle) -> Result<Self> {
        if labels == 0 {
            return Err(BnfError::Input { path: "labels".into(), msg: "at least one label is needed".into() });
        }
        let indices = table
            .iter()
            .map(|(&k, &inu)| {
                let row = (0..labels)
                    .map(|l| if !inu && l == k % labels { oracle.false_index } else { oracle.true_index })
                    .collect();
                (k, row)
            })
            .collect();
        Ok(UnfriendlyIndices { labels, indices })
    }

    /// At most one label per `k` outside `S`.
    pub fn validate(&self, oracle: &SOracle) -> Result<()> {
        for (k, row) in &self.indices {
            if row.len() != self.labels as usize {
                return Err(BnfError::Input { path: format!("indices.{k}"), msg: "wrong row length".into() });
            }
            let mut outside = 0;
            for &i in row {
                if !oracle.is_member(i)? {
                    outside += 1;
                }
            }
            if outside > 1 {
                return Err(BnfError::Oracle(format!("k = {k} has {outside} labels outside S")));
            }
        }
        Ok(())
    }
}

/// The structure with points `a_k` and `a*`.
#[derive(Clone, Debug, Serialize)]
pub struct Unfriendly {
    pub structure: FiniteStructure,
    pub a_star: Elem,
    pub points: BTreeMap<u32, Elem>,
}

pub fn build_unfriendly(ix: &UnfriendlyIndices, oracle: &SOracle) -> Result<Unfriendly> {
    ix.validate(oracle)?;
    let base = oracle.structure(oracle.true_index)?.signature().clone();
    let mut rels: Vec<(String, usize)> = vec![("U".into(), 1)];
    rels.extend((0..ix.labels).map(|l| (format!("D{l}"), 2)));
    let sig = base.concat(&Signature::new(rels)?)?;
    let nb = base.len();
    let mut extents: Vec<Vec<Vec<Elem>>> = vec![Vec::new(); sig.len()];
    let mut rows: Vec<(Option<u32>, Vec<u32>)> = ix.indices.iter().map(|(&k, r)| (Some(k), r.clone())).collect();
    rows.push((None, vec![oracle.true_index; ix.labels as usize]));
    let mut next = rows.len() as Elem;
    let mut points = BTreeMap::new();
    let mut a_star = 0;
    for (x, (k, row)) in rows.iter().enumerate() {
        let x = x as Elem;
        extents[nb].push(vec![x]);
        match k {
            Some(k) => {
                points.insert(*k, x);
            }
            None => a_star = x,
        }
        for (l, &i) in row.iter().enumerate() {
            let c = oracle.structure(i)?;
            let off = next;
            for e in 0..c.domain_size() as Elem {
                extents[nb + 1 + l].push(vec![x, off + e]);
            }
            for r in 0..nb {
                for t in c.tuples(r) {
                    extents[r].push(t.iter().map(|&e| e + off).collect());
                }
            }
            next += c.domain_size() as Elem;
        }
    }
    Ok(Unfriendly { structure: FiniteStructure::new(sig, next as usize, extents)?, a_star, points })
}

/// `(M, a*) >=_n (M, a_k)` for every `k`, in full-domain mode.
pub fn unfriendly_verdicts(m: &Unfriendly, n: usize) -> Result<BTreeMap<u32, bool>> {
    let cfg = BfConfig { max_cells: None, ..BfConfig::default() }.with_mode(ExtMode::FullDomain);
    let table = BfTable::with_structures([m.structure.clone()], cfg)?;
    m.points.iter().map(|(&k, &x)| Ok((k, table.leq(&BfQuery::new(0, vec![x], 0, vec![m.a_star], n))?))).collect()
}
