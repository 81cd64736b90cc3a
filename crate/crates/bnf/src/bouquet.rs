//! Staged construction of the bouquet structures `A`, `B` and `C_i` from a
//! finite family of enumeration tapes, with checkable reports for the four
//! claims about them.
//!
//! Every point stands for infinitely many copies. Labels are flat ids: `0`
//! is the kill label and `ℓ_{i,j,k}` is `1 + t * K + k`, where `t` is the
//! position of tape `(i, j)` in lexicographic order and `K` is the per-tape
//! budget `(label_bound - 1) / #tapes`.

use crate::error::{BnfError, Result};
use crate::formulas::{evaluate, Formula};
use crate::structures::{
    materialize_tracked, Encoding, LabelId, LabelMultiset, LabeledStructure, Multiplicity, StagedStructure,
    TruncationParams,
};
use crate::verify::iso;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const KILL: LabelId = 0;

/// A finite stage-by-stage enumeration of one set `W^{i,j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumTape {
    pub i: u32,
    pub j: u32,
    /// `(stage, element)` pairs; stages start at 1 and never decrease.
    #[serde(default)]
    pub events: Vec<(u32, u64)>,
    /// If set, a fresh element arrives every `period` stages after the last event.
    #[serde(default)]
    pub unbounded: bool,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub period: u32,
}

fn one() -> u32 {
    1
}

fn is_one(p: &u32) -> bool {
    *p == 1
}

impl EnumTape {
    pub fn finite(i: u32, j: u32, events: Vec<(u32, u64)>) -> Self {
        EnumTape { i, j, events, unbounded: false, period: 1 }
    }

    pub fn unbounded(i: u32, j: u32, events: Vec<(u32, u64)>) -> Self {
        EnumTape { i, j, events, unbounded: true, period: 1 }
    }

    fn validate(&self) -> Result<()> {
        if self.period == 0 {
            return Err(BnfError::Tape(format!("tape ({},{}) has period 0", self.i, self.j)));
        }
        let mut last = 1;
        for &(s, _) in &self.events {
            if s == 0 {
                return Err(BnfError::Tape(format!("tape ({},{}) has an event at stage 0", self.i, self.j)));
            }
            if s < last {
                return Err(BnfError::Tape(format!("tape ({},{}) events are not sorted by stage", self.i, self.j)));
            }
            last = s;
        }
        Ok(())
    }

    fn last_stage(&self) -> u32 {
        self.events.last().map_or(0, |e| e.0)
    }

    /// `|W_s|`, including generated elements for unbounded tapes.
    pub fn size_at(&self, s: u32) -> u64 {
        let listed: BTreeSet<u64> = self.events.iter().filter(|e| e.0 <= s).map(|e| e.1).collect();
        let mut n = listed.len() as u64;
        if self.unbounded && s > self.last_stage() {
            n += ((s - self.last_stage()) / self.period) as u64;
        }
        n
    }
}

/// The tape file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapeFile {
    pub tapes: Vec<EnumTape>,
}

/// Pairing of structured labels with flat ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelMap {
    pub tapes: Vec<(u32, u32)>,
    pub per_tape: u32,
    pub universe: u32,
}

impl LabelMap {
    fn new(tapes: Vec<(u32, u32)>, label_bound: u32) -> Result<Self> {
        if label_bound == 0 {
            return Err(BnfError::Tape("label bound must be positive".into()));
        }
        let per_tape = if tapes.is_empty() { 0 } else { (label_bound - 1) / tapes.len() as u32 };
        if !tapes.is_empty() && per_tape == 0 {
            let (i, j) = tapes[0];
            return Err(BnfError::LabelBudget { i, j, needed: 1, budget: 0 });
        }
        let universe = 1 + per_tape * tapes.len() as u32;
        Ok(LabelMap { tapes, per_tape, universe })
    }

    fn slot(&self, i: u32, j: u32) -> Option<u32> {
        self.tapes.binary_search(&(i, j)).ok().map(|t| t as u32)
    }

    /// Flat id of `ℓ_{i,j,k}`, if it fits the budget.
    pub fn id(&self, i: u32, j: u32, k: u64) -> Option<LabelId> {
        let t = self.slot(i, j)?;
        (k < self.per_tape as u64).then(|| 1 + t * self.per_tape + k as u32)
    }

    /// Inverse of [`LabelMap::id`]; `None` for the kill label.
    pub fn name(&self, l: LabelId) -> Option<(u32, u32, u32)> {
        if l == KILL || l >= self.universe {
            return None;
        }
        let t = (l - 1) / self.per_tape;
        let (i, j) = self.tapes[t as usize];
        Some((i, j, (l - 1) % self.per_tape))
    }

    pub fn all(&self) -> BTreeSet<LabelId> {
        (0..self.universe).collect()
    }

    /// Every in-budget `ℓ_{i,j,k}`.
    pub fn column(&self, i: u32, j: u32) -> BTreeSet<LabelId> {
        (0..self.per_tape as u64).filter_map(|k| self.id(i, j, k)).collect()
    }

    pub fn describe(&self, l: LabelId) -> String {
        match self.name(l) {
            None if l == KILL => "l_kill".into(),
            None => format!("L{l}"),
            Some((i, j, k)) => format!("l_{{{i},{j},{k}}}"),
        }
    }
}

/// The staged structures plus their inputs.
#[derive(Clone, Debug, Serialize)]
pub struct BouquetSuite {
    pub a: StagedStructure,
    pub b: StagedStructure,
    pub c: BTreeMap<u32, StagedStructure>,
    pub labels: LabelMap,
    pub tapes: Vec<EnumTape>,
    pub horizon: u32,
    /// Labels `ℓ_{i,j,k}` of unbounded tapes that fell past the budget.
    pub dropped_labels: u64,
}

pub fn hat_id(i: u32, j: u32, k: u64) -> String {
    format!("hat[{i},{j},{k:04}]")
}

pub fn c_id(i: u32, j: u32) -> String {
    format!("c[{i},{j}]")
}

pub const A_ID: &str = "a";
pub const KILL_ID: &str = "killed";

fn validate_tapes(tapes: &[EnumTape]) -> Result<Vec<EnumTape>> {
    let mut sorted = tapes.to_vec();
    sorted.sort_by_key(|t| (t.i, t.j));
    for w in sorted.windows(2) {
        if (w[0].i, w[0].j) == (w[1].i, w[1].j) {
            return Err(BnfError::Tape(format!("tape ({},{}) listed twice", w[0].i, w[0].j)));
        }
        if w[0].i == w[1].i && w[0].unbounded && w[1].unbounded {
            return Err(BnfError::Tape(format!("index {} has more than one unbounded tape", w[0].i)));
        }
    }
    for t in &sorted {
        t.validate()?;
    }
    Ok(sorted)
}

/// Runs the stage construction up to `horizon`.
pub fn build(tapes: &[EnumTape], horizon: u32, params: &TruncationParams) -> Result<BouquetSuite> {
    if horizon == 0 {
        return Err(BnfError::Horizon("horizon must be at least 1".into()));
    }
    let tapes = validate_tapes(tapes)?;
    let map = LabelMap::new(tapes.iter().map(|t| (t.i, t.j)).collect(), params.label_bound)?;
    for t in tapes.iter().filter(|t| !t.unbounded) {
        let k = t.size_at(horizon);
        if k + 1 >= map.per_tape as u64 {
            return Err(BnfError::LabelBudget { i: t.i, j: t.j, needed: k as u32 + 2, budget: map.per_tape });
        }
    }
    let universe: Vec<LabelId> = (0..map.universe).collect();
    let inf = Multiplicity::Infinite;
    let mut labels: BTreeMap<String, BTreeSet<LabelId>> = BTreeMap::new();
    let mut b_points: Vec<String> = vec![KILL_ID.into()];
    labels.insert(KILL_ID.into(), map.all());
    labels.insert(A_ID.into(), BTreeSet::new());
    for t in &tapes {
        labels.insert(c_id(t.i, t.j), map.column(t.i, t.j));
        labels.insert(hat_id(t.i, t.j, 0), map.column(t.i, t.j));
        b_points.push(hat_id(t.i, t.j, 0));
    }
    let indices: BTreeSet<u32> = tapes.iter().map(|t| t.i).collect();
    let snapshot = |labels: &BTreeMap<String, BTreeSet<LabelId>>, b_points: &[String]| -> Result<_> {
        let mut b = LabeledStructure::new(universe.clone(), Some(KILL))?;
        for p in b_points {
            b.insert(p.clone(), labels[p].clone(), inf)?;
        }
        let mut a = b.clone();
        a.insert(A_ID, labels[A_ID].clone(), inf)?;
        let mut cs = BTreeMap::new();
        for &i in &indices {
            let mut c = b.clone();
            for t in tapes.iter().filter(|t| t.i == i) {
                let id = c_id(t.i, t.j);
                c.insert(id.clone(), labels[&id].clone(), inf)?;
            }
            cs.insert(i, c);
        }
        Ok((a, b, cs))
    };
    let mut sa = StagedStructure { stages: Vec::new() };
    let mut sb = StagedStructure { stages: Vec::new() };
    let mut sc: BTreeMap<u32, StagedStructure> =
        indices.iter().map(|&i| (i, StagedStructure { stages: Vec::new() })).collect();
    let mut push = |(a, b, cs): (LabeledStructure, LabeledStructure, BTreeMap<u32, LabeledStructure>)| {
        sa.stages.push(a);
        sb.stages.push(b);
        for (i, c) in cs {
            sc.get_mut(&i).expect("index registered").stages.push(c);
        }
    };
    push(snapshot(&labels, &b_points)?);
    let mut dropped = 0u64;
    for s in 0..horizon {
        for t in &tapes {
            let (old, new) = (t.size_at(s), t.size_at(s + 1));
            for k in old..new {
                match map.id(t.i, t.j, k) {
                    Some(l) => {
                        for set in labels.values_mut() {
                            set.insert(l);
                        }
                    }
                    None => dropped += 1,
                }
                labels.insert(hat_id(t.i, t.j, k), map.all());
                let fresh = labels[&c_id(t.i, t.j)].clone();
                labels.insert(hat_id(t.i, t.j, k + 1), fresh);
                b_points.push(hat_id(t.i, t.j, k + 1));
            }
        }
        push(snapshot(&labels, &b_points)?);
    }
    Ok(BouquetSuite { a: sa, b: sb, c: sc, labels: map, tapes, horizon, dropped_labels: dropped })
}

/// Closed-form label multisets of the limit structures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinalDescription {
    pub a: LabelMultiset,
    pub b: LabelMultiset,
    pub c: BTreeMap<u32, LabelMultiset>,
    /// Label set of the distinguished point `a`.
    pub a_labels: BTreeSet<LabelId>,
    /// Final `|W^{i,j}|`, `None` when unbounded.
    pub sizes: BTreeMap<(u32, u32), Option<u64>>,
}

impl FinalDescription {
    pub fn structures(&self) -> impl Iterator<Item = (String, &LabelMultiset)> {
        [("A".to_string(), &self.a), ("B".to_string(), &self.b)]
            .into_iter()
            .chain(self.c.iter().map(|(i, m)| (format!("C{i}"), m)))
    }
}

/// Computes the limit structures straight from the final tape values.
pub fn final_description(suite: &BouquetSuite) -> Result<FinalDescription> {
    let map = &suite.labels;
    let mut sizes = BTreeMap::new();
    for t in &suite.tapes {
        if t.unbounded {
            sizes.insert((t.i, t.j), None);
        } else {
            if t.last_stage() > suite.horizon {
                return Err(BnfError::Horizon(format!(
                    "tape ({},{}) has events at stage {} past horizon {}",
                    t.i,
                    t.j,
                    t.last_stage(),
                    suite.horizon
                )));
            }
            sizes.insert((t.i, t.j), Some(t.size_at(suite.horizon)));
        }
    }
    let mut global = BTreeSet::new();
    for (&(i, j), &size) in &sizes {
        let upto = size.unwrap_or(u64::MAX);
        global.extend((0..map.per_tape as u64).filter(|&k| k < upto).filter_map(|k| map.id(i, j, k)));
    }
    let inf = Multiplicity::Infinite;
    let add = |m: &mut LabelMultiset, set: BTreeSet<LabelId>| {
        m.entry(set).and_modify(|x| *x = *x + inf).or_insert(inf);
    };
    let mut b = LabelMultiset::new();
    add(&mut b, map.all());
    for (&(i, j), &size) in &sizes {
        if size.is_some() {
            add(&mut b, &map.column(i, j) | &global);
        }
    }
    let mut a = b.clone();
    add(&mut a, global.clone());
    let mut c = BTreeMap::new();
    for &(i, j) in sizes.keys() {
        let m = c.entry(i).or_insert_with(|| b.clone());
        add(m, &map.column(i, j) | &global);
    }
    Ok(FinalDescription { a, b, c, a_labels: global, sizes })
}

/// Pass/fail verdict with the first counterexample, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexVerdict {
    pub index: u32,
    pub expect_a: bool,
    pub label_iso_a: bool,
    pub label_iso_b: bool,
    pub materialized_iso_a: bool,
    pub materialized_iso_b: bool,
    pub pass: bool,
}

/// Orbit pair of one point: labels it must carry, labels it must avoid.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitPair {
    pub point: String,
    pub positive: BTreeSet<LabelId>,
    pub negative: BTreeSet<LabelId>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimsReport {
    pub claim1: Verdict,
    pub claim2: Verdict,
    pub claim3: Verdict,
    pub claim4: Verdict,
    pub indices: Vec<IndexVerdict>,
    pub separating_sentence: String,
    pub separating_rank: String,
    pub orbit_pairs: Vec<OrbitPair>,
    pub invariants: Verdict,
}

impl ClaimsReport {
    pub fn pass(&self) -> bool {
        [&self.claim1, &self.claim2, &self.claim3, &self.claim4, &self.invariants].iter().all(|v| v.pass)
    }

    /// Turns the first failing claim into an error.
    pub fn into_result(self) -> Result<Self> {
        for (name, v) in
            [("1", &self.claim1), ("2", &self.claim2), ("3", &self.claim3), ("4", &self.claim4), ("invariants", &self.invariants)]
        {
            if !v.pass {
                return Err(BnfError::Claim { claim: name.into(), detail: v.detail.clone() });
            }
        }
        Ok(self)
    }
}

fn from_multiset(m: &LabelMultiset, universe: u32) -> Result<LabeledStructure> {
    let mut ls = LabeledStructure::new((0..universe).collect(), Some(KILL))?;
    for (k, (labels, mult)) in m.iter().enumerate() {
        ls.insert(format!("p{k:04}"), labels.clone(), *mult)?;
    }
    Ok(ls)
}

/// `∃x ⋀_{ℓ ∈ N} ¬ℓ(x)` over the predicate encoding.
pub fn separating_sentence(labels: &LabelMap, a_labels: &BTreeSet<LabelId>) -> Formula {
    let lits = (0..labels.universe)
        .filter(|l| !a_labels.contains(l))
        .map(|l| Formula::neg_atom(&format!("L{l}"), vec![0]))
        .collect();
    Formula::exists(vec![0], Formula::and(lits))
}

/// The orbit formula `⋀_P ℓ(x) ∧ ⋀_N ¬ℓ(x)`.
pub fn orbit_formula(pair: &OrbitPair) -> Formula {
    let mut lits: Vec<Formula> = pair.positive.iter().map(|l| Formula::atom(&format!("L{l}"), vec![0])).collect();
    lits.extend(pair.negative.iter().map(|l| Formula::neg_atom(&format!("L{l}"), vec![0])));
    Formula::and(lits)
}

/// Stage invariants: monotonicity, kill absorption, survivor law, and the
/// separation witness on every unkilled `ĉ`.
pub fn check_invariants(suite: &BouquetSuite) -> Verdict {
    match invariants_inner(suite) {
        Ok(()) => Verdict::new(true, "monotone; kill absorbing; survivor law and separation witnesses hold"),
        Err(e) => Verdict::new(false, e),
    }
}

fn invariants_inner(suite: &BouquetSuite) -> std::result::Result<(), String> {
    for (name, st) in [("A", &suite.a), ("B", &suite.b)].into_iter().chain(suite.c.values().map(|c| ("C", c))) {
        st.check_monotone().map_err(|e| format!("{name}: {e}"))?;
    }
    let Some(b) = suite.b.last() else { return Err("no stages".into()) };
    let a = suite.a.last().ok_or("no stages")?;
    let all = suite.labels.all();
    let a_labels = a.get(A_ID).ok_or("point a missing")?.0.clone();
    for t in &suite.tapes {
        let k = t.size_at(suite.horizon);
        for kk in 0..=k {
            let (labels, _) = b.get(&hat_id(t.i, t.j, kk)).ok_or(format!("hat[{},{},{kk}] missing", t.i, t.j))?;
            let killed = labels.contains(&KILL);
            if kk < k && !killed {
                return Err(format!("hat[{},{},{kk}] should be killed", t.i, t.j));
            }
            if kk == k && killed {
                return Err(format!("survivor hat[{},{},{kk}] is killed", t.i, t.j));
            }
            if killed && *labels != all {
                return Err(format!("killed hat[{},{},{kk}] lacks labels", t.i, t.j));
            }
        }
        if b.get(&hat_id(t.i, t.j, k + 1)).is_some() {
            return Err(format!("hat[{},{},{}] exists past the survivor", t.i, t.j, k + 1));
        }
        if !t.unbounded {
            let witness = suite.labels.id(t.i, t.j, k + 1).ok_or("separation label out of budget")?;
            let (labels, _) = b.get(&hat_id(t.i, t.j, k)).expect("checked above");
            if !labels.contains(&witness) || a_labels.contains(&witness) {
                return Err(format!("separation witness {} fails on hat[{},{},{k}]", suite.labels.describe(witness), t.i, t.j));
            }
        }
    }
    Ok(())
}

fn materialized_iso(x: &LabeledStructure, y: &LabeledStructure, p: &TruncationParams) -> Result<bool> {
    let mx = materialize_tracked(&x.canonical(), p, Encoding::Predicate)?.structure;
    let my = materialize_tracked(&y.canonical(), p, Encoding::Predicate)?.structure;
    Ok(iso(&mx, &my).is_iso())
}

/// Evaluates Claims 1 through 4 on the limit description.
pub fn check_claims(suite: &BouquetSuite, params: &TruncationParams) -> Result<ClaimsReport> {
    let fd = final_description(suite)?;
    let u = suite.labels.universe;
    let la = from_multiset(&fd.a, u)?;
    let lb = from_multiset(&fd.b, u)?;
    let mut indices = Vec::new();
    let (mut c1, mut c2) = (Verdict::new(true, "every C_i with only finite tapes is B"), Verdict::new(true, "every C_i with an unbounded tape is A"));
    for (&i, m) in &fd.c {
        let lc = from_multiset(m, u)?;
        let expect_a = suite.tapes.iter().any(|t| t.i == i && t.unbounded);
        let v = IndexVerdict {
            index: i,
            expect_a,
            label_iso_a: lc.label_isomorphic(&la),
            label_iso_b: lc.label_isomorphic(&lb),
            materialized_iso_a: materialized_iso(&lc, &la, params)?,
            materialized_iso_b: materialized_iso(&lc, &lb, params)?,
            pass: false,
        };
        let pass = v.label_iso_a == expect_a
            && v.label_iso_b == !expect_a
            && v.materialized_iso_a == v.label_iso_a
            && v.materialized_iso_b == v.label_iso_b;
        let target = if expect_a { &mut c2 } else { &mut c1 };
        if !pass && target.pass {
            *target = Verdict::new(
                false,
                format!(
                    "C{i}: iso A {}/{} iso B {}/{} (label/materialized)",
                    v.label_iso_a, v.materialized_iso_a, v.label_iso_b, v.materialized_iso_b
                ),
            );
        }
        indices.push(IndexVerdict { pass, ..v });
    }
    let phi = separating_sentence(&suite.labels, &fd.a_labels);
    let ma = materialize_tracked(&la, params, Encoding::Predicate)?.structure;
    let mb = materialize_tracked(&lb, params, Encoding::Predicate)?.structure;
    let (ta, tb) = (evaluate(&phi, &ma, &[])?, evaluate(&phi, &mb, &[])?);
    let c3 = Verdict::new(ta && !tb, format!("A |= phi: {ta}, B |= phi: {tb}"));
    let mut pairs = Vec::new();
    let mut c4 = Verdict::new(true, "every orbit pair pins its label set");
    let mut seen = BTreeSet::new();
    let universe: Vec<&LabelMultiset> = std::iter::once(&fd.a).chain(std::iter::once(&fd.b)).chain(fd.c.values()).collect();
    for (labels, _) in fd.a.iter().chain(fd.b.iter()) {
        if !seen.insert(labels.clone()) {
            continue;
        }
        let (point, positive, negative) = orbit_pair(suite, &fd, labels);
        let mut pair = OrbitPair { point, positive, negative, pass: true };
        let pins = |y: &BTreeSet<LabelId>| pair.positive.is_subset(y) && pair.negative.is_disjoint(y);
        let bad = universe.iter().flat_map(|m| m.keys()).find(|y| pins(y) && *y != labels).cloned();
        let f = orbit_formula(&pair);
        let mut formula_ok = true;
        for (ls, fs) in [(&la, &ma), (&lb, &mb)] {
            let owners = materialize_tracked(ls, params, Encoding::Predicate)?.owner;
            for (e, owner) in owners.iter().enumerate() {
                let holds = evaluate(&f, fs, &[e as u32])?;
                let same = ls.get(owner).map(|(l, _)| l == labels).unwrap_or(false);
                formula_ok &= holds == same;
            }
        }
        pair.pass = bad.is_none() && formula_ok;
        if !pair.pass && c4.pass {
            c4 = Verdict::new(false, format!("orbit pair of {} admits label set {:?}", pair.point, bad));
        }
        pairs.push(pair);
    }
    Ok(ClaimsReport {
        claim1: c1,
        claim2: c2,
        claim3: c3,
        claim4: c4,
        indices,
        separating_rank: phi.rank().to_string(),
        separating_sentence: phi.to_string(),
        orbit_pairs: pairs,
        invariants: check_invariants(suite),
    })
}

fn orbit_pair(
    suite: &BouquetSuite,
    fd: &FinalDescription,
    labels: &BTreeSet<LabelId>,
) -> (String, BTreeSet<LabelId>, BTreeSet<LabelId>) {
    if labels.contains(&KILL) {
        return (KILL_ID.into(), [KILL].into(), BTreeSet::new());
    }
    if *labels == fd.a_labels {
        let neg = suite.labels.all().difference(labels).copied().collect();
        return (A_ID.into(), BTreeSet::new(), neg);
    }
    for (&(i, j), &size) in &fd.sizes {
        if let Some(k) = size {
            if let Some(w) = suite.labels.id(i, j, k + 1) {
                if labels.contains(&w) {
                    return (hat_id(i, j, k), [w].into(), [KILL].into());
                }
            }
        }
    }
    ("unclassified".into(), labels.clone(), BTreeSet::new())
}

/// Label multisets of the horizon snapshot, for comparison with the limit.
pub fn snapshot_multisets(suite: &BouquetSuite) -> Option<(LabelMultiset, LabelMultiset, BTreeMap<u32, LabelMultiset>)> {
    Some((
        suite.a.last()?.label_multiset(),
        suite.b.last()?.label_multiset(),
        suite.c.iter().map(|(i, c)| c.last().map(|l| (*i, l.label_multiset()))).collect::<Option<_>>()?,
    ))
}

/// True when every tape is finite and settles before the horizon, the case
/// in which the horizon snapshot must equal the limit description.
pub fn stabilized(suite: &BouquetSuite) -> bool {
    suite.tapes.iter().all(|t| !t.unbounded && t.last_stage() <= suite.horizon)
}

/// The smallest instance that separates `B` from `A` at level 2: one empty
/// tape and a three-label universe.
pub fn desk_tapes() -> Vec<EnumTape> {
    vec![EnumTape::finite(0, 0, vec![])]
}

pub fn desk_params() -> TruncationParams {
    TruncationParams { copies: 3, label_bound: 3, horizon: 5, ..TruncationParams::default() }
}

/// Limit labeled structures `(A, B)` of the desk instance.
pub fn desk_pair() -> Result<(LabeledStructure, LabeledStructure)> {
    let p = desk_params();
    let suite = build(&desk_tapes(), p.horizon, &p)?;
    let fd = final_description(&suite)?;
    Ok((from_multiset(&fd.a, suite.labels.universe)?, from_multiset(&fd.b, suite.labels.universe)?))
}

/// Limit labeled structures of every structure in the suite.
pub fn limit_structures(suite: &BouquetSuite) -> Result<BTreeMap<String, LabeledStructure>> {
    let fd = final_description(suite)?;
    fd.structures().map(|(n, m)| Ok((n, from_multiset(m, suite.labels.universe)?))).collect()
}
