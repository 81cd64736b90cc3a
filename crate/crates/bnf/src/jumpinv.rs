//! Unfriendly jump inversion: every edge of a graph becomes an ordered pair
//! of structures `(A, B)` and every non-edge the pair `(B, A)`.
//!
//! A [`Pack`] carries the pair, a sentence true in `A` and false in `B`,
//! and optionally Scott sentences for both. Star structures live over the
//! pack signature plus `U/1`, `E/3` and `F/3`; the `E`-part of the pair
//! `{u, v}` is `{x : E(u, v, x)}` and likewise for `F`.

use crate::bouquet::{self, EnumTape, KILL};
use crate::error::{BnfError, Result};
use crate::formulas::{evaluate, parse, synth_scott, Formula, Kind, RankKind, Var, EQ};
use crate::structures::{
    graph_signature, materialize, Elem, Encoding, FiniteStructure, LabelId, RelSym, Signature, StagedStructure,
    TruncationParams,
};
use crate::verify::iso;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

pub const U_REL: &str = "U";
pub const E_REL: &str = "E";
pub const F_REL: &str = "F";

/// The structure pair driving the operator.
#[derive(Clone, Debug)]
pub struct Pack {
    pub a: FiniteStructure,
    pub b: FiniteStructure,
    /// True in `a`, false in `b`, of rank Σ_{n+1}.
    pub distinguisher: Formula,
    pub scott_a: Option<Formula>,
    pub scott_b: Option<Formula>,
    pub n: usize,
}

/// On-disk form of a pack; formulas are s-expressions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackFile {
    pub a: FiniteStructure,
    pub b: FiniteStructure,
    pub distinguisher: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scott_a: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scott_b: Option<String>,
}

impl Pack {
    /// Validates the pair and derives `n` from the distinguisher's rank.
    pub fn new(a: FiniteStructure, b: FiniteStructure, distinguisher: Formula) -> Result<Self> {
        if a.signature() != b.signature() {
            return Err(BnfError::SignatureMismatch { left: a.signature().describe(), right: b.signature().describe() });
        }
        for name in [U_REL, E_REL, F_REL] {
            if a.signature().index_of(name).is_some() {
                return Err(BnfError::Signature(format!("pack signature already uses {name}")));
            }
        }
        if !distinguisher.is_sentence() {
            return Err(BnfError::Formula("distinguisher must be a sentence".into()));
        }
        if !evaluate(&distinguisher, &a, &[])? || evaluate(&distinguisher, &b, &[])? {
            return Err(BnfError::Formula("distinguisher must hold in A and fail in B".into()));
        }
        let r = distinguisher.rank();
        let n = match r.kind {
            RankKind::Sigma => r.level - 1,
            _ if r.sigma >= 1 => r.sigma - 1,
            _ => return Err(BnfError::Formula(format!("distinguisher has rank {r}; a Σ sentence is needed"))),
        };
        Ok(Pack { a, b, distinguisher, scott_a: None, scott_b: None, n })
    }

    /// Attaches Scott sentences, each checked on its own structure and against the other.
    pub fn with_scott(mut self, scott_a: Formula, scott_b: Formula) -> Result<Self> {
        let ok = evaluate(&scott_a, &self.a, &[])?
            && !evaluate(&scott_a, &self.b, &[])?
            && evaluate(&scott_b, &self.b, &[])?
            && !evaluate(&scott_b, &self.a, &[])?;
        if !ok {
            return Err(BnfError::Formula("Scott sentences do not characterize A and B".into()));
        }
        self.scott_a = Some(scott_a);
        self.scott_b = Some(scott_b);
        Ok(self)
    }

    /// Synthesizes Scott sentences at the least level in `1..=max_level` that works.
    pub fn with_synthesized_scott(self, max_level: usize) -> Result<Self> {
        let mut last = BnfError::Level("no level tried".into());
        for n in 1..=max_level {
            match (synth_scott(&self.a, n), synth_scott(&self.b, n)) {
                (Ok(sa), Ok(sb)) => return self.with_scott(sa, sb),
                (Err(e), _) | (_, Err(e)) => last = e,
            }
        }
        Err(last)
    }

    pub fn signature(&self) -> &Signature {
        self.a.signature()
    }

    pub fn from_file(f: PackFile) -> Result<Self> {
        let d = parse(&f.distinguisher)?;
        let p = Pack::new(f.a, f.b, d)?;
        match (f.scott_a, f.scott_b) {
            (Some(sa), Some(sb)) => p.with_scott(parse(&sa)?, parse(&sb)?),
            (None, None) => Ok(p),
            _ => Err(BnfError::Formula("give both Scott sentences or neither".into())),
        }
    }

    pub fn to_file(&self) -> PackFile {
        PackFile {
            a: self.a.clone(),
            b: self.b.clone(),
            distinguisher: self.distinguisher.to_string(),
            scott_a: self.scott_a.as_ref().map(|f| f.to_string()),
            scott_b: self.scott_b.as_ref().map(|f| f.to_string()),
        }
    }

    /// The default pack: graph encodings of the one-empty-tape bouquet pair,
    /// separated by having an isolated vertex (Σ_2, so `n = 1`).
    pub fn desk() -> Result<Self> {
        let (la, lb) = bouquet::desk_pair()?;
        let p = TruncationParams { copies: 1, ..bouquet::desk_params() };
        let a = rename_relation(&materialize(&la, &p, Encoding::Graph)?, "E", "N")?;
        let b = rename_relation(&materialize(&lb, &p, Encoding::Graph)?, "E", "N")?;
        let d = Formula::exists(vec![0], Formula::forall(vec![1], Formula::neg_atom("N", vec![0, 1])));
        Pack::new(a, b, d)
    }

    /// A small predicate-encoded pack (`n = 0`) with synthesized Scott sentences.
    pub fn desk_predicate() -> Result<Self> {
        let (suite, p) = predicate_desk_suite()?;
        let limits = bouquet::limit_structures(&suite)?;
        let a = materialize(&limits["A"], &p, Encoding::Predicate)?;
        let b = materialize(&limits["B"], &p, Encoding::Predicate)?;
        let fd = bouquet::final_description(&suite)?;
        let d = bouquet::separating_sentence(&suite.labels, &fd.a_labels);
        Pack::new(a, b, d)?.with_synthesized_scott(3)
    }
}

fn predicate_desk_suite() -> Result<(bouquet::BouquetSuite, TruncationParams)> {
    let p = TruncationParams { copies: 1, label_bound: 5, horizon: 6, ..TruncationParams::default() };
    let tapes = vec![EnumTape::finite(0, 0, vec![]), EnumTape::unbounded(1, 0, vec![])];
    Ok((bouquet::build(&tapes, p.horizon, &p)?, p))
}

/// Same structure with relation `from` renamed to `to`.
pub fn rename_relation(s: &FiniteStructure, from: &str, to: &str) -> Result<FiniteStructure> {
    let mut sig = s.signature().clone();
    for r in &mut sig.relations {
        if r.name == from {
            r.name = to.to_string();
        }
    }
    FiniteStructure::new(sig, s.domain_size(), s.extents())
}

/// The two parts attached to one unordered pair of `U`-points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRecord {
    pub u: Elem,
    pub v: Elem,
    pub e: Vec<Elem>,
    pub f: Vec<Elem>,
}

/// A materialized star structure with part annotations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarStructure {
    pub structure: FiniteStructure,
    /// `U` is `0..vertices`.
    pub vertices: usize,
    pub parts: Vec<PartRecord>,
}

impl StarStructure {
    pub fn part(&self, u: Elem, v: Elem) -> Option<&PartRecord> {
        let (u, v) = (u.min(v), u.max(v));
        self.parts.iter().find(|p| p.u == u && p.v == v)
    }
}

pub fn star_signature(base: &Signature) -> Result<Signature> {
    let extra = Signature::new([(U_REL, 1), (E_REL, 3), (F_REL, 3)])?;
    base.concat(&extra)
}

fn check_graph(g: &FiniteStructure) -> Result<()> {
    let sig = g.signature();
    if sig.len() != 1 || sig.relations[0] != (RelSym { name: "E".into(), arity: 2 }) {
        return Err(BnfError::Structure(format!("expected a graph over {{E/2}}, got {}", sig.describe())));
    }
    for t in g.tuples(0) {
        if t[0] == t[1] {
            return Err(BnfError::Structure(format!("graph has a loop at {}", t[0])));
        }
        if !g.holds(0, &[t[1], t[0]]) {
            return Err(BnfError::Structure(format!("graph edge {}-{} is not symmetric", t[0], t[1])));
        }
    }
    Ok(())
}

fn pairs(n: usize) -> impl Iterator<Item = (Elem, Elem)> {
    (0..n as Elem).flat_map(move |u| (u + 1..n as Elem).map(move |v| (u, v)))
}

/// Assembles a star structure from one `(E-part, F-part)` per pair.
fn assemble(vertices: usize, parts: &[((Elem, Elem), &FiniteStructure, &FiniteStructure)]) -> Result<StarStructure> {
    let base = match parts.first() {
        Some((_, c, _)) => c.signature().clone(),
        None => Signature::default(),
    };
    assemble_over(&base, vertices, parts)
}

fn assemble_over(
    base: &Signature,
    vertices: usize,
    parts: &[((Elem, Elem), &FiniteStructure, &FiniteStructure)],
) -> Result<StarStructure> {
    let sig = star_signature(base)?;
    let nb = base.len();
    let (ui, ei, fi) = (nb, nb + 1, nb + 2);
    let mut extents: Vec<Vec<Vec<Elem>>> = vec![Vec::new(); sig.len()];
    extents[ui] = (0..vertices as Elem).map(|u| vec![u]).collect();
    let mut next = vertices as Elem;
    let mut records = Vec::with_capacity(parts.len());
    for &((u, v), c, d) in parts {
        if c.signature() != base || d.signature() != base {
            return Err(BnfError::SignatureMismatch { left: base.describe(), right: c.signature().describe() });
        }
        let mut rec = PartRecord { u, v, e: Vec::new(), f: Vec::new() };
        for (s, rel, out) in [(c, ei, &mut rec.e), (d, fi, &mut rec.f)] {
            let off = next;
            for x in 0..s.domain_size() as Elem {
                let y = off + x;
                extents[rel].push(vec![u, v, y]);
                extents[rel].push(vec![v, u, y]);
                out.push(y);
            }
            for r in 0..nb {
                for t in s.tuples(r) {
                    extents[r].push(t.iter().map(|&x| x + off).collect());
                }
            }
            next += s.domain_size() as Elem;
        }
        records.push(rec);
    }
    let structure = FiniteStructure::new(sig, next as usize, extents)?;
    Ok(StarStructure { structure, vertices, parts: records })
}

/// `Inv(G)`: `(A, B)` on edges and `(B, A)` on non-edges.
pub fn inv(g: &FiniteStructure, pack: &Pack) -> Result<StarStructure> {
    check_graph(g)?;
    let parts: Vec<_> = pairs(g.domain_size())
        .map(|(u, v)| if g.holds(0, &[u, v]) { ((u, v), &pack.a, &pack.b) } else { ((u, v), &pack.b, &pack.a) })
        .collect();
    assemble_over(pack.signature(), g.domain_size(), &parts)
}

/// Index-based family with a membership table that counts its reads.
#[derive(Debug)]
pub struct SOracle {
    membership: BTreeMap<u32, bool>,
    pub family: BTreeMap<u32, FiniteStructure>,
    pub staged: BTreeMap<u32, StagedStructure>,
    pub true_index: u32,
    pub false_index: u32,
    reads: AtomicU64,
}

impl SOracle {
    /// Family `C_i` from a bouquet suite; `i` is a member iff some tape of `i` is unbounded.
    pub fn from_bouquet(suite: &bouquet::BouquetSuite, enc: Encoding, params: &TruncationParams) -> Result<Self> {
        let limits = bouquet::limit_structures(suite)?;
        let mut membership = BTreeMap::new();
        let mut family = BTreeMap::new();
        for &i in suite.c.keys() {
            membership.insert(i, suite.tapes.iter().any(|t| t.i == i && t.unbounded));
            family.insert(i, materialize(&limits[&format!("C{i}")], params, enc)?);
        }
        let pick = |want: bool| {
            membership
                .iter()
                .find(|(_, &m)| m == want)
                .map(|(&i, _)| i)
                .ok_or_else(|| BnfError::Oracle(format!("no index with membership {want}")))
        };
        let (true_index, false_index) = (pick(true)?, pick(false)?);
        Ok(SOracle { membership, family, staged: suite.c.clone(), true_index, false_index, reads: AtomicU64::new(0) })
    }

    /// The oracle matching [`Pack::desk_predicate`].
    pub fn desk_predicate() -> Result<Self> {
        let (suite, p) = predicate_desk_suite()?;
        SOracle::from_bouquet(&suite, Encoding::Predicate, &p)
    }

    pub fn is_member(&self, i: u32) -> Result<bool> {
        self.reads.fetch_add(1, Ordering::SeqCst);
        self.membership.get(&i).copied().ok_or_else(|| BnfError::Oracle(format!("index {i} unknown")))
    }

    pub fn membership_reads(&self) -> u64 {
        self.reads.load(Ordering::SeqCst)
    }

    pub fn structure(&self, i: u32) -> Result<&FiniteStructure> {
        self.family.get(&i).ok_or_else(|| BnfError::Oracle(format!("index {i} unknown")))
    }

    /// Every `C_i` is isomorphic to `A` when `i` is a member and to `B` otherwise.
    pub fn check_family(&self, pack: &Pack) -> Result<()> {
        for (&i, c) in &self.family {
            let want = if self.is_member(i)? { &pack.a } else { &pack.b };
            if !iso(c, want).is_iso() {
                return Err(BnfError::Oracle(format!("C{i} is not isomorphic to its designated structure")));
            }
        }
        Ok(())
    }
}

/// Index functions `f`, `g` on unordered pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedPresentation {
    pub vertices: usize,
    /// `(u, v, f(u,v), g(u,v))` with `u < v`.
    pub indices: Vec<(Elem, Elem, u32, u32)>,
}

impl IndexedPresentation {
    pub fn constant(vertices: usize, f: u32, g: u32) -> Self {
        IndexedPresentation { vertices, indices: pairs(vertices).map(|(u, v)| (u, v, f, g)).collect() }
    }

    /// Presentation of `G` through the oracle's designated indices.
    pub fn from_graph(g: &FiniteStructure, oracle: &SOracle) -> Result<Self> {
        check_graph(g)?;
        let (t, f) = (oracle.true_index, oracle.false_index);
        let indices =
            pairs(g.domain_size()).map(|(u, v)| if g.holds(0, &[u, v]) { (u, v, t, f) } else { (u, v, f, t) }).collect();
        Ok(IndexedPresentation { vertices: g.domain_size(), indices })
    }

    /// `membership(f) != membership(g)` on every pair; names the first bad pair.
    pub fn check_complementary(&self, oracle: &SOracle) -> Result<()> {
        for &(u, v, f, g) in &self.indices {
            if oracle.is_member(f)? == oracle.is_member(g)? {
                return Err(BnfError::Oracle(format!("pair ({u},{v}) has indices {f}, {g} on the same side")));
            }
        }
        Ok(())
    }
}

/// Star structure assembled from index pairs alone; membership is never read.
pub fn inv_from_indices(p: &IndexedPresentation, oracle: &SOracle) -> Result<StarStructure> {
    let expected: Vec<(Elem, Elem)> = pairs(p.vertices).collect();
    let got: Vec<(Elem, Elem)> = p.indices.iter().map(|&(u, v, _, _)| (u, v)).collect();
    if expected != got {
        return Err(BnfError::Structure("presentation must list every pair u<v once, in order".into()));
    }
    let mut parts = Vec::with_capacity(p.indices.len());
    for &(u, v, f, g) in &p.indices {
        parts.push(((u, v), oracle.structure(f)?, oracle.structure(g)?));
    }
    if parts.is_empty() {
        let base = oracle.family.values().next().map(|s| s.signature().clone()).unwrap_or_default();
        return assemble_over(&base, p.vertices, &[]);
    }
    assemble(p.vertices, &parts)
}

/// How decode resolves each `E`-part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeRoute {
    Formula,
    Isomorphism,
    #[default]
    Both,
}

/// Reads the graph back from a star structure, using relations only.
pub fn decode(star: &FiniteStructure, pack: &Pack, route: DecodeRoute) -> Result<FiniteStructure> {
    let sig = star.signature();
    let rel = |name: &str, arity: usize| {
        sig.index_of(name)
            .filter(|&r| sig.arity(r) == arity)
            .ok_or_else(|| BnfError::MalformedStar(format!("missing relation {name}/{arity}")))
    };
    let (ui, ei, fi) = (rel(U_REL, 1)?, rel(E_REL, 3)?, rel(F_REL, 3)?);
    let us: Vec<Elem> = (0..star.domain_size() as Elem).filter(|&x| star.holds(ui, &[x])).collect();
    let mut members: HashMap<(Elem, Elem), (Vec<Elem>, Vec<Elem>)> = HashMap::new();
    for (r, side) in [(ei, 0), (fi, 1)] {
        for t in star.tuples(r) {
            if t[0] < t[1] {
                let e = members.entry((t[0], t[1])).or_default();
                if side == 0 { e.0.push(t[2]) } else { e.1.push(t[2]) }
            }
        }
    }
    let index: HashMap<Elem, Elem> = us.iter().enumerate().map(|(i, &u)| (u, i as Elem)).collect();
    let mut edges = Vec::new();
    for (i, &u) in us.iter().enumerate() {
        for &v in &us[i + 1..] {
            let (e, f) = members
                .get(&(u, v))
                .ok_or_else(|| BnfError::MalformedStar(format!("pair ({u},{v}) has no parts")))?;
            let ce = star.induced(e)?.reduct(pack.signature())?;
            let cf = star.induced(f)?.reduct(pack.signature())?;
            let classify = |c: &FiniteStructure| -> Result<bool> {
                if iso(c, &pack.a).is_iso() {
                    Ok(true)
                } else if iso(c, &pack.b).is_iso() {
                    Ok(false)
                } else {
                    Err(BnfError::MalformedStar(format!("a part of pair ({u},{v}) is isomorphic to neither A nor B")))
                }
            };
            let by_iso = classify(&ce)?;
            if by_iso == classify(&cf)? {
                return Err(BnfError::MalformedStar(format!("both parts of pair ({u},{v}) are of the same kind")));
            }
            let edge = match route {
                DecodeRoute::Isomorphism => by_iso,
                DecodeRoute::Formula | DecodeRoute::Both => {
                    let by_formula = evaluate(&pack.distinguisher, &ce, &[])?;
                    if route == DecodeRoute::Both && by_formula != by_iso {
                        return Err(BnfError::RouteDisagreement {
                            point: format!("({u},{v})"),
                            label: 0,
                            detail: format!("distinguisher says {by_formula}, isomorphism says {by_iso}"),
                        });
                    }
                    by_formula
                }
            };
            if edge {
                let (a, b) = (index[&u], index[&v]);
                edges.push(vec![a, b]);
                edges.push(vec![b, a]);
            }
        }
    }
    FiniteStructure::new(graph_signature(), us.len(), vec![edges])
}

/// Which option of the proof replaces a graph literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Σ option under existential quantifiers and at top level, Π option under universal ones.
    #[default]
    Auto,
    Sigma,
    Pi,
}

/// Quantifiers of `f` restricted to `{y : guard(y)}`.
pub fn relativize(f: &Formula, guard: &dyn Fn(Var) -> Formula) -> Formula {
    fn go(f: &Formula, guard: &dyn Fn(Var) -> Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
        if let Some(g) = memo.get(&f.addr()) {
            return g.clone();
        }
        let g = match f.kind() {
            Kind::And(c) => Formula::and(c.iter().map(|x| go(x, guard, memo)).collect()),
            Kind::Or(c) => Formula::or(c.iter().map(|x| go(x, guard, memo)).collect()),
            Kind::Exists(vs, b) => {
                let mut parts: Vec<Formula> = vs.iter().map(|&v| guard(v)).collect();
                parts.push(go(b, guard, memo));
                Formula::exists(vs.to_vec(), Formula::and(parts))
            }
            Kind::Forall(vs, b) => {
                let mut parts: Vec<Formula> = vs.iter().map(|&v| guard(v).negate()).collect();
                parts.push(go(b, guard, memo));
                Formula::forall(vs.to_vec(), Formula::or(parts))
            }
            _ => f.clone(),
        };
        memo.insert(f.addr(), g.clone());
        g
    }
    go(f, guard, &mut HashMap::new())
}

fn shift(f: &Formula, by: Var) -> Formula {
    let map: HashMap<Var, Var> = (0..=f.max_var().unwrap_or(0)).map(|v| (v, v + by)).collect();
    f.rename(&map)
}

/// Sentence `s` relativized to the `rel`-part of the pair `(u, v)`, with its
/// variables shifted to start at `offset`.
pub fn part_relativized(s: &Formula, rel: &str, u: Var, v: Var, offset: Var) -> Formula {
    let rel = rel.to_string();
    relativize(&shift(s, offset), &|y| Formula::atom(&rel, vec![u, v, y]))
}

struct Transformer<'a> {
    d: &'a Formula,
    not_d: Formula,
    offset: Var,
    polarity: Polarity,
    memo: HashMap<(usize, u8), Formula>,
}

impl Transformer<'_> {
    fn go(&mut self, f: &Formula, ctx: u8) -> Result<Formula> {
        if let Some(g) = self.memo.get(&(f.addr(), ctx)) {
            return Ok(g.clone());
        }
        let g = match f.kind() {
            Kind::Top | Kind::Bot => f.clone(),
            Kind::Atom { rel, args, positive } => {
                if &**rel == EQ {
                    f.clone()
                } else if &**rel == "E" && args.len() == 2 {
                    let (a, b) = (args[0], args[1]);
                    let sigma = match self.polarity {
                        Polarity::Sigma => true,
                        Polarity::Pi => false,
                        Polarity::Auto => ctx != 2,
                    };
                    let (sent, part) = match (*positive, sigma) {
                        (true, true) => (self.d.clone(), E_REL),
                        (true, false) => (self.not_d.clone(), F_REL),
                        (false, true) => (self.d.clone(), F_REL),
                        (false, false) => (self.not_d.clone(), E_REL),
                    };
                    let inner = part_relativized(&sent, part, a, b, self.offset);
                    if *positive {
                        Formula::and(vec![Formula::neq(a, b), inner])
                    } else {
                        Formula::or(vec![Formula::eq(a, b), inner])
                    }
                } else {
                    return Err(BnfError::Formula(format!("graph sentences use only E/2 and =, found {rel}")));
                }
            }
            Kind::And(c) => Formula::and(c.iter().map(|x| self.go(x, ctx)).collect::<Result<_>>()?),
            Kind::Or(c) => Formula::or(c.iter().map(|x| self.go(x, ctx)).collect::<Result<_>>()?),
            Kind::Exists(vs, b) => {
                let mut parts: Vec<Formula> = vs.iter().map(|&v| Formula::atom(U_REL, vec![v])).collect();
                parts.push(self.go(b, 1)?);
                Formula::exists(vs.to_vec(), Formula::and(parts))
            }
            Kind::Forall(vs, b) => {
                let mut parts: Vec<Formula> = vs.iter().map(|&v| Formula::neg_atom(U_REL, vec![v])).collect();
                parts.push(self.go(b, 2)?);
                Formula::forall(vs.to_vec(), Formula::or(parts))
            }
        };
        self.memo.insert((f.addr(), ctx), g.clone());
        Ok(g)
    }
}

/// `φ*`: graph quantifiers relativized to `U` and each edge literal replaced
/// by the distinguisher (or its negation) on the matching part.
pub fn transform_sentence(phi: &Formula, pack: &Pack, polarity: Polarity) -> Result<Formula> {
    let offset = phi.max_var().map_or(0, |m| m + 1);
    let mut t = Transformer { d: &pack.distinguisher, not_d: pack.distinguisher.negate(), offset, polarity, memo: HashMap::new() };
    t.go(phi, 0)
}

/// Sanity axioms on star structures, each universal (Π_1) except the
/// coverage axiom (Π_2).
pub fn star_axioms(base: &Signature) -> Vec<(String, Formula)> {
    let u = |x: Var| Formula::atom(U_REL, vec![x]);
    let nu = |x: Var| Formula::neg_atom(U_REL, vec![x]);
    let at = |r: &str, a: Var, b: Var, c: Var| Formula::atom(r, vec![a, b, c]);
    let nat = |r: &str, a: Var, b: Var, c: Var| Formula::neg_atom(r, vec![a, b, c]);
    let mut out = Vec::new();
    for r in [E_REL, F_REL] {
        // ∀uvx (R(u,v,x) → U(u) ∧ U(v) ∧ u ≠ v ∧ ¬U(x))
        let body = Formula::or(vec![
            nat(r, 0, 1, 2),
            Formula::and(vec![u(0), u(1), Formula::neq(0, 1), nu(2)]),
        ]);
        out.push((format!("{r}-typing"), Formula::forall(vec![0, 1, 2], body)));
        let sym = Formula::or(vec![nat(r, 0, 1, 2), at(r, 1, 0, 2)]);
        out.push((format!("{r}-symmetry"), Formula::forall(vec![0, 1, 2], sym)));
    }
    let cover = Formula::or(vec![
        u(0),
        Formula::exists(vec![1, 2], Formula::or(vec![at(E_REL, 1, 2, 0), at(F_REL, 1, 2, 0)])),
    ]);
    out.push(("coverage".into(), Formula::forall(vec![0], cover)));
    // ∀x u v u' v' (S(u,v,x) ∧ S'(u',v',x) → S = S' ∧ {u,v} = {u',v'})
    let same = Formula::or(vec![
        Formula::and(vec![Formula::eq(0, 2), Formula::eq(1, 3)]),
        Formula::and(vec![Formula::eq(0, 3), Formula::eq(1, 2)]),
    ]);
    for (r1, r2) in [(E_REL, E_REL), (F_REL, F_REL), (E_REL, F_REL)] {
        let body = if r1 == r2 {
            Formula::or(vec![nat(r1, 0, 1, 4), nat(r2, 2, 3, 4), same.clone()])
        } else {
            Formula::or(vec![nat(r1, 0, 1, 4), nat(r2, 2, 3, 4)])
        };
        out.push((format!("unique-{r1}{r2}"), Formula::forall(vec![0, 1, 2, 3, 4], body)));
    }
    for rs in &base.relations {
        let k = rs.arity as Var;
        let args: Vec<Var> = (0..k).collect();
        let mut conj: Vec<Formula> = args.iter().map(|&x| nu(x)).collect();
        for r in [E_REL, F_REL] {
            // the tuple stays inside one part: x_0 in the R-part of (u,v) forces every x_i there
            let inner = Formula::or(
                std::iter::once(nat(r, k, k + 1, 0)).chain(args.iter().map(|&x| at(r, k, k + 1, x))).collect(),
            );
            conj.push(Formula::forall(vec![k, k + 1], inner));
        }
        let f = Formula::forall(args.clone(), Formula::or(vec![Formula::neg_atom(&rs.name, args), Formula::and(conj)]));
        out.push((format!("{}-confined", rs.name), f));
    }
    out
}

/// Scott sentence of `Inv(G)` from a Π_ℓ Scott sentence of `G`, ℓ ≥ 2.
pub fn scott_star(scott: &Formula, pack: &Pack) -> Result<Formula> {
    let r = scott.rank();
    let level = if r.kind == RankKind::Pi { r.level } else { r.pi };
    if level < 2 {
        return Err(BnfError::Level(format!("graph Scott sentence has rank {r}; Π_ℓ with ℓ ≥ 2 is needed")));
    }
    let (sa, sb) = match (&pack.scott_a, &pack.scott_b) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(BnfError::Formula("pack has no Scott sentences for A and B".into())),
    };
    let mut parts: Vec<Formula> = star_axioms(pack.signature()).into_iter().map(|(_, f)| f).collect();
    let on = |s: &Formula, rel: &str| part_relativized(s, rel, 0, 1, 2);
    let pair_ok = Formula::or(vec![
        Formula::neg_atom(U_REL, vec![0]),
        Formula::neg_atom(U_REL, vec![1]),
        Formula::eq(0, 1),
        Formula::and(vec![on(sa, E_REL), on(sb, F_REL)]),
        Formula::and(vec![on(sb, E_REL), on(sa, F_REL)]),
    ]);
    parts.push(Formula::forall(vec![0, 1], pair_ok));
    parts.push(transform_sentence(scott, pack, Polarity::Auto)?);
    Ok(Formula::and(parts))
}

/// Output of [`lift`].
#[derive(Clone, Debug)]
pub struct Lift {
    pub pack: Pack,
    pub graph_a: FiniteStructure,
    pub graph_b: FiniteStructure,
    pub graph_distinguisher: Formula,
}

/// `x` is a flower center: it carries the two-edge stem of the marked encoding.
fn marked_center(x: Var, s1: Var, s2: Var, z: Var) -> Formula {
    Formula::exists(
        vec![s1, s2],
        Formula::and(vec![
            Formula::atom("E", vec![x, s1]),
            Formula::atom("E", vec![s1, s2]),
            Formula::neq(x, s2),
            Formula::forall(vec![z], Formula::or(vec![Formula::neg_atom("E", vec![s2, z]), Formula::eq(z, s1)])),
        ]),
    )
}

/// A simple cycle of length `len` through `x`, as a nested path formula.
fn cycle_through(x: Var, len: usize, first: Var) -> Formula {
    fn step(x: Var, prev: Var, used: &[Var], left: usize, next: Var) -> Formula {
        if left == 0 {
            return Formula::atom("E", vec![prev, x]);
        }
        let mut parts = vec![Formula::atom("E", vec![prev, next])];
        parts.extend(used.iter().map(|&w| Formula::neq(next, w)));
        let mut used2 = used.to_vec();
        used2.push(next);
        parts.push(step(x, next, &used2, left - 1, next + 1));
        Formula::exists(vec![next], Formula::and(parts))
    }
    step(x, x, &[x], len - 1, first)
}

/// The bouquet separating sentence over the marked graph encoding: some center
/// has no petal outside the labels of `a`.
pub fn marked_separating_sentence(labels: &bouquet::LabelMap, a_labels: &BTreeSet<LabelId>) -> Formula {
    let mut parts = vec![marked_center(0, 1, 2, 3)];
    for l in (0..labels.universe).filter(|l| !a_labels.contains(l)) {
        parts.push(cycle_through(0, l as usize + 3, 4).negate());
    }
    Formula::exists(vec![0], Formula::and(parts))
}

/// One step of the inductive construction: bouquet graphs from `tapes`,
/// pushed through `Inv` with `pack`, give a pack one level higher.
pub fn lift(pack: &Pack, tapes: &[EnumTape], params: &TruncationParams) -> Result<Lift> {
    let suite = bouquet::build(tapes, params.horizon, params)?;
    let limits = bouquet::limit_structures(&suite)?;
    let graph_a = materialize(&limits["A"], params, Encoding::MarkedGraph)?;
    let graph_b = materialize(&limits["B"], params, Encoding::MarkedGraph)?;
    let fd = bouquet::final_description(&suite)?;
    debug_assert!(!fd.a_labels.contains(&KILL));
    let delta = marked_separating_sentence(&suite.labels, &fd.a_labels);
    if !evaluate(&delta, &graph_a, &[])? || evaluate(&delta, &graph_b, &[])? {
        return Err(BnfError::Claim { claim: "lift".into(), detail: "marked separating sentence fails".into() });
    }
    // The star relations are renamed so the lifted pack can be inverted again.
    let tag = pack.n + 1;
    let names: Vec<(&str, String)> = [U_REL, E_REL, F_REL].iter().map(|&r| (r, format!("{r}{tag}"))).collect();
    let mut a = inv(&graph_a, pack)?.structure;
    let mut b = inv(&graph_b, pack)?.structure;
    for (from, to) in &names {
        a = rename_relation(&a, from, to)?;
        b = rename_relation(&b, from, to)?;
    }
    let d = transform_sentence(&delta, pack, Polarity::Auto)?.map_atoms(&mut |rel, args, positive| {
        let (_, to) = names.iter().find(|(from, _)| *from == rel)?;
        Some(if positive { Formula::atom(to, args.to_vec()) } else { Formula::neg_atom(to, args.to_vec()) })
    });
    Ok(Lift { pack: Pack::new(a, b, d)?, graph_a, graph_b, graph_distinguisher: delta })
}

/// Graph on `n` vertices from undirected edges.
pub fn graph(n: usize, edges: &[(Elem, Elem)]) -> Result<FiniteStructure> {
    let mut t = BTreeSet::new();
    for &(a, b) in edges {
        if a == b {
            return Err(BnfError::Structure(format!("loop at {a}")));
        }
        t.insert(vec![a, b]);
        t.insert(vec![b, a]);
    }
    FiniteStructure::new(graph_signature(), n, vec![t.into_iter().collect()])
}

/// Every labeled simple graph on `0..=max_n` vertices.
pub fn all_graphs(max_n: usize) -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        let ps: Vec<(Elem, Elem)> = pairs(n).collect();
        for mask in 0u64..(1 << ps.len()) {
            let es: Vec<(Elem, Elem)> = ps.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p).collect();
            out.push(graph(n, &es).expect("valid edges"));
        }
    }
    out
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> FiniteStructure {
    let es: Vec<(Elem, Elem)> = pairs(n).filter(|_| rng.gen_bool(p)).collect();
    graph(n, &es).expect("valid edges")
}

/// Ten graph sentences: five Σ_1 and five Σ_2.
pub fn battery() -> Vec<(&'static str, Formula)> {
    let e = |a: Var, b: Var| Formula::atom("E", vec![a, b]);
    let ne = |a: Var, b: Var| Formula::neg_atom("E", vec![a, b]);
    let ex = |v: Vec<Var>, b: Formula| Formula::exists(v, b);
    let all = |v: Vec<Var>, b: Formula| Formula::forall(v, b);
    let and = Formula::and;
    let or = Formula::or;
    vec![
        ("edge", ex(vec![0, 1], e(0, 1))),
        ("triangle", ex(vec![0, 1, 2], and(vec![e(0, 1), e(1, 2), e(0, 2)]))),
        ("non-adjacent pair", ex(vec![0, 1], and(vec![Formula::neq(0, 1), ne(0, 1)]))),
        (
            "induced P3",
            ex(vec![0, 1, 2], and(vec![e(0, 1), e(1, 2), ne(0, 2), Formula::neq(0, 2)])),
        ),
        (
            "three vertices",
            ex(vec![0, 1, 2], and(vec![Formula::neq(0, 1), Formula::neq(1, 2), Formula::neq(0, 2)])),
        ),
        ("dominating vertex", ex(vec![0], all(vec![1], or(vec![Formula::eq(0, 1), e(0, 1)])))),
        ("isolated vertex", ex(vec![0], all(vec![1], ne(0, 1)))),
        (
            "pair without common neighbor",
            ex(vec![0, 1], and(vec![Formula::neq(0, 1), all(vec![2], or(vec![ne(0, 2), ne(1, 2)]))])),
        ),
        (
            "isolated edge",
            ex(
                vec![0, 1],
                and(vec![
                    e(0, 1),
                    all(vec![2], or(vec![Formula::eq(2, 0), Formula::eq(2, 1), and(vec![ne(0, 2), ne(1, 2)])])),
                ]),
            ),
        ),
        (
            "vertex of degree at most one",
            ex(vec![0], all(vec![1, 2], or(vec![ne(0, 1), ne(0, 2), Formula::eq(1, 2)]))),
        ),
    ]
}
