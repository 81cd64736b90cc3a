//! Formula ASTs with shared subterms, Σ/Π rank, normalization, evaluation,
//! a round-trippable s-expression syntax, and synthesis.
//!
//! Variables are numbered. Formulas built by the synthesizers use them
//! positionally: a formula about an `n`-tuple has free variables `0..n`, and
//! every quantifier block binds the next unused numbers. That lets identical
//! subformulas be shared without substitution.

mod eval;
mod sexp;
pub mod synth;

pub use eval::{evaluate, Evaluator};
pub use sexp::{parse, to_sexp};
pub use synth::{
    diagram_formula, synth_scott, synth_scott_report, synth_separating, synth_type_formula, ScottReport,
    TypeSynth,
};

use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

pub type Var = u32;

/// Reserved relation name for equality atoms.
pub const EQ: &str = "=";

#[derive(Debug)]
pub enum Kind {
    Top,
    Bot,
    Atom { rel: Arc<str>, args: Box<[Var]>, positive: bool },
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Box<[Var]>, Formula),
    Forall(Box<[Var]>, Formula),
}

#[derive(Debug)]
pub struct Node {
    pub kind: Kind,
    free: Box<[Var]>,
    hash: u64,
}

/// Cheaply clonable handle to an immutable formula DAG.
#[derive(Clone)]
pub struct Formula(Arc<Node>);

fn node_hash(kind: &Kind) -> u64 {
    let mut h = DefaultHasher::new();
    match kind {
        Kind::Top => 0u8.hash(&mut h),
        Kind::Bot => 1u8.hash(&mut h),
        Kind::Atom { rel, args, positive } => {
            2u8.hash(&mut h);
            rel.hash(&mut h);
            args.hash(&mut h);
            positive.hash(&mut h);
        }
        Kind::And(c) | Kind::Or(c) => {
            (if matches!(kind, Kind::And(_)) { 3u8 } else { 4u8 }).hash(&mut h);
            for f in c {
                f.0.hash.hash(&mut h);
            }
        }
        Kind::Exists(v, b) | Kind::Forall(v, b) => {
            (if matches!(kind, Kind::Exists(..)) { 5u8 } else { 6u8 }).hash(&mut h);
            v.hash(&mut h);
            b.0.hash.hash(&mut h);
        }
    }
    h.finish()
}

fn free_of(kind: &Kind) -> Box<[Var]> {
    let mut v: Vec<Var> = match kind {
        Kind::Top | Kind::Bot => vec![],
        Kind::Atom { args, .. } => args.to_vec(),
        Kind::And(c) | Kind::Or(c) => c.iter().flat_map(|f| f.free_vars().iter().copied()).collect(),
        Kind::Exists(vs, b) | Kind::Forall(vs, b) => {
            b.free_vars().iter().copied().filter(|x| !vs.contains(x)).collect()
        }
    };
    v.sort_unstable();
    v.dedup();
    v.into_boxed_slice()
}

impl Formula {
    pub fn from_kind(kind: Kind) -> Formula {
        let free = free_of(&kind);
        let hash = node_hash(&kind);
        Formula(Arc::new(Node { kind, free, hash }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn free_vars(&self) -> &[Var] {
        &self.0.free
    }

    pub fn is_sentence(&self) -> bool {
        self.0.free.is_empty()
    }

    pub fn ptr_eq(&self, other: &Formula) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn top() -> Formula {
        Formula::from_kind(Kind::Top)
    }
    pub fn bot() -> Formula {
        Formula::from_kind(Kind::Bot)
    }
    pub fn atom(rel: &str, args: Vec<Var>) -> Formula {
        Formula::from_kind(Kind::Atom { rel: rel.into(), args: args.into(), positive: true })
    }
    pub fn neg_atom(rel: &str, args: Vec<Var>) -> Formula {
        Formula::from_kind(Kind::Atom { rel: rel.into(), args: args.into(), positive: false })
    }
    pub fn eq(a: Var, b: Var) -> Formula {
        Formula::atom(EQ, vec![a, b])
    }
    pub fn neq(a: Var, b: Var) -> Formula {
        Formula::neg_atom(EQ, vec![a, b])
    }
    pub fn and(c: Vec<Formula>) -> Formula {
        Formula::from_kind(Kind::And(c))
    }
    pub fn or(c: Vec<Formula>) -> Formula {
        Formula::from_kind(Kind::Or(c))
    }
    pub fn exists(v: Vec<Var>, b: Formula) -> Formula {
        Formula::from_kind(Kind::Exists(v.into(), b))
    }
    pub fn forall(v: Vec<Var>, b: Formula) -> Formula {
        Formula::from_kind(Kind::Forall(v.into(), b))
    }

    /// Negation normal form of the negation, sharing preserved.
    pub fn negate(&self) -> Formula {
        let mut memo = HashMap::new();
        negate_rec(self, &mut memo)
    }

    pub fn rank(&self) -> Rank {
        rank(self)
    }

    /// Largest variable mentioned anywhere, bound or free.
    pub fn max_var(&self) -> Option<Var> {
        let mut best: Option<Var> = None;
        self.visit(&mut |f| {
            let m = match f.kind() {
                Kind::Atom { args, .. } => args.iter().max().copied(),
                Kind::Exists(v, _) | Kind::Forall(v, _) => v.iter().max().copied(),
                _ => None,
            };
            if let Some(m) = m {
                best = Some(best.map_or(m, |b| b.max(m)));
            }
        });
        best
    }

    /// Calls `f` once per distinct node (by identity), children first.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        let mut seen = HashSet::new();
        visit_rec(self, &mut seen, f);
    }

    /// Distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Size of the formula written out as a tree (saturating).
    pub fn tree_size(&self) -> u128 {
        let mut memo: HashMap<usize, u128> = HashMap::new();
        fn go(f: &Formula, memo: &mut HashMap<usize, u128>) -> u128 {
            if let Some(&v) = memo.get(&f.addr()) {
                return v;
            }
            let v = 1u128.saturating_add(match f.kind() {
                Kind::And(c) | Kind::Or(c) => c.iter().fold(0u128, |a, x| a.saturating_add(go(x, memo))),
                Kind::Exists(_, b) | Kind::Forall(_, b) => go(b, memo),
                _ => 0,
            });
            memo.insert(f.addr(), v);
            v
        }
        go(self, &mut memo)
    }

    /// Renames variables by `map`; unmapped variables are kept.
    pub fn rename(&self, map: &HashMap<Var, Var>) -> Formula {
        let mut memo = HashMap::new();
        rename_rec(self, map, &mut memo)
    }

    /// Replaces relation atoms by `f(rel, args, positive)` when it returns `Some`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&str, &[Var], bool) -> Option<Formula>) -> Formula {
        let mut memo = HashMap::new();
        map_atoms_rec(self, f, &mut memo)
    }
}

fn visit_rec(f: &Formula, seen: &mut HashSet<usize>, g: &mut impl FnMut(&Formula)) {
    if !seen.insert(f.addr()) {
        return;
    }
    match f.kind() {
        Kind::And(c) | Kind::Or(c) => c.iter().for_each(|x| visit_rec(x, seen, g)),
        Kind::Exists(_, b) | Kind::Forall(_, b) => visit_rec(b, seen, g),
        _ => {}
    }
    g(f);
}

fn negate_rec(f: &Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
    if let Some(g) = memo.get(&f.addr()) {
        return g.clone();
    }
    let g = match f.kind() {
        Kind::Top => Formula::bot(),
        Kind::Bot => Formula::top(),
        Kind::Atom { rel, args, positive } => {
            Formula::from_kind(Kind::Atom { rel: rel.clone(), args: args.clone(), positive: !positive })
        }
        Kind::And(c) => Formula::or(c.iter().map(|x| negate_rec(x, memo)).collect()),
        Kind::Or(c) => Formula::and(c.iter().map(|x| negate_rec(x, memo)).collect()),
        Kind::Exists(v, b) => Formula::from_kind(Kind::Forall(v.clone(), negate_rec(b, memo))),
        Kind::Forall(v, b) => Formula::from_kind(Kind::Exists(v.clone(), negate_rec(b, memo))),
    };
    memo.insert(f.addr(), g.clone());
    g
}

fn rename_rec(f: &Formula, map: &HashMap<Var, Var>, memo: &mut HashMap<usize, Formula>) -> Formula {
    if let Some(g) = memo.get(&f.addr()) {
        return g.clone();
    }
    let r = |v: &Var| *map.get(v).unwrap_or(v);
    let g = match f.kind() {
        Kind::Top | Kind::Bot => f.clone(),
        Kind::Atom { rel, args, positive } => {
            Formula::from_kind(Kind::Atom { rel: rel.clone(), args: args.iter().map(r).collect(), positive: *positive })
        }
        Kind::And(c) => Formula::and(c.iter().map(|x| rename_rec(x, map, memo)).collect()),
        Kind::Or(c) => Formula::or(c.iter().map(|x| rename_rec(x, map, memo)).collect()),
        Kind::Exists(v, b) => Formula::from_kind(Kind::Exists(v.iter().map(r).collect(), rename_rec(b, map, memo))),
        Kind::Forall(v, b) => Formula::from_kind(Kind::Forall(v.iter().map(r).collect(), rename_rec(b, map, memo))),
    };
    memo.insert(f.addr(), g.clone());
    g
}

fn map_atoms_rec(
    f: &Formula,
    m: &mut impl FnMut(&str, &[Var], bool) -> Option<Formula>,
    memo: &mut HashMap<usize, Formula>,
) -> Formula {
    if let Some(g) = memo.get(&f.addr()) {
        return g.clone();
    }
    let g = match f.kind() {
        Kind::Top | Kind::Bot => f.clone(),
        Kind::Atom { rel, args, positive } => m(rel, args, *positive).unwrap_or_else(|| f.clone()),
        Kind::And(c) => Formula::and(c.iter().map(|x| map_atoms_rec(x, m, memo)).collect()),
        Kind::Or(c) => Formula::or(c.iter().map(|x| map_atoms_rec(x, m, memo)).collect()),
        Kind::Exists(v, b) => Formula::from_kind(Kind::Exists(v.clone(), map_atoms_rec(b, m, memo))),
        Kind::Forall(v, b) => Formula::from_kind(Kind::Forall(v.clone(), map_atoms_rec(b, m, memo))),
    };
    memo.insert(f.addr(), g.clone());
    g
}

impl PartialEq for Formula {
    fn eq(&self, other: &Formula) -> bool {
        let mut memo = HashSet::new();
        struct_eq(self, other, &mut memo)
    }
}
impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.0.hash.hash(h)
    }
}

fn struct_eq(a: &Formula, b: &Formula, memo: &mut HashSet<(usize, usize)>) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    if a.0.hash != b.0.hash {
        return false;
    }
    if memo.contains(&(a.addr(), b.addr())) {
        return true;
    }
    let ok = match (a.kind(), b.kind()) {
        (Kind::Top, Kind::Top) | (Kind::Bot, Kind::Bot) => true,
        (Kind::Atom { rel: r1, args: a1, positive: p1 }, Kind::Atom { rel: r2, args: a2, positive: p2 }) => {
            r1 == r2 && a1 == a2 && p1 == p2
        }
        (Kind::And(c1), Kind::And(c2)) | (Kind::Or(c1), Kind::Or(c2)) => {
            c1.len() == c2.len() && c1.iter().zip(c2).all(|(x, y)| struct_eq(x, y, memo))
        }
        (Kind::Exists(v1, b1), Kind::Exists(v2, b2)) | (Kind::Forall(v1, b1), Kind::Forall(v2, b2)) => {
            v1 == v2 && struct_eq(b1, b2, memo)
        }
        _ => false,
    };
    if ok {
        memo.insert((a.addr(), b.addr()));
    }
    ok
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_sexp(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_sexp(self))
    }
}

/// Hash-consing factory: structurally equal nodes built through one
/// interner are the same allocation.
#[derive(Default)]
pub struct Interner {
    table: HashMap<u64, Vec<Formula>>,
    negations: HashMap<usize, (Formula, Formula)>,
}

fn shallow_eq(a: &Kind, b: &Kind) -> bool {
    match (a, b) {
        (Kind::Top, Kind::Top) | (Kind::Bot, Kind::Bot) => true,
        (Kind::Atom { rel: r1, args: a1, positive: p1 }, Kind::Atom { rel: r2, args: a2, positive: p2 }) => {
            r1 == r2 && a1 == a2 && p1 == p2
        }
        (Kind::And(c1), Kind::And(c2)) | (Kind::Or(c1), Kind::Or(c2)) => {
            c1.len() == c2.len() && c1.iter().zip(c2).all(|(x, y)| x.ptr_eq(y))
        }
        (Kind::Exists(v1, b1), Kind::Exists(v2, b2)) | (Kind::Forall(v1, b1), Kind::Forall(v2, b2)) => {
            v1 == v2 && b1.ptr_eq(b2)
        }
        _ => false,
    }
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mk(&mut self, kind: Kind) -> Formula {
        let h = node_hash(&kind);
        let bucket = self.table.entry(h).or_default();
        if let Some(f) = bucket.iter().find(|f| shallow_eq(f.kind(), &kind)) {
            return f.clone();
        }
        let f = Formula::from_kind(kind);
        bucket.push(f.clone());
        f
    }

    pub fn top(&mut self) -> Formula {
        self.mk(Kind::Top)
    }
    pub fn bot(&mut self) -> Formula {
        self.mk(Kind::Bot)
    }
    pub fn atom(&mut self, rel: &str, args: Vec<Var>, positive: bool) -> Formula {
        self.mk(Kind::Atom { rel: rel.into(), args: args.into(), positive })
    }
    pub fn eq(&mut self, a: Var, b: Var, positive: bool) -> Formula {
        self.atom(EQ, vec![a, b], positive)
    }
    pub fn and(&mut self, c: Vec<Formula>) -> Formula {
        self.mk(Kind::And(c))
    }
    pub fn or(&mut self, c: Vec<Formula>) -> Formula {
        self.mk(Kind::Or(c))
    }
    pub fn exists(&mut self, v: Vec<Var>, b: Formula) -> Formula {
        self.mk(Kind::Exists(v.into(), b))
    }
    pub fn forall(&mut self, v: Vec<Var>, b: Formula) -> Formula {
        self.mk(Kind::Forall(v.into(), b))
    }

    /// Or with duplicate children (by identity) removed, order kept.
    pub fn or_dedup(&mut self, c: Vec<Formula>) -> Formula {
        let mut seen = HashSet::new();
        let c = c.into_iter().filter(|f| seen.insert(f.addr())).collect();
        self.or(c)
    }

    pub fn and_dedup(&mut self, c: Vec<Formula>) -> Formula {
        let mut seen = HashSet::new();
        let c = c.into_iter().filter(|f| seen.insert(f.addr())).collect();
        self.and(c)
    }

    /// Interned NNF negation, memoized across calls.
    pub fn negate(&mut self, f: &Formula) -> Formula {
        if let Some((_, g)) = self.negations.get(&f.addr()) {
            return g.clone();
        }
        let g = match f.kind() {
            Kind::Top => self.bot(),
            Kind::Bot => self.top(),
            Kind::Atom { rel, args, positive } => {
                self.mk(Kind::Atom { rel: rel.clone(), args: args.clone(), positive: !positive })
            }
            Kind::And(c) => {
                let c = c.iter().map(|x| self.negate(x)).collect();
                self.or(c)
            }
            Kind::Or(c) => {
                let c = c.iter().map(|x| self.negate(x)).collect();
                self.and(c)
            }
            Kind::Exists(v, b) => {
                let nb = self.negate(b);
                self.mk(Kind::Forall(v.clone(), nb))
            }
            Kind::Forall(v, b) => {
                let nb = self.negate(b);
                self.mk(Kind::Exists(v.clone(), nb))
            }
        };
        self.negations.insert(f.addr(), (f.clone(), g.clone()));
        g
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RankKind {
    QuantifierFree,
    Sigma,
    Pi,
}

/// Least class of the hierarchy containing a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Rank {
    pub kind: RankKind,
    pub level: usize,
    /// Least `n` with the formula in Σ_n, and least `n` with it in Π_n.
    pub sigma: usize,
    pub pi: usize,
}

impl Rank {
    pub fn qf() -> Rank {
        Rank { kind: RankKind::QuantifierFree, level: 0, sigma: 0, pi: 0 }
    }
    pub fn is_pi(&self, n: usize) -> bool {
        self.kind == RankKind::Pi && self.level == n
    }
    pub fn is_sigma(&self, n: usize) -> bool {
        self.kind == RankKind::Sigma && self.level == n
    }
    /// Membership in Π_n, which contains every lower level.
    pub fn in_pi(&self, n: usize) -> bool {
        self.pi <= n
    }
    pub fn in_sigma(&self, n: usize) -> bool {
        self.sigma <= n
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RankKind::QuantifierFree => write!(f, "QuantifierFree/0"),
            RankKind::Sigma => write!(f, "Sigma/{}", self.level),
            RankKind::Pi => write!(f, "Pi/{}", self.level),
        }
    }
}

/// Σ and Π levels bottom-up. Ties (a formula whose least Σ and Π levels
/// coincide) go to the polarity of the outermost quantifier below any
/// connectives, and to Π for conjunctions without one.
pub fn rank(f: &Formula) -> Rank {
    let mut memo: HashMap<usize, (usize, usize, Option<RankKind>)> = HashMap::new();
    let (s, p, lead) = rank_rec(f, &mut memo);
    if s == 0 && p == 0 {
        return Rank::qf();
    }
    let kind = if s < p {
        RankKind::Sigma
    } else if p < s {
        RankKind::Pi
    } else {
        match (f.kind(), lead) {
            (Kind::Or(_), None) => RankKind::Sigma,
            (_, Some(k)) => k,
            _ => RankKind::Pi,
        }
    };
    Rank { kind, level: s.min(p), sigma: s, pi: p }
}

fn rank_rec(f: &Formula, memo: &mut HashMap<usize, (usize, usize, Option<RankKind>)>) -> (usize, usize, Option<RankKind>) {
    if let Some(&v) = memo.get(&f.addr()) {
        return v;
    }
    let v = match f.kind() {
        Kind::Top | Kind::Bot | Kind::Atom { .. } => (0, 0, None),
        Kind::And(c) | Kind::Or(c) => {
            let mut s = 0;
            let mut p = 0;
            let mut lead = None;
            for x in c {
                let (a, b, l) = rank_rec(x, memo);
                if a.max(b) > s.max(p) || lead.is_none() {
                    lead = l.or(lead);
                }
                s = s.max(a);
                p = p.max(b);
            }
            (s, p, lead)
        }
        Kind::Exists(v, b) => {
            let (bs, bp, bl) = rank_rec(b, memo);
            if v.is_empty() {
                (bs, bp, bl)
            } else {
                let s = bs.min(bp + 1).max(1);
                (s, s + 1, Some(RankKind::Sigma))
            }
        }
        Kind::Forall(v, b) => {
            let (bs, bp, bl) = rank_rec(b, memo);
            if v.is_empty() {
                (bs, bp, bl)
            } else {
                let p = bp.min(bs + 1).max(1);
                (p + 1, p, Some(RankKind::Pi))
            }
        }
    };
    memo.insert(f.addr(), v);
    v
}

/// Merges nested same-kind connectives and quantifier blocks, drops neutral
/// elements and collapses singleton connectives. Equivalence preserving.
pub fn flatten(f: &Formula) -> Formula {
    let mut memo = HashMap::new();
    let mut intr = Interner::new();
    flatten_rec(f, &mut memo, &mut intr)
}

fn flatten_rec(f: &Formula, memo: &mut HashMap<usize, Formula>, intr: &mut Interner) -> Formula {
    if let Some(g) = memo.get(&f.addr()) {
        return g.clone();
    }
    let g = match f.kind() {
        Kind::Top => intr.top(),
        Kind::Bot => intr.bot(),
        Kind::Atom { rel, args, positive } => intr.mk(Kind::Atom { rel: rel.clone(), args: args.clone(), positive: *positive }),
        Kind::And(c) | Kind::Or(c) => {
            let is_and = matches!(f.kind(), Kind::And(_));
            let mut out = Vec::new();
            let mut absorbed = false;
            for x in c {
                let y = flatten_rec(x, memo, intr);
                match (y.kind(), is_and) {
                    (Kind::Top, true) | (Kind::Bot, false) => {}
                    (Kind::Bot, true) | (Kind::Top, false) => absorbed = true,
                    (Kind::And(d), true) | (Kind::Or(d), false) => out.extend(d.iter().cloned()),
                    _ => out.push(y),
                }
            }
            let mut seen = HashSet::new();
            out.retain(|x| seen.insert(x.addr()));
            if absorbed {
                if is_and { intr.bot() } else { intr.top() }
            } else if out.is_empty() {
                if is_and { intr.top() } else { intr.bot() }
            } else if out.len() == 1 {
                out.pop().unwrap()
            } else if is_and {
                intr.and(out)
            } else {
                intr.or(out)
            }
        }
        Kind::Exists(v, b) | Kind::Forall(v, b) => {
            let is_ex = matches!(f.kind(), Kind::Exists(..));
            let body = flatten_rec(b, memo, intr);
            // Vacuous variables stay: they matter on the empty domain.
            let mut vars: Vec<Var> = v.to_vec();
            let mut dedup = HashSet::new();
            vars.retain(|x| dedup.insert(*x));
            let (vars, body) = match (body.kind(), is_ex) {
                (Kind::Exists(w, inner), true) | (Kind::Forall(w, inner), false)
                    if w.iter().all(|x| !vars.contains(x)) =>
                {
                    let mut all = vars.clone();
                    all.extend(w.iter().copied());
                    (all, inner.clone())
                }
                _ => (vars, body),
            };
            if vars.is_empty() {
                body
            } else if is_ex {
                intr.exists(vars, body)
            } else {
                intr.forall(vars, body)
            }
        }
    };
    memo.insert(f.addr(), g.clone());
    g
}
