//! Independent reference oracles and the exhaustive small-structure grid.
//!
//! Nothing here calls into `backforth` or `symmetry`: isomorphism is plain
//! backtracking over degree profiles, the back-and-forth recursion ranges
//! over every extension up to a length cap, and the formula basis is checked
//! by evaluation.

use crate::backforth::for_each_tuple;
use crate::error::{BnfError, Result};
use crate::formulas::{Evaluator, Formula, Interner, Var, RankKind};
use crate::formulas::diagram_formula;
use crate::structures::{for_each_position_tuple, Elem, FiniteStructure, Signature};
use serde::Serialize;
use rustc_hash::FxHashMap as HashMap;
use std::collections::{BTreeMap, BTreeSet};

/// Outcome of the reference isomorphism test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IsoWitness {
    Bijection(Vec<Elem>),
    Refuted { reason: String },
}

impl IsoWitness {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoWitness::Bijection(_))
    }
}

type Profile = Vec<u32>;

fn profiles(s: &FiniteStructure) -> Vec<Profile> {
    let sig = s.signature();
    let width: usize = sig.relations.iter().map(|r| r.arity + 1).sum();
    let mut p = vec![vec![0u32; width]; s.domain_size()];
    let mut off = 0;
    for r in 0..sig.len() {
        let a = sig.arity(r);
        for t in s.tuples(r) {
            for (pos, &x) in t.iter().enumerate() {
                p[x as usize][off + pos] += 1;
            }
            if t.iter().all(|&x| x == t[0]) {
                p[t[0] as usize][off + a] += 1;
            }
        }
        off += a + 1;
    }
    p
}

fn neighbors(s: &FiniteStructure) -> Vec<Vec<(usize, usize)>> {
    let mut inc = vec![Vec::new(); s.domain_size()];
    for r in 0..s.signature().len() {
        for (ti, t) in s.tuples(r).iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &x in t.iter() {
                if seen.insert(x) {
                    inc[x as usize].push((r, ti));
                }
            }
        }
    }
    inc
}

/// Reference isomorphism test: degree-profile pruning plus two-way partial
/// consistency along a breadth-first order.
pub fn iso(a: &FiniteStructure, b: &FiniteStructure) -> IsoWitness {
    let refute = |reason: String| IsoWitness::Refuted { reason };
    if a.signature() != b.signature() {
        return refute("signatures differ".into());
    }
    if a.domain_size() != b.domain_size() {
        return refute(format!("cardinality {} vs {}", a.domain_size(), b.domain_size()));
    }
    for r in 0..a.signature().len() {
        if a.tuples(r).len() != b.tuples(r).len() {
            return refute(format!(
                "relation {} has {} vs {} tuples",
                a.signature().relations[r].name,
                a.tuples(r).len(),
                b.tuples(r).len()
            ));
        }
    }
    let (pa, pb) = (profiles(a), profiles(b));
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        let diff = sa.iter().zip(&sb).find(|(x, y)| x != y).map(|(x, _)| x.clone()).unwrap_or_default();
        return refute(format!("degree profile multisets differ (first mismatch {diff:?})"));
    }
    let order = a.bfs_order(&[]);
    let (ia, ib) = (neighbors(a), neighbors(b));
    let n = a.domain_size();
    let mut map = vec![Elem::MAX; n];
    let mut inv = vec![Elem::MAX; n];
    fn consistent(
        x: &FiniteStructure,
        y: &FiniteStructure,
        inc: &[Vec<(usize, usize)>],
        u: Elem,
        f: &[Elem],
    ) -> bool {
        let mut buf = Vec::new();
        for &(r, ti) in &inc[u as usize] {
            let t = &x.tuples(r)[ti];
            if t.iter().all(|&z| f[z as usize] != Elem::MAX) {
                buf.clear();
                buf.extend(t.iter().map(|&z| f[z as usize]));
                if !y.holds(r, &buf) {
                    return false;
                }
            }
        }
        true
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        i: usize,
        order: &[Elem],
        a: &FiniteStructure,
        b: &FiniteStructure,
        pa: &[Profile],
        pb: &[Profile],
        ia: &[Vec<(usize, usize)>],
        ib: &[Vec<(usize, usize)>],
        map: &mut [Elem],
        inv: &mut [Elem],
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let u = order[i];
        for v in 0..b.domain_size() as Elem {
            if inv[v as usize] != Elem::MAX || pa[u as usize] != pb[v as usize] {
                continue;
            }
            map[u as usize] = v;
            inv[v as usize] = u;
            if consistent(a, b, ia, u, map) && consistent(b, a, ib, v, inv) && go(i + 1, order, a, b, pa, pb, ia, ib, map, inv) {
                return true;
            }
            map[u as usize] = Elem::MAX;
            inv[v as usize] = Elem::MAX;
        }
        false
    }
    if go(0, &order, a, b, &pa, &pb, &ia, &ib, &mut map, &mut inv) {
        IsoWitness::Bijection(map)
    } else {
        refute("exhaustive search found no bijection".into())
    }
}

/// Atomic diagram as a bit code; positions beyond 128 bits are an error.
fn diag_code(s: &FiniteStructure, t: &[Elem]) -> (u8, u128) {
    let k = s.signature().len().min(t.len());
    let mut code = 0u128;
    let mut bit = 0u32;
    let mut buf = Vec::new();
    for r in 0..k {
        for_each_position_tuple(s.signature().arity(r), t.len(), |pos| {
            buf.clear();
            buf.extend(pos.iter().map(|&p| t[p]));
            if s.holds(r, &buf) {
                code |= 1u128 << bit;
            }
            bit += 1;
        });
    }
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            if t[i] == t[j] {
                code |= 1u128 << bit;
            }
            bit += 1;
        }
    }
    assert!(bit <= 128, "diagram too long for the reference oracle");
    (t.len() as u8, code)
}

/// The literal recursion of the back-and-forth definition: every extension
/// of the right tuple of length at most `cap` must be answered.
///
/// A level-`k` profile of `(A, a)` records, for each extension length, the
/// set of level-`k-1` profiles reached by extending `a`. Level 0 profiles are
/// atomic diagrams. Comparison is then a finite game on interned ids.
pub struct UnrestrictedOracle {
    structs: Vec<FiniteStructure>,
    cap: usize,
    tuple_cap: usize,
    /// `[level][structure]`, indexed by tuple code; `u32::MAX` is unset.
    ids: Vec<Vec<Vec<u32>>>,
    tables: Vec<Vec<Vec<Vec<u32>>>>,
    index: Vec<HashMap<Vec<Vec<u32>>, u32>>,
    diags: HashMap<(u8, u128), u32>,
    memo: HashMap<(usize, u32, u32), bool>,
}

impl UnrestrictedOracle {
    /// `tuple_cap` bounds the starting tuples the oracle will accept.
    pub fn new(structs: Vec<FiniteStructure>, cap: usize, tuple_cap: usize) -> Self {
        UnrestrictedOracle {
            structs,
            cap,
            tuple_cap,
            ids: Vec::new(),
            tables: Vec::new(),
            index: Vec::new(),
            diags: HashMap::default(),
            memo: HashMap::default(),
        }
    }

    fn code(n: usize, t: &[Elem]) -> usize {
        let mut offset = 0usize;
        let mut pow = 1usize;
        for _ in 0..t.len() {
            offset += pow;
            pow *= n;
        }
        offset + t.iter().fold(0usize, |acc, &x| acc * n + x as usize)
    }

    fn slot(&mut self, k: usize, id: usize, t: &[Elem]) -> &mut u32 {
        while self.ids.len() <= k {
            self.ids.push(vec![Vec::new(); self.structs.len()]);
        }
        let c = Self::code(self.structs[id].domain_size(), t);
        let v = &mut self.ids[k][id];
        if v.len() <= c {
            v.resize(c + 1, u32::MAX);
        }
        &mut v[c]
    }

    fn profile(&mut self, k: usize, id: usize, t: &[Elem]) -> u32 {
        let known = *self.slot(k, id, t);
        if known != u32::MAX {
            return known;
        }
        let p = if k == 0 {
            let code = diag_code(&self.structs[id], t);
            let next = self.diags.len() as u32;
            *self.diags.entry(code).or_insert(next)
        } else {
            let n = self.structs[id].domain_size();
            let mut sets = Vec::with_capacity(self.cap + 1);
            for len in 0..=self.cap {
                let mut exts = Vec::new();
                for_each_tuple(n, len, |e| exts.push(e.to_vec()));
                let mut set = BTreeSet::new();
                let mut full = t.to_vec();
                for e in exts {
                    full.truncate(t.len());
                    full.extend_from_slice(&e);
                    set.insert(self.profile(k - 1, id, &full));
                }
                sets.push(set.into_iter().collect::<Vec<u32>>());
            }
            while self.tables.len() < k {
                self.tables.push(Vec::new());
                self.index.push(HashMap::default());
            }
            let (tab, idx) = (&mut self.tables[k - 1], &mut self.index[k - 1]);
            *idx.entry(sets.clone()).or_insert_with(|| {
                tab.push(sets);
                tab.len() as u32 - 1
            })
        };
        *self.slot(k, id, t) = p;
        p
    }

    /// Profile game: `x <=_k y` where x, y are level-`k` profile ids.
    fn game(&mut self, k: usize, x: u32, y: u32) -> bool {
        if k == 0 {
            return x == y;
        }
        if let Some(&v) = self.memo.get(&(k, x, y)) {
            return v;
        }
        let (px, py) = (self.tables[k - 1][x as usize].clone(), self.tables[k - 1][y as usize].clone());
        let v = px.iter().zip(&py).all(|(sx, sy)| sy.iter().all(|&e| sx.iter().any(|&d| self.game(k - 1, e, d))));
        self.memo.insert((k, x, y), v);
        v
    }

    /// `(structs[l], lt) <=_m (structs[r], rt)` by unrestricted recursion.
    pub fn leq(&mut self, m: usize, l: usize, lt: &[Elem], r: usize, rt: &[Elem]) -> Result<bool> {
        for id in [l, r] {
            if id >= self.structs.len() {
                return Err(BnfError::Unregistered(id));
            }
        }
        if lt.len() != rt.len() {
            return Err(BnfError::TupleLength { left: lt.len(), right: rt.len() });
        }
        if lt.len() > self.tuple_cap {
            return Err(BnfError::Resource(format!("tuple length {} exceeds cap {}", lt.len(), self.tuple_cap)));
        }
        if self.structs[l].signature() != self.structs[r].signature() {
            return Err(BnfError::SignatureMismatch {
                left: self.structs[l].signature().describe(),
                right: self.structs[r].signature().describe(),
            });
        }
        for (id, t) in [(l, lt), (r, rt)] {
            if let Some(&e) = t.iter().find(|&&e| e as usize >= self.structs[id].domain_size()) {
                return Err(BnfError::Element { elem: e, size: self.structs[id].domain_size() });
            }
        }
        let (x, y) = (self.profile(m, l, lt), self.profile(m, r, rt));
        Ok(self.game(m, x, y))
    }

    /// Number of distinct profiles per level, from level 1 up.
    pub fn profile_counts(&self) -> Vec<usize> {
        self.tables.iter().map(|t| t.len()).collect()
    }
}

/// Convenience form over a structure list.
pub fn bf_unrestricted(structs: &[FiniteStructure], m: usize, l: usize, lt: &[Elem], r: usize, rt: &[Elem], cap: usize) -> Result<bool> {
    UnrestrictedOracle::new(structs.to_vec(), cap, lt.len()).leq(m, l, lt, r, rt)
}

/// Which structure families make up the exhaustive grid.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridConfig {
    /// Largest domain for simple graphs (symmetric, loop-free E) with a unary P.
    pub simple_max: usize,
    /// Largest domain for arbitrary directed E (loops allowed) with a unary P.
    pub directed_max: usize,
    pub max_tuple: usize,
    pub max_level: usize,
    /// Extension length cap for the unrestricted oracle.
    pub ext_cap: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { simple_max: 3, directed_max: 3, max_tuple: 2, max_level: 2, ext_cap: 3 }
    }
}

pub fn grid_signature() -> Signature {
    Signature::new([("P", 1), ("E", 2)]).expect("static signature")
}

fn canonical_code(s: &FiniteStructure) -> Vec<Vec<Vec<Elem>>> {
    let n = s.domain_size();
    let mut perm: Vec<Elem> = (0..n as Elem).collect();
    let mut best: Option<Vec<Vec<Vec<Elem>>>> = None;
    loop {
        let code: Vec<Vec<Vec<Elem>>> = (0..s.signature().len())
            .map(|r| {
                let mut ts: Vec<Vec<Elem>> =
                    s.tuples(r).iter().map(|t| t.iter().map(|&x| perm[x as usize]).collect()).collect();
                ts.sort();
                ts
            })
            .collect();
        if best.as_ref().map_or(true, |b| code < *b) {
            best = Some(code);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap_or_default()
}

fn next_permutation(p: &mut [Elem]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// All grid structures up to isomorphism, smallest first.
pub fn grid_structures(cfg: &GridConfig) -> Vec<FiniteStructure> {
    let sig = grid_signature();
    let mut seen = BTreeMap::new();
    let nmax = cfg.simple_max.max(cfg.directed_max);
    for n in 0..=nmax {
        let mut edge_sets: Vec<Vec<Vec<Elem>>> = Vec::new();
        let pairs: Vec<(Elem, Elem)> = (0..n as Elem).flat_map(|x| (0..n as Elem).map(move |y| (x, y))).collect();
        if n <= cfg.directed_max {
            for mask in 0u64..(1u64 << pairs.len()) {
                edge_sets.push(
                    pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &(x, y))| vec![x, y]).collect(),
                );
            }
        }
        if n <= cfg.simple_max {
            let und: Vec<(Elem, Elem)> = pairs.iter().copied().filter(|(x, y)| x < y).collect();
            for mask in 0u64..(1u64 << und.len()) {
                edge_sets.push(
                    und.iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .flat_map(|(_, &(x, y))| [vec![x, y], vec![y, x]])
                        .collect(),
                );
            }
        }
        for edges in edge_sets {
            for pmask in 0u64..(1u64 << n) {
                let ps: Vec<Vec<Elem>> = (0..n as Elem).filter(|x| pmask >> x & 1 == 1).map(|x| vec![x]).collect();
                let s = FiniteStructure::new(sig.clone(), n, vec![ps, edges.clone()]).expect("grid structure");
                seen.entry((n, canonical_code(&s))).or_insert(s);
            }
        }
    }
    seen.into_values().collect()
}

/// A generated family of sentences in bounded normal form: alternating
/// quantifier blocks over disjunctions of complete atomic diagrams.
#[derive(Clone, Debug, Serialize)]
pub struct FormulaBasis {
    pub signature: Signature,
    pub kind: RankKind,
    pub level: usize,
    /// Longest single quantifier block; total prefix is at most `level` blocks.
    pub prefix_bound: usize,
    #[serde(skip)]
    pub sentences: Vec<Formula>,
}

/// Builds the characteristic sentences of every universe structure.
///
/// For `C` in the universe, `pi^m_C` holds in `D` iff `C <=_m D` and
/// `sigma^m_C` holds in `D` iff `D <=_m C`, whenever `D` is no larger than
/// the largest universe structure. Each level answers the empty extension
/// plus one block of length `max(maxsize - distinct, #sym - |c|, 1)`.
pub struct BasisBuilder {
    universe: Vec<FiniteStructure>,
    intr: Interner,
    max_dom: usize,
    nsym: usize,
    cache: HashMap<(bool, usize, usize, Vec<Elem>), Formula>,
}

impl BasisBuilder {
    pub fn new(universe: Vec<FiniteStructure>) -> Result<Self> {
        if let Some(first) = universe.first() {
            if let Some(bad) = universe.iter().find(|s| s.signature() != first.signature()) {
                return Err(BnfError::SignatureMismatch {
                    left: first.signature().describe(),
                    right: bad.signature().describe(),
                });
            }
        }
        let max_dom = universe.iter().map(|s| s.domain_size()).max().unwrap_or(0);
        let nsym = universe.first().map_or(0, |s| s.signature().len());
        Ok(BasisBuilder { universe, intr: Interner::new(), max_dom, nsym, cache: HashMap::default() })
    }

    fn block(&self, t: &[Elem]) -> usize {
        let d = t.iter().collect::<BTreeSet<_>>().len();
        self.max_dom.saturating_sub(d).max(self.nsym.saturating_sub(t.len())).max(1)
    }

    pub fn prefix_bound(&self) -> usize {
        self.max_dom.max(self.nsym).max(1)
    }

    /// `pi` selects the universal form.
    fn hintikka(&mut self, pi: bool, m: usize, c: usize, t: &[Elem]) -> Formula {
        let key = (pi, m, c, t.to_vec());
        if let Some(f) = self.cache.get(&key) {
            return f.clone();
        }
        let f = if m == 0 {
            let s = self.universe[c].clone();
            diagram_formula(&mut self.intr, &s, t)
        } else {
            let len = self.block(t);
            let n = self.universe[c].domain_size();
            let mut exts = Vec::new();
            for_each_tuple(n, len, |e| exts.push(e.to_vec()));
            let ys: Vec<Var> = (t.len()..t.len() + len).map(|v| v as Var).collect();
            let mut kids = Vec::with_capacity(exts.len());
            for e in exts {
                let mut full = t.to_vec();
                full.extend_from_slice(&e);
                kids.push(self.hintikka(!pi, m - 1, c, &full));
            }
            // The empty extension matters on the empty domain, where the
            // block quantifier is vacuous.
            let stay = self.hintikka(!pi, m - 1, c, t);
            if pi {
                let body = self.intr.or_dedup(kids);
                let block = self.intr.forall(ys, body);
                self.intr.and_dedup(vec![stay, block])
            } else {
                let mut out = vec![stay];
                for k in kids {
                    out.push(self.intr.exists(ys.clone(), k));
                }
                self.intr.and_dedup(out)
            }
        };
        self.cache.insert(key, f.clone());
        f
    }

    /// The level-`n` basis of the given polarity.
    pub fn basis(&mut self, kind: RankKind, n: usize) -> Result<FormulaBasis> {
        let pi = match kind {
            RankKind::Pi => true,
            RankKind::Sigma => false,
            RankKind::QuantifierFree => {
                return Err(BnfError::Level("basis polarity must be Sigma or Pi".into()));
            }
        };
        let mut sentences = vec![self.intr.top(), self.intr.bot()];
        for c in 0..self.universe.len() {
            sentences.push(self.hintikka(pi, n, c, &[]));
        }
        let mut seen = BTreeSet::new();
        sentences.retain(|f| seen.insert(f.addr()));
        Ok(FormulaBasis {
            signature: self.universe.first().map(|s| s.signature().clone()).unwrap_or_default(),
            kind,
            level: n,
            prefix_bound: self.prefix_bound(),
            sentences,
        })
    }
}

/// All Π_n basis sentences over the universe.
pub fn enumerate_pi(universe: &[FiniteStructure], n: usize) -> Result<FormulaBasis> {
    BasisBuilder::new(universe.to_vec())?.basis(RankKind::Pi, n)
}

/// All Σ_n basis sentences over the universe.
pub fn enumerate_sigma(universe: &[FiniteStructure], n: usize) -> Result<FormulaBasis> {
    BasisBuilder::new(universe.to_vec())?.basis(RankKind::Sigma, n)
}

/// Truth vector of every sentence on `s`.
pub fn truth_vector(sentences: &[Formula], s: &FiniteStructure) -> Result<Vec<bool>> {
    let mut ev = Evaluator::new(s);
    sentences.iter().map(|f| ev.eval_sentence(f)).collect()
}

/// `true` where every sentence true under `a` is also true under `b`.
pub fn transfers(a: &[bool], b: &[bool]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| !x || y)
}

/// Result of comparing the decision procedure with the reference recursion.
#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub structures: usize,
    pub queries: u64,
    pub disagreements: u64,
    /// The first few disagreeing queries.
    pub examples: Vec<String>,
    pub profile_counts: Vec<usize>,
}

impl AgreementReport {
    pub fn pass(&self) -> bool {
        self.disagreements == 0
    }
}

/// Runs every query `(S_l, a) <=_m (S_r, b)` with `|a| = |b| <= max_tuple`
/// and `m <= max_level` through both `table` and the reference oracle.
pub fn oracle_agreement(
    table: &crate::backforth::BfTable,
    structs: &[FiniteStructure],
    cfg: &GridConfig,
) -> Result<AgreementReport> {
    use crate::backforth::BfQuery;
    let mut oracle = UnrestrictedOracle::new(structs.to_vec(), cfg.ext_cap, cfg.max_tuple);
    let mut rep = AgreementReport {
        structures: structs.len(),
        queries: 0,
        disagreements: 0,
        examples: Vec::new(),
        profile_counts: Vec::new(),
    };
    let tuples: Vec<Vec<Vec<Vec<Elem>>>> = structs
        .iter()
        .map(|s| {
            (0..=cfg.max_tuple)
                .map(|k| {
                    let mut v = Vec::new();
                    for_each_tuple(s.domain_size(), k, |t| v.push(t.to_vec()));
                    v
                })
                .collect()
        })
        .collect();
    for l in 0..structs.len() {
        table.clear_memo();
        for r in 0..structs.len() {
            for k in 0..=cfg.max_tuple {
                for a in &tuples[l][k] {
                    for b in &tuples[r][k] {
                        for m in 0..=cfg.max_level {
                            let fast = table.leq(&BfQuery::new(l, a.clone(), r, b.clone(), m))?;
                            let slow = oracle.leq(m, l, a, r, b)?;
                            rep.queries += 1;
                            if fast != slow {
                                rep.disagreements += 1;
                                if rep.examples.len() < 10 {
                                    rep.examples.push(format!(
                                        "(S{l}, {a:?}) <=_{m} (S{r}, {b:?}): decided {fast}, reference {slow}"
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    table.clear_memo();
    rep.profile_counts = oracle.profile_counts();
    Ok(rep)
}

/// Karp transfer at one level over a structure list.
#[derive(Clone, Debug, Serialize)]
pub struct KarpReport {
    pub level: usize,
    pub pi_sentences: usize,
    pub sigma_sentences: usize,
    pub pairs: u64,
    /// Pairs where `A <=_m B` disagrees with Π transfer from A to B.
    pub pi_failures: u64,
    /// Pairs where `A <=_m B` disagrees with Σ transfer from B to A.
    pub sigma_failures: u64,
    pub examples: Vec<String>,
}

impl KarpReport {
    pub fn pass(&self) -> bool {
        self.pi_failures == 0 && self.sigma_failures == 0
    }
}

/// Checks `A <=_m B` against both transfer directions for every ordered pair.
pub fn karp_transfer(table: &crate::backforth::BfTable, structs: &[FiniteStructure], level: usize) -> Result<KarpReport> {
    let mut builder = BasisBuilder::new(structs.to_vec())?;
    let pi = builder.basis(RankKind::Pi, level)?;
    let sigma = builder.basis(RankKind::Sigma, level)?;
    for (basis, pol) in [(&pi, true), (&sigma, false)] {
        for f in &basis.sentences {
            let r = f.rank();
            if (if pol { r.pi } else { r.sigma }) > level {
                return Err(BnfError::Formula(format!("basis sentence of rank {r} exceeds level {level}")));
            }
        }
    }
    let mut tv_pi = Vec::with_capacity(structs.len());
    let mut tv_sigma = Vec::with_capacity(structs.len());
    for s in structs {
        tv_pi.push(truth_vector(&pi.sentences, s)?);
        tv_sigma.push(truth_vector(&sigma.sentences, s)?);
    }
    let mut rep = KarpReport {
        level,
        pi_sentences: pi.sentences.len(),
        sigma_sentences: sigma.sentences.len(),
        pairs: 0,
        pi_failures: 0,
        sigma_failures: 0,
        examples: Vec::new(),
    };
    for a in 0..structs.len() {
        for b in 0..structs.len() {
            let leq = table.leq_structures(a, b, level)?;
            let p = transfers(&tv_pi[a], &tv_pi[b]);
            let s = transfers(&tv_sigma[b], &tv_sigma[a]);
            rep.pairs += 1;
            rep.pi_failures += (leq != p) as u64;
            rep.sigma_failures += (leq != s) as u64;
            if (leq != p || leq != s) && rep.examples.len() < 10 {
                rep.examples.push(format!("S{a} <=_{level} S{b} is {leq}; Pi transfer {p}; Sigma transfer {s}"));
            }
        }
    }
    Ok(rep)
}
