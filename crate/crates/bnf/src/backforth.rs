//! Memoized decision procedure for the back-and-forth relations.
//!
//! `(A, a) <=_0 (B, b)` holds when both tuples have the same atomic diagram
//! over the first `min(|a|, #sym)` symbols. For `m > 0`, `(A, a) <=_m (B, b)`
//! holds when every extension of `b` in `B` is matched by an extension of `a`
//! in `A` with `(B, b') <=_{m-1} (A, a')`. Extensions come from one of two
//! modes: the whole remaining domain, or one representative per orbit of the
//! pointwise stabilizer of `b`.

use crate::error::{BnfError, Result};
use crate::structures::{for_each_position_tuple, Elem, ExtMode, FiniteStructure, TruncationParams};
use crate::symmetry::OrbitFinder;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

/// `(id of A, a) <=_level (id of B, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BfQuery {
    pub left: (usize, Vec<Elem>),
    pub right: (usize, Vec<Elem>),
    pub level: usize,
}

impl BfQuery {
    pub fn new(left: usize, a: Vec<Elem>, right: usize, b: Vec<Elem>, level: usize) -> Self {
        BfQuery { left: (left, a), right: (right, b), level }
    }

    pub fn sentences(left: usize, right: usize, level: usize) -> Self {
        Self::new(left, vec![], right, vec![], level)
    }
}

impl std::fmt::Display for BfQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(S{}, {:?}) <=_{} (S{}, {:?})", self.left.0, self.left.1, self.level, self.right.0, self.right.1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BfConfig {
    pub mode: ExtMode,
    pub copies: u32,
    pub max_level: usize,
    /// Restrict existential candidates to stabilizer-orbit representatives.
    pub symmetry_breaking: bool,
    /// Cap on memo entries; `None` means unbounded.
    pub max_cells: Option<usize>,
}

impl Default for BfConfig {
    fn default() -> Self {
        BfConfig { mode: ExtMode::FullDomain, copies: 3, max_level: 8, symmetry_breaking: true, max_cells: env_max_cells() }
    }
}

impl BfConfig {
    pub fn from_params(p: &TruncationParams) -> Self {
        BfConfig { mode: p.ext_mode, copies: p.copies, ..Default::default() }
    }

    pub fn with_mode(mut self, mode: ExtMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Reads the `BNF_MAX_CELLS` resource cap.
pub fn env_max_cells() -> Option<usize> {
    std::env::var("BNF_MAX_CELLS").ok().and_then(|v| v.trim().parse().ok())
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct BfStats {
    pub queries: usize,
    pub memo_hits: usize,
    pub memo_entries: usize,
}

type MemoKey = (u32, u32, u32, u32, Box<[Elem]>);
type SetKey = (usize, Vec<Elem>);

/// Registered structures plus memo tables. Safe to share across threads.
pub struct BfTable {
    structs: Vec<Arc<FiniteStructure>>,
    cfg: BfConfig,
    memo: Mutex<HashMap<MemoKey, bool>>,
    orbits: Mutex<HashMap<SetKey, Arc<Vec<Elem>>>>,
    exts: Mutex<HashMap<SetKey, Arc<Vec<Elem>>>>,
    queries: AtomicUsize,
    hits: AtomicUsize,
}

impl BfTable {
    pub fn new(cfg: BfConfig) -> Self {
        BfTable {
            structs: Vec::new(),
            cfg,
            memo: Mutex::new(HashMap::new()),
            orbits: Mutex::new(HashMap::new()),
            exts: Mutex::new(HashMap::new()),
            queries: AtomicUsize::new(0),
            hits: AtomicUsize::new(0),
        }
    }

    pub fn with_structures(structs: impl IntoIterator<Item = FiniteStructure>, cfg: BfConfig) -> Result<Self> {
        let mut t = Self::new(cfg);
        for s in structs {
            t.register(s)?;
        }
        Ok(t)
    }

    pub fn config(&self) -> &BfConfig {
        &self.cfg
    }

    /// Adds a structure and returns its id. All structures share one signature.
    pub fn register(&mut self, s: FiniteStructure) -> Result<usize> {
        if let Some(first) = self.structs.first() {
            if first.signature() != s.signature() {
                return Err(BnfError::SignatureMismatch {
                    left: first.signature().describe(),
                    right: s.signature().describe(),
                });
            }
        }
        self.structs.push(Arc::new(s));
        Ok(self.structs.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.structs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structs.is_empty()
    }

    pub fn structure(&self, id: usize) -> Result<&FiniteStructure> {
        self.structs.get(id).map(|s| s.as_ref()).ok_or(BnfError::Unregistered(id))
    }

    pub fn stats(&self) -> BfStats {
        BfStats {
            queries: self.queries.load(Ordering::Relaxed),
            memo_hits: self.hits.load(Ordering::Relaxed),
            memo_entries: self.memo.lock().unwrap().len(),
        }
    }

    /// Drops memoized verdicts, keeping extension and orbit caches.
    pub fn clear_memo(&self) {
        self.memo.lock().unwrap().clear();
    }

    fn validate(&self, q: &BfQuery) -> Result<()> {
        let a = self.structure(q.left.0)?;
        let b = self.structure(q.right.0)?;
        if q.level > self.cfg.max_level {
            return Err(BnfError::LevelCapacity { level: q.level, max: self.cfg.max_level });
        }
        if q.left.1.len() != q.right.1.len() {
            return Err(BnfError::TupleLength { left: q.left.1.len(), right: q.right.1.len() });
        }
        for (s, t) in [(a, &q.left.1), (b, &q.right.1)] {
            if let Some(&e) = t.iter().find(|&&e| e as usize >= s.domain_size()) {
                return Err(BnfError::Element { elem: e, size: s.domain_size() });
            }
        }
        if self.cfg.mode == ExtMode::Representatives && self.cfg.copies as usize <= q.level {
            return Err(BnfError::CopiesTooSmall { copies: self.cfg.copies, level: q.level });
        }
        Ok(())
    }

    /// Decides the query.
    pub fn leq(&self, q: &BfQuery) -> Result<bool> {
        self.validate(q)?;
        self.rec(q.level, q.left.0, &q.left.1, q.right.0, &q.right.1)
    }

    /// Sentence-level shorthand: `A <=_level B` on empty tuples.
    pub fn leq_structures(&self, a: usize, b: usize, level: usize) -> Result<bool> {
        self.leq(&BfQuery::sentences(a, b, level))
    }

    /// The extension tuple used for the universal side over `base` in structure `id`.
    pub fn extension(&self, id: usize, base: &[Elem]) -> Result<Arc<Vec<Elem>>> {
        let s = self.structure(id)?;
        let key = (id, base.to_vec());
        if let Some(e) = self.exts.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let rest = match self.cfg.mode {
            ExtMode::FullDomain => s.bfs_order(base),
            ExtMode::Representatives => self.orbit_reps(id, base)?.to_vec(),
        };
        let ext = Arc::new(pad_extension(s, base, rest));
        self.exts.lock().unwrap().insert(key, ext.clone());
        Ok(ext)
    }

    fn orbit_reps(&self, id: usize, base: &[Elem]) -> Result<Arc<Vec<Elem>>> {
        let key = (id, set_of(base));
        if let Some(o) = self.orbits.lock().unwrap().get(&key) {
            return Ok(o.clone());
        }
        let s = self.structure(id)?;
        let reps: Vec<Elem> = OrbitFinder::new(s).stabilizer_orbits(&key.1).into_iter().map(|o| o[0]).collect();
        let reps = Arc::new(reps);
        self.orbits.lock().unwrap().insert(key, reps.clone());
        Ok(reps)
    }

    fn rec(&self, m: usize, l: usize, lt: &[Elem], r: usize, rt: &[Elem]) -> Result<bool> {
        self.queries.fetch_add(1, Ordering::Relaxed);
        let (a, b) = (&self.structs[l], &self.structs[r]);
        if !diagrams_equal(a, lt, b, rt) {
            return Ok(false);
        }
        if m == 0 {
            return Ok(true);
        }
        let mut kv = Vec::with_capacity(lt.len() * 2);
        kv.extend_from_slice(lt);
        kv.extend_from_slice(rt);
        let key: MemoKey = (m as u32, l as u32, r as u32, lt.len() as u32, kv.into_boxed_slice());
        if let Some(&v) = self.memo.lock().unwrap().get(&key) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(v);
        }
        let ext = self.extension(r, rt)?;
        let mut rfull = rt.to_vec();
        rfull.extend_from_slice(&ext);
        let mut lfull = lt.to_vec();
        let v = self.exists(m, l, &mut lfull, r, &rfull)?;
        let mut memo = self.memo.lock().unwrap();
        if let Some(cap) = self.cfg.max_cells {
            if memo.len() >= cap {
                return Err(BnfError::Resource(format!(
                    "partial table: memo cap {cap} reached at (S{l}, {lt:?}) <=_{m} (S{r}, {rt:?})"
                )));
            }
        }
        memo.insert(key, v);
        Ok(v)
    }

    /// Is there a completion of `lfull` in `S_l` matching `rfull` at level `m - 1`?
    fn exists(&self, m: usize, l: usize, lfull: &mut Vec<Elem>, r: usize, rfull: &[Elem]) -> Result<bool> {
        let p = lfull.len();
        if p == rfull.len() {
            return self.rec(m - 1, r, rfull, l, lfull);
        }
        let target = rfull[p];
        let forced = rfull[..p].iter().position(|&x| x == target).map(|q| lfull[q]);
        let cands: Arc<Vec<Elem>> = match forced {
            Some(d) => Arc::new(vec![d]),
            None if self.cfg.symmetry_breaking => self.orbit_reps(l, lfull)?,
            None => {
                let s = &self.structs[l];
                Arc::new((0..s.domain_size() as Elem).filter(|e| !lfull.contains(e)).collect())
            }
        };
        let (a, b) = (&self.structs[l], &self.structs[r]);
        let k = a.signature().len().min(rfull.len());
        for &d in cands.iter() {
            lfull.push(d);
            let ok = last_position_consistent(b, &rfull[..=p], a, lfull, k)
                && (m < 2 || p + 1 == rfull.len() || self.rec(m - 1, r, &rfull[..=p], l, lfull)?)
                && self.exists(m, l, lfull, r, rfull)?;
            lfull.pop();
            if ok {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn set_of(t: &[Elem]) -> Vec<Elem> {
    let mut v = t.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Pads so that base plus extension reaches at least `max(#sym, |base| + 1)`
/// positions on nonempty domains, repeating the last element.
pub fn pad_extension(s: &FiniteStructure, base: &[Elem], mut rest: Vec<Elem>) -> Vec<Elem> {
    if s.domain_size() == 0 {
        return rest;
    }
    let target = s.signature().len().max(base.len() + 1);
    while base.len() + rest.len() < target {
        let last = rest.last().or(base.last()).copied().unwrap_or(0);
        rest.push(last);
    }
    rest
}

/// Full-domain extension: remaining elements in BFS order from `base`, padded.
pub fn full_extension(s: &FiniteStructure, base: &[Elem]) -> Vec<Elem> {
    pad_extension(s, base, s.bfs_order(base))
}

/// Level-0 test: equal diagrams over the first `min(|t|, #sym)` symbols.
pub fn diagrams_equal(a: &FiniteStructure, ta: &[Elem], b: &FiniteStructure, tb: &[Elem]) -> bool {
    if ta.len() != tb.len() {
        return false;
    }
    for i in 0..ta.len() {
        for j in i + 1..ta.len() {
            if (ta[i] == ta[j]) != (tb[i] == tb[j]) {
                return false;
            }
        }
    }
    let k = a.signature().len().min(ta.len());
    let mut ok = true;
    let (mut ba, mut bb) = (Vec::new(), Vec::new());
    for r in 0..k {
        for_each_position_tuple(a.signature().arity(r), ta.len(), |pos| {
            if ok {
                ba.clear();
                bb.clear();
                ba.extend(pos.iter().map(|&p| ta[p]));
                bb.extend(pos.iter().map(|&p| tb[p]));
                ok = a.holds(r, &ba) == b.holds(r, &bb);
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Checks atoms and equalities involving the last position only.
fn last_position_consistent(b: &FiniteStructure, tb: &[Elem], a: &FiniteStructure, ta: &[Elem], k: usize) -> bool {
    let p = ta.len() - 1;
    for q in 0..p {
        if (ta[q] == ta[p]) != (tb[q] == tb[p]) {
            return false;
        }
    }
    let mut ok = true;
    let (mut ba, mut bb) = (Vec::new(), Vec::new());
    for r in 0..k {
        for_each_position_tuple(a.signature().arity(r), p + 1, |pos| {
            if ok && pos.contains(&p) {
                ba.clear();
                bb.clear();
                ba.extend(pos.iter().map(|&i| ta[i]));
                bb.extend(pos.iter().map(|&i| tb[i]));
                ok = a.holds(r, &ba) == b.holds(r, &bb);
            }
        });
        if !ok {
            return false;
        }
    }
    true
}

/// Convenience wrapper.
pub fn bf_leq(table: &BfTable, q: &BfQuery) -> Result<bool> {
    table.leq(q)
}

/// Every `(i, a) <=_level (j, b)` cell for tuples up to `max_len`.
#[derive(Clone, Debug, Serialize)]
pub struct BfMatrix {
    pub level: usize,
    pub max_len: usize,
    pub cells: Vec<(BfQuery, bool)>,
}

impl BfMatrix {
    pub fn get(&self, q: &BfQuery) -> Option<bool> {
        self.cells.iter().find(|(c, _)| c == q).map(|(_, v)| *v)
    }
}

/// Calls `f` on every tuple of length `len` over `n` elements, lexicographically.
pub fn for_each_tuple(n: usize, len: usize, mut f: impl FnMut(&[Elem])) {
    if len == 0 {
        f(&[]);
        return;
    }
    for_each_position_tuple(len, n, |pos| {
        let t: Vec<Elem> = pos.iter().map(|&p| p as Elem).collect();
        f(&t);
    });
}

/// Tabulates the relation; fails with a partial-table error naming the first
/// query that would exceed `max_cells`.
pub fn build_table(table: &BfTable, level: usize, max_len: usize, max_cells: Option<usize>) -> Result<BfMatrix> {
    let mut queries = Vec::new();
    for i in 0..table.len() {
        for j in 0..table.len() {
            for len in 0..=max_len {
                let (ni, nj) = (table.structure(i)?.domain_size(), table.structure(j)?.domain_size());
                for_each_tuple(ni, len, |a| {
                    for_each_tuple(nj, len, |b| queries.push(BfQuery::new(i, a.to_vec(), j, b.to_vec(), level)));
                });
            }
        }
    }
    let mut cells = Vec::with_capacity(queries.len());
    for q in queries {
        if let Some(cap) = max_cells {
            if cells.len() >= cap {
                return Err(BnfError::Resource(format!(
                    "partial table: {} of at least {} cells, blocked at {q}",
                    cells.len(),
                    cells.len() + 1
                )));
            }
        }
        let v = table.leq(&q)?;
        cells.push((q, v));
    }
    Ok(BfMatrix { level, max_len, cells })
}

/// Every tuple of `s` with the same level-0 diagram as `t`, lexicographically.
pub fn diagram_matches(s: &FiniteStructure, t: &[Elem]) -> Vec<Vec<Elem>> {
    let k = s.signature().len().min(t.len());
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t.len());
    fn go(s: &FiniteStructure, t: &[Elem], k: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if cur.len() == t.len() {
            out.push(cur.clone());
            return;
        }
        for d in 0..s.domain_size() as Elem {
            cur.push(d);
            if last_position_consistent(s, &t[..cur.len()], s, cur, k) {
                go(s, t, k, cur, out);
            }
            cur.pop();
        }
    }
    go(s, t, k, &mut cur, &mut out);
    out
}

/// Extension tuples searched for `base`: the whole remaining domain, or one
/// representative per orbit of its pointwise stabilizer.
pub fn extension_candidates(s: &FiniteStructure, base: &[Elem], mode: ExtMode) -> Vec<Vec<Elem>> {
    let rest = match mode {
        ExtMode::FullDomain => s.bfs_order(base),
        ExtMode::Representatives => {
            let mut set = base.to_vec();
            set.sort_unstable();
            set.dedup();
            OrbitFinder::new(s).stabilizer_orbits(&set).into_iter().map(|o| o[0]).collect()
        }
    };
    vec![pad_extension(s, base, rest)]
}
