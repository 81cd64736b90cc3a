//! Finite relational structures, labeled point multisets, staged snapshots,
//! and the conversions between them.

use crate::error::{BnfError, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

pub type Elem = u32;
pub type LabelId = u32;

/// A relation symbol with its arity. Equality is built in and never listed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelSym {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Signature {
    pub relations: Vec<RelSym>,
}

impl Signature {
    pub fn new<S: Into<String>>(rels: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let sig = Signature {
            relations: rels
                .into_iter()
                .map(|(n, a)| RelSym { name: n.into(), arity: a })
                .collect(),
        };
        sig.validate()?;
        Ok(sig)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for r in &self.relations {
            if r.arity == 0 {
                return Err(BnfError::Signature(format!("relation {} has arity 0", r.name)));
            }
            if r.name.is_empty() || r.name == "=" || r.name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')') {
                return Err(BnfError::Signature(format!("illegal relation name {:?}", r.name)));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(BnfError::Signature(format!("duplicate relation {}", r.name)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn arity(&self, rel: usize) -> usize {
        self.relations[rel].arity
    }

    /// Signature with `other`'s symbols appended; clashes are an error.
    pub fn concat(&self, other: &Signature) -> Result<Signature> {
        let mut rels = self.relations.clone();
        rels.extend(other.relations.iter().cloned());
        let sig = Signature { relations: rels };
        sig.validate()?;
        Ok(sig)
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.relations.iter().map(|r| format!("{}/{}", r.name, r.arity)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug)]
enum Lookup {
    Dense(Vec<u64>),
    Sparse(HashSet<Box<[Elem]>>),
}

#[derive(Clone, Debug)]
struct Extent {
    tuples: Vec<Box<[Elem]>>,
    lookup: Lookup,
}

const DENSE_LIMIT: u128 = 1 << 26;

impl Extent {
    fn build(arity: usize, n: usize, mut tuples: Vec<Box<[Elem]>>) -> Extent {
        tuples.sort();
        tuples.dedup();
        let cells = (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
        let lookup = if cells <= DENSE_LIMIT {
            let mut bits = vec![0u64; (cells as usize).div_ceil(64).max(1)];
            for t in &tuples {
                let c = code(t, n);
                bits[c / 64] |= 1 << (c % 64);
            }
            Lookup::Dense(bits)
        } else {
            Lookup::Sparse(tuples.iter().cloned().collect())
        };
        Extent { tuples, lookup }
    }

    #[inline]
    fn contains(&self, t: &[Elem], n: usize) -> bool {
        match &self.lookup {
            Lookup::Dense(bits) => {
                let c = code(t, n);
                bits[c / 64] >> (c % 64) & 1 == 1
            }
            Lookup::Sparse(set) => set.contains(t),
        }
    }
}

#[inline]
fn code(t: &[Elem], n: usize) -> usize {
    let mut c = 0usize;
    for &x in t.iter().rev() {
        c = c * n + x as usize;
    }
    c
}

/// An explicit finite structure over a relational signature.
#[derive(Clone, Debug)]
pub struct FiniteStructure {
    sig: Signature,
    n: usize,
    ext: Vec<Extent>,
}

impl PartialEq for FiniteStructure {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig
            && self.n == other.n
            && self.ext.iter().zip(&other.ext).all(|(a, b)| a.tuples == b.tuples)
    }
}
impl Eq for FiniteStructure {}

impl FiniteStructure {
    /// `extents[r]` lists the tuples of relation `r` in signature order.
    pub fn new(sig: Signature, n: usize, extents: Vec<Vec<Vec<Elem>>>) -> Result<Self> {
        sig.validate()?;
        if extents.len() != sig.len() {
            return Err(BnfError::Structure(format!(
                "{} extents given for {} relations",
                extents.len(),
                sig.len()
            )));
        }
        let mut ext = Vec::with_capacity(sig.len());
        for (r, tuples) in extents.into_iter().enumerate() {
            let arity = sig.arity(r);
            let mut boxed = Vec::with_capacity(tuples.len());
            for t in tuples {
                if t.len() != arity {
                    return Err(BnfError::Structure(format!(
                        "tuple {:?} in {} has length {}, arity is {}",
                        t,
                        sig.relations[r].name,
                        t.len(),
                        arity
                    )));
                }
                if let Some(&e) = t.iter().find(|&&e| e as usize >= n) {
                    return Err(BnfError::Element { elem: e, size: n });
                }
                boxed.push(t.into_boxed_slice());
            }
            ext.push(Extent::build(arity, n, boxed));
        }
        Ok(FiniteStructure { sig, n, ext })
    }

    pub fn empty(sig: Signature, n: usize) -> Result<Self> {
        let k = sig.len();
        Self::new(sig, n, vec![Vec::new(); k])
    }

    /// Build from `(relation name, tuples)` pairs; unnamed relations are empty.
    pub fn from_named(sig: Signature, n: usize, named: &[(&str, Vec<Vec<Elem>>)]) -> Result<Self> {
        let mut extents = vec![Vec::new(); sig.len()];
        for (name, tuples) in named {
            let r = sig
                .index_of(name)
                .ok_or_else(|| BnfError::Structure(format!("unknown relation {name}")))?;
            extents[r].extend(tuples.iter().cloned());
        }
        Self::new(sig, n, extents)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn holds(&self, rel: usize, t: &[Elem]) -> bool {
        self.ext[rel].contains(t, self.n)
    }

    pub fn tuples(&self, rel: usize) -> &[Box<[Elem]>] {
        &self.ext[rel].tuples
    }

    pub fn tuple_count(&self) -> usize {
        self.ext.iter().map(|e| e.tuples.len()).sum()
    }

    pub fn extents(&self) -> Vec<Vec<Vec<Elem>>> {
        self.ext
            .iter()
            .map(|e| e.tuples.iter().map(|t| t.to_vec()).collect())
            .collect()
    }

    /// Image under the bijection `x -> perm[x]`.
    pub fn renumber(&self, perm: &[Elem]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(BnfError::Structure("permutation length differs from domain size".into()));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p as usize >= self.n || std::mem::replace(&mut seen[p as usize], true) {
                return Err(BnfError::Structure("not a permutation".into()));
            }
        }
        let extents = self
            .ext
            .iter()
            .map(|e| e.tuples.iter().map(|t| t.iter().map(|&x| perm[x as usize]).collect()).collect())
            .collect();
        Self::new(self.sig.clone(), self.n, extents)
    }

    /// Induced substructure on `elems` (distinct), renumbered so `elems[i]` becomes `i`.
    pub fn induced(&self, elems: &[Elem]) -> Result<Self> {
        let mut pos = vec![u32::MAX; self.n];
        for (i, &e) in elems.iter().enumerate() {
            if e as usize >= self.n {
                return Err(BnfError::Element { elem: e, size: self.n });
            }
            if pos[e as usize] != u32::MAX {
                return Err(BnfError::Structure(format!("element {e} repeated in induced set")));
            }
            pos[e as usize] = i as u32;
        }
        let extents = self
            .ext
            .iter()
            .map(|e| {
                e.tuples
                    .iter()
                    .filter(|t| t.iter().all(|&x| pos[x as usize] != u32::MAX))
                    .map(|t| t.iter().map(|&x| pos[x as usize]).collect())
                    .collect()
            })
            .collect();
        Self::new(self.sig.clone(), elems.len(), extents)
    }

    /// Keep only the relations named in `sig` (which must be a sub-signature).
    pub fn reduct(&self, sig: &Signature) -> Result<Self> {
        let mut extents = Vec::with_capacity(sig.len());
        for r in &sig.relations {
            let i = self
                .sig
                .index_of(&r.name)
                .filter(|&i| self.sig.arity(i) == r.arity)
                .ok_or_else(|| BnfError::SignatureMismatch {
                    left: self.sig.describe(),
                    right: sig.describe(),
                })?;
            extents.push(self.ext[i].tuples.iter().map(|t| t.to_vec()).collect());
        }
        Self::new(sig.clone(), self.n, extents)
    }

    /// Elements in breadth-first order from `base` along shared tuples; the
    /// base itself is excluded and unreachable elements follow in index order.
    pub fn bfs_order(&self, base: &[Elem]) -> Vec<Elem> {
        let inc = self.incidence();
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::new();
        for &b in base {
            if !seen[b as usize] {
                seen[b as usize] = true;
                queue.push_back(b);
            }
        }
        let mut out = Vec::new();
        let mut next_root = 0usize;
        loop {
            while let Some(x) = queue.pop_front() {
                for &(r, ti) in &inc[x as usize] {
                    for &y in self.ext[r as usize].tuples[ti as usize].iter() {
                        if !seen[y as usize] {
                            seen[y as usize] = true;
                            out.push(y);
                            queue.push_back(y);
                        }
                    }
                }
            }
            while next_root < self.n && seen[next_root] {
                next_root += 1;
            }
            if next_root == self.n {
                break;
            }
            seen[next_root] = true;
            out.push(next_root as Elem);
            queue.push_back(next_root as Elem);
        }
        out
    }

    /// For each element, the (relation, tuple index) pairs it occurs in.
    pub fn incidence(&self) -> Vec<Vec<(u32, u32)>> {
        let mut inc = vec![Vec::new(); self.n];
        for (r, e) in self.ext.iter().enumerate() {
            for (ti, t) in e.tuples.iter().enumerate() {
                let mut last = u32::MAX;
                let mut sorted: Vec<Elem> = t.to_vec();
                sorted.sort_unstable();
                for x in sorted {
                    if x != last {
                        inc[x as usize].push((r as u32, ti as u32));
                        last = x;
                    }
                }
            }
        }
        inc
    }

    /// DOT rendering of the first binary relation (undirected when symmetric).
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for v in 0..self.n {
            s.push_str(&format!("  {v};\n"));
        }
        if let Some(r) = self.sig.relations.iter().position(|r| r.arity == 2) {
            for t in self.tuples(r) {
                if t[0] < t[1] || (t[0] == t[1]) {
                    s.push_str(&format!("  {} -- {};\n", t[0], t[1]));
                } else if !self.holds(r, &[t[1], t[0]]) {
                    s.push_str(&format!("  {} -- {} [dir=forward];\n", t[0], t[1]));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Serialize, Deserialize)]
struct FiniteStructureJson {
    signature: Signature,
    domain_size: usize,
    #[serde(default)]
    extents: BTreeMap<String, Vec<Vec<Elem>>>,
}

impl Serialize for FiniteStructure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut extents = BTreeMap::new();
        for (r, rel) in self.sig.relations.iter().enumerate() {
            extents.insert(rel.name.clone(), self.ext[r].tuples.iter().map(|t| t.to_vec()).collect());
        }
        FiniteStructureJson { signature: self.sig.clone(), domain_size: self.n, extents }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FiniteStructureJson::deserialize(d)?;
        let mut extents = vec![Vec::new(); j.signature.len()];
        for (name, tuples) in j.extents {
            let r = j
                .signature
                .index_of(&name)
                .ok_or_else(|| serde::de::Error::custom(format!("extent for unknown relation {name}")))?;
            extents[r] = tuples;
        }
        FiniteStructure::new(j.signature, j.domain_size, extents).map_err(serde::de::Error::custom)
    }
}

/// Equality of atomic types under the first-|t|-symbols convention.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomicDiagram {
    pub len: usize,
    pub symbols: usize,
    pub bits: Vec<bool>,
}

impl AtomicDiagram {
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Number of signature symbols visible to a tuple of length `len`.
pub fn visible_symbols(sig_len: usize, len: usize) -> usize {
    sig_len.min(len)
}

/// Calls `f` on every position tuple of the given arity over `[0, len)` in
/// lexicographic order.
pub fn for_each_position_tuple(arity: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len == 0 {
        return;
    }
    let mut idx = vec![0usize; arity];
    loop {
        f(&idx);
        let mut k = arity;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < len {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Canonical bit vector: relation atoms for the first |t| symbols in
/// lexicographic position order, then equalities `x_i = x_j` for `i < j`.
pub fn atomic_type(s: &FiniteStructure, t: &[Elem]) -> Result<AtomicDiagram> {
    if let Some(&e) = t.iter().find(|&&e| e as usize >= s.n) {
        return Err(BnfError::Element { elem: e, size: s.n });
    }
    let k = visible_symbols(s.sig.len(), t.len());
    let mut bits = Vec::new();
    let mut buf = Vec::new();
    for r in 0..k {
        for_each_position_tuple(s.sig.arity(r), t.len(), |pos| {
            buf.clear();
            buf.extend(pos.iter().map(|&p| t[p]));
            bits.push(s.holds(r, &buf));
        });
    }
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            bits.push(t[i] == t[j]);
        }
    }
    Ok(AtomicDiagram { len: t.len(), symbols: k, bits })
}

/// Disjoint union; `b`'s elements are shifted past `a`'s.
pub fn disjoint_union(a: &FiniteStructure, b: &FiniteStructure) -> Result<FiniteStructure> {
    if a.sig != b.sig {
        return Err(BnfError::SignatureMismatch { left: a.sig.describe(), right: b.sig.describe() });
    }
    let shift = a.n as Elem;
    let extents = a
        .ext
        .iter()
        .zip(&b.ext)
        .map(|(ea, eb)| {
            ea.tuples
                .iter()
                .map(|t| t.to_vec())
                .chain(eb.tuples.iter().map(|t| t.iter().map(|&x| x + shift).collect()))
                .collect()
        })
        .collect();
    FiniteStructure::new(a.sig.clone(), a.n + b.n, extents)
}

/// Point multiplicity; `Infinite` stands for "infinitely many copies".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl Multiplicity {
    pub fn count(self, copies: u32) -> u64 {
        match self {
            Multiplicity::Finite(k) => k,
            Multiplicity::Infinite => copies as u64,
        }
    }
}

impl std::ops::Add for Multiplicity {
    type Output = Multiplicity;
    fn add(self, o: Multiplicity) -> Multiplicity {
        match (self, o) {
            (Multiplicity::Finite(a), Multiplicity::Finite(b)) => Multiplicity::Finite(a + b),
            _ => Multiplicity::Infinite,
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(k) => write!(f, "{k}"),
            Multiplicity::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(k) => s.serialize_u64(*k),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(0) => Err(serde::de::Error::custom("multiplicity must be positive")),
            Raw::N(k) => Ok(Multiplicity::Finite(k)),
            Raw::S(s) if s == "inf" => Ok(Multiplicity::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad multiplicity {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub id: String,
    pub labels: BTreeSet<LabelId>,
    pub mult: Multiplicity,
}

pub type LabelMultiset = BTreeMap<BTreeSet<LabelId>, Multiplicity>;

/// A multiset of points, each carrying a finite label set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledStructure {
    universe: Vec<LabelId>,
    kill: Option<LabelId>,
    points: BTreeMap<String, (BTreeSet<LabelId>, Multiplicity)>,
}

#[derive(Serialize, Deserialize)]
struct LabeledJson {
    universe: Vec<LabelId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kill: Option<LabelId>,
    points: Vec<LabeledPoint>,
}

impl Serialize for LabeledStructure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LabeledJson { universe: self.universe.clone(), kill: self.kill, points: self.points().collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabeledStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LabeledJson::deserialize(d)?;
        let mut ls = LabeledStructure::new(j.universe, j.kill).map_err(serde::de::Error::custom)?;
        for p in j.points {
            ls.insert(p.id, p.labels, p.mult).map_err(serde::de::Error::custom)?;
        }
        Ok(ls)
    }
}

impl LabeledStructure {
    pub fn new(universe: Vec<LabelId>, kill: Option<LabelId>) -> Result<Self> {
        let set: BTreeSet<_> = universe.iter().collect();
        if set.len() != universe.len() {
            return Err(BnfError::Structure("label universe has duplicates".into()));
        }
        if let Some(k) = kill {
            if !set.contains(&k) {
                return Err(BnfError::Structure(format!("kill label {k} not in universe")));
            }
        }
        Ok(LabeledStructure { universe, kill, points: BTreeMap::new() })
    }

    pub fn universe(&self) -> &[LabelId] {
        &self.universe
    }

    pub fn kill(&self) -> Option<LabelId> {
        self.kill
    }

    /// Adds or replaces a point, enforcing universe membership and kill absorption.
    pub fn insert(&mut self, id: impl Into<String>, labels: BTreeSet<LabelId>, mult: Multiplicity) -> Result<()> {
        let id = id.into();
        if mult == Multiplicity::Finite(0) {
            return Err(BnfError::Structure(format!("point {id} has multiplicity 0")));
        }
        if let Some(l) = labels.iter().find(|l| !self.universe.contains(l)) {
            return Err(BnfError::Structure(format!("point {id} carries label {l} outside the universe")));
        }
        if let Some(k) = self.kill {
            if labels.contains(&k) && labels.len() != self.universe.len() {
                return Err(BnfError::Structure(format!("killed point {id} lacks some labels")));
            }
        }
        self.points.insert(id, (labels, mult));
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<(&BTreeSet<LabelId>, Multiplicity)> {
        self.points.get(id).map(|(l, m)| (l, *m))
    }

    pub fn points(&self) -> impl Iterator<Item = LabeledPoint> + '_ {
        self.points
            .iter()
            .map(|(id, (labels, mult))| LabeledPoint { id: id.clone(), labels: labels.clone(), mult: *mult })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Label sets with summed multiplicities; `Infinite` absorbs.
    pub fn label_multiset(&self) -> LabelMultiset {
        let mut m: LabelMultiset = BTreeMap::new();
        for (labels, mult) in self.points.values() {
            m.entry(labels.clone()).and_modify(|x| *x = *x + *mult).or_insert(*mult);
        }
        m
    }

    /// One point per distinct label set, ids `p0, p1, ...` in label-set order.
    pub fn canonical(&self) -> LabeledStructure {
        let mut out = LabeledStructure { universe: self.universe.clone(), kill: self.kill, points: BTreeMap::new() };
        for (i, (labels, mult)) in self.label_multiset().into_iter().enumerate() {
            out.points.insert(format!("p{i:04}"), (labels, mult));
        }
        out
    }

    /// Isomorphism as point multisets: equal canonical label multisets.
    pub fn label_isomorphic(&self, other: &LabeledStructure) -> bool {
        self.label_multiset() == other.label_multiset()
    }

    /// Pointwise inclusion used for stage monotonicity.
    pub fn is_substage_of(&self, later: &LabeledStructure) -> std::result::Result<(), String> {
        for (id, (labels, mult)) in &self.points {
            match later.points.get(id) {
                None => return Err(format!("point {id} disappears")),
                Some((l2, m2)) => {
                    if !labels.is_subset(l2) {
                        return Err(format!("point {id} loses labels"));
                    }
                    if mult > m2 {
                        return Err(format!("point {id} shrinks multiplicity"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A monotone sequence of labeled snapshots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StagedStructure {
    pub stages: Vec<LabeledStructure>,
}

impl StagedStructure {
    pub fn last(&self) -> Option<&LabeledStructure> {
        self.stages.last()
    }

    pub fn check_monotone(&self) -> Result<()> {
        for (s, w) in self.stages.windows(2).enumerate() {
            w[0].is_substage_of(&w[1])
                .map_err(|e| BnfError::Structure(format!("stage {s} -> {}: {e}", s + 1)))?;
        }
        Ok(())
    }
}

/// Extension search mode for back-and-forth queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExtMode {
    Representatives,
    #[default]
    FullDomain,
}

/// Finitization knobs shared by materialization and queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub copies: u32,
    pub label_bound: u32,
    pub horizon: u32,
    pub ext_mode: ExtMode,
}

impl Default for TruncationParams {
    fn default() -> Self {
        TruncationParams { copies: 3, label_bound: 32, horizon: 200, ext_mode: ExtMode::FullDomain }
    }
}

/// How labels become relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// One unary relation `L<k>` per label id.
    #[default]
    Predicate,
    /// One symmetric edge relation; each point is a flower center with a
    /// cycle of length k+3 for label k.
    Graph,
    /// As `Graph`, plus a two-edge stem on every center so centers are definable.
    MarkedGraph,
}

/// A materialized structure plus the owning point of every element.
#[derive(Clone, Debug)]
pub struct Materialized {
    pub structure: FiniteStructure,
    pub owner: Vec<String>,
    /// For graph encodings, the center vertex of every point copy.
    pub centers: Vec<Elem>,
}

pub fn label_signature(nlabels: usize) -> Signature {
    Signature { relations: (0..nlabels).map(|k| RelSym { name: format!("L{k}"), arity: 1 }).collect() }
}

pub fn graph_signature() -> Signature {
    Signature { relations: vec![RelSym { name: "E".into(), arity: 2 }] }
}

/// Expands a labeled structure into a finite one under the chosen encoding.
pub fn materialize(ls: &LabeledStructure, p: &TruncationParams, enc: Encoding) -> Result<FiniteStructure> {
    materialize_tracked(ls, p, enc).map(|m| m.structure)
}

pub fn materialize_tracked(ls: &LabeledStructure, p: &TruncationParams, enc: Encoding) -> Result<Materialized> {
    if p.copies == 0 {
        return Err(BnfError::Structure("copies must be at least 1".into()));
    }
    let bound = ls.universe.len() as u32;
    for (i, &l) in ls.universe.iter().enumerate() {
        if l != i as u32 {
            return Err(BnfError::Structure("label universe must be indexed 0..n".into()));
        }
    }
    for (labels, _) in ls.points.values() {
        if let Some(&l) = labels.iter().find(|&&l| l >= bound) {
            return Err(BnfError::Truncation { label: l, bound });
        }
    }
    let mut owner = Vec::new();
    let mut centers = Vec::new();
    match enc {
        Encoding::Predicate => {
            let sig = label_signature(bound as usize);
            let mut extents = vec![Vec::new(); bound as usize];
            for (id, (labels, mult)) in &ls.points {
                for _ in 0..mult.count(p.copies) {
                    let e = owner.len() as Elem;
                    for &l in labels {
                        extents[l as usize].push(vec![e]);
                    }
                    centers.push(e);
                    owner.push(id.clone());
                }
            }
            let n = owner.len();
            Ok(Materialized { structure: FiniteStructure::new(sig, n, extents)?, owner, centers })
        }
        Encoding::Graph | Encoding::MarkedGraph => {
            let mut edges: Vec<Vec<Elem>> = Vec::new();
            let link = |a: Elem, b: Elem, edges: &mut Vec<Vec<Elem>>| {
                edges.push(vec![a, b]);
                edges.push(vec![b, a]);
            };
            for (id, (labels, mult)) in &ls.points {
                for _ in 0..mult.count(p.copies) {
                    let c = owner.len() as Elem;
                    owner.push(id.clone());
                    centers.push(c);
                    if enc == Encoding::MarkedGraph {
                        let s1 = owner.len() as Elem;
                        owner.push(id.clone());
                        let s2 = owner.len() as Elem;
                        owner.push(id.clone());
                        link(c, s1, &mut edges);
                        link(s1, s2, &mut edges);
                    }
                    for &l in labels {
                        let mut prev = c;
                        for _ in 0..l + 2 {
                            let v = owner.len() as Elem;
                            owner.push(id.clone());
                            link(prev, v, &mut edges);
                            prev = v;
                        }
                        link(prev, c, &mut edges);
                    }
                }
            }
            let n = owner.len();
            Ok(Materialized { structure: FiniteStructure::new(graph_signature(), n, vec![edges])?, owner, centers })
        }
    }
}

/// Reads label-set counts back from a materialization.
pub fn decode_label_multiset(fs: &FiniteStructure, enc: Encoding) -> Result<BTreeMap<BTreeSet<LabelId>, u64>> {
    let mut out: BTreeMap<BTreeSet<LabelId>, u64> = BTreeMap::new();
    match enc {
        Encoding::Predicate => {
            for e in 0..fs.domain_size() as Elem {
                let labels: BTreeSet<LabelId> = (0..fs.signature().len())
                    .filter(|&r| fs.holds(r, &[e]))
                    .map(|r| {
                        fs.signature().relations[r].name[1..]
                            .parse::<LabelId>()
                            .map_err(|_| BnfError::Structure("predicate names must be L<k>".into()))
                    })
                    .collect::<Result<_>>()?;
                *out.entry(labels).or_default() += 1;
            }
        }
        Encoding::Graph | Encoding::MarkedGraph => {
            let n = fs.domain_size();
            let mut adj = vec![Vec::new(); n];
            for t in fs.tuples(0) {
                adj[t[0] as usize].push(t[1]);
            }
            let mut seen = vec![false; n];
            for root in 0..n {
                if seen[root] {
                    continue;
                }
                let mut comp = vec![root as Elem];
                seen[root] = true;
                let mut i = 0;
                while i < comp.len() {
                    for &y in &adj[comp[i] as usize] {
                        if !seen[y as usize] {
                            seen[y as usize] = true;
                            comp.push(y);
                        }
                    }
                    i += 1;
                }
                let labels = decode_flower(&comp, &adj, enc == Encoding::MarkedGraph)?;
                *out.entry(labels).or_default() += 1;
            }
        }
    }
    Ok(out)
}

fn decode_flower(comp: &[Elem], adj: &[Vec<Elem>], marked: bool) -> Result<BTreeSet<LabelId>> {
    let bad = || BnfError::Structure("component is not a flower".into());
    let deg = |v: Elem| adj[v as usize].len();
    let mut labels = BTreeSet::new();
    let center = if marked {
        // The center is the neighbor of the stem's middle vertex that is not a leaf.
        let leaf = *comp.iter().find(|&&v| deg(v) == 1).ok_or_else(bad)?;
        let mid = adj[leaf as usize][0];
        *adj[mid as usize].iter().find(|&&v| v != leaf).ok_or_else(bad)?
    } else if comp.len() == 1 {
        return Ok(labels);
    } else if let Some(&c) = comp.iter().find(|&&v| deg(v) > 2) {
        c
    } else {
        // A single cycle: one label, any vertex serves as center.
        if comp.iter().any(|&v| deg(v) != 2) {
            return Err(bad());
        }
        labels.insert(comp.len() as LabelId - 3);
        return Ok(labels);
    };
    let stem = if marked { 3 } else { 1 };
    let mut counted = stem;
    for &first in &adj[center as usize] {
        // Walk each petal once, starting from its lower-numbered end.
        let mut prev = center;
        let mut cur = first;
        let mut len = 1usize;
        let mut path = vec![first];
        while cur != center {
            if deg(cur) != 2 {
                if marked && deg(cur) <= 2 {
                    break;
                }
                return Err(bad());
            }
            let next = if adj[cur as usize][0] == prev { adj[cur as usize][1] } else { adj[cur as usize][0] };
            prev = cur;
            cur = next;
            len += 1;
            path.push(cur);
            if len > comp.len() + 1 {
                return Err(bad());
            }
        }
        if cur != center {
            continue;
        }
        let last = path[path.len() - 2];
        if first < last {
            if len < 3 {
                return Err(bad());
            }
            labels.insert(len as LabelId - 3);
            counted += len - 1;
        }
    }
    if counted != comp.len() {
        return Err(bad());
    }
    Ok(labels)
}
