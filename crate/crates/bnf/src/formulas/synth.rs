//! Type formulas, separating sentences and canonical Scott sentences.
//!
//! All formulas here are exact relative to the structures they were built
//! from. Truth on structures outside that list is only guaranteed where the
//! construction says so (Scott sentences are exact on every finite structure).

use super::{Formula, Interner, Var};
use crate::backforth::{diagram_matches, for_each_tuple, BfConfig, BfQuery, BfTable};
use crate::error::{BnfError, Result};
use crate::structures::{for_each_position_tuple, Elem, ExtMode, FiniteStructure};
use crate::symmetry::automorphisms;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

const ENUM_LIMIT: u128 = 2_000_000;

fn vars(from: usize, len: usize) -> Vec<Var> {
    (from..from + len).map(|v| v as Var).collect()
}

fn distinct(t: &[Elem]) -> usize {
    let mut v = t.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn tuples(n: usize, len: usize) -> Result<Vec<Vec<Elem>>> {
    if (n as u128).checked_pow(len as u32).map_or(true, |c| c > ENUM_LIMIT) {
        return Err(BnfError::Resource(format!("{n}^{len} tuples exceed the enumeration limit")));
    }
    let mut out = Vec::new();
    for_each_tuple(n, len, |t| out.push(t.to_vec()));
    Ok(out)
}

/// The conjunction of literals describing `t` over variables `0..|t|`, using
/// the first `min(|t|, #sym)` symbols plus all equalities.
pub fn diagram_formula(intr: &mut Interner, s: &FiniteStructure, t: &[Elem]) -> Formula {
    let sig = s.signature();
    let k = sig.len().min(t.len());
    let mut lits = Vec::new();
    let mut buf = Vec::new();
    for r in 0..k {
        let name = sig.relations[r].name.clone();
        let mut rows = Vec::new();
        for_each_position_tuple(sig.arity(r), t.len(), |pos| {
            buf.clear();
            buf.extend(pos.iter().map(|&p| t[p]));
            rows.push((pos.iter().map(|&p| p as Var).collect::<Vec<_>>(), s.holds(r, &buf)));
        });
        for (args, holds) in rows {
            lits.push(intr.atom(&name, args, holds));
        }
    }
    for i in 0..t.len() {
        for j in i + 1..t.len() {
            lits.push(intr.eq(i as Var, j as Var, t[i] == t[j]));
        }
    }
    intr.and(lits)
}

/// Builds `φ^n_{i,a}` over a fixed structure list, caching every
/// intermediate formula so repeated subformulas are shared.
pub struct TypeSynth {
    table: BfTable,
    intr: Interner,
    cache: HashMap<(usize, Vec<Elem>, usize), Formula>,
    max_dom: usize,
    nsym: usize,
}

impl TypeSynth {
    pub fn new(corpus: Vec<FiniteStructure>) -> Result<Self> {
        let max_dom = corpus.iter().map(|s| s.domain_size()).max().unwrap_or(0);
        let nsym = corpus.first().map_or(0, |s| s.signature().len());
        let cfg = BfConfig { max_cells: None, ..BfConfig::default().with_mode(ExtMode::FullDomain) };
        let table = BfTable::with_structures(corpus, cfg)?;
        Ok(TypeSynth { table, intr: Interner::new(), cache: HashMap::new(), max_dom, nsym })
    }

    pub fn table(&self) -> &BfTable {
        &self.table
    }

    pub fn interner(&mut self) -> &mut Interner {
        &mut self.intr
    }

    fn check(&self, i: usize, t: &[Elem]) -> Result<()> {
        let s = self.table.structure(i)?;
        if let Some(&e) = t.iter().find(|&&e| e as usize >= s.domain_size()) {
            return Err(BnfError::Element { elem: e, size: s.domain_size() });
        }
        Ok(())
    }

    /// Diagram of `t` in structure `i`.
    pub fn diagram(&mut self, i: usize, t: &[Elem]) -> Result<Formula> {
        self.check(i, t)?;
        let s = self.table.structure(i)?.clone();
        Ok(diagram_formula(&mut self.intr, &s, t))
    }

    /// `φ^n_{i,t}` with free variables `0..|t|`; `n = 0` gives the diagram.
    pub fn type_formula(&mut self, i: usize, t: &[Elem], n: usize) -> Result<Formula> {
        self.check(i, t)?;
        if n == 0 {
            return self.diagram(i, t);
        }
        let key = (i, t.to_vec(), n);
        if let Some(f) = self.cache.get(&key) {
            return Ok(f.clone());
        }
        let ni = self.table.structure(i)?.domain_size();
        let f = if n == 1 {
            let len = (self.max_dom.saturating_sub(distinct(t))).max(self.nsym.saturating_sub(t.len())).max(1);
            let mut disj = Vec::new();
            for ext in tuples(ni, len)? {
                let mut full = t.to_vec();
                full.extend_from_slice(&ext);
                disj.push(self.diagram(i, &full)?);
            }
            let body = self.intr.or_dedup(disj);
            self.intr.forall(vars(t.len(), len), body)
        } else {
            let mut conj = Vec::new();
            for j in 0..self.table.len() {
                let nj = self.table.structure(j)?.domain_size();
                for b in tuples(nj, t.len())? {
                    let e = self.table.extension(j, &b)?;
                    let mut full = b.clone();
                    full.extend_from_slice(&e);
                    let (mut good, mut bad) = (false, false);
                    for ext in tuples(ni, e.len())? {
                        let mut mine = t.to_vec();
                        mine.extend_from_slice(&ext);
                        if self.table.leq(&BfQuery::new(j, full.clone(), i, mine, n - 1))? {
                            good = true;
                        } else {
                            bad = true;
                        }
                        if good && bad {
                            break;
                        }
                    }
                    let mut disj = Vec::new();
                    if bad {
                        let phi = self.type_formula(j, &full, n - 1)?;
                        disj.push(self.intr.negate(&phi));
                    }
                    if good {
                        disj.push(self.intr.top());
                    }
                    let body = self.intr.or(disj);
                    conj.push(self.intr.forall(vars(t.len(), e.len()), body));
                }
            }
            self.intr.and_dedup(conj)
        };
        self.cache.insert(key, f.clone());
        Ok(f)
    }
}

/// `φ^n_{i,a}`: structure `j` satisfies it at `b` iff `(structs[i], a) <=_n (structs[j], b)`.
pub fn synth_type_formula(structs: &[FiniteStructure], i: usize, a: &[Elem], n: usize) -> Result<Formula> {
    if n == 0 {
        return Err(BnfError::Level("type formulas start at level 1".into()));
    }
    TypeSynth::new(structs.to_vec())?.type_formula(i, a, n)
}

/// A Π_n sentence true in `a` and false in `b`; requires `a` not `<=_n` `b`.
pub fn synth_separating(a: &FiniteStructure, b: &FiniteStructure, n: usize) -> Result<Formula> {
    if n == 0 {
        return Err(BnfError::Level("separation starts at level 1".into()));
    }
    let mut ts = TypeSynth::new(vec![a.clone(), b.clone()])?;
    if ts.table.leq_structures(0, 1, n)? {
        return Err(BnfError::NotSeparable(n));
    }
    let (na, nb) = (a.domain_size(), b.domain_size());
    let start = usize::from(nb > 0);
    for k in start..=nb + a.signature().len() + 1 {
        let candidates_a = tuples(na, k)?;
        for bt in tuples(nb, k)? {
            let mut ok = true;
            for at in &candidates_a {
                if ts.table.leq(&BfQuery::new(1, bt.clone(), 0, at.clone(), n - 1))? {
                    ok = false;
                    break;
                }
            }
            if ok {
                let psi = ts.type_formula(1, &bt, n - 1)?;
                let neg = ts.intr.negate(&psi);
                return Ok(ts.intr.forall(vars(0, k), neg));
            }
        }
    }
    Err(BnfError::NotSeparable(n))
}

/// Diagnostics from Scott sentence synthesis.
#[derive(Clone, Debug, Serialize)]
pub struct ScottReport {
    pub level: usize,
    /// Longest tuple length in the outer conjunction.
    pub tuple_bound: usize,
    pub automorphisms: usize,
    pub orbit_representatives: usize,
    /// Witness extension chosen for each orbit representative.
    pub witnesses: BTreeMap<String, Vec<Elem>>,
}

/// Canonical Π_{n+1} Scott sentence of `a`, plus diagnostics.
pub fn synth_scott_report(a: &FiniteStructure, n: usize) -> Result<(Formula, ScottReport)> {
    if n == 0 {
        return Err(BnfError::Level("Scott synthesis starts at level 1".into()));
    }
    let size = a.domain_size();
    let nsym = a.signature().len();
    let k_bound = (size + 1).max(nsym);
    let auts = automorphisms(a, 1_000_000);
    let inverse: Vec<Vec<Elem>> = auts
        .iter()
        .map(|s| {
            let mut inv = vec![0; s.len()];
            for (x, &y) in s.iter().enumerate() {
                inv[y as usize] = x as Elem;
            }
            inv
        })
        .collect();
    // Orbit representative of `t`: the least image, plus an automorphism
    // taking the representative back to `t`.
    let rep_of = |t: &[Elem]| -> (Vec<Elem>, usize) {
        let mut best: Option<(Vec<Elem>, usize)> = None;
        for (i, s) in auts.iter().enumerate() {
            let img: Vec<Elem> = t.iter().map(|&x| s[x as usize]).collect();
            if best.as_ref().map_or(true, |(b, _)| img < *b) {
                best = Some((img, i));
            }
        }
        best.unwrap_or((t.to_vec(), 0))
    };
    let mut ts = TypeSynth::new(vec![a.clone()])?;

    // Precondition: <=_n between tuples of A forces an automorphism.
    for len in 0..=k_bound + 1 {
        let mut reps: Vec<Vec<Elem>> = tuples(size, len)?.into_iter().map(|t| rep_of(&t).0).collect();
        reps.sort();
        reps.dedup();
        for r1 in &reps {
            for r2 in diagram_matches(a, r1) {
                if &r2 != r1 && rep_of(&r2).0 == r2 && ts.table.leq(&BfQuery::new(0, r1.clone(), 0, r2.clone(), n))? {
                    return Err(BnfError::NoScott(
                        n + 1,
                        format!("{r1:?} <=_{n} {r2:?} but the tuples are not automorphic"),
                    ));
                }
            }
        }
    }

    // Witness for each orbit representative: shortest, then least.
    let mut witness: HashMap<Vec<Elem>, Vec<Elem>> = HashMap::new();
    let mut find_witness = |ts: &mut TypeSynth, r: &[Elem]| -> Result<Vec<Elem>> {
        if let Some(w) = witness.get(r) {
            return Ok(w.clone());
        }
        for len in 0..=size + nsym + 1 {
            for w in tuples(size, len)? {
                let mut full = r.to_vec();
                full.extend_from_slice(&w);
                let mut ok = true;
                for d in diagram_matches(a, &full) {
                    let below = n == 1 || ts.table.leq(&BfQuery::new(0, full.clone(), 0, d.clone(), n - 1))?;
                    if below && !ts.table.leq(&BfQuery::new(0, r.to_vec(), 0, d[..r.len()].to_vec(), n))? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    witness.insert(r.to_vec(), w.clone());
                    return Ok(w);
                }
            }
        }
        Err(BnfError::NoScott(n + 1, format!("no witness extension for {r:?}")))
    };

    let mut theta: HashMap<Vec<Elem>, Formula> = HashMap::new();
    let mut reps_seen: BTreeMap<String, Vec<Elem>> = BTreeMap::new();
    for len in 0..=k_bound + 1 {
        for t in tuples(size, len)? {
            let (rep, si) = rep_of(&t);
            let w = find_witness(&mut ts, &rep)?;
            reps_seen.entry(format!("{rep:?}")).or_insert_with(|| w.clone());
            let back = &inverse[si.min(inverse.len().saturating_sub(1))];
            let wt: Vec<Elem> = if auts.is_empty() { w.clone() } else { w.iter().map(|&x| back[x as usize]).collect() };
            let mut full = t.clone();
            full.extend_from_slice(&wt);
            let psi = ts.type_formula(0, &full, n - 1)?;
            let th = ts.intr.exists(vars(t.len(), wt.len()), psi);
            theta.insert(t, th);
        }
    }

    // θ of the empty tuple, then back-and-forth closure under every θ_t.
    let mut outer = vec![theta[&Vec::new()].clone()];
    for len in 0..=k_bound {
        for t in tuples(size, len)? {
            let y = t.len() as Var;
            let th = theta[&t].clone();
            let d = ts.diagram(0, &t)?;
            let nth = ts.intr.negate(&th);
            let mut parts = vec![d];
            let mut backs = Vec::new();
            for a2 in 0..size as Elem {
                let mut ext = t.clone();
                ext.push(a2);
                let th2 = theta[&ext].clone();
                parts.push(ts.intr.exists(vec![y], th2.clone()));
                backs.push(th2);
            }
            let back = ts.intr.or(backs);
            parts.push(ts.intr.forall(vec![y], back));
            let ext = ts.intr.and(parts);
            let body = ts.intr.or(vec![nth, ext]);
            outer.push(ts.intr.forall(vars(0, t.len()), body));
        }
    }
    let chi = ts.intr.and(outer);
    let report = ScottReport {
        level: n,
        tuple_bound: k_bound,
        automorphisms: auts.len(),
        orbit_representatives: reps_seen.len(),
        witnesses: reps_seen,
    };
    Ok((chi, report))
}

/// Canonical Π_{n+1} Scott sentence of `a`.
pub fn synth_scott(a: &FiniteStructure, n: usize) -> Result<Formula> {
    synth_scott_report(a, n).map(|(f, _)| f)
}
