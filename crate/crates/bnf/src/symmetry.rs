//! Color refinement with individualization: isomorphisms, automorphisms
//! fixing a tuple, and orbits of pointwise stabilizers.

use crate::structures::{Elem, FiniteStructure};
use std::collections::BTreeMap;

struct Side<'a> {
    s: &'a FiniteStructure,
    inc: Vec<Vec<(u32, u32)>>,
}

impl<'a> Side<'a> {
    fn new(s: &'a FiniteStructure) -> Self {
        Side { s, inc: s.incidence() }
    }
}

type Sig = (u32, Vec<Vec<u32>>);

fn signature_of(side: &Side, colors: &[u32], e: usize) -> Sig {
    let mut items: Vec<Vec<u32>> = side.inc[e]
        .iter()
        .map(|&(r, ti)| {
            let t = &side.s.tuples(r as usize)[ti as usize];
            let mut mask = 0u32;
            let mut v = Vec::with_capacity(t.len() + 2);
            v.push(r);
            v.push(0);
            for (p, &x) in t.iter().enumerate() {
                if x as usize == e {
                    mask |= 1 << p.min(31);
                }
                v.push(colors[x as usize]);
            }
            v[1] = mask;
            v
        })
        .collect();
    items.sort_unstable();
    (colors[e], items)
}

/// Refines the colorings of all sides jointly until stable; returns false as
/// soon as the color histograms of the first two sides diverge.
fn refine(sides: &[&Side], colors: &mut [Vec<u32>]) -> bool {
    let mut classes = count_classes(colors);
    loop {
        let mut table: BTreeMap<Sig, u32> = BTreeMap::new();
        let sigs: Vec<Vec<Sig>> = sides
            .iter()
            .zip(colors.iter())
            .map(|(side, c)| (0..c.len()).map(|e| signature_of(side, c, e)).collect())
            .collect();
        for s in sigs.iter().flatten() {
            table.entry(s.clone()).or_insert(0);
        }
        for (i, v) in table.values_mut().enumerate() {
            *v = i as u32;
        }
        for (c, s) in colors.iter_mut().zip(&sigs) {
            for (e, sig) in s.iter().enumerate() {
                c[e] = table[sig];
            }
        }
        if colors.len() >= 2 && histogram(&colors[0]) != histogram(&colors[1]) {
            return false;
        }
        let now = count_classes(colors);
        if now == classes {
            return true;
        }
        classes = now;
    }
}

fn count_classes(colors: &[Vec<u32>]) -> usize {
    let mut all: Vec<u32> = colors.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn histogram(c: &[u32]) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for &x in c {
        *h.entry(x).or_insert(0) += 1;
    }
    h
}

fn is_iso(a: &FiniteStructure, b: &FiniteStructure, map: &[Elem]) -> bool {
    let mut buf = Vec::new();
    for r in 0..a.signature().len() {
        if a.tuples(r).len() != b.tuples(r).len() {
            return false;
        }
        for t in a.tuples(r) {
            buf.clear();
            buf.extend(t.iter().map(|&x| map[x as usize]));
            if !b.holds(r, &buf) {
                return false;
            }
        }
    }
    true
}

fn search(a: &Side, b: &Side, mut ca: Vec<u32>, mut cb: Vec<u32>) -> Option<Vec<Elem>> {
    let mut cols = [std::mem::take(&mut ca), std::mem::take(&mut cb)];
    if !refine(&[a, b], &mut cols) {
        return None;
    }
    let [ca, cb] = cols;
    let hist = histogram(&ca);
    let target = hist.iter().filter(|(_, &k)| k > 1).min_by_key(|(&c, &k)| (k, c)).map(|(&c, _)| c);
    match target {
        None => {
            let mut by_color = vec![0 as Elem; ca.len()];
            let mut pos: BTreeMap<u32, Elem> = BTreeMap::new();
            for (v, &c) in cb.iter().enumerate() {
                pos.insert(c, v as Elem);
            }
            for (u, &c) in ca.iter().enumerate() {
                by_color[u] = pos[&c];
            }
            is_iso(a.s, b.s, &by_color).then_some(by_color)
        }
        Some(c) => {
            let fresh = ca.iter().chain(&cb).copied().max().unwrap_or(0) + 1;
            let u = ca.iter().position(|&x| x == c).unwrap();
            for v in (0..cb.len()).filter(|&v| cb[v] == c) {
                let mut ca2 = ca.clone();
                let mut cb2 = cb.clone();
                ca2[u] = fresh;
                cb2[v] = fresh;
                if let Some(m) = search(a, b, ca2, cb2) {
                    return Some(m);
                }
            }
            None
        }
    }
}

fn search_all(a: &Side, b: &Side, ca: Vec<u32>, cb: Vec<u32>, out: &mut Vec<Vec<Elem>>, cap: usize) {
    if out.len() >= cap {
        return;
    }
    let mut cols = [ca, cb];
    if !refine(&[a, b], &mut cols) {
        return;
    }
    let [ca, cb] = cols;
    let hist = histogram(&ca);
    let target = hist.iter().filter(|(_, &k)| k > 1).min_by_key(|(&c, &k)| (k, c)).map(|(&c, _)| c);
    match target {
        None => {
            let pos: BTreeMap<u32, Elem> = cb.iter().enumerate().map(|(v, &c)| (c, v as Elem)).collect();
            let map: Vec<Elem> = ca.iter().map(|c| pos[c]).collect();
            if is_iso(a.s, b.s, &map) {
                out.push(map);
            }
        }
        Some(c) => {
            let fresh = ca.iter().chain(&cb).copied().max().unwrap_or(0) + 1;
            let u = ca.iter().position(|&x| x == c).unwrap();
            for v in (0..cb.len()).filter(|&v| cb[v] == c) {
                let mut ca2 = ca.clone();
                let mut cb2 = cb.clone();
                ca2[u] = fresh;
                cb2[v] = fresh;
                search_all(a, b, ca2, cb2, out, cap);
            }
        }
    }
}

/// Every automorphism of `s`, up to `cap` of them, identity included.
pub fn automorphisms(s: &FiniteStructure, cap: usize) -> Vec<Vec<Elem>> {
    let side = Side::new(s);
    let mut out = Vec::new();
    let n = s.domain_size();
    search_all(&side, &side, vec![0; n], vec![0; n], &mut out, cap);
    out.sort();
    out
}

/// Initial coloring that individualizes `t` position by position.
fn tuple_colors(n: usize, t: &[Elem]) -> Vec<u32> {
    let mut c = vec![0u32; n];
    for (i, &x) in t.iter().enumerate() {
        if c[x as usize] == 0 {
            c[x as usize] = i as u32 + 1;
        }
    }
    c
}

fn same_pattern(s: &[Elem], t: &[Elem]) -> bool {
    s.len() == t.len() && (0..s.len()).all(|i| (0..i).all(|j| (s[i] == s[j]) == (t[i] == t[j])))
}

/// An isomorphism `a -> b` as an element map, if one exists.
pub fn isomorphism(a: &FiniteStructure, b: &FiniteStructure) -> Option<Vec<Elem>> {
    isomorphism_mapping(a, &[], b, &[])
}

/// An isomorphism `a -> b` sending `ta` to `tb` pointwise.
pub fn isomorphism_mapping(a: &FiniteStructure, ta: &[Elem], b: &FiniteStructure, tb: &[Elem]) -> Option<Vec<Elem>> {
    if a.signature() != b.signature() || a.domain_size() != b.domain_size() || !same_pattern(ta, tb) {
        return None;
    }
    if (0..a.signature().len()).any(|r| a.tuples(r).len() != b.tuples(r).len()) {
        return None;
    }
    let (sa, sb) = (Side::new(a), Side::new(b));
    search(&sa, &sb, tuple_colors(a.domain_size(), ta), tuple_colors(b.domain_size(), tb))
}

/// True when some automorphism of `s` maps `t1` onto `t2`.
pub fn automorphic(s: &FiniteStructure, t1: &[Elem], t2: &[Elem]) -> bool {
    t1 == t2 || isomorphism_mapping(s, t1, s, t2).is_some()
}

/// Caches the incidence lists of one structure across orbit queries.
pub struct OrbitFinder<'a> {
    side: Side<'a>,
}

impl<'a> OrbitFinder<'a> {
    pub fn new(s: &'a FiniteStructure) -> Self {
        OrbitFinder { side: Side::new(s) }
    }

    /// Orbits of the pointwise stabilizer of `base` on the remaining
    /// elements, each sorted, listed by least element.
    pub fn stabilizer_orbits(&self, base: &[Elem]) -> Vec<Vec<Elem>> {
        let n = self.side.s.domain_size();
        let mut colors = vec![tuple_colors(n, base)];
        refine(&[&self.side], &mut colors);
        let colors = colors.pop().unwrap();
        let in_base = |e: usize| base.contains(&(e as Elem));
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut reps: Vec<usize> = Vec::new();
        let fresh = colors.iter().copied().max().unwrap_or(0) + 1;
        for e in (0..n).filter(|&e| !in_base(e)) {
            let mut merged = false;
            for &r in &reps {
                if colors[r] != colors[e] {
                    continue;
                }
                if find(&mut parent, r) == find(&mut parent, e) {
                    merged = true;
                    break;
                }
                let mut c1 = colors.clone();
                let mut c2 = colors.clone();
                c1[r] = fresh;
                c2[e] = fresh;
                if let Some(sigma) = search(&self.side, &self.side, c1, c2) {
                    for (x, &y) in sigma.iter().enumerate() {
                        let (px, py) = (find(&mut parent, x), find(&mut parent, y as usize));
                        if px != py {
                            parent[px.max(py)] = px.min(py);
                        }
                    }
                    merged = true;
                    break;
                }
            }
            if !merged {
                reps.push(e);
            }
        }
        let mut orbits: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
        for e in (0..n).filter(|&e| !in_base(e)) {
            let root = find(&mut parent, e);
            orbits.entry(root).or_default().push(e as Elem);
        }
        let mut out: Vec<Vec<Elem>> = orbits.into_values().collect();
        out.sort_by_key(|o| o[0]);
        out
    }
}

pub fn stabilizer_orbits(s: &FiniteStructure, base: &[Elem]) -> Vec<Vec<Elem>> {
    OrbitFinder::new(s).stabilizer_orbits(base)
}
