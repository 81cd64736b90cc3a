use super::{Formula, Kind, Var, EQ};
use crate::error::{BnfError, Result};
use crate::structures::{Elem, FiniteStructure};
use std::collections::HashMap;

const UNSET: Elem = Elem::MAX;

enum CKind {
    Const(bool),
    Rel { rel: usize, args: Box<[Var]>, positive: bool },
    Eq { a: Var, b: Var, positive: bool },
    And(Box<[u32]>),
    Or(Box<[u32]>),
    Quant { exists: bool, vars: Box<[Var]>, body: u32, guards: Box<[Option<Guard>]> },
}

/// A relational conjunct (or negated disjunct) that pins a bound variable
/// to the tuples of one relation, so only matching elements are tried.
#[derive(Clone)]
struct Guard {
    rel: usize,
    args: Box<[Var]>,
    pos: usize,
}

struct CNode {
    kind: CKind,
    free: Box<[Var]>,
    quantified: bool,
}

/// Model checker bound to one structure. Compiled nodes and quantifier
/// results are cached across calls, so repeated queries are cheap.
pub struct Evaluator<'s> {
    s: &'s FiniteStructure,
    ids: HashMap<usize, u32>,
    keep: Vec<Formula>,
    nodes: Vec<CNode>,
    memo: HashMap<(u32, Box<[Elem]>), bool>,
    env: Vec<Elem>,
    width: usize,
}

impl<'s> Evaluator<'s> {
    pub fn new(s: &'s FiniteStructure) -> Self {
        Evaluator { s, ids: HashMap::new(), keep: Vec::new(), nodes: Vec::new(), memo: HashMap::new(), env: Vec::new(), width: 0 }
    }

    fn compile(&mut self, f: &Formula) -> Result<u32> {
        if let Some(&id) = self.ids.get(&f.addr()) {
            return Ok(id);
        }
        let (kind, quantified) = match f.kind() {
            Kind::Top => (CKind::Const(true), false),
            Kind::Bot => (CKind::Const(false), false),
            Kind::Atom { rel, args, positive } => {
                if &**rel == EQ {
                    if args.len() != 2 {
                        return Err(BnfError::Formula("equality takes two arguments".into()));
                    }
                    (CKind::Eq { a: args[0], b: args[1], positive: *positive }, false)
                } else {
                    let sig = self.s.signature();
                    let r = sig
                        .index_of(rel)
                        .ok_or_else(|| BnfError::Formula(format!("relation {rel} not in signature {}", sig.describe())))?;
                    if sig.arity(r) != args.len() {
                        return Err(BnfError::Formula(format!(
                            "relation {rel} has arity {}, used with {}",
                            sig.arity(r),
                            args.len()
                        )));
                    }
                    (CKind::Rel { rel: r, args: args.clone(), positive: *positive }, false)
                }
            }
            Kind::And(c) | Kind::Or(c) => {
                let mut ids = Vec::with_capacity(c.len());
                for x in c {
                    ids.push(self.compile(x)?);
                }
                // Quantifier-free children first so cheap tests short-circuit.
                ids.sort_by_key(|&i| self.nodes[i as usize].quantified);
                let q = ids.iter().any(|&i| self.nodes[i as usize].quantified);
                let ids = ids.into_boxed_slice();
                (if matches!(f.kind(), Kind::And(_)) { CKind::And(ids) } else { CKind::Or(ids) }, q)
            }
            Kind::Exists(v, b) | Kind::Forall(v, b) => {
                let body = self.compile(b)?;
                let exists = matches!(f.kind(), Kind::Exists(..));
                let guards = self.guards(exists, v, body);
                (CKind::Quant { exists, vars: v.clone(), body, guards }, true)
            }
        };
        let widest = match f.kind() {
            Kind::Atom { args, .. } => args.iter().max().map_or(0, |&m| m as usize + 1),
            Kind::Exists(v, _) | Kind::Forall(v, _) => v.iter().max().map_or(0, |&m| m as usize + 1),
            _ => 0,
        };
        self.width = self.width.max(widest);
        let id = self.nodes.len() as u32;
        self.nodes.push(CNode { kind, free: f.free_vars().into(), quantified });
        self.ids.insert(f.addr(), id);
        self.keep.push(f.clone());
        Ok(id)
    }

    fn guards(&self, exists: bool, vars: &[Var], body: u32) -> Box<[Option<Guard>]> {
        let children: &[u32] = match (&self.nodes[body as usize].kind, exists) {
            (CKind::And(c), true) | (CKind::Or(c), false) => c,
            _ => &[],
        };
        let own = |&id: &u32| match &self.nodes[id as usize].kind {
            CKind::Rel { rel, args, positive } if *positive == exists => Some((*rel, args.clone())),
            _ => None,
        };
        let atoms: Vec<(usize, Box<[Var]>)> = children.iter().filter_map(own).collect();
        vars.iter()
            .map(|&y| {
                atoms.iter().find_map(|(rel, args)| {
                    let hits: Vec<usize> = (0..args.len()).filter(|&k| args[k] == y).collect();
                    let clean = hits.len() == 1 && args.iter().all(|a| *a == y || !vars.contains(a));
                    clean.then(|| Guard { rel: *rel, args: args.clone(), pos: hits[0] })
                })
            })
            .collect()
    }

    fn candidates(&self, g: &Guard) -> Vec<Elem> {
        let mut out: Vec<Elem> = self
            .s
            .tuples(g.rel)
            .iter()
            .filter(|t| g.args.iter().enumerate().all(|(k, &v)| k == g.pos || t[k] == self.env[v as usize]))
            .map(|t| t[g.pos])
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Truth of `f` with variable `i` assigned `assignment[i]`.
    pub fn eval(&mut self, f: &Formula, assignment: &[Elem]) -> Result<bool> {
        if let Some(&v) = f.free_vars().iter().find(|&&v| v as usize >= assignment.len()) {
            return Err(BnfError::Unbound(v));
        }
        if let Some(&e) = assignment.iter().find(|&&e| e as usize >= self.s.domain_size()) {
            return Err(BnfError::Element { elem: e, size: self.s.domain_size() });
        }
        let id = self.compile(f)?;
        let width = self.width.max(assignment.len());
        self.env.clear();
        self.env.resize(width, UNSET);
        self.env[..assignment.len()].copy_from_slice(assignment);
        Ok(self.run(id))
    }

    pub fn eval_sentence(&mut self, f: &Formula) -> Result<bool> {
        self.eval(f, &[])
    }

    fn run(&mut self, id: u32) -> bool {
        let node = &self.nodes[id as usize];
        match &node.kind {
            CKind::Const(b) => *b,
            CKind::Rel { rel, args, positive } => {
                let mut t = [0 as Elem; 8];
                if args.len() <= t.len() {
                    for (k, &v) in args.iter().enumerate() {
                        t[k] = self.env[v as usize];
                    }
                    self.s.holds(*rel, &t[..args.len()]) == *positive
                } else {
                    let t: Vec<Elem> = args.iter().map(|&v| self.env[v as usize]).collect();
                    self.s.holds(*rel, &t) == *positive
                }
            }
            CKind::Eq { a, b, positive } => (self.env[*a as usize] == self.env[*b as usize]) == *positive,
            CKind::And(c) | CKind::Or(c) => {
                let is_and = matches!(node.kind, CKind::And(_));
                let n = c.len();
                for k in 0..n {
                    let child = match &self.nodes[id as usize].kind {
                        CKind::And(c) | CKind::Or(c) => c[k],
                        _ => unreachable!(),
                    };
                    if self.run(child) != is_and {
                        return !is_and;
                    }
                }
                is_and
            }
            CKind::Quant { exists, vars, body, guards } => {
                let key: Box<[Elem]> = node.free.iter().map(|&v| self.env[v as usize]).collect();
                let k = (id, key);
                if let Some(&v) = self.memo.get(&k) {
                    return v;
                }
                let (exists, vars, body, guards) = (*exists, vars.clone(), *body, guards.clone());
                let saved: Vec<Elem> = vars.iter().map(|&v| self.env[v as usize]).collect();
                let v = self.quant(exists, &vars, &guards, 0, body);
                for (&x, &old) in vars.iter().zip(&saved) {
                    self.env[x as usize] = old;
                }
                self.memo.insert(k, v);
                v
            }
        }
    }

    fn quant(&mut self, exists: bool, vars: &[Var], guards: &[Option<Guard>], i: usize, body: u32) -> bool {
        if i == vars.len() {
            return self.run(body);
        }
        let pool: Vec<Elem> = match &guards[i] {
            Some(g) => self.candidates(g),
            None => (0..self.s.domain_size() as Elem).collect(),
        };
        for e in pool {
            self.env[vars[i] as usize] = e;
            if self.quant(exists, vars, guards, i + 1, body) == exists {
                return exists;
            }
        }
        !exists
    }
}

/// One-shot evaluation; variable `i` is assigned `assignment[i]`.
pub fn evaluate(f: &Formula, s: &FiniteStructure, assignment: &[Elem]) -> Result<bool> {
    Evaluator::new(s).eval(f, assignment)
}
