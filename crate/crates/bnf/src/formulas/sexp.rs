//! Text syntax. Shared subformulas are hoisted into a leading `let`:
//!
//! ```text
//! (let ((%0 (exists (x1) (E x0 x1))))
//!   (and %0 (forall (x0) %0)))
//! ```

use super::{Formula, Interner, Kind, Var, EQ};
use crate::error::{BnfError, Result};
use std::collections::HashMap;
use std::fmt::Write;

pub fn to_sexp(f: &Formula) -> String {
    let mut parents: HashMap<usize, usize> = HashMap::new();
    let mut order = Vec::new();
    f.visit(&mut |g| {
        order.push(g.clone());
        if let Kind::And(c) | Kind::Or(c) = g.kind() {
            for x in c {
                *parents.entry(x.addr()).or_default() += 1;
            }
        }
        if let Kind::Exists(_, b) | Kind::Forall(_, b) = g.kind() {
            *parents.entry(b.addr()).or_default() += 1;
        }
    });
    let mut names: HashMap<usize, usize> = HashMap::new();
    let mut bindings = Vec::new();
    for g in &order {
        let compound = matches!(g.kind(), Kind::And(_) | Kind::Or(_) | Kind::Exists(..) | Kind::Forall(..));
        if compound && !g.ptr_eq(f) && parents.get(&g.addr()).copied().unwrap_or(0) > 1 {
            let mut body = String::new();
            write_node(g, &names, &mut body, true);
            names.insert(g.addr(), names.len());
            bindings.push(body);
        }
    }
    let mut body = String::new();
    write_node(f, &names, &mut body, true);
    if bindings.is_empty() {
        return body;
    }
    let mut out = String::from("(let (");
    for (i, b) in bindings.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "(%{i} {b})");
    }
    let _ = write!(out, ") {body})");
    out
}

fn write_vars(out: &mut String, vs: &[Var]) {
    out.push('(');
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "x{v}");
    }
    out.push(')');
}

fn write_node(f: &Formula, names: &HashMap<usize, usize>, out: &mut String, top: bool) {
    if !top {
        if let Some(k) = names.get(&f.addr()) {
            let _ = write!(out, "%{k}");
            return;
        }
    }
    match f.kind() {
        Kind::Top => out.push_str("true"),
        Kind::Bot => out.push_str("false"),
        Kind::Atom { rel, args, positive } => {
            if !positive {
                out.push_str("(not ");
            }
            out.push('(');
            out.push_str(rel);
            for a in args.iter() {
                let _ = write!(out, " x{a}");
            }
            out.push(')');
            if !positive {
                out.push(')');
            }
        }
        Kind::And(c) | Kind::Or(c) => {
            out.push_str(if matches!(f.kind(), Kind::And(_)) { "(and" } else { "(or" });
            for x in c {
                out.push(' ');
                write_node(x, names, out, false);
            }
            out.push(')');
        }
        Kind::Exists(v, b) | Kind::Forall(v, b) => {
            out.push_str(if matches!(f.kind(), Kind::Exists(..)) { "(exists " } else { "(forall " });
            write_vars(out, v);
            out.push(' ');
            write_node(b, names, out, false);
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Sym(String),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let b = src.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b';' => {
                while i < b.len() && b[i] != b'\n' {
                    i += 1;
                }
            }
            b'(' => {
                out.push((i, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::Close));
                i += 1;
            }
            _ => {
                let start = i;
                while i < b.len() && !matches!(b[i], b' ' | b'\t' | b'\n' | b'\r' | b'(' | b')' | b';') {
                    i += 1;
                }
                out.push((start, Tok::Sym(src[start..i].to_string())));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    lets: HashMap<String, Formula>,
    intr: Interner,
}

impl Parser {
    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(BnfError::Parse { pos: self.here(), msg: msg.into() })
    }

    fn next(&mut self) -> Result<Tok> {
        match self.toks.get(self.pos) {
            Some((_, t)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err("unexpected end of input"),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next()? {
            Tok::Close => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected ')'")
            }
        }
    }

    fn var(&mut self) -> Result<Var> {
        match self.next()? {
            Tok::Sym(s) if s.starts_with('x') => match s[1..].parse::<Var>() {
                Ok(v) => Ok(v),
                Err(_) => {
                    self.pos -= 1;
                    self.err(format!("bad variable {s:?}"))
                }
            },
            _ => {
                self.pos -= 1;
                self.err("expected a variable x<N>")
            }
        }
    }

    fn vars(&mut self) -> Result<Vec<Var>> {
        if self.next()? != Tok::Open {
            self.pos -= 1;
            return self.err("expected '(' before variable list");
        }
        let mut vs = Vec::new();
        while self.toks.get(self.pos).map(|t| &t.1) != Some(&Tok::Close) {
            vs.push(self.var()?);
        }
        self.pos += 1;
        Ok(vs)
    }

    fn formula(&mut self) -> Result<Formula> {
        match self.next()? {
            Tok::Close => {
                self.pos -= 1;
                self.err("unexpected ')'")
            }
            Tok::Sym(s) => match s.as_str() {
                "true" => Ok(self.intr.top()),
                "false" => Ok(self.intr.bot()),
                _ if s.starts_with('%') => match self.lets.get(&s) {
                    Some(f) => Ok(f.clone()),
                    None => {
                        self.pos -= 1;
                        self.err(format!("unbound name {s}"))
                    }
                },
                _ => {
                    self.pos -= 1;
                    self.err(format!("unexpected symbol {s:?}"))
                }
            },
            Tok::Open => {
                let head = match self.next()? {
                    Tok::Sym(h) => h,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected an operator");
                    }
                };
                let f = match head.as_str() {
                    "and" | "or" => {
                        let mut c = Vec::new();
                        while self.toks.get(self.pos).map(|t| &t.1) != Some(&Tok::Close) {
                            c.push(self.formula()?);
                        }
                        if head == "and" {
                            self.intr.and(c)
                        } else {
                            self.intr.or(c)
                        }
                    }
                    "not" => {
                        let g = self.formula()?;
                        self.intr.negate(&g)
                    }
                    "exists" | "forall" => {
                        let vs = self.vars()?;
                        let b = self.formula()?;
                        if head == "exists" {
                            self.intr.exists(vs, b)
                        } else {
                            self.intr.forall(vs, b)
                        }
                    }
                    "let" => {
                        if self.next()? != Tok::Open {
                            self.pos -= 1;
                            return self.err("expected '(' after let");
                        }
                        while self.toks.get(self.pos).map(|t| &t.1) == Some(&Tok::Open) {
                            self.pos += 1;
                            let name = match self.next()? {
                                Tok::Sym(n) if n.starts_with('%') => n,
                                _ => {
                                    self.pos -= 1;
                                    return self.err("expected %name in let binding");
                                }
                            };
                            let def = self.formula()?;
                            self.expect_close()?;
                            self.lets.insert(name, def);
                        }
                        self.expect_close()?;
                        self.formula()?
                    }
                    "true" | "false" => return self.err("true/false take no arguments"),
                    rel => {
                        let rel = rel.to_string();
                        let mut args = Vec::new();
                        while self.toks.get(self.pos).map(|t| &t.1) != Some(&Tok::Close) {
                            args.push(self.var()?);
                        }
                        if args.is_empty() {
                            return self.err(format!("relation {rel} needs arguments"));
                        }
                        if rel == EQ && args.len() != 2 {
                            return self.err("equality takes two arguments");
                        }
                        self.intr.atom(&rel, args, true)
                    }
                };
                self.expect_close()?;
                Ok(f)
            }
        }
    }
}

/// Parses the text syntax produced by [`to_sexp`].
pub fn parse(src: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(src)?, pos: 0, end: src.len(), lets: HashMap::new(), intr: Interner::new() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(f)
}
