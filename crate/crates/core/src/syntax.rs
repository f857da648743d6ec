//! Textual surfaces: machine terms and processes, the lambda surface for
//! polynomial compilation, kinds and formulas, and line-oriented derivation
//! files.
//!
//! Machine syntax: application by juxtaposition with parentheses, push by
//! `.`, process separator `*`, saved stacks as `k[STACK]`, e.g.
//! `S (K (S K K)) * t . a`. Formula syntax: `A => B`, `forall x:k. A`,
//! `\x:k. M`, juxtaposition application, `bot` for falsity.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::hol::{Declaration, Derivation, Expr, Kind, Rule, Sequent};
use crate::kam::{Process, SynStack, SynTerm};
use crate::poly::{lambda_star, Poly};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LPar,
    RPar,
    LBrack,
    RBrack,
    Dot,
    Star,
    Colon,
    Backslash,
    Implies,
    KindArrow,
}

fn lex(input: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                out.push(Tok::LPar);
                i += 1;
            }
            ')' => {
                out.push(Tok::RPar);
                i += 1;
            }
            '[' => {
                out.push(Tok::LBrack);
                i += 1;
            }
            ']' => {
                out.push(Tok::RBrack);
                i += 1;
            }
            '.' => {
                out.push(Tok::Dot);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            ':' => {
                out.push(Tok::Colon);
                i += 1;
            }
            '\\' => {
                out.push(Tok::Backslash);
                i += 1;
            }
            '=' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Implies);
                i += 2;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::KindArrow);
                i += 2;
            }
            c if c.is_alphanumeric() || c == '_' || c == '\'' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
                {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::ParseError(format!("unexpected character '{other}'")));
            }
        }
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn new(input: &str) -> Result<Self> {
        Ok(Cursor {
            toks: lex(input)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        match self.next() {
            Some(t) if t == *tok => Ok(()),
            other => Err(Error::ParseError(format!(
                "expected {what}, found {other:?}"
            ))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(Error::ParseError(format!(
                "trailing input from {:?}",
                self.toks[self.pos]
            )))
        }
    }
}

// ---------------------------------------------------------------------------
// Machine terms, stacks, processes.

fn term_atom_start(tok: Option<&Tok>) -> bool {
    matches!(tok, Some(Tok::Ident(_)) | Some(Tok::LPar))
}

fn parse_term_atom(c: &mut Cursor) -> Result<SynTerm> {
    match c.next() {
        Some(Tok::Ident(name)) => match name.as_str() {
            "K" => Ok(SynTerm::K),
            "S" => Ok(SynTerm::S),
            "cc" => Ok(SynTerm::Cc),
            "k" if c.peek() == Some(&Tok::LBrack) => {
                c.next();
                let stack = parse_stack_inner(c)?;
                c.expect(&Tok::RBrack, "']' closing a saved stack")?;
                Ok(SynTerm::Saved(std::rc::Rc::new(stack)))
            }
            _ => Ok(SynTerm::Var(name)),
        },
        Some(Tok::LPar) => {
            let t = parse_term_inner(c)?;
            c.expect(&Tok::RPar, "')'")?;
            Ok(t)
        }
        other => Err(Error::ParseError(format!(
            "expected a term, found {other:?}"
        ))),
    }
}

fn parse_term_inner(c: &mut Cursor) -> Result<SynTerm> {
    let mut t = parse_term_atom(c)?;
    while term_atom_start(c.peek()) {
        t = SynTerm::app(t, parse_term_atom(c)?);
    }
    Ok(t)
}

fn parse_stack_inner(c: &mut Cursor) -> Result<SynStack> {
    let t = parse_term_inner(c)?;
    if c.peek() == Some(&Tok::Dot) {
        c.next();
        let rest = parse_stack_inner(c)?;
        return Ok(SynStack::push(t, rest));
    }
    match t {
        SynTerm::Var(name) => Ok(SynStack::Const(name)),
        other => Err(Error::ParseError(format!(
            "stack must bottom out at a constant, found {}",
            format_term(&other)
        ))),
    }
}

pub fn parse_term(input: &str) -> Result<SynTerm> {
    let mut c = Cursor::new(input)?;
    let t = parse_term_inner(&mut c)?;
    c.expect_end()?;
    Ok(t)
}

pub fn parse_stack(input: &str) -> Result<SynStack> {
    let mut c = Cursor::new(input)?;
    let s = parse_stack_inner(&mut c)?;
    c.expect_end()?;
    Ok(s)
}

pub fn parse_process(input: &str) -> Result<Process> {
    let mut c = Cursor::new(input)?;
    let term = parse_term_inner(&mut c)?;
    c.expect(&Tok::Star, "'*' between term and stack")?;
    let stack = parse_stack_inner(&mut c)?;
    c.expect_end()?;
    Ok(Process::new(term, stack))
}

fn format_term_prec(t: &SynTerm, arg_position: bool) -> String {
    match t {
        SynTerm::Var(x) => x.clone(),
        SynTerm::K => "K".into(),
        SynTerm::S => "S".into(),
        SynTerm::Cc => "cc".into(),
        SynTerm::Saved(stack) => format!("k[{}]", format_stack(stack)),
        SynTerm::App(f, a) => {
            let s = format!(
                "{} {}",
                format_term_prec(f, false),
                format_term_prec(a, true)
            );
            if arg_position {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

pub fn format_term(t: &SynTerm) -> String {
    format_term_prec(t, false)
}

pub fn format_stack(s: &SynStack) -> String {
    match s {
        SynStack::Const(name) => name.clone(),
        SynStack::Push(t, rest) => {
            format!("{} . {}", format_term_prec(t, false), format_stack(rest))
        }
    }
}

pub fn format_process(p: &Process) -> String {
    format!("{} * {}", format_term(&p.term), format_stack(&p.stack))
}

// ---------------------------------------------------------------------------
// Lambda surface and polynomial rendering.

/// Surface lambda terms accepted by the compiler front end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LambdaTerm {
    Ident(String),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    Lam(String, Box<LambdaTerm>),
}

fn lambda_atom_start(tok: Option<&Tok>) -> bool {
    matches!(tok, Some(Tok::Ident(_)) | Some(Tok::LPar))
}

fn parse_lambda_inner(c: &mut Cursor) -> Result<LambdaTerm> {
    if c.peek() == Some(&Tok::Backslash) {
        c.next();
        let Some(Tok::Ident(x)) = c.next() else {
            return Err(Error::ParseError("expected a bound variable".into()));
        };
        c.expect(&Tok::Dot, "'.' after the binder")?;
        let body = parse_lambda_inner(c)?;
        return Ok(LambdaTerm::Lam(x, Box::new(body)));
    }
    let mut t = parse_lambda_atom(c)?;
    while lambda_atom_start(c.peek()) {
        t = LambdaTerm::App(Box::new(t), Box::new(parse_lambda_atom(c)?));
    }
    Ok(t)
}

fn parse_lambda_atom(c: &mut Cursor) -> Result<LambdaTerm> {
    match c.next() {
        Some(Tok::Ident(x)) => Ok(LambdaTerm::Ident(x)),
        Some(Tok::LPar) => {
            let t = parse_lambda_inner(c)?;
            c.expect(&Tok::RPar, "')'")?;
            Ok(t)
        }
        other => Err(Error::ParseError(format!(
            "expected a lambda term, found {other:?}"
        ))),
    }
}

pub fn parse_lambda(input: &str) -> Result<LambdaTerm> {
    let mut c = Cursor::new(input)?;
    let t = parse_lambda_inner(&mut c)?;
    c.expect_end()?;
    Ok(t)
}

/// Compile a surface lambda term to a combinator polynomial by bracket
/// abstraction. Bound identifiers become variables that the abstraction
/// eliminates; free identifiers become named constants.
pub fn compile_lambda(t: &LambdaTerm) -> Poly<String> {
    fn go(t: &LambdaTerm, bound: &mut Vec<String>) -> Poly<String> {
        match t {
            LambdaTerm::Ident(x) => {
                if bound.iter().any(|b| b == x) {
                    Poly::Var(x.clone())
                } else {
                    Poly::Const(x.clone())
                }
            }
            LambdaTerm::App(f, a) => Poly::app(go(f, bound), go(a, bound)),
            LambdaTerm::Lam(x, body) => {
                bound.push(x.clone());
                let compiled = go(body, bound);
                bound.pop();
                lambda_star(x, &compiled, &"k".to_string(), &"s".to_string())
            }
        }
    }
    go(t, &mut Vec::new())
}

fn format_poly_prec(p: &Poly<String>, arg_position: bool) -> String {
    match p {
        Poly::Const(name) => name.clone(),
        Poly::Var(name) => name.clone(),
        Poly::App(f, a) => {
            let s = format!(
                "{} {}",
                format_poly_prec(f, false),
                format_poly_prec(a, true)
            );
            if arg_position {
                format!("({s})")
            } else {
                s
            }
        }
    }
}

pub fn format_poly(p: &Poly<String>) -> String {
    format_poly_prec(p, false)
}

/// Subject polynomials: the realizer constants resolve by name, anything
/// else is a variable.
pub const POLY_CONST_NAMES: &[&str] = &["k", "s", "e", "i"];

fn parse_poly_atom(c: &mut Cursor) -> Result<Poly<String>> {
    match c.next() {
        Some(Tok::Ident(name)) => {
            if POLY_CONST_NAMES.contains(&name.as_str()) {
                Ok(Poly::Const(name))
            } else {
                Ok(Poly::Var(name))
            }
        }
        Some(Tok::LPar) => {
            let p = parse_poly_inner(c)?;
            c.expect(&Tok::RPar, "')'")?;
            Ok(p)
        }
        other => Err(Error::ParseError(format!(
            "expected a polynomial, found {other:?}"
        ))),
    }
}

fn parse_poly_inner(c: &mut Cursor) -> Result<Poly<String>> {
    let mut p = parse_poly_atom(c)?;
    while lambda_atom_start(c.peek()) {
        p = Poly::app(p, parse_poly_atom(c)?);
    }
    Ok(p)
}

pub fn parse_poly(input: &str) -> Result<Poly<String>> {
    let mut c = Cursor::new(input)?;
    let p = parse_poly_inner(&mut c)?;
    c.expect_end()?;
    Ok(p)
}

// ---------------------------------------------------------------------------
// Kinds and formulas.

fn parse_kind_atom(c: &mut Cursor) -> Result<Kind> {
    match c.next() {
        Some(Tok::Ident(name)) => Ok(Kind::base(name)),
        Some(Tok::LPar) => {
            let k = parse_kind_inner(c)?;
            c.expect(&Tok::RPar, "')'")?;
            Ok(k)
        }
        other => Err(Error::ParseError(format!(
            "expected a kind, found {other:?}"
        ))),
    }
}

fn parse_kind_inner(c: &mut Cursor) -> Result<Kind> {
    let lhs = parse_kind_atom(c)?;
    if c.peek() == Some(&Tok::KindArrow) {
        c.next();
        let rhs = parse_kind_inner(c)?;
        return Ok(Kind::arrow(lhs, rhs));
    }
    Ok(lhs)
}

pub fn parse_kind(input: &str) -> Result<Kind> {
    let mut c = Cursor::new(input)?;
    let k = parse_kind_inner(&mut c)?;
    c.expect_end()?;
    Ok(k)
}

pub fn format_kind(k: &Kind) -> String {
    match k {
        Kind::Const(c) => c.clone(),
        Kind::Arrow(from, to) => {
            let lhs = match **from {
                Kind::Arrow(_, _) => format!("({})", format_kind(from)),
                _ => format_kind(from),
            };
            format!("{lhs} -> {}", format_kind(to))
        }
    }
}

/// Known names for formula parsing: expression constants with their kinds,
/// and pre-declared free variables.
#[derive(Debug, Clone, Default)]
pub struct Symbols {
    pub consts: BTreeMap<String, Kind>,
    pub free_vars: BTreeMap<String, Kind>,
}

fn parse_expr_inner(c: &mut Cursor, symbols: &Symbols, bound: &mut Vec<(String, Kind)>) -> Result<Expr> {
    match c.peek() {
        Some(Tok::Backslash) => {
            c.next();
            let Some(Tok::Ident(x)) = c.next() else {
                return Err(Error::ParseError("expected a bound variable".into()));
            };
            c.expect(&Tok::Colon, "':' before the binder kind")?;
            let kind = parse_kind_inner(c)?;
            c.expect(&Tok::Dot, "'.' after the binder")?;
            bound.push((x.clone(), kind.clone()));
            let body = parse_expr_inner(c, symbols, bound)?;
            bound.pop();
            Ok(Expr::lam(x, kind, body))
        }
        Some(Tok::Ident(name)) if name == "forall" => {
            c.next();
            let Some(Tok::Ident(x)) = c.next() else {
                return Err(Error::ParseError("expected a bound variable".into()));
            };
            c.expect(&Tok::Colon, "':' before the binder kind")?;
            let kind = parse_kind_inner(c)?;
            c.expect(&Tok::Dot, "'.' after the binder")?;
            bound.push((x.clone(), kind.clone()));
            let body = parse_expr_inner(c, symbols, bound)?;
            bound.pop();
            Expr::forall(x, kind, body)
        }
        _ => {
            let lhs = parse_app_chain(c, symbols, bound)?;
            if c.peek() == Some(&Tok::Implies) {
                c.next();
                let rhs = parse_expr_inner(c, symbols, bound)?;
                return Expr::implies(lhs, rhs);
            }
            Ok(lhs)
        }
    }
}

fn parse_app_chain(c: &mut Cursor, symbols: &Symbols, bound: &mut Vec<(String, Kind)>) -> Result<Expr> {
    let mut e = parse_expr_atom(c, symbols, bound)?;
    while matches!(c.peek(), Some(Tok::Ident(n)) if n != "forall") || c.peek() == Some(&Tok::LPar) {
        let arg = parse_expr_atom(c, symbols, bound)?;
        e = Expr::app(e, arg)?;
    }
    Ok(e)
}

fn parse_expr_atom(c: &mut Cursor, symbols: &Symbols, bound: &mut Vec<(String, Kind)>) -> Result<Expr> {
    match c.next() {
        Some(Tok::Ident(name)) => {
            if name == "bot" {
                return Ok(Expr::Bottom);
            }
            if let Some((_, kind)) = bound.iter().rev().find(|(x, _)| *x == name) {
                return Ok(Expr::var(name, kind.clone()));
            }
            if let Some(kind) = symbols.free_vars.get(&name) {
                return Ok(Expr::var(name, kind.clone()));
            }
            if let Some(kind) = symbols.consts.get(&name) {
                return Ok(Expr::constant(name, kind.clone()));
            }
            Err(Error::ParseError(format!("unknown identifier {name}")))
        }
        Some(Tok::LPar) => {
            let e = parse_expr_inner(c, symbols, bound)?;
            c.expect(&Tok::RPar, "')'")?;
            Ok(e)
        }
        other => Err(Error::ParseError(format!(
            "expected an expression, found {other:?}"
        ))),
    }
}

pub fn parse_expr(input: &str, symbols: &Symbols) -> Result<Expr> {
    let mut c = Cursor::new(input)?;
    let e = parse_expr_inner(&mut c, symbols, &mut Vec::new())?;
    c.expect_end()?;
    Ok(e)
}

fn atom_like(e: &Expr) -> bool {
    matches!(e, Expr::Var(_, _) | Expr::Const(_, _) | Expr::Bottom)
}

pub fn format_expr(e: &Expr) -> String {
    match e {
        Expr::Var(x, _) => x.clone(),
        Expr::Const(x, _) => x.clone(),
        Expr::Bottom => "bot".into(),
        Expr::App(f, a) => {
            let fs = if matches!(**f, Expr::App(_, _)) || atom_like(f) {
                format_expr(f)
            } else {
                format!("({})", format_expr(f))
            };
            let args = if atom_like(a) {
                format_expr(a)
            } else {
                format!("({})", format_expr(a))
            };
            format!("{fs} {args}")
        }
        Expr::Implies(l, r) => {
            let ls = if atom_like(l) || matches!(**l, Expr::App(_, _)) {
                format_expr(l)
            } else {
                format!("({})", format_expr(l))
            };
            format!("{ls} => {}", format_expr(r))
        }
        Expr::Forall(x, k, body) => {
            format!("forall {x}:{}. {}", format_kind(k), format_expr(body))
        }
        Expr::Lam(x, k, body) => {
            format!("\\{x}:{}. {}", format_kind(k), format_expr(body))
        }
    }
}

// ---------------------------------------------------------------------------
// Derivation files.

/// Parse a line-oriented derivation file. Each line is blank, a comment
/// starting with `#`, a free-variable declaration `var x : KIND`, or a node
///
/// ```text
/// node <id> <rule>[<witness>]? <premise-ids> | <context> |- <subject> : <formula>
/// ```
///
/// with rules `ax`, `imp_i`, `imp_e`, `all_i`, and `all_e[<expression>]`.
/// Premise ids reference earlier nodes, comma separated. The last node is
/// the root.
pub fn parse_derivation(text: &str, symbols: &Symbols) -> Result<Derivation> {
    let mut symbols = symbols.clone();
    let mut nodes: BTreeMap<usize, Derivation> = BTreeMap::new();
    let mut last_id = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let loc = |msg: String| Error::ParseError(format!("line {}: {msg}", lineno + 1));
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("var ") {
            let (name, kind_str) = rest
                .split_once(':')
                .ok_or_else(|| loc("expected 'var NAME : KIND'".into()))?;
            let kind = parse_kind(kind_str.trim()).map_err(|e| loc(e.to_string()))?;
            symbols.free_vars.insert(name.trim().to_string(), kind);
            continue;
        }
        let Some(rest) = line.strip_prefix("node ") else {
            return Err(loc("expected 'node', 'var', or a comment".into()));
        };
        let (before_turnstile, after_turnstile) = rest
            .split_once("|-")
            .ok_or_else(|| loc("missing '|-'".into()))?;
        let (header, ctx_str) = before_turnstile
            .split_once('|')
            .ok_or_else(|| loc("missing '|' before the context".into()))?;
        let (subject_str, formula_str) = after_turnstile
            .split_once(':')
            .ok_or_else(|| loc("missing ':' between subject and formula".into()))?;

        let header = header.trim();
        let (id_str, rule_rest) = header
            .split_once(char::is_whitespace)
            .ok_or_else(|| loc("expected a node id and a rule".into()))?;
        let id: usize = id_str
            .trim()
            .parse()
            .map_err(|_| loc(format!("bad node id {id_str}")))?;
        if nodes.contains_key(&id) {
            return Err(loc(format!("duplicate node id {id}")));
        }
        let rule_rest = rule_rest.trim();
        let (rule, prems_str) = if let Some(after) = rule_rest.strip_prefix("all_e[") {
            let close = after
                .find(']')
                .ok_or_else(|| loc("missing ']' after the witness".into()))?;
            let witness =
                parse_expr(&after[..close], &symbols).map_err(|e| loc(e.to_string()))?;
            (Rule::ForallElim { witness }, &after[close + 1..])
        } else {
            let (name, rest) = match rule_rest.split_once(char::is_whitespace) {
                Some((n, r)) => (n, r),
                None => (rule_rest, ""),
            };
            let rule = match name {
                "ax" => Rule::Ax,
                "imp_i" => Rule::ImpIntro,
                "imp_e" => Rule::ImpElim,
                "all_i" => Rule::ForallIntro,
                other => return Err(loc(format!("unknown rule {other}"))),
            };
            (rule, rest)
        };
        let mut premises = Vec::new();
        for tok in prems_str
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
        {
            let pid: usize = tok
                .parse()
                .map_err(|_| loc(format!("bad premise id {tok}")))?;
            let node = nodes
                .get(&pid)
                .ok_or_else(|| loc(format!("premise {pid} is not defined yet")))?;
            premises.push(node.clone());
        }

        let mut context: Vec<Declaration> = Vec::new();
        let ctx_str = ctx_str.trim();
        if !ctx_str.is_empty() {
            for decl in ctx_str.split(',') {
                let (name, formula_src) = decl
                    .split_once(':')
                    .ok_or_else(|| loc(format!("bad declaration '{decl}'")))?;
                let formula =
                    parse_expr(formula_src.trim(), &symbols).map_err(|e| loc(e.to_string()))?;
                context.push((name.trim().to_string(), formula));
            }
        }
        let subject = parse_poly(subject_str.trim()).map_err(|e| loc(e.to_string()))?;
        let formula =
            parse_expr(formula_str.trim(), &symbols).map_err(|e| loc(e.to_string()))?;
        let node = Derivation::new(rule, premises, Sequent::new(context, subject, formula))
            .with_id(id);
        nodes.insert(id, node);
        last_id = Some(id);
    }
    let root = last_id.ok_or_else(|| Error::ParseError("no nodes in derivation".into()))?;
    Ok(nodes.remove(&root).expect("root exists"))
}
