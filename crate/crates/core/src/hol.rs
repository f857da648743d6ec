//! A higher-order language over a complete algebra: kinds, kinded
//! expressions, sequent derivations with realizer polynomials, finite-model
//! semantics, and the arithmetic helpers (Leibniz equality, the successor
//! axiom realizers, and the inductive-membership predicate).

use std::collections::{BTreeMap, HashMap};

use crate::error::Error;
use crate::oca::{Elem, Oca};
use crate::poly::{self, Poly};
use crate::Result;

/// A kind: a named constant or a function kind. The constant `o` is the kind
/// of truth values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Kind {
    Const(String),
    Arrow(Box<Kind>, Box<Kind>),
}

impl Kind {
    pub fn base(name: impl Into<String>) -> Kind {
        Kind::Const(name.into())
    }

    /// The kind of truth values.
    pub fn prop() -> Kind {
        Kind::base("o")
    }

    pub fn arrow(from: Kind, to: Kind) -> Kind {
        Kind::Arrow(Box::new(from), Box::new(to))
    }

    pub fn is_prop(&self) -> bool {
        matches!(self, Kind::Const(c) if c == "o")
    }
}

/// A kinded expression. Implication and quantification land in the kind of
/// truth values; falsity is the built-in bottom formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Var(String, Kind),
    Const(String, Kind),
    Lam(String, Kind, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Forall(String, Kind, Box<Expr>),
    Bottom,
}

impl Expr {
    pub fn var(name: impl Into<String>, kind: Kind) -> Expr {
        Expr::Var(name.into(), kind)
    }

    pub fn constant(name: impl Into<String>, kind: Kind) -> Expr {
        Expr::Const(name.into(), kind)
    }

    pub fn lam(name: impl Into<String>, kind: Kind, body: Expr) -> Expr {
        Expr::Lam(name.into(), kind, Box::new(body))
    }

    /// Kind-checked application.
    pub fn app(fun: Expr, arg: Expr) -> Result<Expr> {
        match fun.kind()? {
            Kind::Arrow(from, _) => {
                let got = arg.kind()?;
                if *from != got {
                    return Err(Error::KindError(format!(
                        "argument has kind {got:?}, function expects {from:?}"
                    )));
                }
                Ok(Expr::App(Box::new(fun), Box::new(arg)))
            }
            other => Err(Error::KindError(format!(
                "application head has non-function kind {other:?}"
            ))),
        }
    }

    /// Kind-checked implication between formulas.
    pub fn implies(lhs: Expr, rhs: Expr) -> Result<Expr> {
        for side in [&lhs, &rhs] {
            let k = side.kind()?;
            if !k.is_prop() {
                return Err(Error::KindError(format!(
                    "implication side has kind {k:?}, expected the truth kind"
                )));
            }
        }
        Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)))
    }

    /// Kind-checked universal quantification over a formula body.
    pub fn forall(name: impl Into<String>, kind: Kind, body: Expr) -> Result<Expr> {
        let k = body.kind()?;
        if !k.is_prop() {
            return Err(Error::KindError(format!(
                "quantified body has kind {k:?}, expected the truth kind"
            )));
        }
        Ok(Expr::Forall(name.into(), kind, Box::new(body)))
    }

    pub fn kind(&self) -> Result<Kind> {
        match self {
            Expr::Var(_, k) | Expr::Const(_, k) => Ok(k.clone()),
            Expr::Lam(_, from, body) => Ok(Kind::arrow(from.clone(), body.kind()?)),
            Expr::App(fun, _) => match fun.kind()? {
                Kind::Arrow(_, to) => Ok(*to),
                other => Err(Error::KindError(format!(
                    "application head has non-function kind {other:?}"
                ))),
            },
            Expr::Implies(_, _) | Expr::Forall(_, _, _) | Expr::Bottom => Ok(Kind::prop()),
        }
    }

    /// Free variables with their kinds, in first-occurrence order.
    pub fn free_vars(&self) -> Vec<(String, Kind)> {
        fn walk(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<(String, Kind)>) {
            match e {
                Expr::Var(x, k) => {
                    if !bound.iter().any(|b| b == x) && !out.iter().any(|(v, _)| v == x) {
                        out.push((x.clone(), k.clone()));
                    }
                }
                Expr::Const(_, _) | Expr::Bottom => {}
                Expr::Lam(x, _, body) | Expr::Forall(x, _, body) => {
                    bound.push(x.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
                Expr::App(f, a) => {
                    walk(f, bound, out);
                    walk(a, bound, out);
                }
                Expr::Implies(l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free(&self, name: &str) -> bool {
        self.free_vars().iter().any(|(v, _)| v == name)
    }

    /// Capture-avoiding substitution of `replacement` for the free variable
    /// `name`; binders that would capture are renamed.
    pub fn subst(&self, name: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(x, _) if x == name => replacement.clone(),
            Expr::Var(_, _) | Expr::Const(_, _) | Expr::Bottom => self.clone(),
            Expr::App(f, a) => Expr::App(
                Box::new(f.subst(name, replacement)),
                Box::new(a.subst(name, replacement)),
            ),
            Expr::Implies(l, r) => Expr::Implies(
                Box::new(l.subst(name, replacement)),
                Box::new(r.subst(name, replacement)),
            ),
            Expr::Lam(x, k, body) => {
                let (x, body) = rename_if_captures(x, k, body, name, replacement);
                Expr::Lam(x, k.clone(), Box::new(body.subst(name, replacement)))
            }
            Expr::Forall(x, k, body) => {
                let (x, body) = rename_if_captures(x, k, body, name, replacement);
                Expr::Forall(x, k.clone(), Box::new(body.subst(name, replacement)))
            }
        }
    }

    /// Alpha equivalence.
    pub fn alpha_eq(&self, other: &Expr) -> bool {
        fn go(a: &Expr, b: &Expr, pairs: &mut Vec<(String, String)>) -> bool {
            match (a, b) {
                (Expr::Var(x, kx), Expr::Var(y, ky)) => {
                    if kx != ky {
                        return false;
                    }
                    for (l, r) in pairs.iter().rev() {
                        let hit_l = l == x;
                        let hit_r = r == y;
                        if hit_l || hit_r {
                            return hit_l && hit_r;
                        }
                    }
                    x == y
                }
                (Expr::Const(x, kx), Expr::Const(y, ky)) => x == y && kx == ky,
                (Expr::Bottom, Expr::Bottom) => true,
                (Expr::App(f1, a1), Expr::App(f2, a2)) => {
                    go(f1, f2, pairs) && go(a1, a2, pairs)
                }
                (Expr::Implies(l1, r1), Expr::Implies(l2, r2)) => {
                    go(l1, l2, pairs) && go(r1, r2, pairs)
                }
                (Expr::Lam(x, kx, b1), Expr::Lam(y, ky, b2))
                | (Expr::Forall(x, kx, b1), Expr::Forall(y, ky, b2)) => {
                    if kx != ky {
                        return false;
                    }
                    pairs.push((x.clone(), y.clone()));
                    let ok = go(b1, b2, pairs);
                    pairs.pop();
                    ok
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new())
    }
}

fn rename_if_captures(
    x: &str,
    kind: &Kind,
    body: &Expr,
    target: &str,
    replacement: &Expr,
) -> (String, Expr) {
    if x == target {
        // The binder shadows the substituted variable: leave untouched by
        // substituting a variable for itself below.
        return (x.to_string(), (*body).clone());
    }
    if body.has_free(target) && replacement.has_free(x) {
        let mut fresh = format!("{x}'");
        while body.has_free(&fresh) || replacement.has_free(&fresh) {
            fresh.push('\'');
        }
        let renamed = body.subst(x, &Expr::var(fresh.clone(), kind.clone()));
        (fresh, renamed)
    } else {
        (x.to_string(), (*body).clone())
    }
}

/// A context declaration: a realizer variable annotated with a formula.
pub type Declaration = (String, Expr);

/// A sequent: declarations, a subject polynomial over the declared realizer
/// variables, and a conclusion formula.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequent {
    pub context: Vec<Declaration>,
    pub subject: Poly<String>,
    pub formula: Expr,
}

impl Sequent {
    pub fn new(context: Vec<Declaration>, subject: Poly<String>, formula: Expr) -> Self {
        Sequent {
            context,
            subject,
            formula,
        }
    }
}

fn contexts_match(a: &[Declaration], b: &[Declaration]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|((x, f), (y, g))| x == y && f.alpha_eq(g))
}

/// Derivation rules. Quantifier elimination carries its instantiation
/// witness explicitly; nothing is ever searched.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Ax,
    ImpIntro,
    ImpElim,
    ForallIntro,
    ForallElim { witness: Expr },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::ImpIntro => "imp_i",
            Rule::ImpElim => "imp_e",
            Rule::ForallIntro => "all_i",
            Rule::ForallElim { .. } => "all_e",
        }
    }
}

/// A derivation tree. Every node states its full conclusion sequent; the
/// checker validates that each node instantiates its rule schema exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    /// Caller-supplied label used in error messages.
    pub node_id: usize,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
    pub conclusion: Sequent,
}

impl Derivation {
    pub fn new(rule: Rule, premises: Vec<Derivation>, conclusion: Sequent) -> Self {
        Derivation {
            node_id: 0,
            rule,
            premises,
            conclusion,
        }
    }

    pub fn with_id(mut self, id: usize) -> Self {
        self.node_id = id;
        self
    }
}

/// Validate every node of a derivation and return the root sequent.
pub fn check_derivation(d: &Derivation) -> Result<Sequent> {
    check_node(d)?;
    Ok(d.conclusion.clone())
}

fn expect_premises(d: &Derivation, n: usize) -> Result<()> {
    if d.premises.len() != n {
        return Err(Error::RuleMismatch {
            node: d.node_id,
            reason: format!(
                "rule {} takes {n} premises, found {}",
                d.rule.name(),
                d.premises.len()
            ),
        });
    }
    Ok(())
}

fn check_node(d: &Derivation) -> Result<()> {
    for p in &d.premises {
        check_node(p)?;
    }
    let seq = &d.conclusion;
    let mismatch = |reason: String| Error::RuleMismatch {
        node: d.node_id,
        reason,
    };

    // Well-formedness shared by all rules: formulas land in the truth kind
    // and the subject mentions declared variables only.
    for (x, f) in &seq.context {
        if !f.kind()?.is_prop() {
            return Err(Error::KindError(format!(
                "declaration {x} carries a non-formula"
            )));
        }
    }
    if !seq.formula.kind()?.is_prop() {
        return Err(Error::KindError("conclusion is not a formula".into()));
    }
    for v in seq.subject.free_vars() {
        if !seq.context.iter().any(|(x, _)| *x == v) {
            return Err(mismatch(format!(
                "subject variable {v} is not declared in the context"
            )));
        }
    }

    match &d.rule {
        Rule::Ax => {
            expect_premises(d, 0)?;
            let Poly::Var(x) = &seq.subject else {
                return Err(mismatch("axiom subject must be a variable".into()));
            };
            let declared = seq
                .context
                .iter()
                .any(|(y, f)| y == x && f.alpha_eq(&seq.formula));
            if !declared {
                return Err(mismatch(format!(
                    "declaration {x} with the concluded formula is not in the context"
                )));
            }
        }
        Rule::ImpIntro => {
            expect_premises(d, 1)?;
            let prem = &d.premises[0].conclusion;
            if prem.context.len() != seq.context.len() + 1
                || !contexts_match(&prem.context[..seq.context.len()], &seq.context)
            {
                return Err(mismatch(
                    "premise context must extend the conclusion context by one declaration".into(),
                ));
            }
            let (x, hyp) = prem.context.last().expect("non-empty by the length check");
            let Expr::Implies(lhs, rhs) = &seq.formula else {
                return Err(mismatch("conclusion must be an implication".into()));
            };
            if !lhs.alpha_eq(hyp) {
                return Err(mismatch(
                    "implication antecedent differs from the discharged declaration".into(),
                ));
            }
            if !rhs.alpha_eq(&prem.formula) {
                return Err(mismatch(
                    "implication consequent differs from the premise formula".into(),
                ));
            }
            let expected = Poly::app(
                Poly::Const("e".to_string()),
                poly::lambda_star(x, &prem.subject, &"k".to_string(), &"s".to_string()),
            );
            if seq.subject != expected {
                return Err(mismatch(
                    "subject must be the adjunctor applied to the abstracted premise subject"
                        .into(),
                ));
            }
        }
        Rule::ImpElim => {
            expect_premises(d, 2)?;
            let fun = &d.premises[0].conclusion;
            let arg = &d.premises[1].conclusion;
            if !contexts_match(&fun.context, &seq.context)
                || !contexts_match(&arg.context, &seq.context)
            {
                return Err(mismatch("premises must share the conclusion context".into()));
            }
            let Expr::Implies(lhs, rhs) = &fun.formula else {
                return Err(mismatch("first premise must conclude an implication".into()));
            };
            if !arg.formula.alpha_eq(lhs) {
                return Err(mismatch(
                    "second premise must conclude the implication antecedent".into(),
                ));
            }
            if !rhs.alpha_eq(&seq.formula) {
                return Err(mismatch(
                    "conclusion must be the implication consequent".into(),
                ));
            }
            let expected = Poly::app(fun.subject.clone(), arg.subject.clone());
            if seq.subject != expected {
                return Err(mismatch(
                    "subject must be the application of the premise subjects".into(),
                ));
            }
        }
        Rule::ForallIntro => {
            expect_premises(d, 1)?;
            let prem = &d.premises[0].conclusion;
            if !contexts_match(&prem.context, &seq.context) {
                return Err(mismatch("premise must share the conclusion context".into()));
            }
            let Expr::Forall(x, kind, body) = &seq.formula else {
                return Err(mismatch("conclusion must be a quantification".into()));
            };
            if !body.alpha_eq(&prem.formula) {
                return Err(mismatch(
                    "quantified body differs from the premise formula".into(),
                ));
            }
            let _ = kind;
            for (_, f) in &seq.context {
                if f.has_free(x) {
                    return Err(Error::FreshnessViolation {
                        node: d.node_id,
                        var: x.clone(),
                    });
                }
            }
            if seq.subject != prem.subject {
                return Err(mismatch("subject must be unchanged".into()));
            }
        }
        Rule::ForallElim { witness } => {
            expect_premises(d, 1)?;
            let prem = &d.premises[0].conclusion;
            if !contexts_match(&prem.context, &seq.context) {
                return Err(mismatch("premise must share the conclusion context".into()));
            }
            let Expr::Forall(x, kind, body) = &prem.formula else {
                return Err(mismatch("premise must conclude a quantification".into()));
            };
            let witness_kind = witness.kind()?;
            if witness_kind != *kind {
                return Err(Error::KindError(format!(
                    "witness has kind {witness_kind:?}, quantifier binds {kind:?}"
                )));
            }
            let instantiated = body.subst(x, witness);
            if !instantiated.alpha_eq(&seq.formula) {
                return Err(mismatch(
                    "conclusion differs from the instantiated quantifier body".into(),
                ));
            }
            if seq.subject != prem.subject {
                return Err(mismatch("subject must be unchanged".into()));
            }
        }
    }
    Ok(())
}

/// A point of an interpreted kind: either an atom of a base kind (for the
/// truth kind, a carrier element) or a function table indexed by the points
/// of the argument kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Atom(usize),
    Func(Vec<Value>),
}

/// A finite model: an algebra, sizes for the base kinds, and interpretations
/// for the expression constants. Function kinds are interpreted as full
/// finite function spaces, guarded by `max_space`.
pub struct Model<'a, O: Oca> {
    pub oca: &'a O,
    pub kind_sizes: BTreeMap<String, usize>,
    pub consts: BTreeMap<String, (Kind, Value)>,
    pub max_space: usize,
}

/// Default bound on interpreted kind-space sizes and satisfaction sweeps.
pub const DEFAULT_MAX_SPACE: usize = 1_000_000;

impl<'a, O: Oca> Model<'a, O> {
    pub fn new(oca: &'a O) -> Self {
        Model {
            oca,
            kind_sizes: BTreeMap::new(),
            consts: BTreeMap::new(),
            max_space: DEFAULT_MAX_SPACE,
        }
    }

    pub fn with_kind(mut self, name: impl Into<String>, size: usize) -> Self {
        self.kind_sizes.insert(name.into(), size);
        self
    }

    pub fn with_const(mut self, name: impl Into<String>, kind: Kind, value: Value) -> Self {
        self.consts.insert(name.into(), (kind, value));
        self
    }

    /// Number of points of an interpreted kind.
    pub fn kind_size(&self, kind: &Kind) -> Result<usize> {
        match kind {
            Kind::Const(c) if c == "o" => Ok(self.oca.carrier_len()),
            Kind::Const(c) => self
                .kind_sizes
                .get(c)
                .copied()
                .ok_or_else(|| Error::ModelShapeError(format!("kind {c} is not interpreted"))),
            Kind::Arrow(from, to) => {
                let m = self.kind_size(from)?;
                let n = self.kind_size(to)?;
                let mut size = 1usize;
                for _ in 0..m {
                    size = size.checked_mul(n).ok_or_else(|| {
                        Error::capacity("kind space", self.max_space, usize::MAX)
                    })?;
                    if size > self.max_space {
                        return Err(Error::capacity("kind space", self.max_space, size));
                    }
                }
                Ok(size)
            }
        }
    }

    /// The `idx`-th point of a kind, counting function tables little-endian
    /// in the argument order.
    pub fn value_by_index(&self, kind: &Kind, idx: usize) -> Result<Value> {
        match kind {
            Kind::Const(_) => Ok(Value::Atom(idx)),
            Kind::Arrow(from, to) => {
                let m = self.kind_size(from)?;
                let n = self.kind_size(to)?;
                let mut rest = idx;
                let mut table = Vec::with_capacity(m);
                for _ in 0..m {
                    table.push(self.value_by_index(to, rest % n)?);
                    rest /= n;
                }
                Ok(Value::Func(table))
            }
        }
    }

    pub fn index_of_value(&self, kind: &Kind, value: &Value) -> Result<usize> {
        match (kind, value) {
            (Kind::Const(_), Value::Atom(i)) => Ok(*i),
            (Kind::Arrow(from, to), Value::Func(table)) => {
                let m = self.kind_size(from)?;
                let n = self.kind_size(to)?;
                if table.len() != m {
                    return Err(Error::ModelShapeError(format!(
                        "function table has {} entries for a domain of {m}",
                        table.len()
                    )));
                }
                let mut idx = 0usize;
                for entry in table.iter().rev() {
                    idx = idx * n + self.index_of_value(to, entry)?;
                }
                Ok(idx)
            }
            _ => Err(Error::ModelShapeError(
                "value shape does not match its kind".into(),
            )),
        }
    }

    /// Check that a value inhabits a kind.
    pub fn validate_value(&self, kind: &Kind, value: &Value) -> Result<()> {
        match (kind, value) {
            (Kind::Const(_), Value::Atom(i)) => {
                let size = self.kind_size(kind)?;
                if *i >= size {
                    return Err(Error::ModelShapeError(format!(
                        "atom {i} outside kind of size {size}"
                    )));
                }
                Ok(())
            }
            (Kind::Arrow(from, to), Value::Func(table)) => {
                let m = self.kind_size(from)?;
                if table.len() != m {
                    return Err(Error::ModelShapeError(format!(
                        "function table has {} entries for a domain of {m}",
                        table.len()
                    )));
                }
                for entry in table {
                    self.validate_value(to, entry)?;
                }
                Ok(())
            }
            _ => Err(Error::ModelShapeError(
                "value shape does not match its kind".into(),
            )),
        }
    }

    /// Validate every constant interpretation against its declared kind.
    pub fn validate(&self) -> Result<()> {
        for (name, (kind, value)) in &self.consts {
            self.validate_value(kind, value).map_err(|e| {
                Error::ModelShapeError(format!("constant {name}: {e}"))
            })?;
        }
        Ok(())
    }

    /// Interpret an arbitrary expression under an assignment.
    pub fn interpret_any(&self, e: &Expr, assign: &mut HashMap<String, Value>) -> Result<Value> {
        match e {
            Expr::Var(x, _) => assign
                .get(x)
                .cloned()
                .ok_or_else(|| Error::UnboundVariable(x.clone())),
            Expr::Const(name, kind) => {
                let (declared, value) = self
                    .consts
                    .get(name)
                    .ok_or_else(|| Error::ModelShapeError(format!("constant {name} has no interpretation")))?;
                if declared != kind {
                    return Err(Error::KindError(format!(
                        "constant {name} used at kind {kind:?}, declared {declared:?}"
                    )));
                }
                Ok(value.clone())
            }
            Expr::Bottom => Ok(Value::Atom(self.oca.bottom().ok_or(Error::NotInfComplete)?)),
            Expr::Lam(x, from, body) => {
                let m = self.kind_size(from)?;
                let mut table = Vec::with_capacity(m);
                let saved = assign.get(x).cloned();
                for i in 0..m {
                    assign.insert(x.clone(), self.value_by_index(from, i)?);
                    table.push(self.interpret_any(body, assign)?);
                }
                restore(assign, x, saved);
                Ok(Value::Func(table))
            }
            Expr::App(f, a) => {
                let fun = self.interpret_any(f, assign)?;
                let arg = self.interpret_any(a, assign)?;
                let Kind::Arrow(from, _) = f.kind()? else {
                    return Err(Error::KindError("application of a non-function".into()));
                };
                let Value::Func(table) = fun else {
                    return Err(Error::ModelShapeError(
                        "function expression interpreted as an atom".into(),
                    ));
                };
                let idx = self.index_of_value(&from, &arg)?;
                table.get(idx).cloned().ok_or_else(|| {
                    Error::ModelShapeError("argument index outside function table".into())
                })
            }
            Expr::Implies(l, r) => {
                let a = self.interpret(l, assign)?;
                let b = self.interpret(r, assign)?;
                Ok(Value::Atom(self.oca.arrow(a, b)))
            }
            Expr::Forall(x, kind, body) => {
                let m = self.kind_size(kind)?;
                let saved = assign.get(x).cloned();
                let mut operands = Vec::with_capacity(m);
                for i in 0..m {
                    assign.insert(x.clone(), self.value_by_index(kind, i)?);
                    operands.push(self.interpret(body, assign)?);
                }
                restore(assign, x, saved);
                Ok(Value::Atom(
                    self.oca.inf(&operands).ok_or(Error::NotInfComplete)?,
                ))
            }
        }
    }

    /// Interpret a formula to a carrier element.
    pub fn interpret(&self, e: &Expr, assign: &mut HashMap<String, Value>) -> Result<Elem> {
        match self.interpret_any(e, assign)? {
            Value::Atom(a) => Ok(a),
            Value::Func(_) => Err(Error::KindError(
                "expected a formula, found a function expression".into(),
            )),
        }
    }
}

fn restore(assign: &mut HashMap<String, Value>, x: &str, saved: Option<Value>) {
    match saved {
        Some(v) => {
            assign.insert(x.to_string(), v);
        }
        None => {
            assign.remove(x);
        }
    }
}

/// Outcome of a satisfaction sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatisfactionReport {
    pub holds: bool,
    pub cases: usize,
    pub countercase: Option<String>,
}

/// Check a sequent in a model: for every assignment of the free expression
/// variables and every tuple of elements below the interpreted declarations,
/// the substituted subject lies below the interpreted conclusion.
pub fn satisfies<O: Oca>(m: &Model<'_, O>, seq: &Sequent) -> Result<SatisfactionReport> {
    for v in seq.subject.free_vars() {
        if !seq.context.iter().any(|(x, _)| *x == v) {
            return Err(Error::RuleMismatch {
                node: 0,
                reason: format!("subject variable {v} is not declared"),
            });
        }
    }

    // Free expression variables across all formulas of the sequent.
    let mut free: Vec<(String, Kind)> = Vec::new();
    for (_, f) in &seq.context {
        for (v, k) in f.free_vars() {
            if !free.iter().any(|(w, _)| *w == v) {
                free.push((v, k));
            }
        }
    }
    for (v, k) in seq.formula.free_vars() {
        if !free.iter().any(|(w, _)| *w == v) {
            free.push((v, k));
        }
    }

    let sizes: Vec<usize> = free
        .iter()
        .map(|(_, k)| m.kind_size(k))
        .collect::<Result<_>>()?;
    let mut total_assignments = 1usize;
    for &s in &sizes {
        total_assignments = total_assignments
            .checked_mul(s)
            .filter(|&t| t <= m.max_space)
            .ok_or_else(|| Error::capacity("assignment sweep", m.max_space, usize::MAX))?;
    }

    let carrier: Vec<Elem> = m.oca.elems().collect();
    let k = seq.context.len();
    let mut report = SatisfactionReport {
        holds: true,
        cases: 0,
        countercase: None,
    };

    let mut assign_idx = vec![0usize; free.len()];
    loop {
        let mut assign: HashMap<String, Value> = HashMap::new();
        for (slot, (name, kind)) in free.iter().enumerate() {
            assign.insert(name.clone(), m.value_by_index(kind, assign_idx[slot])?);
        }

        let bounds: Vec<Elem> = seq
            .context
            .iter()
            .map(|(_, f)| m.interpret(f, &mut assign))
            .collect::<Result<_>>()?;
        let goal = m.interpret(&seq.formula, &mut assign)?;

        // Sweep all tuples below the interpreted declarations.
        let mut tuple = vec![0usize; k];
        'tuples: loop {
            let values: Vec<Elem> = tuple.iter().map(|&i| carrier[i]).collect();
            if values
                .iter()
                .zip(&bounds)
                .all(|(&b, &bound)| m.oca.leq(b, bound))
            {
                report.cases += 1;
                let env: HashMap<String, Elem> = seq
                    .context
                    .iter()
                    .map(|(x, _)| x.clone())
                    .zip(values.iter().copied())
                    .collect();
                let subject = poly::eval_named(m.oca, &seq.subject, &env)?;
                if !m.oca.leq(subject, goal) {
                    report.holds = false;
                    report.countercase = Some(format!(
                        "assignment {assign_idx:?}, tuple {values:?}: subject {subject} is not below {goal}"
                    ));
                    return Ok(report);
                }
            }
            for slot in 0..k {
                tuple[slot] += 1;
                if tuple[slot] < carrier.len() {
                    continue 'tuples;
                }
                tuple[slot] = 0;
            }
            break;
        }

        for slot in 0..free.len() {
            assign_idx[slot] += 1;
            if assign_idx[slot] < sizes[slot] {
                break;
            }
            assign_idx[slot] = 0;
            if slot + 1 == free.len() {
                return Ok(report);
            }
        }
        if free.is_empty() {
            return Ok(report);
        }
    }
}

/// Leibniz equality at a kind: every predicate holding of the left side
/// holds of the right side.
pub fn leibniz_eq(kind: &Kind, lhs: Expr, rhs: Expr) -> Result<Expr> {
    let mut var = "y".to_string();
    while lhs.has_free(&var) || rhs.has_free(&var) {
        var.push('\'');
    }
    let pred_kind = Kind::arrow(kind.clone(), Kind::prop());
    let y = Expr::var(var.clone(), pred_kind.clone());
    let body = Expr::implies(Expr::app(y.clone(), lhs)?, Expr::app(y, rhs)?)?;
    Expr::forall(var, pred_kind, body)
}

/// Negated Leibniz equality: the equality implies falsity.
pub fn leibniz_neq(kind: &Kind, lhs: Expr, rhs: Expr) -> Result<Expr> {
    Expr::implies(leibniz_eq(kind, lhs, rhs)?, Expr::Bottom)
}

/// The individuals kind and the two arithmetic constants.
pub fn individuals_kind() -> Kind {
    Kind::base("I")
}

pub fn zero_const() -> Expr {
    Expr::constant("0", individuals_kind())
}

pub fn succ_const() -> Expr {
    Expr::constant("succ", Kind::arrow(individuals_kind(), individuals_kind()))
}

/// The inductive-membership formula: the individual `z` lies in every
/// subset that contains zero and is closed under successor.
pub fn nat_predicate(z: &str) -> Expr {
    let ind = individuals_kind();
    let set_kind = Kind::arrow(ind.clone(), Kind::prop());
    let x = || Expr::var("x", set_kind.clone());
    let y = Expr::var("y", ind.clone());
    let step = Expr::forall(
        "y",
        ind.clone(),
        Expr::implies(
            Expr::app(x(), y.clone()).unwrap(),
            Expr::app(x(), Expr::app(succ_const(), y).unwrap()).unwrap(),
        )
        .unwrap(),
    )
    .unwrap();
    let base_to_goal = Expr::implies(
        Expr::app(x(), zero_const()).unwrap(),
        Expr::app(x(), Expr::var(z, ind)).unwrap(),
    )
    .unwrap();
    Expr::forall(
        "x",
        set_kind,
        Expr::implies(step, base_to_goal).unwrap(),
    )
    .unwrap()
}

/// Verdict for one equational instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationCheck {
    pub label: String,
    pub holds: bool,
}

/// Report of the arithmetic realizer checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeanoReport {
    pub identity_realizer: Elem,
    pub equations: Vec<EquationCheck>,
    pub succ_realizer: Elem,
    pub succ_axiom_holds: bool,
}

impl PeanoReport {
    pub fn all_hold(&self) -> bool {
        self.succ_axiom_holds && self.equations.iter().all(|e| e.holds)
    }
}

/// Check that the identity realizes the supplied equational instances and
/// that the successor-distinctness axiom is realized by the swapped
/// application of the distributor.
///
/// Requires the individuals kind with its two constants, and a successor
/// interpretation that never produces the zero interpretation; otherwise the
/// distinctness axiom is semantically false and the check meaningless.
pub fn peano_realizers<O: Oca>(
    m: &Model<'_, O>,
    equations: &[(Expr, Expr)],
) -> Result<PeanoReport> {
    let ind = individuals_kind();
    let n = m.kind_size(&ind)?;
    let (zero_kind, zero_val) = m
        .consts
        .get("0")
        .ok_or_else(|| Error::ModelShapeError("constant 0 is not interpreted".into()))?;
    let (succ_kind, succ_val) = m
        .consts
        .get("succ")
        .ok_or_else(|| Error::ModelShapeError("constant succ is not interpreted".into()))?;
    if *zero_kind != ind || *succ_kind != Kind::arrow(ind.clone(), ind.clone()) {
        return Err(Error::ModelShapeError(
            "arithmetic constants have unexpected kinds".into(),
        ));
    }
    let Value::Func(succ_table) = succ_val else {
        return Err(Error::ModelShapeError("succ must be a function".into()));
    };
    if succ_table.len() != n {
        return Err(Error::ModelShapeError(
            "succ table does not cover the individuals".into(),
        ));
    }
    if succ_table.iter().any(|v| v == zero_val) {
        return Err(Error::ModelShapeError(
            "succ reaches the zero interpretation; the distinctness axiom is false here".into(),
        ));
    }

    // λ*x. x, evaluated in the algebra.
    let identity_poly = poly::lambda_star(
        "x",
        &Poly::<String>::var("x"),
        &"k".to_string(),
        &"s".to_string(),
    );
    let identity = poly::eval_named(m.oca, &identity_poly, &HashMap::new())?;

    let mut eq_checks = Vec::new();
    for (i, (lhs, rhs)) in equations.iter().enumerate() {
        let formula = leibniz_eq(&ind, lhs.clone(), rhs.clone())?;
        let value = m.interpret(&formula, &mut HashMap::new())?;
        eq_checks.push(EquationCheck {
            label: format!("equation {i}"),
            holds: m.oca.leq(identity, value),
        });
    }

    // λ*x. x s, evaluated in the algebra.
    let succ_poly = poly::lambda_star(
        "x",
        &Poly::app(Poly::var("x"), Poly::Const("s".to_string())),
        &"k".to_string(),
        &"s".to_string(),
    );
    let succ_realizer = poly::eval_named(m.oca, &succ_poly, &HashMap::new())?;
    let axiom = Expr::forall(
        "x",
        ind.clone(),
        leibniz_neq(
            &ind,
            Expr::app(succ_const(), Expr::var("x", ind.clone()))?,
            zero_const(),
        )?,
    )?;
    let axiom_value = m.interpret(&axiom, &mut HashMap::new())?;

    Ok(PeanoReport {
        identity_realizer: identity,
        equations: eq_checks,
        succ_realizer,
        succ_axiom_holds: m.oca.leq(succ_realizer, axiom_value),
    })
}

/// A saturating-successor model over `0..n-1`: successor adds one and sticks
/// at the top, so it never reaches zero.
pub fn saturating_model<'a, O: Oca>(oca: &'a O, n: usize) -> Result<Model<'a, O>> {
    if n < 2 {
        return Err(Error::ModelShapeError(
            "saturating model needs at least two individuals".into(),
        ));
    }
    let table = (0..n).map(|i| Value::Atom((i + 1).min(n - 1))).collect();
    Ok(Model::new(oca)
        .with_kind("I", n)
        .with_const("0", individuals_kind(), Value::Atom(0))
        .with_const(
            "succ",
            Kind::arrow(individuals_kind(), individuals_kind()),
            Value::Func(table),
        ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oca::DerivedOca;
    use crate::paks::FinitePaks;
    use crate::rl::{EnumConfig, PushTable, RealizabilityLattice};

    fn two_point_oca() -> DerivedOca {
        let rl = RealizabilityLattice::with_sizes(1, 1, &[]).unwrap();
        let push = PushTable::new(vec![vec![0]], 1, 1).unwrap();
        let paks = FinitePaks::new(rl, vec![vec![0]], push, vec![0], 0, 0, 0).unwrap();
        DerivedOca::from_paks(paks, &EnumConfig::default()).unwrap()
    }

    fn atom(name: &str) -> Expr {
        Expr::constant(name, Kind::prop())
    }

    #[test]
    fn kinds_of_constructors() {
        let a = atom("A");
        let imp = Expr::implies(a.clone(), a.clone()).unwrap();
        assert!(imp.kind().unwrap().is_prop());
        let bad = Expr::app(a.clone(), a.clone());
        assert!(matches!(bad, Err(Error::KindError(_))));
        let lam = Expr::lam("x", Kind::base("I"), atom("A"));
        assert_eq!(
            lam.kind().unwrap(),
            Kind::arrow(Kind::base("I"), Kind::prop())
        );
    }

    #[test]
    fn subst_avoids_capture() {
        // (forall y. x y) with x := y must rename the binder.
        let ind = Kind::base("I");
        let pred = Kind::arrow(ind.clone(), Kind::prop());
        let body = Expr::app(Expr::var("x", pred.clone()), Expr::var("y", ind.clone())).unwrap();
        let formula = Expr::forall("y", ind.clone(), body).unwrap();
        let replaced = formula.subst("x", &Expr::var("y", pred.clone()));
        let Expr::Forall(binder, _, inner) = &replaced else {
            panic!("expected a quantifier");
        };
        assert_ne!(binder, "y");
        assert!(inner.has_free("y"));
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        let ind = Kind::base("I");
        let a = Expr::forall("x", ind.clone(), atom("A")).unwrap();
        let b = Expr::forall("z", ind.clone(), atom("A")).unwrap();
        assert!(a.alpha_eq(&b));
        let c = Expr::forall("x", Kind::prop(), atom("A")).unwrap();
        assert!(!a.alpha_eq(&c));
    }

    fn ax_node(x: &str, formula: Expr) -> Derivation {
        Derivation::new(
            Rule::Ax,
            vec![],
            Sequent::new(
                vec![(x.to_string(), formula.clone())],
                Poly::var(x),
                formula,
            ),
        )
    }

    #[test]
    fn axiom_node_checks() {
        let d = ax_node("x", atom("A"));
        assert!(check_derivation(&d).is_ok());
        // Undeclared variable fails.
        let bad = Derivation::new(
            Rule::Ax,
            vec![],
            Sequent::new(vec![], Poly::var("x"), atom("A")),
        );
        assert!(matches!(
            check_derivation(&bad),
            Err(Error::RuleMismatch { .. })
        ));
    }

    #[test]
    fn implication_introduction_builds_expected_subject() {
        let prem = ax_node("x", atom("A"));
        let subject = Poly::app(
            Poly::Const("e".to_string()),
            poly::lambda_star("x", &Poly::var("x"), &"k".to_string(), &"s".to_string()),
        );
        let conclusion = Sequent::new(
            vec![],
            subject,
            Expr::implies(atom("A"), atom("A")).unwrap(),
        );
        let d = Derivation::new(Rule::ImpIntro, vec![prem], conclusion);
        assert!(check_derivation(&d).is_ok());
    }

    #[test]
    fn freshness_violation_detected() {
        let ind = Kind::base("I");
        let pred = Kind::arrow(ind.clone(), Kind::prop());
        // Context formula mentions y free; quantifying over y must fail.
        let ctx_formula =
            Expr::app(Expr::constant("P", pred.clone()), Expr::var("y", ind.clone())).unwrap();
        let prem = ax_node("h", ctx_formula.clone());
        let conclusion = Sequent::new(
            vec![("h".to_string(), ctx_formula.clone())],
            Poly::var("h"),
            Expr::forall("y", ind, ctx_formula).unwrap(),
        );
        let d = Derivation::new(Rule::ForallIntro, vec![prem], conclusion);
        assert!(matches!(
            check_derivation(&d),
            Err(Error::FreshnessViolation { .. })
        ));
    }

    #[test]
    fn quantifier_elimination_substitutes_witness() {
        let ind = Kind::base("I");
        let pred = Kind::arrow(ind.clone(), Kind::prop());
        let p_of = |e: Expr| Expr::app(Expr::constant("P", pred.clone()), e).unwrap();
        let quantified = Expr::forall("v", ind.clone(), p_of(Expr::var("v", ind.clone()))).unwrap();
        let prem = ax_node("h", quantified.clone());
        let conclusion = Sequent::new(
            vec![("h".to_string(), quantified)],
            Poly::var("h"),
            p_of(zero_const()),
        );
        let d = Derivation::new(
            Rule::ForallElim {
                witness: zero_const(),
            },
            vec![prem],
            conclusion,
        );
        assert!(check_derivation(&d).is_ok());
    }

    #[test]
    fn interpretation_of_implication_and_forall() {
        let o = two_point_oca();
        let m = Model::new(&o)
            .with_kind("I", 2)
            .with_const("A", Kind::prop(), Value::Atom(1));
        let a = atom("A");
        let mut assign = HashMap::new();
        let imp = Expr::implies(a.clone(), a.clone()).unwrap();
        assert_eq!(
            m.interpret(&imp, &mut assign).unwrap(),
            o.arrow(1, 1)
        );
        // Quantifying over a singleton-interpretation variable takes the inf
        // of the two instance values.
        let body = Expr::implies(a.clone(), a.clone()).unwrap();
        let all = Expr::forall("v", Kind::base("I"), body).unwrap();
        let direct = m.interpret(&all, &mut assign).unwrap();
        assert_eq!(direct, o.inf(&[o.arrow(1, 1), o.arrow(1, 1)]).unwrap());
    }

    #[test]
    fn forall_over_prop_functions_matches_direct_inf() {
        // The Leibniz equality of an individual with itself: the inf over
        // all unary predicates of (h x → h x), computed two ways.
        let o = two_point_oca();
        let m = saturating_model(&o, 2).unwrap();
        let formula = leibniz_eq(&individuals_kind(), zero_const(), zero_const()).unwrap();
        let by_interp = m.interpret(&formula, &mut HashMap::new()).unwrap();

        let mut operands = Vec::new();
        // Functions 0..2 → carrier, little-endian tables over two points.
        for f0 in o.elems() {
            for _f1 in o.elems() {
                operands.push(o.arrow(f0, f0));
            }
        }
        let direct = o.inf(&operands).unwrap();
        assert_eq!(by_interp, direct);
    }

    #[test]
    fn satisfies_trivial_sequent() {
        let o = two_point_oca();
        let m = Model::new(&o).with_const("A", Kind::prop(), Value::Atom(0));
        // Empty context, subject k k (a closed filter element), formula A
        // whose interpretation is the top element.
        let subject = Poly::app(Poly::Const("k".to_string()), Poly::Const("k".to_string()));
        let seq = Sequent::new(vec![], subject, atom("A"));
        let report = satisfies(&m, &seq).unwrap();
        assert!(report.holds);
    }

    #[test]
    fn satisfies_finds_countercase() {
        let o = two_point_oca();
        // A interpreted strictly above B: x:A does not entail x:B whenever
        // some element below A is not below B.
        let m = Model::new(&o)
            .with_const("A", Kind::prop(), Value::Atom(1))
            .with_const("B", Kind::prop(), Value::Atom(0));
        let seq = Sequent::new(
            vec![("x".to_string(), atom("A"))],
            Poly::var("x"),
            atom("B"),
        );
        let report = satisfies(&m, &seq).unwrap();
        // In the two-point algebra element 1 (the bottom of the order) is
        // below everything, so this actually holds; flip the constants to
        // force a countercase.
        assert!(report.holds);
        let m2 = Model::new(&o)
            .with_const("A", Kind::prop(), Value::Atom(0))
            .with_const("B", Kind::prop(), Value::Atom(1));
        let report2 = satisfies(&m2, &seq).unwrap();
        assert!(!report2.holds);
        assert!(report2.countercase.is_some());
    }

    #[test]
    fn nat_predicate_shape() {
        let formula = nat_predicate("z");
        assert!(formula.kind().unwrap().is_prop());
        assert_eq!(
            formula.free_vars(),
            vec![("z".to_string(), individuals_kind())]
        );
    }

    #[test]
    fn nat_predicate_interpretable() {
        let o = two_point_oca();
        let m = saturating_model(&o, 2).unwrap();
        let formula = nat_predicate("z");
        for i in 0..2 {
            let mut assign = HashMap::new();
            assign.insert("z".to_string(), Value::Atom(i));
            let value = m.interpret(&formula, &mut assign).unwrap();
            assert!(value < o.carrier_len());
        }
    }

    #[test]
    fn saturating_model_rejects_degenerate_shape() {
        let o = two_point_oca();
        assert!(saturating_model(&o, 1).is_err());
        // A looping successor on a singleton individuals kind hits zero.
        let m = Model::new(&o)
            .with_kind("I", 1)
            .with_const("0", individuals_kind(), Value::Atom(0))
            .with_const(
                "succ",
                Kind::arrow(individuals_kind(), individuals_kind()),
                Value::Func(vec![Value::Atom(0)]),
            );
        assert!(matches!(
            peano_realizers(&m, &[]),
            Err(Error::ModelShapeError(_))
        ));
    }

    #[test]
    fn peano_realizers_on_two_point_algebra() {
        let o = two_point_oca();
        let m = saturating_model(&o, 2).unwrap();
        let eqs = vec![
            (zero_const(), zero_const()),
            (
                Expr::app(succ_const(), zero_const()).unwrap(),
                Expr::app(succ_const(), zero_const()).unwrap(),
            ),
        ];
        let report = peano_realizers(&m, &eqs).unwrap();
        assert!(report.all_hold(), "{report:?}");
    }
}
