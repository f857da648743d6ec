//! Combinatory polynomials over an algebra: bracket abstraction, evaluation,
//! the pairing/commutation toolkit, and the filter-induced order.
//!
//! Polynomials are parameterized by their constant type: carrier elements
//! for algebra-level work, names for the surface syntax and for realizers
//! shipped inside derivation files.

use std::collections::HashMap;

use crate::error::Error;
use crate::oca::{Elem, Oca};
use crate::Result;

/// A combinatory polynomial with constants of type `C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Poly<C> {
    Const(C),
    Var(String),
    App(Box<Poly<C>>, Box<Poly<C>>),
}

impl<C> Poly<C> {
    pub fn var(name: impl Into<String>) -> Self {
        Poly::Var(name.into())
    }

    pub fn app(f: Poly<C>, a: Poly<C>) -> Self {
        Poly::App(Box::new(f), Box::new(a))
    }

    /// Left-associated application of several arguments.
    pub fn apps(head: Poly<C>, args: impl IntoIterator<Item = Poly<C>>) -> Self {
        args.into_iter().fold(head, Poly::app)
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            Poly::App(f, a) => f.size() + a.size(),
            _ => 1,
        }
    }

    pub fn occurs(&self, y: &str) -> bool {
        match self {
            Poly::Var(x) => x == y,
            Poly::Const(_) => false,
            Poly::App(f, a) => f.occurs(y) || a.occurs(y),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn walk<C>(p: &Poly<C>, out: &mut Vec<String>) {
            match p {
                Poly::Var(x) => {
                    if !out.iter().any(|v| v == x) {
                        out.push(x.clone());
                    }
                }
                Poly::Const(_) => {}
                Poly::App(f, a) => {
                    walk(f, out);
                    walk(a, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Apply `f` to every constant.
    pub fn map_consts<D>(&self, f: &impl Fn(&C) -> D) -> Poly<D> {
        match self {
            Poly::Const(c) => Poly::Const(f(c)),
            Poly::Var(x) => Poly::Var(x.clone()),
            Poly::App(l, r) => Poly::app(l.map_consts(f), r.map_consts(f)),
        }
    }

    pub fn consts(&self) -> Vec<&C> {
        match self {
            Poly::Const(c) => vec![c],
            Poly::Var(_) => vec![],
            Poly::App(f, a) => {
                let mut out = f.consts();
                out.extend(a.consts());
                out
            }
        }
    }
}

impl<C: Clone> Poly<C> {
    /// Substitution is grafting: polynomials have no binders, so nothing can
    /// be captured.
    pub fn subst(&self, y: &str, u: &Poly<C>) -> Poly<C> {
        match self {
            Poly::Var(x) if x == y => u.clone(),
            Poly::Var(_) | Poly::Const(_) => self.clone(),
            Poly::App(f, a) => Poly::app(f.subst(y, u), a.subst(y, u)),
        }
    }
}

/// Bracket abstraction. Recursion over three clauses, tried in this order:
/// when `y` does not occur the whole term is guarded with `k` (so an
/// application not containing `y` compiles to the smaller `k(tu)` form);
/// the variable itself becomes `skk`; an application distributes through `s`.
pub fn lambda_star<C: Clone>(y: &str, t: &Poly<C>, k: &C, s: &C) -> Poly<C> {
    if !t.occurs(y) {
        return Poly::app(Poly::Const(k.clone()), t.clone());
    }
    match t {
        Poly::Var(_) => {
            // Occurrence plus non-application means this is `y` itself.
            let sk = Poly::app(Poly::Const(s.clone()), Poly::Const(k.clone()));
            Poly::app(sk, Poly::Const(k.clone()))
        }
        Poly::App(f, a) => {
            let lf = lambda_star(y, f, k, s);
            let la = lambda_star(y, a, k, s);
            Poly::app(Poly::app(Poly::Const(s.clone()), lf), la)
        }
        Poly::Const(_) => unreachable!("constants never contain variables"),
    }
}

/// Abstract several variables, innermost last.
pub fn lambda_star_many<C: Clone>(ys: &[&str], t: &Poly<C>, k: &C, s: &C) -> Poly<C> {
    let mut out = t.clone();
    for y in ys.iter().rev() {
        out = lambda_star(y, &out, k, s);
    }
    out
}

/// Homomorphic evaluation of an element-constant polynomial.
pub fn eval(o: &impl Oca, t: &Poly<Elem>, env: &HashMap<String, Elem>) -> Result<Elem> {
    match t {
        Poly::Const(a) => Ok(*a),
        Poly::Var(x) => env
            .get(x)
            .copied()
            .ok_or_else(|| Error::UnboundVariable(x.clone())),
        Poly::App(f, a) => Ok(o.app(eval(o, f, env)?, eval(o, a, env)?)),
    }
}

/// Resolve a named realizer constant to its algebra element.
pub fn resolve_const(o: &impl Oca, name: &str) -> Result<Elem> {
    match name {
        "k" => Ok(o.k()),
        "s" => Ok(o.s()),
        "e" => Ok(o.adjunctor()),
        "i" => Ok(o.skk()),
        _ => Err(Error::UnboundVariable(format!("constant {name}"))),
    }
}

/// Evaluate a named-constant polynomial by resolving `k`, `s`, `e`, `i`.
pub fn eval_named(o: &impl Oca, t: &Poly<String>, env: &HashMap<String, Elem>) -> Result<Elem> {
    let resolved = try_map_consts(t, &|name| resolve_const(o, name))?;
    eval(o, &resolved, env)
}

fn try_map_consts<C, D>(p: &Poly<C>, f: &impl Fn(&C) -> Result<D>) -> Result<Poly<D>> {
    Ok(match p {
        Poly::Const(c) => Poly::Const(f(c)?),
        Poly::Var(x) => Poly::Var(x.clone()),
        Poly::App(l, r) => Poly::app(try_map_consts(l, f)?, try_map_consts(r, f)?),
    })
}

/// Precomputed programming toolkit over a fixed algebra: pairing with its
/// projections, the argument swapper, identity, and the composition helpers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Toolkit {
    /// Pairing element: `pair a b` is the meet `a ∧ b`.
    pub pair: Elem,
    pub proj1: Elem,
    pub proj2: Elem,
    /// Second projection combinator `k' = λ*x λ*y. y`.
    pub second: Elem,
    /// Swap: `(swap a) b` reduces below `b a`.
    pub swap: Elem,
    /// Identity `skk`.
    pub ident: Elem,
    /// `e0 = s(ki)`, a weak adjunctor: `e0 a b` reduces below `a b`.
    pub e0: Elem,
    /// Bottom-arrow realizer `g = F(e)(s i)`.
    pub g: Elem,
}

fn eval_closed(o: &impl Oca, t: &Poly<Elem>) -> Elem {
    eval(o, t, &HashMap::new()).expect("closed polynomial")
}

impl Toolkit {
    pub fn new(o: &impl Oca) -> Toolkit {
        let k = o.k();
        let s = o.s();
        let c = Poly::Const;
        let v = Poly::<Elem>::var;

        // pair = λ*x1 λ*x2 λ*x3. x3 x1 x2
        let pair_poly = lambda_star_many(
            &["x1", "x2", "x3"],
            &Poly::apps(v("x3"), [v("x1"), v("x2")]),
            &k,
            &s,
        );
        let pair = eval_closed(o, &pair_poly);

        // proj1 = λ*x1. x1 k
        let proj1 = eval_closed(o, &lambda_star("x1", &Poly::app(v("x1"), c(k)), &k, &s));

        // second = λ*x1 λ*x2. x2
        let second_poly = lambda_star_many(&["x1", "x2"], &v("x2"), &k, &s);
        let second = eval_closed(o, &second_poly);

        // proj2 = λ*x1. x1 second
        let proj2 = eval_closed(
            o,
            &lambda_star("x1", &Poly::app(v("x1"), c(second)), &k, &s),
        );

        // swap = λ*x1 λ*x2. x2 x1
        let swap_poly = lambda_star_many(&["x1", "x2"], &Poly::app(v("x2"), v("x1")), &k, &s);
        let swap = eval_closed(o, &swap_poly);

        let ident = o.skk();

        // e0 = s (k ident)
        let e0 = o.app(s, o.app(k, ident));

        let mut toolkit = Toolkit {
            pair,
            proj1,
            proj2,
            second,
            swap,
            ident,
            e0,
            g: 0,
        };
        // g = F(e)(s ident)
        toolkit.g = o.app(
            toolkit.f_fn(o, o.adjunctor()),
            o.app(s, ident),
        );
        toolkit
    }

    /// The meet `a ∧ b`, as the pairing applied to both elements.
    pub fn wedge(&self, o: &impl Oca, a: Elem, b: Elem) -> Elem {
        o.app(o.app(self.pair, a), b)
    }

    /// `D(a) = λ*x λ*y. x (a y)`: `D(a) c b` reduces below `c (a b)`.
    pub fn d_fn(&self, o: &impl Oca, a: Elem) -> Elem {
        let body = Poly::app(
            Poly::var("x"),
            Poly::app(Poly::Const(a), Poly::var("y")),
        );
        eval_closed(o, &lambda_star_many(&["x", "y"], &body, &o.k(), &o.s()))
    }

    /// `E(a) = λ*x λ*y. y (a x)`: `E(a) b c` reduces below `c (a b)`.
    pub fn e_fn(&self, o: &impl Oca, a: Elem) -> Elem {
        let body = Poly::app(
            Poly::var("y"),
            Poly::app(Poly::Const(a), Poly::var("x")),
        );
        eval_closed(o, &lambda_star_many(&["x", "y"], &body, &o.k(), &o.s()))
    }

    /// `F(c) = λ*x λ*y. c (x y)`: `F(c) a b` reduces below `c (a b)`.
    pub fn f_fn(&self, o: &impl Oca, c: Elem) -> Elem {
        let body = Poly::app(
            Poly::Const(c),
            Poly::app(Poly::var("x"), Poly::var("y")),
        );
        eval_closed(o, &lambda_star_many(&["x", "y"], &body, &o.k(), &o.s()))
    }

    /// `G(c) = λ*x. (c (proj1 x)) (proj2 x)`: `G(c) (a ∧ b)` reduces below
    /// `(c a) b`.
    pub fn g_fn(&self, o: &impl Oca, c: Elem) -> Elem {
        let x = Poly::var("x");
        let body = Poly::app(
            Poly::app(
                Poly::Const(c),
                Poly::app(Poly::Const(self.proj1), x.clone()),
            ),
            Poly::app(Poly::Const(self.proj2), x),
        );
        eval_closed(o, &lambda_star("x", &body, &o.k(), &o.s()))
    }

    /// `M(c, b) = λ*x. (c x) b`: `M(c, b) a` reduces below `(c a) b`.
    pub fn m_fn(&self, o: &impl Oca, c: Elem, b: Elem) -> Elem {
        let body = Poly::app(
            Poly::app(Poly::Const(c), Poly::var("x")),
            Poly::Const(b),
        );
        eval_closed(o, &lambda_star("x", &body, &o.k(), &o.s()))
    }

    /// `H(m, n) = F(e)(F(F(m)) n)`: turns `m((n a) b) ≤ c` into
    /// `H(m, n) a ≤ (b → c)`.
    pub fn h_fn(&self, o: &impl Oca, m: Elem, n: Elem) -> Elem {
        let f_e = self.f_fn(o, o.adjunctor());
        let f_f_m = self.f_fn(o, self.f_fn(o, m));
        o.app(f_e, o.app(f_f_m, n))
    }

    /// `R(c) = G(F(D(c)) pair)`: `R(c) (a ∧ b)` reduces below `a ∧ (c b)`.
    pub fn r_fn(&self, o: &impl Oca, c: Elem) -> Elem {
        let fd = self.f_fn(o, self.d_fn(o, c));
        self.g_fn(o, o.app(fd, self.pair))
    }
}

/// The filter-induced order: some filter element maps `a` below `b`.
/// Reflexive and transitive, implied by the algebra order, and generally not
/// antisymmetric. Returns the first witness in carrier order.
pub fn sq_leq_witness(o: &impl Oca, a: Elem, b: Elem) -> Option<Elem> {
    o.elems()
        .filter(|&f| o.in_filter(f))
        .find(|&f| o.leq(o.app(f, a), b))
}

pub fn sq_leq(o: &impl Oca, a: Elem, b: Elem) -> bool {
    sq_leq_witness(o, a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oca::DerivedOca;
    use crate::paks::FinitePaks;
    use crate::rl::{EnumConfig, PushTable, RealizabilityLattice};

    fn named(name: &str) -> Poly<String> {
        Poly::Const(name.to_string())
    }

    fn star(y: &str, t: &Poly<String>) -> Poly<String> {
        lambda_star(y, t, &"k".to_string(), &"s".to_string())
    }

    fn skk() -> Poly<String> {
        Poly::app(Poly::app(named("s"), named("k")), named("k"))
    }

    #[test]
    fn abstraction_of_variable_is_skk() {
        assert_eq!(star("y", &Poly::var("y")), skk());
    }

    #[test]
    fn abstraction_of_other_variable_guards_with_k() {
        assert_eq!(
            star("y", &Poly::var("x")),
            Poly::app(named("k"), Poly::var("x"))
        );
    }

    #[test]
    fn abstraction_of_self_application() {
        let yy = Poly::app(Poly::var("y"), Poly::var("y"));
        let expected = Poly::app(Poly::app(named("s"), skk()), skk());
        assert_eq!(star("y", &yy), expected);
    }

    #[test]
    fn absent_variable_in_application_guards_whole_term() {
        // The no-occurrence clause fires before the application clause.
        let tu = Poly::app(Poly::var("t"), Poly::var("u"));
        assert_eq!(star("y", &tu), Poly::app(named("k"), tu));
    }

    #[test]
    fn abstraction_removes_the_variable() {
        let t = Poly::apps(
            Poly::var("y"),
            [Poly::var("x"), Poly::app(named("k"), Poly::var("y"))],
        );
        assert!(!star("y", &t).occurs("y"));
    }

    #[test]
    fn subst_grafts() {
        let t = Poly::app(Poly::var("y"), Poly::var("x"));
        let u = named("k");
        assert_eq!(t.subst("y", &u), Poly::app(named("k"), Poly::var("x")));
    }

    fn two_point_oca() -> DerivedOca {
        let rl = RealizabilityLattice::with_sizes(1, 1, &[]).unwrap();
        let push = PushTable::new(vec![vec![0]], 1, 1).unwrap();
        let paks = FinitePaks::new(rl, vec![vec![0]], push, vec![0], 0, 0, 0).unwrap();
        DerivedOca::from_paks(paks, &EnumConfig::default()).unwrap()
    }

    #[test]
    fn eval_constants_and_unbound_variables() {
        let o = two_point_oca();
        let env = HashMap::new();
        assert_eq!(eval(&o, &Poly::Const(1), &env).unwrap(), 1);
        assert!(matches!(
            eval(&o, &Poly::<Elem>::var("z"), &env),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn eval_named_resolves_combinators() {
        let o = two_point_oca();
        let env = HashMap::new();
        assert_eq!(eval_named(&o, &skk(), &env).unwrap(), o.skk());
        assert!(eval_named(&o, &named("q"), &env).is_err());
    }

    #[test]
    fn toolkit_on_two_point_algebra() {
        let o = two_point_oca();
        let t = Toolkit::new(&o);
        for a in o.elems() {
            for b in o.elems() {
                let w = t.wedge(&o, a, b);
                assert!(o.leq(o.app(t.proj1, w), a));
                assert!(o.leq(o.app(t.proj2, w), b));
                assert!(o.leq(o.app(o.app(t.swap, a), b), o.app(b, a)));
            }
            assert!(o.leq(o.app(t.ident, a), a));
        }
    }

    #[test]
    fn sq_leq_is_reflexive_and_weaker_than_leq() {
        let o = two_point_oca();
        for a in o.elems() {
            assert!(sq_leq(&o, a, a));
            for b in o.elems() {
                if o.leq(a, b) {
                    assert!(sq_leq(&o, a, b));
                }
            }
        }
    }
}
