//! Ordered combinatory algebras.
//!
//! The [`Oca`] trait is the abstract interface: a finite carrier indexed by
//! `usize`, a partial order, monotone application, the two combinators, an
//! implication with the half adjunction, an adjunctor, an optional classic
//! element, a filter of distinguished truth values, and infima.
//!
//! [`DerivedOca`] realizes the interface on the closed stack sets of a valid
//! pre-abstract Krivine structure; [`TableOca`] is the serialized tabular
//! form used to ship an algebra between commands without re-deriving it.
//! [`laws`] is a conformance kit that exhaustively checks every interface
//! invariant on any implementation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::paks::{FiniteAks, FinitePaks};
use crate::rl::{ClosedStackSet, EnumConfig, StackSet};
use crate::Result;

/// Carrier index of an algebra element.
pub type Elem = usize;

/// Interface of a finite ordered combinatory algebra with implication,
/// adjunctor, filter, and (partial) infima.
pub trait Oca {
    fn carrier_len(&self) -> usize;
    /// The partial order.
    fn leq(&self, a: Elem, b: Elem) -> bool;
    /// Application, monotone in both arguments.
    fn app(&self, a: Elem, b: Elem) -> Elem;
    fn k(&self) -> Elem;
    fn s(&self) -> Elem;
    /// Implication, antitone in the first argument and monotone in the second.
    fn arrow(&self, a: Elem, b: Elem) -> Elem;
    /// The adjunctor.
    fn adjunctor(&self) -> Elem;
    /// The element below every instance of Peirce's law, when present.
    fn classic(&self) -> Option<Elem>;
    fn in_filter(&self, a: Elem) -> bool;
    /// Greatest lower bound of a subset, `None` when it does not exist.
    /// The empty subset yields the top element.
    fn inf(&self, xs: &[Elem]) -> Option<Elem>;

    fn elems(&self) -> std::ops::Range<Elem> {
        0..self.carrier_len()
    }

    fn filter_elems(&self) -> Vec<Elem> {
        self.elems().filter(|&a| self.in_filter(a)).collect()
    }

    /// The identity element `skk`.
    fn skk(&self) -> Elem {
        self.app(self.app(self.s(), self.k()), self.k())
    }

    /// Infimum of the whole carrier.
    fn bottom(&self) -> Option<Elem> {
        let all: Vec<Elem> = self.elems().collect();
        self.inf(&all)
    }

    /// Infimum of the empty subset.
    fn top(&self) -> Option<Elem> {
        self.inf(&[])
    }
}

/// The algebra of closed stack sets of a valid pre-abstract Krivine
/// structure. The order is reverse inclusion; application and implication are
/// memoized into full tables at derivation time.
#[derive(Debug, Clone)]
pub struct DerivedOca {
    aks: FiniteAks,
    carrier: Vec<ClosedStackSet>,
    index: HashMap<u64, Elem>,
    app_tab: Vec<Vec<Elem>>,
    arrow_tab: Vec<Vec<Elem>>,
    k: Elem,
    s: Elem,
    e: Elem,
    c: Elem,
    filter: Vec<bool>,
}

impl DerivedOca {
    /// Derive from a pre-abstract structure, taking the minimal quasi-proof
    /// set (the distinguished terms saturated under application) for the
    /// filter.
    pub fn from_paks(paks: FinitePaks, config: &EnumConfig) -> Result<Self> {
        paks.require_valid()?;
        Self::from_aks(FiniteAks::with_minimal_qp(paks), config)
    }

    pub fn from_aks(aks: FiniteAks, config: &EnumConfig) -> Result<Self> {
        aks.paks().require_valid()?;
        let paks = aks.paks();
        let rl = paks.rl();
        let carrier = rl.enumerate_closed_stack_sets(config)?;
        let index: HashMap<u64, Elem> = carrier
            .iter()
            .enumerate()
            .map(|(i, c)| (c.stacks().0, i))
            .collect();
        let n = carrier.len();
        let mut app_tab = vec![vec![0; n]; n];
        let mut arrow_tab = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                app_tab[a][b] = index[&paks.compose(carrier[a], carrier[b]).stacks().0];
                arrow_tab[a][b] = index[&paks.arrow(carrier[a], carrier[b]).stacks().0];
            }
        }
        let single = |t| rl.perp_of_terms(crate::rl::TermSet::singleton(t));
        let k = index[&single(paks.k()).0];
        let s = index[&single(paks.s()).0];
        let e = index[&single(paks.combinator_ee()).0];
        let c = index[&single(paks.cc()).0];
        let filter = carrier
            .iter()
            .map(|cs| {
                let realizers = rl.perp_of_stacks(cs.stacks());
                !realizers.inter(aks.qp()).is_empty()
            })
            .collect();
        Ok(DerivedOca {
            aks,
            carrier,
            index,
            app_tab,
            arrow_tab,
            k,
            s,
            e,
            c,
            filter,
        })
    }

    pub fn source(&self) -> &FiniteAks {
        &self.aks
    }

    pub fn carrier_sets(&self) -> &[ClosedStackSet] {
        &self.carrier
    }

    pub fn set_of(&self, a: Elem) -> ClosedStackSet {
        self.carrier[a]
    }

    pub fn element_of(&self, set: StackSet) -> Option<Elem> {
        self.index.get(&set.0).copied()
    }

    /// Render an element as its stack set with carrier names.
    pub fn format_elem(&self, a: Elem) -> String {
        self.aks.paks().rl().format_stack_set(self.carrier[a].stacks())
    }
}

impl Oca for DerivedOca {
    fn carrier_len(&self) -> usize {
        self.carrier.len()
    }

    fn leq(&self, a: Elem, b: Elem) -> bool {
        // Reverse inclusion of stack sets.
        self.carrier[b].stacks().is_subset(self.carrier[a].stacks())
    }

    fn app(&self, a: Elem, b: Elem) -> Elem {
        self.app_tab[a][b]
    }

    fn k(&self) -> Elem {
        self.k
    }

    fn s(&self) -> Elem {
        self.s
    }

    fn arrow(&self, a: Elem, b: Elem) -> Elem {
        self.arrow_tab[a][b]
    }

    fn adjunctor(&self) -> Elem {
        self.e
    }

    fn classic(&self) -> Option<Elem> {
        Some(self.c)
    }

    fn in_filter(&self, a: Elem) -> bool {
        self.filter[a]
    }

    fn inf(&self, xs: &[Elem]) -> Option<Elem> {
        let mut union = StackSet::EMPTY;
        for &x in xs {
            union = union.union(self.carrier[x].stacks());
        }
        let closed = self.aks.paks().rl().close_stacks(union);
        Some(self.index[&closed.stacks().0])
    }
}

/// A snapshot of an algebra as plain tables, the serialized interchange form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableOca {
    pub carrier_size: usize,
    pub leq: Vec<Vec<bool>>,
    pub app: Vec<Vec<Elem>>,
    pub arrow: Vec<Vec<Elem>>,
    pub k: Elem,
    pub s: Elem,
    pub e: Elem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Elem>,
    pub filter: Vec<bool>,
}

impl TableOca {
    pub fn snapshot(o: &impl Oca) -> TableOca {
        let n = o.carrier_len();
        TableOca {
            carrier_size: n,
            leq: (0..n)
                .map(|a| (0..n).map(|b| o.leq(a, b)).collect())
                .collect(),
            app: (0..n)
                .map(|a| (0..n).map(|b| o.app(a, b)).collect())
                .collect(),
            arrow: (0..n)
                .map(|a| (0..n).map(|b| o.arrow(a, b)).collect())
                .collect(),
            k: o.k(),
            s: o.s(),
            e: o.adjunctor(),
            c: o.classic(),
            filter: (0..n).map(|a| o.in_filter(a)).collect(),
        }
    }

    /// Validate table shapes and index ranges.
    pub fn validate(&self) -> Result<()> {
        let n = self.carrier_size;
        if n == 0 {
            return Err(Error::SchemaError("carrier must be non-empty".into()));
        }
        let square_ok = |t: &Vec<Vec<Elem>>| t.len() == n && t.iter().all(|r| r.len() == n);
        if !square_ok(&self.app) || !square_ok(&self.arrow) {
            return Err(Error::SchemaError(
                "application and implication tables must be square".into(),
            ));
        }
        if self.leq.len() != n || self.leq.iter().any(|r| r.len() != n) {
            return Err(Error::SchemaError("order matrix must be square".into()));
        }
        if self.filter.len() != n {
            return Err(Error::SchemaError(
                "filter mask length must match the carrier".into(),
            ));
        }
        let in_range = |x: Elem| x < n;
        if !self.app.iter().flatten().all(|&x| in_range(x))
            || !self.arrow.iter().flatten().all(|&x| in_range(x))
        {
            return Err(Error::SchemaError("table entry out of range".into()));
        }
        if !in_range(self.k) || !in_range(self.s) || !in_range(self.e) {
            return Err(Error::SchemaError(
                "distinguished element out of range".into(),
            ));
        }
        if let Some(c) = self.c {
            if !in_range(c) {
                return Err(Error::SchemaError(
                    "classic element out of range".into(),
                ));
            }
        }
        Ok(())
    }
}

impl Oca for TableOca {
    fn carrier_len(&self) -> usize {
        self.carrier_size
    }

    fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a][b]
    }

    fn app(&self, a: Elem, b: Elem) -> Elem {
        self.app[a][b]
    }

    fn k(&self) -> Elem {
        self.k
    }

    fn s(&self) -> Elem {
        self.s
    }

    fn arrow(&self, a: Elem, b: Elem) -> Elem {
        self.arrow[a][b]
    }

    fn adjunctor(&self) -> Elem {
        self.e
    }

    fn classic(&self) -> Option<Elem> {
        self.c
    }

    fn in_filter(&self, a: Elem) -> bool {
        self.filter[a]
    }

    fn inf(&self, xs: &[Elem]) -> Option<Elem> {
        // Brute-force greatest lower bound.
        let lower: Vec<Elem> = self
            .elems()
            .filter(|&z| xs.iter().all(|&x| self.leq(z, x)))
            .collect();
        lower
            .iter()
            .copied()
            .find(|&z| lower.iter().all(|&w| self.leq(w, z)))
    }
}

pub mod laws {
    //! Conformance kit: exhaustive checks of every [`Oca`] invariant.

    use super::{Elem, Oca};

    /// Verdict of one law sweep.
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub struct LawReport {
        pub name: &'static str,
        pub holds: bool,
        pub cases: usize,
        pub counterexample: Option<String>,
    }

    impl LawReport {
        fn new(name: &'static str) -> Self {
            LawReport {
                name,
                holds: true,
                cases: 0,
                counterexample: None,
            }
        }

        fn fail(&mut self, witness: String) {
            if self.holds {
                self.holds = false;
                self.counterexample = Some(witness);
            }
        }
    }

    pub const LAW_NAMES: &[&str] = &[
        "leq-reflexive",
        "leq-transitive",
        "leq-antisymmetric",
        "app-monotone",
        "k-projection",
        "s-distribution",
        "arrow-variance",
        "half-adjunction",
        "adjunctor",
        "classic-peirce",
        "filter-combinators",
        "filter-app-closed",
        "inf-glb",
        "bottom-absorption",
    ];

    /// Run one named law; `None` when the name is unknown.
    pub fn check_law(o: &impl Oca, name: &str) -> Option<LawReport> {
        match name {
            "leq-reflexive" => Some(leq_reflexive(o)),
            "leq-transitive" => Some(leq_transitive(o)),
            "leq-antisymmetric" => Some(leq_antisymmetric(o)),
            "app-monotone" => Some(app_monotone(o)),
            "k-projection" => Some(k_projection(o)),
            "s-distribution" => Some(s_distribution(o)),
            "arrow-variance" => Some(arrow_variance(o)),
            "half-adjunction" => Some(half_adjunction(o)),
            "adjunctor" => Some(adjunctor_law(o)),
            "classic-peirce" => Some(classic_peirce(o)),
            "filter-combinators" => Some(filter_combinators(o)),
            "filter-app-closed" => Some(filter_app_closed(o)),
            "inf-glb" => Some(inf_glb(o)),
            "bottom-absorption" => Some(bottom_absorption(o)),
            _ => None,
        }
    }

    /// Run every law in declaration order.
    pub fn check_all(o: &impl Oca) -> Vec<LawReport> {
        LAW_NAMES
            .iter()
            .map(|name| check_law(o, name).expect("registered law"))
            .collect()
    }

    pub fn all_hold(reports: &[LawReport]) -> bool {
        reports.iter().all(|r| r.holds)
    }

    fn leq_reflexive(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("leq-reflexive");
        for a in o.elems() {
            r.cases += 1;
            if !o.leq(a, a) {
                r.fail(format!("a={a}"));
            }
        }
        r
    }

    fn leq_transitive(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("leq-transitive");
        for a in o.elems() {
            for b in o.elems() {
                if !o.leq(a, b) {
                    continue;
                }
                for c in o.elems() {
                    r.cases += 1;
                    if o.leq(b, c) && !o.leq(a, c) {
                        r.fail(format!("a={a}, b={b}, c={c}"));
                    }
                }
            }
        }
        r
    }

    fn leq_antisymmetric(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("leq-antisymmetric");
        for a in o.elems() {
            for b in o.elems() {
                r.cases += 1;
                if a != b && o.leq(a, b) && o.leq(b, a) {
                    r.fail(format!("a={a}, b={b}"));
                }
            }
        }
        r
    }

    /// Monotonicity in each argument separately; joint monotonicity follows
    /// by transitivity.
    fn app_monotone(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("app-monotone");
        for a in o.elems() {
            for a2 in o.elems() {
                if !o.leq(a, a2) {
                    continue;
                }
                for b in o.elems() {
                    r.cases += 1;
                    if !o.leq(o.app(a, b), o.app(a2, b)) {
                        r.fail(format!("left: a={a} <= a'={a2}, b={b}"));
                    }
                    if !o.leq(o.app(b, a), o.app(b, a2)) {
                        r.fail(format!("right: a={a} <= a'={a2}, b={b}"));
                    }
                }
            }
        }
        r
    }

    fn k_projection(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("k-projection");
        for a in o.elems() {
            for b in o.elems() {
                r.cases += 1;
                if !o.leq(o.app(o.app(o.k(), a), b), a) {
                    r.fail(format!("a={a}, b={b}"));
                }
            }
        }
        r
    }

    fn s_distribution(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("s-distribution");
        for a in o.elems() {
            let sa = o.app(o.s(), a);
            for b in o.elems() {
                let sab = o.app(sa, b);
                for c in o.elems() {
                    r.cases += 1;
                    let lhs = o.app(sab, c);
                    let rhs = o.app(o.app(a, c), o.app(b, c));
                    if !o.leq(lhs, rhs) {
                        r.fail(format!("a={a}, b={b}, c={c}"));
                    }
                }
            }
        }
        r
    }

    fn arrow_variance(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("arrow-variance");
        for a in o.elems() {
            for a2 in o.elems() {
                if !o.leq(a, a2) {
                    continue;
                }
                for b in o.elems() {
                    r.cases += 1;
                    // Antitone on the left: a <= a' gives (a' -> b) <= (a -> b).
                    if !o.leq(o.arrow(a2, b), o.arrow(a, b)) {
                        r.fail(format!("antitone: a={a} <= a'={a2}, b={b}"));
                    }
                    // Monotone on the right: a <= a' gives (b -> a) <= (b -> a').
                    if !o.leq(o.arrow(b, a), o.arrow(b, a2)) {
                        r.fail(format!("monotone: a={a} <= a'={a2}, b={b}"));
                    }
                }
            }
        }
        r
    }

    fn half_adjunction(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("half-adjunction");
        for a in o.elems() {
            for b in o.elems() {
                for c in o.elems() {
                    r.cases += 1;
                    if o.leq(a, o.arrow(b, c)) && !o.leq(o.app(a, b), c) {
                        r.fail(format!("a={a}, b={b}, c={c}"));
                    }
                }
            }
        }
        r
    }

    fn adjunctor_law(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("adjunctor");
        let e = o.adjunctor();
        for a in o.elems() {
            for b in o.elems() {
                let ab = o.app(a, b);
                for c in o.elems() {
                    r.cases += 1;
                    if o.leq(ab, c) && !o.leq(o.app(e, a), o.arrow(b, c)) {
                        r.fail(format!("a={a}, b={b}, c={c}"));
                    }
                }
            }
        }
        r
    }

    fn classic_peirce(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("classic-peirce");
        let Some(c) = o.classic() else {
            return r;
        };
        for a in o.elems() {
            for b in o.elems() {
                r.cases += 1;
                let peirce = o.arrow(o.arrow(o.arrow(a, b), a), a);
                if !o.leq(c, peirce) {
                    r.fail(format!("a={a}, b={b}"));
                }
            }
        }
        r
    }

    fn filter_combinators(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("filter-combinators");
        let mut want = vec![("k", o.k()), ("s", o.s()), ("e", o.adjunctor())];
        if let Some(c) = o.classic() {
            want.push(("c", c));
        }
        for (name, x) in want {
            r.cases += 1;
            if !o.in_filter(x) {
                r.fail(format!("{name}={x} is outside the filter"));
            }
        }
        r
    }

    fn filter_app_closed(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("filter-app-closed");
        let phi = o.filter_elems();
        for &f in &phi {
            for &g in &phi {
                r.cases += 1;
                if !o.in_filter(o.app(f, g)) {
                    r.fail(format!("f={f}, g={g}"));
                }
            }
        }
        r
    }

    /// Infima exist and are greatest lower bounds. Exhaustive over all
    /// subsets up to a carrier of 12; beyond that the empty set, singletons,
    /// pairs and the full carrier are checked.
    fn inf_glb(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("inf-glb");
        let n = o.carrier_len();
        let check = |r: &mut LawReport, xs: &[Elem]| {
            r.cases += 1;
            match o.inf(xs) {
                None => r.fail(format!("no infimum for {xs:?}")),
                Some(m) => {
                    if let Some(&x) = xs.iter().find(|&&x| !o.leq(m, x)) {
                        r.fail(format!("inf {xs:?} = {m} is not below {x}"));
                    }
                    for z in o.elems() {
                        if xs.iter().all(|&x| o.leq(z, x)) && !o.leq(z, m) {
                            r.fail(format!("lower bound {z} of {xs:?} is not below inf {m}"));
                            break;
                        }
                    }
                }
            }
        };
        if n <= 12 {
            for bits in 0..(1u32 << n) {
                let xs: Vec<Elem> = (0..n).filter(|i| bits >> i & 1 == 1).collect();
                check(&mut r, &xs);
            }
        } else {
            check(&mut r, &[]);
            for a in 0..n {
                check(&mut r, &[a]);
                for b in a + 1..n {
                    check(&mut r, &[a, b]);
                }
            }
            let all: Vec<Elem> = (0..n).collect();
            check(&mut r, &all);
        }
        r
    }

    fn bottom_absorption(o: &impl Oca) -> LawReport {
        let mut r = LawReport::new("bottom-absorption");
        let Some(bottom) = o.bottom() else {
            r.fail("carrier has no infimum".into());
            return r;
        };
        for a in o.elems() {
            r.cases += 1;
            let lhs = o.app(bottom, a);
            if !(o.leq(lhs, bottom) && o.leq(bottom, lhs)) {
                r.fail(format!("bottom applied to a={a} gives {lhs}"));
            }
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rl::{PushTable, RealizabilityLattice};

    fn tiny_paks(pole: &[(usize, usize)]) -> FinitePaks {
        let rl = RealizabilityLattice::with_sizes(1, 1, pole).unwrap();
        let push = PushTable::new(vec![vec![0]], 1, 1).unwrap();
        FinitePaks::new(rl, vec![vec![0]], push, vec![0], 0, 0, 0).unwrap()
    }

    #[test]
    fn full_pole_gives_one_element_algebra() {
        let o = DerivedOca::from_paks(tiny_paks(&[(0, 0)]), &EnumConfig::default()).unwrap();
        assert_eq!(o.carrier_len(), 1);
        assert_eq!(o.app(0, 0), 0);
        assert_eq!(o.arrow(0, 0), 0);
        assert!(laws::all_hold(&laws::check_all(&o)));
    }

    #[test]
    fn empty_pole_gives_two_element_algebra() {
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        assert_eq!(o.carrier_len(), 2);
        // Elements sorted by raw bits: empty set first, full carrier second.
        assert_eq!(o.set_of(0).stacks(), StackSet::EMPTY);
        // k and s are both the perp of a singleton term, which is empty here.
        assert_eq!(o.k(), 0);
        assert_eq!(o.s(), 0);
        // The empty set is the top of the order.
        assert!(o.leq(1, 0));
        assert!(!o.leq(0, 1));
        assert_eq!(o.top(), Some(0));
        assert_eq!(o.bottom(), Some(1));
        assert!(laws::all_hold(&laws::check_all(&o)));
    }

    #[test]
    fn empty_pole_app_evaluates_to_top() {
        // With an empty pole every term realizes the empty set, so the
        // conductor into the top element is empty and closes to the top.
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        assert_eq!(o.app(0, 0), 0);
    }

    #[test]
    fn derived_filter_is_top_only_on_empty_pole() {
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        assert!(o.in_filter(0));
        assert!(!o.in_filter(1));
        assert_eq!(o.filter_elems(), vec![0]);
    }

    #[test]
    fn inf_of_singleton_is_identity() {
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        for a in o.elems() {
            assert_eq!(o.inf(&[a]), Some(a));
        }
    }

    #[test]
    fn snapshot_round_trips_through_json() {
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        let table = TableOca::snapshot(&o);
        table.validate().unwrap();
        let json = serde_json::to_string(&table).unwrap();
        let back: TableOca = serde_json::from_str(&json).unwrap();
        assert_eq!(table, back);
        assert!(laws::all_hold(&laws::check_all(&back)));
    }

    #[test]
    fn table_inf_is_brute_force_glb() {
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        let table = TableOca::snapshot(&o);
        assert_eq!(table.inf(&[]), Some(0));
        assert_eq!(table.inf(&[0, 1]), Some(1));
    }

    #[test]
    fn unknown_law_name_is_rejected() {
        let o = DerivedOca::from_paks(tiny_paks(&[]), &EnumConfig::default()).unwrap();
        assert!(laws::check_law(&o, "no-such-law").is_none());
    }
}
