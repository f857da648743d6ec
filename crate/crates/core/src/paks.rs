//! Tabular pre-abstract and abstract Krivine structures.
//!
//! A structure is a realizability lattice together with total application,
//! push and save tables and three distinguished terms. Construction runs the
//! full axiom sweep and the resulting report travels with the value; the
//! abstract variant adds a quasi-proof set closed under application.

use crate::error::Error;
use crate::rl::{
    ClosedStackSet, PushTable, RealizabilityLattice, StackId, StackSet, TermId, TermSet,
};
use crate::Result;

/// Pass/fail of one axiom sweep, with the first counterexample when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomStatus {
    pub holds: bool,
    pub counterexample: Option<String>,
}

impl AxiomStatus {
    fn pass() -> Self {
        AxiomStatus {
            holds: true,
            counterexample: None,
        }
    }

    fn fail(witness: String) -> Self {
        AxiomStatus {
            holds: false,
            counterexample: Some(witness),
        }
    }
}

/// Exhaustive verdicts for the five structure axioms, the strong converse of
/// the first, and the eta rule for the derived eta combinator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub s1: AxiomStatus,
    pub s2: AxiomStatus,
    pub s3: AxiomStatus,
    pub s4: AxiomStatus,
    pub s5: AxiomStatus,
    pub strong_s1: AxiomStatus,
    pub s_eta: AxiomStatus,
}

impl AxiomReport {
    /// Validity requires the five axioms; strongness and the eta rule are
    /// informational.
    pub fn is_valid(&self) -> bool {
        self.s1.holds && self.s2.holds && self.s3.holds && self.s4.holds && self.s5.holds
    }

    pub fn first_failure(&self) -> Option<(&'static str, &AxiomStatus)> {
        [
            ("S1", &self.s1),
            ("S2", &self.s2),
            ("S3", &self.s3),
            ("S4", &self.s4),
            ("S5", &self.s5),
        ]
        .into_iter()
        .find(|(_, st)| !st.holds)
    }

    pub fn entries(&self) -> Vec<(&'static str, &AxiomStatus)> {
        vec![
            ("S1", &self.s1),
            ("S2", &self.s2),
            ("S3", &self.s3),
            ("S4", &self.s4),
            ("S5", &self.s5),
            ("strong-S1", &self.strong_s1),
            ("S-eta", &self.s_eta),
        ]
    }
}

/// A finite pre-abstract Krivine structure with its axiom report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePaks {
    rl: RealizabilityLattice,
    app: Vec<Vec<TermId>>,
    push: PushTable,
    save: Vec<TermId>,
    k: TermId,
    s: TermId,
    cc: TermId,
    report: AxiomReport,
}

impl FinitePaks {
    pub fn new(
        rl: RealizabilityLattice,
        app: Vec<Vec<TermId>>,
        push: PushTable,
        save: Vec<TermId>,
        k: TermId,
        s: TermId,
        cc: TermId,
    ) -> Result<Self> {
        let nt = rl.term_count();
        let ns = rl.stack_count();
        if app.len() != nt || app.iter().any(|row| row.len() != nt) {
            return Err(Error::SchemaError(format!(
                "application table must be {nt}x{nt}"
            )));
        }
        if let Some(bad) = app.iter().flatten().find(|&&t| t >= nt) {
            return Err(Error::SchemaError(format!(
                "application table references term {bad} out of range"
            )));
        }
        if save.len() != ns {
            return Err(Error::SchemaError(format!(
                "save table must have {ns} entries"
            )));
        }
        if let Some(bad) = save.iter().find(|&&t| t >= nt) {
            return Err(Error::SchemaError(format!(
                "save table references term {bad} out of range"
            )));
        }
        if k >= nt || s >= nt || cc >= nt {
            return Err(Error::SchemaError(
                "distinguished terms out of range".into(),
            ));
        }
        let mut paks = FinitePaks {
            rl,
            app,
            push,
            save,
            k,
            s,
            cc,
            report: AxiomReport {
                s1: AxiomStatus::pass(),
                s2: AxiomStatus::pass(),
                s3: AxiomStatus::pass(),
                s4: AxiomStatus::pass(),
                s5: AxiomStatus::pass(),
                strong_s1: AxiomStatus::pass(),
                s_eta: AxiomStatus::pass(),
            },
        };
        paks.report = paks.sweep_axioms();
        Ok(paks)
    }

    pub fn rl(&self) -> &RealizabilityLattice {
        &self.rl
    }

    pub fn push_table(&self) -> &PushTable {
        &self.push
    }

    pub fn app_table(&self) -> &[Vec<TermId>] {
        &self.app
    }

    pub fn save_table(&self) -> &[TermId] {
        &self.save
    }

    pub fn k(&self) -> TermId {
        self.k
    }

    pub fn s(&self) -> TermId {
        self.s
    }

    pub fn cc(&self) -> TermId {
        self.cc
    }

    pub fn app(&self, t: TermId, u: TermId) -> TermId {
        self.app[t][u]
    }

    pub fn push(&self, t: TermId, pi: StackId) -> StackId {
        self.push.get(t, pi)
    }

    pub fn save(&self, pi: StackId) -> TermId {
        self.save[pi]
    }

    /// The identity combinator `SKK` (left associated).
    pub fn combinator_i(&self) -> TermId {
        self.app(self.app(self.s, self.k), self.k)
    }

    /// The eta combinator `S(K(SKK))`.
    pub fn combinator_e(&self) -> TermId {
        self.app(self.s, self.app(self.k, self.combinator_i()))
    }

    /// The eta combinator applied to itself.
    pub fn combinator_ee(&self) -> TermId {
        let e = self.combinator_e();
        self.app(e, e)
    }

    /// The stored axiom report, computed at construction.
    pub fn report(&self) -> &AxiomReport {
        &self.report
    }

    pub fn is_valid(&self) -> bool {
        self.report.is_valid()
    }

    pub fn require_valid(&self) -> Result<()> {
        match self.report.first_failure() {
            None => Ok(()),
            Some((axiom, status)) => Err(Error::InvalidPaks {
                axiom: axiom.into(),
                witness: status.counterexample.clone().unwrap_or_default(),
            }),
        }
    }

    /// Re-run the exhaustive axiom sweep.
    pub fn check_axioms(&self) -> AxiomReport {
        self.sweep_axioms()
    }

    fn sweep_axioms(&self) -> AxiomReport {
        let nt = self.rl.term_count();
        let ns = self.rl.stack_count();
        let witness3 = |t: TermId, s: TermId, pi: StackId| {
            format!(
                "t={}, s={}, pi={}",
                self.rl.term_name(t),
                self.rl.term_name(s),
                self.rl.stack_name(pi)
            )
        };

        let mut s1 = AxiomStatus::pass();
        let mut strong_s1 = AxiomStatus::pass();
        'outer_s1: for t in 0..nt {
            for s in 0..nt {
                for pi in 0..ns {
                    let pushed = self.rl.in_pole(t, self.push(s, pi));
                    let applied = self.rl.in_pole(self.app(t, s), pi);
                    if pushed && !applied && s1.holds {
                        s1 = AxiomStatus::fail(witness3(t, s, pi));
                    }
                    if applied && !pushed && strong_s1.holds {
                        strong_s1 = AxiomStatus::fail(witness3(t, s, pi));
                    }
                    if !s1.holds && !strong_s1.holds {
                        break 'outer_s1;
                    }
                }
            }
        }

        let mut s2 = AxiomStatus::pass();
        'outer_s2: for t in 0..nt {
            for pi in 0..ns {
                if !self.rl.in_pole(t, pi) {
                    continue;
                }
                for s in 0..nt {
                    let stack = self.push(t, self.push(s, pi));
                    if !self.rl.in_pole(self.k, stack) {
                        s2 = AxiomStatus::fail(witness3(t, s, pi));
                        break 'outer_s2;
                    }
                }
            }
        }

        let mut s3 = AxiomStatus::pass();
        'outer_s3: for t in 0..nt {
            for s in 0..nt {
                for u in 0..nt {
                    let combined = self.app(self.app(t, u), self.app(s, u));
                    for pi in 0..ns {
                        if !self.rl.in_pole(combined, pi) {
                            continue;
                        }
                        let stack = self.push(t, self.push(s, self.push(u, pi)));
                        if !self.rl.in_pole(self.s, stack) {
                            s3 = AxiomStatus::fail(format!(
                                "t={}, s={}, u={}, pi={}",
                                self.rl.term_name(t),
                                self.rl.term_name(s),
                                self.rl.term_name(u),
                                self.rl.stack_name(pi)
                            ));
                            break 'outer_s3;
                        }
                    }
                }
            }
        }

        let mut s4 = AxiomStatus::pass();
        'outer_s4: for t in 0..nt {
            for pi in 0..ns {
                if !self.rl.in_pole(t, self.push(self.save(pi), pi)) {
                    continue;
                }
                if !self.rl.in_pole(self.cc, self.push(t, pi)) {
                    s4 = AxiomStatus::fail(format!(
                        "t={}, pi={}",
                        self.rl.term_name(t),
                        self.rl.stack_name(pi)
                    ));
                    break 'outer_s4;
                }
            }
        }

        let mut s5 = AxiomStatus::pass();
        'outer_s5: for t in 0..nt {
            for pi in 0..ns {
                if !self.rl.in_pole(t, pi) {
                    continue;
                }
                for pi2 in 0..ns {
                    if !self.rl.in_pole(self.save(pi), self.push(t, pi2)) {
                        s5 = AxiomStatus::fail(format!(
                            "t={}, pi={}, pi'={}",
                            self.rl.term_name(t),
                            self.rl.stack_name(pi),
                            self.rl.stack_name(pi2)
                        ));
                        break 'outer_s5;
                    }
                }
            }
        }

        let e = self.combinator_e();
        let mut s_eta = AxiomStatus::pass();
        'outer_eta: for t in 0..nt {
            for s in 0..nt {
                for pi in 0..ns {
                    if !self.rl.in_pole(self.app(t, s), pi) {
                        continue;
                    }
                    if !self.rl.in_pole(self.app(e, t), self.push(s, pi)) {
                        s_eta = AxiomStatus::fail(witness3(t, s, pi));
                        break 'outer_eta;
                    }
                }
            }
        }

        AxiomReport {
            s1,
            s2,
            s3,
            s4,
            s5,
            strong_s1,
            s_eta,
        }
    }

    /// Verdict for the eta rule: whenever `ts` is perpendicular to `pi`, the
    /// eta combinator applied to `t` is perpendicular to `s.pi`. This holds
    /// for every structure satisfying the five axioms; a failure indicates an
    /// implementation bug and is reported with the offending triple.
    pub fn check_s_eta(&self) -> &AxiomStatus {
        &self.report.s_eta
    }

    /// Elementwise application image `{app(t, u) : t ∈ l, u ∈ m}`.
    pub fn app_image(&self, l: TermSet, m: TermSet) -> TermSet {
        let mut out = TermSet::EMPTY;
        for t in l.iter() {
            for u in m.iter() {
                out.insert(self.app(t, u));
            }
        }
        out
    }

    /// Image of a single term over a term set.
    pub fn term_image(&self, t: TermId, m: TermSet) -> TermSet {
        let mut out = TermSet::EMPTY;
        for u in m.iter() {
            out.insert(self.app(t, u));
        }
        out
    }

    /// The diamond operation: perp of the application image of the two left
    /// perps. The result is closed because single perps always are.
    pub fn diamond(&self, p: ClosedStackSet, q: ClosedStackSet) -> ClosedStackSet {
        let perp_p = self.rl.perp_of_stacks(p.stacks());
        let perp_q = self.rl.perp_of_stacks(q.stacks());
        let image = self.app_image(perp_p, perp_q);
        self.rl
            .as_closed_stacks(self.rl.perp_of_terms(image))
            .expect("single perp is closed")
    }

    /// Closed-set application over this structure's push table.
    pub fn compose(&self, p: ClosedStackSet, q: ClosedStackSet) -> ClosedStackSet {
        self.rl.compose_closed(&self.push, p, q)
    }

    /// Closed-set implication over this structure's push table.
    pub fn arrow(&self, p: ClosedStackSet, q: ClosedStackSet) -> ClosedStackSet {
        self.rl.arrow_closed(&self.push, p, q)
    }

    /// Smallest quasi-proof set: the distinguished terms saturated under the
    /// application table.
    pub fn minimal_quasi_proofs(&self) -> TermSet {
        let mut qp = TermSet::EMPTY;
        qp.insert(self.k);
        qp.insert(self.s);
        qp.insert(self.cc);
        loop {
            let next = qp.union(self.app_image(qp, qp));
            if next == qp {
                return qp;
            }
            qp = next;
        }
    }
}

/// An abstract Krivine structure: a pre-abstract structure plus a quasi-proof
/// set containing the distinguished terms and closed under application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAks {
    paks: FinitePaks,
    qp: TermSet,
}

impl FiniteAks {
    pub fn new(paks: FinitePaks, qp: TermSet) -> Result<Self> {
        for t in [paks.k(), paks.s(), paks.cc()] {
            if !qp.contains(t) {
                return Err(Error::SchemaError(format!(
                    "quasi-proof set must contain {}",
                    paks.rl().term_name(t)
                )));
            }
        }
        let image = paks.app_image(qp, qp);
        if !image.is_subset(qp) {
            let escape = image.iter().find(|t| !qp.contains(*t)).unwrap();
            return Err(Error::SchemaError(format!(
                "quasi-proof set is not closed under application: {} escapes",
                paks.rl().term_name(escape)
            )));
        }
        Ok(FiniteAks { paks, qp })
    }

    /// The pre-abstract structure with the smallest possible quasi-proof set.
    pub fn with_minimal_qp(paks: FinitePaks) -> Self {
        let qp = paks.minimal_quasi_proofs();
        FiniteAks { paks, qp }
    }

    pub fn paks(&self) -> &FinitePaks {
        &self.paks
    }

    pub fn qp(&self) -> TermSet {
        self.qp
    }
}

/// Saturate a seed pole under the forward consequences of the five axioms
/// over the given tables. The result is the smallest pole containing the seed
/// for which all five axioms hold, so any seed yields a valid structure.
pub fn saturate_pole(
    term_count: usize,
    stack_count: usize,
    app: &[Vec<TermId>],
    push: &PushTable,
    save: &[TermId],
    k: TermId,
    s: TermId,
    cc: TermId,
    seed: &[(TermId, StackId)],
) -> Vec<(TermId, StackId)> {
    let mut pole = vec![StackSet::EMPTY; term_count];
    for &(t, pi) in seed {
        pole[t].insert(pi);
    }
    let mut changed = true;
    while changed {
        changed = false;
        let add = |pole: &mut Vec<StackSet>, t: TermId, pi: StackId| {
            if !pole[t].contains(pi) {
                pole[t].insert(pi);
                true
            } else {
                false
            }
        };
        for t in 0..term_count {
            for pi in 0..stack_count {
                // Application consequence of each pushed-form membership.
                for u in 0..term_count {
                    if pole[t].contains(push.get(u, pi)) {
                        changed |= add(&mut pole, app[t][u], pi);
                    }
                }
                if pole[t].contains(pi) {
                    // K and save consequences.
                    for u in 0..term_count {
                        changed |= add(&mut pole, k, push.get(t, push.get(u, pi)));
                    }
                    for pi2 in 0..stack_count {
                        changed |= add(&mut pole, save[pi], push.get(t, pi2));
                    }
                }
                // cc consequence.
                if pole[t].contains(push.get(save[pi], pi)) {
                    changed |= add(&mut pole, cc, push.get(t, pi));
                }
            }
        }
        // S consequence.
        for t in 0..term_count {
            for u in 0..term_count {
                for v in 0..term_count {
                    let combined = app[app[t][v]][app[u][v]];
                    for pi in 0..stack_count {
                        if pole[combined].contains(pi) {
                            let stack = push.get(t, push.get(u, push.get(v, pi)));
                            if !pole[s].contains(stack) {
                                pole[s].insert(stack);
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for t in 0..term_count {
        for pi in pole[t].iter() {
            out.push((t, pi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_tables(nt: usize, ns: usize) -> (Vec<Vec<TermId>>, Vec<Vec<StackId>>, Vec<TermId>) {
        // app(t, u) = (t + u) mod nt, push(t, pi) = (t + pi) mod ns, save = 0.
        let app = (0..nt)
            .map(|t| (0..nt).map(|u| (t + u) % nt).collect())
            .collect();
        let push = (0..nt)
            .map(|t| (0..ns).map(|pi| (t + pi) % ns).collect())
            .collect();
        (app, push, vec![0; ns])
    }

    fn paks_with_pole(nt: usize, ns: usize, pole: &[(TermId, StackId)]) -> FinitePaks {
        let rl = RealizabilityLattice::with_sizes(nt, ns, pole).unwrap();
        let (app, push_rows, save) = square_tables(nt, ns);
        let push = PushTable::new(push_rows, nt, ns).unwrap();
        FinitePaks::new(rl, app, push, save, 0, 1 % nt, 2 % nt).unwrap()
    }

    #[test]
    fn empty_pole_passes_vacuously() {
        let p = paks_with_pole(3, 3, &[]);
        assert!(p.is_valid());
        assert!(p.report().strong_s1.holds);
        assert!(p.check_s_eta().holds);
    }

    #[test]
    fn full_pole_passes() {
        let mut pole = Vec::new();
        for t in 0..3 {
            for s in 0..3 {
                pole.push((t, s));
            }
        }
        let p = paks_with_pole(3, 3, &pole);
        assert!(p.is_valid());
        assert!(p.check_s_eta().holds);
    }

    #[test]
    fn one_term_instance_collapses_combinators() {
        let p = paks_with_pole(1, 1, &[]);
        assert_eq!(p.combinator_i(), 0);
        assert_eq!(p.combinator_e(), 0);
    }

    #[test]
    fn invalid_pole_is_reported_with_witness() {
        // A single seeded process whose consequences are missing.
        let p = paks_with_pole(3, 3, &[(0, 1)]);
        assert!(!p.is_valid());
        let (_, status) = p.report().first_failure().unwrap();
        assert!(status.counterexample.is_some());
        assert!(p.require_valid().is_err());
    }

    #[test]
    fn saturation_yields_valid_structure() {
        let nt = 3;
        let ns = 4;
        let (app, push_rows, save) = square_tables(nt, ns);
        let push = PushTable::new(push_rows.clone(), nt, ns).unwrap();
        let pole = saturate_pole(nt, ns, &app, &push, &save, 0, 1, 2, &[(0, 1)]);
        let rl = RealizabilityLattice::with_sizes(nt, ns, &pole).unwrap();
        let p = FinitePaks::new(rl, app, push, save, 0, 1, 2).unwrap();
        assert!(p.is_valid(), "report: {:?}", p.report());
        assert!(p.check_s_eta().holds);
    }

    #[test]
    fn minimal_quasi_proofs_form_an_aks() {
        let p = paks_with_pole(3, 3, &[]);
        let aks = FiniteAks::with_minimal_qp(p.clone());
        assert!(aks.qp().contains(p.k()));
        assert!(aks.qp().contains(p.s()));
        assert!(aks.qp().contains(p.cc()));
        // EE stays inside the quasi-proofs.
        assert!(aks.qp().contains(p.combinator_ee()));
        assert!(FiniteAks::new(p, aks.qp()).is_ok());
    }

    #[test]
    fn qp_must_contain_distinguished_terms() {
        let p = paks_with_pole(3, 3, &[]);
        let mut qp = TermSet::EMPTY;
        qp.insert(p.k());
        assert!(FiniteAks::new(p, qp).is_err());
    }

    #[test]
    fn diamond_on_full_pole_is_full() {
        let mut pole = Vec::new();
        for t in 0..2 {
            for s in 0..2 {
                pole.push((t, s));
            }
        }
        let p = paks_with_pole(2, 2, &pole);
        let full = p.rl().as_closed_stacks(p.rl().full_stacks()).unwrap();
        assert_eq!(p.diamond(full, full), full);
    }
}
