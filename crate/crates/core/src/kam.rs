//! The syntactic Krivine abstract machine.
//!
//! Terms are built from variables, the instruction constants, saved stacks
//! and application; stacks bottom out at named constants. Reduction is the
//! usual deterministic small-step relation, and poles are given by bounded
//! reachability into a finite set of final processes, which makes them closed
//! under anti-reduction by construction.

use std::rc::Rc;

use crate::error::Error;
use crate::Result;

/// A machine term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SynTerm {
    Var(String),
    K,
    S,
    Cc,
    /// A saved stack `k_π`.
    Saved(Rc<SynStack>),
    App(Rc<SynTerm>, Rc<SynTerm>),
}

/// A machine stack.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SynStack {
    /// A stack constant.
    Const(String),
    /// A term pushed onto a stack.
    Push(Rc<SynTerm>, Rc<SynStack>),
}

/// A term paired with a stack.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Process {
    pub term: SynTerm,
    pub stack: SynStack,
}

impl Process {
    pub fn new(term: SynTerm, stack: SynStack) -> Self {
        Process { term, stack }
    }
}

impl SynTerm {
    pub fn app(f: SynTerm, a: SynTerm) -> SynTerm {
        SynTerm::App(Rc::new(f), Rc::new(a))
    }

    pub fn var(name: impl Into<String>) -> SynTerm {
        SynTerm::Var(name.into())
    }

    /// Number of leaves (variables, constants, saved stacks).
    pub fn size(&self) -> usize {
        match self {
            SynTerm::App(f, a) => f.size() + a.size(),
            _ => 1,
        }
    }

    /// True when the term is built from K, S, cc and application only.
    pub fn is_quasi_proof(&self) -> bool {
        match self {
            SynTerm::K | SynTerm::S | SynTerm::Cc => true,
            SynTerm::App(f, a) => f.is_quasi_proof() && a.is_quasi_proof(),
            SynTerm::Var(_) | SynTerm::Saved(_) => false,
        }
    }
}

impl SynStack {
    pub fn constant(name: impl Into<String>) -> SynStack {
        SynStack::Const(name.into())
    }

    pub fn push(term: SynTerm, stack: SynStack) -> SynStack {
        SynStack::Push(Rc::new(term), Rc::new(stack))
    }
}

/// The identity combinator `SKK`.
pub fn i_term() -> SynTerm {
    SynTerm::app(SynTerm::app(SynTerm::S, SynTerm::K), SynTerm::K)
}

/// The eta combinator `S(K(SKK))`.
pub fn e_eta_term() -> SynTerm {
    SynTerm::app(SynTerm::S, SynTerm::app(SynTerm::K, i_term()))
}

/// Machine rules, named by their dispatch shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Application head: unfold onto the stack.
    Grab,
    /// K with two pushed cells.
    DropSecond,
    /// S with three pushed cells.
    Distribute,
    /// cc with one pushed cell: save the current stack.
    SaveStack,
    /// Saved stack with one pushed cell: restore.
    Restore,
}

/// Rules whose left-hand shape matches the process. The shapes are pairwise
/// disjoint, so this has at most one element; [`step`] asserts that in debug
/// builds.
pub fn applicable_rules(p: &Process) -> Vec<Rule> {
    let mut out = Vec::new();
    if matches!(p.term, SynTerm::App(_, _)) {
        out.push(Rule::Grab);
    }
    if matches!(p.term, SynTerm::K)
        && matches!(&p.stack, SynStack::Push(_, rest) if matches!(**rest, SynStack::Push(_, _)))
    {
        out.push(Rule::DropSecond);
    }
    if matches!(p.term, SynTerm::S)
        && matches!(&p.stack, SynStack::Push(_, r1)
            if matches!(&**r1, SynStack::Push(_, r2) if matches!(**r2, SynStack::Push(_, _))))
    {
        out.push(Rule::Distribute);
    }
    if matches!(p.term, SynTerm::Cc) && matches!(p.stack, SynStack::Push(_, _)) {
        out.push(Rule::SaveStack);
    }
    if matches!(p.term, SynTerm::Saved(_)) && matches!(p.stack, SynStack::Push(_, _)) {
        out.push(Rule::Restore);
    }
    out
}

/// Outcome of one machine step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Rule, Process),
    Stuck,
}

/// Apply the unique applicable rule, if any.
pub fn step(p: &Process) -> StepResult {
    debug_assert!(applicable_rules(p).len() <= 1);
    match (&p.term, &p.stack) {
        (SynTerm::K, SynStack::Push(t, rest)) => {
            if let SynStack::Push(_, pi) = &**rest {
                return StepResult::Stepped(
                    Rule::DropSecond,
                    Process::new((**t).clone(), (**pi).clone()),
                );
            }
            StepResult::Stuck
        }
        (SynTerm::S, SynStack::Push(t, r1)) => {
            if let SynStack::Push(s, r2) = &**r1 {
                if let SynStack::Push(u, pi) = &**r2 {
                    let tu = SynTerm::App(t.clone(), u.clone());
                    let su = SynTerm::App(s.clone(), u.clone());
                    return StepResult::Stepped(
                        Rule::Distribute,
                        Process::new(SynTerm::app(tu, su), (**pi).clone()),
                    );
                }
            }
            StepResult::Stuck
        }
        (SynTerm::Cc, SynStack::Push(t, pi)) => StepResult::Stepped(
            Rule::SaveStack,
            Process::new(
                (**t).clone(),
                SynStack::Push(Rc::new(SynTerm::Saved(pi.clone())), pi.clone()),
            ),
        ),
        (SynTerm::Saved(pi), SynStack::Push(t, _)) => StepResult::Stepped(
            Rule::Restore,
            Process::new((**t).clone(), (**pi).clone()),
        ),
        (SynTerm::App(f, a), _) => StepResult::Stepped(
            Rule::Grab,
            Process::new(
                (**f).clone(),
                SynStack::Push(a.clone(), Rc::new(p.stack.clone())),
            ),
        ),
        _ => StepResult::Stuck,
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// No rule applies to the last process.
    Stuck,
    /// The step budget ran out.
    BudgetExhausted,
    /// The caller-supplied final predicate matched.
    Hit,
}

/// A reduction trace together with its terminal status. The trace always
/// starts with the initial process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub trace: Vec<Process>,
    pub status: RunStatus,
}

/// Iterate [`step`] up to `max_steps` times. The final predicate, when given,
/// is tested on every process of the trace including the initial one.
pub fn run(
    start: Process,
    max_steps: usize,
    is_final: Option<&dyn Fn(&Process) -> bool>,
) -> RunOutcome {
    let mut trace = vec![start];
    loop {
        let last = trace.last().expect("trace is never empty");
        if let Some(f) = is_final {
            if f(last) {
                return RunOutcome {
                    trace,
                    status: RunStatus::Hit,
                };
            }
        }
        if trace.len() - 1 >= max_steps {
            return RunOutcome {
                trace,
                status: RunStatus::BudgetExhausted,
            };
        }
        match step(last) {
            StepResult::Stepped(_, next) => trace.push(next),
            StepResult::Stuck => {
                return RunOutcome {
                    trace,
                    status: RunStatus::Stuck,
                }
            }
        }
    }
}

/// A pole described by bounded reachability into a finite set of final
/// processes. Membership of `p` means some prefix of the reduction of `p`
/// lands in the final set, so the membership region is closed under
/// anti-reduction by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedPole {
    pub final_set: Vec<Process>,
    pub max_steps: usize,
}

/// Three-valued bounded pole membership. Budget exhaustion is reported as
/// [`PoleMembership::Unknown`], never coerced to `No`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleMembership {
    Yes,
    No,
    Unknown,
}

impl BoundedPole {
    pub fn member(&self, p: &Process) -> PoleMembership {
        let is_final = |q: &Process| self.final_set.contains(q);
        let outcome = run(p.clone(), self.max_steps, Some(&is_final));
        match outcome.status {
            RunStatus::Hit => PoleMembership::Yes,
            RunStatus::Stuck => PoleMembership::No,
            RunStatus::BudgetExhausted => PoleMembership::Unknown,
        }
    }
}

/// Enumerate all quasi-proof terms with exactly `size` leaves.
fn quasi_proofs_of_size(memo: &mut Vec<Vec<Rc<SynTerm>>>, size: usize) -> Vec<Rc<SynTerm>> {
    while memo.len() <= size {
        let n = memo.len();
        let layer = if n == 0 {
            Vec::new()
        } else if n == 1 {
            vec![
                Rc::new(SynTerm::K),
                Rc::new(SynTerm::S),
                Rc::new(SynTerm::Cc),
            ]
        } else {
            let mut layer = Vec::new();
            for left in 1..n {
                let rights = memo[n - left].clone();
                let lefts = memo[left].clone();
                for f in &lefts {
                    for a in &rights {
                        layer.push(Rc::new(SynTerm::App(f.clone(), a.clone())));
                    }
                }
            }
            layer
        };
        memo.push(layer);
    }
    memo[size].clone()
}

/// Bounds for [`counterexample_check`].
#[derive(Debug, Clone, Copy)]
pub struct CounterexampleConfig {
    pub max_steps: usize,
    pub max_candidates: usize,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            max_steps: 1000,
            max_candidates: 1 << 20,
        }
    }
}

/// Result of the two-constant counterexample sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub candidates: usize,
    /// Quasi-proofs that land in the pole against both stack constants.
    pub hits: Vec<SynTerm>,
    /// Candidates whose membership was undecided within the step budget.
    pub unknowns: usize,
}

/// Sweep all quasi-proof terms up to `max_size` leaves against the pole whose
/// final set is `{S ⋆ alpha, K ⋆ beta}` for two distinct stack constants, and
/// report every term that is a pole member against both constants.
pub fn counterexample_check(
    max_size: usize,
    config: &CounterexampleConfig,
) -> Result<CounterexampleReport> {
    let alpha = SynStack::constant("a");
    let beta = SynStack::constant("b");
    let pole = BoundedPole {
        final_set: vec![
            Process::new(SynTerm::S, alpha.clone()),
            Process::new(SynTerm::K, beta.clone()),
        ],
        max_steps: config.max_steps,
    };
    let mut memo: Vec<Vec<Rc<SynTerm>>> = Vec::new();
    let mut candidates = 0usize;
    let mut hits = Vec::new();
    let mut unknowns = 0usize;
    for size in 1..=max_size {
        for q in quasi_proofs_of_size(&mut memo, size) {
            candidates += 1;
            if candidates > config.max_candidates {
                return Err(Error::capacity(
                    "quasi-proof candidates",
                    config.max_candidates,
                    candidates,
                ));
            }
            let on_alpha = pole.member(&Process::new((*q).clone(), alpha.clone()));
            if on_alpha == PoleMembership::Unknown {
                unknowns += 1;
                continue;
            }
            if on_alpha != PoleMembership::Yes {
                continue;
            }
            match pole.member(&Process::new((*q).clone(), beta.clone())) {
                PoleMembership::Yes => hits.push((*q).clone()),
                PoleMembership::Unknown => unknowns += 1,
                PoleMembership::No => {}
            }
        }
    }
    Ok(CounterexampleReport {
        candidates,
        hits,
        unknowns,
    })
}
