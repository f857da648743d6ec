//! Realizability lattices and the orthogonality operators.
//!
//! A lattice is a triple of a finite term carrier, a finite stack carrier and
//! a pole (a set of term/stack pairs, the "processes"). Subsets of either
//! carrier are single-word bitsets; the two perpendicularity maps form a
//! Galois connection whose stable points are the closed sets computed here.

use crate::error::Error;
use crate::Result;

/// Index of a term in a [`RealizabilityLattice`].
pub type TermId = usize;
/// Index of a stack in a [`RealizabilityLattice`].
pub type StackId = usize;

/// Hard cap on carrier sizes so membership sets fit in a `u64`.
pub const MAX_CARRIER: usize = 64;

/// A set of terms, as a bitset over the term carrier of a fixed lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermSet(pub u64);

/// A set of stacks, as a bitset over the stack carrier of a fixed lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StackSet(pub u64);

macro_rules! impl_bitset {
    ($name:ident, $id:ty) => {
        impl $name {
            pub const EMPTY: $name = $name(0);

            pub fn singleton(i: $id) -> Self {
                $name(1u64 << i)
            }

            pub fn contains(self, i: $id) -> bool {
                self.0 >> i & 1 == 1
            }

            pub fn insert(&mut self, i: $id) {
                self.0 |= 1u64 << i;
            }

            pub fn union(self, other: Self) -> Self {
                $name(self.0 | other.0)
            }

            pub fn inter(self, other: Self) -> Self {
                $name(self.0 & other.0)
            }

            pub fn is_subset(self, other: Self) -> bool {
                self.0 & !other.0 == 0
            }

            pub fn is_empty(self) -> bool {
                self.0 == 0
            }

            pub fn len(self) -> usize {
                self.0.count_ones() as usize
            }

            /// Iterate members in increasing index order.
            pub fn iter(self) -> impl Iterator<Item = $id> {
                let mut bits = self.0;
                std::iter::from_fn(move || {
                    if bits == 0 {
                        None
                    } else {
                        let i = bits.trailing_zeros() as $id;
                        bits &= bits - 1;
                        Some(i)
                    }
                })
            }
        }
    };
}

impl_bitset!(TermSet, TermId);
impl_bitset!(StackSet, StackId);

/// An element of the closed-set lattice over stacks: applying the two
/// perpendicularity maps in sequence returns the set unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedStackSet(StackSet);

impl ClosedStackSet {
    pub fn stacks(self) -> StackSet {
        self.0
    }
}

/// Dual of [`ClosedStackSet`] on the term side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedTermSet(TermSet);

impl ClosedTermSet {
    pub fn terms(self) -> TermSet {
        self.0
    }
}

/// A total map term × stack → stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushTable(Vec<Vec<StackId>>);

impl PushTable {
    /// `rows[t][pi]` is the stack obtained by pushing term `t` onto stack `pi`.
    pub fn new(rows: Vec<Vec<StackId>>, term_count: usize, stack_count: usize) -> Result<Self> {
        if rows.len() != term_count {
            return Err(Error::SchemaError(format!(
                "push table has {} rows, expected {}",
                rows.len(),
                term_count
            )));
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() != stack_count {
                return Err(Error::SchemaError(format!(
                    "push table row {t} has {} entries, expected {stack_count}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&s| s >= stack_count) {
                return Err(Error::SchemaError(format!(
                    "push table row {t} references stack {bad} out of range"
                )));
            }
        }
        Ok(PushTable(rows))
    }

    pub fn get(&self, t: TermId, pi: StackId) -> StackId {
        self.0[t][pi]
    }

    pub fn rows(&self) -> &[Vec<StackId>] {
        &self.0
    }
}

/// Bounds for closed-set enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    /// Below or at this stack-carrier size all `2^|stacks|` subsets are closed
    /// directly; above it closed sets are generated from singleton closures.
    pub full_enum_max_stacks: usize,
    /// Refuse to produce more closed sets than this.
    pub max_closed_sets: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            full_enum_max_stacks: 16,
            max_closed_sets: 1 << 16,
        }
    }
}

/// Finite term set, finite stack set, and a pole of processes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizabilityLattice {
    term_names: Vec<String>,
    stack_names: Vec<String>,
    /// Row per term: the set of stacks this term is perpendicular to.
    pole_rows: Vec<StackSet>,
}

impl RealizabilityLattice {
    /// Build a lattice from carrier names and pole pairs. Carriers must be
    /// non-empty and at most [`MAX_CARRIER`] wide.
    pub fn new(
        term_names: Vec<String>,
        stack_names: Vec<String>,
        pole: &[(TermId, StackId)],
    ) -> Result<Self> {
        if term_names.is_empty() || stack_names.is_empty() {
            return Err(Error::SchemaError(
                "term and stack carriers must be non-empty".into(),
            ));
        }
        if term_names.len() > MAX_CARRIER {
            return Err(Error::capacity("terms", MAX_CARRIER, term_names.len()));
        }
        if stack_names.len() > MAX_CARRIER {
            return Err(Error::capacity("stacks", MAX_CARRIER, stack_names.len()));
        }
        let mut pole_rows = vec![StackSet::EMPTY; term_names.len()];
        for &(t, s) in pole {
            if t >= term_names.len() || s >= stack_names.len() {
                return Err(Error::SchemaError(format!(
                    "pole pair ({t}, {s}) out of range"
                )));
            }
            pole_rows[t].insert(s);
        }
        Ok(RealizabilityLattice {
            term_names,
            stack_names,
            pole_rows,
        })
    }

    /// Convenience constructor with synthesized names `T0..`, `P0..`.
    pub fn with_sizes(terms: usize, stacks: usize, pole: &[(TermId, StackId)]) -> Result<Self> {
        let term_names = (0..terms).map(|i| format!("T{i}")).collect();
        let stack_names = (0..stacks).map(|i| format!("P{i}")).collect();
        Self::new(term_names, stack_names, pole)
    }

    pub fn term_count(&self) -> usize {
        self.term_names.len()
    }

    pub fn stack_count(&self) -> usize {
        self.stack_names.len()
    }

    pub fn term_name(&self, t: TermId) -> &str {
        &self.term_names[t]
    }

    pub fn stack_name(&self, s: StackId) -> &str {
        &self.stack_names[s]
    }

    pub fn term_names(&self) -> &[String] {
        &self.term_names
    }

    pub fn stack_names(&self) -> &[String] {
        &self.stack_names
    }

    pub fn term_id(&self, name: &str) -> Option<TermId> {
        self.term_names.iter().position(|n| n == name)
    }

    pub fn stack_id(&self, name: &str) -> Option<StackId> {
        self.stack_names.iter().position(|n| n == name)
    }

    /// Is the process `t ⋆ s` in the pole?
    pub fn in_pole(&self, t: TermId, s: StackId) -> bool {
        self.pole_rows[t].contains(s)
    }

    pub fn pole_pairs(&self) -> Vec<(TermId, StackId)> {
        let mut out = Vec::new();
        for t in 0..self.term_count() {
            for s in self.pole_rows[t].iter() {
                out.push((t, s));
            }
        }
        out
    }

    pub fn full_terms(&self) -> TermSet {
        TermSet(mask(self.term_count()))
    }

    pub fn full_stacks(&self) -> StackSet {
        StackSet(mask(self.stack_count()))
    }

    /// The set of stacks every member of `terms` is perpendicular to.
    /// Antitone in its argument; the empty set maps to the full stack carrier.
    pub fn perp_of_terms(&self, terms: TermSet) -> StackSet {
        let mut acc = self.full_stacks();
        for t in terms.iter() {
            acc = acc.inter(self.pole_rows[t]);
        }
        acc
    }

    /// The set of terms perpendicular to every member of `stacks`.
    pub fn perp_of_stacks(&self, stacks: StackSet) -> TermSet {
        let mut acc = TermSet::EMPTY;
        for t in 0..self.term_count() {
            if stacks.is_subset(self.pole_rows[t]) {
                acc.insert(t);
            }
        }
        acc
    }

    /// Smallest closed stack set containing `stacks`.
    pub fn close_stacks(&self, stacks: StackSet) -> ClosedStackSet {
        ClosedStackSet(self.perp_of_terms(self.perp_of_stacks(stacks)))
    }

    /// Smallest closed term set containing `terms`.
    pub fn close_terms(&self, terms: TermSet) -> ClosedTermSet {
        ClosedTermSet(self.perp_of_stacks(self.perp_of_terms(terms)))
    }

    pub fn is_closed_stacks(&self, stacks: StackSet) -> bool {
        self.close_stacks(stacks).stacks() == stacks
    }

    /// Check membership in the closed-set lattice and wrap on success.
    pub fn as_closed_stacks(&self, stacks: StackSet) -> Option<ClosedStackSet> {
        if self.is_closed_stacks(stacks) {
            Some(ClosedStackSet(stacks))
        } else {
            None
        }
    }

    /// All closed stack sets, deduplicated, sorted by raw bitset value.
    ///
    /// At or below `config.full_enum_max_stacks` stacks this closes every
    /// subset of the stack carrier; above it, closed sets are generated by
    /// saturating the singleton closures under join (close of union). The two
    /// strategies agree wherever both apply.
    pub fn enumerate_closed_stack_sets(&self, config: &EnumConfig) -> Result<Vec<ClosedStackSet>> {
        let n = self.stack_count();
        let sets = if n <= config.full_enum_max_stacks {
            let mut seen = std::collections::HashSet::new();
            for bits in 0..(1u128 << n) {
                let closed = self.close_stacks(StackSet(bits as u64));
                seen.insert(closed.stacks().0);
                if seen.len() > config.max_closed_sets {
                    return Err(Error::capacity(
                        "closed stack sets",
                        config.max_closed_sets,
                        seen.len(),
                    ));
                }
            }
            seen
        } else {
            self.closed_sets_by_generators(config)?
        };
        let mut out: Vec<u64> = sets.into_iter().collect();
        out.sort_unstable();
        Ok(out.into_iter().map(|b| ClosedStackSet(StackSet(b))).collect())
    }

    /// Generator strategy: closures of the empty set and all singletons,
    /// saturated under binary join.
    fn closed_sets_by_generators(
        &self,
        config: &EnumConfig,
    ) -> Result<std::collections::HashSet<u64>> {
        let mut generators: Vec<u64> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let bottom = self.close_stacks(StackSet::EMPTY).stacks().0;
        seen.insert(bottom);
        generators.push(bottom);
        for s in 0..self.stack_count() {
            let g = self.close_stacks(StackSet::singleton(s)).stacks().0;
            if seen.insert(g) {
                generators.push(g);
            }
        }
        let mut frontier: Vec<u64> = seen.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &g in &generators {
                let joined = self.close_stacks(StackSet(x | g)).stacks().0;
                if seen.insert(joined) {
                    if seen.len() > config.max_closed_sets {
                        return Err(Error::capacity(
                            "closed stack sets",
                            config.max_closed_sets,
                            seen.len(),
                        ));
                    }
                    frontier.push(joined);
                }
            }
        }
        Ok(seen)
    }

    /// Right conductor of `terms` into `stacks`: the stacks `pi` such that
    /// pushing every member of `terms` onto `pi` stays inside `stacks`.
    pub fn conductor_right(&self, push: &PushTable, terms: TermSet, stacks: StackSet) -> StackSet {
        let mut acc = StackSet::EMPTY;
        for pi in 0..self.stack_count() {
            if terms.iter().all(|t| stacks.contains(push.get(t, pi))) {
                acc.insert(pi);
            }
        }
        acc
    }

    /// Elementwise push image `{push(t, pi) : t ∈ terms, pi ∈ stacks}`.
    pub fn push_image(&self, push: &PushTable, terms: TermSet, stacks: StackSet) -> StackSet {
        let mut acc = StackSet::EMPTY;
        for t in terms.iter() {
            for pi in stacks.iter() {
                acc.insert(push.get(t, pi));
            }
        }
        acc
    }

    /// Closed-set application: close the conductor of the left perp of `q`
    /// into `p`.
    pub fn compose_closed(
        &self,
        push: &PushTable,
        p: ClosedStackSet,
        q: ClosedStackSet,
    ) -> ClosedStackSet {
        let perp_q = self.perp_of_stacks(q.stacks());
        let conductor = self.conductor_right(push, perp_q, p.stacks());
        self.close_stacks(conductor)
    }

    /// Closed-set implication: close the push image of the left perp of `p`
    /// onto `q`.
    pub fn arrow_closed(
        &self,
        push: &PushTable,
        p: ClosedStackSet,
        q: ClosedStackSet,
    ) -> ClosedStackSet {
        let perp_p = self.perp_of_stacks(p.stacks());
        self.close_stacks(self.push_image(push, perp_p, q.stacks()))
    }

    /// Render a stack set with carrier names, in index order.
    pub fn format_stack_set(&self, s: StackSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.stack_name(i)).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Render a term set with carrier names, in index order.
    pub fn format_term_set(&self, s: TermSet) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.term_name(i)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
