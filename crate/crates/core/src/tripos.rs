//! The predicate layer over a complete algebra at finite index sets:
//! entailment, equality predicates, reindexing, universal quantification
//! along maps, pullback squares, and the generic predicate.
//!
//! Index sets are canonical `0..n` ranges; a predicate is a total assignment
//! of carrier elements to indices.

use crate::error::Error;
use crate::oca::{Elem, Oca};
use crate::Result;

/// A predicate over the index set `0..values.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pred {
    pub values: Vec<Elem>,
}

impl Pred {
    pub fn new(values: Vec<Elem>) -> Self {
        Pred { values }
    }

    pub fn constant(index_len: usize, a: Elem) -> Self {
        Pred {
            values: vec![a; index_len],
        }
    }

    pub fn index_len(&self) -> usize {
        self.values.len()
    }
}

/// A total map between canonical finite index sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    pub source: usize,
    pub target: usize,
    pub map: Vec<usize>,
}

impl IndexMap {
    pub fn new(source: usize, target: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != source {
            return Err(Error::IndexMismatch(format!(
                "map has {} entries for a source of size {source}",
                map.len()
            )));
        }
        if let Some(bad) = map.iter().find(|&&i| i >= target) {
            return Err(Error::IndexMismatch(format!(
                "map entry {bad} outside target of size {target}"
            )));
        }
        Ok(IndexMap {
            source,
            target,
            map,
        })
    }

    pub fn identity(n: usize) -> Self {
        IndexMap {
            source: n,
            target: n,
            map: (0..n).collect(),
        }
    }

    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }

    /// Composition `self ∘ other` (first `other`, then `self`).
    pub fn compose(&self, other: &IndexMap) -> Result<IndexMap> {
        if other.target != self.source {
            return Err(Error::IndexMismatch(format!(
                "cannot compose: inner target {} differs from outer source {}",
                other.target, self.source
            )));
        }
        IndexMap::new(
            other.source,
            self.target,
            other.map.iter().map(|&j| self.map[j]).collect(),
        )
    }
}

/// Uniform entailment: a single filter element interpolates pointwise.
/// Returns the first witness in carrier order, `None` when no filter element
/// works.
pub fn entails_witness(o: &impl Oca, phi: &Pred, psi: &Pred) -> Result<Option<Elem>> {
    if phi.index_len() != psi.index_len() {
        return Err(Error::IndexMismatch(format!(
            "entailment across index sets of sizes {} and {}",
            phi.index_len(),
            psi.index_len()
        )));
    }
    Ok(o.elems().filter(|&f| o.in_filter(f)).find(|&f| {
        phi.values
            .iter()
            .zip(&psi.values)
            .all(|(&a, &b)| o.leq(o.app(f, a), b))
    }))
}

pub fn entails(o: &impl Oca, phi: &Pred, psi: &Pred) -> Result<bool> {
    Ok(entails_witness(o, phi, psi)?.is_some())
}

/// Pointwise algebra order.
pub fn pointwise_leq(o: &impl Oca, phi: &Pred, psi: &Pred) -> Result<bool> {
    if phi.index_len() != psi.index_len() {
        return Err(Error::IndexMismatch("pointwise order".into()));
    }
    Ok(phi
        .values
        .iter()
        .zip(&psi.values)
        .all(|(&a, &b)| o.leq(a, b)))
}

/// Pointwise filter-induced order: a possibly different filter element per
/// index.
pub fn pointwise_sq_leq(o: &impl Oca, phi: &Pred, psi: &Pred) -> Result<bool> {
    if phi.index_len() != psi.index_len() {
        return Err(Error::IndexMismatch("pointwise filter order".into()));
    }
    Ok(phi
        .values
        .iter()
        .zip(&psi.values)
        .all(|(&a, &b)| crate::poly::sq_leq(o, a, b)))
}

/// Pointwise implication predicate.
pub fn arrow_pred(o: &impl Oca, phi: &Pred, psi: &Pred) -> Result<Pred> {
    if phi.index_len() != psi.index_len() {
        return Err(Error::IndexMismatch("pointwise implication".into()));
    }
    Ok(Pred::new(
        phi.values
            .iter()
            .zip(&psi.values)
            .map(|(&a, &b)| o.arrow(a, b))
            .collect(),
    ))
}

/// Pointwise meet predicate through the pairing element.
pub fn wedge_pred(
    o: &impl Oca,
    toolkit: &crate::poly::Toolkit,
    phi: &Pred,
    psi: &Pred,
) -> Result<Pred> {
    if phi.index_len() != psi.index_len() {
        return Err(Error::IndexMismatch("pointwise meet".into()));
    }
    Ok(Pred::new(
        phi.values
            .iter()
            .zip(&psi.values)
            .map(|(&a, &b)| toolkit.wedge(o, a, b))
            .collect(),
    ))
}

/// Equality element: identity on the diagonal, bottom off it.
pub fn eq_elem(o: &impl Oca, i: usize, j: usize) -> Result<Elem> {
    if i == j {
        Ok(o.skk())
    } else {
        o.bottom().ok_or(Error::NotInfComplete)
    }
}

/// The equality predicate over `I × I`, row-major.
pub fn eq_pred(o: &impl Oca, index_len: usize) -> Result<Pred> {
    let mut values = Vec::with_capacity(index_len * index_len);
    for i in 0..index_len {
        for j in 0..index_len {
            values.push(eq_elem(o, i, j)?);
        }
    }
    Ok(Pred::new(values))
}

/// Reindexing: precompose the predicate with the map.
pub fn reindex(alpha: &IndexMap, psi: &Pred) -> Result<Pred> {
    if psi.index_len() != alpha.target {
        return Err(Error::IndexMismatch(format!(
            "predicate over {} reindexed along a map into {}",
            psi.index_len(),
            alpha.target
        )));
    }
    Ok(Pred::new(
        alpha.map.iter().map(|&i| psi.values[i]).collect(),
    ))
}

/// Universal quantification along `alpha`: at each target index, the infimum
/// over the whole source of (equality of images → the predicate). An empty
/// source yields the empty infimum, the top element.
pub fn forall_along(o: &impl Oca, alpha: &IndexMap, phi: &Pred) -> Result<Pred> {
    if phi.index_len() != alpha.source {
        return Err(Error::IndexMismatch(format!(
            "predicate over {} quantified along a map from {}",
            phi.index_len(),
            alpha.source
        )));
    }
    let mut values = Vec::with_capacity(alpha.target);
    for i in 0..alpha.target {
        let operands: Vec<Elem> = (0..alpha.source)
            .map(|j| Ok(o.arrow(eq_elem(o, alpha.apply(j), i)?, phi.values[j])))
            .collect::<Result<_>>()?;
        values.push(o.inf(&operands).ok_or(Error::NotInfComplete)?);
    }
    Ok(Pred::new(values))
}

/// A commuting square of index maps whose apex is, up to the verified
/// comparison bijection, the canonical fiber product of its two legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackSquare {
    pub rho: IndexMap,
    pub pi: IndexMap,
    pub alpha: IndexMap,
    pub beta: IndexMap,
}

impl PullbackSquare {
    /// Canonical fiber product of `alpha` and `beta`: pairs with equal
    /// images, in lexicographic order.
    pub fn canonical(alpha: IndexMap, beta: IndexMap) -> Result<Self> {
        if alpha.target != beta.target {
            return Err(Error::IndexMismatch(
                "legs of a pullback must share a target".into(),
            ));
        }
        let mut rho_map = Vec::new();
        let mut pi_map = Vec::new();
        for j in 0..alpha.source {
            for k in 0..beta.source {
                if alpha.apply(j) == beta.apply(k) {
                    rho_map.push(j);
                    pi_map.push(k);
                }
            }
        }
        let apex = rho_map.len();
        Ok(PullbackSquare {
            rho: IndexMap::new(apex, alpha.source, rho_map)?,
            pi: IndexMap::new(apex, beta.source, pi_map)?,
            alpha,
            beta,
        })
    }

    /// Accept a user-supplied apex, verifying that the square commutes and
    /// that `z ↦ (rho(z), pi(z))` is a bijection onto the canonical fiber
    /// product.
    pub fn new(rho: IndexMap, pi: IndexMap, alpha: IndexMap, beta: IndexMap) -> Result<Self> {
        if rho.source != pi.source {
            return Err(Error::IndexMismatch(
                "projections must share the apex".into(),
            ));
        }
        if rho.target != alpha.source || pi.target != beta.source || alpha.target != beta.target {
            return Err(Error::IndexMismatch("square sides do not line up".into()));
        }
        for z in 0..rho.source {
            if alpha.apply(rho.apply(z)) != beta.apply(pi.apply(z)) {
                return Err(Error::IndexMismatch(format!(
                    "square does not commute at apex index {z}"
                )));
            }
        }
        let canonical = Self::canonical(alpha.clone(), beta.clone())?;
        let mut seen = vec![false; canonical.rho.source];
        for z in 0..rho.source {
            let pair = (rho.apply(z), pi.apply(z));
            let pos = (0..canonical.rho.source)
                .find(|&w| (canonical.rho.apply(w), canonical.pi.apply(w)) == pair)
                .ok_or_else(|| {
                    Error::IndexMismatch(format!("apex index {z} is not a fiber pair"))
                })?;
            if seen[pos] {
                return Err(Error::IndexMismatch(format!(
                    "apex index {z} duplicates a fiber pair"
                )));
            }
            seen[pos] = true;
        }
        if !seen.iter().all(|&b| b) {
            return Err(Error::IndexMismatch(
                "apex misses a fiber pair; not a pullback".into(),
            ));
        }
        Ok(PullbackSquare {
            rho,
            pi,
            alpha,
            beta,
        })
    }
}

/// Outcome of the quantification/reindexing commutation check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationCheck {
    pub holds: bool,
    pub detail: Option<String>,
}

/// Both entailments between reindex-then-quantify and quantify-then-reindex
/// around a pullback square. A failure indicates an implementation bug and
/// carries the failing direction.
pub fn check_beck_chevalley(
    o: &impl Oca,
    sq: &PullbackSquare,
    phi: &Pred,
) -> Result<CommutationCheck> {
    let lhs = reindex(&sq.beta, &forall_along(o, &sq.alpha, phi)?)?;
    let rhs = forall_along(o, &sq.pi, &reindex(&sq.rho, phi)?)?;
    if entails_witness(o, &lhs, &rhs)?.is_none() {
        return Ok(CommutationCheck {
            holds: false,
            detail: Some("reindexed quantification does not entail the quantified reindexing".into()),
        });
    }
    if entails_witness(o, &rhs, &lhs)?.is_none() {
        return Ok(CommutationCheck {
            holds: false,
            detail: Some("quantified reindexing does not entail the reindexed quantification".into()),
        });
    }
    Ok(CommutationCheck {
        holds: true,
        detail: None,
    })
}

/// The generic predicate: the identity over the carrier itself. Every
/// predicate arises from it by reindexing along itself.
pub fn generic_predicate(o: &impl Oca) -> Pred {
    Pred::new(o.elems().collect())
}

/// The map along which `phi` reindexes the generic predicate, namely `phi`
/// itself read as an index map into the carrier.
pub fn classifying_map(o: &impl Oca, phi: &Pred) -> IndexMap {
    IndexMap {
        source: phi.index_len(),
        target: o.carrier_len(),
        map: phi.values.clone(),
    }
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

    #[test]
    fn entailment_is_reflexive_with_filter_witness() {
        let o = two_point_oca();
        for a in o.elems() {
            let phi = Pred::constant(2, a);
            let w = entails_witness(&o, &phi, &phi).unwrap();
            assert!(w.is_some());
            assert!(o.in_filter(w.unwrap()));
        }
    }

    #[test]
    fn entailment_rejects_mismatched_indices() {
        let o = two_point_oca();
        let phi = Pred::constant(1, 0);
        let psi = Pred::constant(2, 0);
        assert!(matches!(
            entails(&o, &phi, &psi),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn eq_pred_diagonal_and_off_diagonal() {
        let o = two_point_oca();
        let eq = eq_pred(&o, 2).unwrap();
        assert_eq!(eq.index_len(), 4);
        let ident = o.skk();
        let bottom = o.bottom().unwrap();
        assert_eq!(eq.values, vec![ident, bottom, bottom, ident]);
        // eq(i,i) a ≤ a and eq(i,j) a ≤ b for i ≠ j.
        for a in o.elems() {
            assert!(o.leq(o.app(ident, a), a));
            for b in o.elems() {
                assert!(o.leq(o.app(bottom, a), b));
            }
        }
    }

    #[test]
    fn reindex_identity_and_constant() {
        let o = two_point_oca();
        let psi = Pred::new(vec![0, 1]);
        let id = IndexMap::identity(2);
        assert_eq!(reindex(&id, &psi).unwrap(), psi);
        let const_map = IndexMap::new(3, 2, vec![1, 1, 1]).unwrap();
        assert_eq!(
            reindex(&const_map, &psi).unwrap(),
            Pred::constant(3, psi.values[1])
        );
        let _ = o;
    }

    #[test]
    fn forall_along_empty_source_is_top() {
        let o = two_point_oca();
        let alpha = IndexMap::new(0, 2, vec![]).unwrap();
        let phi = Pred::new(vec![]);
        let out = forall_along(&o, &alpha, &phi).unwrap();
        let top = o.top().unwrap();
        assert_eq!(out, Pred::constant(2, top));
    }

    #[test]
    fn canonical_pullback_of_identities_is_diagonal() {
        let alpha = IndexMap::identity(2);
        let beta = IndexMap::identity(2);
        let sq = PullbackSquare::canonical(alpha, beta).unwrap();
        assert_eq!(sq.rho.source, 2);
        assert_eq!(sq.rho.map, vec![0, 1]);
        assert_eq!(sq.pi.map, vec![0, 1]);
    }

    #[test]
    fn user_apex_must_be_a_fiber_product() {
        let alpha = IndexMap::new(1, 2, vec![0]).unwrap();
        let beta = IndexMap::new(1, 2, vec![1]).unwrap();
        // The fiber product is empty, so a one-point apex cannot commute.
        let rho = IndexMap::new(1, 1, vec![0]).unwrap();
        let pi = IndexMap::new(1, 1, vec![0]).unwrap();
        assert!(PullbackSquare::new(rho, pi, alpha.clone(), beta.clone()).is_err());
        let sq = PullbackSquare::canonical(alpha, beta).unwrap();
        assert_eq!(sq.rho.source, 0);
    }

    #[test]
    fn generic_predicate_reindexes_to_anything() {
        let o = two_point_oca();
        let generic = generic_predicate(&o);
        let phi = Pred::new(vec![1, 0, 1]);
        let alpha = classifying_map(&o, &phi);
        assert_eq!(reindex(&alpha, &generic).unwrap(), phi);
    }
}
