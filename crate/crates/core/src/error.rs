//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An enumeration or sweep would exceed its configured bound.
    #[error("capacity exceeded: {what} ({actual} > limit {limit})")]
    CapacityExceeded {
        what: String,
        limit: usize,
        actual: usize,
    },

    /// A structure was used where a valid pre-abstract Krivine structure is
    /// required, but one of its axioms fails.
    #[error("invalid structure: axiom {axiom} fails at {witness}")]
    InvalidPaks { axiom: String, witness: String },

    /// An instance document referenced a name that does not resolve, or a
    /// table has the wrong shape.
    #[error("schema error: {0}")]
    SchemaError(String),

    /// Textual input could not be parsed.
    #[error("parse error: {0}")]
    ParseError(String),

    /// A polynomial was evaluated under an environment missing a variable.
    #[error("unbound variable: {0}")]
    UnboundVariable(String),

    /// Predicate operation applied across mismatched index sets.
    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    /// An expression is not kind-correct.
    #[error("kind error: {0}")]
    KindError(String),

    /// A derivation node does not instantiate its rule schema.
    #[error("rule mismatch at node {node}: {reason}")]
    RuleMismatch { node: usize, reason: String },

    /// A quantifier introduction violates its freshness side condition.
    #[error("freshness violation at node {node}: {var} occurs free in the context")]
    FreshnessViolation { node: usize, var: String },

    /// A model does not have the shape a check requires.
    #[error("model shape error: {0}")]
    ModelShapeError(String),

    /// The algebra lacks an infimum for the requested subset.
    #[error("no infimum exists for the requested subset")]
    NotInfComplete,
}

impl Error {
    pub fn capacity(what: impl Into<String>, limit: usize, actual: usize) -> Self {
        Error::CapacityExceeded {
            what: what.into(),
            limit,
            actual,
        }
    }
}
