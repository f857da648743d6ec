//! Finite classical realizability workbench.
//!
//! Everything here is desk-scale and exhaustively checkable: realizability
//! lattices with their orthogonality operators ([`rl`]), tabular pre-abstract
//! and abstract Krivine structures ([`paks`]), the syntactic Krivine machine
//! ([`kam`]), ordered combinatory algebras derived from Krivine structures
//! ([`oca`]), combinatory polynomials and bracket abstraction ([`poly`]), the
//! predicate layer over finite index sets ([`tripos`]), and a higher-order
//! language with realizability semantics ([`hol`]).
//!
//! Carriers are bounded at 64 terms/stacks so that sets are single-word
//! bitsets; all operations are pure functions over immutable values.

pub mod error;
pub mod hol;
pub mod instance;
pub mod kam;
pub mod oca;
pub mod paks;
pub mod poly;
pub mod rl;
pub mod syntax;
pub mod tripos;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
