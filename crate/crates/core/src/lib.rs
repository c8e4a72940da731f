//! Finite approximations of self-similar spaces generated by a similarity
//! scheme `X0 --phi--> X1 <--pi-- Y x X0`.
//!
//! The central object is the [`Tower`] of levels `X_n` built by iterated
//! quotients. On top of it sit cells, transfer states for infinite addresses,
//! the bounded relation deciders, the fixed-point functor and an audit of the
//! structural lemmas the construction rests on.

pub mod address;
pub mod audit;
pub mod cli;
pub mod fixedpoint;
pub mod io;
pub mod random;
pub mod scheme;
pub mod tower;
mod union_find;

pub use address::{Address, RelationEvidence, ShadowTree, TransferState, Verdict, Witness};
pub use audit::{lemma_audit, AuditReport, LemmaEntry};
pub use fixedpoint::{apply_functor, is_fixed_point, injectivity_report, FunctorImage, InjectivityReport, IsoWitness, Pair};
pub use scheme::{FiniteScheme, PointId, Rule, SchemeError, Symbol, ValidationReport, Word};
pub use tower::{BasicEquivalenceWitness, CellSet, Level, Tower, TowerError};
