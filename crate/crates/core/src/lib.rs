//! Certificates that two subgroups of a negatively curved group generate
//! their amalgamated free product.
//!
//! Every constant is computed exactly on a finite ball of the Cayley graph
//! (a *window*) and every certificate is cross-checked by brute-force
//! enumeration of alternating products against an exact word oracle.

pub mod cayley;
pub mod error;
pub mod pingpong;
pub mod presentation;
pub mod rational;
pub mod residual;
pub mod subgroup;
pub mod words;

pub use error::{Error, Result};
pub use presentation::{OracleKind, Presentation, WordOracle};
pub use words::{Alphabet, Letter, Word};
