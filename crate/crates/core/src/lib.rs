//! Smash products of indecomposable stable A_n^2-complexes.
//!
//! The crate models spheres, Moore spaces and the four Chang families,
//! decides how smash products of them split into wedges, and checks every
//! answer against integral homology and the mod-2 Steenrod module.

pub mod error;
pub mod expr;
pub mod homtables;
pub mod invariants;
pub mod matrix;
pub mod model;
pub mod smash;
pub mod snf;
pub mod verifier;

pub use error::{Error, Result};
pub use invariants::{GradedAbelianGroup, SqModule};
pub use model::{Elementary, Kind, SmashAtom, Summand, WedgeComplex, Window};
pub use smash::{decompose_pair, smash_decompose, DecompositionResult};
pub use verifier::{check_decomposition, VerificationReport};
