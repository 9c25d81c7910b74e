//! Exclusion subshifts of the `n`-fold doubling map and the `n`-branch Baker map.
//!
//! The crate computes, with exact rational arithmetic, the symbolic shift of
//! points whose orbits avoid a hole, brackets it between two subshifts of
//! finite type, and certifies when the bracket closes.

mod bitset;
pub mod analysis;
pub mod beta;
pub mod bracket;
pub mod certify;
pub mod components;
pub mod error;
pub mod even;
pub mod exec;
pub mod genericity;
pub mod hole;
pub mod rational;
pub mod region;
pub mod sft;
pub mod system;
pub mod word;

pub use error::{Error, Result};
pub use rational::Rational;
pub use sft::{sft_build, sft_equivalent, Sft, Sided};
pub use word::{lt_order, Code, Word};
