//! Population-game dynamics on action sets with nested similarity structure.
//!
//! The crate covers similarity trees ([`hierarchy`]), payoff fields and
//! equilibrium checks ([`games`]), the nested replicator dynamics and their
//! revision protocols ([`dynamics`]), nested logit choice and the score-based
//! dynamics ([`choice`]), and trajectory-level verification ([`analysis`]).

pub mod analysis;
pub mod choice;
pub mod dynamics;
pub mod error;
pub mod games;
pub mod hierarchy;

pub use error::{Error, Result};
