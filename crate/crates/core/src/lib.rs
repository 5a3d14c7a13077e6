//! Iterated elimination of strictly dominated strategies.
//!
//! The crate models normal-form games whose strategy spaces are finite
//! lists or exactly-represented infinite sets (intervals of rationals and
//! tails of rational sequences), and runs ordinal-indexed elimination
//! chains over them under three dominator scopes: the current reduction,
//! the full strategy space, or the survivors of the step itself.
//!
//! Layers, bottom up:
//!
//! - [`rational`], [`seq`], [`set`]: exact arithmetic, monotone rational
//!   sequences, and the symbolic set algebra with decidable membership,
//!   inclusion, and boolean operations.
//! - [`pattern`]: affine templates describing the tail of an elimination
//!   chain, detection from observed stages, and exact chain limits.
//! - [`game`]: games with a finite table backend or a closed-form oracle,
//!   behind one dominance query surface.
//! - [`engine`]: elimination stages, runs with ordinal budgets, trace
//!   serialization, sequence validation, and survivor-scope interpolation.
//! - [`enumerate`], [`analyze`]: exhaustive sequence enumeration over the
//!   reachable-reduction DAG of a finite game, the structural assertions
//!   it can decide, and the boundedness analyzers quantified over it.
//!
//! Heavy quantifications fan out through [`exec`], which uses a work-
//! stealing pool under the default `parallel` feature and plain loops
//! without it; results are deterministic either way. [`caps`] holds the
//! enumeration size limits.

pub mod analyze;
pub mod caps;
pub mod catalog;
pub mod engine;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod game;
pub mod pattern;
pub mod rational;
pub mod seq;
pub mod set;

pub use error::{Error, Result};
pub use game::{Game, Reduction};
pub use rational::Q;
