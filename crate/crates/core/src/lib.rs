//! Reasoning about safe improvements between normal-form games from
//! qualitative outcome-correspondence assumptions.
//!
//! The library is organised bottom-up:
//!
//! * [`games`]: normal-form games, dominance, isomorphism, equilibria;
//! * [`bcs`]: binary constraint structures, path consistency, exact oracle;
//! * [`assumptions`]: correspondences generated from game-theoretic assumptions;
//! * [`closedness`]: max-/join-closedness checks and certifying orders;
//! * [`si`]: preferences and safe-improvement deciders;
//! * [`reductions`]: hardness constructions and incompleteness instances;
//! * [`io`] and [`cli`]: file formats and the `oc-reason` command line.

pub mod assumptions;
pub mod bcs;
pub mod cli;
pub mod closedness;
pub mod error;
pub mod fixtures;
pub mod games;
pub mod io;
pub mod random;
pub mod reductions;
pub mod relation;
pub mod si;

pub use error::{Error, Result};
