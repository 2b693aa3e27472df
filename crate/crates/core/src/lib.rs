//! Positive steady-state parametrization of chemical reaction networks with
//! mixed kinetics.
//!
//! The pipeline splits a network into its finest independent decomposition,
//! parametrizes mass-action parts through network translation and tree
//! constants, solves the remaining parts by elimination, and merges the
//! results. Every result can be checked against the original ODEs with a
//! seeded residual harness.

pub mod bundled;
pub mod crn;
pub mod decomposition;
pub mod dsl;
pub mod error;
pub mod graph;
pub mod kinetics;
pub mod linalg;
pub mod merge;
pub mod mixed;
pub mod parametrization;
pub mod pipeline;
pub mod report;
pub mod symbolic;
pub mod translation;
pub mod verify;

pub use error::{Error, Result};
