//! Forbidden intersections for families of permutations: exact predicates,
//! degree decomposition over `S_n`, globalness and spreadness measures,
//! extremal search, closed-form bounds, and the `permint` command line.

pub mod bitset;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod numbers;
pub mod perm_core;
pub mod spectral;
pub mod spread;

pub use error::{Error, Result};
