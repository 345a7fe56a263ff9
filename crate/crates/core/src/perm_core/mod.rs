//! Permutations, families of permutations, restrictions and the named
//! constructions built from them.
//!
//! Positions and images are one-based throughout.

mod family;
mod pattern;
mod permutation;

pub use family::{
    antipodal_pair, count_with_fixed_points, cross_violation, fixed_point_free_involutions, is_cross_free,
    perturbed_umvirate, restrict, umvirate, unseparated_pairs_family, PermFamily, SubFamily,
};
pub use pattern::{RestrictionPattern, SubSpace};
pub(crate) use permutation::agreements;
pub use permutation::{intersection_size, symmetric_group, LexPermutations, Permutation, MAX_ENUM_N, MAX_RANK_N};
