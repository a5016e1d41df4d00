//! Finite permutations and a small permutation-group engine: closure, order, orbits,
//! blocks of imprimitivity and coset actions.

mod blocks;
mod chain;
mod cosets;
mod fingerprint;
mod group;
mod permutation;

pub use blocks::BlockSystem;
pub use cosets::{CosetAction, Subgroup};
pub use fingerprint::GroupFingerprint;
pub use group::PermGroup;
pub use permutation::{compose, parse_cycles, Permutation};
