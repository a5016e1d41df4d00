//! The groups `G(F, A)`: finite groups by Cayley table, coordinatewise subgroup
//! profiles and their tidiness, the coset tree with its digit expansion, local
//! permutations and residue groups of profiles.

mod finite;
mod fseq;
mod profile;
mod tree;

pub use finite::{FiniteGroup, SubgroupSet};
pub use fseq::FSeqElement;
pub use profile::{
    kernel_c, make_gfa, profile_residue, profile_tidiness, CoordinateFactor, Gfa, ProfileResidue, TidinessReport,
    TidyProfile,
};
pub use tree::{build_coset_tree, CosetNode, CosetTree, GfaAction, GfaElement};
