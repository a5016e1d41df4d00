//! Exact, desk-scale computation with scale groups of regular trees and their
//! self-replicating groups on rooted trees.

mod error;
pub mod limits;
pub mod automata;
pub mod corr;
pub mod gfa;
pub mod padic;
pub mod cli;
pub mod perm;
pub mod portraits;
pub mod residue;
pub mod trees;

pub use error::{Error, Result};
