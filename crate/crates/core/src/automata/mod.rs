//! Finite-state self-similar groups given by wreath recursions: evaluation,
//! sections, level quotients and finite-depth self-replication checks.

mod builtins;
mod parse;
mod quotient;
mod recursion;

pub use builtins::{builtin, full_sym_level, full_sym_level_depth, grigorchuk, gupta_sidki_3, odometer, root_permutation_group, BUILTIN_NAMES, FULL_SYM_DEFAULT_DEPTH};
pub use parse::parse_automaton;
pub use quotient::{check_self_replicating, level_quotient, Counterexample, LevelQuotient, SelfReplicationReport};
pub use recursion::{GroupWord, Letter, SelfSimilarGroup, State, WreathRecursion};
