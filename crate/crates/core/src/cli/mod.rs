//! Building blocks for the `scalelab` binary: scenario files, DOT export and the bundled
//! reproduction table.

pub mod dot;
pub mod repro;
pub mod scenario;

pub use repro::{repro_all, ReproRow, SCENARIOS};
pub use dot::{export_dot, write_dot, LabelledWindowTree};
pub use scenario::{load_scenario, parse_scenario, run_scenario, GroupSource, Scenario, Task, TaskKind, TaskReport};
