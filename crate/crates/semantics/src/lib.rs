//! Look-Compute-Move execution under FSYNC, SSYNC and ASYNC schedulers.

pub mod choice;
mod engine;
mod state;
mod trace;

pub use choice::{choice_from_text, format_choice, parse_choice, resolve_choice, ChoiceSpec};
pub use engine::{
    apply_choice, enabled_robots, is_quiescent, successors, AdversaryChoice, Engine, RobotMove,
    SemanticsError,
};
pub use state::{
    full_mask, map_mask, Canonicalizer, Dir, Phase, RobotState, SchedulerModel, SymMode,
    SystemState,
};
pub use trace::{mask_string, simulate, trace_json, trace_records, trace_text, Policy, Trace, TraceRecord};
