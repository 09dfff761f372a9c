//! Decides perpetual and terminating exploration for a concrete algorithm, ring size and
//! initial configuration by exhaustive search over the adversary's choices, and checks
//! configurations against known unsolvability patterns.

mod audit;
mod certificate;
mod check;
mod error;
mod graph;

pub use audit::{
    enumerate_initial_configurations, init_thread_pool_from_env, universality_audit, universality_audit_with,
    AuditEntry, AuditStatus, DiscrepancyKind, UniversalityReport, THREADS_ENV,
};
pub use certificate::{classify_configuration, find_independent_territory_set, Certificate, TerritorySet};
pub use check::{
    check_objective, check_perpetual_exploration, check_perpetual_exploration_with, check_terminating_exploration,
    check_terminating_exploration_with, Objective, Outcome, Verdict, Witness, WitnessError, WitnessReport,
};
pub use error::VerifyError;
pub use graph::{build_reachable_graph, Edge, ExploreOptions, GraphNode, ReachableGraph, Tracking, DEFAULT_STATE_LIMIT};
