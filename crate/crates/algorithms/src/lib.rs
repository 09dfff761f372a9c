//! Built-in exploration algorithms, named configuration classes and the
//! catalog of candidate three-robot rules.

mod builtin;
mod classes;
mod rulespace;

pub use builtin::{builtin_algorithm, color_swapped, CatalogError, BUILTIN_NAMES};
pub use classes::{same_up_to_reflection, ConfigClassCatalog};
pub use rulespace::{
    cexp_transition_graph, find_progressing_rule_cycles, progressing_rule_sets, AppendixRuleCatalog,
    CycleAnalysis, TransitionEdge, TransitionGraph, DEFAULT_EXCLUSIONS, REFERENCE_RING,
};

use ring_core::{format_algorithm, Algorithm};

/// Rule-file text of every built-in algorithm, keyed by name.
pub fn export_catalog() -> Vec<(String, String)> {
    BUILTIN_NAMES
        .iter()
        .map(|name| {
            let algorithm = builtin_algorithm(name).expect("built-ins parse");
            (name.to_string(), format_algorithm(&algorithm))
        })
        .collect()
}

/// The candidate rules as a single pseudo-algorithm, for printing and validation.
pub fn candidate_rules_algorithm() -> Algorithm {
    Algorithm {
        name: "R1-R16".into(),
        palette: Default::default(),
        rules: AppendixRuleCatalog::new().rules,
        initial_configs: ConfigClassCatalog::new().c_exp,
    }
}
