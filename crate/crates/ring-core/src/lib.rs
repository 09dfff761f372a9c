//! Ring configurations, robot views, guarded rules and dihedral/color symmetries.

mod color;
mod config;
mod error;
mod file;
mod rule;

pub use color::{Color, NodeContent, Palette, MAX_COLORS};
pub use config::{
    canonicalize, format_configuration, parse_configuration, transform_configuration,
    Configuration, SubConfiguration, Symmetry, Transform,
};
pub use error::{RingError, RingResult};
pub use file::{format_algorithm, format_rule, parse_algorithm, parse_rule};
pub use rule::{
    match_rules, robot_views, validate_algorithm, Action, Algorithm, Guard, Issue, MatchResult,
    Movement, Orientation, Rule, RuleMatch, View,
};
