use std::fmt;

use serde::Serialize;

use crate::color::{Color, NodeContent, Palette};
use crate::config::{Configuration, SubConfiguration};
use crate::error::{RingError, RingResult};

/// What a robot observes: its color and the contents of the previous, own and next node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct View {
    pub self_color: Color,
    pub left: NodeContent,
    pub center: NodeContent,
    pub right: NodeContent,
}

impl View {
    pub fn is_symmetric(&self) -> bool {
        self.left == self.right
    }

    pub fn mirrored(&self) -> View {
        View { left: self.right, right: self.left, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Guard {
    pub self_color: Color,
    pub m_minus: NodeContent,
    pub m_zero: NodeContent,
    pub m_plus: NodeContent,
}

impl Guard {
    pub fn is_symmetric(&self) -> bool {
        self.m_minus == self.m_plus
    }

    pub fn matches(&self, view: &View) -> bool {
        self.self_color == view.self_color
            && self.m_zero == view.center
            && self.m_minus == view.left
            && self.m_plus == view.right
    }

    pub fn mirrored(&self) -> Guard {
        Guard { m_minus: self.m_plus, m_plus: self.m_minus, ..*self }
    }

    pub fn map_colors(&self, perm: &[Color]) -> Guard {
        Guard {
            self_color: perm[self.self_color.index()],
            m_minus: self.m_minus.map_colors(perm),
            m_zero: self.m_zero.map_colors(perm),
            m_plus: self.m_plus.map_colors(perm),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Movement {
    Stay,
    /// Toward the node read as `m_minus`.
    TowardMinus,
    /// Toward the node read as `m_plus`.
    TowardPlus,
    Either,
}

impl Movement {
    pub fn mirrored(self) -> Movement {
        match self {
            Movement::TowardMinus => Movement::TowardPlus,
            Movement::TowardPlus => Movement::TowardMinus,
            m => m,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Movement::Stay => "stay",
            Movement::TowardMinus => "left",
            Movement::TowardPlus => "right",
            Movement::Either => "either",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Movement> {
        Some(match s {
            "stay" => Movement::Stay,
            "left" => Movement::TowardMinus,
            "right" => Movement::TowardPlus,
            "either" => Movement::Either,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    pub new_color: Color,
    pub movement: Movement,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub label: String,
    pub guard: Guard,
    pub action: Action,
}

impl Rule {
    pub fn map_colors(&self, perm: &[Color]) -> Rule {
        Rule {
            label: self.label.clone(),
            guard: self.guard.map_colors(perm),
            action: Action {
                new_color: perm[self.action.new_color.index()],
                movement: self.action.movement,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algorithm {
    pub name: String,
    pub palette: Palette,
    pub rules: Vec<Rule>,
    pub initial_configs: Vec<SubConfiguration>,
}

impl Algorithm {
    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    /// Applies a palette permutation to guards, actions and initial patterns.
    pub fn map_colors(&self, perm: &[Color]) -> RingResult<Algorithm> {
        self.palette.check_permutation(perm)?;
        Ok(Algorithm {
            name: self.name.clone(),
            palette: self.palette.clone(),
            rules: self.rules.iter().map(|r| r.map_colors(perm)).collect(),
            initial_configs: self.initial_configs.iter().map(|c| c.map_colors(perm)).collect(),
        })
    }
}

/// Which reading of the neighborhood matched a guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Orientation {
    /// `m_minus` read at node `i - 1`.
    Forward,
    /// `m_minus` read at node `i + 1`.
    Backward,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatch {
    pub rule: usize,
    pub orientations: Vec<Orientation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchResult {
    NotEnabled,
    Enabled(Vec<RuleMatch>),
}

impl MatchResult {
    pub fn is_enabled(&self) -> bool {
        matches!(self, MatchResult::Enabled(_))
    }

    pub fn matches(&self) -> &[RuleMatch] {
        match self {
            MatchResult::NotEnabled => &[],
            MatchResult::Enabled(m) => m,
        }
    }
}

/// Forward and backward views of a robot of `self_color` at `node`.
pub fn robot_views(config: &Configuration, node: usize, self_color: Color) -> RingResult<(View, View)> {
    let center = config.nodes().get(node).copied().unwrap_or_default();
    if !center.contains(self_color) {
        let symbol = if config.palette().contains(self_color) {
            config.palette().symbol(self_color)
        } else {
            '?'
        };
        return Err(RingError::NoSuchRobot { node, color: symbol });
    }
    let i = node as isize;
    let forward = View {
        self_color,
        left: *config.node(i - 1),
        center,
        right: *config.node(i + 1),
    };
    Ok((forward, forward.mirrored()))
}

pub fn match_rules(algorithm: &Algorithm, views: &(View, View)) -> MatchResult {
    let mut found = Vec::new();
    for (idx, rule) in algorithm.rules.iter().enumerate() {
        let mut orientations = Vec::new();
        if rule.guard.matches(&views.0) {
            orientations.push(Orientation::Forward);
        }
        if rule.guard.matches(&views.1) {
            orientations.push(Orientation::Backward);
        }
        if !orientations.is_empty() {
            found.push(RuleMatch { rule: idx, orientations });
        }
    }
    if found.is_empty() {
        MatchResult::NotEnabled
    } else {
        MatchResult::Enabled(found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Issue {
    /// A guard with equal neighborhoods prescribes a fixed direction.
    SymmetricDirectional { label: String },
    /// Two rules can fire on the same view pair with different outcomes.
    Conflict { first: String, second: String },
    ColorOutsidePalette { label: String },
    DuplicateLabel { label: String },
    SelfColorMissing { label: String },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::SymmetricDirectional { label } => {
                write!(f, "{label}: symmetric guard with a directional movement")
            }
            Issue::Conflict { first, second } => {
                write!(f, "{first} and {second}: same view, different actions")
            }
            Issue::ColorOutsidePalette { label } => write!(f, "{label}: color outside the palette"),
            Issue::DuplicateLabel { label } => write!(f, "{label}: duplicate label"),
            Issue::SelfColorMissing { label } => write!(f, "{label}: self color not on the center node"),
        }
    }
}

fn uses_only(palette: &Palette, rule: &Rule) -> bool {
    let g = &rule.guard;
    let nodes = [g.m_minus, g.m_zero, g.m_plus];
    palette.contains(g.self_color)
        && palette.contains(rule.action.new_color)
        && nodes.iter().all(|m| m.colors().all(|c| palette.contains(c)))
}

pub fn validate_algorithm(algorithm: &Algorithm) -> Vec<Issue> {
    let mut issues = Vec::new();
    for (i, rule) in algorithm.rules.iter().enumerate() {
        let label = rule.label.clone();
        if algorithm.rules[..i].iter().any(|r| r.label == rule.label) {
            issues.push(Issue::DuplicateLabel { label: label.clone() });
        }
        if !uses_only(&algorithm.palette, rule) {
            issues.push(Issue::ColorOutsidePalette { label: label.clone() });
            continue;
        }
        if !rule.guard.m_zero.contains(rule.guard.self_color) {
            issues.push(Issue::SelfColorMissing { label: label.clone() });
        }
        if rule.guard.is_symmetric()
            && matches!(rule.action.movement, Movement::TowardMinus | Movement::TowardPlus)
        {
            issues.push(Issue::SymmetricDirectional { label: label.clone() });
        }
    }
    for (i, a) in algorithm.rules.iter().enumerate() {
        for b in &algorithm.rules[i + 1..] {
            let same = a.guard == b.guard && a.action != b.action;
            let mirror_action = Action {
                new_color: b.action.new_color,
                movement: b.action.movement.mirrored(),
            };
            let mirrored = a.guard == b.guard.mirrored() && a.action != mirror_action;
            if same || mirrored {
                issues.push(Issue::Conflict { first: a.label.clone(), second: b.label.clone() });
            }
        }
    }
    issues
}
