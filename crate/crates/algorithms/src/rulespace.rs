use std::collections::BTreeSet;
use std::fmt;

use ring_core::{parse_rule, Algorithm, Palette, Rule, SubConfiguration};
use ring_semantics::{AdversaryChoice, Engine, RobotMove, SchedulerModel, SystemState};
use serde::Serialize;

use crate::classes::{same_up_to_reflection, ConfigClassCatalog};

const CANDIDATE_RULES: [&str; 16] = [
    "R1 : . | W(G) | G :: W, left",
    "R2 : . | (W) | W :: G, right",
    "R3 : . | W(G) | G :: W, right",
    "R4 : . | G(W) | W :: G, right",
    "R5 : . | G(W) | G :: W, left",
    "R6 : . | (W) | G :: W, right",
    "R7 : . | W(G) | W :: G, left",
    "R8 : . | (G) | W :: G, right",
    "R9 : . | G(W) | W :: G, left",
    "R10 : . | (G) | G :: W, right",
    "R11 : . | G(W) | G :: W, right",
    "R12 : . | W(G) | W :: G, right",
    "R13 : . | (G) | GW :: W, stay",
    "R14 : . | (W) | GW :: G, stay",
    "R15 : G | (W) | W :: G, stay",
    "R16 : G | (G) | W :: W, stay",
];

/// Rules that turn a four-robot terminating shape into a mirrored, unsolvable one.
pub const DEFAULT_EXCLUSIONS: [&str; 2] = ["R15", "R16"];

/// Ring size on which transitions and displacements are measured.
pub const REFERENCE_RING: usize = 12;
const PLACEMENT_OFFSET: usize = 4;

/// Candidate rules R1..R16 for three robots moving as a block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppendixRuleCatalog {
    pub rules: Vec<Rule>,
}

impl AppendixRuleCatalog {
    pub fn new() -> Self {
        let palette = Palette::default();
        let rules = CANDIDATE_RULES
            .iter()
            .enumerate()
            .map(|(i, t)| parse_rule(t, &palette, i + 1).expect("catalog rules are well-formed"))
            .collect();
        AppendixRuleCatalog { rules }
    }

    pub fn rule(&self, label: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.label == label)
    }

    pub fn is_excluded_by_default(label: &str) -> bool {
        DEFAULT_EXCLUSIONS.contains(&label)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.label == label)
    }
}

impl Default for AppendixRuleCatalog {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionEdge {
    pub from: usize,
    /// Successor shape class, or `None` when the rule leaves the family.
    pub to: Option<usize>,
    pub rule: String,
    /// Shift of the block's midpoint, in half nodes; positive toward increasing indices.
    pub half_displacement: i32,
    /// The successor is the mirror image of its class representative.
    pub mirrored: bool,
    pub successor: String,
}

/// Transitions between shape classes, a shape and its mirror image forming one class.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionGraph {
    /// One representative per class; edges start from the representative as written.
    pub members: Vec<SubConfiguration>,
    pub edges: Vec<TransitionEdge>,
}

impl TransitionGraph {
    pub fn internal_edges(&self) -> impl Iterator<Item = &TransitionEdge> {
        self.edges.iter().filter(|e| e.to.is_some())
    }

    pub fn exits(&self) -> impl Iterator<Item = &TransitionEdge> {
        self.edges.iter().filter(|e| e.to.is_none())
    }

    /// Class index and whether `shape` is the mirrored representative.
    pub fn class_of(&self, shape: &SubConfiguration) -> Option<(usize, bool)> {
        self.members.iter().enumerate().find_map(|(i, m)| {
            if m == shape {
                Some((i, false))
            } else if m.reversed() == *shape {
                Some((i, true))
            } else {
                None
            }
        })
    }
}

fn signed_half_shift(before: usize, after: usize) -> i32 {
    let modulus = 2 * REFERENCE_RING as i32;
    let mut d = (after as i32 - before as i32).rem_euclid(modulus);
    if d > modulus / 2 {
        d -= modulus;
    }
    d
}

fn class_representatives() -> Vec<SubConfiguration> {
    let mut reps: Vec<SubConfiguration> = Vec::new();
    for m in ConfigClassCatalog::new().c_exp {
        if !reps.iter().any(|r| same_up_to_reflection(r, &m)) {
            reps.push(m);
        }
    }
    reps
}

/// Applies every rule, one robot at a time, to each class representative placed on the reference ring.
pub fn cexp_transition_graph(rules: &[Rule]) -> TransitionGraph {
    let palette = Palette::default();
    let mut graph = TransitionGraph { members: class_representatives(), edges: Vec::new() };
    let mut edges = Vec::new();
    for (from, member) in graph.members.iter().enumerate() {
        let config = member
            .embed(REFERENCE_RING, PLACEMENT_OFFSET)
            .expect("members fit on the reference ring");
        let state = SystemState::from_configuration(&config, SchedulerModel::Ssync);
        let before = 2 * PLACEMENT_OFFSET + (member.len() - 1);
        for rule in rules {
            let single = Algorithm {
                name: rule.label.clone(),
                palette: palette.clone(),
                rules: vec![rule.clone()],
                initial_configs: vec![],
            };
            let engine = Engine::new(&single);
            for robot in 0..state.robots.len() {
                for (rule_idx, dir) in engine.options(&state, robot) {
                    let choice = AdversaryChoice::Ssync { moves: vec![RobotMove { robot, rule: rule_idx, dir }] };
                    let next = engine.apply_unchecked(&state, &choice).configuration(&palette);
                    let mut edge = TransitionEdge {
                        from,
                        to: None,
                        rule: rule.label.clone(),
                        half_displacement: 0,
                        mirrored: false,
                        successor: next.to_string(),
                    };
                    if let Some((start, arc)) = next.occupied_arc() {
                        edge.successor = arc.to_string();
                        if let Some((to, mirrored)) = graph.class_of(&arc) {
                            edge.to = Some(to);
                            edge.mirrored = mirrored;
                            edge.half_displacement = signed_half_shift(before, 2 * start + (arc.len() - 1));
                        }
                    }
                    edges.push(edge);
                }
            }
        }
    }
    graph.edges = edges;
    graph
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleAnalysis {
    pub rule_subset: Vec<String>,
    /// Shapes visited, each paired with the rule applied to leave it.
    pub transition_sequence: Vec<(String, String)>,
    /// Net shift of the block in nodes after one traversal.
    pub net_displacement: i32,
}

impl CycleAnalysis {
    pub fn is_progressing(&self) -> bool {
        self.net_displacement != 0
    }

    pub fn rule_set(&self) -> BTreeSet<String> {
        self.rule_subset.iter().cloned().collect()
    }
}

impl fmt::Display for CycleAnalysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} shift {:+}:", self.rule_subset.join(","), self.net_displacement)?;
        for (member, rule) in &self.transition_sequence {
            write!(f, " [{member}] -{rule}->")?;
        }
        if let Some((first, _)) = self.transition_sequence.first() {
            write!(f, " [{first}]")?;
        }
        Ok(())
    }
}

/// Simple cycles of the transition graph restricted to non-excluded rules, in a stable order.
pub fn find_progressing_rule_cycles(catalog: &AppendixRuleCatalog, exclusions: &[&str]) -> Vec<CycleAnalysis> {
    let rules: Vec<Rule> = catalog
        .rules
        .iter()
        .filter(|r| !exclusions.contains(&r.label.as_str()))
        .cloned()
        .collect();
    let graph = cexp_transition_graph(&rules);
    let edges: Vec<&TransitionEdge> = graph.internal_edges().collect();
    let order = |label: &str| catalog.position(label).unwrap_or(usize::MAX);

    let mut out = Vec::new();
    let count = graph.members.len();
    for start in 0..count {
        let mut path: Vec<&TransitionEdge> = Vec::new();
        let mut on_path = vec![false; count];
        on_path[start] = true;
        extend_cycles(start, start, &edges, &mut path, &mut on_path, &mut |cycle| {
            let mut subset: Vec<String> = cycle.iter().map(|e| e.rule.clone()).collect();
            subset.sort_by_key(|l| order(l));
            subset.dedup();
            out.push(CycleAnalysis {
                rule_subset: subset,
                transition_sequence: cycle
                    .iter()
                    .map(|e| (graph.members[e.from].to_string(), e.rule.clone()))
                    .collect(),
                net_displacement: net_half_displacement(cycle) / 2,
            });
        });
    }
    out
}

/// Follows the cycle from the representative of its first class. A traversal that comes back
/// mirrored is undone by the next one, so the block only oscillates.
fn net_half_displacement(cycle: &[&TransitionEdge]) -> i32 {
    let mut sign = 1;
    let mut total = 0;
    for e in cycle {
        total += sign * e.half_displacement;
        if e.mirrored {
            sign = -sign;
        }
    }
    if sign == 1 {
        total
    } else {
        0
    }
}

fn extend_cycles<'e>(
    start: usize,
    at: usize,
    edges: &[&'e TransitionEdge],
    path: &mut Vec<&'e TransitionEdge>,
    on_path: &mut [bool],
    emit: &mut dyn FnMut(&[&'e TransitionEdge]),
) {
    for e in edges.iter().filter(|e| e.from == at) {
        let to = e.to.expect("internal edge");
        if to == start {
            path.push(e);
            emit(path);
            path.pop();
        } else if to > start && !on_path[to] {
            on_path[to] = true;
            path.push(e);
            extend_cycles(start, to, edges, path, on_path, emit);
            path.pop();
            on_path[to] = false;
        }
    }
}

/// Distinct rule sets whose cycles shift the block.
pub fn progressing_rule_sets(cycles: &[CycleAnalysis]) -> BTreeSet<BTreeSet<String>> {
    cycles.iter().filter(|c| c.is_progressing()).map(|c| c.rule_set()).collect()
}
