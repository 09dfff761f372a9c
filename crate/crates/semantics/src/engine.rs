use std::collections::HashSet;

use ring_core::{match_rules, Algorithm, Color, Movement, NodeContent, Orientation, View};
use serde::Serialize;
use thiserror::Error;

use crate::state::{Canonicalizer, Dir, Phase, SchedulerModel, SymMode, SystemState};

/// One robot's resolved decision: which rule fires and the absolute direction taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RobotMove {
    pub robot: usize,
    pub rule: usize,
    pub dir: Dir,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryChoice {
    /// Every enabled robot runs a full cycle.
    Fsync { moves: Vec<RobotMove> },
    /// The listed robots run a full cycle simultaneously.
    Ssync { moves: Vec<RobotMove> },
    /// Atomic Look+Compute of one robot; the color changes now, the move is stored.
    AsyncLc { mv: RobotMove },
    /// The stored move of one robot is executed.
    AsyncM { robot: usize },
}

impl AdversaryChoice {
    /// Robots whose Look-Compute-Move cycle ends with this step.
    pub fn completed(&self) -> Vec<usize> {
        match self {
            AdversaryChoice::Fsync { moves } | AdversaryChoice::Ssync { moves } => {
                moves.iter().map(|m| m.robot).collect()
            }
            AdversaryChoice::AsyncLc { mv } if mv.dir == Dir::Stay => vec![mv.robot],
            AdversaryChoice::AsyncLc { .. } => vec![],
            AdversaryChoice::AsyncM { robot } => vec![*robot],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("choice '{0}' is not available in this state")]
    NotApplicable(String),
    #[error("malformed choice '{0}'")]
    BadChoice(String),
    #[error("choice model does not match the state's scheduler model")]
    WrongModel,
}

/// Execution semantics of one algorithm.
#[derive(Debug, Clone, Copy)]
pub struct Engine<'a> {
    pub algorithm: &'a Algorithm,
    pub sym_mode: SymMode,
}

fn view_at(contents: &[NodeContent], node: usize, color: Color) -> (View, View) {
    let n = contents.len();
    let forward = View {
        self_color: color,
        left: contents[(node + n - 1) % n],
        center: contents[node],
        right: contents[(node + 1) % n],
    };
    (forward, forward.mirrored())
}

fn directions(movement: Movement, orientation: Orientation) -> &'static [Dir] {
    use Movement::*;
    use Orientation::*;
    match (movement, orientation) {
        (Stay, _) => &[Dir::Stay],
        (Either, _) => &[Dir::Minus, Dir::Plus],
        (TowardMinus, Forward) | (TowardPlus, Backward) => &[Dir::Minus],
        (TowardPlus, Forward) | (TowardMinus, Backward) => &[Dir::Plus],
    }
}

impl<'a> Engine<'a> {
    pub fn new(algorithm: &'a Algorithm) -> Self {
        Engine { algorithm, sym_mode: SymMode::Independent }
    }

    pub fn with_sym_mode(algorithm: &'a Algorithm, sym_mode: SymMode) -> Self {
        Engine { algorithm, sym_mode }
    }

    /// Distinct (rule, direction) options of an idle robot; empty when not enabled.
    pub fn options_in(&self, contents: &[NodeContent], state: &SystemState, robot: usize) -> Vec<(usize, Dir)> {
        let r = &state.robots[robot];
        if r.phase != Phase::Idle {
            return Vec::new();
        }
        let views = view_at(contents, r.node, r.color);
        let mut out: Vec<(usize, Dir)> = Vec::new();
        for m in match_rules(self.algorithm, &views).matches() {
            let movement = self.algorithm.rules[m.rule].action.movement;
            for &o in &m.orientations {
                for &d in directions(movement, o) {
                    if !out.contains(&(m.rule, d)) {
                        out.push((m.rule, d));
                    }
                }
            }
        }
        out
    }

    pub fn options(&self, state: &SystemState, robot: usize) -> Vec<(usize, Dir)> {
        self.options_in(&state.contents(), state, robot)
    }

    pub fn enabled_robots(&self, state: &SystemState) -> Vec<usize> {
        let contents = state.contents();
        (0..state.robots.len())
            .filter(|&r| !self.options_in(&contents, state, r).is_empty())
            .collect()
    }

    /// Robots with something to do: enabled idle robots and robots with a pending move.
    pub fn active_robots(&self, state: &SystemState) -> Vec<usize> {
        let contents = state.contents();
        (0..state.robots.len())
            .filter(|&r| {
                state.robots[r].phase != Phase::Idle || !self.options_in(&contents, state, r).is_empty()
            })
            .collect()
    }

    pub fn is_quiescent(&self, state: &SystemState) -> bool {
        !state.has_pending() && self.enabled_robots(state).is_empty()
    }

    /// Every adversary choice, without deduplication of equivalent outcomes.
    pub fn choices(&self, state: &SystemState) -> Vec<AdversaryChoice> {
        let contents = state.contents();
        let options: Vec<Vec<(usize, Dir)>> = (0..state.robots.len())
            .map(|r| self.options_in(&contents, state, r))
            .collect();
        let enabled: Vec<usize> = (0..state.robots.len()).filter(|&r| !options[r].is_empty()).collect();
        let mut out = Vec::new();
        match state.model {
            SchedulerModel::Fsync => {
                if !enabled.is_empty() {
                    for moves in self.resolutions(state, &enabled, &options) {
                        out.push(AdversaryChoice::Fsync { moves });
                    }
                }
            }
            SchedulerModel::Ssync => {
                let e = enabled.len();
                for mask in 1u32..(1u32 << e) {
                    let subset: Vec<usize> =
                        (0..e).filter(|i| mask & (1 << i) != 0).map(|i| enabled[i]).collect();
                    for moves in self.resolutions(state, &subset, &options) {
                        out.push(AdversaryChoice::Ssync { moves });
                    }
                }
            }
            SchedulerModel::Async => {
                for &r in &enabled {
                    for &(rule, dir) in &options[r] {
                        out.push(AdversaryChoice::AsyncLc { mv: RobotMove { robot: r, rule, dir } });
                    }
                }
                for (r, robot) in state.robots.iter().enumerate() {
                    if matches!(robot.phase, Phase::Pending(_)) {
                        out.push(AdversaryChoice::AsyncM { robot: r });
                    }
                }
            }
        }
        out
    }

    /// All joint picks for `robots`; in locked mode same-color robots sharing a node pick alike.
    fn resolutions(
        &self,
        state: &SystemState,
        robots: &[usize],
        options: &[Vec<(usize, Dir)>],
    ) -> Vec<Vec<RobotMove>> {
        let leader: Vec<usize> = robots
            .iter()
            .map(|&r| match self.sym_mode {
                SymMode::Independent => r,
                SymMode::Locked => {
                    let me = &state.robots[r];
                    *robots
                        .iter()
                        .find(|&&o| state.robots[o].node == me.node && state.robots[o].color == me.color)
                        .unwrap()
                }
            })
            .collect();
        let mut acc: Vec<Vec<RobotMove>> = vec![Vec::new()];
        for (i, &r) in robots.iter().enumerate() {
            let mut next = Vec::new();
            for partial in acc {
                if leader[i] != r {
                    let lead_pick = partial.iter().find(|m| m.robot == leader[i]).unwrap();
                    let mut p = partial.clone();
                    p.push(RobotMove { robot: r, rule: lead_pick.rule, dir: lead_pick.dir });
                    next.push(p);
                    continue;
                }
                for &(rule, dir) in &options[r] {
                    let mut p = partial.clone();
                    p.push(RobotMove { robot: r, rule, dir });
                    next.push(p);
                }
            }
            acc = next;
        }
        acc
    }

    /// Applies a choice known to be available; no validation.
    pub fn apply_unchecked(&self, state: &SystemState, choice: &AdversaryChoice) -> SystemState {
        let n = state.n as isize;
        let mut next = state.clone();
        let step = |node: usize, dir: Dir| (node as isize + dir.offset()).rem_euclid(n) as usize;
        match choice {
            AdversaryChoice::Fsync { moves } | AdversaryChoice::Ssync { moves } => {
                for m in moves {
                    let r = &mut next.robots[m.robot];
                    r.color = self.algorithm.rules[m.rule].action.new_color;
                    r.node = step(state.robots[m.robot].node, m.dir);
                }
            }
            AdversaryChoice::AsyncLc { mv } => {
                let r = &mut next.robots[mv.robot];
                r.color = self.algorithm.rules[mv.rule].action.new_color;
                r.phase = if mv.dir == Dir::Stay { Phase::Idle } else { Phase::Pending(mv.dir) };
            }
            AdversaryChoice::AsyncM { robot } => {
                let r = &mut next.robots[*robot];
                if let Phase::Pending(d) = r.phase {
                    r.node = step(r.node, d);
                }
                r.phase = Phase::Idle;
            }
        }
        next
    }

    pub fn apply_choice(&self, state: &SystemState, choice: &AdversaryChoice) -> Result<SystemState, SemanticsError> {
        let model_ok = matches!(
            (state.model, choice),
            (SchedulerModel::Fsync, AdversaryChoice::Fsync { .. })
                | (SchedulerModel::Ssync, AdversaryChoice::Ssync { .. })
                | (SchedulerModel::Async, AdversaryChoice::AsyncLc { .. })
                | (SchedulerModel::Async, AdversaryChoice::AsyncM { .. })
        );
        if !model_ok {
            return Err(SemanticsError::WrongModel);
        }
        let mut normalized = choice.clone();
        if let AdversaryChoice::Fsync { moves } | AdversaryChoice::Ssync { moves } = &mut normalized {
            moves.sort_by_key(|m| m.robot);
        }
        if !self.choices(state).contains(&normalized) {
            return Err(SemanticsError::NotApplicable(crate::choice::format_choice(choice, self.algorithm)));
        }
        Ok(self.apply_unchecked(state, &normalized))
    }

    /// Choices paired with their outcomes, keeping one choice per outcome class
    /// (robot ids erased, rotations and reflections identified).
    pub fn successors(&self, state: &SystemState) -> Vec<(AdversaryChoice, SystemState)> {
        let canon = Canonicalizer::new(state.n);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for choice in self.choices(state) {
            let next = self.apply_unchecked(state, &choice);
            if seen.insert(canon.key(&next, None, false).0) {
                out.push((choice, next));
            }
        }
        out
    }
}

pub fn enabled_robots(state: &SystemState, algorithm: &Algorithm) -> Vec<usize> {
    Engine::new(algorithm).enabled_robots(state)
}

pub fn successors(state: &SystemState, algorithm: &Algorithm) -> Vec<(AdversaryChoice, SystemState)> {
    Engine::new(algorithm).successors(state)
}

pub fn apply_choice(
    state: &SystemState,
    choice: &AdversaryChoice,
    algorithm: &Algorithm,
) -> Result<SystemState, SemanticsError> {
    Engine::new(algorithm).apply_choice(state, choice)
}

pub fn is_quiescent(state: &SystemState, algorithm: &Algorithm) -> bool {
    Engine::new(algorithm).is_quiescent(state)
}
