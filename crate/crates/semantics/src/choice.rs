//! Textual grammar for adversary choices, used by scripts and traces.
//!
//! ```text
//! fsync r0-@0GW r1-@0WG     every enabled robot, with its direction
//! ssync r1+                 the activated subset
//! lc r2.@0WW                Look+Compute of one robot ('.' = stay)
//! m r2                      pending move of one robot
//! ```
//!
//! Directions are absolute: `+` toward increasing node index, `-` toward decreasing.
//! The `@LABEL` suffix is optional when the robot has a single rule for that direction.

use ring_core::Algorithm;

use crate::engine::{AdversaryChoice, RobotMove, SemanticsError};
use crate::state::{Dir, SystemState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveSpec {
    pub robot: usize,
    pub dir: Dir,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoiceSpec {
    Fsync(Vec<MoveSpec>),
    Ssync(Vec<MoveSpec>),
    Lc(MoveSpec),
    M(usize),
}

fn format_move(m: &RobotMove, algorithm: &Algorithm) -> String {
    format!("r{}{}@{}", m.robot, m.dir.symbol(), algorithm.rules[m.rule].label)
}

pub fn format_choice(choice: &AdversaryChoice, algorithm: &Algorithm) -> String {
    let list = |moves: &[RobotMove]| {
        moves.iter().map(|m| format_move(m, algorithm)).collect::<Vec<_>>().join(" ")
    };
    match choice {
        AdversaryChoice::Fsync { moves } => format!("fsync {}", list(moves)),
        AdversaryChoice::Ssync { moves } => format!("ssync {}", list(moves)),
        AdversaryChoice::AsyncLc { mv } => format!("lc {}", format_move(mv, algorithm)),
        AdversaryChoice::AsyncM { robot } => format!("m r{robot}"),
    }
}

fn parse_robot(token: &str, whole: &str) -> Result<usize, SemanticsError> {
    let bad = || SemanticsError::BadChoice(whole.to_string());
    let digits = token.strip_prefix('r').ok_or_else(bad)?;
    digits.parse().map_err(|_| bad())
}

fn parse_move(token: &str, whole: &str) -> Result<MoveSpec, SemanticsError> {
    let bad = || SemanticsError::BadChoice(whole.to_string());
    let (head, label) = match token.split_once('@') {
        Some((h, l)) if !l.is_empty() => (h, Some(l.to_string())),
        Some(_) => return Err(bad()),
        None => (token, None),
    };
    let dir_char = head.chars().last().ok_or_else(bad)?;
    let dir = Dir::from_symbol(dir_char).ok_or_else(bad)?;
    let robot = parse_robot(&head[..head.len() - 1], whole)?;
    Ok(MoveSpec { robot, dir, label })
}

pub fn parse_choice(text: &str) -> Result<ChoiceSpec, SemanticsError> {
    let bad = || SemanticsError::BadChoice(text.to_string());
    let mut tokens = text.split_whitespace();
    let kind = tokens.next().ok_or_else(bad)?;
    let rest: Vec<&str> = tokens.collect();
    match kind {
        "fsync" | "ssync" => {
            if rest.is_empty() {
                return Err(bad());
            }
            let moves = rest.iter().map(|t| parse_move(t, text)).collect::<Result<Vec<_>, _>>()?;
            Ok(if kind == "fsync" { ChoiceSpec::Fsync(moves) } else { ChoiceSpec::Ssync(moves) })
        }
        "lc" => match rest.as_slice() {
            [t] => Ok(ChoiceSpec::Lc(parse_move(t, text)?)),
            _ => Err(bad()),
        },
        "m" => match rest.as_slice() {
            [t] => Ok(ChoiceSpec::M(parse_robot(t, text)?)),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

fn move_fits(spec: &MoveSpec, m: &RobotMove, algorithm: &Algorithm) -> bool {
    spec.robot == m.robot
        && spec.dir == m.dir
        && spec.label.as_ref().map_or(true, |l| *l == algorithm.rules[m.rule].label)
}

fn moves_fit(specs: &[MoveSpec], moves: &[RobotMove], algorithm: &Algorithm) -> bool {
    specs.len() == moves.len()
        && specs
            .iter()
            .all(|s| moves.iter().any(|m| move_fits(s, m, algorithm)))
}

/// Resolves a parsed choice against the choices available in a state.
pub fn resolve_choice(
    spec: &ChoiceSpec,
    available: &[AdversaryChoice],
    algorithm: &Algorithm,
    text: &str,
) -> Result<AdversaryChoice, SemanticsError> {
    let hits: Vec<&AdversaryChoice> = available
        .iter()
        .filter(|c| match (spec, c) {
            (ChoiceSpec::Fsync(s), AdversaryChoice::Fsync { moves }) => moves_fit(s, moves, algorithm),
            (ChoiceSpec::Ssync(s), AdversaryChoice::Ssync { moves }) => moves_fit(s, moves, algorithm),
            (ChoiceSpec::Lc(s), AdversaryChoice::AsyncLc { mv }) => move_fits(s, mv, algorithm),
            (ChoiceSpec::M(r), AdversaryChoice::AsyncM { robot }) => r == robot,
            _ => false,
        })
        .collect();
    match hits.as_slice() {
        [one] => Ok((*one).clone()),
        [] => Err(SemanticsError::NotApplicable(text.to_string())),
        _ => Err(SemanticsError::BadChoice(format!("{text} (ambiguous; add @LABEL)"))),
    }
}

/// Parses a choice and resolves it in `state`.
pub fn choice_from_text(
    text: &str,
    state: &SystemState,
    engine: &crate::engine::Engine<'_>,
) -> Result<AdversaryChoice, SemanticsError> {
    let spec = parse_choice(text)?;
    resolve_choice(&spec, &engine.choices(state), engine.algorithm, text)
}
