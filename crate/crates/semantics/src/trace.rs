use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ring_core::Palette;
use serde::Serialize;

use crate::choice::{format_choice, parse_choice, resolve_choice};
use crate::engine::{AdversaryChoice, Engine, SemanticsError};
use crate::state::{full_mask, SystemState};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: SystemState,
    pub steps: Vec<(AdversaryChoice, SystemState)>,
}

/// How `simulate` picks among the available choices.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Choices in the textual grammar of [`crate::choice`], one per step.
    Scripted(Vec<String>),
    Random { seed: u64 },
    /// Always the first available choice.
    First,
}

impl Trace {
    pub fn new(initial: SystemState) -> Self {
        Trace { initial, steps: Vec::new() }
    }

    pub fn last(&self) -> &SystemState {
        self.steps.last().map(|(_, s)| s).unwrap_or(&self.initial)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Visited-node masks after each prefix, initial positions included.
    pub fn coverage(&self) -> Vec<u64> {
        let mut visited = self.initial.occupied_mask();
        let mut out = vec![visited];
        for (_, s) in &self.steps {
            visited |= s.occupied_mask();
            out.push(visited);
        }
        out
    }

    pub fn covers_ring(&self) -> bool {
        self.coverage().last().copied() == Some(full_mask(self.initial.n))
    }

    /// Checks that every state is the outcome of its choice applied to the previous one.
    pub fn replay(&self, engine: &Engine<'_>) -> Result<(), SemanticsError> {
        let mut cur = self.initial.clone();
        for (choice, expected) in &self.steps {
            let next = engine.apply_choice(&cur, choice)?;
            if &next != expected {
                return Err(SemanticsError::NotApplicable(format_choice(choice, engine.algorithm)));
            }
            cur = next;
        }
        Ok(())
    }
}

pub fn simulate(
    state: &SystemState,
    engine: &Engine<'_>,
    policy: &Policy,
    max_steps: usize,
) -> Result<Trace, SemanticsError> {
    let mut trace = Trace::new(state.clone());
    let mut rng = match policy {
        Policy::Random { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut cur = state.clone();
    for step in 0..max_steps {
        let available = engine.choices(&cur);
        if available.is_empty() {
            break;
        }
        let choice = match policy {
            Policy::First => available[0].clone(),
            Policy::Random { .. } => {
                let rng = rng.as_mut().expect("seeded for the random policy");
                available[rng.gen_range(0..available.len())].clone()
            }
            Policy::Scripted(lines) => {
                let Some(text) = lines.get(step) else { break };
                resolve_choice(&parse_choice(text)?, &available, engine.algorithm, text)?
            }
        };
        let next = engine.apply_unchecked(&cur, &choice);
        trace.steps.push((choice, next.clone()));
        cur = next;
    }
    Ok(trace)
}

pub fn mask_string(mask: u64, n: usize) -> String {
    (0..n).map(|i| if mask & (1 << i) != 0 { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub step: usize,
    pub choice: Option<String>,
    pub state: String,
    pub enabled: Vec<usize>,
    pub coverage: String,
}

pub fn trace_records(trace: &Trace, engine: &Engine<'_>, palette: &Palette) -> Vec<TraceRecord> {
    let coverage = trace.coverage();
    let n = trace.initial.n;
    let mut out = vec![TraceRecord {
        step: 0,
        choice: None,
        state: trace.initial.render(palette),
        enabled: engine.enabled_robots(&trace.initial),
        coverage: mask_string(coverage[0], n),
    }];
    for (i, (choice, state)) in trace.steps.iter().enumerate() {
        out.push(TraceRecord {
            step: i + 1,
            choice: Some(format_choice(choice, engine.algorithm)),
            state: state.render(palette),
            enabled: engine.enabled_robots(state),
            coverage: mask_string(coverage[i + 1], n),
        });
    }
    out
}

/// One `choice ⊢ configuration` line per step; the first line shows the initial state.
pub fn trace_text(trace: &Trace, engine: &Engine<'_>, palette: &Palette) -> String {
    let mut out = format!("init ⊢ {}\n", trace.initial.render(palette));
    for (choice, state) in &trace.steps {
        out.push_str(&format!("{} ⊢ {}\n", format_choice(choice, engine.algorithm), state.render(palette)));
    }
    out
}

pub fn trace_json(trace: &Trace, engine: &Engine<'_>, palette: &Palette) -> serde_json::Value {
    serde_json::to_value(trace_records(trace, engine, palette)).expect("records serialize")
}
