use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use ring_core::{Algorithm, Palette};
use ring_semantics::{
    full_mask, trace_records, trace_text, AdversaryChoice, Canonicalizer, Engine, SchedulerModel, SemanticsError,
    SystemState, Trace, TraceRecord,
};
use serde::Serialize;
use thiserror::Error;

use crate::error::VerifyError;
use crate::graph::{Edge, ExploreOptions, Explorer, ReachableGraph, Tracking};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Perpetual,
    Terminating,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Perpetual => "perpetual",
            Objective::Terminating => "terminating",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "perpetual" => Ok(Objective::Perpetual),
            "terminating" => Ok(Objective::Terminating),
            _ => Err(format!("unknown objective '{s}' (expected perpetual or terminating)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
}

/// Evidence for a failed check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// A finite prefix followed by a loop the adversary may repeat forever; the loop starts
    /// and ends at the stem's last state, up to rotation and reflection.
    Lasso { stem: Trace, cycle: Vec<(AdversaryChoice, SystemState)> },
    /// An execution ending in a state where nothing more happens.
    Terminal { trace: Trace, uncovered: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("step {step}: {source}")]
    Step { step: usize, source: SemanticsError },
    #[error("step {step} does not reproduce the recorded state")]
    Mismatch { step: usize },
    #[error("loop is empty or does not return to its entry state")]
    OpenLoop,
    #[error("terminal state still has enabled or moving robots")]
    NotQuiescent,
}

fn replay_steps(
    engine: &Engine<'_>,
    from: &SystemState,
    steps: &[(AdversaryChoice, SystemState)],
    offset: usize,
) -> Result<SystemState, WitnessError> {
    let mut cur = from.clone();
    for (i, (choice, expected)) in steps.iter().enumerate() {
        let next = engine
            .apply_choice(&cur, choice)
            .map_err(|source| WitnessError::Step { step: offset + i + 1, source })?;
        if &next != expected {
            return Err(WitnessError::Mismatch { step: offset + i + 1 });
        }
        cur = next;
    }
    Ok(cur)
}

impl Witness {
    /// Re-applies every recorded choice and checks the recorded states and the witness shape.
    pub fn replay(&self, engine: &Engine<'_>) -> Result<(), WitnessError> {
        match self {
            Witness::Lasso { stem, cycle } => {
                let entry = replay_steps(engine, &stem.initial, &stem.steps, 0)?;
                let end = replay_steps(engine, &entry, cycle, stem.len())?;
                let canon = Canonicalizer::new(entry.n);
                if cycle.is_empty() || canon.key(&entry, None, false).0 != canon.key(&end, None, false).0 {
                    return Err(WitnessError::OpenLoop);
                }
                Ok(())
            }
            Witness::Terminal { trace, .. } => {
                let last = replay_steps(engine, &trace.initial, &trace.steps, 0)?;
                if !engine.is_quiescent(&last) {
                    return Err(WitnessError::NotQuiescent);
                }
                Ok(())
            }
        }
    }

    pub fn initial(&self) -> &SystemState {
        match self {
            Witness::Lasso { stem, .. } => &stem.initial,
            Witness::Terminal { trace, .. } => &trace.initial,
        }
    }

    pub fn render(&self, engine: &Engine<'_>, palette: &Palette) -> String {
        match self {
            Witness::Lasso { stem, cycle } => {
                let mut out = String::from("stem:\n");
                out.push_str(&trace_text(stem, engine, palette));
                out.push_str("cycle (repeats forever):\n");
                let loop_trace = Trace { initial: stem.last().clone(), steps: cycle.clone() };
                let text = trace_text(&loop_trace, engine, palette);
                out.push_str(&text.replacen("init ⊢", "entry ⊢", 1));
                out
            }
            Witness::Terminal { trace, uncovered } => {
                let mut out = String::from("trace:\n");
                out.push_str(&trace_text(trace, engine, palette));
                out.push_str(&format!("stuck; uncovered nodes: {uncovered:?}\n"));
                out
            }
        }
    }

    pub fn report(&self, engine: &Engine<'_>, palette: &Palette) -> WitnessReport {
        match self {
            Witness::Lasso { stem, cycle } => {
                let loop_trace = Trace { initial: stem.last().clone(), steps: cycle.clone() };
                WitnessReport {
                    kind: "lasso",
                    stem: trace_records(stem, engine, palette),
                    cycle: trace_records(&loop_trace, engine, palette),
                    uncovered: Vec::new(),
                }
            }
            Witness::Terminal { trace, uncovered } => WitnessReport {
                kind: "terminal",
                stem: trace_records(trace, engine, palette),
                cycle: Vec::new(),
                uncovered: uncovered.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub kind: &'static str,
    pub stem: Vec<TraceRecord>,
    pub cycle: Vec<TraceRecord>,
    pub uncovered: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    /// Graph nodes: symmetry classes of (state, visited set).
    pub states: usize,
    pub edges: usize,
    pub transitions: usize,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

type Step = (usize, usize);

/// Shortest path from `from` to a node satisfying `goal`, using only nodes in `allowed` and
/// edges accepted by `usable`. With `nonempty`, at least one edge is taken.
fn shortest_path(
    graph: &ReachableGraph,
    from: usize,
    goal: impl Fn(usize) -> bool,
    allowed: &HashSet<usize>,
    usable: impl Fn(&Edge) -> bool,
    nonempty: bool,
) -> Option<Vec<Step>> {
    if !nonempty && goal(from) {
        return Some(Vec::new());
    }
    let mut prev: HashMap<usize, Step> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = HashSet::from([from]);
    while let Some(u) = queue.pop_front() {
        for (i, e) in graph.edges[u].iter().enumerate() {
            if !usable(e) || !allowed.contains(&e.to) {
                continue;
            }
            if goal(e.to) {
                let mut path = vec![(u, i)];
                let mut cur = u;
                while cur != from {
                    let (p, j) = prev[&cur];
                    path.push((p, j));
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            if seen.insert(e.to) {
                prev.insert(e.to, (u, i));
                queue.push_back(e.to);
            }
        }
    }
    None
}

/// Strongly connected components holding at least one edge accepted by `usable`.
fn cyclic_components(graph: &ReachableGraph, usable: impl Fn(&Edge) -> bool) -> Vec<Vec<usize>> {
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(graph.len(), graph.edge_count());
    for _ in 0..graph.len() {
        g.add_node(());
    }
    for (u, es) in graph.edges.iter().enumerate() {
        for e in es.iter().filter(|e| usable(e)) {
            g.add_edge(NodeIndex::new(u), NodeIndex::new(e.to), ());
        }
    }
    let mut out: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .map(|c| {
            let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            v.sort_unstable();
            v
        })
        .filter(|c| c.len() > 1 || graph.edges[c[0]].iter().any(|e| e.to == c[0] && usable(e)))
        .collect();
    out.sort_by_key(|c| c[0]);
    out
}

pub struct Checker<'a> {
    explorer: Explorer<'a>,
    options: ExploreOptions,
}

impl<'a> Checker<'a> {
    fn new(algorithm: &'a Algorithm, n: usize, tracking: Tracking, options: ExploreOptions) -> Result<Self, VerifyError> {
        if !(3..=64).contains(&n) {
            return Err(VerifyError::RingSize(n));
        }
        Ok(Checker { explorer: Explorer::new(algorithm, n, tracking, options.sym_mode), options })
    }

    /// Concrete steps following graph edges, starting from a concrete member of the first node's class.
    fn concretize(
        &self,
        graph: &ReachableGraph,
        start: &SystemState,
        start_visited: u64,
        path: &[Step],
    ) -> (Vec<(AdversaryChoice, SystemState)>, SystemState, u64) {
        let labelled = graph.tracking == Tracking::Resetting;
        let mut cur = start.clone();
        let mut visited = start_visited;
        let mut steps = Vec::with_capacity(path.len());
        for &(u, i) in path {
            let edge = &graph.edges[u][i];
            let target = &graph.nodes[edge.to];
            let want = self.explorer.key(&target.state, target.visited);
            let found = self.explorer.engine.choices(&cur).into_iter().find_map(|choice| {
                let next = self.explorer.engine.apply_unchecked(&cur, &choice);
                let (v, reset) = self.explorer.advance(visited, &next);
                let completed = choice.completed().iter().fold(0u64, |m, &r| m | (1 << r));
                let same_edge = !labelled || (completed == edge.completed && reset == edge.reset);
                (same_edge && self.explorer.key(&next, v) == want).then_some((choice, next, v))
            });
            let (choice, next, v) = found.expect("every graph edge has a concrete counterpart");
            steps.push((choice, next.clone()));
            cur = next;
            visited = v;
        }
        (steps, cur, visited)
    }

    fn stem_to(&self, graph: &ReachableGraph, node: usize) -> (Trace, u64) {
        let root = &graph.nodes[0];
        let (steps, _, visited) = self.concretize(graph, &root.state, root.visited, &graph.path_to(node));
        (Trace { initial: root.state.clone(), steps }, visited)
    }

    fn lasso(&self, graph: &ReachableGraph, entry: usize, cycle: &[Step]) -> Witness {
        let (stem, visited) = self.stem_to(graph, entry);
        let (cycle, _, _) = self.concretize(graph, stem.last(), visited, cycle);
        Witness::Lasso { stem, cycle }
    }

    fn verdict(graph: &ReachableGraph, witness: Option<Witness>) -> Verdict {
        Verdict {
            outcome: if witness.is_some() { Outcome::Fails } else { Outcome::Holds },
            witness,
            states: graph.len(),
            edges: graph.edge_count(),
            transitions: graph.transitions,
        }
    }

    fn terminating(&self, initial: &SystemState) -> Result<Verdict, VerifyError> {
        let graph = self.explorer.build(initial, self.options.state_limit)?;
        let all = |_: &Edge| true;
        if let Some(component) = cyclic_components(&graph, all).into_iter().next() {
            let entry = component[0];
            let members: HashSet<usize> = component.into_iter().collect();
            let cycle = shortest_path(&graph, entry, |v| v == entry, &members, all, true)
                .expect("a cyclic component has a loop through each member");
            let witness = self.lasso(&graph, entry, &cycle);
            return Ok(Self::verdict(&graph, Some(witness)));
        }
        let full = full_mask(initial.n);
        if let Some(stuck) = (0..graph.len()).find(|&v| graph.nodes[v].quiescent && graph.nodes[v].visited != full) {
            let (trace, visited) = self.stem_to(&graph, stuck);
            let uncovered = (0..initial.n).filter(|i| visited & (1 << i) == 0).collect();
            return Ok(Self::verdict(&graph, Some(Witness::Terminal { trace, uncovered })));
        }
        Ok(Self::verdict(&graph, None))
    }

    /// A component is unfair when some robot has something to do in every one of its
    /// states yet finishes no cycle on any of its edges.
    fn starved_robot(&self, graph: &ReachableGraph, members: &HashSet<usize>, k: usize) -> Option<usize> {
        let engine = &self.explorer.engine;
        let mut always_active = vec![true; k];
        let mut completes = 0u64;
        for &v in members {
            let active = engine.active_robots(&graph.nodes[v].state);
            for (r, flag) in always_active.iter_mut().enumerate() {
                *flag &= active.contains(&r);
            }
            for e in &graph.edges[v] {
                if !e.reset && members.contains(&e.to) {
                    completes |= e.completed;
                }
            }
        }
        (0..k).find(|&r| always_active[r] && completes & (1 << r) == 0)
    }

    fn perpetual(&self, initial: &SystemState) -> Result<Verdict, VerifyError> {
        let graph = self.explorer.build(initial, self.options.state_limit)?;
        let k = initial.robots.len();
        let keep = |e: &Edge| !e.reset;
        for component in cyclic_components(&graph, keep) {
            let members: HashSet<usize> = component.iter().copied().collect();
            if self.starved_robot(&graph, &members, k).is_some() {
                continue;
            }
            let entry = component[0];
            if graph.nodes[entry].quiescent {
                let (trace, _) = self.stem_to(&graph, entry);
                let occ = trace.last().occupied_mask();
                let uncovered = (0..initial.n).filter(|i| occ & (1 << i) == 0).collect();
                return Ok(Self::verdict(&graph, Some(Witness::Terminal { trace, uncovered })));
            }
            let cycle = self.fair_walk(&graph, entry, &members, k);
            let witness = self.lasso(&graph, entry, &cycle);
            return Ok(Self::verdict(&graph, Some(witness)));
        }
        Ok(Self::verdict(&graph, None))
    }

    /// Closed walk from `entry` inside a fair component that lets every robot either rest
    /// or finish a cycle at least once.
    fn fair_walk(&self, graph: &ReachableGraph, entry: usize, members: &HashSet<usize>, k: usize) -> Vec<Step> {
        let engine = &self.explorer.engine;
        let keep = |e: &Edge| !e.reset;
        let mut sorted: Vec<usize> = members.iter().copied().collect();
        sorted.sort_unstable();
        let mut walk: Vec<Step> = Vec::new();
        let mut cur = entry;
        for r in 0..k {
            let resting = sorted.iter().copied().find(|&v| !engine.active_robots(&graph.nodes[v].state).contains(&r));
            if let Some(target) = resting {
                walk.extend(shortest_path(graph, cur, |v| v == target, members, keep, false).expect("strongly connected"));
                cur = target;
                continue;
            }
            let (u, i) = sorted
                .iter()
                .find_map(|&u| {
                    graph.edges[u]
                        .iter()
                        .position(|e| keep(e) && members.contains(&e.to) && e.completed & (1 << r) != 0)
                        .map(|i| (u, i))
                })
                .expect("fair component lets every busy robot finish a cycle");
            walk.extend(shortest_path(graph, cur, |v| v == u, members, keep, false).expect("strongly connected"));
            walk.push((u, i));
            cur = graph.edges[u][i].to;
        }
        let back = shortest_path(graph, cur, |v| v == entry, members, keep, walk.is_empty()).expect("strongly connected");
        walk.extend(back);
        walk
    }
}

fn with_model(initial: &SystemState, model: SchedulerModel) -> SystemState {
    SystemState { model, ..initial.clone() }
}

/// Holds when every fair execution from `initial` stops with all nodes visited.
pub fn check_terminating_exploration_with(
    initial: &SystemState,
    algorithm: &Algorithm,
    model: SchedulerModel,
    options: ExploreOptions,
) -> Result<Verdict, VerifyError> {
    Checker::new(algorithm, initial.n, Tracking::Growing, options)?.terminating(&with_model(initial, model))
}

/// Holds when every fair execution from `initial` visits every node infinitely often.
pub fn check_perpetual_exploration_with(
    initial: &SystemState,
    algorithm: &Algorithm,
    model: SchedulerModel,
    options: ExploreOptions,
) -> Result<Verdict, VerifyError> {
    Checker::new(algorithm, initial.n, Tracking::Resetting, options)?.perpetual(&with_model(initial, model))
}

pub fn check_terminating_exploration(
    initial: &SystemState,
    algorithm: &Algorithm,
    model: SchedulerModel,
) -> Result<Verdict, VerifyError> {
    check_terminating_exploration_with(initial, algorithm, model, ExploreOptions::default())
}

pub fn check_perpetual_exploration(
    initial: &SystemState,
    algorithm: &Algorithm,
    model: SchedulerModel,
) -> Result<Verdict, VerifyError> {
    check_perpetual_exploration_with(initial, algorithm, model, ExploreOptions::default())
}

pub fn check_objective(
    initial: &SystemState,
    algorithm: &Algorithm,
    model: SchedulerModel,
    objective: Objective,
    options: ExploreOptions,
) -> Result<Verdict, VerifyError> {
    match objective {
        Objective::Perpetual => check_perpetual_exploration_with(initial, algorithm, model, options),
        Objective::Terminating => check_terminating_exploration_with(initial, algorithm, model, options),
    }
}
