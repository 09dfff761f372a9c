use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use ring_core::Algorithm;
use ring_semantics::{full_mask, AdversaryChoice, Canonicalizer, Engine, SymMode, SystemState};

use crate::error::VerifyError;

pub const DEFAULT_STATE_LIMIT: usize = 10_000_000;

/// What a graph node remembers besides the robots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tracking {
    /// Robots only, ids erased.
    Plain,
    /// Visited nodes accumulate and never shrink; robot ids erased.
    Growing,
    /// Visited nodes restart from the occupied set once the ring is covered; robot ids kept.
    Resetting,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub to: usize,
    /// Robots ending a Look-Compute-Move cycle on this step (bit per robot id).
    pub completed: u64,
    /// The visited set was just restarted.
    pub reset: bool,
    /// `None` marks the idle step added at quiescent states.
    pub choice: Option<AdversaryChoice>,
}

#[derive(Debug, Clone)]
pub struct GraphNode {
    /// First concrete state reached in this class; successors are computed from it.
    pub state: SystemState,
    pub visited: u64,
    /// BFS predecessor and the index of the edge taken from it.
    pub parent: Option<(usize, usize)>,
    pub quiescent: bool,
}

/// Reachable states up to rotation and reflection, root first, in BFS order.
#[derive(Debug, Clone)]
pub struct ReachableGraph {
    pub tracking: Tracking,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<Vec<Edge>>,
    /// Transitions examined, including those landing on known states.
    pub transitions: usize,
}

impl ReachableGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Edge indices leading from the root to `node`.
    pub fn path_to(&self, node: usize) -> Vec<(usize, usize)> {
        let mut path = Vec::new();
        let mut cur = node;
        while let Some((p, e)) = self.nodes[cur].parent {
            path.push((p, e));
            cur = p;
        }
        path.reverse();
        path
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExploreOptions {
    pub state_limit: usize,
    pub sym_mode: SymMode,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { state_limit: DEFAULT_STATE_LIMIT, sym_mode: SymMode::Independent }
    }
}

pub(crate) struct Explorer<'a> {
    pub engine: Engine<'a>,
    pub canon: Canonicalizer,
    pub tracking: Tracking,
    full: u64,
}

impl<'a> Explorer<'a> {
    pub fn new(algorithm: &'a Algorithm, n: usize, tracking: Tracking, sym_mode: SymMode) -> Self {
        Explorer {
            engine: Engine::with_sym_mode(algorithm, sym_mode),
            canon: Canonicalizer::new(n),
            tracking,
            full: full_mask(n),
        }
    }

    pub fn initial_visited(&self, state: &SystemState) -> u64 {
        state.occupied_mask()
    }

    /// Visited set after moving to `next`, and whether it restarted.
    pub fn advance(&self, visited: u64, next: &SystemState) -> (u64, bool) {
        let occ = next.occupied_mask();
        match self.tracking {
            Tracking::Plain => (0, false),
            Tracking::Growing => (visited | occ, false),
            Tracking::Resetting => {
                let v = visited | occ;
                if v == self.full {
                    (occ, true)
                } else {
                    (v, false)
                }
            }
        }
    }

    pub fn key(&self, state: &SystemState, visited: u64) -> Vec<u8> {
        match self.tracking {
            Tracking::Plain => self.canon.key(state, None, false).0,
            Tracking::Growing => self.canon.key(state, Some(visited), false).0,
            Tracking::Resetting => self.canon.key(state, Some(visited), true).0,
        }
    }

    fn completed_mask(choice: &AdversaryChoice) -> u64 {
        choice.completed().iter().fold(0, |m, &r| m | (1u64 << r))
    }

    pub fn build(&self, initial: &SystemState, limit: usize) -> Result<ReachableGraph, VerifyError> {
        if limit == 0 {
            return Err(VerifyError::StateLimit { limit, frontier: 1 });
        }
        let k = initial.robots.len();
        let visited0 = if self.tracking == Tracking::Plain { 0 } else { self.initial_visited(initial) };
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        index.insert(self.key(initial, visited0), 0);
        let mut graph = ReachableGraph {
            tracking: self.tracking,
            nodes: vec![GraphNode { state: initial.clone(), visited: visited0, parent: None, quiescent: false }],
            edges: vec![Vec::new()],
            transitions: 0,
        };
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            let state = graph.nodes[u].state.clone();
            let visited = graph.nodes[u].visited;
            let choices = self.engine.choices(&state);
            let mut out: Vec<Edge> = Vec::new();
            if choices.is_empty() {
                graph.nodes[u].quiescent = true;
                if self.tracking == Tracking::Resetting {
                    let (_, reset) = self.advance(visited, &state);
                    out.push(Edge { to: u, completed: 0, reset, choice: None });
                }
            }
            for choice in choices {
                let next = self.engine.apply_unchecked(&state, &choice);
                graph.transitions += 1;
                if next.robots.len() != k {
                    return Err(VerifyError::Conservation { before: k, after: next.robots.len() });
                }
                let (v, reset) = self.advance(visited, &next);
                let key = self.key(&next, v);
                let completed = Self::completed_mask(&choice);
                let to = match index.entry(key) {
                    Entry::Occupied(e) => *e.get(),
                    Entry::Vacant(e) => {
                        let id = graph.nodes.len();
                        if id >= limit {
                            return Err(VerifyError::StateLimit { limit, frontier: queue.len() + 1 });
                        }
                        e.insert(id);
                        graph.nodes.push(GraphNode {
                            state: next,
                            visited: v,
                            parent: Some((u, out.len())),
                            quiescent: false,
                        });
                        graph.edges.push(Vec::new());
                        queue.push_back(id);
                        id
                    }
                };
                // robot ids only mean something in the labelled graph
                let labelled = self.tracking == Tracking::Resetting;
                let known = out.iter().any(|e| e.to == to && (!labelled || (e.completed == completed && e.reset == reset)));
                if !known {
                    out.push(Edge { to, completed, reset, choice: Some(choice) });
                }
            }
            graph.edges[u] = out;
        }
        Ok(graph)
    }
}

/// Breadth-first closure of `initial` under the adversary's choices, one node per
/// symmetry class of states.
pub fn build_reachable_graph(
    initial: &SystemState,
    algorithm: &Algorithm,
    bound: usize,
) -> Result<ReachableGraph, VerifyError> {
    Explorer::new(algorithm, initial.n, Tracking::Plain, SymMode::Independent).build(initial, bound)
}
