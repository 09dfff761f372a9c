use std::fmt;

use ring_core::{Color, Configuration, NodeContent, Palette, Symmetry};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerModel {
    Fsync,
    Ssync,
    Async,
}

impl SchedulerModel {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerModel::Fsync => "FSYNC",
            SchedulerModel::Ssync => "SSYNC",
            SchedulerModel::Async => "ASYNC",
        }
    }
}

/// How simultaneously activated same-color robots on one node resolve direction picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymMode {
    #[default]
    Independent,
    Locked,
}

/// Absolute direction on the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dir {
    Minus,
    Stay,
    Plus,
}

impl Dir {
    pub fn offset(self) -> isize {
        match self {
            Dir::Minus => -1,
            Dir::Stay => 0,
            Dir::Plus => 1,
        }
    }

    pub fn reversed(self) -> Dir {
        match self {
            Dir::Minus => Dir::Plus,
            Dir::Plus => Dir::Minus,
            Dir::Stay => Dir::Stay,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Dir::Minus => '-',
            Dir::Stay => '.',
            Dir::Plus => '+',
        }
    }

    pub fn from_symbol(c: char) -> Option<Dir> {
        Some(match c {
            '-' => Dir::Minus,
            '.' => Dir::Stay,
            '+' => Dir::Plus,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Phase {
    Idle,
    /// Look and Compute are done, the color is already updated; the move is still due.
    Pending(Dir),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RobotState {
    pub node: usize,
    pub color: Color,
    pub phase: Phase,
}

/// Robots in a fixed id order (the index); ids never change along an execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemState {
    pub n: usize,
    pub model: SchedulerModel,
    pub robots: Vec<RobotState>,
}

impl SystemState {
    /// One idle robot per color occurrence, ordered by node then color.
    pub fn from_configuration(config: &Configuration, model: SchedulerModel) -> SystemState {
        let mut robots = Vec::with_capacity(config.k());
        for (node, m) in config.nodes().iter().enumerate() {
            for color in m.colors() {
                robots.push(RobotState { node, color, phase: Phase::Idle });
            }
        }
        SystemState { n: config.n(), model, robots }
    }

    pub fn contents(&self) -> Vec<NodeContent> {
        let mut nodes = vec![NodeContent::EMPTY; self.n];
        for r in &self.robots {
            nodes[r.node].add(r.color);
        }
        nodes
    }

    pub fn configuration(&self, palette: &Palette) -> Configuration {
        Configuration::new(palette.clone(), self.contents())
            .expect("system state always projects to a valid configuration")
    }

    pub fn occupied_mask(&self) -> u64 {
        self.robots.iter().fold(0u64, |m, r| m | (1u64 << r.node))
    }

    pub fn has_pending(&self) -> bool {
        self.robots.iter().any(|r| r.phase != Phase::Idle)
    }

    pub fn apply_symmetry(&self, sym: &Symmetry) -> SystemState {
        let robots = self
            .robots
            .iter()
            .map(|r| RobotState {
                node: sym.apply(r.node, self.n),
                color: r.color,
                phase: match r.phase {
                    Phase::Pending(d) if sym.reflect => Phase::Pending(d.reversed()),
                    p => p,
                },
            })
            .collect();
        SystemState { n: self.n, model: self.model, robots }
    }

    pub fn map_colors(&self, perm: &[Color]) -> SystemState {
        let robots = self
            .robots
            .iter()
            .map(|r| RobotState { color: perm[r.color.index()], ..*r })
            .collect();
        SystemState { n: self.n, model: self.model, robots }
    }

    /// Multiset view of the robots: ids erased by sorting.
    pub fn erased(&self) -> Vec<RobotState> {
        let mut v = self.robots.clone();
        v.sort();
        v
    }

    pub fn render(&self, palette: &Palette) -> String {
        let mut out = self.configuration(palette).to_string();
        let pending: Vec<String> = self
            .robots
            .iter()
            .enumerate()
            .filter_map(|(id, r)| match r.phase {
                Phase::Pending(d) => Some(format!("r{id}{}", d.symbol())),
                Phase::Idle => None,
            })
            .collect();
        if !pending.is_empty() {
            out.push_str(" pending ");
            out.push_str(&pending.join(" "));
        }
        out
    }
}

/// Maps node bit sets through a symmetry.
pub fn map_mask(mask: u64, sym: &Symmetry, n: usize) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1u64 << sym.apply(i, n);
        m &= m - 1;
    }
    out
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Canonical byte keys of states (optionally with a visited set) under the ring's dihedral group.
#[derive(Debug, Clone)]
pub struct Canonicalizer {
    n: usize,
    syms: Vec<Symmetry>,
    tables: Vec<Vec<u8>>,
}

fn encode_phase(p: Phase, reflect: bool) -> u8 {
    match p {
        Phase::Idle => 0,
        Phase::Pending(d) => {
            let d = if reflect { d.reversed() } else { d };
            match d {
                Dir::Minus => 1,
                Dir::Stay => 2,
                Dir::Plus => 3,
            }
        }
    }
}

impl Canonicalizer {
    pub fn new(n: usize) -> Self {
        assert!(n <= 64, "ring sizes above 64 are not supported by the state encoder");
        let syms: Vec<Symmetry> = Symmetry::all(n).collect();
        let tables = syms
            .iter()
            .map(|s| (0..n).map(|i| s.apply(i, n) as u8).collect())
            .collect();
        Canonicalizer { n, syms, tables }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn encode(&self, state: &SystemState, t: usize, labelled: bool, buf: &mut Vec<u8>) {
        let table = &self.tables[t];
        let reflect = self.syms[t].reflect;
        let mut robots: Vec<[u8; 3]> = state
            .robots
            .iter()
            .map(|r| [table[r.node], r.color.0, encode_phase(r.phase, reflect)])
            .collect();
        if !labelled {
            robots.sort_unstable();
        }
        buf.clear();
        for r in robots {
            buf.extend_from_slice(&r);
        }
    }

    /// Least encoding over all symmetries, plus the symmetry reaching it.
    /// Labelled keys keep robot ids in place; erased keys sort robots first.
    pub fn key(&self, state: &SystemState, visited: Option<u64>, labelled: bool) -> (Vec<u8>, Symmetry) {
        let mut best: Option<Vec<u8>> = None;
        let mut best_t = 0;
        let mut buf = Vec::with_capacity(state.robots.len() * 3 + 8);
        for t in 0..self.syms.len() {
            self.encode(state, t, labelled, &mut buf);
            if let Some(v) = visited {
                let mapped = map_mask(v, &self.syms[t], self.n);
                buf.extend_from_slice(&mapped.to_le_bytes());
            }
            match &best {
                Some(b) if buf >= *b => {}
                _ => {
                    best = Some(buf.clone());
                    best_t = t;
                }
            }
        }
        (best.unwrap_or_default(), self.syms[best_t])
    }
}

impl fmt::Display for SchedulerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
