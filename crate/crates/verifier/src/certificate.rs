use std::fmt;

use ring_algorithms::ConfigClassCatalog;
use ring_core::{Color, Configuration, SubConfiguration};
use ring_semantics::SchedulerModel;
use serde::Serialize;

use crate::check::Objective;

/// Pairs of adjacent nodes, each written as `[v, v+1 mod n]`, pairwise at distance ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TerritorySet {
    pub territories: Vec<[usize; 2]>,
}

impl TerritorySet {
    pub fn nodes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.territories.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

impl fmt::Display for TerritorySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.territories.iter().map(|[a, b]| format!("{{v{a},v{b}}}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn ring_distance(a: usize, b: usize, n: usize) -> usize {
    let d = (a + n - b) % n;
    d.min(n - d)
}

/// Confines robots to two-node territories when occupied nodes are pairwise non-adjacent and
/// single-colored. Tries every choice of side for every occupied node.
pub fn find_independent_territory_set(config: &Configuration) -> Option<TerritorySet> {
    let n = config.n();
    let occ = config.occupied();
    if occ.is_empty() || occ.len() > 20 {
        return None;
    }
    if occ.iter().any(|&v| config.nodes()[v].distinct() > 1) {
        return None;
    }
    for (i, &a) in occ.iter().enumerate() {
        if occ[i + 1..].iter().any(|&b| ring_distance(a, b, n) < 2) {
            return None;
        }
    }
    for mask in 0u32..(1 << occ.len()) {
        let territories: Vec<[usize; 2]> = occ
            .iter()
            .enumerate()
            .map(|(j, &v)| if mask & (1 << j) != 0 { [(v + n - 1) % n, v] } else { [v, (v + 1) % n] })
            .collect();
        let independent = territories.iter().enumerate().all(|(i, t)| {
            territories[i + 1..]
                .iter()
                .all(|u| t.iter().all(|&a| u.iter().all(|&b| ring_distance(a, b, n) >= 2)))
        });
        if independent {
            return Some(TerritorySet { territories });
        }
    }
    None
}

/// Structural reason a configuration cannot be solved by any algorithm.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "certificate", rename_all = "snake_case")]
pub enum Certificate {
    /// Robots stay inside territories that cover only part of the ring.
    Territory { territories: TerritorySet },
    /// Two robots of one color on adjacent nodes.
    PairSameColor { color: char },
    /// Two or three robots of one color share a node.
    SameColorTower { node: usize, color: char },
    /// Three robots spread over an arc of at least three edges.
    DistanceClass { longest: usize },
    /// Three robots within two edges, two of them on one node.
    TowerDistance2,
    /// Three single robots on consecutive nodes, the outer two of one color.
    #[serde(rename = "symmetric_xyx")]
    SymmetricXYX { pattern: String },
    /// Four robots forming a mirror-symmetric pattern.
    SymmetricClass { member: String },
}

impl Certificate {
    pub fn tag(&self) -> &'static str {
        match self {
            Certificate::Territory { .. } => "territory",
            Certificate::PairSameColor { .. } => "pair-same-color",
            Certificate::SameColorTower { .. } => "same-color-tower",
            Certificate::DistanceClass { .. } => "distance-class",
            Certificate::TowerDistance2 => "tower-distance-2",
            Certificate::SymmetricXYX { .. } => "symmetric-xyx",
            Certificate::SymmetricClass { .. } => "symmetric-class",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Territory { territories } => write!(f, "territory {territories}"),
            Certificate::PairSameColor { color } => write!(f, "pair-same-color {color}{color}"),
            Certificate::SameColorTower { node, color } => write!(f, "same-color-tower {color}{color} at v{node}"),
            Certificate::DistanceClass { longest } => write!(f, "distance-class longest={longest}"),
            Certificate::TowerDistance2 => f.write_str("tower-distance-2"),
            Certificate::SymmetricXYX { pattern } => write!(f, "symmetric-xyx {pattern}"),
            Certificate::SymmetricClass { member } => write!(f, "symmetric-class {member}"),
        }
    }
}

fn at_least_ssync(model: SchedulerModel) -> bool {
    model != SchedulerModel::Fsync
}

fn symbol(config: &Configuration, c: Color) -> char {
    config.palette().symbol(c)
}

fn pair_same_color(config: &Configuration) -> Option<Certificate> {
    let occ = config.occupied();
    if config.k() != 2 || occ.len() != 2 || config.distance(occ[0], occ[1]) != 1 {
        return None;
    }
    let (a, b) = (config.nodes()[occ[0]], config.nodes()[occ[1]]);
    if a != b {
        return None;
    }
    let color = a.colors().next()?;
    Some(Certificate::PairSameColor { color: symbol(config, color) })
}

fn same_color_tower(config: &Configuration) -> Option<Certificate> {
    config.nodes().iter().enumerate().find_map(|(node, m)| {
        config
            .palette()
            .colors()
            .find(|&c| m.count(c) >= 2)
            .map(|c| Certificate::SameColorTower { node, color: symbol(config, c) })
    })
}

fn symmetric_xyx(config: &Configuration) -> Option<Certificate> {
    let (_, arc) = config.occupied_arc()?;
    let nodes = arc.nodes();
    let singles = nodes.len() == 3 && nodes.iter().all(|m| m.len() == 1);
    (singles && nodes[0] == nodes[2]).then(|| Certificate::SymmetricXYX { pattern: arc.to_string() })
}

fn symmetric_class(config: &Configuration) -> Option<Certificate> {
    ConfigClassCatalog::new()
        .c_sym
        .iter()
        .find(|m: &&SubConfiguration| config.is_placement_of(m))
        .map(|m| Certificate::SymmetricClass { member: m.to_string() })
}

/// First certificate whose pattern and applicability conditions hold, tried in a fixed order.
/// Every certificate shows the robots can never visit the whole ring, so it speaks for both
/// objectives; a certificate shown for a weaker scheduler also holds for stronger adversaries.
pub fn classify_configuration(
    config: &Configuration,
    model: SchedulerModel,
    _objective: Objective,
) -> Option<Certificate> {
    let n = config.n();
    let k = config.k();
    if let Some(territories) = find_independent_territory_set(config) {
        if territories.nodes().len() < n {
            return Some(Certificate::Territory { territories });
        }
    }
    if k == 2 && n >= 6 {
        if let Some(c) = pair_same_color(config) {
            return Some(c);
        }
    }
    if (k == 2 || k == 3) && n >= 6 && at_least_ssync(model) {
        if let Some(c) = same_color_tower(config) {
            return Some(c);
        }
    }
    if k == 3 && n >= 9 && at_least_ssync(model) {
        let span = config.span();
        if span >= 3 {
            return Some(Certificate::DistanceClass { longest: span });
        }
        if span == 2 && config.nodes().iter().any(|m| m.is_tower()) {
            return Some(Certificate::TowerDistance2);
        }
        if let Some(c) = symmetric_xyx(config) {
            return Some(c);
        }
    }
    if k == 4 && at_least_ssync(model) {
        if let Some(c) = symmetric_class(config) {
            return Some(c);
        }
    }
    None
}
