use std::fmt;

use serde::{Serialize, Serializer};

use crate::color::{Color, NodeContent, Palette};
use crate::error::{RingError, RingResult};

/// A full ring: one color multiset per node, indices taken modulo `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    palette: Palette,
    nodes: Vec<NodeContent>,
}

/// A contiguous pattern of node contents, not closed into a ring.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubConfiguration {
    palette: Palette,
    nodes: Vec<NodeContent>,
}

/// Dihedral ring symmetry: node `i` is sent to `(±i + shift) mod n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Symmetry {
    pub reflect: bool,
    pub shift: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    /// Node `i` moves to `i + s`.
    Rotate(usize),
    /// Node `i` moves to `r - i`; `r = 0` reflects about node 0.
    Reflect(usize),
    /// `perm[c]` replaces color `c` everywhere.
    ColorSwap(Vec<Color>),
    Dihedral(Symmetry),
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { reflect: false, shift: 0 };

    pub fn apply(&self, i: usize, n: usize) -> usize {
        let i = i % n;
        let base = if self.reflect { (n - i) % n } else { i };
        (base + self.shift) % n
    }

    /// Maps an absolute direction (+1 toward increasing index, -1 otherwise).
    pub fn apply_direction(&self, dir: i8) -> i8 {
        if self.reflect {
            -dir
        } else {
            dir
        }
    }

    /// `self.then(other)` applies `self` first.
    pub fn then(&self, other: &Symmetry, n: usize) -> Symmetry {
        let shift = other.apply(self.shift, n);
        Symmetry { reflect: self.reflect != other.reflect, shift }
    }

    pub fn inverse(&self, n: usize) -> Symmetry {
        if self.reflect {
            *self
        } else {
            Symmetry { reflect: false, shift: (n - self.shift % n) % n }
        }
    }

    /// All 2n elements, identity first.
    pub fn all(n: usize) -> impl Iterator<Item = Symmetry> {
        [false, true]
            .into_iter()
            .flat_map(move |reflect| (0..n).map(move |shift| Symmetry { reflect, shift }))
    }
}

fn parse_entries(text: &str, palette: &Palette) -> RingResult<Vec<NodeContent>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RingError::BadEntry(String::new()));
    }
    let mut nodes = Vec::new();
    for raw in text.split(',') {
        let entry = raw.trim();
        if entry == "." {
            nodes.push(NodeContent::EMPTY);
        } else if let Some(count) = entry.strip_prefix(".^") {
            let h: usize = count
                .trim()
                .parse()
                .map_err(|_| RingError::BadEntry(entry.to_string()))?;
            nodes.extend(std::iter::repeat(NodeContent::EMPTY).take(h));
        } else if entry.is_empty() {
            return Err(RingError::BadEntry(raw.to_string()));
        } else {
            let mut m = NodeContent::EMPTY;
            for ch in entry.chars() {
                m.add(palette.color(ch)?);
            }
            nodes.push(m);
        }
    }
    Ok(nodes)
}

fn render_entries(nodes: &[NodeContent], palette: &Palette) -> String {
    nodes
        .iter()
        .map(|m| m.render(palette))
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses the comma-separated node grammar; trailing nodes up to `n` are empty.
pub fn parse_configuration(
    text: &str,
    n: Option<usize>,
    palette: &Palette,
) -> RingResult<Configuration> {
    let mut nodes = parse_entries(text, palette)?;
    if let Some(n) = n {
        if n < nodes.len() {
            return Err(RingError::TooManyEntries { n, listed: nodes.len() });
        }
        nodes.resize(n, NodeContent::EMPTY);
    }
    Configuration::new(palette.clone(), nodes)
}

pub fn format_configuration(config: &Configuration) -> String {
    render_entries(&config.nodes, &config.palette)
}

pub fn transform_configuration(config: &Configuration, t: &Transform) -> RingResult<Configuration> {
    let n = config.n();
    let sym = match t {
        Transform::Rotate(s) => Symmetry { reflect: false, shift: s % n },
        Transform::Reflect(r) => Symmetry { reflect: true, shift: r % n },
        Transform::Dihedral(s) => *s,
        Transform::ColorSwap(perm) => {
            config.palette.check_permutation(perm)?;
            let nodes = config.nodes.iter().map(|m| m.map_colors(perm)).collect();
            return Ok(Configuration { palette: config.palette.clone(), nodes });
        }
    };
    Ok(config.apply_symmetry(&sym))
}

/// Least rotation/reflection image under node order, with the symmetry producing it.
pub fn canonicalize(config: &Configuration) -> (Configuration, Symmetry) {
    let n = config.n();
    let mut best_sym = Symmetry::IDENTITY;
    let mut best = config.nodes.clone();
    let mut buf = vec![NodeContent::EMPTY; n];
    for sym in Symmetry::all(n).skip(1) {
        for (i, m) in config.nodes.iter().enumerate() {
            buf[sym.apply(i, n)] = *m;
        }
        if buf < best {
            best.copy_from_slice(&buf);
            best_sym = sym;
        }
    }
    (Configuration { palette: config.palette.clone(), nodes: best }, best_sym)
}

impl Configuration {
    pub fn new(palette: Palette, nodes: Vec<NodeContent>) -> RingResult<Self> {
        if nodes.len() < 3 {
            return Err(RingError::RingTooSmall(nodes.len()));
        }
        for m in &nodes {
            if let Some(c) = m.colors().find(|c| !palette.contains(*c)) {
                return Err(RingError::UnknownColor(char::from(b'0' + c.0)));
            }
        }
        if nodes.iter().all(|m| m.is_empty()) {
            return Err(RingError::NoRobots);
        }
        Ok(Configuration { palette, nodes })
    }

    /// Parses with the default palette.
    pub fn parse(text: &str, n: Option<usize>) -> RingResult<Self> {
        parse_configuration(text, n, &Palette::default())
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn k(&self) -> usize {
        self.nodes.iter().map(|m| m.len()).sum()
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn nodes(&self) -> &[NodeContent] {
        &self.nodes
    }

    /// Node content with the index wrapped modulo `n`.
    pub fn node(&self, i: isize) -> &NodeContent {
        let n = self.n() as isize;
        &self.nodes[i.rem_euclid(n) as usize]
    }

    pub fn occupied(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.nodes[i].is_empty()).collect()
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        let n = self.n();
        let d = (a + n - b % n) % n;
        d.min(n - d)
    }

    /// Length of the shortest arc containing every robot.
    pub fn span(&self) -> usize {
        let occ = self.occupied();
        let n = self.n();
        let mut max_gap = 0;
        for (idx, &a) in occ.iter().enumerate() {
            let b = occ[(idx + 1) % occ.len()];
            let gap = if occ.len() == 1 { n } else { (b + n - a) % n };
            max_gap = max_gap.max(gap);
        }
        n - max_gap
    }

    pub fn apply_symmetry(&self, sym: &Symmetry) -> Configuration {
        let n = self.n();
        let mut nodes = vec![NodeContent::EMPTY; n];
        for (i, m) in self.nodes.iter().enumerate() {
            nodes[sym.apply(i, n)] = *m;
        }
        Configuration { palette: self.palette.clone(), nodes }
    }

    pub fn with_node(&self, i: usize, content: NodeContent) -> Configuration {
        let mut nodes = self.nodes.clone();
        nodes[i] = content;
        Configuration { palette: self.palette.clone(), nodes }
    }

    /// True when some window of consecutive nodes, read in either direction,
    /// equals `pattern` and every robot lies inside that window.
    pub fn is_placement_of(&self, pattern: &SubConfiguration) -> bool {
        let n = self.n();
        let len = pattern.nodes.len();
        if len > n || pattern.k() != self.k() {
            return false;
        }
        let forward = |start: usize| (0..len).all(|j| self.nodes[(start + j) % n] == pattern.nodes[j]);
        let backward =
            |start: usize| (0..len).all(|j| self.nodes[(start + len - 1 - j) % n] == pattern.nodes[j]);
        (0..n).any(|s| forward(s) || backward(s))
    }

    /// The occupied arc as a sub-configuration, when robots fit in an arc shorter than the ring.
    pub fn occupied_arc(&self) -> Option<(usize, SubConfiguration)> {
        let n = self.n();
        let span = self.span();
        if span >= n {
            return None;
        }
        let start = (0..n).find(|&s| {
            !self.nodes[s].is_empty() && (span + 1..n).all(|j| self.nodes[(s + j) % n].is_empty())
        })?;
        let nodes = (0..=span).map(|j| self.nodes[(start + j) % n]).collect();
        Some((start, SubConfiguration { palette: self.palette.clone(), nodes }))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_configuration(self))
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({self})")
    }
}

impl Serialize for Configuration {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_configuration(self))
    }
}

impl PartialOrd for Configuration {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by ring size, then node by node.
impl Ord for Configuration {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n().cmp(&other.n()).then_with(|| self.nodes.cmp(&other.nodes))
    }
}

impl SubConfiguration {
    pub fn parse(text: &str, palette: &Palette) -> RingResult<Self> {
        let nodes = parse_entries(text, palette)?;
        Ok(SubConfiguration { palette: palette.clone(), nodes })
    }

    pub fn from_nodes(palette: Palette, nodes: Vec<NodeContent>) -> Self {
        SubConfiguration { palette, nodes }
    }

    pub fn nodes(&self) -> &[NodeContent] {
        &self.nodes
    }

    pub fn palette(&self) -> &Palette {
        &self.palette
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn k(&self) -> usize {
        self.nodes.iter().map(|m| m.len()).sum()
    }

    pub fn reversed(&self) -> SubConfiguration {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        SubConfiguration { palette: self.palette.clone(), nodes }
    }

    pub fn map_colors(&self, perm: &[Color]) -> SubConfiguration {
        let nodes = self.nodes.iter().map(|m| m.map_colors(perm)).collect();
        SubConfiguration { palette: self.palette.clone(), nodes }
    }

    /// Places the pattern at node `offset` of an otherwise empty `n`-ring.
    pub fn embed(&self, n: usize, offset: usize) -> RingResult<Configuration> {
        if n < self.nodes.len() {
            return Err(RingError::TooManyEntries { n, listed: self.nodes.len() });
        }
        let mut nodes = vec![NodeContent::EMPTY; n];
        for (j, m) in self.nodes.iter().enumerate() {
            nodes[(offset + j) % n] = *m;
        }
        Configuration::new(self.palette.clone(), nodes)
    }
}

impl fmt::Display for SubConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_entries(&self.nodes, &self.palette))
    }
}

impl fmt::Debug for SubConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubConfiguration({self})")
    }
}

impl Serialize for SubConfiguration {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str, n: usize) -> Configuration {
        Configuration::parse(text, Some(n)).unwrap()
    }

    #[test]
    fn parse_pads_and_counts() {
        let c = cfg("G,W", 6);
        assert_eq!(c.n(), 6);
        assert_eq!(c.k(), 2);
        assert_eq!(c.to_string(), "G,W,.,.,.,.");
        let c = cfg("GW,.,W", 5);
        assert_eq!(c.nodes()[0].len(), 2);
        assert_eq!(c.k(), 3);
        assert_eq!(c.to_string(), "GW,.,W,.,.");
        let c = cfg(".^4,G", 5);
        assert_eq!(c.occupied(), vec![4]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(Configuration::parse("G,X", Some(5)), Err(RingError::UnknownColor('X')));
        assert!(matches!(
            Configuration::parse("G,W,G,W", Some(3)),
            Err(RingError::TooManyEntries { n: 3, listed: 4 })
        ));
        assert_eq!(Configuration::parse("G,W", None), Err(RingError::RingTooSmall(2)));
        assert_eq!(Configuration::parse("G", Some(2)), Err(RingError::RingTooSmall(2)));
    }

    #[test]
    fn format_examples() {
        assert_eq!(cfg(".,WG", 3).to_string(), ".,GW,.");
        assert_eq!(cfg("W", 3).to_string(), "W,.,.");
    }

    #[test]
    fn transform_examples() {
        let c = cfg("G,W,.,.", 4);
        let r = transform_configuration(&c, &Transform::Rotate(1)).unwrap();
        assert_eq!(r.to_string(), ".,G,W,.");
        let f = transform_configuration(&c, &Transform::Reflect(0)).unwrap();
        assert_eq!(f.to_string(), "G,.,.,W");
        let p = Palette::default();
        let s = transform_configuration(&cfg("G,W,W", 3), &Transform::ColorSwap(p.swap_first_two().unwrap()))
            .unwrap();
        assert_eq!(s.to_string(), "W,G,G");
        assert!(transform_configuration(&c, &Transform::ColorSwap(vec![Color(0), Color(0)])).is_err());
    }

    #[test]
    fn canonical_examples() {
        let (canon, sym) = canonicalize(&cfg(".,W,G,.", 4));
        assert_eq!(canon.to_string(), "G,W,.,.");
        assert_eq!(cfg(".,W,G,.", 4).apply_symmetry(&sym), canon);
        assert_eq!(canonicalize(&cfg("W,G", 6)).0, canonicalize(&cfg("G,W", 6)).0);
    }

    #[test]
    fn symmetry_group_laws() {
        let n = 7;
        for a in Symmetry::all(n) {
            let inv = a.inverse(n);
            for i in 0..n {
                assert_eq!(inv.apply(a.apply(i, n), n), i);
            }
            for b in Symmetry::all(n) {
                let ab = a.then(&b, n);
                for i in 0..n {
                    assert_eq!(ab.apply(i, n), b.apply(a.apply(i, n), n));
                }
            }
        }
    }

    #[test]
    fn span_and_arc() {
        assert_eq!(cfg("G,W,W", 9).span(), 2);
        assert_eq!(cfg("GW,W", 9).span(), 1);
        assert_eq!(cfg("GWW", 9).span(), 0);
        assert_eq!(cfg("G,.,.,W,.,.,W", 9).span(), 6);
        let c = cfg(".,.,.,.,.,.,.,W,G", 9);
        let (start, arc) = cfg("W,.,.,.,.,.,.,.,G", 9).occupied_arc().unwrap();
        assert_eq!((start, arc.to_string()), (8, "G,W".to_string()));
        assert_eq!(c.occupied_arc().unwrap().1.to_string(), "W,G");
    }

    #[test]
    fn placement_matches_either_direction() {
        let p = SubConfiguration::parse("W,G,G", &Palette::default()).unwrap();
        assert!(cfg(".,.,G,G,W", 7).is_placement_of(&p));
        assert!(cfg(".,.,W,G,G", 7).is_placement_of(&p));
        assert!(!cfg(".,.,W,G,.,G", 7).is_placement_of(&p));
    }
}
