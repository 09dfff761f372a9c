use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{RingError, RingResult};

/// Upper bound on palette size; node multisets are stored as fixed count arrays.
pub const MAX_COLORS: usize = 8;

/// Index of a color inside its palette. Ordering follows palette order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Color(pub u8);

impl Color {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered, duplicate-free list of color symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Palette {
    symbols: Vec<char>,
}

impl Default for Palette {
    fn default() -> Self {
        Palette { symbols: vec!['G', 'W'] }
    }
}

impl Palette {
    pub fn new(symbols: Vec<char>) -> RingResult<Self> {
        if symbols.is_empty() {
            return Err(RingError::BadPalette("palette is empty".into()));
        }
        if symbols.len() > MAX_COLORS {
            return Err(RingError::BadPalette(format!(
                "at most {MAX_COLORS} colors are supported"
            )));
        }
        for (i, &c) in symbols.iter().enumerate() {
            if !c.is_ascii_alphabetic() {
                return Err(RingError::BadPalette(format!("'{c}' is not a letter")));
            }
            if symbols[..i].contains(&c) {
                return Err(RingError::BadPalette(format!("duplicate color '{c}'")));
            }
        }
        Ok(Palette { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        (0..self.symbols.len()).map(|i| Color(i as u8))
    }

    pub fn color(&self, symbol: char) -> RingResult<Color> {
        self.symbols
            .iter()
            .position(|&s| s == symbol)
            .map(|i| Color(i as u8))
            .ok_or(RingError::UnknownColor(symbol))
    }

    pub fn symbol(&self, color: Color) -> char {
        self.symbols[color.index()]
    }

    pub fn contains(&self, color: Color) -> bool {
        color.index() < self.symbols.len()
    }

    /// Checks that `perm[c]` is a bijection over this palette.
    pub fn check_permutation(&self, perm: &[Color]) -> RingResult<()> {
        if perm.len() != self.len() {
            return Err(RingError::BadPermutation);
        }
        let mut seen = [false; MAX_COLORS];
        for c in perm {
            if !self.contains(*c) || seen[c.index()] {
                return Err(RingError::BadPermutation);
            }
            seen[c.index()] = true;
        }
        Ok(())
    }

    /// The permutation exchanging the first two colors, identity elsewhere.
    pub fn swap_first_two(&self) -> RingResult<Vec<Color>> {
        if self.len() < 2 {
            return Err(RingError::BadPermutation);
        }
        let mut perm: Vec<Color> = self.colors().collect();
        perm.swap(0, 1);
        Ok(perm)
    }
}

/// Multiset of robot colors on one node.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NodeContent {
    counts: [u8; MAX_COLORS],
}

impl NodeContent {
    pub const EMPTY: NodeContent = NodeContent { counts: [0; MAX_COLORS] };

    pub fn single(color: Color) -> Self {
        let mut m = Self::EMPTY;
        m.add(color);
        m
    }

    pub fn from_colors(colors: impl IntoIterator<Item = Color>) -> Self {
        let mut m = Self::EMPTY;
        for c in colors {
            m.add(c);
        }
        m
    }

    pub fn count(&self, color: Color) -> usize {
        self.counts[color.index()] as usize
    }

    pub fn len(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn is_tower(&self) -> bool {
        self.len() >= 2
    }

    pub fn contains(&self, color: Color) -> bool {
        self.counts[color.index()] > 0
    }

    /// Number of distinct colors present.
    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn add(&mut self, color: Color) {
        self.counts[color.index()] += 1;
    }

    pub fn remove(&mut self, color: Color) -> bool {
        let slot = &mut self.counts[color.index()];
        if *slot == 0 {
            return false;
        }
        *slot -= 1;
        true
    }

    /// Colors in palette order, with repetition.
    pub fn colors(&self) -> impl Iterator<Item = Color> + '_ {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat(Color(i as u8)).take(c as usize))
    }

    pub fn map_colors(&self, perm: &[Color]) -> Self {
        NodeContent::from_colors(self.colors().map(|c| perm[c.index()]))
    }

    pub fn render(&self, palette: &Palette) -> String {
        if self.is_empty() {
            ".".to_string()
        } else {
            self.colors().map(|c| palette.symbol(c)).collect()
        }
    }
}

impl fmt::Debug for NodeContent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.colors().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.0)?;
        }
        write!(f, "}}")
    }
}

/// Occupied nodes sort before empty ones; occupied nodes compare by their
/// color sequence in palette order, a proper prefix first.
impl Ord for NodeContent {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => self.colors().cmp(other.colors()),
        }
    }
}

impl PartialOrd for NodeContent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_rejects_duplicates() {
        assert!(Palette::new(vec!['G', 'G']).is_err());
        assert!(Palette::new(vec![]).is_err());
        assert_eq!(Palette::default().symbols(), &['G', 'W']);
    }

    #[test]
    fn node_order_puts_empty_last() {
        let g = NodeContent::single(Color(0));
        let w = NodeContent::single(Color(1));
        let gw = NodeContent::from_colors([Color(0), Color(1)]);
        assert!(g < gw && gw < w && w < NodeContent::EMPTY);
    }

    #[test]
    fn multiset_counts() {
        let mut m = NodeContent::from_colors([Color(1), Color(0), Color(1)]);
        assert_eq!(m.len(), 3);
        assert_eq!(m.count(Color(1)), 2);
        assert!(m.remove(Color(0)));
        assert!(!m.remove(Color(0)));
        assert_eq!(m.distinct(), 1);
    }
}
