use ring_core::{Palette, SubConfiguration};

/// Named families of sub-configurations over the palette `[G, W]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigClassCatalog {
    /// Shapes AP3 cycles through while exploring.
    pub c_pe: Vec<SubConfiguration>,
    /// Three-robot shapes able to keep exploring a ring.
    pub c_exp: Vec<SubConfiguration>,
    /// Four-robot shapes mirrored across the link at their middle.
    pub c_sym: Vec<SubConfiguration>,
    /// Four-robot initial shapes solvable for terminating exploration.
    pub c_sol: Vec<SubConfiguration>,
}

const C_PE: [&str; 3] = ["W,W,G", "W,GW", "GW,G"];
const C_EXP: [&str; 8] = ["W,G,G", "G,G,W", "G,W,W", "W,W,G", "W,GW", "GW,W", "G,GW", "GW,G"];
const C_SYM: [&str; 7] = ["W,G,G,W", "G,W,W,G", "W,W,W,W", "G,G,G,G", "WW,WW", "GG,GG", "GW,GW"];
const C_SOL: [&str; 10] = [
    "W,W,G,G", "W,W,W,G", "W,W,G,W", "G,G,W,W", "G,W,W,W", "W,G,W,W", "G,G,G,W", "G,G,W,G", "W,G,G,G",
    "G,W,G,G",
];

fn parse_all(items: &[&str]) -> Vec<SubConfiguration> {
    let palette = Palette::default();
    items
        .iter()
        .map(|t| SubConfiguration::parse(t, &palette).expect("catalog entries are well-formed"))
        .collect()
}

impl ConfigClassCatalog {
    pub fn new() -> Self {
        ConfigClassCatalog {
            c_pe: parse_all(&C_PE),
            c_exp: parse_all(&C_EXP),
            c_sym: parse_all(&C_SYM),
            c_sol: parse_all(&C_SOL),
        }
    }

    pub fn by_name(&self, name: &str) -> Option<&[SubConfiguration]> {
        match name.to_ascii_lowercase().as_str() {
            "pe" | "c_pe" => Some(&self.c_pe),
            "exp" | "c_exp" => Some(&self.c_exp),
            "sym" | "c_sym" => Some(&self.c_sym),
            "sol" | "c_sol" => Some(&self.c_sol),
            _ => None,
        }
    }
}

impl Default for ConfigClassCatalog {
    fn default() -> Self {
        Self::new()
    }
}

/// Equal as written or read backwards.
pub fn same_up_to_reflection(a: &SubConfiguration, b: &SubConfiguration) -> bool {
    a == b || *a == b.reversed()
}
