use ring_core::{parse_algorithm, Algorithm, RingError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown built-in algorithm '{0}' (expected FP2, FT3, AP3 or AT4)")]
    UnknownName(String),
    #[error("color swap needs a two-color palette, found {0} colors")]
    NotBinary(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
}

const FP2: &str = "\
%name FP2
%palette GW
%initial G,W
%initial W,G
0GW : . | (G) | W :: G, left
0WG : . | (W) | G :: W, right
";

const FT3: &str = "\
%name FT3
%palette GW
%initial W,W,W
%initial G,W,W
%initial W,W,G
%initial G,W,G
0GW : . | (G) | W :: G, left
0WG : . | (W) | G :: W, right
0WW : . | (W) | W :: G, stay
GWW : G | (W) | W :: W, left
GWG : G | (W) | G :: W, either
";

const AP3: &str = "\
%name AP3
%palette GW
%initial W,W,G
%initial W,G,G
%initial G,W,W
%initial G,G,W
%initial W,GW
%initial GW,W
%initial G,GW
%initial GW,G
0GW : . | (G) | W :: G, right
0TW : . | G(W) | W :: G, right
0TG : . | W(G) | G :: W, left
0WG : . | (W) | G :: W, right
";

const AT4: &str = "\
%name AT4
%palette GW
%initial W,W,G,G
%initial W,W,W,G
%initial W,W,G,W
%initial G,G,W,W
%initial G,W,W,W
%initial W,G,W,W
0GW : . | (G) | W :: G, right
GGW : G | (G) | W :: G, right
0TW : . | G(W) | W :: G, right
GTW : G | G(W) | W :: G, right
0TG : . | W(G) | G :: W, left
0WG : . | (W) | G :: W, right
";

pub const BUILTIN_NAMES: [&str; 4] = ["FP2", "FT3", "AP3", "AT4"];

/// FP2: FSYNC perpetual, k=2. FT3: FSYNC terminating, k=3.
/// AP3: ASYNC perpetual, k=3. AT4: ASYNC terminating, k=4.
pub fn builtin_algorithm(name: &str) -> Result<Algorithm, CatalogError> {
    let text = match name.to_ascii_uppercase().as_str() {
        "FP2" => FP2,
        "FT3" => FT3,
        "AP3" => AP3,
        "AT4" => AT4,
        _ => return Err(CatalogError::UnknownName(name.to_string())),
    };
    Ok(parse_algorithm(text)?)
}

const SWAP_SUFFIX: &str = "-swapped";

/// Exchanges the two palette colors in guards, actions and initial patterns.
pub fn color_swapped(algorithm: &Algorithm) -> Result<Algorithm, CatalogError> {
    let p = &algorithm.palette;
    if p.len() != 2 {
        return Err(CatalogError::NotBinary(p.len()));
    }
    let mut swapped = algorithm.map_colors(&p.swap_first_two()?)?;
    swapped.name = match algorithm.name.strip_suffix(SWAP_SUFFIX) {
        Some(base) => base.to_string(),
        None => format!("{}{SWAP_SUFFIX}", algorithm.name),
    };
    Ok(swapped)
}
