//! Text format for rule tables.
//!
//! ```text
//! %name FP2
//! %palette GW
//! %initial G,W
//! 0GW : . | (G) | W :: G, left
//! ```
//!
//! `left` moves toward the node written first, `right` toward the node written last.

use crate::color::{NodeContent, Palette};
use crate::config::SubConfiguration;
use crate::error::{RingError, RingResult};
use crate::rule::{Action, Algorithm, Guard, Movement, Rule};

fn syntax(line: usize, msg: impl Into<String>) -> RingError {
    RingError::Syntax { line, msg: msg.into() }
}

fn parse_node(text: &str, palette: &Palette, line: usize) -> RingResult<NodeContent> {
    let text = text.trim();
    if text == "." || text == "∅" {
        return Ok(NodeContent::EMPTY);
    }
    if text.is_empty() {
        return Err(syntax(line, "empty node entry"));
    }
    let mut m = NodeContent::EMPTY;
    for ch in text.chars() {
        m.add(palette.color(ch)?);
    }
    Ok(m)
}

/// Parses one `LABEL : M-1 | M0 | M+1 :: COLOR, MOVE` line.
pub fn parse_rule(text: &str, palette: &Palette, line: usize) -> RingResult<Rule> {
    let (lhs, rhs) = text
        .split_once("::")
        .ok_or_else(|| syntax(line, "missing '::' before the action"))?;
    let (label, guard) = lhs
        .split_once(':')
        .ok_or_else(|| syntax(line, "missing ':' after the label"))?;
    let label = label.trim();
    if label.is_empty() || label.contains(char::is_whitespace) {
        return Err(syntax(line, "label must be a single non-empty word"));
    }
    let parts: Vec<&str> = guard.split('|').collect();
    if parts.len() != 3 {
        return Err(syntax(line, "guard needs three '|'-separated nodes"));
    }
    let m_minus = parse_node(parts[0], palette, line)?;
    let m_plus = parse_node(parts[2], palette, line)?;
    let center = parts[1].trim();
    let open = center.find('(').ok_or_else(|| syntax(line, "center node lacks '(self)'"))?;
    let close = center[open..]
        .find(')')
        .map(|p| p + open)
        .ok_or_else(|| syntax(line, "unclosed '('"))?;
    let inside = center[open + 1..close].trim();
    let mut inside_chars = inside.chars();
    let self_symbol = match (inside_chars.next(), inside_chars.next()) {
        (Some(c), None) => c,
        _ => return Err(syntax(line, "exactly one self color goes inside '( )'")),
    };
    let self_color = palette.color(self_symbol)?;
    let others = format!("{}{}", &center[..open], &center[close + 1..]);
    let mut m_zero = if others.trim().is_empty() {
        NodeContent::EMPTY
    } else {
        parse_node(&others, palette, line)?
    };
    m_zero.add(self_color);

    let (color, movement) = rhs
        .split_once(',')
        .ok_or_else(|| syntax(line, "action must be 'COLOR, MOVE'"))?;
    let mut color_chars = color.trim().chars();
    let new_color = match (color_chars.next(), color_chars.next()) {
        (Some(c), None) => palette.color(c)?,
        _ => return Err(syntax(line, "new color must be a single letter")),
    };
    let movement = Movement::from_keyword(movement.trim())
        .ok_or_else(|| syntax(line, format!("unknown move '{}'", movement.trim())))?;
    Ok(Rule {
        label: label.to_string(),
        guard: Guard { self_color, m_minus, m_zero, m_plus },
        action: Action { new_color, movement },
    })
}

/// Parses a whole rule file. `#` starts a comment; `%name`, `%palette` and
/// `%initial` set the metadata. The palette defaults to `GW`.
pub fn parse_algorithm(text: &str) -> RingResult<Algorithm> {
    let mut name = String::from("custom");
    let mut palette = Palette::default();
    let mut rules = Vec::new();
    let mut initial_configs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(directive) = content.strip_prefix('%') {
            let (key, value) = directive.split_once(char::is_whitespace).unwrap_or((directive, ""));
            let value = value.trim();
            match key {
                "name" => name = value.to_string(),
                "palette" => {
                    if !rules.is_empty() || !initial_configs.is_empty() {
                        return Err(syntax(line, "%palette must come before rules"));
                    }
                    let symbols = value.chars().filter(|c| !c.is_whitespace()).collect();
                    palette = Palette::new(symbols)?;
                }
                "initial" => initial_configs.push(SubConfiguration::parse(value, &palette)?),
                other => return Err(syntax(line, format!("unknown directive '%{other}'"))),
            }
            continue;
        }
        rules.push(parse_rule(content, &palette, line)?);
    }
    Ok(Algorithm { name, palette, rules, initial_configs })
}

fn render_center(guard: &Guard, palette: &Palette) -> String {
    let mut others = guard.m_zero;
    others.remove(guard.self_color);
    let prefix: String = others.colors().map(|c| palette.symbol(c)).collect();
    format!("{prefix}({})", palette.symbol(guard.self_color))
}

pub fn format_rule(rule: &Rule, palette: &Palette) -> String {
    let g = &rule.guard;
    format!(
        "{} : {} | {} | {} :: {}, {}",
        rule.label,
        g.m_minus.render(palette),
        render_center(g, palette),
        g.m_plus.render(palette),
        palette.symbol(rule.action.new_color),
        rule.action.movement.keyword()
    )
}

pub fn format_algorithm(algorithm: &Algorithm) -> String {
    let p = &algorithm.palette;
    let mut out = format!("%name {}\n%palette {}\n", algorithm.name, p.symbols().iter().collect::<String>());
    for init in &algorithm.initial_configs {
        out.push_str(&format!("%initial {init}\n"));
    }
    for rule in &algorithm.rules {
        out.push_str(&format_rule(rule, p));
        out.push('\n');
    }
    out
}
