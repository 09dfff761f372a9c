//! `ring-explorer`: simulate, verify, classify and audit ring exploration algorithms.
//!
//! Exit codes: 0 success or `Holds`, 1 `Fails` / discrepancies / validation issues,
//! 2 usage or input errors, 3 state limit exceeded.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ring_algorithms::{
    builtin_algorithm, export_catalog, find_progressing_rule_cycles, progressing_rule_sets, AppendixRuleCatalog,
    BUILTIN_NAMES, DEFAULT_EXCLUSIONS,
};
use ring_core::{parse_algorithm, parse_configuration, validate_algorithm, Algorithm, Configuration, Palette};
use ring_semantics::{simulate, trace_records, trace_text, Engine, Policy, SchedulerModel, SymMode, SystemState};
use ring_verifier::{
    check_objective, classify_configuration, init_thread_pool_from_env, universality_audit_with, ExploreOptions,
    Objective, VerifyError, DEFAULT_STATE_LIMIT,
};
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_STATE_LIMIT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "ring-explorer", version, about = "Luminous robots exploring an anonymous ring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one execution under an adversary policy and print its frames.
    Simulate(SimulateArgs),
    /// Decide an exploration objective for one initial configuration.
    Verify(VerifyArgs),
    /// Look up an unsolvability certificate for a configuration.
    Classify(ClassifyArgs),
    /// Verify and classify every initial configuration with k robots.
    Audit(AuditArgs),
    /// Rule cycles of the three-robot candidate rules and their displacement.
    Cycles(CyclesArgs),
    /// Check a rule file for well-formedness.
    Validate(ValidateArgs),
    /// Built-in algorithm tables.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// Write every built-in algorithm and the candidate rule list as rule files.
    Export {
        /// Output directory; without it the files are printed one after another.
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Fsync,
    Ssync,
    Async,
}

impl From<ModelArg> for SchedulerModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Fsync => SchedulerModel::Fsync,
            ModelArg::Ssync => SchedulerModel::Ssync,
            ModelArg::Async => SchedulerModel::Async,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Perpetual,
    Terminating,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Perpetual => Objective::Perpetual,
            ObjectiveArg::Terminating => Objective::Terminating,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SymModeArg {
    Independent,
    Locked,
}

impl From<SymModeArg> for SymMode {
    fn from(s: SymModeArg) -> Self {
        match s {
            SymModeArg::Independent => SymMode::Independent,
            SymModeArg::Locked => SymMode::Locked,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value = "fsync")]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Include wall-clock timings (makes structured output run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct Exploration {
    #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
    state_limit: usize,
    #[arg(long, value_enum, default_value = "independent")]
    sym_mode: SymModeArg,
}

impl Exploration {
    fn options(&self) -> ExploreOptions {
        ExploreOptions { state_limit: self.state_limit, sym_mode: self.sym_mode.into() }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Built-in name (FP2, FT3, AP3, AT4) or rule file.
    #[arg(long)]
    alg: String,
    #[arg(long)]
    config: String,
    #[arg(long)]
    n: Option<usize>,
    /// scripted:FILE, random or first.
    #[arg(long, default_value = "first")]
    policy: String,
    /// Choice script, one choice per line; same as --policy scripted:FILE.
    #[arg(long, conflicts_with = "policy")]
    script: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_steps: usize,
    #[arg(long, value_enum, default_value = "independent")]
    sym_mode: SymModeArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    alg: String,
    #[arg(long)]
    config: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "perpetual")]
    objective: ObjectiveArg,
    #[command(flatten)]
    exploration: Exploration,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[arg(long)]
    config: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value = "perpetual")]
    objective: ObjectiveArg,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct AuditArgs {
    #[arg(long)]
    alg: String,
    /// Ring size or inclusive range such as 6..10.
    #[arg(long)]
    n: String,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "perpetual")]
    objective: ObjectiveArg,
    #[command(flatten)]
    exploration: Exploration,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CyclesArgs {
    /// Rule labels left out of the search.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EXCLUSIONS.map(String::from))]
    exclude: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Rule file, or a built-in name.
    file: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

enum Failure {
    Usage(anyhow::Error),
    StateLimit(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

struct Output {
    code: u8,
    body: String,
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    init_thread_pool_from_env();
    let echo: Vec<String> = argv.iter().skip(1).cloned().collect();
    match dispatch(cli.command, &echo) {
        Ok(o) => {
            let _ = out.write_all(o.body.as_bytes());
            o.code
        }
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
        Err(Failure::StateLimit(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_STATE_LIMIT
        }
    }
}

fn dispatch(command: Command, echo: &[String]) -> Result<Output, Failure> {
    match command {
        Command::Simulate(a) => cmd_simulate(a, echo),
        Command::Verify(a) => cmd_verify(a, echo),
        Command::Classify(a) => cmd_classify(a, echo),
        Command::Audit(a) => cmd_audit(a, echo),
        Command::Cycles(a) => cmd_cycles(a, echo),
        Command::Validate(a) => cmd_validate(a, echo),
        Command::Catalog { action: CatalogAction::Export { dir } } => cmd_export(dir),
    }
}

fn load_algorithm(reference: &str) -> Result<Algorithm> {
    if BUILTIN_NAMES.iter().any(|b| b.eq_ignore_ascii_case(reference)) {
        return Ok(builtin_algorithm(reference)?);
    }
    let text = std::fs::read_to_string(reference)
        .with_context(|| format!("'{reference}' is neither a built-in ({}) nor a readable file", BUILTIN_NAMES.join(", ")))?;
    parse_algorithm(&text).with_context(|| format!("parsing {reference}"))
}

fn load_configuration(text: &str, n: Option<usize>, palette: &Palette) -> Result<Configuration> {
    parse_configuration(text, n, palette).with_context(|| format!("configuration '{text}'"))
}

fn header(echo: &[String]) -> String {
    format!("# ring-explorer {} {}\n", env!("CARGO_PKG_VERSION"), echo.join(" "))
}

fn envelope(echo: &[String], payload: Value) -> Value {
    let mut doc = json!({
        "tool": "ring-explorer",
        "version": env!("CARGO_PKG_VERSION"),
        "command": echo,
    });
    if let (Value::Object(d), Value::Object(p)) = (&mut doc, payload) {
        d.extend(p);
    }
    doc
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("wall_ms");
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

fn json_body(echo: &[String], payload: Value, timings: bool) -> String {
    let mut doc = envelope(echo, payload);
    if !timings {
        strip_timings(&mut doc);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
    s.push('\n');
    s
}

fn policy_from(a: &SimulateArgs) -> Result<Policy> {
    let script = match (&a.script, a.policy.strip_prefix("scripted:")) {
        (Some(path), _) => Some(path.clone()),
        (None, Some(path)) => Some(PathBuf::from(path)),
        (None, None) => None,
    };
    if let Some(path) = script {
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading script {}", path.display()))?;
        let lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect();
        return Ok(Policy::Scripted(lines));
    }
    match a.policy.as_str() {
        "random" => Ok(Policy::Random { seed: a.seed }),
        "first" => Ok(Policy::First),
        other => bail!("unknown policy '{other}' (expected scripted:FILE, random or first)"),
    }
}

fn cmd_simulate(a: SimulateArgs, echo: &[String]) -> Result<Output, Failure> {
    let alg = load_algorithm(&a.alg)?;
    let config = load_configuration(&a.config, a.n, &alg.palette)?;
    let model: SchedulerModel = a.common.model.into();
    let policy = policy_from(&a)?;
    let engine = Engine::with_sym_mode(&alg, a.sym_mode.into());
    let started = Instant::now();
    let trace = simulate(&SystemState::from_configuration(&config, model), &engine, &policy, a.max_steps)
        .map_err(|e| anyhow!(e))?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let body = match a.common.format {
        Format::Json => {
            let mut records = trace_records(&trace, &engine, &alg.palette);
            let initial = records.remove(0);
            json_body(
                echo,
                json!({
                    "algorithm": alg.name,
                    "model": model,
                    "n": config.n(),
                    "initial": initial,
                    "steps": records,
                    "covers_ring": trace.covers_ring(),
                    "quiescent": engine.is_quiescent(trace.last()),
                    "wall_ms": wall_ms,
                }),
                a.common.timings,
            )
        }
        Format::Text => {
            let mut s = header(echo);
            let _ = writeln!(s, "# {} {} n={} from {}", alg.name, model.name(), config.n(), trace.initial.render(&alg.palette));
            for line in trace_text(&trace, &engine, &alg.palette).lines().skip(1) {
                let _ = writeln!(s, "{line}");
            }
            if a.common.timings {
                let _ = writeln!(s, "# {wall_ms:.1} ms");
            }
            s
        }
    };
    Ok(Output { code: EXIT_OK, body })
}

fn state_limit(e: VerifyError) -> Failure {
    match e {
        VerifyError::StateLimit { .. } => Failure::StateLimit(e.to_string()),
        other => Failure::Usage(anyhow!(other)),
    }
}

fn cmd_verify(a: VerifyArgs, echo: &[String]) -> Result<Output, Failure> {
    let alg = load_algorithm(&a.alg)?;
    let config = load_configuration(&a.config, a.n, &alg.palette)?;
    let model: SchedulerModel = a.common.model.into();
    let objective: Objective = a.objective.into();
    let options = a.exploration.options();
    let started = Instant::now();
    let verdict = check_objective(&SystemState::from_configuration(&config, model), &alg, model, objective, options)
        .map_err(state_limit)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let engine = Engine::with_sym_mode(&alg, options.sym_mode);
    let code = if verdict.holds() { EXIT_OK } else { EXIT_FAILS };
    let body = match a.common.format {
        Format::Json => json_body(
            echo,
            json!({
                "algorithm": alg.name,
                "configuration": config.to_string(),
                "n": config.n(),
                "model": model,
                "objective": objective,
                "sym_mode": options.sym_mode,
                "outcome": verdict.outcome,
                "states": verdict.states,
                "edges": verdict.edges,
                "transitions": verdict.transitions,
                "witness": verdict.witness.as_ref().map(|w| w.report(&engine, &alg.palette)),
                "wall_ms": wall_ms,
            }),
            a.common.timings,
        ),
        Format::Text => {
            let mut s = header(echo);
            let _ = writeln!(
                s,
                "{} {} {} from {} (n={}): {}",
                alg.name,
                model.name(),
                objective,
                config,
                config.n(),
                if verdict.holds() { "HOLDS" } else { "FAILS" }
            );
            let _ = writeln!(s, "states {}  edges {}  transitions {}", verdict.states, verdict.edges, verdict.transitions);
            if let Some(w) = &verdict.witness {
                s.push_str(&w.render(&engine, &alg.palette));
            }
            if a.common.timings {
                let _ = writeln!(s, "# {wall_ms:.1} ms");
            }
            s
        }
    };
    Ok(Output { code, body })
}

fn cmd_classify(a: ClassifyArgs, echo: &[String]) -> Result<Output, Failure> {
    let config = load_configuration(&a.config, a.n, &Palette::default())?;
    let model: SchedulerModel = a.common.model.into();
    let objective: Objective = a.objective.into();
    let cert = classify_configuration(&config, model, objective);
    let body = match a.common.format {
        Format::Json => json_body(
            echo,
            json!({
                "configuration": config.to_string(),
                "n": config.n(),
                "model": model,
                "objective": objective,
                "certificate": cert,
            }),
            a.common.timings,
        ),
        Format::Text => {
            let verdict = match &cert {
                Some(c) => format!("unsolvable: {c}"),
                None => "no certificate".to_string(),
            };
            format!("{}{} {} {}: {verdict}\n", header(echo), config, model.name(), objective)
        }
    };
    Ok(Output { code: EXIT_OK, body })
}

fn parse_range(text: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let bad = || anyhow!("ring size '{text}' is not a number or a range like 6..10");
    let (lo, hi) = match text.split_once("..") {
        Some((l, h)) => (l.trim().parse().map_err(|_| bad())?, h.trim_start_matches('=').trim().parse().map_err(|_| bad())?),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo < 3 || hi < lo {
        bail!("ring sizes must satisfy 3 <= min <= max, got {text}");
    }
    Ok(lo..=hi)
}

fn cmd_audit(a: AuditArgs, echo: &[String]) -> Result<Output, Failure> {
    let alg = load_algorithm(&a.alg)?;
    let range = parse_range(&a.n)?;
    if a.k == 0 {
        return Err(anyhow!("k must be at least 1").into());
    }
    let model: SchedulerModel = a.common.model.into();
    let report = universality_audit_with(&alg, model, a.objective.into(), range, a.k, a.exploration.options());
    let code = if report.limited().count() > 0 {
        EXIT_STATE_LIMIT
    } else if report.discrepancies().count() > 0 {
        EXIT_FAILS
    } else {
        EXIT_OK
    };
    let body = match a.common.format {
        Format::Json => json_body(echo, serde_json::to_value(&report).expect("reports serialize"), a.common.timings),
        Format::Text => format!("{}{}", header(echo), report.render_table(a.common.timings)),
    };
    Ok(Output { code, body })
}

fn cmd_cycles(a: CyclesArgs, echo: &[String]) -> Result<Output, Failure> {
    let catalog = AppendixRuleCatalog::new();
    for label in &a.exclude {
        if catalog.rule(label).is_none() {
            return Err(anyhow!("unknown rule '{label}' (expected R1..R16)").into());
        }
    }
    let exclusions: Vec<&str> = a.exclude.iter().map(String::as_str).collect();
    let cycles = find_progressing_rule_cycles(&catalog, &exclusions);
    let sets = progressing_rule_sets(&cycles);
    let ordered = |set: &std::collections::BTreeSet<String>| {
        let mut v: Vec<String> = set.iter().cloned().collect();
        v.sort_by_key(|l| catalog.position(l));
        v
    };
    let body = match a.format {
        Format::Json => json_body(
            echo,
            json!({
                "excluded": a.exclude,
                "cycles": cycles,
                "progressing_rule_sets": sets.iter().map(ordered).collect::<Vec<_>>(),
            }),
            false,
        ),
        Format::Text => {
            let mut s = header(echo);
            let _ = writeln!(s, "excluded: {}", a.exclude.join(","));
            for c in &cycles {
                let _ = writeln!(s, "{}{c}", if c.is_progressing() { "* " } else { "  " });
            }
            let _ = writeln!(s, "progressing rule sets:");
            for set in &sets {
                let _ = writeln!(s, "  {{{}}}", ordered(set).join(","));
            }
            s
        }
    };
    Ok(Output { code: EXIT_OK, body })
}

fn cmd_validate(a: ValidateArgs, echo: &[String]) -> Result<Output, Failure> {
    let alg = load_algorithm(&a.file)?;
    let issues = validate_algorithm(&alg);
    let code = if issues.is_empty() { EXIT_OK } else { EXIT_FAILS };
    let body = match a.format {
        Format::Json => json_body(
            echo,
            json!({ "algorithm": alg.name, "rules": alg.rules.len(), "issues": issues }),
            false,
        ),
        Format::Text => {
            let mut s = header(echo);
            let _ = writeln!(s, "{}: {} rules, {} issues", alg.name, alg.rules.len(), issues.len());
            for i in &issues {
                let _ = writeln!(s, "  {i}");
            }
            s
        }
    };
    Ok(Output { code, body })
}

fn cmd_export(dir: Option<PathBuf>) -> Result<Output, Failure> {
    let files = export_catalog();
    let mut body = String::new();
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, text) in files {
                let path = dir.join(format!("{name}.rules"));
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                let _ = writeln!(body, "{}", path.display());
            }
        }
        None => {
            for (name, text) in files {
                let _ = writeln!(body, "# --- {name}.rules");
                body.push_str(&text);
            }
        }
    }
    Ok(Output { code: EXIT_OK, body })
}
