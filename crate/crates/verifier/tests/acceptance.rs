//! Acceptance run: one PASS/FAIL line per criterion, with the measured time against its budget.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ring_algorithms::{builtin_algorithm, color_swapped, find_progressing_rule_cycles, AppendixRuleCatalog, DEFAULT_EXCLUSIONS};
use ring_core::{canonicalize, Algorithm, Color, Configuration, NodeContent, Palette, SubConfiguration, Symmetry};
use ring_semantics::{AdversaryChoice, Engine, RobotState, SchedulerModel, SystemState};
use ring_verifier::*;

use SchedulerModel::{Async, Fsync, Ssync};

/// Criteria whose failure is a documented finding about the algorithm, not a defect here.
const KNOWN_FINDINGS: [u32; 1] = [2];

#[derive(Default)]
struct Tally {
    transitions: usize,
    fails: usize,
    replayed: usize,
}

impl Tally {
    fn record(&mut self, v: &Verdict, algorithm: &Algorithm) -> Result<(), String> {
        self.transitions += v.transitions;
        if let Some(w) = &v.witness {
            self.fails += 1;
            w.replay(&Engine::new(algorithm)).map_err(|e| format!("witness does not replay: {e}"))?;
            self.replayed += 1;
        }
        Ok(())
    }
}

type Check = fn(&mut Tally) -> Result<String, String>;

fn state(text: &str, n: usize, model: SchedulerModel) -> SystemState {
    SystemState::from_configuration(&Configuration::parse(text, Some(n)).unwrap(), model)
}

fn run(
    tally: &mut Tally,
    alg: &Algorithm,
    s: &SystemState,
    model: SchedulerModel,
    objective: Objective,
) -> Result<Verdict, String> {
    let v = check_objective(s, alg, model, objective, ExploreOptions::default()).map_err(|e| e.to_string())?;
    tally.record(&v, alg)?;
    Ok(v)
}

fn holds_on_initials(
    tally: &mut Tally,
    alg: &Algorithm,
    model: SchedulerModel,
    objective: Objective,
    ns: std::ops::RangeInclusive<usize>,
) -> Result<usize, String> {
    let mut count = 0;
    for n in ns {
        for init in &alg.initial_configs {
            let c = init.embed(n, 0).map_err(|e| e.to_string())?;
            let v = run(tally, alg, &SystemState::from_configuration(&c, model), model, objective)?;
            if !v.holds() {
                let w = v.witness.map(|w| w.render(&Engine::new(alg), &alg.palette)).unwrap_or_default();
                return Err(format!("{} {init} n={n} fails:\n{w}", alg.name));
            }
            count += 1;
        }
    }
    Ok(count)
}

fn fp2_perpetual(tally: &mut Tally) -> Result<String, String> {
    let a = builtin_algorithm("FP2").unwrap();
    for n in 3..=10 {
        let v = run(tally, &a, &state("G,W", n, Fsync), Fsync, Objective::Perpetual)?;
        if !v.holds() {
            return Err(format!("G,W fails at n={n}"));
        }
    }
    Ok("G,W holds for n=3..10".into())
}

fn fp2_universality(_: &mut Tally) -> Result<String, String> {
    let a = builtin_algorithm("FP2").unwrap();
    let r = universality_audit(&a, Fsync, Objective::Perpetual, 6..=10, 2);
    let mut problems = Vec::new();
    for e in &r.entries {
        if e.witness_replays == Some(false) {
            return Err(format!("witness for {} n={} does not replay", e.configuration, e.n));
        }
        let adjacent_mixed = e.configuration == canonicalize(&Configuration::parse("G,W", Some(e.n)).unwrap()).0;
        let ok = match &e.status {
            AuditStatus::AlgorithmSolves => adjacent_mixed,
            AuditStatus::CertifiedUnsolvable { certificate } => {
                !adjacent_mixed
                    && matches!(certificate, Certificate::Territory { .. } | Certificate::PairSameColor { .. })
            }
            _ => false,
        };
        if !ok {
            problems.push(format!("n={} {} {}", e.n, e.configuration, e.status.label()));
        }
    }
    let summary = format!(
        "{} entries: solves {}, certified {}, discrepancies {}",
        r.entries.len(),
        r.solved().count(),
        r.certified().count(),
        r.discrepancies().count()
    );
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; unexplained: {}. Two robots of different colors sharing a node are never \
             moved by FP2, yet a rule splitting them solves the configuration",
            problems.join(", ")
        ))
    }
}

fn ft3_terminating(tally: &mut Tally) -> Result<String, String> {
    let a = builtin_algorithm("FT3").unwrap();
    let plain = holds_on_initials(tally, &a, Fsync, Objective::Terminating, 3..=10)?;
    let swapped = color_swapped(&a).unwrap();
    let sw = holds_on_initials(tally, &swapped, Fsync, Objective::Terminating, 3..=10)?;
    Ok(format!("{plain} instances, {sw} color-swapped instances (G,G,G ...) hold"))
}

fn ap3_async(tally: &mut Tally) -> Result<String, String> {
    let a = builtin_algorithm("AP3").unwrap();
    let count = holds_on_initials(tally, &a, Async, Objective::Perpetual, 3..=8)?;
    Ok(format!("{count} instances hold under ASYNC"))
}

fn ap3_universality(_: &mut Tally) -> Result<String, String> {
    let a = builtin_algorithm("AP3").unwrap();
    let r = universality_audit(&a, Ssync, Objective::Perpetual, 9..=9, 3);
    let solved: BTreeSet<Configuration> = r.solved().map(|e| e.configuration.clone()).collect();
    let expected: BTreeSet<Configuration> = a
        .initial_configs
        .iter()
        .map(|p| canonicalize(&p.embed(9, 0).unwrap()).0)
        .collect();
    if r.entries.iter().any(|e| e.witness_replays == Some(false)) {
        return Err("a failure witness does not replay".into());
    }
    if solved != expected || r.discrepancies().count() > 0 || r.limited().count() > 0 {
        return Err(format!(
            "solves {solved:?}, expected {expected:?}, discrepancies {}",
            r.discrepancies().count()
        ));
    }
    Ok(format!(
        "{} classes: {} solved (the 8 initial shapes up to reflection), {} certified",
        r.entries.len(),
        solved.len(),
        r.certified().count()
    ))
}

fn at4_terminating(tally: &mut Tally) -> Result<String, String> {
    let a = builtin_algorithm("AT4").unwrap();
    let plain = holds_on_initials(tally, &a, Async, Objective::Terminating, 5..=8)?;
    let sw = holds_on_initials(tally, &color_swapped(&a).unwrap(), Async, Objective::Terminating, 5..=8)?;
    // the runs from W,W,G,G pass through the G,W,W,G meeting shape, so its interleavings are covered
    let meeting = SubConfiguration::parse("G,W,W,G", &a.palette).unwrap();
    let g = build_reachable_graph(&state("W,W,G,G", 8, Async), &a, DEFAULT_STATE_LIMIT).map_err(|e| e.to_string())?;
    let hits = g
        .nodes
        .iter()
        .filter(|v| !v.state.has_pending() && v.state.configuration(&a.palette).is_placement_of(&meeting))
        .count();
    if hits == 0 {
        return Err("G,W,W,G never reached from W,W,G,G".into());
    }
    Ok(format!("{plain} instances, {sw} color-swapped instances hold; G,W,W,G reached in {hits} idle states"))
}

fn rule_cycles(_: &mut Tally) -> Result<String, String> {
    let cycles = find_progressing_rule_cycles(&AppendixRuleCatalog::new(), &DEFAULT_EXCLUSIONS);
    let progressing: BTreeSet<BTreeSet<String>> = ring_algorithms::progressing_rule_sets(&cycles);
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let expected: BTreeSet<_> = [
        set(&["R2", "R3", "R7"]),
        set(&["R8", "R4", "R1"]),
        set(&["R10", "R4", "R5"]),
        set(&["R6", "R3", "R9"]),
    ]
    .into_iter()
    .collect();
    if progressing != expected {
        return Err(format!("progressing sets {progressing:?}"));
    }
    let still = set(&["R2", "R5", "R10", "R7"]);
    if !cycles.iter().any(|c| c.rule_set() == still && c.net_displacement == 0) {
        return Err("{R2,R5,R10,R7} not reported with zero displacement".into());
    }
    Ok(format!("{} cycles, 4 progressing rule sets; {{R2,R5,R10,R7}} shifts 0", cycles.len()))
}

fn negative_checks(tally: &mut Tally) -> Result<String, String> {
    let ap3 = builtin_algorithm("AP3").unwrap();
    let v = run(tally, &ap3, &state("W,G,W", 9, Ssync), Ssync, Objective::Perpetual)?;
    if v.holds() {
        return Err("AP3 W,G,W n=9 holds".into());
    }
    let fp2 = builtin_algorithm("FP2").unwrap();
    let v = run(tally, &fp2, &state("G,W", 6, Fsync), Fsync, Objective::Terminating)?;
    if !matches!(v.witness, Some(Witness::Lasso { .. })) {
        return Err("FP2 G,W n=6 terminating did not yield a lasso".into());
    }
    let c = Configuration::parse("G,.,.,G", Some(6)).unwrap();
    match classify_configuration(&c, Fsync, Objective::Perpetual) {
        Some(Certificate::Territory { territories }) => {
            Ok(format!("W,G,W fails with a replayed witness; G,W never quiesces; G,.,.,G has territories {territories}"))
        }
        other => Err(format!("G,.,.,G classified as {other:?}")),
    }
}

fn random_configuration(rng: &mut ChaCha8Rng) -> Configuration {
    let n = rng.gen_range(3..=24);
    let k = rng.gen_range(1..=6);
    let mut nodes = vec![NodeContent::EMPTY; n];
    for _ in 0..k {
        nodes[rng.gen_range(0..n)].add(Color(rng.gen_range(0..2)));
    }
    Configuration::new(Palette::default(), nodes).unwrap()
}

/// Every configuration (not only canonical ones) with `k` robots on `n` nodes.
fn all_configurations(n: usize, k: usize) -> Vec<Configuration> {
    let p = Palette::default();
    let mut out = Vec::new();
    for c in enumerate_initial_configurations(n, k, &p) {
        for sym in Symmetry::all(n) {
            out.push(c.apply_symmetry(&sym));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn outcome_set(engine: &Engine<'_>, s: &SystemState) -> BTreeSet<Vec<RobotState>> {
    engine.choices(s).iter().map(|c| engine.apply_unchecked(s, c).erased()).collect()
}

/// States to test from: idle placements plus, under ASYNC, every state one Look-Compute away.
fn sample_states(engine: &Engine<'_>, c: &Configuration, model: SchedulerModel) -> Vec<SystemState> {
    let s = SystemState::from_configuration(c, model);
    let mut out = vec![s.clone()];
    if model == Async {
        for choice in engine.choices(&s) {
            out.push(engine.apply_unchecked(&s, &choice));
        }
    }
    out
}

fn equivariance(algs: &[Algorithm]) -> Result<usize, String> {
    let swap = [Color(1), Color(0)];
    let mut checked = 0;
    for a in algs {
        let e = Engine::new(a);
        let swapped = color_swapped(a).unwrap();
        let es = Engine::new(&swapped);
        for n in 3..=6 {
            for k in 1..=3 {
                for c in all_configurations(n, k) {
                    for model in [Fsync, Ssync, Async] {
                        for s in sample_states(&e, &c, model) {
                            let base = outcome_set(&e, &s);
                            for sym in Symmetry::all(n) {
                                let moved: BTreeSet<_> = base
                                    .iter()
                                    .map(|r| {
                                        let t = SystemState { n, model, robots: r.clone() };
                                        t.apply_symmetry(&sym).erased()
                                    })
                                    .collect();
                                if outcome_set(&e, &s.apply_symmetry(&sym)) != moved {
                                    return Err(format!("{} {model:?} {c}: not equivariant under {sym:?}", a.name));
                                }
                            }
                            let recolored: BTreeSet<_> = base
                                .iter()
                                .map(|r| SystemState { n, model, robots: r.clone() }.map_colors(&swap).erased())
                                .collect();
                            if outcome_set(&es, &s.map_colors(&swap)) != recolored {
                                return Err(format!("{} {model:?} {c}: not natural under color swap", a.name));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// Runs the robots of one SSYNC step one at a time, with any interleaving of their
/// Look-Compute and Move phases, looking for the same outcome.
fn async_reaches(engine: &Engine<'_>, s: &SystemState, left: &[usize], target: &[RobotState]) -> bool {
    if left.is_empty() && !s.has_pending() {
        return s.erased() == target;
    }
    for choice in engine.choices(s) {
        let next_left: Vec<usize> = match &choice {
            AdversaryChoice::AsyncLc { mv } if left.contains(&mv.robot) => {
                left.iter().copied().filter(|&r| r != mv.robot).collect()
            }
            AdversaryChoice::AsyncM { .. } => left.to_vec(),
            _ => continue,
        };
        if async_reaches(engine, &engine.apply_unchecked(s, &choice), &next_left, target) {
            return true;
        }
    }
    false
}

fn inclusions(algs: &[Algorithm]) -> Result<(usize, usize), String> {
    let (mut fs, mut sa) = (0, 0);
    for a in algs {
        let e = Engine::new(a);
        for n in 3..=6 {
            for k in 1..=3 {
                for c in all_configurations(n, k) {
                    let f = SystemState::from_configuration(&c, Fsync);
                    let s = SystemState { model: Ssync, ..f.clone() };
                    let ssync = outcome_set(&e, &s);
                    if !outcome_set(&e, &f).is_subset(&ssync) {
                        return Err(format!("{} {c}: an FSYNC step is not an SSYNC step", a.name));
                    }
                    fs += 1;
                    if a.name == "FT3" {
                        continue;
                    }
                    let asy = SystemState { model: Async, ..f.clone() };
                    for choice in e.choices(&s) {
                        let AdversaryChoice::Ssync { moves } = &choice else { unreachable!() };
                        let target = e.apply_unchecked(&s, &choice).erased();
                        let movers: Vec<usize> = moves.iter().map(|m| m.robot).collect();
                        if !async_reaches(&e, &asy, &movers, &target) {
                            return Err(format!("{} {c}: SSYNC step {choice:?} has no ASYNC counterpart", a.name));
                        }
                        sa += 1;
                    }
                }
            }
        }
    }
    Ok((fs, sa))
}

fn properties(tally: &mut Tally) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let c = random_configuration(&mut rng);
        let back = Configuration::parse(&c.to_string(), Some(c.n())).map_err(|e| e.to_string())?;
        if back != c {
            return Err(format!("round trip changed {c} into {back}"));
        }
    }
    let algs: Vec<Algorithm> = ["FP2", "FT3", "AP3", "AT4"].iter().map(|n| builtin_algorithm(n).unwrap()).collect();
    let equiv = equivariance(&algs)?;
    let (fs, sa) = inclusions(&algs)?;
    // reachable graphs reject any step that changes the robot count, so every transition
    // counted above was checked
    if tally.fails != tally.replayed {
        return Err(format!("{} of {} witnesses replayed", tally.replayed, tally.fails));
    }
    Ok(format!(
        "1000 round trips; {equiv} states equivariant; {fs} FSYNC-in-SSYNC, {sa} SSYNC steps simulated in ASYNC \
         (FP2, AP3, AT4); {} transitions conserve robots; {} witnesses replay",
        tally.transitions, tally.replayed
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, Check); 9] = [
        (1, "FP2 perpetual from G,W, FSYNC, n=3..10", Duration::from_secs(1), fp2_perpetual),
        (2, "FP2 universality audit, FSYNC, n=6..10, k=2", Duration::from_secs(10), fp2_universality),
        (3, "FT3 terminating from its initials and color swaps, FSYNC, n=3..10", Duration::from_secs(10), ft3_terminating),
        (4, "AP3 perpetual from its initials, ASYNC, n=3..8", Duration::from_secs(60), ap3_async),
        (5, "AP3 universality audit, SSYNC, n=9, k=3", Duration::from_secs(120), ap3_universality),
        (6, "AT4 terminating from its initials and color swaps, ASYNC, n=5..8", Duration::from_secs(300), at4_terminating),
        (7, "progressing rule cycles over R1..R14", Duration::from_secs(1), rule_cycles),
        (8, "negative spot checks", Duration::from_secs(5), negative_checks),
        (9, "property suites", Duration::from_secs(120), properties),
    ];
    let mut tally = Tally::default();
    let mut unexpected = 0;
    for (id, title, budget, check) in criteria {
        let started = Instant::now();
        let result = check(&mut tally);
        let took = started.elapsed();
        let (pass, detail) = match result {
            Ok(d) if took <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget")),
            Err(e) => (false, e),
        };
        let verdict = if pass { "PASS" } else { "FAIL" };
        let note = if !pass && KNOWN_FINDINGS.contains(&id) { " [known finding]" } else { "" };
        println!("{verdict} criterion {id}: {title} ({:.3} s, budget {} s){note}", took.as_secs_f64(), budget.as_secs());
        println!("     {detail}");
        if !pass && note.is_empty() {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
