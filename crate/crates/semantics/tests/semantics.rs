use std::collections::BTreeSet;

use proptest::prelude::*;
use ring_core::{parse_algorithm, Algorithm, Color, Configuration, Palette, Symmetry};
use ring_semantics::*;

use SchedulerModel::{Async, Fsync, Ssync};

const FP2: &str = "0GW : . | (G) | W :: G, left\n0WG : . | (W) | G :: W, right\n";
const FT3: &str = "0GW : . | (G) | W :: G, left\n0WG : . | (W) | G :: W, right\n\
                   0WW : . | (W) | W :: G, stay\nGWW : G | (W) | W :: W, left\nGWG : G | (W) | G :: W, either\n";
const AP3: &str = "0GW : . | (G) | W :: G, right\n0TW : . | G(W) | W :: G, right\n\
                   0TG : . | W(G) | G :: W, left\n0WG : . | (W) | G :: W, right\n";

fn alg(text: &str) -> Algorithm {
    parse_algorithm(text).unwrap()
}

fn state(text: &str, n: usize, model: SchedulerModel) -> SystemState {
    SystemState::from_configuration(&Configuration::parse(text, Some(n)).unwrap(), model)
}

fn shown(s: &SystemState) -> String {
    s.render(&Palette::default())
}

#[test]
fn enabled_robot_examples() {
    assert_eq!(enabled_robots(&state("W,W,G", 5, Async), &alg(AP3)), vec![2]);
    assert!(enabled_robots(&state("G,.,.,G", 6, Fsync), &alg(FP2)).is_empty());
    assert!(enabled_robots(&state("G", 6, Fsync), &alg(FP2)).is_empty());
}

#[test]
fn successor_examples() {
    let fp2 = alg(FP2);
    let out = successors(&state("G,W", 6, Fsync), &fp2);
    assert_eq!(out.len(), 1);
    assert_eq!(shown(&out[0].1), "W,.,.,.,.,G");

    let ft3 = alg(FT3);
    let e = Engine::new(&ft3);
    let s = state("G,W,G", 7, Fsync);
    let outcomes: Vec<String> = e.choices(&s).iter().map(|c| shown(&e.apply_unchecked(&s, c))).collect();
    assert_eq!(outcomes, vec!["W,.,.,G,.,.,G", ".,.,W,G,.,.,G"]);
    // the two outcomes are mirror images, so only one survives deduplication
    assert_eq!(successors(&s, &ft3).len(), 1);

    let ap3 = alg(AP3);
    let s = state(".,WG,W", 5, Async);
    let out = successors(&s, &ap3);
    let lc: Vec<&SystemState> = out
        .iter()
        .filter(|(c, _)| matches!(c, AdversaryChoice::AsyncLc { mv } if ap3.rules[mv.rule].label == "0TW"))
        .map(|(_, s)| s)
        .collect();
    assert_eq!(lc.len(), 1);
    // the tower's W turns G and heads for the lone W
    assert_eq!(shown(lc[0]), ".,GG,W,.,. pending r1+");
}

#[test]
fn apply_choice_examples() {
    let fp2 = alg(FP2);
    let e = Engine::new(&fp2);
    let s = state("G,W", 6, Fsync);
    let next = e.apply_choice(&s, &choice_from_text("fsync r0- r1-", &s, &e).unwrap()).unwrap();
    assert_eq!(shown(&next), "W,.,.,.,.,G");

    let s = state("G,W", 6, Ssync);
    let next = e.apply_choice(&s, &choice_from_text("ssync r0-", &s, &e).unwrap()).unwrap();
    assert_eq!(shown(&next), ".,W,.,.,.,G");
    assert!(e.apply_choice(&s, &choice_from_text("fsync r0- r1-", &state("G,W", 6, Fsync), &e).unwrap()).is_err());

    // a stale move still lands, even onto a node that became occupied
    let ap3 = alg(AP3);
    let e = Engine::new(&ap3);
    let mut s = state("W,W,G", 6, Async);
    for text in ["lc r2-", "m r2"] {
        s = e.apply_choice(&s, &choice_from_text(text, &s, &e).unwrap()).unwrap();
    }
    assert_eq!(shown(&s), "W,GW,.,.,.,.");
    let s = SystemState {
        robots: vec![
            RobotState { node: 0, color: Color(1), phase: Phase::Pending(Dir::Plus) },
            RobotState { node: 1, color: Color(1), phase: Phase::Idle },
        ],
        ..state("W,W", 6, Async)
    };
    let next = e.apply_choice(&s, &AdversaryChoice::AsyncM { robot: 0 }).unwrap();
    assert_eq!(shown(&next), ".,WW,.,.,.,.");
}

#[test]
fn quiescence_examples() {
    assert!(is_quiescent(&state("G,.,.,G", 6, Fsync), &alg(FP2)));
    let mut s = state("W,W", 6, Async);
    s.robots[0].phase = Phase::Pending(Dir::Minus);
    assert!(!is_quiescent(&s, &alg(FP2)));
    let fp2 = alg(FP2);
    let e = Engine::new(&fp2);
    let trace = simulate(&state("G,.,.,G", 6, Fsync), &e, &Policy::Random { seed: 3 }, 50).unwrap();
    assert!(trace.is_empty());
}

/// W W W, then the outer robots turn G, then the G W pair and the other G walk apart.
#[test]
fn three_robot_terminating_run() {
    let ft3 = alg(FT3);
    let e = Engine::new(&ft3);
    for n in [5, 7] {
        let mut finals = BTreeSet::new();
        for middle in ["r1-", "r1+"] {
            let script = vec!["fsync r0. r2.".to_string(), format!("fsync r0- {middle} r2+")];
            let start = state("W,W,W", n, Fsync);
            let head = simulate(&start, &e, &Policy::Scripted(script), 10).unwrap();
            let text = trace_text(&head, &e, &Palette::default());
            let lines: Vec<&str> = text.lines().collect();
            assert!(lines[0].ends_with(&format!("W,W,W{}", ",.".repeat(n - 3))));
            assert!(lines[1].ends_with(&format!("G,W,G{}", ",.".repeat(n - 3))));
            let tail = simulate(head.last(), &e, &Policy::First, 4 * n).unwrap();
            let end = tail.last();
            assert!(e.is_quiescent(end), "n={n} {middle}");
            let mut visited = head.coverage().last().copied().unwrap();
            visited |= tail.coverage().last().copied().unwrap();
            assert_eq!(visited, full_mask(n));
            finals.insert(ring_core::canonicalize(&end.configuration(&Palette::default())).0);
        }
        // either choice of the middle robot leads to the same final shape
        assert_eq!(finals.len(), 1);
    }
}

#[test]
fn three_robot_perpetual_run_covers_the_ring() {
    let ap3 = alg(AP3);
    let e = Engine::new(&ap3);
    for seed in 0..20 {
        for model in [Ssync, Async] {
            let trace = simulate(&state("W,W,G", 5, model), &e, &Policy::Random { seed }, 50).unwrap();
            assert_eq!(trace.len(), 50);
            assert!(trace.covers_ring(), "seed {seed} {model:?}");
            trace.replay(&e).unwrap();
        }
    }
}

#[test]
fn trace_records_track_coverage() {
    let fp2 = alg(FP2);
    let e = Engine::new(&fp2);
    let trace = simulate(&state("G,W", 4, Fsync), &e, &Policy::First, 3).unwrap();
    let records = trace_records(&trace, &e, &Palette::default());
    let coverage: Vec<&str> = records.iter().map(|r| r.coverage.as_str()).collect();
    assert_eq!(coverage, vec!["1100", "1101", "1111", "1111"]);
    assert_eq!(records[1].choice.as_deref(), Some("fsync r0-@0GW r1-@0WG"));
    let json = trace_json(&trace, &e, &Palette::default());
    assert_eq!(json.as_array().unwrap().len(), 4);
}

/// Simultaneous Looks are not expressible once Look and Compute are fused: the second
/// W already sees the first one's new color.
#[test]
fn fused_look_compute_misses_simultaneous_recoloring() {
    let ft3 = alg(FT3);
    let e = Engine::new(&ft3);
    let s = state("W,W", 6, Ssync);
    let both = choice_from_text("ssync r0.@0WW r1.@0WW", &s, &e).unwrap();
    assert_eq!(shown(&e.apply_unchecked(&s, &both)), "G,G,.,.,.,.");
    let a = state("W,W", 6, Async);
    let first = e.apply_unchecked(&a, &choice_from_text("lc r0.", &a, &e).unwrap());
    assert!(e.options(&first, 1).iter().all(|&(rule, _)| ft3.rules[rule].label == "0WG"));
}

fn builtin_texts() -> [&'static str; 3] {
    [FP2, FT3, AP3]
}

fn arb_state() -> impl Strategy<Value = SystemState> {
    (3usize..=7, proptest::collection::vec((0usize..7, 0u8..2, 0u8..4), 1..=3), 0usize..3).prop_map(
        |(n, robots, model)| {
            let model = [Fsync, Ssync, Async][model];
            let robots = robots
                .into_iter()
                .map(|(node, c, p)| RobotState {
                    node: node % n,
                    color: Color(c),
                    phase: match (model, p) {
                        (Async, 1) => Phase::Pending(Dir::Minus),
                        (Async, 2) => Phase::Pending(Dir::Plus),
                        _ => Phase::Idle,
                    },
                })
                .collect();
            SystemState { n, model, robots }
        },
    )
}

fn outcomes(e: &Engine<'_>, s: &SystemState) -> BTreeSet<Vec<RobotState>> {
    e.choices(s).iter().map(|c| e.apply_unchecked(s, c).erased()).collect()
}

proptest! {
    #[test]
    fn successors_commute_with_symmetries(s in arb_state(), which in 0usize..3) {
        let a = alg(builtin_texts()[which]);
        let e = Engine::new(&a);
        let base = outcomes(&e, &s);
        for g in Symmetry::all(s.n) {
            let expected: BTreeSet<_> = base
                .iter()
                .map(|r| SystemState { robots: r.clone(), ..s.clone() }.apply_symmetry(&g).erased())
                .collect();
            prop_assert_eq!(outcomes(&e, &s.apply_symmetry(&g)), expected);
        }
        let swap = [Color(1), Color(0)];
        let swapped = a.map_colors(&swap).unwrap();
        let expected: BTreeSet<_> = base
            .iter()
            .map(|r| SystemState { robots: r.clone(), ..s.clone() }.map_colors(&swap).erased())
            .collect();
        prop_assert_eq!(outcomes(&Engine::new(&swapped), &s.map_colors(&swap)), expected);
    }

    #[test]
    fn steps_conserve_robots_and_move_at_most_one_node(s in arb_state(), which in 0usize..3) {
        let a = alg(builtin_texts()[which]);
        let e = Engine::new(&a);
        for c in e.choices(&s) {
            let next = e.apply_choice(&s, &c).unwrap();
            prop_assert_eq!(next.robots.len(), s.robots.len());
            for (before, after) in s.robots.iter().zip(&next.robots) {
                let d = (after.node + s.n - before.node) % s.n;
                prop_assert!(d == 0 || d == 1 || d == s.n - 1);
            }
        }
    }

    #[test]
    fn fsync_steps_are_ssync_steps(s in arb_state(), which in 0usize..3) {
        let a = alg(builtin_texts()[which]);
        let e = Engine::new(&a);
        let idle: Vec<RobotState> = s.robots.iter().map(|r| RobotState { phase: Phase::Idle, ..*r }).collect();
        let f = SystemState { model: Fsync, robots: idle.clone(), n: s.n };
        let ss = SystemState { model: Ssync, robots: idle, n: s.n };
        prop_assert!(outcomes(&e, &f).is_subset(&outcomes(&e, &ss)));
    }
}
