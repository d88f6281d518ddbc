//! Exploration, verdicts and counterexamples.

mod support;

use asm_check_core::checker::{explore, labels, successors, Limits, StateGraph};
use asm_check_core::gts::System;
use asm_check_core::{check, read_bir_text, CheckOptions, CheckReport, Outcome};
use proptest::prelude::*;
use serde_json::Value as Json;
use std::collections::BTreeMap;
use support::ltl_oracle::{holds, Lasso};
use support::*;

fn manifests() -> Vec<(String, Json)> {
    let mut out: Vec<(String, Json)> = std::fs::read_dir(fixture_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.ok()?.path();
            let name = p.file_name()?.to_str()?.to_string();
            name.ends_with(".expected.json")
                .then(|| (name, serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn outcome_name(o: &Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::Violated => "violated",
        Outcome::Error(_) => "error",
    }
}

fn run(sys: &System) -> CheckReport {
    check(sys, &CheckOptions { deadlock: true, ..Default::default() }).unwrap()
}

#[test]
fn every_fixture_has_a_manifest() {
    let names: Vec<String> = manifests().into_iter().map(|(_, m)| m["model"].as_str().unwrap().to_string()).collect();
    for e in std::fs::read_dir(fixture_dir()).unwrap() {
        let p = e.unwrap().path();
        if matches!(p.extension().and_then(|x| x.to_str()), Some("asm" | "bir")) {
            let n = p.file_name().unwrap().to_str().unwrap().to_string();
            assert!(names.contains(&n), "{n} has no manifest");
        }
    }
}

#[test]
fn manifests_match_the_checker() {
    for (file, m) in manifests() {
        if m["model"] == "ticTacToe_simulator.asm" && cfg!(debug_assertions) {
            continue;
        }
        let sys = load(m["model"].as_str().unwrap());
        let r = run(&sys);
        assert_eq!(r.stats.states as u64, m["states"].as_u64().unwrap(), "{file}");
        assert_eq!(r.stats.transitions as u64, m["transitions"].as_u64().unwrap(), "{file}");
        assert_eq!(outcome_name(&r.deadlock.as_ref().unwrap().outcome), m["deadlock"], "{file}");
        assert_eq!(r.errors_found() as u64, m["errors_found"].as_u64().unwrap(), "{file}");
        let got: BTreeMap<&str, &str> = r.properties.iter().map(|v| (v.name.as_str(), outcome_name(&v.outcome))).collect();
        let want: BTreeMap<&str, &str> =
            m["properties"].as_object().unwrap().iter().map(|(k, v)| (k.as_str(), v.as_str().unwrap())).collect();
        assert_eq!(got, want, "{file}");
    }
}

fn x_values(sys: &System, states: &[asm_check_core::StateVector]) -> Vec<i64> {
    let x = sys.var("x").unwrap();
    states
        .iter()
        .map(|s| match &s.vals[x] {
            asm_check_core::gts::Value::Int(i) => *i,
            other => panic!("{other:?}"),
        })
        .collect()
}

#[test]
fn collatz_counterexample_is_exact() {
    let expected = [100, 50, 25, 76, 38, 19, 58, 29, 88, 44, 22, 11, 34, 17, 52, 26, 13, 40, 20, 10, 5, 16, 8, 4, 2, 1];
    for model in ["collatz.bir", "collatz.asm"] {
        let sys = load(model);
        let r = run(&sys);
        let fail = r.properties.iter().find(|v| v.name == "fail").unwrap();
        assert_eq!(fail.outcome, Outcome::Violated);
        let t = fail.trace.as_ref().unwrap();
        assert_eq!(x_values(&sys, &t.states), expected, "{model}");
        let l = t.loop_start.unwrap();
        assert_eq!(x_values(&sys, &t.states[l..=l]), [4], "{model}");
        let text = t.render(&sys);
        assert!(text.lines().last().unwrap().starts_with("27. repetitive state x = 4"), "{text}");
        assert_eq!(r.properties.iter().find(|v| v.name == "hold").unwrap().outcome, Outcome::Holds);
    }
}

fn is_successor(sys: &System, a: &asm_check_core::StateVector, b: &asm_check_core::StateVector) -> bool {
    successors(sys, a).states.contains(b)
}

#[test]
fn traces_replay() {
    for model in ["collatz.bir", "collatz.asm", "ferryman.asm"] {
        let sys = load(model);
        let init = asm_check_core::checker::initial_states(&sys).states;
        for v in run(&sys).properties {
            let Some(t) = v.trace else { continue };
            assert!(init.contains(&t.states[0]), "{model}/{}", v.name);
            for w in t.states.windows(2) {
                assert!(is_successor(&sys, &w[0], &w[1]), "{model}/{}", v.name);
            }
            if let Some(l) = t.loop_start {
                let last = t.states.last().unwrap();
                assert!(is_successor(&sys, last, &t.states[l]), "{model}/{}: cycle does not close", v.name);
            }
        }
    }
}

#[test]
fn ferryman_solution_trace() {
    let sys = load("ferryman.asm");
    let r = run(&sys);
    assert_eq!(r.errors_found(), 1);
    let v = r.properties.iter().find(|v| v.name == "ltl_noSolution").unwrap();
    let t = v.trace.as_ref().unwrap();
    let pos = |s: &asm_check_core::StateVector, who: &str| s.vals[sys.var(&format!("{who}.position")).unwrap()].plain(&sys);
    let last = t.states.last().unwrap();
    for who in ["ferryman", "goat", "cabbage", "wolf"] {
        assert_eq!(pos(last, who), "RIGHT", "{who}");
    }
    for s in &t.states {
        let (f, g, c, w) = (pos(s, "ferryman"), pos(s, "goat"), pos(s, "cabbage"), pos(s, "wolf"));
        assert!(g != c || g == f, "cabbage eaten in {s:?}");
        assert!(w != g || w == f, "goat eaten in {s:?}");
    }
}

/// Violation by brute force: every lasso through the state graph whose
/// stem and loop together visit at most `bound` positions.
fn brute_force_violated(g: &StateGraph, lab: &[u64], f: &asm_check_core::ltl::Ltl, bound: usize) -> bool {
    let succ = |i: usize| if g.succ[i].is_empty() { vec![i] } else { g.succ[i].clone() };
    let mut stack: Vec<Vec<usize>> = g.initial.iter().map(|&i| vec![i]).collect();
    let mut paths = 0usize;
    while let Some(path) = stack.pop() {
        paths += 1;
        assert!(paths < 2_000_000, "brute force bound too large");
        let last = *path.last().unwrap();
        for n in succ(last) {
            for (k, &p) in path.iter().enumerate() {
                if p == n {
                    let t = Lasso {
                        prefix: path[..k].iter().map(|&i| lab[i]).collect(),
                        cycle: path[k..].iter().map(|&i| lab[i]).collect(),
                    };
                    if !holds(f, &t, 0) {
                        return true;
                    }
                }
            }
            if path.len() < bound {
                let mut q = path.clone();
                q.push(n);
                stack.push(q);
            }
        }
    }
    false
}

#[test]
fn verdicts_match_brute_force_lassos() {
    for model in ["checkAxiomAndProperty.asm", "subsetDomain.asm", "collatz.asm", "collatz.bir", "ferryman.asm"] {
        let sys = load(model);
        let g = explore(&sys, &Limits::default());
        let r = run(&sys);
        for p in &sys.properties {
            let lab = labels(&sys, &g, &p.props).unwrap();
            let bad = brute_force_violated(&g, &lab, &p.formula, g.states.len() + 1);
            let v = r.properties.iter().find(|v| v.name == p.name).unwrap();
            assert_eq!(v.outcome == Outcome::Violated, bad, "{model}/{}", p.name);
        }
    }
}

#[test]
fn seen_set_accounting() {
    for model in ["criticalSectionProblem.asm", "diningPhilosophers.asm", "sluiceGateControl.asm", "collatz.bir"] {
        let sys = load(model);
        let g = explore(&sys, &Limits::default());
        let arrivals = g.initial.len() + g.succ.iter().map(Vec::len).sum::<usize>();
        assert_eq!(g.stats.transitions, arrivals - g.initial.len(), "{model}");
        assert_eq!(g.stats.states + g.stats.matched_states, arrivals, "{model}");
        assert_eq!(g.index.len(), g.states.len(), "{model}: a state was stored twice");
    }
}

#[test]
fn runs_are_deterministic() {
    for model in ["ferryman.asm", "criticalSectionProblem.asm", "collatz.bir"] {
        let sys = load(model);
        let (a, b) = (run(&sys), run(&sys));
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.properties, b.properties, "{model}");
        assert_eq!(a.deadlock, b.deadlock, "{model}");
    }
}

const SELF_LOOP: &str = r#"system Loop {
  fun ltl_p() returns boolean = LTL.temporalProperty(Property.createObservableDictionary(Property.createObservableKey("P1", x==1)), LTL.always(LTL.prop("P1")));//ltl_p:= g(x = 1)

  int x := INIT;//controlled

  active thread MAIN() {
    loc loc0:
      do { } goto loc0;
  }
}
"#;

#[test]
fn self_loop_satisfies_always_iff_initially() {
    for (init, expected) in [(1, Outcome::Holds), (2, Outcome::Violated)] {
        let sys = read_bir_text(&SELF_LOOP.replace("INIT", &init.to_string())).unwrap();
        let r = run(&sys);
        assert_eq!(r.stats.states, 1);
        assert_eq!(r.properties[0].outcome, expected, "x = {init}");
    }
}

#[test]
fn state_limit_is_reported_as_exhaustion() {
    let sys = load("criticalSectionProblem.asm");
    let opts = CheckOptions { limits: Limits { max_states: Some(10), ..Default::default() }, deadlock: true, property: None };
    let r = check(&sys, &opts).unwrap();
    assert!(r.exhausted.is_some());
    assert!(!r.all_good());
    assert!(r.properties.iter().all(|v| matches!(v.outcome, Outcome::Error(_))));
}

#[test]
fn single_property_selection() {
    let sys = load("ferryman.asm");
    let opts = CheckOptions { deadlock: false, property: Some("ltl_goatIsSecure".into()), ..Default::default() };
    let r = check(&sys, &opts).unwrap();
    assert_eq!(r.properties.len(), 1);
    assert!(r.deadlock.is_none());
    assert!(check(&sys, &CheckOptions { property: Some("nope".into()), ..Default::default() }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Random start values of the hand-written Collatz system: the trace
    /// always reaches 1 and loops on 4, 2, 1.
    #[test]
    fn collatz_from_any_start(start in 2i64..300) {
        let text = fixture_text("collatz.bir").replace("int x := 100;", &format!("int x := {start};"));
        let sys = read_bir_text(&text).unwrap();
        let r = run(&sys);
        let fail = r.properties.iter().find(|v| v.name == "fail").unwrap();
        prop_assert_eq!(&fail.outcome, &Outcome::Violated);
        let t = fail.trace.as_ref().unwrap();
        let xs = x_values(&sys, &t.states);
        prop_assert_eq!(xs[0], start);
        prop_assert_eq!(*xs.last().unwrap(), 1);
        for w in t.states.windows(2) {
            prop_assert!(is_successor(&sys, &w[0], &w[1]));
        }
    }
}
