//! Explicit-state exploration: deadlock detection, LTL verification and
//! counterexample traces.

mod graph;
mod ndfs;
mod step;
mod trace;

pub use graph::{explore, explore_parallel, ErrorRecord, Limits, ReachOutcome, StateGraph, Stats};
pub use ndfs::{canonical, find_lasso, labels, Lasso};
pub use step::{initial_states, successors, StepError, Successors, MAX_CHAIN};
pub use trace::{state_line, Trace};

use crate::gts::{PropertyDef, System};
use crate::ltl::negated_automaton;
use serde::Serialize;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "reason", rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Violated,
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub decl_text: String,
    pub outcome: Outcome,
    pub trace: Option<Trace>,
}

#[derive(Clone, Debug, Default)]
pub struct CheckOptions {
    pub limits: Limits,
    pub deadlock: bool,
    /// Check only the named property.
    pub property: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub system: String,
    pub stats: Stats,
    pub deadlock: Option<Verdict>,
    pub properties: Vec<Verdict>,
    pub errors: Vec<ErrorRecord>,
    pub exhausted: Option<String>,
}

impl CheckReport {
    pub fn errors_found(&self) -> usize {
        let bad = |v: &Verdict| v.outcome != Outcome::Holds;
        self.errors.len() + self.deadlock.iter().filter(|v| bad(v)).count() + self.properties.iter().filter(|v| bad(v)).count()
    }

    /// Everything held, nothing deadlocked and no runtime error occurred.
    pub fn all_good(&self) -> bool {
        self.errors_found() == 0 && self.exhausted.is_none()
    }

    /// Console report in the classic checker layout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "asm-check explicit-state model checker");
        let _ = writeln!(out, "Checking system {}", self.system);
        let s = &self.stats;
        let _ = writeln!(
            out,
            "Transitions: {}, States: {}, Matched States: {}, Max Depth: {}, Errors found: {}, Used Memory: {}MB",
            s.transitions,
            s.states,
            s.matched_states,
            s.max_depth,
            self.errors_found(),
            used_memory_mb()
        );
        if let Some(reason) = &self.exhausted {
            let _ = writeln!(out, "** bound exhausted: {reason}");
        }
        for e in &self.errors {
            let _ = writeln!(out, "** error at {}: {}", e.error.at, e.error.message);
        }
        let mut traces = 0;
        let mut trace_note = |out: &mut String, v: &Verdict| {
            if v.trace.is_some() {
                let _ = writeln!(out, "Generating error trace {traces}...");
                traces += 1;
            }
        };
        if let Some(d) = &self.deadlock {
            match &d.outcome {
                Outcome::Holds => {
                    let _ = writeln!(out, "** {} is not in DEADLOCK", self.system);
                }
                Outcome::Violated => {
                    let _ = writeln!(out, "** {} is in DEADLOCK", self.system);
                }
                Outcome::Error(r) => {
                    let _ = writeln!(out, "** {} deadlock check inconclusive: {r}", self.system);
                }
            }
            trace_note(&mut out, d);
        }
        for v in &self.properties {
            let verdict = match &v.outcome {
                Outcome::Holds => "true".to_string(),
                Outcome::Violated => "false".to_string(),
                Outcome::Error(r) => format!("unknown ({r})"),
            };
            let _ = writeln!(out, "**LTLSPEC NAME {} is {verdict}", v.decl_text);
            trace_note(&mut out, v);
        }
        let _ = writeln!(out, "Done!");
        out
    }

    /// Structured form of the report.
    pub fn to_json(&self, sys: &System) -> serde_json::Value {
        let verdict = |v: &Verdict| {
            serde_json::json!({
                "name": v.name,
                "decl": v.decl_text,
                "outcome": v.outcome,
                "trace": v.trace.as_ref().map(|t| t.to_json(sys)),
            })
        };
        serde_json::json!({
            "system": self.system,
            "stats": self.stats,
            "errors_found": self.errors_found(),
            "exhausted": self.exhausted,
            "errors": self.errors,
            "deadlock": self.deadlock.as_ref().map(verdict),
            "properties": self.properties.iter().map(verdict).collect::<Vec<_>>(),
        })
    }

    /// Traces in the order they are announced by [`CheckReport::render`].
    pub fn traces(&self) -> Vec<(&str, &Trace)> {
        self.deadlock
            .iter()
            .chain(&self.properties)
            .filter_map(|v| v.trace.as_ref().map(|t| (v.name.as_str(), t)))
            .collect()
    }
}

/// Peak resident set size in MB from `/proc`, or 0 when unavailable.
pub fn used_memory_mb() -> u64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("VmHWM:"))
                .and_then(|l| l.split_whitespace().nth(1))
                .and_then(|kb| kb.parse::<u64>().ok())
        })
        .map_or(0, |kb| kb / 1024)
}

pub fn deadlock_verdict(sys: &System, g: &StateGraph) -> Verdict {
    let name = sys.name.clone();
    let (outcome, trace) = if let Some(r) = &g.exhausted {
        (Outcome::Error(format!("bound exhausted: {r}")), None)
    } else if let Some(d) = g.deadlock() {
        let states = g.path_to(d).into_iter().map(|i| g.states[i].clone()).collect();
        (Outcome::Violated, Some(Trace { states, loop_start: None }))
    } else {
        (Outcome::Holds, None)
    };
    Verdict { decl_text: name.clone(), name, outcome, trace }
}

pub fn check_ltl(sys: &System, g: &StateGraph, p: &PropertyDef) -> Verdict {
    let mut v = Verdict { name: p.name.clone(), decl_text: p.decl_text.clone(), outcome: Outcome::Holds, trace: None };
    if let Some(r) = &g.exhausted {
        v.outcome = Outcome::Error(format!("bound exhausted: {r}"));
        return v;
    }
    let lab = match labels(sys, g, &p.props) {
        Ok(l) => l,
        Err((_, msg)) => {
            v.outcome = Outcome::Error(msg);
            return v;
        }
    };
    let automaton = negated_automaton(&p.formula);
    if let Some(l) = find_lasso(g, &automaton, &lab) {
        let loop_start = Some(l.prefix.len());
        let states = l.prefix.iter().chain(&l.cycle).map(|&i| g.states[i].clone()).collect();
        v.outcome = Outcome::Violated;
        v.trace = Some(Trace { states, loop_start });
    }
    v
}

pub fn check(sys: &System, opts: &CheckOptions) -> Result<CheckReport, String> {
    let props: Vec<&PropertyDef> = match &opts.property {
        Some(name) => match sys.properties.iter().find(|p| &p.name == name) {
            Some(p) => vec![p],
            None => return Err(format!("no property named `{name}`")),
        },
        None => sys.properties.iter().collect(),
    };
    let g = explore(sys, &opts.limits);
    let deadlock = opts.deadlock.then(|| deadlock_verdict(sys, &g));
    let properties = props.into_iter().map(|p| check_ltl(sys, &g, p)).collect();
    Ok(CheckReport {
        system: sys.name.clone(),
        stats: g.stats,
        deadlock,
        properties,
        errors: distinct_errors(&g.errors),
        exhausted: g.exhausted.clone(),
    })
}

/// First occurrence of each distinct error.
fn distinct_errors(errors: &[ErrorRecord]) -> Vec<ErrorRecord> {
    let mut seen = std::collections::HashSet::new();
    errors.iter().filter(|e| seen.insert(&e.error)).cloned().collect()
}
