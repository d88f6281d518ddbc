//! Counterexample traces: numbered state listings and JSON export.

use crate::gts::{StateVector, System, VarKind};
use serde::Serialize;
use std::fmt::Write;

/// Visible states of a counterexample; `loop_start` marks where a lasso's
/// cycle begins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub states: Vec<StateVector>,
    pub loop_start: Option<usize>,
}

fn shown(sys: &System) -> impl Iterator<Item = usize> + '_ {
    sys.variables
        .iter()
        .enumerate()
        .filter(|(_, v)| matches!(v.kind, VarKind::Controlled | VarKind::Monitored))
        .map(|(i, _)| i)
}

/// `x = 100, y = 2 MAIN.loc1`
pub fn state_line(sys: &System, s: &StateVector) -> String {
    let vars: Vec<String> = shown(sys)
        .map(|i| format!("{} = {}", sys.variables[i].name, s.vals[i].plain(sys)))
        .collect();
    let main = &sys.threads[0];
    format!("{} {}.{}", vars.join(", "), main.name, main.locations[s.locs[0] as usize].label)
}

impl Trace {
    pub fn render(&self, sys: &System) -> String {
        let mut out = String::new();
        for (k, s) in self.states.iter().enumerate() {
            let _ = writeln!(out, "{}. {}", k + 1, state_line(sys, s));
        }
        if let Some(l) = self.loop_start {
            let _ = writeln!(out, "{}. repetitive state {}", self.states.len() + 1, state_line(sys, &self.states[l]));
        }
        out
    }

    pub fn to_json(&self, sys: &System) -> serde_json::Value {
        #[derive(Serialize)]
        struct JState {
            location: String,
            values: serde_json::Map<String, serde_json::Value>,
        }
        #[derive(Serialize)]
        struct JTrace {
            states: Vec<JState>,
            loop_start: Option<usize>,
        }
        let states = self
            .states
            .iter()
            .map(|s| {
                let main = &sys.threads[0];
                JState {
                    location: format!("{}.{}", main.name, main.locations[s.locs[0] as usize].label),
                    values: shown(sys)
                        .map(|i| (sys.variables[i].name.clone(), serde_json::Value::String(s.vals[i].plain(sys))))
                        .collect(),
                }
            })
            .collect();
        serde_json::to_value(JTrace { states, loop_start: self.loop_start }).expect("trace serializes")
    }
}
