//! Visible-step semantics of a guarded transition system.
//!
//! A visible step runs the main thread from its current location through
//! invisible commands until a visible command fires, resets temporaries, and
//! then lets every active auxiliary thread fire one enabled command.

use crate::gts::*;
use serde::Serialize;

/// Longest run of invisible commands accepted inside one visible step.
pub const MAX_CHAIN: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StepError {
    /// Thread and location of the failing command.
    pub at: String,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct Successors {
    pub states: Vec<StateVector>,
    pub errors: Vec<StepError>,
}

fn at(sys: &System, t: ThreadId, l: u32) -> String {
    let th = &sys.threads[t];
    format!("{}.{}", th.name, th.locations[l as usize].label)
}

/// Enabled commands of thread `t` in `s`; guard errors are recorded.
fn enabled<'a>(sys: &'a System, t: ThreadId, s: &StateVector, errors: &mut Vec<StepError>) -> Vec<&'a GuardedCmd> {
    let loc = &sys.threads[t].locations[s.locs[t] as usize];
    let mut out = Vec::new();
    for c in &loc.commands {
        match c.guard.as_ref().map(|g| eval_bool(sys, g, &s.vals)) {
            None | Some(Ok(true)) => out.push(c),
            Some(Ok(false)) => {}
            Some(Err(e)) => errors.push(StepError { at: at(sys, t, s.locs[t]), message: e.to_string() }),
        }
    }
    out
}

/// Main-thread chains from `s`, each ending with a visible command.
fn main_chains(sys: &System, s: &StateVector, out: &mut Successors) -> Vec<StateVector> {
    let mut finished = Vec::new();
    let mut stack = vec![(s.clone(), 0usize)];
    while let Some((st, steps)) = stack.pop() {
        let cmds = enabled(sys, 0, &st, &mut out.errors);
        let mut next = Vec::new();
        for c in cmds {
            match apply_command(sys, 0, c, &st) {
                Ok(n) if c.visible => finished.push(n),
                Ok(n) if steps < MAX_CHAIN => next.push((n, steps + 1)),
                Ok(_) => out.errors.push(StepError {
                    at: at(sys, 0, st.locs[0]),
                    message: format!("more than {MAX_CHAIN} invisible steps without a visible command"),
                }),
                Err(e) => out.errors.push(StepError { at: at(sys, 0, st.locs[0]), message: e.to_string() }),
            }
        }
        // keep declaration order for the depth-first walk
        stack.extend(next.into_iter().rev());
    }
    finished
}

fn reset_temps(sys: &System, s: &mut StateVector) {
    for (i, v) in sys.variables.iter().enumerate() {
        if v.kind == VarKind::Temp {
            s.vals[i] = sys.default_value(&v.ty);
        }
    }
}

/// Every active auxiliary thread fires one enabled command; a thread with
/// nothing enabled keeps its state.
fn aux_round(sys: &System, states: Vec<StateVector>, errors: &mut Vec<StepError>) -> Vec<StateVector> {
    let mut cur = states;
    for t in 1..sys.threads.len() {
        let mut next = Vec::with_capacity(cur.len());
        for s in cur {
            if !s.active[t] {
                next.push(s);
                continue;
            }
            let cmds = enabled(sys, t, &s, errors);
            if cmds.is_empty() {
                next.push(s);
                continue;
            }
            for c in cmds {
                match apply_command(sys, t, c, &s) {
                    Ok(n) => next.push(n),
                    Err(e) => errors.push(StepError { at: at(sys, t, s.locs[t]), message: e.to_string() }),
                }
            }
        }
        cur = next;
    }
    cur
}

fn dedup(states: Vec<StateVector>) -> Vec<StateVector> {
    let mut seen = std::collections::HashSet::new();
    states.into_iter().filter(|s| seen.insert(s.clone())).collect()
}

pub fn initial_states(sys: &System) -> Successors {
    let mut out = Successors::default();
    let raw = StateVector::raw(sys);
    let main_init = sys.threads.first().and_then(|t| t.locations.first()).is_some_and(|l| l.init);
    let mut start = if main_init { main_chains(sys, &raw, &mut out) } else { vec![raw] };
    for s in &mut start {
        reset_temps(sys, s);
    }
    out.states = dedup(aux_round(sys, start, &mut out.errors));
    out
}

pub fn successors(sys: &System, s: &StateVector) -> Successors {
    let mut out = Successors::default();
    if sys.threads.is_empty() || !s.active[0] {
        return out;
    }
    let mut ends = main_chains(sys, s, &mut out);
    for e in &mut ends {
        reset_temps(sys, e);
    }
    out.states = dedup(aux_round(sys, ends, &mut out.errors));
    out
}
