//! Reachable visible-state graph.

use super::step::{initial_states, successors, StepError};
use crate::gts::{StateVector, System};
use dashmap::DashMap;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Limits {
    pub max_states: Option<usize>,
    pub max_depth: Option<usize>,
    pub max_time: Option<Duration>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub transitions: usize,
    pub states: usize,
    pub matched_states: usize,
    pub max_depth: usize,
}

/// Runtime error found while expanding `state`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorRecord {
    pub state: Option<usize>,
    pub error: StepError,
}

#[derive(Clone, Debug, Default)]
pub struct StateGraph {
    pub states: Vec<StateVector>,
    pub index: HashMap<StateVector, usize>,
    pub succ: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
    pub initial: Vec<usize>,
    pub errors: Vec<ErrorRecord>,
    pub stats: Stats,
    /// Set when a limit stopped the exploration early.
    pub exhausted: Option<String>,
}

impl StateGraph {
    fn add(&mut self, s: StateVector, parent: Option<usize>) -> (usize, bool) {
        if let Some(&i) = self.index.get(&s) {
            return (i, false);
        }
        let i = self.states.len();
        self.index.insert(s.clone(), i);
        self.states.push(s);
        self.succ.push(Vec::new());
        self.parent.push(parent);
        let d = parent.map_or(0, |p| self.depth[p] + 1);
        self.depth.push(d);
        self.stats.max_depth = self.stats.max_depth.max(d);
        (i, true)
    }

    /// Path of state indices from an initial state to `i`.
    pub fn path_to(&self, i: usize) -> Vec<usize> {
        let mut path = vec![i];
        let mut cur = i;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// First state without successors, in exploration order.
    pub fn deadlock(&self) -> Option<usize> {
        if self.exhausted.is_some() {
            return None;
        }
        (0..self.states.len()).find(|&i| self.succ[i].is_empty())
    }
}

/// Depth-first exploration of all visible states.
pub fn explore(sys: &System, limits: &Limits) -> StateGraph {
    let started = Instant::now();
    let mut g = StateGraph::default();
    let init = initial_states(sys);
    g.errors.extend(init.errors.into_iter().map(|error| ErrorRecord { state: None, error }));
    let mut arrivals = 0;
    for s in init.states {
        arrivals += 1;
        let (i, _) = g.add(s, None);
        g.initial.push(i);
    }
    let mut stack: Vec<usize> = g.initial.iter().rev().copied().collect();
    let mut expanded = vec![false; g.states.len()];
    let mut steps = 0usize;
    while let Some(i) = stack.pop() {
        if expanded.get(i).copied().unwrap_or(false) {
            continue;
        }
        if let Some(max) = limits.max_depth {
            if g.depth[i] >= max {
                g.exhausted = Some(format!("depth bound {max} reached"));
                continue;
            }
        }
        steps += 1;
        if steps % 256 == 0 {
            if let Some(t) = limits.max_time {
                if started.elapsed() > t {
                    g.exhausted = Some(format!("time bound of {}s reached", t.as_secs_f64()));
                    break;
                }
            }
        }
        let next = successors(sys, &g.states[i]);
        g.errors.extend(next.errors.into_iter().map(|error| ErrorRecord { state: Some(i), error }));
        let mut kids = Vec::with_capacity(next.states.len());
        let mut fresh = Vec::new();
        for s in next.states {
            if limits.max_states.is_some_and(|m| g.states.len() >= m) && !g.index.contains_key(&s) {
                g.exhausted = Some(format!("state bound {} reached", g.states.len()));
                continue;
            }
            arrivals += 1;
            let (k, new) = g.add(s, Some(i));
            kids.push(k);
            if new {
                fresh.push(k);
            }
        }
        g.stats.transitions += kids.len();
        g.succ[i] = kids;
        expanded.resize(g.states.len(), false);
        expanded[i] = true;
        stack.extend(fresh.into_iter().rev());
    }
    g.stats.states = g.states.len();
    g.stats.matched_states = arrivals - g.states.len();
    g
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReachOutcome {
    pub states: usize,
    pub transitions: usize,
    pub deadlocks: usize,
    pub errors: usize,
    pub exhausted: bool,
}

/// Level-synchronous reachability over a shared seen-set. Answers deadlock
/// and runtime-error questions only.
pub fn explore_parallel(sys: &System, limits: &Limits) -> ReachOutcome {
    let started = Instant::now();
    let seen: DashMap<StateVector, ()> = DashMap::new();
    let init = initial_states(sys);
    let mut out = ReachOutcome { errors: init.errors.len(), ..Default::default() };
    let mut frontier: Vec<StateVector> = init.states.into_iter().filter(|s| seen.insert(s.clone(), ()).is_none()).collect();
    let mut depth = 0;
    while !frontier.is_empty() {
        if limits.max_depth.is_some_and(|m| depth >= m)
            || limits.max_states.is_some_and(|m| seen.len() >= m)
            || limits.max_time.is_some_and(|t| started.elapsed() > t)
        {
            out.exhausted = true;
            break;
        }
        let results: Vec<(usize, usize, bool, Vec<StateVector>)> = frontier
            .par_iter()
            .map(|s| {
                let next = successors(sys, s);
                let n = next.states.len();
                let fresh = next.states.into_iter().filter(|t| seen.insert(t.clone(), ()).is_none()).collect();
                (n, next.errors.len(), n == 0, fresh)
            })
            .collect();
        frontier = Vec::new();
        for (n, e, dead, fresh) in results {
            out.transitions += n;
            out.errors += e;
            out.deadlocks += dead as usize;
            frontier.extend(fresh);
        }
        depth += 1;
    }
    out.states = seen.len();
    out
}
