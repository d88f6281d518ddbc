//! Emptiness check of the product of the state graph with a Büchi automaton
//! for the negated property.

use super::graph::StateGraph;
use crate::gts::{eval_bool, Expr, System};
use crate::ltl::BuchiAutomaton;

/// A lasso over state-graph indices: `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

/// Atom bitmask of every state. Evaluation errors are returned with the
/// offending state index.
pub fn labels(sys: &System, g: &StateGraph, props: &[(String, Expr)]) -> Result<Vec<u64>, (usize, String)> {
    assert!(props.len() <= 64, "at most 64 propositions per property");
    g.states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut m = 0u64;
            for (k, (name, e)) in props.iter().enumerate() {
                match eval_bool(sys, e, &s.vals) {
                    Ok(true) => m |= 1 << k,
                    Ok(false) => {}
                    Err(err) => return Err((i, format!("proposition {name}: {err}"))),
                }
            }
            Ok(m)
        })
        .collect()
}

struct Product<'a> {
    g: &'a StateGraph,
    a: &'a BuchiAutomaton,
    labels: &'a [u64],
}

impl Product<'_> {
    fn nq(&self) -> usize {
        self.a.state_count()
    }

    fn node(&self, s: usize, q: usize) -> usize {
        s * self.nq() + q
    }

    fn succ(&self, n: usize) -> Vec<usize> {
        let (s, q) = (n / self.nq(), n % self.nq());
        let next_states: &[usize] = if self.g.succ[s].is_empty() { std::slice::from_ref(&s) } else { &self.g.succ[s] };
        let mut out = Vec::new();
        for &t in &self.a.out[q] {
            let tr = &self.a.transitions[t];
            if tr.label.matches(self.labels[s]) {
                out.extend(next_states.iter().map(|&s2| self.node(s2, tr.to)));
            }
        }
        out
    }

    fn accepting(&self, n: usize) -> bool {
        self.a.accepting[n % self.nq()]
    }
}

/// Nested depth-first search; returns an accepting lasso if one exists.
pub fn find_lasso(g: &StateGraph, a: &BuchiAutomaton, labels: &[u64]) -> Option<Lasso> {
    let p = Product { g, a, labels };
    let total = g.states.len() * p.nq();
    let mut blue = vec![false; total];
    let mut red = vec![false; total];
    let mut on_stack = vec![false; total];

    let roots: Vec<usize> = g.initial.iter().flat_map(|&s| a.initial.iter().map(move |&q| (s, q))).map(|(s, q)| p.node(s, q)).collect();
    for root in roots {
        if blue[root] {
            continue;
        }
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        blue[root] = true;
        on_stack[root] = true;
        stack.push((root, p.succ(root), 0));
        while let Some(top) = stack.last_mut() {
            if top.2 < top.1.len() {
                let m = top.1[top.2];
                top.2 += 1;
                if !blue[m] {
                    blue[m] = true;
                    on_stack[m] = true;
                    let succ = p.succ(m);
                    stack.push((m, succ, 0));
                }
                continue;
            }
            let n = top.0;
            if p.accepting(n) {
                if let Some(red_path) = red_search(&p, n, &mut red, &on_stack) {
                    let blue_path: Vec<usize> = stack.iter().map(|f| f.0).collect();
                    return Some(lasso_from(&p, &blue_path, &red_path));
                }
            }
            on_stack[n] = false;
            stack.pop();
        }
    }
    None
}

/// Inner search from accepting `seed` for a node on the outer stack. The
/// returned path starts after `seed` and ends on the stack node.
fn red_search(p: &Product, seed: usize, red: &mut [bool], on_stack: &[bool]) -> Option<Vec<usize>> {
    let mut stack: Vec<(usize, Vec<usize>, usize)> = vec![(seed, p.succ(seed), 0)];
    red[seed] = true;
    while let Some(top) = stack.last_mut() {
        if top.2 < top.1.len() {
            let m = top.1[top.2];
            top.2 += 1;
            if on_stack[m] {
                let mut path: Vec<usize> = stack.iter().skip(1).map(|f| f.0).collect();
                path.push(m);
                return Some(path);
            }
            if !red[m] {
                red[m] = true;
                let succ = p.succ(m);
                stack.push((m, succ, 0));
            }
            continue;
        }
        stack.pop();
    }
    None
}

fn lasso_from(p: &Product, blue: &[usize], red: &[usize]) -> Lasso {
    let target = *red.last().expect("non-empty red path");
    let k = blue.iter().position(|&n| n == target).expect("target on the outer stack");
    let st = |n: &usize| n / p.nq();
    let prefix = blue[..k].iter().map(st).collect();
    let mut cycle: Vec<usize> = blue[k..].iter().map(st).collect();
    cycle.extend(red[..red.len() - 1].iter().map(st));
    canonical(Lasso { prefix, cycle })
}

/// Shortest equivalent lasso: the cycle starts as early as possible and is
/// not a repetition of a shorter cycle.
pub fn canonical(mut l: Lasso) -> Lasso {
    while let (Some(a), Some(b)) = (l.prefix.last(), l.cycle.last()) {
        if a != b {
            break;
        }
        l.prefix.pop();
        l.cycle.rotate_right(1);
    }
    let n = l.cycle.len();
    if let Some(d) = (1..n).find(|&d| n % d == 0 && (d..n).all(|i| l.cycle[i] == l.cycle[i - d])) {
        l.cycle.truncate(d);
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_rolls_prefix_into_cycle() {
        let l = canonical(Lasso { prefix: vec![0, 1, 2, 3], cycle: vec![1, 2, 3, 1, 2, 3] });
        assert_eq!(l, Lasso { prefix: vec![0], cycle: vec![1, 2, 3] });
    }

    #[test]
    fn canonical_keeps_distinct_cycle() {
        let l = canonical(Lasso { prefix: vec![5], cycle: vec![6, 7] });
        assert_eq!(l, Lasso { prefix: vec![5], cycle: vec![6, 7] });
    }
}
