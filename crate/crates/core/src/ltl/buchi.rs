//! Tableau translation of NNF formulas to Büchi automata.
//!
//! A tableau node is the set of obligations the remaining trace must meet.
//! Expanding a node yields transitions labelled with the literals that must
//! hold in the current position, plus the obligations passed on. Each
//! until-like subformula contributes one acceptance set (the transitions that
//! did not postpone it); the sets are merged with a level counter.

use super::formula::Ltl;
use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    /// Propositions required true.
    pub pos: Vec<usize>,
    /// Propositions required false.
    pub neg: Vec<usize>,
}

impl Label {
    pub fn matches(&self, atoms: u64) -> bool {
        self.pos.iter().all(|&p| atoms >> p & 1 == 1) && self.neg.iter().all(|&p| atoms >> p & 1 == 0)
    }
}

#[derive(Clone, Debug)]
pub struct Transition {
    pub from: usize,
    pub label: Label,
    pub to: usize,
}

#[derive(Clone, Debug)]
pub struct BuchiAutomaton {
    /// Human-readable obligations of each state, with its acceptance level.
    pub states: Vec<String>,
    pub initial: Vec<usize>,
    pub transitions: Vec<Transition>,
    pub accepting: Vec<bool>,
    /// Outgoing transition indices per state.
    pub out: Vec<Vec<usize>>,
}

impl BuchiAutomaton {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Line-oriented dump: one `state` line per state, then one line per
    /// transition.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (i, name) in self.states.iter().enumerate() {
            let init = if self.initial.contains(&i) { " initial" } else { "" };
            let acc = if self.accepting[i] { " accepting" } else { "" };
            let _ = writeln!(s, "state {i}{init}{acc} {name}");
        }
        for t in &self.transitions {
            let mut lits: Vec<String> = t.label.pos.iter().map(|p| format!("p{p}")).collect();
            lits.extend(t.label.neg.iter().map(|p| format!("!p{p}")));
            let lits = if lits.is_empty() { "true".to_string() } else { lits.join(" & ") };
            let _ = writeln!(s, "{} -> {} : {lits}", t.from, t.to);
        }
        s
    }

    /// Does the automaton accept the lasso `prefix · cycle^ω`, given as atom
    /// bitmasks per position?
    pub fn accepts_lasso(&self, prefix: &[u64], cycle: &[u64]) -> bool {
        assert!(!cycle.is_empty());
        let n = prefix.len() + cycle.len();
        let pos_next = |i: usize| if i + 1 < n { i + 1 } else { prefix.len() };
        let atoms_at = |i: usize| if i < prefix.len() { prefix[i] } else { cycle[i - prefix.len()] };
        // product graph nodes (position, state)
        let idx = |i: usize, q: usize| i * self.states.len() + q;
        let total = n * self.states.len();
        let mut succ = vec![Vec::new(); total];
        for i in 0..n {
            for q in 0..self.states.len() {
                for &t in &self.out[q] {
                    let tr = &self.transitions[t];
                    if tr.label.matches(atoms_at(i)) {
                        succ[idx(i, q)].push(idx(pos_next(i), tr.to));
                    }
                }
            }
        }
        let mut reach = vec![false; total];
        let mut stack: Vec<usize> = self.initial.iter().map(|&q| idx(0, q)).collect();
        for &s in &stack {
            reach[s] = true;
        }
        while let Some(v) = stack.pop() {
            for &w in &succ[v] {
                if !reach[w] {
                    reach[w] = true;
                    stack.push(w);
                }
            }
        }
        // an accepting reachable node lying on a cycle
        (0..total).any(|v| {
            if !reach[v] || !self.accepting[v % self.states.len()] {
                return false;
            }
            let mut seen = vec![false; total];
            let mut stack = succ[v].clone();
            while let Some(w) = stack.pop() {
                if w == v {
                    return true;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.extend(succ[w].iter().copied());
                }
            }
            false
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Until(usize, usize),
    Release(usize, usize),
    Always(usize),
    Eventually(usize),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    ids: HashMap<Node, usize>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> usize {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        self.nodes.push(n.clone());
        self.ids.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn add(&mut self, f: &Ltl) -> usize {
        let n = match f {
            Ltl::True => Node::True,
            Ltl::False => Node::False,
            Ltl::Atom(p) => Node::Lit(*p, true),
            Ltl::Not(a) => match **a {
                Ltl::Atom(p) => Node::Lit(p, false),
                _ => panic!("formula is not in negation normal form"),
            },
            Ltl::And(a, b) => Node::And(self.add(a), self.add(b)),
            Ltl::Or(a, b) => Node::Or(self.add(a), self.add(b)),
            Ltl::Until(a, b) => Node::Until(self.add(a), self.add(b)),
            Ltl::Release(a, b) => Node::Release(self.add(a), self.add(b)),
            Ltl::Always(a) => Node::Always(self.add(a)),
            Ltl::Eventually(a) => Node::Eventually(self.add(a)),
            Ltl::Implies(..) | Ltl::Iff(..) | Ltl::Xor(..) => {
                panic!("formula is not in negation normal form")
            }
        };
        self.intern(n)
    }

    fn show(&self, id: usize) -> String {
        match &self.nodes[id] {
            Node::True => "true".into(),
            Node::False => "false".into(),
            Node::Lit(p, true) => format!("p{p}"),
            Node::Lit(p, false) => format!("!p{p}"),
            Node::And(a, b) => format!("({} & {})", self.show(*a), self.show(*b)),
            Node::Or(a, b) => format!("({} | {})", self.show(*a), self.show(*b)),
            Node::Until(a, b) => format!("({} U {})", self.show(*a), self.show(*b)),
            Node::Release(a, b) => format!("({} R {})", self.show(*a), self.show(*b)),
            Node::Always(a) => format!("G {}", self.show(*a)),
            Node::Eventually(a) => format!("F {}", self.show(*a)),
        }
    }
}

/// One expansion result: literals now, obligations next, postponed untils.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cover {
    lits: BTreeSet<(usize, bool)>,
    next: BTreeSet<usize>,
    postponed: BTreeSet<usize>,
}

fn expand(arena: &Arena, todo: Vec<usize>, cover: Cover, out: &mut BTreeSet<Cover>) {
    let mut todo = todo;
    let mut cover = cover;
    while let Some(f) = todo.pop() {
        match arena.nodes[f] {
            Node::True => {}
            Node::False => return,
            Node::Lit(p, v) => {
                if cover.lits.contains(&(p, !v)) {
                    return;
                }
                cover.lits.insert((p, v));
            }
            Node::And(a, b) => {
                todo.push(a);
                todo.push(b);
            }
            Node::Always(a) => {
                todo.push(a);
                cover.next.insert(f);
            }
            Node::Or(a, b) => {
                let mut left = todo.clone();
                left.push(a);
                expand(arena, left, cover.clone(), out);
                todo.push(b);
            }
            Node::Eventually(a) => {
                let mut now = todo.clone();
                now.push(a);
                expand(arena, now, cover.clone(), out);
                cover.next.insert(f);
                cover.postponed.insert(f);
            }
            Node::Until(a, b) => {
                let mut now = todo.clone();
                now.push(b);
                expand(arena, now, cover.clone(), out);
                todo.push(a);
                cover.next.insert(f);
                cover.postponed.insert(f);
            }
            Node::Release(a, b) => {
                let mut both = todo.clone();
                both.push(a);
                both.push(b);
                expand(arena, both, cover.clone(), out);
                todo.push(b);
                cover.next.insert(f);
            }
        }
    }
    out.insert(cover);
}

/// Builds an automaton accepting exactly the traces that satisfy `f`, which
/// must be in negation normal form.
pub fn to_buchi(f: &Ltl) -> BuchiAutomaton {
    let mut arena = Arena::default();
    let root = arena.add(f);
    let untils: Vec<usize> = (0..arena.nodes.len())
        .filter(|&i| matches!(arena.nodes[i], Node::Until(..) | Node::Eventually(_)))
        .collect();
    let k = untils.len();

    // generalized automaton over obligation sets
    let mut gstates: Vec<BTreeSet<usize>> = vec![BTreeSet::from([root])];
    let mut gindex: HashMap<BTreeSet<usize>, usize> = HashMap::from([(gstates[0].clone(), 0)]);
    // (label, target, acceptance mask)
    let mut gtrans: Vec<Vec<(Label, usize, u64)>> = Vec::new();
    let mut i = 0;
    while i < gstates.len() {
        let mut covers = BTreeSet::new();
        expand(&arena, gstates[i].iter().copied().collect(), empty_cover(), &mut covers);
        let mut ts = Vec::new();
        for c in covers {
            let target = match gindex.get(&c.next) {
                Some(&t) => t,
                None => {
                    gstates.push(c.next.clone());
                    gindex.insert(c.next.clone(), gstates.len() - 1);
                    gstates.len() - 1
                }
            };
            let mut mask = 0u64;
            for (bit, u) in untils.iter().enumerate() {
                if !c.postponed.contains(u) {
                    mask |= 1 << bit;
                }
            }
            let label = Label {
                pos: c.lits.iter().filter(|l| l.1).map(|l| l.0).collect(),
                neg: c.lits.iter().filter(|l| !l.1).map(|l| l.0).collect(),
            };
            ts.push((label, target, mask));
        }
        gtrans.push(ts);
        i += 1;
    }

    // degeneralize with a level counter 0..=k; level k is accepting
    let advance = |level: usize, mask: u64| {
        let mut j = if level == k { 0 } else { level };
        while j < k && mask >> j & 1 == 1 {
            j += 1;
        }
        j
    };
    let mut states: Vec<(usize, usize)> = vec![(0, 0)];
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
    let mut transitions = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (g, level) = states[i];
        let mut outs = Vec::new();
        for (label, target, mask) in &gtrans[g] {
            let key = (*target, advance(level, *mask));
            let to = match index.get(&key) {
                Some(&t) => t,
                None => {
                    states.push(key);
                    index.insert(key, states.len() - 1);
                    states.len() - 1
                }
            };
            outs.push(transitions.len());
            transitions.push(Transition { from: i, label: label.clone(), to });
        }
        out.push(outs);
        i += 1;
    }

    let names = states
        .iter()
        .map(|(g, level)| {
            let obl: Vec<String> = gstates[*g].iter().map(|&n| arena.show(n)).collect();
            format!("{{{}}}/{level}", obl.join(", "))
        })
        .collect();
    BuchiAutomaton {
        states: names,
        initial: vec![0],
        accepting: states.iter().map(|&(_, level)| level == k).collect(),
        transitions,
        out,
    }
}

fn empty_cover() -> Cover {
    Cover { lits: BTreeSet::new(), next: BTreeSet::new(), postponed: BTreeSet::new() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::to_nnf;

    #[test]
    fn always_p_has_one_state() {
        let a = to_buchi(&Ltl::always(Ltl::Atom(0)));
        assert_eq!(a.state_count(), 1);
        assert!(a.accepting[0]);
        assert_eq!(a.transitions.len(), 1);
        assert_eq!(a.transitions[0].label, Label { pos: vec![0], neg: vec![] });
        assert_eq!(a.transitions[0].to, 0);
    }

    #[test]
    fn eventually_q_has_two_states() {
        let a = to_buchi(&Ltl::eventually(Ltl::Atom(1)));
        assert_eq!(a.state_count(), 2);
        assert_eq!(a.accepting.iter().filter(|x| **x).count(), 1);
        assert!(!a.accepting[0]);
    }

    #[test]
    fn negated_fail_accepts_positive_lasso() {
        // p: x > 0, q: x < 0; the formula G(p -> F q) is violated on a
        // lasso where p holds forever and q never does.
        let fail = Ltl::always(Ltl::Implies(Box::new(Ltl::Atom(0)), Box::new(Ltl::eventually(Ltl::Atom(1)))));
        let a = to_buchi(&to_nnf(&Ltl::not(fail)));
        assert!(a.accepts_lasso(&[0b01, 0b01], &[0b01, 0b01, 0b01]));
        assert!(!a.accepts_lasso(&[], &[0b01, 0b10]));
    }

    #[test]
    fn dump_lists_states_and_edges() {
        let d = to_buchi(&Ltl::always(Ltl::Atom(0))).dump();
        assert_eq!(d, "state 0 initial accepting {G p0}/0\n0 -> 0 : p0\n");
    }
}
