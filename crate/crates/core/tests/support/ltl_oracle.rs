//! Recursive LTL semantics on ultimately periodic traces, plus exhaustive
//! enumeration of small formulas and lassos.

use asm_check_core::ltl::Ltl;

/// `prefix · cycle^ω` with one atom bitmask per position.
#[derive(Clone, Debug)]
pub struct Lasso {
    pub prefix: Vec<u64>,
    pub cycle: Vec<u64>,
}

impl Lasso {
    fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    fn next(&self, i: usize) -> usize {
        if i + 1 < self.len() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    fn atoms(&self, i: usize) -> u64 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[i - self.prefix.len()]
        }
    }

    /// Positions visited from `i` on, each once, in order.
    fn orbit(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        let mut j = self.next(i);
        while !out.contains(&j) {
            out.push(j);
            j = self.next(j);
        }
        out
    }
}

pub fn holds(f: &Ltl, t: &Lasso, i: usize) -> bool {
    match f {
        Ltl::True => true,
        Ltl::False => false,
        Ltl::Atom(p) => t.atoms(i) >> p & 1 == 1,
        Ltl::Not(a) => !holds(a, t, i),
        Ltl::And(a, b) => holds(a, t, i) && holds(b, t, i),
        Ltl::Or(a, b) => holds(a, t, i) || holds(b, t, i),
        Ltl::Implies(a, b) => !holds(a, t, i) || holds(b, t, i),
        Ltl::Iff(a, b) => holds(a, t, i) == holds(b, t, i),
        Ltl::Xor(a, b) => holds(a, t, i) != holds(b, t, i),
        Ltl::Always(a) => t.orbit(i).into_iter().all(|j| holds(a, t, j)),
        Ltl::Eventually(a) => t.orbit(i).into_iter().any(|j| holds(a, t, j)),
        Ltl::Until(a, b) => {
            for j in t.orbit(i) {
                if holds(b, t, j) {
                    return true;
                }
                if !holds(a, t, j) {
                    return false;
                }
            }
            false
        }
        Ltl::Release(a, b) => !holds(&Ltl::until(Ltl::not((**a).clone()), Ltl::not((**b).clone())), t, i),
    }
}

/// Every lasso of total length at most `max_len` over `atoms` propositions.
pub fn all_lassos(atoms: u32, max_len: usize) -> Vec<Lasso> {
    let letters = 1u64 << atoms;
    let mut out = Vec::new();
    for n in 1..=max_len {
        for c in 1..=n {
            let words = letters.pow(n as u32);
            for w in 0..words {
                let mut rest = w;
                let mut pos = Vec::with_capacity(n);
                for _ in 0..n {
                    pos.push(rest % letters);
                    rest /= letters;
                }
                let cycle = pos.split_off(n - c);
                out.push(Lasso { prefix: pos, cycle });
            }
        }
    }
    out
}

/// Formulas over atoms `0..atoms` with at most `max_nodes` nodes and at
/// most `max_temporal` temporal operators.
pub fn all_formulas(atoms: usize, max_nodes: usize, max_temporal: usize) -> Vec<Ltl> {
    let mut by_size: Vec<Vec<Ltl>> = vec![Vec::new(); max_nodes + 1];
    by_size[1] = (0..atoms).map(Ltl::Atom).collect();
    for n in 2..=max_nodes {
        let mut cur = Vec::new();
        for a in &by_size[n - 1] {
            cur.push(Ltl::not(a.clone()));
            cur.push(Ltl::always(a.clone()));
            cur.push(Ltl::eventually(a.clone()));
        }
        for k in 1..n - 1 {
            for a in &by_size[k] {
                for b in &by_size[n - 1 - k] {
                    let (a, b) = (Box::new(a.clone()), Box::new(b.clone()));
                    cur.push(Ltl::And(a.clone(), b.clone()));
                    cur.push(Ltl::Or(a.clone(), b.clone()));
                    cur.push(Ltl::Implies(a.clone(), b.clone()));
                    cur.push(Ltl::Iff(a.clone(), b.clone()));
                    cur.push(Ltl::Until(a.clone(), b.clone()));
                    cur.push(Ltl::Release(a, b));
                }
            }
        }
        cur.retain(|f| f.temporal_count() <= max_temporal);
        by_size[n] = cur;
    }
    by_size.concat()
}
