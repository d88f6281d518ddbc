use serde::Serialize;
use std::fmt;

/// LTL over numbered propositions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ltl {
    True,
    False,
    Atom(usize),
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Iff(Box<Ltl>, Box<Ltl>),
    Xor(Box<Ltl>, Box<Ltl>),
    Always(Box<Ltl>),
    Eventually(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

impl Ltl {
    pub fn not(a: Ltl) -> Ltl {
        Ltl::Not(Box::new(a))
    }
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }
    pub fn always(a: Ltl) -> Ltl {
        Ltl::Always(Box::new(a))
    }
    pub fn eventually(a: Ltl) -> Ltl {
        Ltl::Eventually(Box::new(a))
    }
    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    /// Largest atom index plus one.
    pub fn atom_count(&self) -> usize {
        match self {
            Ltl::True | Ltl::False => 0,
            Ltl::Atom(i) => i + 1,
            Ltl::Not(a) | Ltl::Always(a) | Ltl::Eventually(a) => a.atom_count(),
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Iff(a, b)
            | Ltl::Xor(a, b)
            | Ltl::Until(a, b)
            | Ltl::Release(a, b) => a.atom_count().max(b.atom_count()),
        }
    }

    pub fn temporal_count(&self) -> usize {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => 0,
            Ltl::Not(a) => a.temporal_count(),
            Ltl::Always(a) | Ltl::Eventually(a) => 1 + a.temporal_count(),
            Ltl::Until(a, b) | Ltl::Release(a, b) => {
                1 + a.temporal_count() + b.temporal_count()
            }
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Implies(a, b) | Ltl::Iff(a, b) | Ltl::Xor(a, b) => {
                a.temporal_count() + b.temporal_count()
            }
        }
    }

    /// True when negation appears only directly above atoms and no
    /// implication, equivalence or exclusive-or remains.
    pub fn is_nnf(&self) -> bool {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom(_) => true,
            Ltl::Not(a) => matches!(**a, Ltl::Atom(_)),
            Ltl::Implies(..) | Ltl::Iff(..) | Ltl::Xor(..) => false,
            Ltl::Always(a) | Ltl::Eventually(a) => a.is_nnf(),
            Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::Until(a, b) | Ltl::Release(a, b) => {
                a.is_nnf() && b.is_nnf()
            }
        }
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ltl::True => f.write_str("true"),
            Ltl::False => f.write_str("false"),
            Ltl::Atom(i) => write!(f, "p{i}"),
            Ltl::Not(a) => write!(f, "!{a}"),
            Ltl::And(a, b) => write!(f, "({a} & {b})"),
            Ltl::Or(a, b) => write!(f, "({a} | {b})"),
            Ltl::Implies(a, b) => write!(f, "({a} -> {b})"),
            Ltl::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Ltl::Xor(a, b) => write!(f, "({a} ^ {b})"),
            Ltl::Always(a) => write!(f, "G {a}"),
            Ltl::Eventually(a) => write!(f, "F {a}"),
            Ltl::Until(a, b) => write!(f, "({a} U {b})"),
            Ltl::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}

/// Negation normal form.
pub fn to_nnf(f: &Ltl) -> Ltl {
    nnf(f, false)
}

fn nnf(f: &Ltl, neg: bool) -> Ltl {
    match (f, neg) {
        (Ltl::True, false) | (Ltl::False, true) => Ltl::True,
        (Ltl::True, true) | (Ltl::False, false) => Ltl::False,
        (Ltl::Atom(i), false) => Ltl::Atom(*i),
        (Ltl::Atom(i), true) => Ltl::not(Ltl::Atom(*i)),
        (Ltl::Not(a), _) => nnf(a, !neg),
        (Ltl::And(a, b), false) | (Ltl::Or(a, b), true) => Ltl::and(nnf(a, neg), nnf(b, neg)),
        (Ltl::Or(a, b), false) | (Ltl::And(a, b), true) => Ltl::or(nnf(a, neg), nnf(b, neg)),
        (Ltl::Implies(a, b), false) => Ltl::or(nnf(a, true), nnf(b, false)),
        (Ltl::Implies(a, b), true) => Ltl::and(nnf(a, false), nnf(b, true)),
        (Ltl::Iff(a, b), false) | (Ltl::Xor(a, b), true) => Ltl::or(
            Ltl::and(nnf(a, false), nnf(b, false)),
            Ltl::and(nnf(a, true), nnf(b, true)),
        ),
        (Ltl::Xor(a, b), false) | (Ltl::Iff(a, b), true) => Ltl::or(
            Ltl::and(nnf(a, false), nnf(b, true)),
            Ltl::and(nnf(a, true), nnf(b, false)),
        ),
        (Ltl::Always(a), false) | (Ltl::Eventually(a), true) => Ltl::always(nnf(a, neg)),
        (Ltl::Eventually(a), false) | (Ltl::Always(a), true) => Ltl::eventually(nnf(a, neg)),
        (Ltl::Until(a, b), false) | (Ltl::Release(a, b), true) => Ltl::until(nnf(a, neg), nnf(b, neg)),
        (Ltl::Release(a, b), false) | (Ltl::Until(a, b), true) => {
            Ltl::release(nnf(a, neg), nnf(b, neg))
        }
    }
}
