//! Linear temporal logic: formulas, normal form and automata.

pub mod buchi;
pub mod formula;

pub use buchi::{to_buchi, BuchiAutomaton, Label, Transition};
pub use formula::{to_nnf, Ltl};

/// Automaton for the negation of `f`, as used for emptiness checking.
pub fn negated_automaton(f: &Ltl) -> BuchiAutomaton {
    to_buchi(&to_nnf(&Ltl::not(f.clone())))
}
