//! Automaton verdicts against direct LTL semantics on every small lasso.

mod support;

use asm_check_core::ltl::{negated_automaton, to_buchi, to_nnf, Ltl};
use support::ltl_oracle::{all_formulas, all_lassos, holds};

const MAX_NODES: usize = 5;

#[test]
fn formula_enumeration_covers_the_bound() {
    let fs = all_formulas(2, MAX_NODES, 2);
    assert!(fs.iter().all(|f| f.temporal_count() <= 2 && f.atom_count() <= 2));
    assert!(fs.iter().any(|f| f.temporal_count() == 2));
    assert!(fs.len() > 1000, "{}", fs.len());
    assert_eq!(all_lassos(2, 4).len(), 4 + 2 * 16 + 3 * 64 + 4 * 256);
}

#[test]
fn automata_agree_with_semantics_on_all_small_lassos() {
    let lassos = all_lassos(2, 4);
    for f in all_formulas(2, MAX_NODES, 2) {
        let a = to_buchi(&to_nnf(&f));
        for t in &lassos {
            assert_eq!(a.accepts_lasso(&t.prefix, &t.cycle), holds(&f, t, 0), "{f} on {t:?}");
        }
    }
}

#[test]
fn negated_automaton_accepts_exactly_the_violations() {
    let lassos = all_lassos(2, 3);
    for f in all_formulas(2, 4, 2) {
        let a = negated_automaton(&f);
        for t in &lassos {
            assert_eq!(a.accepts_lasso(&t.prefix, &t.cycle), !holds(&f, t, 0), "{f} on {t:?}");
        }
    }
}

#[test]
fn nnf_preserves_semantics() {
    let lassos = all_lassos(2, 4);
    for f in all_formulas(2, MAX_NODES, 2) {
        let n = to_nnf(&f);
        assert!(n.is_nnf(), "{n}");
        for t in &lassos {
            assert_eq!(holds(&f, t, 0), holds(&n, t, 0), "{f} vs {n} on {t:?}");
        }
    }
}

#[test]
fn negated_response_normal_form() {
    let (p, q) = (Ltl::Atom(0), Ltl::Atom(1));
    let f = Ltl::not(Ltl::always(Ltl::Implies(Box::new(p.clone()), Box::new(Ltl::eventually(q.clone())))));
    let expected = Ltl::eventually(Ltl::and(p, Ltl::always(Ltl::not(q))));
    let lassos = all_lassos(2, 3);
    let n = to_nnf(&f);
    for t in &lassos {
        assert_eq!(holds(&n, t, 0), holds(&expected, t, 0), "{t:?}");
    }
}
