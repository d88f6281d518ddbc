//! Sequence operations against a naive list model.

mod support;

use asm_check_core::gts::Value;
use asm_check_core::seq::{apply, SeqOp};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use support::seq_oracle::{from_value, run_random, to_value, Naive};

const SEED: u64 = 0x5e9_0001;

#[test]
fn thousand_random_sequences_agree() {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut ops = 0;
    for _ in 0..1000 {
        ops += run_random(&mut rng, 12).unwrap();
    }
    assert_eq!(ops, 12_000);
}

fn list(v: Value) -> Vec<i64> {
    match from_value(&v) {
        Naive::List(l) => l,
        other => panic!("{other:?}"),
    }
}

fn int(v: Value) -> i64 {
    match from_value(&v) {
        Naive::Int(i) => i,
        other => panic!("{other:?}"),
    }
}

fn seqs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..5, 0..=16)
}

proptest! {
    #[test]
    fn union_length_adds(a in seqs(), b in seqs()) {
        let u = apply(SeqOp::Union, &[to_value(&a), to_value(&b)]).unwrap();
        prop_assert_eq!(int(apply(SeqOp::Length, &[u]).unwrap()), (a.len() + b.len()) as i64);
    }

    #[test]
    fn full_subsequence_is_identity(s in seqs()) {
        let n = Value::Int(s.len() as i64);
        let sub = apply(SeqOp::SubSequence, &[to_value(&s), Value::Int(0), n]).unwrap();
        prop_assert_eq!(list(sub), s);
    }

    #[test]
    fn tail_is_subsequence_from_one(s in prop::collection::vec(0i64..5, 1..=16)) {
        let n = Value::Int(s.len() as i64);
        let tail = apply(SeqOp::Tail, &[to_value(&s)]).unwrap();
        let sub = apply(SeqOp::SubSequence, &[to_value(&s), Value::Int(1), n]).unwrap();
        prop_assert_eq!(list(tail), list(sub));
    }

    #[test]
    fn excluding_undoes_fresh_append(s in seqs(), x in 5i64..9) {
        let appended = apply(SeqOp::Append, &[to_value(&s), Value::Int(x)]).unwrap();
        let back = apply(SeqOp::Excluding, &[appended, Value::Int(x)]).unwrap();
        prop_assert_eq!(list(back), s);
    }

    #[test]
    fn operands_are_not_mutated(s in seqs(), x in 0i64..5) {
        let v = to_value(&s);
        for op in [SeqOp::Append, SeqOp::Prepend, SeqOp::Excluding] {
            let args = if op == SeqOp::Prepend { vec![Value::Int(x), v.clone()] } else { vec![v.clone(), Value::Int(x)] };
            let _ = apply(op, &args);
        }
        prop_assert_eq!(list(v), s);
    }
}
