//! Naive list model of the sequence operations and a random driver.

use asm_check_core::gts::Value;
use asm_check_core::seq::{apply, SeqOp};
use rand::rngs::StdRng;
use rand::Rng;
use std::sync::Arc;

/// Expected result of `op`, or `None` where the operation must fail.
pub fn naive(op: SeqOp, s: &[i64], x: i64, y: i64, t: &[i64]) -> Option<Naive> {
    let len = s.len() as i64;
    let list = |v: Vec<i64>| Some(Naive::List(v));
    match op {
        SeqOp::Create => list(vec![x, y]),
        SeqOp::Length => Some(Naive::Int(len)),
        SeqOp::IsEmpty => Some(Naive::Bool(s.is_empty())),
        SeqOp::Contains => Some(Naive::Bool(s.iter().any(|&e| e == x))),
        SeqOp::Count => Some(Naive::Int(s.iter().filter(|&&e| e == x).count() as i64)),
        SeqOp::IndexOf => {
            let mut i = 0;
            while i < s.len() && s[i] != x {
                i += 1;
            }
            Some(Naive::Int(if i == s.len() { -1 } else { i as i64 }))
        }
        SeqOp::First => s.first().map(|&e| Naive::Int(e)),
        SeqOp::Last => s.last().map(|&e| Naive::Int(e)),
        SeqOp::At => (0 <= x && x < len).then(|| Naive::Int(s[x as usize])),
        SeqOp::Tail => (!s.is_empty()).then(|| Naive::List(s.iter().skip(1).copied().collect())),
        SeqOp::Union => list(s.iter().chain(t).copied().collect()),
        SeqOp::SubSequence => (0 <= x && x <= y && y <= len)
            .then(|| Naive::List((x..y).map(|i| s[i as usize]).collect())),
        SeqOp::Append => list(s.iter().copied().chain([x]).collect()),
        SeqOp::Prepend => list([x].into_iter().chain(s.iter().copied()).collect()),
        SeqOp::InsertAt => (0 <= x && x <= len).then(|| {
            let mut v = Vec::new();
            for (i, &e) in s.iter().enumerate() {
                if i as i64 == x {
                    v.push(y);
                }
                v.push(e);
            }
            if x == len {
                v.push(y);
            }
            Naive::List(v)
        }),
        SeqOp::ReplaceAt => (0 <= x && x < len).then(|| {
            Naive::List(s.iter().enumerate().map(|(i, &e)| if i as i64 == x { y } else { e }).collect())
        }),
        SeqOp::Excluding => {
            let mut done = false;
            list(s.iter().copied().filter(|&e| if !done && e == x { done = true; false } else { true }).collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Naive {
    Int(i64),
    Bool(bool),
    List(Vec<i64>),
}

pub fn to_value(s: &[i64]) -> Value {
    Value::Seq(Arc::new(s.iter().map(|&i| Value::Int(i)).collect()))
}

pub fn from_value(v: &Value) -> Naive {
    match v {
        Value::Int(i) => Naive::Int(*i),
        Value::Bool(b) => Naive::Bool(*b),
        Value::Seq(items) => Naive::List(
            items
                .iter()
                .map(|x| match x {
                    Value::Int(i) => *i,
                    other => panic!("unexpected element {other:?}"),
                })
                .collect(),
        ),
        other => panic!("unexpected result {other:?}"),
    }
}

/// Arguments in the implementation's calling convention.
pub fn args(op: SeqOp, s: &[i64], x: i64, y: i64, t: &[i64]) -> Vec<Value> {
    let (sv, xv, yv) = (to_value(s), Value::Int(x), Value::Int(y));
    match op {
        SeqOp::Create => vec![xv, yv],
        SeqOp::Length | SeqOp::IsEmpty | SeqOp::First | SeqOp::Last | SeqOp::Tail => vec![sv],
        SeqOp::Prepend => vec![xv, sv],
        SeqOp::Union => vec![sv, to_value(t)],
        SeqOp::SubSequence | SeqOp::InsertAt | SeqOp::ReplaceAt => vec![sv, xv, yv],
        _ => vec![sv, xv],
    }
}

/// Runs one random sequence of up to `steps` operations starting from a
/// random list. Sequence-valued results become the next operand. Returns
/// the first disagreement.
pub fn run_random(rng: &mut StdRng, steps: usize) -> Result<usize, String> {
    let mut s: Vec<i64> = (0..rng.gen_range(0..=8)).map(|_| rng.gen_range(0..4)).collect();
    let mut checked = 0;
    for _ in 0..steps {
        let op = SeqOp::ALL[rng.gen_range(0..SeqOp::ALL.len())];
        let x = rng.gen_range(-1..=s.len() as i64 + 1);
        let y = rng.gen_range(-1..=s.len() as i64 + 1);
        let t: Vec<i64> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..4)).collect();
        let expected = naive(op, &s, x, y, &t);
        let got = apply(op, &args(op, &s, x, y, &t)).ok().map(|v| from_value(&v));
        if expected != got {
            return Err(format!("{op:?} on {s:?} with x={x} y={y} t={t:?}: expected {expected:?}, got {got:?}"));
        }
        checked += 1;
        if let Some(Naive::List(next)) = got {
            if next.len() <= 16 {
                s = next;
            }
        }
    }
    Ok(checked)
}
