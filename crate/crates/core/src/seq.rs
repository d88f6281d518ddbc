//! Built-in sequence type.
//!
//! Positions are 0-based, `subSequence` is half-open, `indexOf` yields -1
//! when the element is absent and `excluding` drops the first occurrence.
//! Update operations return a new sequence; the caller stores it.

use crate::gts::Value;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum SeqOp {
    Create,
    Length,
    IsEmpty,
    Contains,
    Count,
    IndexOf,
    First,
    Last,
    At,
    Tail,
    Union,
    SubSequence,
    Append,
    Prepend,
    InsertAt,
    ReplaceAt,
    Excluding,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SeqError {
    #[error("`{0}` on empty sequence")]
    Empty(&'static str),
    #[error("index {index} out of bounds for sequence of length {len}")]
    OutOfBounds { index: i64, len: usize },
    #[error("`{op}` expects {expected}")]
    Type { op: &'static str, expected: &'static str },
    #[error("`{op}` expects {arity} argument(s), got {got}")]
    Arity { op: &'static str, arity: usize, got: usize },
}

impl SeqOp {
    pub const ALL: [SeqOp; 17] = [
        SeqOp::Create,
        SeqOp::Length,
        SeqOp::IsEmpty,
        SeqOp::Contains,
        SeqOp::Count,
        SeqOp::IndexOf,
        SeqOp::First,
        SeqOp::Last,
        SeqOp::At,
        SeqOp::Tail,
        SeqOp::Union,
        SeqOp::SubSequence,
        SeqOp::Append,
        SeqOp::Prepend,
        SeqOp::InsertAt,
        SeqOp::ReplaceAt,
        SeqOp::Excluding,
    ];

    /// Source-level name.
    pub fn name(self) -> &'static str {
        match self {
            SeqOp::Create => "create",
            SeqOp::Length => "length",
            SeqOp::IsEmpty => "isEmpty",
            SeqOp::Contains => "contains",
            SeqOp::Count => "count",
            SeqOp::IndexOf => "indexOf",
            SeqOp::First => "first",
            SeqOp::Last => "last",
            SeqOp::At => "at",
            SeqOp::Tail => "tail",
            SeqOp::Union => "union",
            SeqOp::SubSequence => "subSequence",
            SeqOp::Append => "append",
            SeqOp::Prepend => "prepend",
            SeqOp::InsertAt => "insertAt",
            SeqOp::ReplaceAt => "replaceAt",
            SeqOp::Excluding => "excluding",
        }
    }

    pub fn from_name(name: &str) -> Option<SeqOp> {
        SeqOp::ALL.iter().copied().find(|op| op.name() == name)
    }

    /// Fixed arity, or `None` for the variadic constructor.
    pub fn arity(self) -> Option<usize> {
        Some(match self {
            SeqOp::Create => return None,
            SeqOp::Length | SeqOp::IsEmpty | SeqOp::First | SeqOp::Last | SeqOp::Tail => 1,
            SeqOp::Contains
            | SeqOp::Count
            | SeqOp::IndexOf
            | SeqOp::At
            | SeqOp::Union
            | SeqOp::Append
            | SeqOp::Prepend
            | SeqOp::Excluding => 2,
            SeqOp::SubSequence | SeqOp::InsertAt | SeqOp::ReplaceAt => 3,
        })
    }

    /// Index of the sequence operand. `prepend` takes the element first.
    pub fn seq_arg(self) -> Option<usize> {
        match self {
            SeqOp::Create => None,
            SeqOp::Prepend => Some(1),
            _ => Some(0),
        }
    }
}

fn seq_of(op: SeqOp, v: &Value) -> Result<&Arc<Vec<Value>>, SeqError> {
    match v {
        Value::Seq(s) => Ok(s),
        _ => Err(SeqError::Type { op: op.name(), expected: "a sequence operand" }),
    }
}

fn index_of(op: SeqOp, v: &Value) -> Result<i64, SeqError> {
    match v {
        Value::Int(i) => Ok(*i),
        _ => Err(SeqError::Type { op: op.name(), expected: "an integer position" }),
    }
}

fn checked(index: i64, len: usize, inclusive_end: bool) -> Result<usize, SeqError> {
    let limit = if inclusive_end { len as i64 } else { len as i64 - 1 };
    if index < 0 || index > limit {
        Err(SeqError::OutOfBounds { index, len })
    } else {
        Ok(index as usize)
    }
}

fn seq(v: Vec<Value>) -> Value {
    Value::Seq(Arc::new(v))
}

pub fn apply(op: SeqOp, args: &[Value]) -> Result<Value, SeqError> {
    if let Some(n) = op.arity() {
        if args.len() != n {
            return Err(SeqError::Arity { op: op.name(), arity: n, got: args.len() });
        }
    }
    if op == SeqOp::Create {
        return Ok(seq(args.to_vec()));
    }
    let s = seq_of(op, &args[op.seq_arg().unwrap()])?;
    Ok(match op {
        SeqOp::Create => unreachable!(),
        SeqOp::Length => Value::Int(s.len() as i64),
        SeqOp::IsEmpty => Value::Bool(s.is_empty()),
        SeqOp::Contains => Value::Bool(s.contains(&args[1])),
        SeqOp::Count => Value::Int(s.iter().filter(|x| **x == args[1]).count() as i64),
        SeqOp::IndexOf => {
            Value::Int(s.iter().position(|x| *x == args[1]).map_or(-1, |i| i as i64))
        }
        SeqOp::First => s.first().cloned().ok_or(SeqError::Empty("first"))?,
        SeqOp::Last => s.last().cloned().ok_or(SeqError::Empty("last"))?,
        SeqOp::At => {
            let i = checked(index_of(op, &args[1])?, s.len(), false)?;
            s[i].clone()
        }
        SeqOp::Tail => {
            if s.is_empty() {
                return Err(SeqError::Empty("tail"));
            }
            seq(s[1..].to_vec())
        }
        SeqOp::Union => {
            let t = seq_of(op, &args[1])?;
            let mut v = Vec::with_capacity(s.len() + t.len());
            v.extend(s.iter().cloned());
            v.extend(t.iter().cloned());
            seq(v)
        }
        SeqOp::SubSequence => {
            let lo = checked(index_of(op, &args[1])?, s.len(), true)?;
            let hi = checked(index_of(op, &args[2])?, s.len(), true)?;
            if hi < lo {
                return Err(SeqError::OutOfBounds { index: hi as i64, len: s.len() });
            }
            seq(s[lo..hi].to_vec())
        }
        SeqOp::Append => {
            let mut v = s.as_ref().clone();
            v.push(args[1].clone());
            seq(v)
        }
        SeqOp::Prepend => {
            let mut v = Vec::with_capacity(s.len() + 1);
            v.push(args[0].clone());
            v.extend(s.iter().cloned());
            seq(v)
        }
        SeqOp::InsertAt => {
            let i = checked(index_of(op, &args[1])?, s.len(), true)?;
            let mut v = s.as_ref().clone();
            v.insert(i, args[2].clone());
            seq(v)
        }
        SeqOp::ReplaceAt => {
            let i = checked(index_of(op, &args[1])?, s.len(), false)?;
            let mut v = s.as_ref().clone();
            v[i] = args[2].clone();
            seq(v)
        }
        SeqOp::Excluding => {
            let mut v = s.as_ref().clone();
            if let Some(i) = v.iter().position(|x| *x == args[1]) {
                v.remove(i);
            }
            seq(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Value {
        seq(xs.iter().map(|&x| Value::Int(x)).collect())
    }

    #[test]
    fn create_and_length() {
        let s = apply(SeqOp::Create, &[Value::Int(1), Value::Int(2), Value::Int(3)]).unwrap();
        assert_eq!(apply(SeqOp::Length, &[s]).unwrap(), Value::Int(3));
    }

    #[test]
    fn count_index_excluding() {
        let s = ints(&[1, 2, 2, 3]);
        assert_eq!(apply(SeqOp::Count, &[s.clone(), Value::Int(2)]).unwrap(), Value::Int(2));
        assert_eq!(apply(SeqOp::IndexOf, &[s.clone(), Value::Int(2)]).unwrap(), Value::Int(1));
        assert_eq!(apply(SeqOp::IndexOf, &[s.clone(), Value::Int(9)]).unwrap(), Value::Int(-1));
        assert_eq!(apply(SeqOp::Excluding, &[s, Value::Int(2)]).unwrap(), ints(&[1, 2, 3]));
    }

    #[test]
    fn empty_identities() {
        let e = apply(SeqOp::Create, &[]).unwrap();
        assert_eq!(apply(SeqOp::IsEmpty, &[e.clone()]).unwrap(), Value::Bool(true));
        let s = apply(SeqOp::Append, &[e.clone(), Value::Int(7)]).unwrap();
        assert_eq!(s, ints(&[7]));
        assert_eq!(apply(SeqOp::First, &[s]).unwrap(), Value::Int(7));
        assert_eq!(apply(SeqOp::First, &[e.clone()]), Err(SeqError::Empty("first")));
        assert_eq!(apply(SeqOp::Tail, &[e]), Err(SeqError::Empty("tail")));
    }

    #[test]
    fn prepend_takes_element_first() {
        let s = apply(SeqOp::Prepend, &[Value::Int(0), ints(&[1])]).unwrap();
        assert_eq!(s, ints(&[0, 1]));
    }

    #[test]
    fn bounds_are_checked() {
        let s = ints(&[1, 2]);
        assert!(apply(SeqOp::At, &[s.clone(), Value::Int(2)]).is_err());
        assert!(apply(SeqOp::ReplaceAt, &[s.clone(), Value::Int(-1), Value::Int(0)]).is_err());
        assert_eq!(
            apply(SeqOp::InsertAt, &[s.clone(), Value::Int(2), Value::Int(3)]).unwrap(),
            ints(&[1, 2, 3])
        );
        assert_eq!(apply(SeqOp::SubSequence, &[s, Value::Int(1), Value::Int(2)]).unwrap(), ints(&[2]));
    }
}
