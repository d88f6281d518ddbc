use super::{Action, BinOp, Expr, GuardedCmd, LValue, System, ThreadId, UnOp, Value, VarId};
use crate::seq::{self, SeqError};
use std::sync::Arc;

const MAX_CALL_DEPTH: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("arithmetic overflow in `{0}`")]
    Overflow(&'static str),
    #[error("ordering comparison `{0}` involving null")]
    NullOrdering(&'static str),
    #[error("field access on null reference")]
    NullDereference,
    #[error("type error: {0}")]
    Type(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("function call depth exceeds {MAX_CALL_DEPTH}")]
    CallDepth,
}

/// One model-checking state: variable values, per-thread location and
/// per-thread activity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector {
    pub vals: Box<[Value]>,
    pub locs: Box<[u32]>,
    pub active: Box<[bool]>,
}

impl StateVector {
    /// All variables at their initial values, every thread at its first
    /// location.
    pub fn raw(sys: &System) -> StateVector {
        StateVector {
            vals: sys.initial_values().into_boxed_slice(),
            locs: vec![0; sys.threads.len()].into_boxed_slice(),
            active: sys.threads.iter().map(|t| t.active_at_start).collect(),
        }
    }
}

pub fn eval_expr(sys: &System, e: &Expr, vals: &[Value]) -> Result<Value, EvalError> {
    Evaluator { sys, vals, depth: 0 }.eval(e, &[])
}

pub fn eval_bool(sys: &System, e: &Expr, vals: &[Value]) -> Result<bool, EvalError> {
    match eval_expr(sys, e, vals)? {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::Type(format!("expected boolean, found {}", other.plain(sys)))),
    }
}

/// Variable targeted by an l-value in the given state.
pub fn lvalue_var(sys: &System, lv: &LValue, vals: &[Value]) -> Result<VarId, EvalError> {
    match lv {
        LValue::Var(v) => Ok(*v),
        LValue::Field(base, field) => field_var(sys, &eval_expr(sys, base, vals)?, *field),
    }
}

fn field_var(sys: &System, base: &Value, field: usize) -> Result<VarId, EvalError> {
    match base {
        Value::Record(c) => sys.constants[*c]
            .fields
            .get(field)
            .copied()
            .ok_or_else(|| EvalError::Type(format!("record has no field #{field}"))),
        Value::Null => Err(EvalError::NullDereference),
        other => Err(EvalError::Type(format!("field access on {}", other.plain(sys)))),
    }
}

/// Applies a command whose guard holds. Assignments of one command are
/// simultaneous: every right-hand side and target is evaluated in the entry
/// state. Assertions are checked on the resulting state.
pub fn apply_command(
    sys: &System,
    thread: ThreadId,
    cmd: &GuardedCmd,
    state: &StateVector,
) -> Result<StateVector, EvalError> {
    let mut writes: Vec<(VarId, Value)> = Vec::new();
    let mut starts: Vec<ThreadId> = Vec::new();
    for a in &cmd.actions {
        match a {
            Action::Assign(lv, e) => {
                let target = lvalue_var(sys, lv, &state.vals)?;
                writes.push((target, eval_expr(sys, e, &state.vals)?));
            }
            Action::Alloc(v, c) => writes.push((*v, Value::Record(*c))),
            Action::Start(t) => starts.push(*t),
            Action::Assert(..) => {}
        }
    }
    let mut next = state.clone();
    for (v, val) in writes {
        next.vals[v] = val;
    }
    for t in starts {
        next.active[t] = true;
    }
    for a in &cmd.actions {
        if let Action::Assert(e) = a {
            if !eval_bool(sys, e, &next.vals)? {
                return Err(EvalError::Assertion(super::emit::expr_text(sys, e, &[])));
            }
        }
    }
    next.locs[thread] = cmd.target as u32;
    Ok(next)
}

struct Evaluator<'a> {
    sys: &'a System,
    vals: &'a [Value],
    depth: usize,
}

impl Evaluator<'_> {
    fn eval(&mut self, e: &Expr, params: &[Value]) -> Result<Value, EvalError> {
        Ok(match e {
            Expr::Const(v) => v.clone(),
            Expr::Var(v) => self.vals[*v].clone(),
            Expr::Param(i) => params
                .get(*i)
                .cloned()
                .ok_or_else(|| EvalError::Type(format!("parameter #{i} outside a function")))?,
            Expr::Field(base, f) => {
                let b = self.eval(base, params)?;
                self.vals[field_var(self.sys, &b, *f)?].clone()
            }
            Expr::Unary(UnOp::Not, a) => Value::Bool(!self.bool(a, params)?),
            Expr::Unary(UnOp::Neg, a) => match self.eval(a, params)? {
                Value::Int(i) => Value::Int(i.checked_neg().ok_or(EvalError::Overflow("-"))?),
                Value::Float(f) => Value::Float(-f),
                other => return Err(self.type_err("-", &other)),
            },
            Expr::Binary(BinOp::And, a, b) => {
                Value::Bool(self.bool(a, params)? && self.bool(b, params)?)
            }
            Expr::Binary(BinOp::Or, a, b) => {
                Value::Bool(self.bool(a, params)? || self.bool(b, params)?)
            }
            Expr::Binary(op, a, b) => {
                let x = self.eval(a, params)?;
                let y = self.eval(b, params)?;
                binary(self.sys, *op, x, y)?
            }
            Expr::Ite(c, a, b) => {
                if self.bool(c, params)? {
                    self.eval(a, params)?
                } else {
                    self.eval(b, params)?
                }
            }
            Expr::Call(f, args) => {
                let args = args.iter().map(|a| self.eval(a, params)).collect::<Result<Vec<_>, _>>()?;
                if self.depth >= MAX_CALL_DEPTH {
                    return Err(EvalError::CallDepth);
                }
                self.depth += 1;
                let r = self.eval(&self.sys.functions[*f].body, &args);
                self.depth -= 1;
                r?
            }
            Expr::Seq(op, args) => {
                let args = args.iter().map(|a| self.eval(a, params)).collect::<Result<Vec<_>, _>>()?;
                seq::apply(*op, &args)?
            }
        })
    }

    fn bool(&mut self, e: &Expr, params: &[Value]) -> Result<bool, EvalError> {
        match self.eval(e, params)? {
            Value::Bool(b) => Ok(b),
            other => Err(EvalError::Type(format!(
                "expected boolean, found {}",
                other.plain(self.sys)
            ))),
        }
    }

    fn type_err(&self, op: &str, v: &Value) -> EvalError {
        EvalError::Type(format!("operator `{op}` not applicable to {}", v.plain(self.sys)))
    }
}

fn binary(sys: &System, op: BinOp, x: Value, y: Value) -> Result<Value, EvalError> {
    use BinOp::*;
    let sym = op.symbol();
    Ok(match op {
        Eq => Value::Bool(loose_eq(&x, &y)),
        Ne => Value::Bool(!loose_eq(&x, &y)),
        Lt | Le | Gt | Ge => {
            if x.is_null() || y.is_null() {
                return Err(EvalError::NullOrdering(sym));
            }
            let ord = match (&x, &y) {
                (Value::Int(a), Value::Int(b)) => a.cmp(b),
                (Value::Str(a), Value::Str(b)) => a.cmp(b),
                (Value::Enum(e1, a), Value::Enum(e2, b)) if e1 == e2 => a.cmp(b),
                _ => match (as_float(&x), as_float(&y)) {
                    (Some(a), Some(b)) => a.total_cmp(&b),
                    _ => {
                        return Err(EvalError::Type(format!(
                            "cannot order {} and {}",
                            x.plain(sys),
                            y.plain(sys)
                        )))
                    }
                },
            };
            Value::Bool(match op {
                Lt => ord.is_lt(),
                Le => ord.is_le(),
                Gt => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        Xor => match (&x, &y) {
            (Value::Bool(a), Value::Bool(b)) => Value::Bool(a ^ b),
            _ => return Err(EvalError::Type(format!("operator `^` on {}", x.plain(sys)))),
        },
        And | Or => unreachable!("short-circuit operators are handled by the evaluator"),
        Add | Sub | Mul | Div | Mod => match (&x, &y) {
            (Value::Int(a), Value::Int(b)) => {
                let (a, b) = (*a, *b);
                if matches!(op, Div | Mod) && b == 0 {
                    return Err(EvalError::DivisionByZero);
                }
                let r = match op {
                    Add => a.checked_add(b),
                    Sub => a.checked_sub(b),
                    Mul => a.checked_mul(b),
                    Div => a.checked_div(b),
                    _ => a.checked_rem(b),
                };
                Value::Int(r.ok_or(EvalError::Overflow(sym))?)
            }
            (Value::Str(a), Value::Str(b)) if op == Add => {
                Value::Str(Arc::from(format!("{a}{b}").as_str()))
            }
            _ => match (as_float(&x), as_float(&y)) {
                (Some(a), Some(b)) => {
                    if matches!(op, Div | Mod) && b == 0.0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    Value::Float(match op {
                        Add => a + b,
                        Sub => a - b,
                        Mul => a * b,
                        Div => a / b,
                        _ => a % b,
                    })
                }
                _ => {
                    return Err(EvalError::Type(format!(
                        "operator `{sym}` not applicable to {} and {}",
                        x.plain(sys),
                        y.plain(sys)
                    )))
                }
            },
        },
    })
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Int(i) => Some(*i as f64),
        Value::Float(f) => Some(*f),
        _ => None,
    }
}

fn loose_eq(x: &Value, y: &Value) -> bool {
    match (x, y) {
        (Value::Int(_), Value::Float(_)) | (Value::Float(_), Value::Int(_)) => {
            as_float(x) == as_float(y)
        }
        _ => x == y,
    }
}
