//! Constructors that fold constants while building IR expressions.

use crate::gts::{eval_expr, BinOp, Expr, System, UnOp, Value};

/// No state, parameter or function dependency.
pub fn is_closed(e: &Expr) -> bool {
    let mut closed = true;
    e.walk(&mut |x| {
        if matches!(x, Expr::Var(_) | Expr::Field(..) | Expr::Param(_) | Expr::Call(..)) {
            closed = false;
        }
    });
    closed
}

pub fn fold(sys: &System, e: Expr) -> Expr {
    if matches!(e, Expr::Const(_)) || !is_closed(&e) {
        return e;
    }
    match eval_expr(sys, &e, &[]) {
        Ok(v) => Expr::Const(v),
        Err(_) => e,
    }
}

pub fn as_bool(e: &Expr) -> Option<bool> {
    match e {
        Expr::Const(Value::Bool(b)) => Some(*b),
        _ => None,
    }
}

pub fn and(a: Expr, b: Expr) -> Expr {
    match (as_bool(&a), as_bool(&b)) {
        (Some(false), _) | (_, Some(false)) => Expr::bool(false),
        (Some(true), _) => b,
        (_, Some(true)) => a,
        _ => Expr::bin(BinOp::And, a, b),
    }
}

pub fn or(a: Expr, b: Expr) -> Expr {
    match (as_bool(&a), as_bool(&b)) {
        (Some(true), _) | (_, Some(true)) => Expr::bool(true),
        (Some(false), _) => b,
        (_, Some(false)) => a,
        _ => Expr::bin(BinOp::Or, a, b),
    }
}

pub fn not(a: Expr) -> Expr {
    match a {
        Expr::Const(Value::Bool(b)) => Expr::bool(!b),
        Expr::Unary(UnOp::Not, inner) => *inner,
        a => Expr::not(a),
    }
}

pub fn and_all(parts: impl IntoIterator<Item = Expr>) -> Expr {
    parts.into_iter().fold(Expr::bool(true), and)
}

pub fn or_all(parts: impl IntoIterator<Item = Expr>) -> Expr {
    parts.into_iter().fold(Expr::bool(false), or)
}

pub fn bin(sys: &System, op: BinOp, a: Expr, b: Expr) -> Expr {
    match op {
        BinOp::And => and(a, b),
        BinOp::Or => or(a, b),
        _ => fold(sys, Expr::bin(op, a, b)),
    }
}

pub fn eq(sys: &System, a: Expr, b: Expr) -> Expr {
    bin(sys, BinOp::Eq, a, b)
}

pub fn ite(c: Expr, a: Expr, b: Expr) -> Expr {
    match as_bool(&c) {
        Some(true) => a,
        Some(false) => b,
        None if a == b => a,
        None => Expr::Ite(Box::new(c), Box::new(a), Box::new(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_identities() {
        let x = Expr::Var(0);
        assert_eq!(and(Expr::bool(true), x.clone()), x);
        assert_eq!(and(x.clone(), Expr::bool(false)), Expr::bool(false));
        assert_eq!(or(Expr::bool(false), x.clone()), x);
        assert_eq!(not(not(x.clone())), x);
    }

    #[test]
    fn closed_arithmetic_folds() {
        let sys = System::default();
        let e = bin(&sys, BinOp::Add, Expr::Const(Value::Int(2)), Expr::Const(Value::Int(3)));
        assert_eq!(e, Expr::Const(Value::Int(5)));
        let div0 = bin(&sys, BinOp::Div, Expr::Const(Value::Int(1)), Expr::Const(Value::Int(0)));
        assert!(matches!(div0, Expr::Binary(..)));
    }
}
