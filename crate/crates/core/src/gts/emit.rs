//! Deterministic text rendering of a [`System`] in low-level BIR style.

use super::*;
use std::fmt::Write;

pub fn emit_bir_text(sys: &System) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "system {} {{", sys.name);

    for p in &sys.properties {
        let keys: Vec<String> = p
            .props
            .iter()
            .map(|(k, e)| format!("Property.createObservableKey(\"{k}\", {})", expr_text(sys, e, &[])))
            .collect();
        let _ = writeln!(
            s,
            "  fun {}() returns boolean = LTL.temporalProperty(Property.createObservableDictionary({}), {});//{}",
            p.name,
            keys.join(", "),
            ltl_text(&p.formula, &p.props),
            p.decl_text
        );
    }
    if !sys.properties.is_empty() {
        s.push('\n');
    }

    for e in &sys.enums {
        let _ = writeln!(s, "  enum {} {{ {} }}", e.name, e.elements.join(", "));
    }
    for a in &sys.aliases {
        let vals: Vec<String> = a.values.iter().map(|v| v.bir(sys)).collect();
        let _ = writeln!(
            s,
            "  typealias {} {};//values {{{}}}",
            a.name,
            sys.type_name(&a.base),
            vals.join(", ")
        );
    }
    for r in &sys.records {
        let _ = writeln!(s, "  record {} {{", r.name);
        for f in &r.fields {
            let _ = writeln!(s, "    {} {};//{}", sys.type_name(&f.ty), f.name, f.kind.comment());
        }
        s.push_str("  }\n");
    }
    for v in sys.variables.iter().filter(|v| v.owner.is_none()) {
        let init = v.init.as_ref().map(|i| format!(" := {}", i.bir(sys))).unwrap_or_default();
        let _ = writeln!(s, "  {} {}{init};//{}", sys.type_name(&v.ty), v.name, v.kind.comment());
    }
    for f in &sys.functions {
        let params: Vec<String> =
            f.params.iter().map(|(n, t)| format!("{} {n}", sys.type_name(t))).collect();
        let _ = writeln!(
            s,
            "  fun {}({}) returns {} = {};",
            f.name,
            params.join(", "),
            sys.type_name(&f.ret),
            expr_text(sys, &f.body, &f.params)
        );
    }

    for t in sys.threads.iter().skip(1).chain(sys.threads.first()) {
        s.push('\n');
        let active = if t.active_at_start { "active " } else { "" };
        let _ = writeln!(s, "  {active}thread {}() {{", t.name);
        for l in &t.locations {
            let marker = if l.init { "//initialization" } else { "" };
            let _ = writeln!(s, "    loc {}:{marker}", l.label);
            for c in &l.commands {
                s.push_str("      ");
                s.push_str(&command_text(sys, t, c));
                s.push('\n');
            }
        }
        s.push_str("  }\n");
    }
    s.push_str("}\n");
    s
}

pub fn command_text(sys: &System, t: &ThreadDef, c: &GuardedCmd) -> String {
    let mut s = String::new();
    if let Some(g) = &c.guard {
        let _ = write!(s, "when {} ", expr_text(sys, g, &[]));
    }
    s.push_str(if c.visible { "do { " } else { "do invisible { " });
    for a in &c.actions {
        s.push_str(&action_text(sys, a));
        s.push(' ');
    }
    let _ = write!(s, "}} goto {};", t.locations[c.target].label);
    s
}

pub fn action_text(sys: &System, a: &Action) -> String {
    match a {
        Action::Assign(lv, e) => format!("{} := {};", lvalue_text(sys, lv), expr_text(sys, e, &[])),
        Action::Assert(e) => format!("assert({});", expr_text(sys, e, &[])),
        Action::Alloc(v, c) => format!(
            "{} := new {};",
            sys.variables[*v].name,
            sys.records[sys.constants[*c].record].name
        ),
        Action::Start(t) => format!("start {}();", sys.threads[*t].name),
    }
}

pub fn lvalue_text(sys: &System, lv: &LValue) -> String {
    match lv {
        LValue::Var(v) => sys.variables[*v].name.clone(),
        LValue::Field(base, f) => field_text(sys, base, *f, &[]),
    }
}

fn field_name(sys: &System, base: &Expr, f: usize, params: &[(String, Type)]) -> String {
    match infer_record(sys, base, params) {
        Some(r) => sys.records[r].fields[f].name.clone(),
        None => format!("#{f}"),
    }
}

/// Record type of a record-valued expression.
pub fn infer_record(sys: &System, e: &Expr, params: &[(String, Type)]) -> Option<usize> {
    match e {
        Expr::Var(v) => sys.record_of(&sys.variables[*v].ty),
        Expr::Param(i) => sys.record_of(&params.get(*i)?.1),
        Expr::Call(f, _) => sys.record_of(&sys.functions[*f].ret),
        Expr::Ite(_, a, b) => {
            infer_record(sys, a, params).or_else(|| infer_record(sys, b, params))
        }
        Expr::Const(Value::Record(c)) => Some(sys.constants[*c].record),
        Expr::Field(base, f) => {
            let r = infer_record(sys, base, params)?;
            sys.record_of(&sys.records[r].fields[*f].ty)
        }
        _ => None,
    }
}

fn field_text(sys: &System, base: &Expr, f: usize, params: &[(String, Type)]) -> String {
    let b = expr_prec(sys, base, params, 9);
    format!("{b}.{}", field_name(sys, base, f, params))
}

pub fn expr_text(sys: &System, e: &Expr, params: &[(String, Type)]) -> String {
    expr_prec(sys, e, params, 0)
}

fn expr_prec(sys: &System, e: &Expr, params: &[(String, Type)], min: u8) -> String {
    match e {
        Expr::Const(v) => {
            let s = v.bir(sys);
            if min > 8 && s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Var(v) => sys.variables[*v].name.clone(),
        Expr::Param(i) => params.get(*i).map(|p| p.0.clone()).unwrap_or_else(|| format!("$arg{i}")),
        Expr::Field(base, f) => field_text(sys, base, *f, params),
        Expr::Unary(UnOp::Not, a) => format!("!({})", expr_text(sys, a, params)),
        Expr::Unary(UnOp::Neg, a) => format!("-({})", expr_text(sys, a, params)),
        Expr::Binary(op, a, b) => {
            let p = op.precedence();
            let s = format!(
                "{}{}{}",
                expr_prec(sys, a, params, p),
                op.symbol(),
                expr_prec(sys, b, params, p + 1)
            );
            if p < min {
                format!("({s})")
            } else {
                s
            }
        }
        Expr::Ite(c, a, b) => format!(
            "({}?{}:{})",
            expr_text(sys, c, params),
            expr_text(sys, a, params),
            expr_text(sys, b, params)
        ),
        Expr::Call(f, args) => {
            let args: Vec<String> = args.iter().map(|a| expr_text(sys, a, params)).collect();
            format!("{}({})", sys.functions[*f].name, args.join(", "))
        }
        Expr::Seq(op, args) => {
            let args: Vec<String> = args.iter().map(|a| expr_text(sys, a, params)).collect();
            format!("Seq.{}({})", op.name(), args.join(", "))
        }
    }
}

pub fn ltl_text(f: &Ltl, props: &[(String, Expr)]) -> String {
    let un = |name: &str, a: &Ltl| format!("LTL.{name}({})", ltl_text(a, props));
    let bin = |name: &str, a: &Ltl, b: &Ltl| {
        format!("LTL.{name}({}, {})", ltl_text(a, props), ltl_text(b, props))
    };
    match f {
        Ltl::True => "true".into(),
        Ltl::False => "false".into(),
        Ltl::Atom(i) => format!("LTL.prop(\"{}\")", props[*i].0),
        Ltl::Not(a) => un("negation", a),
        Ltl::And(a, b) => bin("and", a, b),
        Ltl::Or(a, b) => bin("or", a, b),
        Ltl::Implies(a, b) => bin("implication", a, b),
        Ltl::Iff(a, b) => bin("equivalence", a, b),
        Ltl::Xor(a, b) => bin("xor", a, b),
        Ltl::Always(a) => un("always", a),
        Ltl::Eventually(a) => un("eventually", a),
        Ltl::Until(a, b) => bin("until", a, b),
        Ltl::Release(a, b) => bin("release", a, b),
    }
}
