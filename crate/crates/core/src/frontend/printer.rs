//! Pretty-printer whose output re-parses to an equal [`ModelAst`].

use super::ast::*;
use std::fmt::Write;

pub fn print_model(m: &ModelAst) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "asm {}", m.name);
    for i in &m.imports {
        let _ = writeln!(w, "import {i}");
    }
    let _ = writeln!(w, "\nsignature:");
    for d in &m.domains {
        let _ = match d.kind {
            DomainKind::Enum => {
                writeln!(w, "  enum domain {} = {{{}}}", d.name, d.enum_elements.join(" | "))
            }
            DomainKind::Abstract => writeln!(w, "  abstract domain {}", d.name),
            DomainKind::Basic => writeln!(w, "  basic domain {}", d.name),
            DomainKind::AgentSubset | DomainKind::ConcreteSubset => writeln!(
                w,
                "  domain {} subsetof {}",
                d.name,
                d.parent.as_deref().unwrap_or("Integer")
            ),
        };
    }
    for f in &m.functions {
        let kind = match f.kind {
            FunKind::Static => "static",
            FunKind::Derived => "derived",
            FunKind::Controlled => "controlled",
            FunKind::Monitored => "monitored",
        };
        let dynamic = if f.dynamic { "dynamic " } else { "" };
        let _ = write!(w, "  {dynamic}{kind} {}: ", f.name);
        let _ = match f.arg_domains.len() {
            0 => writeln!(w, "{}", f.codomain),
            1 => writeln!(w, "{} -> {}", f.arg_domains[0], f.codomain),
            _ => {
                let args: Vec<String> = f.arg_domains.iter().map(|d| d.to_string()).collect();
                writeln!(w, "Prod({}) -> {}", args.join(", "), f.codomain)
            }
        };
    }

    let _ = writeln!(w, "\ndefinitions:");
    for d in &m.domains {
        match &d.extension {
            Some(Extension::Range(lo, hi)) => {
                let _ = writeln!(w, "  domain {} = {{{lo}..{hi}}}", d.name);
            }
            Some(Extension::Set(vals)) => {
                let vals: Vec<String> = vals.iter().map(literal).collect();
                let _ = writeln!(w, "  domain {} = {{{}}}", d.name, vals.join(", "));
            }
            None => {}
        }
    }
    for f in &m.static_defs {
        let _ = writeln!(w, "  function {}{} = {}", f.name, params(&f.params), term(&f.body));
    }
    for r in &m.rules {
        let mac = if r.is_macro { "macro " } else { "" };
        let _ = writeln!(w, "\n  {mac}rule {}{} =", r.name, params(&r.params));
        rule(w, &r.body, 2);
    }
    for s in &m.ltl_specs {
        let _ = writeln!(w, "  LTLSPEC NAME {}:= {}", s.name, s.text);
    }
    for inv in &m.invariants {
        let name = inv.name.as_ref().map(|n| format!("{n} ")).unwrap_or_default();
        let _ = writeln!(w, "  invariant {name}over {}: {}", inv.over.join(", "), inv.text);
    }

    let _ = writeln!(w, "\n  main rule {} =", m.main_rule.name);
    rule(w, &m.main_rule.body, 2);

    if let Some(init) = &m.init {
        let _ = writeln!(w, "\ndefault init {}:", init.name);
        for e in &init.entries {
            let _ = match e {
                InitEntry::Simple { location, value, .. } => {
                    writeln!(w, "  function {} = {}", term(location), term(value))
                }
                InitEntry::Group { function, binders, value, .. } => {
                    writeln!(w, "  function {function}{} = {}", params(binders), term(value))
                }
                InitEntry::Conditional { function, binders, cases, .. } => {
                    writeln!(w, "  function {function}{} = {}", params(binders), term(cases))
                }
            };
        }
        for (dom, r) in &init.agent_bindings {
            let _ = writeln!(w, "  agent {dom}: {r}[]");
        }
    }
    out
}

fn params(bs: &[Binder]) -> String {
    if bs.is_empty() {
        String::new()
    } else {
        format!("({})", binders(bs))
    }
}

fn binders(bs: &[Binder]) -> String {
    bs.iter().map(|b| format!("{} in {}", b.var, b.domain)).collect::<Vec<_>>().join(", ")
}

fn indent(w: &mut String, depth: usize) {
    for _ in 0..depth {
        w.push_str("  ");
    }
}

fn rule(w: &mut String, r: &RuleAst, d: usize) {
    indent(w, d);
    match r {
        RuleAst::Update(l, v, _) => {
            let _ = writeln!(w, "{} := {}", term(l), term(v));
        }
        RuleAst::Cond(c, t, e, _) => {
            let _ = writeln!(w, "if {} then", term(c));
            rule(w, t, d + 1);
            if let Some(e) = e {
                indent(w, d);
                w.push_str("else\n");
                rule(w, e, d + 1);
            }
            indent(w, d);
            w.push_str("endif\n");
        }
        RuleAst::Case(s, branches, other, _) => {
            let _ = writeln!(w, "switch {}", term(s));
            for (v, body) in branches {
                indent(w, d + 1);
                let _ = writeln!(w, "case {}:", term(v));
                rule(w, body, d + 2);
            }
            if let Some(o) = other {
                indent(w, d + 1);
                w.push_str("otherwise\n");
                rule(w, o, d + 2);
            }
            indent(w, d);
            w.push_str("endswitch\n");
        }
        RuleAst::Choose(bs, c, body, none, _) => {
            let _ = writeln!(w, "choose {} with {} do", binders(bs), term(c));
            rule(w, body, d + 1);
            if let Some(n) = none {
                indent(w, d);
                w.push_str("ifnone\n");
                rule(w, n, d + 1);
            }
            indent(w, d);
            w.push_str("endchoose\n");
        }
        RuleAst::Forall(bs, c, body, _) => {
            let _ = writeln!(w, "forall {} with {} do", binders(bs), term(c));
            rule(w, body, d + 1);
            indent(w, d);
            w.push_str("endforall\n");
        }
        RuleAst::Par(rs, _) | RuleAst::Seq(rs, _) => {
            let (open, close) =
                if matches!(r, RuleAst::Par(..)) { ("par", "endpar") } else { ("seq", "endseq") };
            let _ = writeln!(w, "{open}");
            for c in rs {
                rule(w, c, d + 1);
            }
            indent(w, d);
            let _ = writeln!(w, "{close}");
        }
        RuleAst::Let(bs, body, _) => {
            let bs: Vec<String> = bs.iter().map(|(v, t)| format!("{v} = {}", term(t))).collect();
            let _ = writeln!(w, "let ({}) in", bs.join(", "));
            rule(w, body, d + 1);
            indent(w, d);
            w.push_str("endlet\n");
        }
        RuleAst::Skip(_) => w.push_str("skip\n"),
        RuleAst::MacroCall(name, args, _) => {
            let _ = writeln!(w, "{name}[{}]", term_list(args));
        }
        RuleAst::ProgramCall(t, _) => {
            let _ = writeln!(w, "program({})", term(t));
        }
    }
}

fn literal(l: &Literal) -> String {
    match l {
        Literal::Bool(b) => b.to_string(),
        Literal::Int(i) => i.to_string(),
        Literal::Real(r) => format!("{r:?}"),
        Literal::Str(s) => format!("\"{s}\""),
        Literal::Undef => "undef".into(),
    }
}

fn term_list(ts: &[TermAst]) -> String {
    ts.iter().map(term).collect::<Vec<_>>().join(", ")
}

fn prec(t: &TermAst) -> u8 {
    match t {
        TermAst::Bin(op, ..) => op.precedence(),
        TermAst::Un(UnOp::Not, ..) => 4,
        _ => 10,
    }
}

fn operand(t: &TermAst, min: u8) -> String {
    if prec(t) < min {
        format!("({})", term(t))
    } else {
        term(t)
    }
}

pub fn term(t: &TermAst) -> String {
    match t {
        TermAst::Lit(l, _) => literal(l),
        TermAst::EnumElem(e, _) => e.clone(),
        TermAst::Var(v, _) => v.clone(),
        TermAst::App(name, args, _) if args.is_empty() => name.clone(),
        TermAst::App(name, args, _) => format!("{name}({})", term_list(args)),
        TermAst::Bin(op, a, b, _) => {
            let p = op.precedence();
            format!("{} {} {}", operand(a, p), op.symbol(), operand(b, p + 1))
        }
        TermAst::Un(UnOp::Not, a, _) => format!("not({})", term(a)),
        TermAst::Un(UnOp::Neg, a, _) => format!("-({})", term(a)),
        TermAst::Cond(c, a, b, _) => match b {
            Some(b) => format!("if {} then {} else {} endif", term(c), term(a), term(b)),
            None => format!("if {} then {} endif", term(c), term(a)),
        },
        TermAst::Case(s, branches, other, _) => {
            let mut out = format!("switch {}", term(s));
            for (v, r) in branches {
                let _ = write!(out, " case {}: {}", term(v), term(r));
            }
            if let Some(o) = other {
                let _ = write!(out, " otherwise {}", term(o));
            }
            out.push_str(" endswitch");
            out
        }
        TermAst::Forall(bs, body, _) => format!("(forall {} with {})", binders(bs), term(body)),
        TermAst::Exists(bs, body, _) => format!("(exists {} with {})", binders(bs), term(body)),
        TermAst::IsUndef(a, _) => format!("isUndef({})", term(a)),
        TermAst::SelfRef(_) => "self".into(),
        TermAst::SeqLit(items, _) => format!("[{}]", term_list(items)),
    }
}
