//! Translatability checks on a parsed model.

use crate::frontend::{Binder, DomainKind, DomainRef, FunKind, LtlAst, ModelAst, Pos, RuleAst, TermAst};
use crate::translator::domains::{constants_of, finite_elements};
use serde::Serialize;
use std::collections::HashSet;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}:{}: {}", self.code, self.line, self.col, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    /// One finding per line.
    pub fn to_text(&self) -> String {
        self.findings.iter().map(|f| format!("{f}\n")).collect()
    }
}

struct V<'m> {
    model: &'m ModelAst,
    out: Vec<Finding>,
}

impl V<'_> {
    fn push(&mut self, severity: Severity, code: &'static str, pos: Pos, message: String) {
        self.out.push(Finding { severity, code, message, line: pos.line, col: pos.col });
    }

    fn error(&mut self, code: &'static str, pos: Pos, message: String) {
        self.push(Severity::Error, code, pos, message);
    }

    fn finite(&self, d: &DomainRef) -> bool {
        finite_elements(self.model, d).is_some()
    }

    fn binders(&mut self, binders: &[Binder], pos: Pos) {
        for b in binders {
            if !self.finite(&DomainRef::Named(b.domain.clone())) {
                self.error(
                    "infinite-quantification",
                    pos,
                    format!("quantification of `{}` over infinite domain `{}`", b.var, b.domain),
                );
            }
        }
    }

    fn term(&mut self, t: &TermAst) {
        let mut found = Vec::new();
        t.walk(&mut |x| {
            if let TermAst::Forall(bs, _, p) | TermAst::Exists(bs, _, p) = x {
                found.push((bs.clone(), *p));
            }
        });
        for (bs, p) in found {
            self.binders(&bs, p);
        }
    }

    fn rule(&mut self, r: &RuleAst) {
        let mut found = Vec::new();
        r.walk_rules(&mut |x| {
            if let RuleAst::Forall(bs, _, _, p) | RuleAst::Choose(bs, _, _, _, p) = x {
                found.push((bs.clone(), *p));
            }
        });
        for (bs, p) in found {
            self.binders(&bs, p);
        }
        let mut quants = Vec::new();
        r.walk_terms(&mut |t| {
            if let TermAst::Forall(bs, _, p) | TermAst::Exists(bs, _, p) = t {
                quants.push((bs.clone(), *p));
            }
        });
        for (bs, p) in quants {
            self.binders(&bs, p);
        }
    }

    fn ltl(&mut self, f: &LtlAst) {
        match f {
            LtlAst::Atom(t) => self.term(t),
            LtlAst::Not(a) | LtlAst::Always(a) | LtlAst::Eventually(a) => self.ltl(a),
            LtlAst::Bin(_, a, b) | LtlAst::Until(a, b) | LtlAst::Release(a, b) => {
                self.ltl(a);
                self.ltl(b);
            }
        }
    }

    fn domains(&mut self) {
        let used: HashSet<&str> = self
            .model
            .functions
            .iter()
            .flat_map(|f| f.arg_domains.iter().chain(std::iter::once(&f.codomain)))
            .filter_map(DomainRef::named)
            .collect();
        for d in &self.model.domains {
            match d.kind {
                DomainKind::ConcreteSubset if d.extension.is_none() => self.error(
                    "missing-subset-extension",
                    d.pos,
                    format!("subset domain `{}` has no finite extension", d.name),
                ),
                DomainKind::Abstract | DomainKind::AgentSubset if constants_of(self.model, &d.name).is_empty() => {
                    if used.contains(d.name.as_str()) {
                        self.error(
                            "undeclared-abstract-elements",
                            d.pos,
                            format!("elements of abstract domain `{}` are not declared as static constants", d.name),
                        );
                    } else {
                        self.push(
                            Severity::Warning,
                            "empty-abstract-domain",
                            d.pos,
                            format!("abstract domain `{}` has no elements", d.name),
                        );
                    }
                }
                _ => {}
            }
        }
    }

    fn functions(&mut self) {
        for f in &self.model.functions {
            if !matches!(f.kind, FunKind::Controlled | FunKind::Monitored) {
                continue;
            }
            for d in &f.arg_domains {
                if !self.finite(d) {
                    self.error(
                        "unbounded-argument-domain",
                        f.pos,
                        format!("argument domain `{d}` of `{}` is not finite", f.name),
                    );
                }
            }
            if f.kind == FunKind::Monitored && !self.finite(&f.codomain) {
                self.error(
                    "unbounded-monitored-codomain",
                    f.pos,
                    format!("monitored function `{}` ranges over infinite domain `{}`", f.name, f.codomain),
                );
            }
        }
    }

    fn bodies(&mut self) {
        for def in &self.model.static_defs {
            let Some(decl) = self.model.function(&def.name) else { continue };
            let mut problems = Vec::new();
            def.body.walk(&mut |t| match t {
                TermAst::SelfRef(p) => problems.push((*p, "`self` in a function body".to_string())),
                TermAst::App(name, _, p) if decl.kind == FunKind::Static => {
                    if let Some(g) = self.model.function(name) {
                        if matches!(g.kind, FunKind::Controlled | FunKind::Monitored) {
                            problems.push((*p, format!("static function reads dynamic function `{name}`")));
                        }
                    }
                }
                _ => {}
            });
            for (p, m) in problems {
                self.error("unsupported-function-body", p, format!("`{}`: {m}", def.name));
            }
            self.term(&def.body);
        }
    }

    fn uninitialized(&mut self) {
        let inited: HashSet<&str> = self
            .model
            .init
            .iter()
            .flat_map(|i| i.entries.iter().map(|e| e.function()))
            .collect();
        for f in &self.model.functions {
            if f.kind == FunKind::Controlled && !inited.contains(f.name.as_str()) {
                self.push(
                    Severity::Warning,
                    "uninitialized-controlled-location",
                    f.pos,
                    format!("controlled function `{}` has no initial value; its type default is used", f.name),
                );
            }
        }
    }
}

pub fn validate(model: &ModelAst) -> ValidationReport {
    let mut v = V { model, out: Vec::new() };
    v.domains();
    v.functions();
    v.bodies();
    for r in &model.rules {
        v.rule(&r.body);
    }
    v.rule(&model.main_rule.body);
    for s in &model.ltl_specs {
        v.ltl(&s.formula);
    }
    for inv in &model.invariants {
        v.term(&inv.body);
    }
    v.uninitialized();
    v.out.sort_by_key(|f| (f.severity == Severity::Warning, f.line, f.col));
    let ok = !v.out.iter().any(|f| f.severity == Severity::Error);
    ValidationReport { ok, findings: v.out }
}
