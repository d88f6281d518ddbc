//! Symbol tables, term lowering and rule elaboration.
//!
//! Elaboration resolves everything that is static in a rule tree: macro and
//! agent program calls are inlined, bound variables are substituted, `forall`
//! and `choose` are expanded over their finite domains and constant
//! conditions are decided. The result is an [`IRule`] over IR expressions.

use super::domains::{self, Elem};
use super::{simp, TranslateError, TranslateOptions};
use crate::frontend::{
    self as fe, Binder, DomainKind, DomainRef, Extension, FunKind, Literal, LtlAst, ModelAst, Pos,
    RuleAst, TermAst,
};
use crate::gts::*;
use crate::ltl::Ltl;
use crate::seq::SeqOp;
use std::collections::HashMap;
use std::sync::Arc;

type TResult<T> = Result<T, TranslateError>;

fn err<T>(pos: Pos, message: impl Into<String>) -> TResult<T> {
    Err(TranslateError { pos, message: message.into() })
}

pub(crate) enum Loc {
    Nullary(VarId),
    /// Field index on the record of the first argument domain.
    Field(usize),
    /// One variable per argument tuple, in domain-product order.
    Flat(Vec<(Vec<Value>, VarId)>),
}

pub(crate) struct FunLoc {
    pub kind: FunKind,
    pub loc: Loc,
}

#[derive(Clone, Default)]
pub(crate) struct Env {
    vars: Vec<(String, Expr)>,
    self_: Option<Expr>,
}

impl Env {
    fn get(&self, name: &str) -> Option<&Expr> {
        self.vars.iter().rev().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    fn with(&self, bindings: impl IntoIterator<Item = (String, Expr)>) -> Env {
        let mut e = self.clone();
        e.vars.extend(bindings);
        e
    }
}

/// Rule tree after elaboration.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum IRule {
    Update { lv: LValue, rhs: Expr, check: Option<Expr> },
    Cond(Expr, Box<IRule>, Option<Box<IRule>>),
    /// Alternatives guarded by their conditions, plus the `ifnone` branch.
    Choose(Vec<(Expr, IRule)>, Option<Box<IRule>>),
    Par(Vec<IRule>),
    Seq(Vec<IRule>),
    Skip,
}

pub(crate) struct Lowerer<'m> {
    pub model: &'m ModelAst,
    pub sys: System,
    pub opts: TranslateOptions,
    dom_types: HashMap<String, Type>,
    pub locations: HashMap<String, FunLoc>,
    funs: HashMap<String, FunId>,
    consts: HashMap<String, usize>,
    enum_elems: HashMap<String, Value>,
    fold_static: bool,
    /// Controlled function name and the number of IR variables it unfolds to.
    pub location_counts: Vec<(String, usize)>,
}

impl<'m> Lowerer<'m> {
    pub fn new(model: &'m ModelAst, opts: TranslateOptions) -> TResult<Lowerer<'m>> {
        let mut l = Lowerer {
            model,
            sys: System { name: model.name.clone(), ..System::default() },
            opts,
            dom_types: HashMap::new(),
            locations: HashMap::new(),
            funs: HashMap::new(),
            consts: HashMap::new(),
            enum_elems: HashMap::new(),
            fold_static: false,
            location_counts: Vec::new(),
        };
        for (name, ty) in [
            ("Boolean", Type::Bool),
            ("Integer", Type::Int),
            ("Natural", Type::Int),
            ("String", Type::Str),
            ("Char", Type::Str),
            ("Real", Type::Float),
            ("Undef", Type::Null),
        ] {
            l.dom_types.insert(name.into(), ty);
        }
        l.domains()?;
        l.record_fields()?;
        l.constants()?;
        l.dynamic_locations()?;
        l.pure_functions()?;
        Ok(l)
    }

    fn domains(&mut self) -> TResult<()> {
        for d in &self.model.domains {
            let ty = match d.kind {
                DomainKind::Enum => {
                    let idx = self.sys.enums.len();
                    for (i, e) in d.enum_elements.iter().enumerate() {
                        self.enum_elems.insert(e.clone(), Value::Enum(idx, i as u32));
                    }
                    self.sys.enums.push(fe_enum(d));
                    Type::Enum(idx)
                }
                DomainKind::Abstract | DomainKind::AgentSubset => {
                    self.sys.records.push(RecordDef { name: d.name.clone(), fields: Vec::new() });
                    Type::Record(self.sys.records.len() - 1)
                }
                DomainKind::ConcreteSubset => {
                    let parent = d.parent.clone().unwrap_or_default();
                    let base = self.ty(&DomainRef::Named(parent), d.pos)?;
                    let elems: Vec<Elem> = match &d.extension {
                        Some(Extension::Range(lo, hi)) => (*lo..=*hi).map(Elem::Int).collect(),
                        Some(Extension::Set(items)) => items.iter().map(domains::literal_elem).collect(),
                        None => return err(d.pos, format!("subset domain `{}` has no extension", d.name)),
                    };
                    let values = elems
                        .iter()
                        .map(|e| self.elem_value(e, d.pos))
                        .collect::<TResult<Vec<_>>>()?;
                    self.sys.aliases.push(AliasDef { name: d.name.clone(), base, values });
                    Type::Alias(self.sys.aliases.len() - 1)
                }
                DomainKind::Basic => return err(d.pos, format!("basic domain `{}` cannot be mapped", d.name)),
            };
            self.dom_types.insert(d.name.clone(), ty);
        }
        Ok(())
    }

    fn record_fields(&mut self) -> TResult<()> {
        for f in &self.model.functions {
            if !matches!(f.kind, FunKind::Controlled | FunKind::Monitored) || !self.is_field_function(f) {
                continue;
            }
            let Type::Record(r) = self.ty(&f.arg_domains[0], f.pos)? else { unreachable!() };
            let ty = self.ty(&f.codomain, f.pos)?;
            self.sys.records[r].fields.push(FieldDef { name: f.name.clone(), ty, kind: var_kind(f.kind) });
            let idx = self.sys.records[r].fields.len() - 1;
            self.locations.insert(f.name.clone(), FunLoc { kind: f.kind, loc: Loc::Field(idx) });
        }
        Ok(())
    }

    fn is_field_function(&self, f: &fe::FunctionDecl) -> bool {
        f.arg_domains.len() == 1 && domains::is_record_domain(self.model, &f.arg_domains[0])
    }

    fn constants(&mut self) -> TResult<()> {
        for f in self.model.functions.iter().filter(|f| f.is_constant_element) {
            let Type::Record(r) = self.ty(&f.codomain, f.pos)? else { unreachable!() };
            let c = self.sys.constants.len();
            let var = self.sys.variables.len();
            self.sys.variables.push(VarDef {
                name: f.name.clone(),
                ty: Type::Record(r),
                kind: VarKind::StaticConst,
                init: None,
                owner: None,
            });
            let mut fields = Vec::new();
            for (k, fd) in self.sys.records[r].fields.clone().into_iter().enumerate() {
                fields.push(self.sys.variables.len());
                self.sys.variables.push(VarDef {
                    name: format!("{}.{}", f.name, fd.name),
                    ty: fd.ty,
                    kind: fd.kind,
                    init: None,
                    owner: Some((c, k)),
                });
            }
            self.sys.constants.push(ConstDef { name: f.name.clone(), record: r, var, fields });
            self.consts.insert(f.name.clone(), c);
        }
        Ok(())
    }

    fn dynamic_locations(&mut self) -> TResult<()> {
        for f in &self.model.functions {
            if !matches!(f.kind, FunKind::Controlled | FunKind::Monitored) {
                continue;
            }
            let count = if f.arg_domains.is_empty() {
                let ty = self.ty(&f.codomain, f.pos)?;
                let v = self.push_var(f.name.clone(), ty, var_kind(f.kind));
                self.locations.insert(f.name.clone(), FunLoc { kind: f.kind, loc: Loc::Nullary(v) });
                1
            } else if self.is_field_function(f) {
                let r = self.record_index(&f.arg_domains[0]);
                self.sys.constants.iter().filter(|c| c.record == r).count()
            } else {
                let mut lists = Vec::new();
                for d in &f.arg_domains {
                    let Some(elems) = domains::finite_elements(self.model, d) else {
                        return err(f.pos, format!("argument domain `{d}` of `{}` is not finite", f.name));
                    };
                    lists.push(elems);
                }
                let ty = self.ty(&f.codomain, f.pos)?;
                let mut vars = Vec::new();
                for tuple in domains::product(&lists) {
                    let suffix: Vec<String> = tuple.iter().map(Elem::suffix).collect();
                    let values = tuple.iter().map(|e| self.elem_value(e, f.pos)).collect::<TResult<Vec<_>>>()?;
                    let v = self.push_var(format!("{}_{}", f.name, suffix.join("_")), ty.clone(), var_kind(f.kind));
                    vars.push((values, v));
                }
                let n = vars.len();
                self.locations.insert(f.name.clone(), FunLoc { kind: f.kind, loc: Loc::Flat(vars) });
                n
            };
            if f.kind == FunKind::Controlled {
                self.location_counts.push((f.name.clone(), count));
            }
        }
        Ok(())
    }

    fn record_index(&self, d: &DomainRef) -> usize {
        match d.named().and_then(|n| self.dom_types.get(n)) {
            Some(Type::Record(r)) => *r,
            _ => usize::MAX,
        }
    }

    fn push_var(&mut self, name: String, ty: Type, kind: VarKind) -> VarId {
        self.sys.variables.push(VarDef { name, ty, kind, init: None, owner: None });
        self.sys.variables.len() - 1
    }

    fn pure_functions(&mut self) -> TResult<()> {
        let mut defs = Vec::new();
        for f in &self.model.functions {
            if !matches!(f.kind, FunKind::Static | FunKind::Derived) || f.is_constant_element {
                continue;
            }
            let Some(def) = self.model.static_def(&f.name) else {
                return err(f.pos, format!("`{}` has no definition", f.name));
            };
            let params = def
                .params
                .iter()
                .map(|b| Ok((b.var.clone(), self.ty(&DomainRef::Named(b.domain.clone()), def.pos)?)))
                .collect::<TResult<Vec<_>>>()?;
            let ret = self.ty(&f.codomain, f.pos)?;
            self.sys.functions.push(FunDef { name: f.name.clone(), params, ret, body: Expr::bool(true) });
            self.funs.insert(f.name.clone(), self.sys.functions.len() - 1);
            defs.push(def);
        }
        for (i, def) in defs.into_iter().enumerate() {
            let env = Env {
                vars: def.params.iter().enumerate().map(|(k, b)| (b.var.clone(), Expr::Param(k))).collect(),
                self_: None,
            };
            self.sys.functions[i].body = self.term(&def.body, &env)?;
        }
        self.fold_static = true;
        Ok(())
    }

    pub fn ty(&self, d: &DomainRef, pos: Pos) -> TResult<Type> {
        match d {
            DomainRef::Seq(inner) => Ok(Type::Seq(Box::new(self.ty(inner, pos)?))),
            DomainRef::Named(n) => match self.dom_types.get(n) {
                Some(t) => Ok(t.clone()),
                None => err(pos, format!("domain `{n}` has no IR type")),
            },
        }
    }

    pub fn elem_value(&self, e: &Elem, pos: Pos) -> TResult<Value> {
        Ok(match e {
            Elem::Bool(b) => Value::Bool(*b),
            Elem::Int(i) => Value::Int(*i),
            Elem::Real(r) => Value::Float(*r),
            Elem::Str(s) => Value::Str(Arc::from(s.as_str())),
            Elem::Undef => Value::Null,
            Elem::Enum(n) => match self.enum_elems.get(n) {
                Some(v) => v.clone(),
                None => return err(pos, format!("unknown enum element `{n}`")),
            },
            Elem::Const(n) => match self.consts.get(n) {
                Some(c) => Value::Record(*c),
                None => return err(pos, format!("unknown constant `{n}`")),
            },
        })
    }

    /// Values of a finite domain, in declaration order.
    pub fn domain_values(&self, domain: &str, pos: Pos) -> TResult<Vec<Value>> {
        match domains::finite_elements(self.model, &DomainRef::Named(domain.to_string())) {
            Some(elems) => elems.iter().map(|e| self.elem_value(e, pos)).collect(),
            None => err(pos, format!("quantification over infinite domain `{domain}`")),
        }
    }

    /// Values a variable of this type may take, when finite.
    pub fn type_values(&self, ty: &Type) -> Option<Vec<Value>> {
        match ty {
            Type::Bool => Some(vec![Value::Bool(true), Value::Bool(false)]),
            Type::Enum(e) => {
                Some((0..self.sys.enums[*e].elements.len()).map(|i| Value::Enum(*e, i as u32)).collect())
            }
            Type::Alias(a) => Some(self.sys.aliases[*a].values.clone()),
            Type::Record(r) => Some(
                self.sys
                    .constants
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.record == *r)
                    .map(|(i, _)| Value::Record(i))
                    .collect(),
            ),
            Type::Null => Some(vec![Value::Null]),
            _ => None,
        }
    }

    fn binder_tuples(&self, binders: &[Binder], pos: Pos) -> TResult<Vec<Vec<(String, Expr)>>> {
        let mut lists = Vec::new();
        for b in binders {
            let vals = self.domain_values(&b.domain, pos)?;
            lists.push(vals.into_iter().map(|v| (b.var.clone(), Expr::Const(v))).collect::<Vec<_>>());
        }
        Ok(domains::product(&lists))
    }

    // ---- terms ----------------------------------------------------------

    pub fn term(&self, t: &TermAst, env: &Env) -> TResult<Expr> {
        let sys = &self.sys;
        Ok(match t {
            TermAst::Lit(l, _) => Expr::Const(match l {
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Int(i) => Value::Int(*i),
                Literal::Real(r) => Value::Float(*r),
                Literal::Str(s) => Value::Str(Arc::from(s.as_str())),
                Literal::Undef => Value::Null,
            }),
            TermAst::EnumElem(n, pos) => Expr::Const(self.elem_value(&Elem::Enum(n.clone()), *pos)?),
            TermAst::Var(n, pos) => match env.get(n) {
                Some(e) => e.clone(),
                None => return err(*pos, format!("unbound variable `{n}`")),
            },
            TermAst::SelfRef(pos) => match &env.self_ {
                Some(e) => e.clone(),
                None => return err(*pos, "`self` outside an agent program"),
            },
            TermAst::App(name, args, pos) => self.app(name, args, env, *pos)?,
            TermAst::Bin(op, a, b, _) => {
                let (a, b) = (self.term(a, env)?, self.term(b, env)?);
                self.binop(*op, a, b)
            }
            TermAst::Un(fe::UnOp::Not, a, _) => simp::not(self.term(a, env)?),
            TermAst::Un(fe::UnOp::Neg, a, _) => {
                simp::fold(sys, Expr::Unary(UnOp::Neg, Box::new(self.term(a, env)?)))
            }
            TermAst::Cond(c, a, b, _) => {
                let c = self.term(c, env)?;
                let a = self.term(a, env)?;
                let b = match b {
                    Some(b) => self.term(b, env)?,
                    None => Expr::Const(Value::Null),
                };
                simp::ite(c, a, b)
            }
            TermAst::Case(s, branches, other, _) => {
                let s = self.term(s, env)?;
                let mut acc = match other {
                    Some(o) => self.term(o, env)?,
                    None => Expr::Const(Value::Null),
                };
                for (v, r) in branches.iter().rev() {
                    let c = simp::eq(sys, s.clone(), self.term(v, env)?);
                    acc = simp::ite(c, self.term(r, env)?, acc);
                }
                acc
            }
            TermAst::Forall(binders, body, pos) | TermAst::Exists(binders, body, pos) => {
                let mut parts = Vec::new();
                for tuple in self.binder_tuples(binders, *pos)? {
                    parts.push(self.term(body, &env.with(tuple))?);
                }
                if matches!(t, TermAst::Forall(..)) {
                    simp::and_all(parts)
                } else {
                    simp::or_all(parts)
                }
            }
            TermAst::IsUndef(a, _) => simp::eq(sys, self.term(a, env)?, Expr::Const(Value::Null)),
            TermAst::SeqLit(items, _) => {
                let items = items.iter().map(|i| self.term(i, env)).collect::<TResult<Vec<_>>>()?;
                simp::fold(sys, Expr::Seq(SeqOp::Create, items))
            }
        })
    }

    fn binop(&self, op: fe::BinOp, a: Expr, b: Expr) -> Expr {
        use fe::BinOp as F;
        let sys = &self.sys;
        let ir = match op {
            F::Implies => return simp::or(simp::not(a), b),
            F::Iff => return simp::eq(sys, a, b),
            F::Add => BinOp::Add,
            F::Sub => BinOp::Sub,
            F::Mul => BinOp::Mul,
            F::Div => BinOp::Div,
            F::Mod => BinOp::Mod,
            F::Eq => BinOp::Eq,
            F::Ne => BinOp::Ne,
            F::Lt => BinOp::Lt,
            F::Le => BinOp::Le,
            F::Gt => BinOp::Gt,
            F::Ge => BinOp::Ge,
            F::And => BinOp::And,
            F::Or => BinOp::Or,
            F::Xor => BinOp::Xor,
        };
        simp::bin(sys, ir, a, b)
    }

    fn app(&self, name: &str, args: &[TermAst], env: &Env, pos: Pos) -> TResult<Expr> {
        if let Some(c) = self.consts.get(name) {
            return Ok(Expr::Const(Value::Record(*c)));
        }
        let args = args.iter().map(|a| self.term(a, env)).collect::<TResult<Vec<_>>>()?;
        if let Some(fl) = self.locations.get(name) {
            return self.location_read(name, &fl.loc, args, pos);
        }
        if let Some(&f) = self.funs.get(name) {
            let call = Expr::Call(f, args);
            let is_static = self.model.function(name).is_some_and(|d| d.kind == FunKind::Static);
            if self.fold_static && is_static {
                if let Expr::Call(_, a) = &call {
                    if a.iter().all(|x| matches!(x, Expr::Const(_))) {
                        if let Ok(v) = eval_expr(&self.sys, &call, &[]) {
                            return Ok(Expr::Const(v));
                        }
                    }
                }
            }
            return Ok(call);
        }
        if let Some(op) = SeqOp::from_name(name) {
            return Ok(simp::fold(&self.sys, Expr::Seq(op, args)));
        }
        err(pos, format!("unresolved name `{name}`"))
    }

    fn location_read(&self, name: &str, loc: &Loc, args: Vec<Expr>, pos: Pos) -> TResult<Expr> {
        Ok(match loc {
            Loc::Nullary(v) => Expr::Var(*v),
            Loc::Field(f) => self.sys.field_access(args.into_iter().next().unwrap(), *f),
            Loc::Flat(vars) => {
                if args.iter().all(|a| matches!(a, Expr::Const(_))) {
                    let key: Vec<Value> =
                        args.iter().map(|a| if let Expr::Const(v) = a { v.clone() } else { unreachable!() }).collect();
                    match vars.iter().find(|(k, _)| *k == key) {
                        Some((_, v)) => Expr::Var(*v),
                        None => return err(pos, format!("argument of `{name}` outside its domain")),
                    }
                } else {
                    let (_, last) = vars.last().expect("non-empty domain product");
                    let mut acc = Expr::Var(*last);
                    for (key, v) in vars.iter().rev().skip(1) {
                        let cond = simp::and_all(
                            args.iter().zip(key).map(|(a, k)| simp::eq(&self.sys, a.clone(), Expr::Const(k.clone()))),
                        );
                        acc = simp::ite(cond, Expr::Var(*v), acc);
                    }
                    acc
                }
            }
        })
    }

    // ---- rules ----------------------------------------------------------

    pub fn rule(&self, r: &RuleAst, env: &Env, depth: usize) -> TResult<IRule> {
        Ok(match r {
            RuleAst::Update(lhs, rhs, pos) => self.update(lhs, rhs, env, *pos)?,
            RuleAst::Cond(c, t, e, _) => {
                let c = self.term(c, env)?;
                let t = self.rule(t, env, depth)?;
                let e = e.as_ref().map(|e| self.rule(e, env, depth)).transpose()?;
                cond_rule(c, t, e)
            }
            RuleAst::Case(s, branches, other, _) => {
                let s = self.term(s, env)?;
                let mut acc = other.as_ref().map(|o| self.rule(o, env, depth)).transpose()?;
                for (v, body) in branches.iter().rev() {
                    let c = simp::eq(&self.sys, s.clone(), self.term(v, env)?);
                    let body = self.rule(body, env, depth)?;
                    acc = Some(cond_rule(c, body, acc));
                }
                acc.unwrap_or(IRule::Skip)
            }
            RuleAst::Choose(binders, cond, body, ifnone, pos) => {
                let mut branches = Vec::new();
                for tuple in self.binder_tuples(binders, *pos)? {
                    let env2 = env.with(tuple);
                    let c = self.term(cond, &env2)?;
                    if simp::as_bool(&c) == Some(false) {
                        continue;
                    }
                    branches.push((c, self.rule(body, &env2, depth)?));
                }
                let ifnone = ifnone.as_ref().map(|n| self.rule(n, env, depth)).transpose()?;
                match (branches.len(), ifnone) {
                    (0, None) => IRule::Skip,
                    (0, Some(n)) => n,
                    (1, None) if simp::as_bool(&branches[0].0) == Some(true) => branches.pop().unwrap().1,
                    (_, n) => IRule::Choose(branches, n.map(Box::new)),
                }
            }
            RuleAst::Forall(binders, cond, body, pos) => {
                let mut children = Vec::new();
                for tuple in self.binder_tuples(binders, *pos)? {
                    let env2 = env.with(tuple);
                    let c = self.term(cond, &env2)?;
                    if simp::as_bool(&c) == Some(false) {
                        continue;
                    }
                    children.push(cond_rule(c, self.rule(body, &env2, depth)?, None));
                }
                par_rule(children)
            }
            RuleAst::Par(rs, _) => {
                par_rule(rs.iter().map(|r| self.rule(r, env, depth)).collect::<TResult<Vec<_>>>()?)
            }
            RuleAst::Seq(rs, _) => {
                let mut children = rs.iter().map(|r| self.rule(r, env, depth)).collect::<TResult<Vec<_>>>()?;
                children.retain(|c| *c != IRule::Skip);
                match children.len() {
                    0 => IRule::Skip,
                    1 => children.pop().unwrap(),
                    _ => IRule::Seq(children),
                }
            }
            RuleAst::Let(bindings, body, _) => {
                let mut env2 = env.clone();
                for (n, t) in bindings {
                    let e = self.term(t, &env2)?;
                    env2 = env2.with([(n.clone(), e)]);
                }
                self.rule(body, &env2, depth)?
            }
            RuleAst::Skip(_) => IRule::Skip,
            RuleAst::MacroCall(name, args, pos) => {
                if depth >= self.opts.macro_depth {
                    return err(*pos, format!("unbounded inlining of `{name}`"));
                }
                let Some(def) = self.model.rule(name) else {
                    return err(*pos, format!("unresolved rule `{name}`"));
                };
                let actuals = args.iter().map(|a| self.term(a, env)).collect::<TResult<Vec<_>>>()?;
                let env2 = Env {
                    vars: def.params.iter().map(|b| b.var.clone()).zip(actuals).collect(),
                    self_: env.self_.clone(),
                };
                self.rule(&def.body, &env2, depth + 1)?
            }
            RuleAst::ProgramCall(t, pos) => {
                if depth >= self.opts.macro_depth {
                    return err(*pos, "unbounded inlining of agent program");
                }
                let Expr::Const(Value::Record(c)) = self.term(t, env)? else {
                    return err(*pos, "program() needs a constant agent");
                };
                let domain = &self.sys.records[self.sys.constants[c].record].name;
                let Some((_, rule_name)) = self.model.agent_programs().iter().find(|(d, _)| d == domain) else {
                    return err(*pos, format!("no program bound to agents of `{domain}`"));
                };
                let Some(def) = self.model.rule(rule_name) else {
                    return err(*pos, format!("unresolved rule `{rule_name}`"));
                };
                let env2 = Env { vars: Vec::new(), self_: Some(Expr::Const(Value::Record(c))) };
                self.rule(&def.body, &env2, depth + 1)?
            }
        })
    }

    fn update(&self, lhs: &TermAst, rhs: &TermAst, env: &Env, pos: Pos) -> TResult<IRule> {
        if let TermAst::App(name, _, _) = lhs {
            match self.locations.get(name) {
                Some(fl) if fl.kind == FunKind::Controlled => {}
                Some(_) => return err(pos, format!("monitored function `{name}` cannot be updated")),
                None => return err(pos, format!("`{name}` is not a controlled function")),
            }
        }
        let target = self.term(lhs, env)?;
        let rhs = self.term(rhs, env)?;
        let mut targets = Vec::new();
        if !lvalue_targets(target, Expr::bool(true), &mut targets) {
            return err(pos, "left-hand side is not an updatable location");
        }
        let mut acc: Option<IRule> = None;
        for (guard, lv) in targets.into_iter().rev() {
            let check = self.subset_check(&lv);
            let upd = IRule::Update { lv, rhs: rhs.clone(), check };
            acc = Some(match acc {
                None if simp::as_bool(&guard) == Some(true) => upd,
                rest => cond_rule(guard, upd, rest),
            });
        }
        Ok(acc.unwrap_or(IRule::Skip))
    }

    /// Assignments of the initial state: explicit initializers plus the first
    /// constant for uninitialized controlled locations of record type.
    pub fn init_actions(&self) -> TResult<Vec<Action>> {
        let mut actions = Vec::new();
        let mut covered = std::collections::HashSet::new();
        let mut assign = |lhs: &TermAst, value: &TermAst, env: &Env, pos: Pos, actions: &mut Vec<Action>| {
            let target = self.term(lhs, env)?;
            let rhs = self.term(value, env)?;
            let mut targets = Vec::new();
            if !lvalue_targets(target, Expr::bool(true), &mut targets) {
                return err(pos, "initializer target is not a location");
            }
            for (guard, lv) in targets {
                if simp::as_bool(&guard) != Some(true) {
                    return err(pos, "initializer target depends on the state");
                }
                if let LValue::Var(v) = lv {
                    covered.insert(v);
                }
                let check = self.subset_check(&lv);
                actions.push(Action::Assign(lv, rhs.clone()));
                actions.extend(check.map(Action::Assert));
            }
            Ok(())
        };
        let Some(init) = &self.model.init else { return Ok(actions) };
        let mut checks = Vec::new();
        for entry in &init.entries {
            let name = entry.function();
            if !matches!(self.locations.get(name), Some(fl) if fl.kind == FunKind::Controlled) {
                return err(entry.pos(), format!("initializer for non-controlled function `{name}`"));
            }
            match entry {
                fe::InitEntry::Simple { location, value, pos } => {
                    assign(location, value, &Env::default(), *pos, &mut checks)?;
                }
                fe::InitEntry::Group { function, binders, value: v, pos }
                | fe::InitEntry::Conditional { function, binders, cases: v, pos } => {
                    let lhs = TermAst::App(
                        function.clone(),
                        binders.iter().map(|b| TermAst::Var(b.var.clone(), *pos)).collect(),
                        *pos,
                    );
                    for tuple in self.binder_tuples(binders, *pos)? {
                        assign(&lhs, v, &Env::default().with(tuple), *pos, &mut checks)?;
                    }
                }
            }
        }
        let (assigns, asserts): (Vec<_>, Vec<_>) = checks.into_iter().partition(|a| matches!(a, Action::Assign(..)));
        actions.extend(assigns);
        for (v, var) in self.sys.variables.iter().enumerate() {
            let Type::Record(r) = var.ty else { continue };
            if var.kind != VarKind::Controlled || covered.contains(&v) {
                continue;
            }
            if let Some(c) = self.sys.constants.iter().position(|c| c.record == r) {
                actions.push(Action::Assign(LValue::Var(v), Expr::Const(Value::Record(c))));
            }
        }
        actions.extend(asserts);
        Ok(actions)
    }

    /// Membership assertion for a target of subset type, evaluated after the
    /// assignment.
    pub fn subset_check(&self, lv: &LValue) -> Option<Expr> {
        let (ty, read) = match lv {
            LValue::Var(v) => (&self.sys.variables[*v].ty, Expr::Var(*v)),
            LValue::Field(b, f) => {
                let r = super::super::gts::emit::infer_record(&self.sys, b, &[])?;
                (&self.sys.records[r].fields[*f].ty, Expr::Field(Box::new(b.clone()), *f))
            }
        };
        let Type::Alias(a) = ty else { return None };
        Some(membership(&self.sys.aliases[*a].values, read))
    }

    // ---- properties -----------------------------------------------------

    pub fn ltl(&self, f: &LtlAst, props: &mut Vec<(String, Expr)>) -> TResult<Ltl> {
        if !has_temporal(f) {
            let e = self.ltl_state(f)?;
            return Ok(match simp::as_bool(&e) {
                Some(true) => Ltl::True,
                Some(false) => Ltl::False,
                None => {
                    props.push((format!("P{}", props.len() + 1), e));
                    Ltl::Atom(props.len() - 1)
                }
            });
        }
        use fe::BinOp as F;
        Ok(match f {
            LtlAst::Atom(_) => unreachable!(),
            LtlAst::Not(a) => Ltl::not(self.ltl(a, props)?),
            LtlAst::Bin(op, a, b) => {
                let (a, b) = (Box::new(self.ltl(a, props)?), Box::new(self.ltl(b, props)?));
                match op {
                    F::And => Ltl::And(a, b),
                    F::Or => Ltl::Or(a, b),
                    F::Implies => Ltl::Implies(a, b),
                    F::Iff | F::Eq => Ltl::Iff(a, b),
                    F::Xor | F::Ne => Ltl::Xor(a, b),
                    other => {
                        return err(Pos::default(), format!("`{}` applied to temporal formulas", other.symbol()))
                    }
                }
            }
            LtlAst::Always(a) => Ltl::always(self.ltl(a, props)?),
            LtlAst::Eventually(a) => Ltl::eventually(self.ltl(a, props)?),
            LtlAst::Until(a, b) => Ltl::until(self.ltl(a, props)?, self.ltl(b, props)?),
            LtlAst::Release(a, b) => Ltl::release(self.ltl(a, props)?, self.ltl(b, props)?),
        })
    }

    fn ltl_state(&self, f: &LtlAst) -> TResult<Expr> {
        Ok(match f {
            LtlAst::Atom(t) => {
                let e = self.term(t, &Env::default())?;
                if let Expr::Const(v) = &e {
                    if v.as_bool().is_none() {
                        return err(t.pos(), "non-boolean atom in temporal formula");
                    }
                }
                e
            }
            LtlAst::Not(a) => simp::not(self.ltl_state(a)?),
            LtlAst::Bin(op, a, b) => self.binop(*op, self.ltl_state(a)?, self.ltl_state(b)?),
            _ => unreachable!("temporal operator in state formula"),
        })
    }
}

fn fe_enum(d: &fe::DomainDecl) -> EnumDef {
    EnumDef { name: d.name.clone(), elements: d.enum_elements.clone() }
}

fn var_kind(k: FunKind) -> VarKind {
    match k {
        FunKind::Monitored => VarKind::Monitored,
        _ => VarKind::Controlled,
    }
}

fn has_temporal(f: &LtlAst) -> bool {
    match f {
        LtlAst::Atom(_) => false,
        LtlAst::Not(a) => has_temporal(a),
        LtlAst::Bin(_, a, b) => has_temporal(a) || has_temporal(b),
        _ => true,
    }
}

pub(crate) fn membership(values: &[Value], read: Expr) -> Expr {
    let ints: Option<Vec<i64>> =
        values.iter().map(|v| if let Value::Int(i) = v { Some(*i) } else { None }).collect();
    if let Some(ints) = ints {
        let (lo, hi) = (*ints.iter().min().unwrap_or(&0), *ints.iter().max().unwrap_or(&0));
        if !ints.is_empty() && (hi - lo) as usize + 1 == ints.len() {
            return Expr::bin(
                BinOp::And,
                Expr::bin(BinOp::Ge, read.clone(), Expr::Const(Value::Int(lo))),
                Expr::bin(BinOp::Le, read, Expr::Const(Value::Int(hi))),
            );
        }
    }
    values
        .iter()
        .map(|v| Expr::bin(BinOp::Eq, read.clone(), Expr::Const(v.clone())))
        .reduce(|a, b| Expr::bin(BinOp::Or, a, b))
        .unwrap_or(Expr::bool(false))
}

/// Splits a location expression into guarded assignable targets.
fn lvalue_targets(e: Expr, guard: Expr, out: &mut Vec<(Expr, LValue)>) -> bool {
    match e {
        Expr::Var(v) => out.push((guard, LValue::Var(v))),
        Expr::Field(b, f) => out.push((guard, LValue::Field(*b, f))),
        Expr::Ite(c, a, b) => {
            return lvalue_targets(*a, simp::and(guard.clone(), (*c).clone()), out)
                && lvalue_targets(*b, simp::and(guard, simp::not(*c)), out)
        }
        _ => return false,
    }
    true
}

fn cond_rule(c: Expr, then: IRule, otherwise: Option<IRule>) -> IRule {
    match simp::as_bool(&c) {
        Some(true) => then,
        Some(false) => otherwise.unwrap_or(IRule::Skip),
        None => match (then, otherwise) {
            (IRule::Skip, None | Some(IRule::Skip)) => IRule::Skip,
            (IRule::Skip, Some(e)) => IRule::Cond(simp::not(c), Box::new(e), None),
            (t, Some(IRule::Skip) | None) => IRule::Cond(c, Box::new(t), None),
            (t, Some(e)) => IRule::Cond(c, Box::new(t), Some(Box::new(e))),
        },
    }
}

fn par_rule(mut children: Vec<IRule>) -> IRule {
    children.retain(|c| *c != IRule::Skip);
    match children.len() {
        0 => IRule::Skip,
        1 => children.pop().unwrap(),
        _ => IRule::Par(children),
    }
}
