//! Direct interpreter for parsed models, used as a reference for the
//! translated systems. It works on update sets and never touches the
//! guarded-command representation.

use asm_check_core::frontend::{
    BinOp, Binder, DomainKind, DomainRef, Extension, FunKind, Literal, LtlAst, ModelAst, RuleAst, TermAst, UnOp,
};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OVal {
    Undef,
    Bool(bool),
    Int(i64),
    /// Enum element or static constant.
    Sym(String),
}

impl OVal {
    pub fn render(&self) -> String {
        match self {
            OVal::Undef => "null".into(),
            OVal::Bool(b) => b.to_string(),
            OVal::Int(i) => i.to_string(),
            OVal::Sym(s) => s.clone(),
        }
    }

    fn bool(&self) -> Result<bool, String> {
        match self {
            OVal::Bool(b) => Ok(*b),
            other => Err(format!("expected boolean, found {other:?}")),
        }
    }

    fn int(&self) -> Result<i64, String> {
        match self {
            OVal::Int(i) => Ok(*i),
            other => Err(format!("expected integer, found {other:?}")),
        }
    }
}

/// Location key to value; keys look like `x` or `phil_1.eating`.
pub type OState = BTreeMap<String, OVal>;
type Updates = Vec<(String, OVal)>;
pub type Env = HashMap<String, Bind>;

/// Macro parameters are passed by name.
#[derive(Clone, Debug)]
pub enum Bind {
    Val(OVal),
    Name(TermAst, Env),
}

pub struct Oracle<'m> {
    m: &'m ModelAst,
}

fn product(lists: &[Vec<OVal>]) -> Vec<Vec<OVal>> {
    lists.iter().fold(vec![vec![]], |acc, l| {
        acc.iter()
            .flat_map(|p| {
                l.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect()
    })
}

impl<'m> Oracle<'m> {
    pub fn new(m: &'m ModelAst) -> Self {
        Oracle { m }
    }

    /// `x`, `phil_1.eating` for a field of a static constant, `passed_10`
    /// otherwise.
    fn key(&self, f: &str, args: &[OVal]) -> String {
        match args {
            [] => f.to_string(),
            [OVal::Sym(c)] if self.m.function(c).is_some_and(|d| d.is_constant_element) => format!("{c}.{f}"),
            _ => std::iter::once(f.to_string()).chain(args.iter().map(OVal::render)).collect::<Vec<_>>().join("_"),
        }
    }

    pub fn elements(&self, d: &DomainRef) -> Vec<OVal> {
        let name = d.named().expect("sequence domains are not supported by the oracle");
        if name == "Boolean" {
            return vec![OVal::Bool(true), OVal::Bool(false)];
        }
        let decl = self.m.domain(name).unwrap_or_else(|| panic!("unknown domain {name}"));
        match (&decl.kind, &decl.extension) {
            (DomainKind::Enum, _) => decl.enum_elements.iter().cloned().map(OVal::Sym).collect(),
            (DomainKind::ConcreteSubset, Some(Extension::Range(a, b))) => (*a..=*b).map(OVal::Int).collect(),
            (DomainKind::ConcreteSubset, Some(Extension::Set(ls))) => ls.iter().map(lit).collect(),
            (DomainKind::Abstract | DomainKind::AgentSubset, _) => self
                .m
                .functions
                .iter()
                .filter(|f| f.is_constant_element && f.codomain.named() == Some(name))
                .map(|f| OVal::Sym(f.name.clone()))
                .collect(),
            _ => panic!("domain {name} is not finite"),
        }
    }

    fn binder_envs(&self, binders: &[Binder], env: &Env) -> Vec<Env> {
        let lists: Vec<Vec<OVal>> =
            binders.iter().map(|b| self.elements(&DomainRef::Named(b.domain.clone()))).collect();
        product(&lists)
            .into_iter()
            .map(|vals| {
                let mut e = env.clone();
                for (b, v) in binders.iter().zip(vals) {
                    e.insert(b.var.clone(), Bind::Val(v));
                }
                e
            })
            .collect()
    }

    pub fn dynamic_keys(&self, f: &str) -> Vec<String> {
        let decl = self.m.function(f).unwrap();
        let lists: Vec<Vec<OVal>> = decl.arg_domains.iter().map(|d| self.elements(d)).collect();
        product(&lists).iter().map(|a| self.key(f, a)).collect()
    }

    /// Evaluates `t`; with no state, reading a dynamic function fails.
    pub fn term(&self, t: &TermAst, env: &Env, s: Option<&OState>) -> Result<OVal, String> {
        Ok(match t {
            TermAst::Lit(l, _) => lit(l),
            TermAst::EnumElem(n, _) => OVal::Sym(n.clone()),
            TermAst::Var(n, _) => match env.get(n).ok_or_else(|| format!("unbound {n}"))? {
                Bind::Val(v) => v.clone(),
                Bind::Name(t, e) => self.term(t, e, s)?,
            },
            TermAst::SelfRef(_) => match env.get("self") {
                Some(Bind::Val(v)) => v.clone(),
                _ => return Err("unbound self".into()),
            },
            TermAst::App(f, args, _) => {
                let decl = self.m.function(f).ok_or_else(|| format!("unknown function {f}"))?;
                let vals = args.iter().map(|a| self.term(a, env, s)).collect::<Result<Vec<_>, _>>()?;
                match decl.kind {
                    FunKind::Controlled | FunKind::Monitored => {
                        let s = s.ok_or("dynamic read")?;
                        s.get(&self.key(f, &vals)).cloned().ok_or_else(|| format!("no location {}", self.key(f, &vals)))?
                    }
                    _ if decl.is_constant_element => OVal::Sym(f.clone()),
                    _ => {
                        let def = self.m.static_def(f).ok_or_else(|| format!("no definition for {f}"))?;
                        let inner: Env = def.params.iter().map(|p| p.var.clone()).zip(vals.into_iter().map(Bind::Val)).collect();
                        self.term(&def.body, &inner, s)?
                    }
                }
            }
            TermAst::Bin(op, a, b, _) => {
                let x = self.term(a, env, s)?;
                let y = self.term(b, env, s)?;
                match op {
                    BinOp::Eq => OVal::Bool(x == y),
                    BinOp::Ne => OVal::Bool(x != y),
                    BinOp::And => OVal::Bool(x.bool()? && y.bool()?),
                    BinOp::Or => OVal::Bool(x.bool()? || y.bool()?),
                    BinOp::Xor => OVal::Bool(x.bool()? != y.bool()?),
                    BinOp::Implies => OVal::Bool(!x.bool()? || y.bool()?),
                    BinOp::Iff => OVal::Bool(x.bool()? == y.bool()?),
                    BinOp::Lt => OVal::Bool(x.int()? < y.int()?),
                    BinOp::Le => OVal::Bool(x.int()? <= y.int()?),
                    BinOp::Gt => OVal::Bool(x.int()? > y.int()?),
                    BinOp::Ge => OVal::Bool(x.int()? >= y.int()?),
                    BinOp::Add => OVal::Int(x.int()? + y.int()?),
                    BinOp::Sub => OVal::Int(x.int()? - y.int()?),
                    BinOp::Mul => OVal::Int(x.int()? * y.int()?),
                    BinOp::Div => OVal::Int(x.int()?.checked_div(y.int()?).ok_or("division by zero")?),
                    BinOp::Mod => OVal::Int(x.int()?.checked_rem(y.int()?).ok_or("division by zero")?),
                }
            }
            TermAst::Un(UnOp::Not, a, _) => OVal::Bool(!self.term(a, env, s)?.bool()?),
            TermAst::Un(UnOp::Neg, a, _) => OVal::Int(-self.term(a, env, s)?.int()?),
            TermAst::Cond(c, a, b, _) => {
                if self.term(c, env, s)?.bool()? {
                    self.term(a, env, s)?
                } else {
                    match b {
                        Some(b) => self.term(b, env, s)?,
                        None => OVal::Undef,
                    }
                }
            }
            TermAst::Case(scrut, branches, other, _) => {
                let v = self.term(scrut, env, s)?;
                for (c, r) in branches {
                    if self.term(c, env, s)? == v {
                        return self.term(r, env, s);
                    }
                }
                match other {
                    Some(o) => self.term(o, env, s)?,
                    None => OVal::Undef,
                }
            }
            TermAst::Forall(bs, body, _) => {
                let mut all = true;
                for e in self.binder_envs(bs, env) {
                    all &= self.term(body, &e, s)?.bool()?;
                }
                OVal::Bool(all)
            }
            TermAst::Exists(bs, body, _) => {
                let mut any = false;
                for e in self.binder_envs(bs, env) {
                    any |= self.term(body, &e, s)?.bool()?;
                }
                OVal::Bool(any)
            }
            TermAst::IsUndef(a, _) => OVal::Bool(self.term(a, env, s)? == OVal::Undef),
            TermAst::SeqLit(..) => return Err("sequences are not supported by the oracle".into()),
        })
    }

    fn target(&self, lhs: &TermAst, env: &Env, s: Option<&OState>) -> Result<String, String> {
        if let TermAst::Var(n, _) = lhs {
            return match env.get(n) {
                Some(Bind::Name(t, e)) => self.target(t, e, s),
                _ => Err(format!("`{n}` is not a location")),
            };
        }
        let TermAst::App(f, args, _) = lhs else { return Err(format!("bad update target {lhs:?}")) };
        let vals = args.iter().map(|a| self.term(a, env, s)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.key(f, &vals))
    }

    fn agent_program(&self, agent: &OVal) -> &'m RuleAst {
        let OVal::Sym(c) = agent else { panic!("program of non-agent {agent:?}") };
        let domain = self.m.function(c).and_then(|f| f.codomain.named()).expect("agent constant");
        let (_, rule) = self.m.agent_programs().iter().find(|(d, _)| d == domain).expect("agent program");
        &self.m.rule(rule).expect("program rule").body
    }

    fn macro_env(&self, name: &str, args: &[TermAst], env: &Env) -> (&'m RuleAst, Env) {
        let def = self.m.rule(name).unwrap_or_else(|| panic!("unknown rule {name}"));
        let mut inner = Env::new();
        if let Some(me) = env.get("self") {
            inner.insert("self".into(), me.clone());
        }
        for (p, a) in def.params.iter().zip(args) {
            inner.insert(p.var.clone(), Bind::Name(a.clone(), env.clone()));
        }
        (&def.body, inner)
    }

    /// Function written by an update target, looking through by-name
    /// parameters.
    fn target_function(&self, lhs: &TermAst, env: &Env) -> String {
        match lhs {
            TermAst::App(f, _, _) => f.clone(),
            TermAst::Var(n, _) => match env.get(n) {
                Some(Bind::Name(t, e)) => self.target_function(t, e),
                _ => panic!("`{n}` is not a location"),
            },
            other => panic!("bad update target {other:?}"),
        }
    }

    /// Locations a rule may write, resolved as far as static information
    /// allows.
    fn may_write(&self, r: &RuleAst, env: &Env) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_writes(r, env, &mut out, 0);
        out
    }

    fn collect_writes(&self, r: &RuleAst, env: &Env, out: &mut BTreeSet<String>, depth: usize) {
        assert!(depth < 64, "macro recursion too deep");
        match r {
            RuleAst::Update(lhs, _, _) => match self.target(lhs, env, None) {
                Ok(k) => {
                    out.insert(k);
                }
                Err(_) => out.extend(self.dynamic_keys(&self.target_function(lhs, env))),
            },
            RuleAst::Cond(_, a, b, _) => {
                self.collect_writes(a, env, out, depth);
                if let Some(b) = b {
                    self.collect_writes(b, env, out, depth);
                }
            }
            RuleAst::Case(_, branches, other, _) => {
                for (_, b) in branches {
                    self.collect_writes(b, env, out, depth);
                }
                if let Some(o) = other {
                    self.collect_writes(o, env, out, depth);
                }
            }
            RuleAst::Choose(bs, _, body, ifnone, _) => {
                for e in self.binder_envs(bs, env) {
                    self.collect_writes(body, &e, out, depth);
                }
                if let Some(n) = ifnone {
                    self.collect_writes(n, env, out, depth);
                }
            }
            RuleAst::Forall(bs, _, body, _) => {
                for e in self.binder_envs(bs, env) {
                    self.collect_writes(body, &e, out, depth);
                }
            }
            RuleAst::Par(rs, _) | RuleAst::Seq(rs, _) => {
                for c in rs {
                    self.collect_writes(c, env, out, depth);
                }
            }
            RuleAst::Let(binds, body, _) => {
                let mut e = env.clone();
                for (v, t) in binds {
                    match self.term(t, &e, None) {
                        Ok(x) => {
                            e.insert(v.clone(), Bind::Val(x));
                        }
                        Err(_) => {
                            e.remove(v);
                        }
                    }
                }
                self.collect_writes(body, &e, out, depth);
            }
            RuleAst::Skip(_) => {}
            RuleAst::MacroCall(name, args, _) => {
                let (body, inner) = self.macro_env(name, args, env);
                self.collect_writes(body, &inner, out, depth + 1);
            }
            RuleAst::ProgramCall(agent, _) => {
                let agents = match self.term(agent, env, None) {
                    Ok(a) => vec![a],
                    Err(_) => self
                        .m
                        .functions
                        .iter()
                        .filter(|f| f.is_constant_element && self.m.agent_programs().iter().any(|(d, _)| f.codomain.named() == Some(d)))
                        .map(|f| OVal::Sym(f.name.clone()))
                        .collect(),
                };
                for a in agents {
                    let mut e = Env::new();
                    e.insert("self".into(), Bind::Val(a.clone()));
                    self.collect_writes(self.agent_program(&a), &e, out, depth + 1);
                }
            }
        }
    }

    /// Every possible outcome of firing `r` in `s`; `None` means no update
    /// was produced.
    pub fn rule(&self, r: &RuleAst, env: &Env, s: &OState) -> Result<Vec<Option<Updates>>, String> {
        Ok(match r {
            RuleAst::Update(lhs, rhs, _) => vec![Some(vec![(self.target(lhs, env, Some(s))?, self.term(rhs, env, Some(s))?)])],
            RuleAst::Cond(g, a, b, _) => {
                if self.term(g, env, Some(s))?.bool()? {
                    self.rule(a, env, s)?
                } else {
                    match b {
                        Some(b) => self.rule(b, env, s)?,
                        None => vec![None],
                    }
                }
            }
            RuleAst::Case(scrut, branches, other, _) => {
                let v = self.term(scrut, env, Some(s))?;
                for (c, b) in branches {
                    if self.term(c, env, Some(s))? == v {
                        return self.rule(b, env, s);
                    }
                }
                match other {
                    Some(o) => self.rule(o, env, s)?,
                    None => vec![None],
                }
            }
            RuleAst::Choose(bs, g, body, ifnone, _) => {
                let mut out = Vec::new();
                let mut any = false;
                for e in self.binder_envs(bs, env) {
                    if self.term(g, &e, Some(s))?.bool()? {
                        any = true;
                        out.extend(self.rule(body, &e, s)?);
                    }
                }
                if !any {
                    out = match ifnone {
                        Some(n) => self.rule(n, env, s)?,
                        None => vec![None],
                    };
                }
                out
            }
            RuleAst::Forall(bs, g, body, _) => {
                let mut children = Vec::new();
                for e in self.binder_envs(bs, env) {
                    if self.term(g, &e, Some(s))?.bool()? {
                        children.push((body.as_ref(), e));
                    }
                }
                self.par(&children, s)?
            }
            RuleAst::Par(rs, _) => {
                let children: Vec<(&RuleAst, Env)> = rs.iter().map(|c| (c, env.clone())).collect();
                self.par(&children, s)?
            }
            RuleAst::Seq(rs, _) => {
                let mut partial: Vec<(OState, Option<Updates>)> = vec![(s.clone(), None)];
                for c in rs {
                    let mut next = Vec::new();
                    for (st, acc) in partial {
                        for o in self.rule(c, env, &st)? {
                            match o {
                                None => next.push((st.clone(), acc.clone())),
                                Some(u) => {
                                    let mut st2 = st.clone();
                                    let mut acc2 = acc.clone().unwrap_or_default();
                                    for (k, v) in u {
                                        st2.insert(k.clone(), v.clone());
                                        acc2.retain(|(k2, _)| k2 != &k);
                                        acc2.push((k, v));
                                    }
                                    next.push((st2, Some(acc2)));
                                }
                            }
                        }
                    }
                    partial = next;
                }
                partial.into_iter().map(|(_, u)| u).collect()
            }
            RuleAst::Let(binds, body, _) => {
                let mut e = env.clone();
                for (v, t) in binds {
                    let x = self.term(t, &e, Some(s))?;
                    e.insert(v.clone(), Bind::Val(x));
                }
                self.rule(body, &e, s)?
            }
            RuleAst::Skip(_) => vec![None],
            RuleAst::MacroCall(name, args, _) => {
                let (body, inner) = self.macro_env(name, args, env);
                self.rule(body, &inner, s)?
            }
            RuleAst::ProgramCall(agent, _) => {
                let a = self.term(agent, env, Some(s))?;
                let mut e = Env::new();
                e.insert("self".into(), Bind::Val(a.clone()));
                self.rule(self.agent_program(&a), &e, s)?
            }
        })
    }

    /// Children fire in order; a child whose possible writes meet the
    /// locations already claimed by an earlier firing child is dropped.
    fn par(&self, children: &[(&RuleAst, Env)], s: &OState) -> Result<Vec<Option<Updates>>, String> {
        let mut partial: Vec<(BTreeSet<String>, Option<Updates>)> = vec![(BTreeSet::new(), None)];
        for (c, e) in children {
            let writes = self.may_write(c, e);
            let outcomes = self.rule(c, e, s)?;
            let mut next = Vec::new();
            for (claimed, acc) in &partial {
                for o in &outcomes {
                    match o {
                        Some(u) if claimed.is_disjoint(&writes) => {
                            let mut acc2 = acc.clone().unwrap_or_default();
                            acc2.extend(u.iter().cloned());
                            next.push((claimed.union(&writes).cloned().collect(), Some(acc2)));
                        }
                        _ => next.push((claimed.clone(), acc.clone())),
                    }
                }
            }
            partial = next;
        }
        Ok(partial.into_iter().map(|(_, u)| u).collect())
    }

    /// Value of a location no initialization mentions: `false`, `0`, the
    /// first enum element or the first constant of an abstract domain.
    fn type_default(&self, d: &DomainRef) -> OVal {
        match d.named() {
            Some("Boolean") => OVal::Bool(false),
            Some("Integer" | "Natural") => OVal::Int(0),
            Some(n) if self.m.domain(n).is_some_and(|x| x.kind != DomainKind::ConcreteSubset) => {
                self.elements(d).into_iter().next().unwrap_or(OVal::Undef)
            }
            _ => OVal::Undef,
        }
    }

    fn monitored_keys(&self) -> Vec<(String, Vec<OVal>)> {
        self.m
            .functions
            .iter()
            .filter(|f| f.kind == FunKind::Monitored)
            .flat_map(|f| {
                let codomain = self.elements(&f.codomain);
                self.dynamic_keys(&f.name).into_iter().map(move |k| (k, codomain.clone()))
            })
            .collect()
    }

    /// Every assignment of the monitored locations on top of `s`.
    fn with_monitored(&self, s: &OState) -> Vec<OState> {
        let keys = self.monitored_keys();
        let lists: Vec<Vec<OVal>> = keys.iter().map(|(_, vs)| vs.clone()).collect();
        product(&lists)
            .into_iter()
            .map(|vals| {
                let mut t = s.clone();
                for ((k, _), v) in keys.iter().zip(vals) {
                    t.insert(k.clone(), v);
                }
                t
            })
            .collect()
    }

    pub fn initial_states(&self) -> Result<Vec<OState>, String> {
        let mut s = OState::new();
        let init = self.m.init.as_ref();
        for f in self.m.functions.iter().filter(|f| f.kind == FunKind::Controlled) {
            let default = self.type_default(&f.codomain);
            for k in self.dynamic_keys(&f.name) {
                s.insert(k, default.clone());
            }
        }
        let empty = OState::new();
        for entry in init.map(|i| i.entries.as_slice()).unwrap_or(&[]) {
            use asm_check_core::frontend::InitEntry;
            match entry {
                InitEntry::Simple { location, value, .. } => {
                    let k = self.target(location, &Env::new(), None)?;
                    s.insert(k, self.term(value, &Env::new(), Some(&empty))?);
                }
                InitEntry::Group { function, binders, value, .. }
                | InitEntry::Conditional { function, binders, cases: value, .. } => {
                    for e in self.binder_envs(binders, &Env::new()) {
                        let args: Vec<OVal> = binders
                            .iter()
                            .map(|b| match &e[&b.var] {
                                Bind::Val(v) => v.clone(),
                                Bind::Name(..) => unreachable!(),
                            })
                            .collect();
                        s.insert(self.key(function, &args), self.term(value, &e, Some(&empty))?);
                    }
                }
            }
        }
        Ok(self.with_monitored(&s))
    }

    pub fn successors(&self, s: &OState) -> Result<Vec<OState>, String> {
        let mut out = Vec::new();
        for o in self.rule(&self.m.main_rule.body, &Env::new(), s)? {
            let mut t = s.clone();
            for (k, v) in o.unwrap_or_default() {
                t.insert(k, v);
            }
            out.extend(self.with_monitored(&t));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Breadth-first reachable set; gives up past `cap` states.
    pub fn reachable(&self, cap: usize) -> Result<Reach, String> {
        let mut seen: HashSet<OState> = HashSet::new();
        let mut edges = BTreeMap::new();
        let mut queue: VecDeque<OState> = VecDeque::new();
        for s in self.initial_states()? {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
        let initial = seen.clone();
        while let Some(s) = queue.pop_front() {
            let succ = self.successors(&s)?;
            for t in &succ {
                if seen.insert(t.clone()) {
                    if seen.len() > cap {
                        return Err(format!("more than {cap} states"));
                    }
                    queue.push_back(t.clone());
                }
            }
            edges.insert(s, succ);
        }
        Ok(Reach { initial, states: seen, edges })
    }

    /// State formula value; `None` when `f` has a temporal operator.
    pub fn state_formula(&self, f: &LtlAst, s: &OState) -> Option<bool> {
        Some(match f {
            LtlAst::Atom(t) => self.term(t, &Env::new(), Some(s)).ok()?.bool().ok()?,
            LtlAst::Not(a) => !self.state_formula(a, s)?,
            LtlAst::Bin(op, a, b) => {
                let x = self.state_formula(a, s)?;
                let y = self.state_formula(b, s)?;
                match op {
                    BinOp::And => x && y,
                    BinOp::Or => x || y,
                    BinOp::Implies => !x || y,
                    BinOp::Iff | BinOp::Eq => x == y,
                    BinOp::Xor | BinOp::Ne => x != y,
                    _ => return None,
                }
            }
            _ => return None,
        })
    }

    /// Verdict of an invariance property `g(p)` or `not(f(p))`; `None` for
    /// other shapes.
    pub fn invariance_verdict(&self, f: &LtlAst, reach: &Reach) -> Option<bool> {
        let (p, negate) = match f {
            LtlAst::Always(p) => (p.as_ref(), false),
            LtlAst::Not(inner) => match inner.as_ref() {
                LtlAst::Eventually(p) => (p.as_ref(), true),
                _ => return None,
            },
            _ => return None,
        };
        let mut all = true;
        for s in &reach.states {
            all &= self.state_formula(p, s)? != negate;
        }
        Some(all)
    }
}

pub struct Reach {
    pub initial: HashSet<OState>,
    pub states: HashSet<OState>,
    pub edges: BTreeMap<OState, Vec<OState>>,
}

fn lit(l: &Literal) -> OVal {
    match l {
        Literal::Bool(b) => OVal::Bool(*b),
        Literal::Int(i) => OVal::Int(*i),
        Literal::Undef => OVal::Undef,
        other => panic!("literal {other:?} is not supported by the oracle"),
    }
}
