//! Lays out elaborated rules as locations and guarded commands of the main
//! thread.
//!
//! Every rule is compiled between an entry location and two exits: `c` when
//! the rule performed an update, `n` when it did nothing. Parallel blocks
//! are laid out as a lattice of intermediate locations whose labels record,
//! for each child, whether it changed something (`C`) or not (`N`).

use super::lower::IRule;
use super::simp;
use super::{LatticeInfo, TranslationStats};
use crate::gts::emit::infer_record;
use crate::gts::*;
use std::collections::{BTreeSet, HashMap};

pub(crate) struct Encoder<'a> {
    sys: &'a mut System,
    fun_reads: Vec<BTreeSet<VarId>>,
    locs: Vec<Location>,
    parent: Vec<usize>,
    protected: Vec<bool>,
    counter: usize,
    guards: Vec<Expr>,
    /// Reads of these variables are redirected to their snapshots.
    shadow: HashMap<VarId, VarId>,
    /// Written flags used for conflict detection in strict mode.
    flags: HashMap<VarId, VarId>,
    strict: bool,
    pub stats: TranslationStats,
}

impl<'a> Encoder<'a> {
    pub fn new(sys: &'a mut System, strict: bool) -> Encoder<'a> {
        let fun_reads = function_reads(sys);
        Encoder {
            sys,
            fun_reads,
            locs: Vec::new(),
            parent: Vec::new(),
            protected: Vec::new(),
            counter: 2,
            guards: Vec::new(),
            shadow: HashMap::new(),
            flags: HashMap::new(),
            strict,
            stats: TranslationStats::default(),
        }
    }

    pub fn new_loc(&mut self, label: String, protected: bool) -> LocId {
        self.locs.push(Location { label, init: false, commands: Vec::new() });
        self.parent.push(self.locs.len() - 1);
        self.protected.push(protected);
        self.locs.len() - 1
    }

    fn fresh(&mut self) -> LocId {
        let k = self.counter;
        self.counter += 1;
        self.new_loc(format!("loc{k}"), false)
    }

    fn find(&self, mut l: LocId) -> LocId {
        while self.parent[l] != l {
            l = self.parent[l];
        }
        l
    }

    fn emit(&mut self, at: LocId, guard: Option<Expr>, actions: Vec<Action>, target: LocId) {
        let guard = match guard.as_ref().and_then(simp::as_bool) {
            Some(false) => return,
            Some(true) => None,
            None => guard,
        };
        let at = self.find(at);
        self.locs[at].commands.push(GuardedCmd { guard, actions, visible: false, target });
    }

    pub fn emit_visible(&mut self, at: LocId, actions: Vec<Action>, target: LocId) {
        let at = self.find(at);
        self.locs[at].commands.push(GuardedCmd { guard: None, actions, visible: true, target });
    }

    pub fn mark_init(&mut self, at: LocId) {
        self.locs[at].init = true;
    }

    fn push_guard(&mut self, g: Expr) {
        self.guards.push(g);
        self.stats.guard_pushes += 1;
        self.stats.max_guard_depth = self.stats.max_guard_depth.max(self.guards.len());
    }

    fn pop_guard(&mut self) {
        self.guards.pop();
        self.stats.guard_pops += 1;
    }

    fn guard(&self) -> Option<Expr> {
        if self.guards.is_empty() {
            None
        } else {
            Some(simp::and_all(self.guards.iter().cloned()))
        }
    }

    /// Routes `at` to `n` without doing anything.
    fn skip(&mut self, at: LocId, n: LocId) {
        let (at, n) = (self.find(at), self.find(n));
        if at == n {
            return;
        }
        if self.locs[at].commands.is_empty() && !self.protected[at] {
            self.parent[at] = n;
        } else {
            self.emit(at, None, Vec::new(), n);
        }
    }

    pub fn rule(&mut self, r: &IRule, at: LocId, c: LocId, n: LocId) {
        match r {
            IRule::Skip => self.skip(at, n),
            IRule::Update { lv, rhs, check } => {
                self.updates(&[(lv, rhs, check.as_ref())], at, c, n);
            }
            IRule::Cond(cond, then, otherwise) => {
                let cs = self.sh(cond);
                match otherwise {
                    None => {
                        self.push_guard(cs);
                        self.rule(then, at, c, n);
                        self.pop_guard();
                    }
                    Some(e) => {
                        let mid = self.fresh();
                        self.push_guard(cs.clone());
                        self.rule(then, at, c, mid);
                        self.pop_guard();
                        self.push_guard(simp::not(cs));
                        self.rule(e, mid, c, n);
                        self.pop_guard();
                    }
                }
            }
            IRule::Choose(branches, ifnone) => self.choose(branches, ifnone.as_deref(), at, c, n),
            IRule::Par(children) => self.par(children, at, c, n),
            IRule::Seq(children) => self.seq(children, at, c, n),
        }
    }

    fn updates(&mut self, ups: &[(&LValue, &Expr, Option<&Expr>)], at: LocId, c: LocId, n: LocId) {
        let mut actions = Vec::new();
        for (lv, rhs, _) in ups {
            let lv = self.sh_lv(lv);
            actions.push(Action::Assign(lv, self.sh(rhs)));
        }
        actions.extend(ups.iter().filter_map(|(_, _, ch)| ch.map(|e| Action::Assert(e.clone()))));
        let g = self.guard();
        let flagged = match ups {
            [(LValue::Var(v), rhs, _)] => self.flags.get(v).map(|w| (*v, *w, self.sh(rhs))),
            _ => None,
        };
        if let Some((v, w, rhs)) = flagged {
            let bad = simp::and(Expr::Var(w), Expr::bin(BinOp::Ne, Expr::Var(v), rhs.clone()));
            actions.push(Action::Assign(LValue::Var(w), Expr::bool(true)));
            let ok = opt_and(g.clone(), simp::not(bad.clone()));
            self.emit(at, Some(ok), actions, c);
            let conflict = opt_and(g.clone(), bad);
            self.emit(at, Some(conflict), vec![Action::Assert(Expr::bin(BinOp::Eq, Expr::Var(v), rhs))], c);
        } else {
            self.emit(at, g.clone(), actions, c);
        }
        if let Some(g) = g {
            self.emit(at, Some(simp::not(g)), Vec::new(), n);
        }
    }

    /// Guards a block: its body is compiled from the returned location with
    /// an empty guard stack.
    fn block_entry(&mut self, at: LocId, n: LocId) -> LocId {
        match self.guard() {
            None => at,
            Some(g) => {
                let entry = self.fresh();
                self.emit(at, Some(g.clone()), Vec::new(), entry);
                self.emit(at, Some(simp::not(g)), Vec::new(), n);
                entry
            }
        }
    }

    fn choose(&mut self, branches: &[(Expr, IRule)], ifnone: Option<&IRule>, at: LocId, c: LocId, n: LocId) {
        let g = self.guard();
        let saved = std::mem::take(&mut self.guards);
        let mut negs = Vec::new();
        for (cond, body) in branches {
            let cs = self.sh(cond);
            let entry = self.fresh();
            self.emit(at, Some(opt_and(g.clone(), cs.clone())), Vec::new(), entry);
            negs.push(simp::not(cs));
            self.rule(body, entry, c, n);
        }
        let none = opt_and(g.clone(), simp::and_all(negs));
        match ifnone {
            Some(r) => {
                let entry = self.fresh();
                self.emit(at, Some(none), Vec::new(), entry);
                self.rule(r, entry, c, n);
            }
            None => self.emit(at, Some(none), Vec::new(), n),
        }
        if let Some(g) = g {
            self.emit(at, Some(simp::not(g)), Vec::new(), n);
        }
        self.guards = saved;
    }

    fn par(&mut self, children: &[IRule], at: LocId, c: LocId, n: LocId) {
        if let Some(ups) = self.mergeable(children) {
            let ups: Vec<_> = ups.iter().map(|(a, b, ch)| (*a, *b, *ch)).collect();
            self.updates(&ups, at, c, n);
            return;
        }
        let entry = self.block_entry(at, n);
        let saved = std::mem::take(&mut self.guards);
        self.lattice(children, entry, c, n);
        self.guards = saved;
    }

    /// Updates of a par whose children are all plain updates to distinct
    /// locations; these run as one simultaneous command.
    fn mergeable<'r>(&self, children: &'r [IRule]) -> Option<Vec<(&'r LValue, &'r Expr, Option<&'r Expr>)>> {
        fn collect<'r>(r: &'r IRule, out: &mut Vec<(&'r LValue, &'r Expr, Option<&'r Expr>)>) -> bool {
            match r {
                IRule::Update { lv, rhs, check } => {
                    out.push((lv, rhs, check.as_ref()));
                    true
                }
                IRule::Par(cs) => cs.iter().all(|c| collect(c, out)),
                _ => false,
            }
        }
        let mut ups = Vec::new();
        if !children.iter().all(|c| collect(c, &mut ups)) {
            return None;
        }
        let mut seen = BTreeSet::new();
        for (lv, _, _) in &ups {
            let w = self.lvalue_writes(lv);
            if !w.is_disjoint(&seen) || w.iter().any(|v| self.flags.contains_key(v)) {
                return None;
            }
            seen.extend(w);
        }
        Some(ups)
    }

    fn lattice(&mut self, children: &[IRule], start: LocId, c: LocId, n: LocId) {
        let k = self.counter;
        self.counter += 1;
        let writes: Vec<BTreeSet<VarId>> = children.iter().map(|r| self.rule_writes(r)).collect();
        let reads: Vec<BTreeSet<VarId>> = children.iter().map(|r| self.rule_reads(r)).collect();

        let mut snapshot_vars = BTreeSet::new();
        let mut earlier = BTreeSet::new();
        for (w, r) in writes.iter().zip(&reads) {
            let live = r.intersection(&earlier).filter(|v| self.strict || !w.contains(v));
            snapshot_vars.extend(live.copied());
            earlier.extend(w.iter().copied());
        }
        let mut flag_vars = BTreeSet::new();
        if self.strict {
            let mut seen = BTreeSet::new();
            for w in &writes {
                flag_vars.extend(w.intersection(&seen).copied());
                seen.extend(w.iter().copied());
            }
        }

        let mut start = start;
        let mut snapshots = HashMap::new();
        let mut local_flags = HashMap::new();
        if !snapshot_vars.is_empty() || !flag_vars.is_empty() {
            let mut actions = Vec::new();
            for &v in &snapshot_vars {
                let name = format!("pre{k}__{}", ident(&self.sys.variables[v].name));
                let tmp = self.temp(name, self.sys.variables[v].ty.clone());
                actions.push(Action::Assign(LValue::Var(tmp), self.sh(&Expr::Var(v))));
                snapshots.insert(v, tmp);
            }
            for &v in &flag_vars {
                let name = format!("w{k}__{}", ident(&self.sys.variables[v].name));
                let w = self.temp(name, Type::Bool);
                actions.push(Action::Assign(LValue::Var(w), Expr::bool(false)));
                local_flags.insert(v, w);
            }
            let first = self.fresh();
            self.emit(start, None, actions, first);
            start = first;
        }

        let mut count = 0;
        let mut paths = vec![(start, BTreeSet::<VarId>::new(), false, String::new())];
        for (i, child) in children.iter().enumerate() {
            let last = i + 1 == children.len();
            let mut next = Vec::new();
            for (p, changed, any_c, suffix) in std::mem::take(&mut paths) {
                let n_suffix = format!("{suffix}_N{}", i + 1);
                let n_target = if last {
                    if any_c { c } else { n }
                } else {
                    count += 1;
                    self.new_loc(format!("loc{k}{n_suffix}"), false)
                };
                let c_suffix = format!("{suffix}_C{}", i + 1);
                let c_target = if last {
                    c
                } else {
                    count += 1;
                    self.new_loc(format!("loc{k}{c_suffix}"), false)
                };
                let mut changed_c = changed.clone();
                changed_c.extend(writes[i].iter().copied());
                if !self.strict && !writes[i].is_disjoint(&changed) {
                    self.emit(p, None, Vec::new(), n_target);
                    if !last {
                        next.push((c_target, changed_c, true, c_suffix));
                    }
                    next.push((n_target, changed, any_c, n_suffix));
                    continue;
                }
                let saved_shadow = self.shadow.clone();
                let saved_flags = self.flags.clone();
                for v in changed.intersection(&snapshot_vars) {
                    self.shadow.insert(*v, snapshots[v]);
                }
                self.flags.extend(local_flags.iter().map(|(a, b)| (*a, *b)));
                self.rule(child, p, c_target, n_target);
                self.shadow = saved_shadow;
                self.flags = saved_flags;
                next.push((c_target, changed_c, true, c_suffix));
                next.push((n_target, changed, any_c, n_suffix));
            }
            paths = next;
        }
        self.stats.lattices.push(LatticeInfo { children: children.len(), locations: count });
    }

    fn seq(&mut self, children: &[IRule], at: LocId, c: LocId, n: LocId) {
        let entry = self.block_entry(at, n);
        let saved = std::mem::take(&mut self.guards);
        let k = self.counter;
        self.counter += 1;
        let mut n_track = entry;
        let mut c_track: Option<LocId> = None;
        let mut written = BTreeSet::new();
        for (i, child) in children.iter().enumerate() {
            let last = i + 1 == children.len();
            let (nc, nn) = if last {
                (c, n)
            } else {
                (
                    self.new_loc(format!("loc{k}_S{}_C", i + 1), false),
                    self.new_loc(format!("loc{k}_S{}_N", i + 1), false),
                )
            };
            let saved_shadow = self.shadow.clone();
            self.shadow.retain(|v, _| !written.contains(v));
            self.rule(child, n_track, nc, nn);
            if let Some(p) = c_track {
                self.rule(child, p, nc, nc);
            }
            self.shadow = saved_shadow;
            written.extend(self.rule_writes(child));
            n_track = nn;
            c_track = Some(nc);
        }
        self.guards = saved;
    }

    fn temp(&mut self, name: String, ty: Type) -> VarId {
        self.sys.variables.push(VarDef { name, ty, kind: VarKind::Temp, init: None, owner: None });
        self.sys.variables.len() - 1
    }

    // ---- shadowing ------------------------------------------------------

    fn sh(&self, e: &Expr) -> Expr {
        if self.shadow.is_empty() {
            return e.clone();
        }
        self.sh_expr(e, 0)
    }

    fn sh_expr(&self, e: &Expr, depth: usize) -> Expr {
        match e {
            Expr::Var(v) => Expr::Var(*self.shadow.get(v).unwrap_or(v)),
            Expr::Const(_) | Expr::Param(_) => e.clone(),
            Expr::Field(b, f) => {
                let base = self.sh_expr(b, depth);
                let Some(r) = infer_record(self.sys, &base, &[]) else {
                    return Expr::Field(Box::new(base), *f);
                };
                let consts: Vec<(usize, VarId)> = self
                    .sys
                    .constants
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.record == r)
                    .map(|(i, c)| (i, c.fields[*f]))
                    .collect();
                if !consts.iter().any(|(_, v)| self.shadow.contains_key(v)) {
                    return Expr::Field(Box::new(base), *f);
                }
                let mut acc = Expr::Field(Box::new(base.clone()), *f);
                for (ci, v) in consts.into_iter().rev() {
                    let cond = Expr::bin(BinOp::Eq, base.clone(), Expr::Const(Value::Record(ci)));
                    acc = simp::ite(cond, Expr::Var(*self.shadow.get(&v).unwrap_or(&v)), acc);
                }
                acc
            }
            Expr::Unary(op, a) => Expr::Unary(*op, Box::new(self.sh_expr(a, depth))),
            Expr::Binary(op, a, b) => Expr::bin(*op, self.sh_expr(a, depth), self.sh_expr(b, depth)),
            Expr::Ite(c, a, b) => Expr::Ite(
                Box::new(self.sh_expr(c, depth)),
                Box::new(self.sh_expr(a, depth)),
                Box::new(self.sh_expr(b, depth)),
            ),
            Expr::Call(f, args) => {
                let args: Vec<Expr> = args.iter().map(|a| self.sh_expr(a, depth)).collect();
                if depth < 32 && self.fun_reads[*f].iter().any(|v| self.shadow.contains_key(v)) {
                    let body = subst_params(&self.sys.functions[*f].body, &args);
                    self.sh_expr(&body, depth + 1)
                } else {
                    Expr::Call(*f, args)
                }
            }
            Expr::Seq(op, args) => Expr::Seq(*op, args.iter().map(|a| self.sh_expr(a, depth)).collect()),
        }
    }

    fn sh_lv(&self, lv: &LValue) -> LValue {
        match lv {
            LValue::Var(v) => LValue::Var(*v),
            LValue::Field(b, f) => LValue::Field(self.sh(b), *f),
        }
    }

    // ---- read and write sets --------------------------------------------

    fn lvalue_writes(&self, lv: &LValue) -> BTreeSet<VarId> {
        match lv {
            LValue::Var(v) => BTreeSet::from([*v]),
            LValue::Field(b, f) => field_vars(self.sys, b, *f, &[]),
        }
    }

    fn rule_writes(&self, r: &IRule) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        walk_rule(r, &mut |x| {
            if let IRule::Update { lv, .. } = x {
                out.extend(self.lvalue_writes(lv));
            }
        });
        out
    }

    fn rule_reads(&self, r: &IRule) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        walk_rule(r, &mut |x| match x {
            IRule::Update { lv, rhs, .. } => {
                if let LValue::Field(b, _) = lv {
                    expr_reads(self.sys, &self.fun_reads, b, &[], &mut out);
                }
                expr_reads(self.sys, &self.fun_reads, rhs, &[], &mut out);
            }
            IRule::Cond(c, ..) => expr_reads(self.sys, &self.fun_reads, c, &[], &mut out),
            IRule::Choose(bs, _) => {
                for (c, _) in bs {
                    expr_reads(self.sys, &self.fun_reads, c, &[], &mut out);
                }
            }
            _ => {}
        });
        out
    }

    /// Final location list: aliases resolved, `last` moved to the end.
    pub fn finish(self, last: LocId) -> Vec<Location> {
        let keep: Vec<LocId> = (0..self.locs.len())
            .filter(|&i| self.find(i) == i && i != last)
            .chain(std::iter::once(last))
            .collect();
        let mut index = vec![usize::MAX; self.locs.len()];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let mut out = Vec::with_capacity(keep.len());
        for &old in &keep {
            let mut loc = self.locs[old].clone();
            for cmd in &mut loc.commands {
                cmd.target = index[self.find(cmd.target)];
            }
            out.push(loc);
        }
        out
    }
}

fn opt_and(g: Option<Expr>, e: Expr) -> Expr {
    match g {
        Some(g) => simp::and(g, e),
        None => e,
    }
}

pub fn ident(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect()
}

fn walk_rule(r: &IRule, f: &mut dyn FnMut(&IRule)) {
    f(r);
    match r {
        IRule::Cond(_, t, e) => {
            walk_rule(t, f);
            if let Some(e) = e {
                walk_rule(e, f);
            }
        }
        IRule::Choose(bs, none) => {
            for (_, b) in bs {
                walk_rule(b, f);
            }
            if let Some(n) = none {
                walk_rule(n, f);
            }
        }
        IRule::Par(cs) | IRule::Seq(cs) => cs.iter().for_each(|c| walk_rule(c, f)),
        IRule::Update { .. } | IRule::Skip => {}
    }
}

/// Field variables `f` of every constant of the record `base` refers to.
fn field_vars(sys: &System, base: &Expr, f: usize, params: &[(String, Type)]) -> BTreeSet<VarId> {
    match infer_record(sys, base, params) {
        Some(r) => sys.constants.iter().filter(|c| c.record == r).map(|c| c.fields[f]).collect(),
        None => BTreeSet::new(),
    }
}

pub(crate) fn expr_reads(
    sys: &System,
    fun_reads: &[BTreeSet<VarId>],
    e: &Expr,
    params: &[(String, Type)],
    out: &mut BTreeSet<VarId>,
) {
    e.walk(&mut |x| match x {
        Expr::Var(v) => {
            out.insert(*v);
        }
        Expr::Field(b, f) => out.extend(field_vars(sys, b, *f, params)),
        Expr::Call(f, _) => out.extend(fun_reads.get(*f).into_iter().flatten().copied()),
        _ => {}
    });
}

/// State variables each pure function may read, directly or through calls.
pub(crate) fn function_reads(sys: &System) -> Vec<BTreeSet<VarId>> {
    let mut reads = vec![BTreeSet::new(); sys.functions.len()];
    loop {
        let mut changed = false;
        for (i, f) in sys.functions.iter().enumerate() {
            let mut r = BTreeSet::new();
            expr_reads(sys, &reads, &f.body, &f.params, &mut r);
            if r != reads[i] {
                reads[i] = r;
                changed = true;
            }
        }
        if !changed {
            return reads;
        }
    }
}

pub(crate) fn subst_params(e: &Expr, args: &[Expr]) -> Expr {
    match e {
        Expr::Param(i) => args[*i].clone(),
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Field(b, f) => Expr::Field(Box::new(subst_params(b, args)), *f),
        Expr::Unary(op, a) => Expr::Unary(*op, Box::new(subst_params(a, args))),
        Expr::Binary(op, a, b) => Expr::bin(*op, subst_params(a, args), subst_params(b, args)),
        Expr::Ite(c, a, b) => Expr::Ite(
            Box::new(subst_params(c, args)),
            Box::new(subst_params(a, args)),
            Box::new(subst_params(b, args)),
        ),
        Expr::Call(f, xs) => Expr::Call(*f, xs.iter().map(|x| subst_params(x, args)).collect()),
        Expr::Seq(op, xs) => Expr::Seq(*op, xs.iter().map(|x| subst_params(x, args)).collect()),
    }
}
