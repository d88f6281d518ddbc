//! Translation of a parsed ASM model into a guarded transition system.

pub mod domains;
mod encode;
mod lower;
mod simp;

use crate::frontend::{LtlAst, ModelAst, Pos};
use crate::gts::*;
use serde::Serialize;

pub use encode::ident;

#[derive(Clone, Copy, Debug)]
pub struct TranslateOptions {
    /// Report inconsistent updates inside a block instead of skipping them.
    pub strict: bool,
    pub macro_depth: usize,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions { strict: false, macro_depth: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct TranslateError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeInfo {
    pub children: usize,
    /// Intermediate locations created for the block.
    pub locations: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TranslationStats {
    pub guard_pushes: usize,
    pub guard_pops: usize,
    pub max_guard_depth: usize,
    pub lattices: Vec<LatticeInfo>,
}

#[derive(Clone, Debug)]
pub struct Translation {
    pub system: System,
    pub stats: TranslationStats,
    /// Controlled function name and the number of state variables it became.
    pub location_counts: Vec<(String, usize)>,
}

pub const MAIN_THREAD: &str = "MAIN";

pub fn translate(model: &ModelAst, opts: TranslateOptions) -> Result<Translation, TranslateError> {
    let lw = lower::Lowerer::new(model, opts)?;
    let body = lw.rule(&model.main_rule.body, &Default::default(), 0)?;
    let init = lw.init_actions()?;

    let mut sys = lw.sys.clone();
    let monitored: Vec<VarId> = (0..sys.variables.len())
        .filter(|&v| sys.variables[v].kind == VarKind::Monitored)
        .collect();
    let mut threads = vec![ThreadDef { name: MAIN_THREAD.into(), active_at_start: true, locations: Vec::new() }];
    for &v in &monitored {
        let var = &sys.variables[v];
        let Some(values) = lw.type_values(&var.ty) else {
            return Err(TranslateError {
                pos: model.function(var.name.split('.').next_back().unwrap_or(&var.name)).map(|f| f.pos).unwrap_or_default(),
                message: format!("monitored location `{}` has an unbounded codomain", var.name),
            });
        };
        let commands = values
            .into_iter()
            .map(|val| GuardedCmd {
                guard: None,
                actions: vec![Action::Assign(LValue::Var(v), Expr::Const(val))],
                visible: true,
                target: 0,
            })
            .collect();
        threads.push(ThreadDef {
            name: format!("{}_monitored", ident(&var.name)),
            active_at_start: false,
            locations: vec![Location { label: "loc0".into(), init: false, commands }],
        });
    }

    let (mut locations, stats) = {
        let mut enc = encode::Encoder::new(&mut sys, opts.strict);
        let loc0 = enc.new_loc("loc0".into(), true);
        let loc1 = enc.new_loc("loc1".into(), true);
        let end = enc.new_loc("endloc".into(), true);
        enc.rule(&body, loc1, end, end);
        enc.emit_visible(end, Vec::new(), loc1);
        enc.mark_init(loc0);
        let stats = std::mem::take(&mut enc.stats);
        (enc.finish(end), stats)
    };
    let mut actions: Vec<Action> = sys
        .constants
        .iter()
        .enumerate()
        .map(|(i, c)| Action::Alloc(c.var, i))
        .collect();
    actions.extend(init);
    actions.extend((1..threads.len()).map(Action::Start));
    locations[0].commands.push(GuardedCmd { guard: None, actions, visible: true, target: 1 });
    threads[0].locations = locations;
    sys.threads = threads;
    sys.properties = properties(&lw, model)?;

    Ok(Translation { system: sys, stats, location_counts: lw.location_counts.clone() })
}

fn properties(lw: &lower::Lowerer, model: &ModelAst) -> Result<Vec<PropertyDef>, TranslateError> {
    enum Src<'a> {
        Ltl(&'a crate::frontend::LtlSpecDecl),
        Inv(&'a crate::frontend::InvariantDecl, usize),
    }
    let mut all: Vec<(Pos, Src)> = model.ltl_specs.iter().map(|s| (s.pos, Src::Ltl(s))).collect();
    all.extend(model.invariants.iter().enumerate().map(|(i, inv)| (inv.pos, Src::Inv(inv, i + 1))));
    all.sort_by_key(|(p, _)| (p.line, p.col));
    let mut out = Vec::new();
    for (_, src) in all {
        let mut props = Vec::new();
        let (name, decl_text, formula) = match src {
            Src::Ltl(s) => (s.name.clone(), format!("{}:= {}", s.name, s.text), lw.ltl(&s.formula, &mut props)?),
            Src::Inv(inv, k) => {
                let name = inv.name.clone().unwrap_or_else(|| format!("invariant_{k}"));
                let f = LtlAst::Always(Box::new(LtlAst::Atom(inv.body.clone())));
                (name.clone(), format!("{name}:= g({})", inv.text), lw.ltl(&f, &mut props)?)
            }
        };
        out.push(PropertyDef { name, decl_text, props, formula });
    }
    Ok(out)
}
