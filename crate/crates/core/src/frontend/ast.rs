//! Syntax tree for parsed AsmetaL models.
//!
//! Every node carries a [`Pos`]. Positions never take part in structural
//! equality, so a re-parsed model compares equal to the original.

use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelAst {
    pub name: String,
    pub imports: Vec<String>,
    pub domains: Vec<DomainDecl>,
    pub functions: Vec<FunctionDecl>,
    pub static_defs: Vec<FunctionDef>,
    pub rules: Vec<RuleDef>,
    pub ltl_specs: Vec<LtlSpecDecl>,
    pub invariants: Vec<InvariantDecl>,
    pub main_rule: RuleDef,
    pub init: Option<InitDecl>,
}

impl ModelAst {
    pub fn domain(&self, name: &str) -> Option<&DomainDecl> {
        self.domains.iter().find(|d| d.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn static_def(&self, name: &str) -> Option<&FunctionDef> {
        self.static_defs.iter().find(|f| f.name == name)
    }

    pub fn rule(&self, name: &str) -> Option<&RuleDef> {
        if self.main_rule.name == name {
            return Some(&self.main_rule);
        }
        self.rules.iter().find(|r| r.name == name)
    }

    /// `(agent domain, program rule)` pairs from the `default init` section.
    pub fn agent_programs(&self) -> &[(String, String)] {
        self.init.as_ref().map(|i| i.agent_bindings.as_slice()).unwrap_or(&[])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainKind {
    Basic,
    Enum,
    Abstract,
    AgentSubset,
    ConcreteSubset,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extension {
    Range(i64, i64),
    Set(Vec<Literal>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DomainDecl {
    pub kind: DomainKind,
    pub name: String,
    pub enum_elements: Vec<String>,
    pub parent: Option<String>,
    pub extension: Option<Extension>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainRef {
    Named(String),
    Seq(Box<DomainRef>),
}

impl DomainRef {
    pub fn named(&self) -> Option<&str> {
        match self {
            DomainRef::Named(n) => Some(n),
            DomainRef::Seq(_) => None,
        }
    }
}

impl std::fmt::Display for DomainRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainRef::Named(n) => f.write_str(n),
            DomainRef::Seq(d) => write!(f, "Seq({d})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FunKind {
    Static,
    Derived,
    Controlled,
    Monitored,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDecl {
    pub kind: FunKind,
    pub name: String,
    pub arg_domains: Vec<DomainRef>,
    pub codomain: DomainRef,
    /// Static nullary member of an abstract or agent domain (e.g. `phil_1`).
    pub is_constant_element: bool,
    /// Written with the `dynamic` prefix.
    pub dynamic: bool,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub var: String,
    pub domain: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub params: Vec<Binder>,
    pub body: TermAst,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleDef {
    pub name: String,
    pub params: Vec<Binder>,
    pub body: RuleAst,
    pub is_macro: bool,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LtlSpecDecl {
    pub name: String,
    pub formula: LtlAst,
    /// Source text of the formula with whitespace normalized.
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantDecl {
    pub name: Option<String>,
    pub over: Vec<String>,
    pub body: TermAst,
    pub text: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitDecl {
    pub name: String,
    pub entries: Vec<InitEntry>,
    pub agent_bindings: Vec<(String, String)>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitEntry {
    /// `function f = v` or `function f(a, b) = v`.
    Simple { location: TermAst, value: TermAst, pos: Pos },
    /// `function f($x in D) = t`.
    Group { function: String, binders: Vec<Binder>, value: TermAst, pos: Pos },
    /// `function f($x in D) = switch $x case ... endswitch`.
    Conditional { function: String, binders: Vec<Binder>, cases: TermAst, pos: Pos },
}

impl InitEntry {
    pub fn function(&self) -> &str {
        match self {
            InitEntry::Simple { location, .. } => match location {
                TermAst::App(name, _, _) => name,
                _ => "",
            },
            InitEntry::Group { function, .. } | InitEntry::Conditional { function, .. } => function,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            InitEntry::Simple { pos, .. }
            | InitEntry::Group { pos, .. }
            | InitEntry::Conditional { pos, .. } => *pos,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Undef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "mod",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Xor => "xor",
            BinOp::Implies => "implies",
            BinOp::Iff => "iff",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Implies | BinOp::Iff => 1,
            BinOp::Or | BinOp::Xor => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TermAst {
    Lit(Literal, Pos),
    EnumElem(String, Pos),
    Var(String, Pos),
    /// Function application; nullary functions and static constants have no
    /// arguments.
    App(String, Vec<TermAst>, Pos),
    Bin(BinOp, Box<TermAst>, Box<TermAst>, Pos),
    Un(UnOp, Box<TermAst>, Pos),
    Cond(Box<TermAst>, Box<TermAst>, Option<Box<TermAst>>, Pos),
    Case(Box<TermAst>, Vec<(TermAst, TermAst)>, Option<Box<TermAst>>, Pos),
    Forall(Vec<Binder>, Box<TermAst>, Pos),
    Exists(Vec<Binder>, Box<TermAst>, Pos),
    IsUndef(Box<TermAst>, Pos),
    SelfRef(Pos),
    SeqLit(Vec<TermAst>, Pos),
}

impl TermAst {
    pub fn pos(&self) -> Pos {
        match self {
            TermAst::Lit(_, p)
            | TermAst::EnumElem(_, p)
            | TermAst::Var(_, p)
            | TermAst::App(_, _, p)
            | TermAst::Bin(_, _, _, p)
            | TermAst::Un(_, _, p)
            | TermAst::Cond(_, _, _, p)
            | TermAst::Case(_, _, _, p)
            | TermAst::Forall(_, _, p)
            | TermAst::Exists(_, _, p)
            | TermAst::IsUndef(_, p)
            | TermAst::SelfRef(p)
            | TermAst::SeqLit(_, p) => *p,
        }
    }

    /// Visits this term and every sub-term, pre-order.
    pub fn walk(&self, f: &mut dyn FnMut(&TermAst)) {
        f(self);
        match self {
            TermAst::Lit(..) | TermAst::EnumElem(..) | TermAst::Var(..) | TermAst::SelfRef(_) => {}
            TermAst::App(_, args, _) | TermAst::SeqLit(args, _) => {
                args.iter().for_each(|a| a.walk(f))
            }
            TermAst::Bin(_, a, b, _) => {
                a.walk(f);
                b.walk(f);
            }
            TermAst::Un(_, a, _) | TermAst::IsUndef(a, _) => a.walk(f),
            TermAst::Cond(c, t, e, _) => {
                c.walk(f);
                t.walk(f);
                if let Some(e) = e {
                    e.walk(f);
                }
            }
            TermAst::Case(s, branches, other, _) => {
                s.walk(f);
                for (v, t) in branches {
                    v.walk(f);
                    t.walk(f);
                }
                if let Some(o) = other {
                    o.walk(f);
                }
            }
            TermAst::Forall(_, body, _) | TermAst::Exists(_, body, _) => body.walk(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RuleAst {
    Update(TermAst, TermAst, Pos),
    Cond(TermAst, Box<RuleAst>, Option<Box<RuleAst>>, Pos),
    Case(TermAst, Vec<(TermAst, RuleAst)>, Option<Box<RuleAst>>, Pos),
    Choose(Vec<Binder>, TermAst, Box<RuleAst>, Option<Box<RuleAst>>, Pos),
    Forall(Vec<Binder>, TermAst, Box<RuleAst>, Pos),
    Par(Vec<RuleAst>, Pos),
    Seq(Vec<RuleAst>, Pos),
    Let(Vec<(String, TermAst)>, Box<RuleAst>, Pos),
    Skip(Pos),
    MacroCall(String, Vec<TermAst>, Pos),
    ProgramCall(TermAst, Pos),
}

impl RuleAst {
    pub fn pos(&self) -> Pos {
        match self {
            RuleAst::Update(_, _, p)
            | RuleAst::Cond(_, _, _, p)
            | RuleAst::Case(_, _, _, p)
            | RuleAst::Choose(_, _, _, _, p)
            | RuleAst::Forall(_, _, _, p)
            | RuleAst::Par(_, p)
            | RuleAst::Seq(_, p)
            | RuleAst::Let(_, _, p)
            | RuleAst::Skip(p)
            | RuleAst::MacroCall(_, _, p)
            | RuleAst::ProgramCall(_, p) => *p,
        }
    }

    /// Visits every term occurring in this rule (not descending into macro
    /// bodies).
    pub fn walk_terms(&self, f: &mut dyn FnMut(&TermAst)) {
        match self {
            RuleAst::Update(l, r, _) => {
                l.walk(f);
                r.walk(f);
            }
            RuleAst::Cond(c, t, e, _) => {
                c.walk(f);
                t.walk_terms(f);
                if let Some(e) = e {
                    e.walk_terms(f);
                }
            }
            RuleAst::Case(s, branches, other, _) => {
                s.walk(f);
                for (v, r) in branches {
                    v.walk(f);
                    r.walk_terms(f);
                }
                if let Some(o) = other {
                    o.walk_terms(f);
                }
            }
            RuleAst::Choose(_, c, body, none, _) => {
                c.walk(f);
                body.walk_terms(f);
                if let Some(n) = none {
                    n.walk_terms(f);
                }
            }
            RuleAst::Forall(_, c, body, _) => {
                c.walk(f);
                body.walk_terms(f);
            }
            RuleAst::Par(rs, _) | RuleAst::Seq(rs, _) => rs.iter().for_each(|r| r.walk_terms(f)),
            RuleAst::Let(bs, body, _) => {
                bs.iter().for_each(|(_, t)| t.walk(f));
                body.walk_terms(f);
            }
            RuleAst::Skip(_) => {}
            RuleAst::MacroCall(_, args, _) => args.iter().for_each(|a| a.walk(f)),
            RuleAst::ProgramCall(t, _) => t.walk(f),
        }
    }

    /// Visits this rule and every nested rule, pre-order.
    pub fn walk_rules(&self, f: &mut dyn FnMut(&RuleAst)) {
        f(self);
        match self {
            RuleAst::Cond(_, t, e, _) => {
                t.walk_rules(f);
                if let Some(e) = e {
                    e.walk_rules(f);
                }
            }
            RuleAst::Case(_, branches, other, _) => {
                branches.iter().for_each(|(_, r)| r.walk_rules(f));
                if let Some(o) = other {
                    o.walk_rules(f);
                }
            }
            RuleAst::Choose(_, _, body, none, _) => {
                body.walk_rules(f);
                if let Some(n) = none {
                    n.walk_rules(f);
                }
            }
            RuleAst::Forall(_, _, body, _) | RuleAst::Let(_, body, _) => body.walk_rules(f),
            RuleAst::Par(rs, _) | RuleAst::Seq(rs, _) => rs.iter().for_each(|r| r.walk_rules(f)),
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LtlAst {
    Atom(TermAst),
    Not(Box<LtlAst>),
    Bin(BinOp, Box<LtlAst>, Box<LtlAst>),
    /// `g`
    Always(Box<LtlAst>),
    /// `f`
    Eventually(Box<LtlAst>),
    /// `u`
    Until(Box<LtlAst>, Box<LtlAst>),
    /// `v`
    Release(Box<LtlAst>, Box<LtlAst>),
}
