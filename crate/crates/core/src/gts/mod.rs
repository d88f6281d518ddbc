//! Guarded transition system: the low-level intermediate form produced by
//! the translator and executed by the checker.

pub mod emit;
pub mod eval;
pub mod reader;
pub mod value;

pub use emit::emit_bir_text;
pub use eval::{apply_command, eval_bool, eval_expr, lvalue_var, EvalError, StateVector};
pub use reader::{read_bir_text, ReadError};
pub use value::Value;

use crate::ltl::Ltl;
use crate::seq::SeqOp;
use serde::Serialize;

pub type VarId = usize;
pub type ThreadId = usize;
pub type FunId = usize;
pub type LocId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Type {
    Bool,
    Int,
    Str,
    Float,
    Null,
    Enum(usize),
    Alias(usize),
    Record(usize),
    Seq(Box<Type>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnumDef {
    pub name: String,
    pub elements: Vec<String>,
}

/// Finite subset of a basic type, declared with `typealias`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AliasDef {
    pub name: String,
    pub base: Type,
    pub values: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldDef {
    pub name: String,
    pub ty: Type,
    pub kind: VarKind,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordDef {
    pub name: String,
    pub fields: Vec<FieldDef>,
}

/// A statically declared record instance such as `phil_1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstDef {
    pub name: String,
    pub record: usize,
    /// Variable holding the reference once allocated.
    pub var: VarId,
    /// One variable per record field, in field order.
    pub fields: Vec<VarId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    Controlled,
    Monitored,
    StaticConst,
    Temp,
}

impl VarKind {
    pub fn comment(self) -> &'static str {
        match self {
            VarKind::Controlled => "controlled",
            VarKind::Monitored => "monitored",
            VarKind::StaticConst => "static",
            VarKind::Temp => "temp",
        }
    }

    pub fn from_comment(s: &str) -> Option<VarKind> {
        Some(match s {
            "controlled" => VarKind::Controlled,
            "monitored" => VarKind::Monitored,
            "static" => VarKind::StaticConst,
            "temp" => VarKind::Temp,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarDef {
    pub name: String,
    pub ty: Type,
    pub kind: VarKind,
    /// Value in the raw initial configuration; `None` means the type default.
    pub init: Option<Value>,
    /// Set for record fields: owning constant and field index.
    pub owner: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunDef {
    pub name: String,
    pub params: Vec<(String, Type)>,
    pub ret: Type,
    pub body: Expr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
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
}

impl BinOp {
    pub const ALL: [BinOp; 14] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Mod,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
        BinOp::Xor,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Mod => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Xor => "^",
        }
    }

    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Xor => 3,
            BinOp::Eq | BinOp::Ne => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Mod => 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Expr {
    Const(Value),
    Var(VarId),
    /// Parameter of the enclosing pure function.
    Param(usize),
    /// Field of the record referenced by the base expression.
    Field(Box<Expr>, usize),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(FunId, Vec<Expr>),
    Seq(SeqOp, Vec<Expr>),
}

impl Expr {
    pub fn bool(b: bool) -> Expr {
        Expr::Const(Value::Bool(b))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(e))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn and_all(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts.into_iter().reduce(|a, b| Expr::bin(BinOp::And, a, b)).unwrap_or(Expr::bool(true))
    }

    pub fn or_all(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts.into_iter().reduce(|a, b| Expr::bin(BinOp::Or, a, b)).unwrap_or(Expr::bool(false))
    }

    /// Visits this expression and all sub-expressions.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => {}
            Expr::Field(b, _) | Expr::Unary(_, b) => b.walk(f),
            Expr::Binary(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Ite(c, a, b) => {
                c.walk(f);
                a.walk(f);
                b.walk(f);
            }
            Expr::Call(_, args) | Expr::Seq(_, args) => args.iter().for_each(|a| a.walk(f)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum LValue {
    Var(VarId),
    Field(Expr, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Action {
    Assign(LValue, Expr),
    Assert(Expr),
    /// `x := new R;` binding a constant's variable to its record instance.
    Alloc(VarId, usize),
    Start(ThreadId),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GuardedCmd {
    /// `None` is an unconditional command.
    pub guard: Option<Expr>,
    pub actions: Vec<Action>,
    pub visible: bool,
    pub target: LocId,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Location {
    pub label: String,
    /// Executed once to build the initial state.
    pub init: bool,
    pub commands: Vec<GuardedCmd>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreadDef {
    pub name: String,
    pub active_at_start: bool,
    pub locations: Vec<Location>,
}

impl ThreadDef {
    pub fn location(&self, label: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l.label == label)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyDef {
    pub name: String,
    /// Declaration as shown in reports, e.g. `ltl_inv:= g(m!=n)`.
    pub decl_text: String,
    /// Named observable propositions; atom `i` of `formula` is `props[i]`.
    pub props: Vec<(String, Expr)>,
    pub formula: Ltl,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct System {
    pub name: String,
    pub enums: Vec<EnumDef>,
    pub aliases: Vec<AliasDef>,
    pub records: Vec<RecordDef>,
    pub constants: Vec<ConstDef>,
    pub variables: Vec<VarDef>,
    pub functions: Vec<FunDef>,
    /// The first thread is the main thread.
    pub threads: Vec<ThreadDef>,
    pub properties: Vec<PropertyDef>,
}

impl System {
    pub fn var(&self, name: &str) -> Option<VarId> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn thread(&self, name: &str) -> Option<ThreadId> {
        self.threads.iter().position(|t| t.name == name)
    }

    pub fn type_name(&self, ty: &Type) -> String {
        match ty {
            Type::Bool => "boolean".into(),
            Type::Int => "int".into(),
            Type::Str => "string".into(),
            Type::Float => "float".into(),
            Type::Null => "null".into(),
            Type::Enum(e) => self.enums[*e].name.clone(),
            Type::Alias(a) => self.aliases[*a].name.clone(),
            Type::Record(r) => self.records[*r].name.clone(),
            Type::Seq(t) => format!("Seq<{}>", self.type_name(t)),
        }
    }

    /// Value a variable of this type holds before any assignment.
    pub fn default_value(&self, ty: &Type) -> Value {
        match ty {
            Type::Bool => Value::Bool(false),
            Type::Int => Value::Int(0),
            Type::Str => Value::Str("".into()),
            Type::Float => Value::Float(0.0),
            Type::Null | Type::Record(_) => Value::Null,
            Type::Enum(e) => Value::Enum(*e, 0),
            Type::Alias(a) => self.aliases[*a]
                .values
                .first()
                .cloned()
                .unwrap_or_else(|| self.default_value(&self.aliases[*a].base)),
            Type::Seq(_) => Value::Seq(Default::default()),
        }
    }

    /// Raw configuration before any command runs.
    pub fn initial_values(&self) -> Vec<Value> {
        self.variables
            .iter()
            .map(|v| v.init.clone().unwrap_or_else(|| self.default_value(&v.ty)))
            .collect()
    }

    /// Constant whose reference variable is `v`, if any.
    pub fn constant_of_var(&self, v: VarId) -> Option<usize> {
        self.constants.iter().position(|c| c.var == v)
    }

    /// Field access in canonical form: a field of a constant reference is
    /// the field variable itself.
    pub fn field_access(&self, base: Expr, field: usize) -> Expr {
        match base {
            Expr::Const(Value::Record(c)) => Expr::Var(self.constants[c].fields[field]),
            base => Expr::Field(Box::new(base), field),
        }
    }

    pub fn field_lvalue(&self, base: Expr, field: usize) -> LValue {
        match self.field_access(base, field) {
            Expr::Var(v) => LValue::Var(v),
            Expr::Field(b, f) => LValue::Field(*b, f),
            _ => unreachable!(),
        }
    }

    /// Record type of a record-valued expression, when statically known.
    pub fn record_of(&self, ty: &Type) -> Option<usize> {
        match ty {
            Type::Record(r) => Some(*r),
            _ => None,
        }
    }

    /// Checks that every goto target exists and the main thread is present.
    pub fn check_well_formed(&self) -> Result<(), String> {
        if self.threads.is_empty() {
            return Err("system has no main thread".into());
        }
        for t in &self.threads {
            let mut labels = std::collections::HashSet::new();
            for l in &t.locations {
                if !labels.insert(&l.label) {
                    return Err(format!("duplicate location `{}` in thread {}", l.label, t.name));
                }
                for c in &l.commands {
                    if c.target >= t.locations.len() {
                        return Err(format!("goto target out of range in {}.{}", t.name, l.label));
                    }
                }
            }
        }
        Ok(())
    }
}
