use super::System;
use serde::Serialize;
use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Runtime value of an IR expression or variable.
#[derive(Clone, Debug, Serialize)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Str(Arc<str>),
    Float(f64),
    /// Enum index and element index.
    Enum(usize, u32),
    /// Record constant index.
    Record(usize),
    Seq(Arc<Vec<Value>>),
}

impl Value {
    fn rank(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Bool(_) => 1,
            Value::Int(_) => 2,
            Value::Str(_) => 3,
            Value::Float(_) => 4,
            Value::Enum(..) => 5,
            Value::Record(_) => 6,
            Value::Seq(_) => 7,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Rendering used in emitted IR text (`Sign.EMPTY`, `"s"`, `<1,2>`).
    pub fn bir(&self, sys: &System) -> String {
        self.render(sys, true)
    }

    /// Rendering used in traces (`EMPTY`, `"s"`, `<1,2>`).
    pub fn plain(&self, sys: &System) -> String {
        self.render(sys, false)
    }

    fn render(&self, sys: &System, qualified: bool) -> String {
        match self {
            Value::Null => "null".into(),
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Str(s) => format!("\"{s}\""),
            Value::Float(f) => format!("{f:?}"),
            Value::Enum(e, i) => {
                let def = &sys.enums[*e];
                let elem = &def.elements[*i as usize];
                if qualified {
                    format!("{}.{elem}", def.name)
                } else {
                    elem.clone()
                }
            }
            Value::Record(c) => sys.constants[*c].name.clone(),
            Value::Seq(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.render(sys, qualified)).collect();
                format!("<{}>", parts.join(","))
            }
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Null, Value::Null) => Ordering::Equal,
            (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Str(a), Value::Str(b)) => a.cmp(b),
            (Value::Float(a), Value::Float(b)) => a.total_cmp(b),
            (Value::Enum(e1, i1), Value::Enum(e2, i2)) => (e1, i1).cmp(&(e2, i2)),
            (Value::Record(a), Value::Record(b)) => a.cmp(b),
            (Value::Seq(a), Value::Seq(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Null => {}
            Value::Bool(b) => b.hash(state),
            Value::Int(i) => i.hash(state),
            Value::Str(s) => s.hash(state),
            Value::Float(f) => f.to_bits().hash(state),
            Value::Enum(e, i) => (e, i).hash(state),
            Value::Record(c) => c.hash(state),
            Value::Seq(items) => items.hash(state),
        }
    }
}
