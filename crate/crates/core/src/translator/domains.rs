//! Finite domain enumeration over the syntax tree.

use crate::frontend::{DomainKind, DomainRef, Extension, Literal, ModelAst};
use std::fmt;

/// One element of a finite domain, in source terms.
#[derive(Clone, Debug, PartialEq)]
pub enum Elem {
    Bool(bool),
    Int(i64),
    Real(f64),
    Str(String),
    Enum(String),
    /// Static constant of an abstract or agent domain.
    Const(String),
    Undef,
}

impl Elem {
    /// Suffix used in unfolded location names (`passed_10`).
    pub fn suffix(&self) -> String {
        match self {
            Elem::Bool(b) => b.to_string(),
            Elem::Int(i) if *i < 0 => format!("m{}", i.unsigned_abs()),
            Elem::Int(i) => i.to_string(),
            Elem::Real(r) => r.to_string().replace(['.', '-'], "_"),
            Elem::Str(s) => s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect(),
            Elem::Enum(e) | Elem::Const(e) => e.clone(),
            Elem::Undef => "undef".into(),
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Bool(b) => write!(f, "{b}"),
            Elem::Int(i) => write!(f, "{i}"),
            Elem::Real(r) => write!(f, "{r}"),
            Elem::Str(s) => write!(f, "\"{s}\""),
            Elem::Enum(e) | Elem::Const(e) => f.write_str(e),
            Elem::Undef => f.write_str("undef"),
        }
    }
}

pub fn literal_elem(l: &Literal) -> Elem {
    match l {
        Literal::Bool(b) => Elem::Bool(*b),
        Literal::Int(i) => Elem::Int(*i),
        Literal::Real(r) => Elem::Real(*r),
        Literal::Str(s) => Elem::Str(s.clone()),
        Literal::Undef => Elem::Undef,
    }
}

/// Elements of a finite domain in declaration order, or `None` when the
/// domain is unbounded (or a subset lacks its extension).
pub fn finite_elements(model: &ModelAst, d: &DomainRef) -> Option<Vec<Elem>> {
    let name = d.named()?;
    match name {
        "Boolean" => return Some(vec![Elem::Bool(true), Elem::Bool(false)]),
        "Integer" | "Natural" | "String" | "Char" | "Real" | "Agent" | "Undef" => return None,
        _ => {}
    }
    let decl = model.domain(name)?;
    match decl.kind {
        DomainKind::Enum => Some(decl.enum_elements.iter().cloned().map(Elem::Enum).collect()),
        DomainKind::Abstract | DomainKind::AgentSubset => Some(
            constants_of(model, name).into_iter().map(Elem::Const).collect(),
        ),
        DomainKind::ConcreteSubset => match decl.extension.as_ref()? {
            Extension::Range(lo, hi) => Some((*lo..=*hi).map(Elem::Int).collect()),
            Extension::Set(items) => Some(items.iter().map(literal_elem).collect()),
        },
        DomainKind::Basic => None,
    }
}

/// Static constants declared for an abstract or agent domain.
pub fn constants_of(model: &ModelAst, domain: &str) -> Vec<String> {
    model
        .functions
        .iter()
        .filter(|f| f.is_constant_element && f.codomain.named() == Some(domain))
        .map(|f| f.name.clone())
        .collect()
}

/// Cartesian product of the given element lists, first list varying slowest.
pub fn product<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for x in list {
                let mut t = prefix.clone();
                t.push(x.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub fn is_record_domain(model: &ModelAst, d: &DomainRef) -> bool {
    d.named()
        .and_then(|n| model.domain(n))
        .is_some_and(|decl| matches!(decl.kind, DomainKind::Abstract | DomainKind::AgentSubset))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_order_and_size() {
        let p = product(&[vec![1, 2], vec![3, 4, 5]]);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![1, 3]);
        assert_eq!(p[5], vec![2, 5]);
        assert_eq!(product::<i32>(&[]), vec![Vec::<i32>::new()]);
    }

    #[test]
    fn negative_suffix_is_an_identifier() {
        assert_eq!(Elem::Int(-3).suffix(), "m3");
    }
}
