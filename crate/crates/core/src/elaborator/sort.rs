use std::fmt;

use crate::frontend::{quote_symbol, SExpr};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    Array(Box<Sort>, Box<Sort>),
    /// Declared sort: uninterpreted, datatype, heap, address or allocation result.
    Named(String),
}

impl Sort {
    pub fn named(name: impl Into<String>) -> Sort {
        Sort::Named(name.into())
    }

    pub fn array(index: Sort, elem: Sort) -> Sort {
        Sort::Array(Box::new(index), Box::new(elem))
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Sort::Named(n) => Some(n),
            _ => None,
        }
    }

    /// True if `pred` holds for this sort or any sort nested in it.
    pub fn mentions(&self, pred: &impl Fn(&Sort) -> bool) -> bool {
        pred(self)
            || match self {
                Sort::Array(i, e) => i.mentions(pred) || e.mentions(pred),
                _ => false,
            }
    }

    pub fn to_sexpr(&self) -> SExpr {
        match self {
            Sort::Bool => SExpr::symbol("Bool"),
            Sort::Int => SExpr::symbol("Int"),
            Sort::Array(i, e) => SExpr::app("Array", [i.to_sexpr(), e.to_sexpr()]),
            Sort::Named(n) => SExpr::symbol(n.as_str()),
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "Bool"),
            Sort::Int => write!(f, "Int"),
            Sort::Array(i, e) => write!(f, "(Array {i} {e})"),
            Sort::Named(n) => write!(f, "{}", quote_symbol(n)),
        }
    }
}

/// Index of a heap declaration within an [`Env`](super::Env).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeapId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortKind {
    Uninterpreted,
    Datatype,
    Heap(HeapId),
    Address(HeapId),
    AllocResult(HeapId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub selector: String,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub fields: Vec<Field>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Datatype {
    pub name: String,
    pub constructors: Vec<Constructor>,
}

impl Datatype {
    pub fn constructor(&self, name: &str) -> Option<(usize, &Constructor)> {
        self.constructors.iter().enumerate().find(|(_, c)| c.name == name)
    }
}
