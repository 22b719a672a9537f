use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};

use super::sort::{HeapId, Sort};
use super::Env;
use crate::frontend::SExpr;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HeapOp {
    Read,
    Write,
    Allocate,
    Valid,
    EmptyHeap,
    NullAddress,
    /// Address returned after the given number of allocations from the empty heap.
    NthAddress(BigUint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Op {
    Not,
    And,
    Or,
    Implies,
    Xor,
    Eq,
    Distinct,
    Ite,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Abs,
    Le,
    Lt,
    Ge,
    Gt,
    Select,
    Store,
    /// `((as const (Array I E)) v)`; the array sort is the term's sort.
    ConstArray,
    Constructor(String),
    Selector {
        name: String,
        datatype: String,
        constructor: usize,
        field: usize,
    },
    Tester {
        datatype: String,
        constructor: usize,
    },
    /// Declared or defined function with at least one argument, or a defined constant.
    Apply(String),
    Heap(HeapId, HeapOp),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermKind {
    /// Variable bound by a quantifier, `let`, or function parameter.
    Var(String),
    /// Declared nullary function symbol (a free constant).
    Const(String),
    Int(BigInt),
    Bool(bool),
    App(Op, Vec<Term>),
    Let(Vec<(String, Term)>, Box<Term>),
    Forall(Vec<(String, Sort)>, Box<Term>),
    Exists(Vec<(String, Sort)>, Box<Term>),
}

/// A well-sorted term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub kind: TermKind,
    pub sort: Sort,
}

impl Term {
    pub fn new(kind: TermKind, sort: Sort) -> Self {
        Term { kind, sort }
    }

    pub fn bool(b: bool) -> Term {
        Term::new(TermKind::Bool(b), Sort::Bool)
    }

    pub fn int(i: impl Into<BigInt>) -> Term {
        Term::new(TermKind::Int(i.into()), Sort::Int)
    }

    pub fn var(name: impl Into<String>, sort: Sort) -> Term {
        Term::new(TermKind::Var(name.into()), sort)
    }

    pub fn constant(name: impl Into<String>, sort: Sort) -> Term {
        Term::new(TermKind::Const(name.into()), sort)
    }

    pub fn app(op: Op, args: Vec<Term>, sort: Sort) -> Term {
        Term::new(TermKind::App(op, args), sort)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(t: Term) -> Term {
        Term::app(Op::Not, vec![t], Sort::Bool)
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::app(Op::Eq, vec![a, b], Sort::Bool)
    }

    /// `and` of the given terms; `true` when empty, the term itself when single.
    pub fn and(mut ts: Vec<Term>) -> Term {
        match ts.len() {
            0 => Term::bool(true),
            1 => ts.remove(0),
            _ => Term::app(Op::And, ts, Sort::Bool),
        }
    }

    pub fn or(mut ts: Vec<Term>) -> Term {
        match ts.len() {
            0 => Term::bool(false),
            1 => ts.remove(0),
            _ => Term::app(Op::Or, ts, Sort::Bool),
        }
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::app(Op::Implies, vec![a, b], Sort::Bool)
    }

    pub fn args(&self) -> &[Term] {
        match &self.kind {
            TermKind::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn op(&self) -> Option<&Op> {
        match &self.kind {
            TermKind::App(op, _) => Some(op),
            _ => None,
        }
    }

    pub fn heap_op(&self) -> Option<(HeapId, &HeapOp)> {
        match self.op() {
            Some(Op::Heap(id, op)) => Some((*id, op)),
            _ => None,
        }
    }

    /// Pre-order traversal over every subterm, including binder bodies.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match &self.kind {
            TermKind::App(_, args) => args.iter().for_each(|a| a.visit(f)),
            TermKind::Let(binds, body) => {
                binds.iter().for_each(|(_, t)| t.visit(f));
                body.visit(f);
            }
            TermKind::Forall(_, body) | TermKind::Exists(_, body) => body.visit(f),
            _ => {}
        }
    }

    pub fn any(&self, pred: &impl Fn(&Term) -> bool) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= pred(t));
        found
    }

    pub fn has_heap_ops(&self) -> bool {
        self.any(&|t| t.heap_op().is_some())
    }

    pub fn has_binders(&self) -> bool {
        self.any(&|t| matches!(t.kind, TermKind::Let(..) | TermKind::Forall(..) | TermKind::Exists(..)))
    }

    /// Free constants (declared nullary symbols) with their sorts.
    pub fn constants(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let TermKind::Const(c) = &t.kind {
                out.insert((c.clone(), t.sort.clone()));
            }
        });
        out
    }

    /// Prints the term back to SMT-LIB; heap operations use the names
    /// registered in `env`.
    pub fn to_sexpr(&self, env: &Env) -> SExpr {
        self.to_sexpr_with(env, &|_| None)
    }

    /// Like [`Term::to_sexpr`], but `hook` may replace the rendering of any
    /// subterm, including the root.
    pub fn to_sexpr_with(&self, env: &Env, hook: &dyn Fn(&Term) -> Option<SExpr>) -> SExpr {
        if let Some(e) = hook(self) {
            return e;
        }
        match &self.kind {
            TermKind::Var(v) | TermKind::Const(v) => SExpr::symbol(v.as_str()),
            TermKind::Bool(b) => SExpr::symbol(if *b { "true" } else { "false" }),
            TermKind::Int(i) => {
                let mag = SExpr::numeral(i.magnitude().clone());
                if i.sign() == Sign::Minus {
                    SExpr::app("-", [mag])
                } else {
                    mag
                }
            }
            TermKind::Let(binds, body) => SExpr::app(
                "let",
                [
                    SExpr::list(
                        binds
                            .iter()
                            .map(|(n, t)| SExpr::list(vec![SExpr::symbol(n.as_str()), t.to_sexpr_with(env, hook)]))
                            .collect(),
                    ),
                    body.to_sexpr_with(env, hook),
                ],
            ),
            TermKind::Forall(vars, body) | TermKind::Exists(vars, body) => {
                let q = if matches!(self.kind, TermKind::Forall(..)) {
                    "forall"
                } else {
                    "exists"
                };
                SExpr::app(
                    q,
                    [
                        SExpr::list(
                            vars.iter()
                                .map(|(n, s)| SExpr::list(vec![SExpr::symbol(n.as_str()), s.to_sexpr()]))
                                .collect(),
                        ),
                        body.to_sexpr_with(env, hook),
                    ],
                )
            }
            TermKind::App(op, args) => {
                let args_sx = || args.iter().map(|a| a.to_sexpr_with(env, hook)).collect::<Vec<_>>();
                let head = match op {
                    Op::ConstArray => SExpr::app("as", [SExpr::symbol("const"), self.sort.to_sexpr()]),
                    Op::Tester { datatype, constructor } => {
                        let name = &env.datatype(datatype).expect("datatype").constructors[*constructor].name;
                        SExpr::app("_", [SExpr::symbol("is"), SExpr::symbol(name.as_str())])
                    }
                    Op::Heap(id, HeapOp::NthAddress(i)) => {
                        return SExpr::app(
                            "_",
                            [
                                SExpr::symbol(env.heap(*id).nth_address.as_str()),
                                SExpr::numeral(i.clone()),
                            ],
                        )
                    }
                    _ => SExpr::symbol(op_name(op, env)),
                };
                if args.is_empty() {
                    head
                } else {
                    let mut items = vec![head];
                    items.extend(args_sx());
                    SExpr::list(items)
                }
            }
        }
    }
}

fn op_name(op: &Op, env: &Env) -> String {
    match op {
        Op::Not => "not".into(),
        Op::And => "and".into(),
        Op::Or => "or".into(),
        Op::Implies => "=>".into(),
        Op::Xor => "xor".into(),
        Op::Eq => "=".into(),
        Op::Distinct => "distinct".into(),
        Op::Ite => "ite".into(),
        Op::Neg | Op::Sub => "-".into(),
        Op::Add => "+".into(),
        Op::Mul => "*".into(),
        Op::Div => "div".into(),
        Op::Mod => "mod".into(),
        Op::Abs => "abs".into(),
        Op::Le => "<=".into(),
        Op::Lt => "<".into(),
        Op::Ge => ">=".into(),
        Op::Gt => ">".into(),
        Op::Select => "select".into(),
        Op::Store => "store".into(),
        Op::Constructor(c) => c.clone(),
        Op::Selector { name, .. } => name.clone(),
        Op::Apply(f) => f.clone(),
        Op::Heap(id, h) => {
            let sig = env.heap(*id);
            match h {
                HeapOp::Read => "read".into(),
                HeapOp::Write => "write".into(),
                HeapOp::Allocate => "allocate".into(),
                HeapOp::Valid => "valid".into(),
                HeapOp::EmptyHeap => sig.empty_heap.clone(),
                HeapOp::NullAddress => sig.null_address.clone(),
                HeapOp::NthAddress(_) => sig.nth_address.clone(),
            }
        }
        Op::ConstArray | Op::Tester { .. } => unreachable!("printed structurally"),
    }
}

/// Displays via a dummy environment-free rendering; heap operation names
/// fall back to their generic names.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TermKind::Var(v) | TermKind::Const(v) => write!(f, "{v}"),
            TermKind::Bool(b) => write!(f, "{b}"),
            TermKind::Int(i) if i.sign() == Sign::Minus => write!(f, "(- {})", i.magnitude()),
            TermKind::Int(i) => write!(f, "{i}"),
            TermKind::Let(binds, body) => {
                write!(f, "(let (")?;
                for (n, t) in binds {
                    write!(f, "({n} {t})")?;
                }
                write!(f, ") {body})")
            }
            TermKind::Forall(vars, body) | TermKind::Exists(vars, body) => {
                let q = if matches!(self.kind, TermKind::Forall(..)) {
                    "forall"
                } else {
                    "exists"
                };
                write!(f, "({q} (")?;
                for (n, s) in vars {
                    write!(f, "({n} {s})")?;
                }
                write!(f, ") {body})")
            }
            TermKind::App(op, args) => {
                let name = match op {
                    Op::Not => "not".to_string(),
                    Op::And => "and".into(),
                    Op::Or => "or".into(),
                    Op::Implies => "=>".into(),
                    Op::Xor => "xor".into(),
                    Op::Eq => "=".into(),
                    Op::Distinct => "distinct".into(),
                    Op::Ite => "ite".into(),
                    Op::Neg | Op::Sub => "-".into(),
                    Op::Add => "+".into(),
                    Op::Mul => "*".into(),
                    Op::Div => "div".into(),
                    Op::Mod => "mod".into(),
                    Op::Abs => "abs".into(),
                    Op::Le => "<=".into(),
                    Op::Lt => "<".into(),
                    Op::Ge => ">=".into(),
                    Op::Gt => ">".into(),
                    Op::Select => "select".into(),
                    Op::Store => "store".into(),
                    Op::ConstArray => format!("(as const {})", self.sort),
                    Op::Constructor(c) => c.clone(),
                    Op::Selector { name, .. } => name.clone(),
                    Op::Tester { datatype, constructor } => format!("(_ is {datatype}#{constructor})"),
                    Op::Apply(n) => n.clone(),
                    Op::Heap(_, h) => match h {
                        HeapOp::Read => "read".into(),
                        HeapOp::Write => "write".into(),
                        HeapOp::Allocate => "allocate".into(),
                        HeapOp::Valid => "valid".into(),
                        HeapOp::EmptyHeap => "emptyHeap".into(),
                        HeapOp::NullAddress => "nullAddress".into(),
                        HeapOp::NthAddress(i) => format!("(_ nthAddress {i})"),
                    },
                };
                if args.is_empty() {
                    write!(f, "{name}")
                } else {
                    write!(f, "({name}")?;
                    for a in args {
                        write!(f, " {a}")?;
                    }
                    write!(f, ")")
                }
            }
        }
    }
}
