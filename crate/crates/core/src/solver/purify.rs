//! Flattening of literals into definitional constraints over fresh nodes.

use std::collections::HashMap;
use std::fmt;

use num_traits::ToPrimitive;

use super::{Conjunction, FragmentError};
use crate::elaborator::{Env, HeapOp, Op, Sort, SortKind, Term, TermKind};
use crate::semantics::{eval, Interpretation, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AddrNode(pub usize);
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeapNode(pub usize);
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjNode(pub usize);

impl AddrNode {
    pub const NULL: AddrNode = AddrNode(0);
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObjKind {
    Const(String),
    /// Result of a read constraint.
    Read,
    /// Closed term without heap operations, already evaluated.
    Ground(Value),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstNode {
    Addr(AddrNode),
    Heap(HeapNode),
    Obj(ObjNode),
    AllocResult(HeapNode, AddrNode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WriteEq {
    pub out: HeapNode,
    pub heap: HeapNode,
    pub addr: AddrNode,
    pub obj: ObjNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AllocEq {
    pub out: HeapNode,
    pub addr: AddrNode,
    pub heap: HeapNode,
    pub obj: ObjNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReadEq {
    pub heap: HeapNode,
    pub addr: AddrNode,
    pub obj: ObjNode,
}

/// Purified conjunction. Address node 0 is `null`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatConstraints {
    /// Fixed numeric value of `null` and `nth` nodes.
    pub addr_fixed: Vec<Option<u64>>,
    pub heap_count: usize,
    pub objs: Vec<ObjKind>,
    pub object_sort: Sort,
    pub def_obj: ObjNode,
    pub reads: Vec<ReadEq>,
    pub writes: Vec<WriteEq>,
    pub allocs: Vec<AllocEq>,
    pub empties: Vec<HeapNode>,
    pub valid: Vec<(HeapNode, AddrNode, bool)>,
    pub addr_eq: Vec<(AddrNode, AddrNode)>,
    pub addr_neq: Vec<(AddrNode, AddrNode)>,
    pub heap_eq: Vec<(HeapNode, HeapNode)>,
    pub heap_neq: Vec<(HeapNode, HeapNode)>,
    pub obj_eq: Vec<(ObjNode, ObjNode)>,
    pub obj_neq: Vec<(ObjNode, ObjNode)>,
    pub ar_neq: Vec<((HeapNode, AddrNode), (HeapNode, AddrNode))>,
    pub consts: Vec<(String, ConstNode)>,
    /// A literal was trivially false.
    pub trivially_false: bool,
}

impl FlatConstraints {
    pub fn addr_count(&self) -> usize {
        self.addr_fixed.len()
    }

    pub fn max_nth(&self) -> u64 {
        self.addr_fixed.iter().flatten().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Heap,
    Addr,
    Ar,
    Obj,
}

struct Purifier<'a> {
    env: &'a Env,
    object_sort: Sort,
    flat: FlatConstraints,
    addr_memo: HashMap<Term, AddrNode>,
    heap_memo: HashMap<Term, HeapNode>,
    ar_memo: HashMap<Term, (HeapNode, AddrNode)>,
    obj_memo: HashMap<Term, ObjNode>,
    ground_memo: HashMap<Value, ObjNode>,
}

fn out_of_fragment(what: &str, t: &Term, env: &Env) -> FragmentError {
    FragmentError(format!("{what}: {}", t.to_sexpr(env)))
}

impl<'a> Purifier<'a> {
    fn kind(&self, sort: &Sort) -> Option<Kind> {
        match self.env.sort_kind(sort) {
            Some(SortKind::Heap(_)) => Some(Kind::Heap),
            Some(SortKind::Address(_)) => Some(Kind::Addr),
            Some(SortKind::AllocResult(_)) => Some(Kind::Ar),
            _ if *sort == self.object_sort => Some(Kind::Obj),
            _ => None,
        }
    }

    fn new_addr(&mut self, fixed: Option<u64>) -> AddrNode {
        self.flat.addr_fixed.push(fixed);
        AddrNode(self.flat.addr_fixed.len() - 1)
    }

    fn new_heap(&mut self) -> HeapNode {
        self.flat.heap_count += 1;
        HeapNode(self.flat.heap_count - 1)
    }

    fn new_obj(&mut self, k: ObjKind) -> ObjNode {
        self.flat.objs.push(k);
        ObjNode(self.flat.objs.len() - 1)
    }

    fn is_ar_selector(&self, t: &Term, field: usize) -> bool {
        matches!(t.op(), Some(Op::Selector { datatype, field: f, .. })
            if *f == field && self.env.sort_kind_of(datatype).is_some_and(|k| matches!(k, SortKind::AllocResult(_))))
    }

    fn addr(&mut self, t: &Term) -> Result<AddrNode, FragmentError> {
        if let Some(&n) = self.addr_memo.get(t) {
            return Ok(n);
        }
        let n = match &t.kind {
            TermKind::Const(name) => {
                let n = self.new_addr(None);
                self.flat.consts.push((name.clone(), ConstNode::Addr(n)));
                n
            }
            _ => match t.heap_op() {
                Some((_, HeapOp::NullAddress)) => AddrNode::NULL,
                Some((_, HeapOp::NthAddress(i))) => {
                    let i = i
                        .to_u64()
                        .filter(|&i| i < 1 << 40)
                        .ok_or_else(|| out_of_fragment("address index too large", t, self.env))?;
                    self.new_addr(Some(i))
                }
                _ if self.is_ar_selector(t, 1) => self.alloc_result(&t.args()[0])?.1,
                _ => return Err(out_of_fragment("unsupported address term", t, self.env)),
            },
        };
        self.addr_memo.insert(t.clone(), n);
        Ok(n)
    }

    fn heap(&mut self, t: &Term) -> Result<HeapNode, FragmentError> {
        if let Some(&n) = self.heap_memo.get(t) {
            return Ok(n);
        }
        let n = match (&t.kind, t.heap_op()) {
            (TermKind::Const(name), _) => {
                let n = self.new_heap();
                self.flat.consts.push((name.clone(), ConstNode::Heap(n)));
                n
            }
            (_, Some((_, HeapOp::EmptyHeap))) => {
                let n = self.new_heap();
                self.flat.empties.push(n);
                n
            }
            (_, Some((_, HeapOp::Write))) => {
                let a = t.args();
                let heap = self.heap(&a[0])?;
                let addr = self.addr(&a[1])?;
                let obj = self.obj(&a[2])?;
                let out = self.new_heap();
                self.flat.writes.push(WriteEq { out, heap, addr, obj });
                out
            }
            _ if self.is_ar_selector(t, 0) => self.alloc_result(&t.args()[0])?.0,
            _ => return Err(out_of_fragment("unsupported heap term", t, self.env)),
        };
        self.heap_memo.insert(t.clone(), n);
        Ok(n)
    }

    fn alloc_result(&mut self, t: &Term) -> Result<(HeapNode, AddrNode), FragmentError> {
        if let Some(&n) = self.ar_memo.get(t) {
            return Ok(n);
        }
        let n = match (&t.kind, t.heap_op(), t.op()) {
            (TermKind::Const(name), _, _) => {
                let h = self.new_heap();
                let a = self.new_addr(None);
                self.flat.consts.push((name.clone(), ConstNode::AllocResult(h, a)));
                (h, a)
            }
            (_, Some((_, HeapOp::Allocate)), _) => {
                let heap = self.heap(&t.args()[0])?;
                let obj = self.obj(&t.args()[1])?;
                let out = self.new_heap();
                let addr = self.new_addr(None);
                self.flat.allocs.push(AllocEq { out, addr, heap, obj });
                (out, addr)
            }
            (_, _, Some(Op::Constructor(_))) => (self.heap(&t.args()[0])?, self.addr(&t.args()[1])?),
            _ => return Err(out_of_fragment("unsupported allocation-result term", t, self.env)),
        };
        self.ar_memo.insert(t.clone(), n);
        Ok(n)
    }

    fn obj(&mut self, t: &Term) -> Result<ObjNode, FragmentError> {
        if let Some(&n) = self.obj_memo.get(t) {
            return Ok(n);
        }
        let n = match (&t.kind, t.heap_op()) {
            (TermKind::Const(name), _) => {
                let n = self.new_obj(ObjKind::Const(name.clone()));
                self.flat.consts.push((name.clone(), ConstNode::Obj(n)));
                n
            }
            (_, Some((_, HeapOp::Read))) => {
                let heap = self.heap(&t.args()[0])?;
                let addr = self.addr(&t.args()[1])?;
                let obj = self.new_obj(ObjKind::Read);
                self.flat.reads.push(ReadEq { heap, addr, obj });
                obj
            }
            _ if t.constants().is_empty() && !t.has_heap_ops() && !t.has_binders() => {
                let v = eval(self.env, t, &Interpretation::default())
                    .map_err(|e| FragmentError(format!("cannot evaluate {}: {e}", t.to_sexpr(self.env))))?;
                if let Some(&n) = self.ground_memo.get(&v) {
                    n
                } else {
                    let n = self.new_obj(ObjKind::Ground(v.clone()));
                    self.ground_memo.insert(v, n);
                    n
                }
            }
            _ => return Err(out_of_fragment("unsupported object term", t, self.env)),
        };
        self.obj_memo.insert(t.clone(), n);
        Ok(n)
    }

    fn equation(&mut self, a: &Term, b: &Term, positive: bool) -> Result<(), FragmentError> {
        let Some(kind) = self.kind(&a.sort) else {
            return Err(FragmentError(format!("equation over sort {}", a.sort.to_sexpr())));
        };
        match kind {
            Kind::Addr => {
                let pair = (self.addr(a)?, self.addr(b)?);
                if positive {
                    &mut self.flat.addr_eq
                } else {
                    &mut self.flat.addr_neq
                }
                .push(pair);
            }
            Kind::Heap => {
                let pair = (self.heap(a)?, self.heap(b)?);
                if positive {
                    &mut self.flat.heap_eq
                } else {
                    &mut self.flat.heap_neq
                }
                .push(pair);
            }
            Kind::Obj => {
                let pair = (self.obj(a)?, self.obj(b)?);
                if positive {
                    &mut self.flat.obj_eq
                } else {
                    &mut self.flat.obj_neq
                }
                .push(pair);
            }
            Kind::Ar => {
                let (x, y) = (self.alloc_result(a)?, self.alloc_result(b)?);
                if positive {
                    self.flat.heap_eq.push((x.0, y.0));
                    self.flat.addr_eq.push((x.1, y.1));
                } else {
                    self.flat.ar_neq.push((x, y));
                }
            }
        }
        Ok(())
    }

    fn literal(&mut self, atom: &Term, positive: bool) -> Result<(), FragmentError> {
        let args = atom.args();
        match (&atom.kind, atom.heap_op()) {
            (TermKind::Bool(b), _) => {
                if *b != positive {
                    self.flat.trivially_false = true;
                }
            }
            (_, Some((_, HeapOp::Valid))) => {
                let h = self.heap(&args[0])?;
                let a = self.addr(&args[1])?;
                self.flat.valid.push((h, a, positive));
            }
            (TermKind::App(Op::Eq, _), _) if positive || args.len() == 2 => {
                for w in args.windows(2) {
                    self.equation(&w[0], &w[1], positive)?;
                }
            }
            (TermKind::App(Op::Distinct, _), _) if !positive && args.len() == 2 => {
                self.equation(&args[0], &args[1], true)?;
            }
            (TermKind::App(Op::Distinct, _), _) if positive => {
                for (i, x) in args.iter().enumerate() {
                    for y in &args[i + 1..] {
                        self.equation(x, y, false)?;
                    }
                }
            }
            _ => return Err(out_of_fragment("unsupported literal", atom, self.env)),
        }
        Ok(())
    }
}

/// Names every subterm with a node and records its defining constraint.
pub fn purify(conj: &Conjunction) -> Result<FlatConstraints, FragmentError> {
    let sig = conj.heap()?;
    let env = &conj.env;
    match env.sort_kind(&sig.object_sort) {
        Some(SortKind::Uninterpreted | SortKind::Datatype) => {}
        _ => {
            return Err(FragmentError(format!(
                "object sort {} is neither uninterpreted nor a datatype",
                sig.object_sort.to_sexpr()
            )))
        }
    }
    if env.mentions_heap_world(&sig.object_sort)
        || env
            .datatypes()
            .filter(|d| !matches!(env.sort_kind_of(&d.name), Some(SortKind::AllocResult(_))))
            .any(|d| {
                d.constructors
                    .iter()
                    .flat_map(|c| &c.fields)
                    .any(|f| env.is_address(&f.sort))
            })
    {
        return Err(FragmentError("objects may not contain addresses".into()));
    }
    let mut p = Purifier {
        env,
        object_sort: sig.object_sort.clone(),
        flat: FlatConstraints {
            addr_fixed: vec![Some(0)],
            heap_count: 0,
            objs: vec![],
            object_sort: sig.object_sort.clone(),
            def_obj: ObjNode(0),
            reads: vec![],
            writes: vec![],
            allocs: vec![],
            empties: vec![],
            valid: vec![],
            addr_eq: vec![],
            addr_neq: vec![],
            heap_eq: vec![],
            heap_neq: vec![],
            obj_eq: vec![],
            obj_neq: vec![],
            ar_neq: vec![],
            consts: vec![],
            trivially_false: false,
        },
        addr_memo: HashMap::new(),
        heap_memo: HashMap::new(),
        ar_memo: HashMap::new(),
        obj_memo: HashMap::new(),
        ground_memo: HashMap::new(),
    };
    p.flat.def_obj = p.obj(&sig.def_obj)?;
    for lit in &conj.literals {
        if lit.atom.has_binders() {
            return Err(out_of_fragment("quantified literal", &lit.atom, env));
        }
        p.literal(&lit.atom, lit.positive)?;
    }
    Ok(p.flat)
}

impl fmt::Display for FlatConstraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.addr_fixed.iter().enumerate() {
            if let Some(v) = v {
                writeln!(f, "a{n} := {v}")?;
            }
        }
        for (n, k) in self.objs.iter().enumerate() {
            match k {
                ObjKind::Const(c) => writeln!(f, "o{n} := {c}")?,
                ObjKind::Ground(v) => writeln!(f, "o{n} := {v}")?,
                ObjKind::Read => {}
            }
        }
        for (c, node) in &self.consts {
            match node {
                ConstNode::Heap(h) => writeln!(f, "h{} := {c}", h.0)?,
                ConstNode::AllocResult(h, a) => writeln!(f, "(h{}, a{}) := {c}", h.0, a.0)?,
                _ => {}
            }
        }
        writeln!(f, "defObj = o{}", self.def_obj.0)?;
        for h in &self.empties {
            writeln!(f, "h{} = emptyHeap", h.0)?;
        }
        for w in &self.writes {
            writeln!(f, "writeEq(h{}, h{}, a{}, o{})", w.out.0, w.heap.0, w.addr.0, w.obj.0)?;
        }
        for a in &self.allocs {
            writeln!(f, "allocEq(h{}, a{}, h{}, o{})", a.out.0, a.addr.0, a.heap.0, a.obj.0)?;
        }
        for r in &self.reads {
            writeln!(f, "readEq(h{}, a{}, o{})", r.heap.0, r.addr.0, r.obj.0)?;
        }
        for (h, a, pos) in &self.valid {
            writeln!(f, "validity(h{}, a{}, {})", h.0, a.0, if *pos { "+" } else { "-" })?;
        }
        let pairs = [
            (
                "a",
                "=",
                &self.addr_eq.iter().map(|(x, y)| (x.0, y.0)).collect::<Vec<_>>(),
            ),
            ("a", "!=", &self.addr_neq.iter().map(|(x, y)| (x.0, y.0)).collect()),
            ("h", "=", &self.heap_eq.iter().map(|(x, y)| (x.0, y.0)).collect()),
            ("h", "!=", &self.heap_neq.iter().map(|(x, y)| (x.0, y.0)).collect()),
            ("o", "=", &self.obj_eq.iter().map(|(x, y)| (x.0, y.0)).collect()),
            ("o", "!=", &self.obj_neq.iter().map(|(x, y)| (x.0, y.0)).collect()),
        ];
        for (p, rel, list) in pairs {
            for (x, y) in list.iter() {
                writeln!(f, "{p}{x} {rel} {p}{y}")?;
            }
        }
        for ((h1, a1), (h2, a2)) in &self.ar_neq {
            writeln!(f, "(h{}, a{}) != (h{}, a{})", h1.0, a1.0, h2.0, a2.0)?;
        }
        if self.trivially_false {
            writeln!(f, "false")?;
        }
        Ok(())
    }
}
