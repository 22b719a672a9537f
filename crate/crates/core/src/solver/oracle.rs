//! Bounded model enumeration, independent of the arrangement search.
//!
//! Free symbols are assigned on demand: evaluating a literal either yields a
//! truth value or names the unassigned quantity it needs (an address, a heap
//! size, one heap cell, an object constant), and the enumerator branches over
//! that quantity's finite domain. Models found are re-checked by
//! [`semantics::eval`](crate::semantics::eval).
//!
//! # Bounds
//!
//! [`model_bound`] returns a numeric bound `B` for addresses and sizes and an
//! object count `K`. Take any model and collect its *points*: 0, every `nth`
//! index, the values of address constants, the sizes of heap constants, both
//! components of allocation-result constants, the new address of every
//! `allocate` term, and for each heap disequality between equal-size heaps a
//! position where they differ. Every size and address any literal looks at is
//! a point, and any two points that differ by one stay one apart under the
//! map that fixes values up to the largest `nth` index and sends the
//! remaining points, in order, to consecutive integers above it. Re-indexing
//! heap contents through that map gives a model whose points are at most
//! `max_nth + #points`, which is `B`. Objects are compared only for equality
//! (uninterpreted sorts) or against ground values, so all objects other than
//! the values of object terms, the default object and the two cells of each
//! witness can be merged into the default, leaving `K` values.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use num_traits::ToPrimitive;

use super::Conjunction;
use crate::elaborator::{Env, HeapOp, Op, Sort, SortKind, Term, TermKind};
use crate::semantics::{eval, Bounds, EvalError, HeapValue, Interpretation, Universes, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    /// Addresses and heap sizes range over `0..=max_value`.
    pub max_value: u64,
    /// Number of object values beyond the ground values of the formula.
    pub objects: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleVerdict {
    Sat(Interpretation),
    UnsatWithinBounds,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("not supported by the enumerator: {0}")]
    Unsupported(String),
    #[error("enumeration budget of {budget} nodes exceeded; the bounds allow up to {estimate:.3e} assignments")]
    Refused { budget: u64, estimate: f64 },
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("enumerated model does not satisfy the input: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sym {
    Addr(usize),
    Heap(usize),
    Obj(usize),
    Ar(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Need {
    Addr(usize),
    Size(usize),
    Cell(usize, u64),
    Obj(usize),
    /// How the heaps covering a class of unnamed positions agree there.
    Class(u64),
}

enum Stop {
    Need(Need),
    Fail(OracleError),
}

impl From<OracleError> for Stop {
    fn from(e: OracleError) -> Self {
        Stop::Fail(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct VHeap {
    base: Option<usize>,
    size: u64,
    /// Later entries shadow earlier ones.
    overlay: Vec<(u64, ObjV)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum LV {
    Bool(bool),
    Addr(u64),
    Heap(VHeap),
    Obj(ObjV),
    Ar(VHeap, u64),
}

/// An object, possibly still unassigned. Storing an object in a heap does not
/// force its value; comparing it does.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ObjV {
    Label(u32),
    Const(usize),
    Cell(usize, u64),
    /// Stored before its own term could be evaluated.
    Blocked(Need),
    /// A value at an unnamed position, distinct from the default and from
    /// the other blocks of its class.
    Fresh(u64, u8),
}

#[derive(Default, Clone)]
struct Assignment {
    addrs: Vec<Option<u64>>,
    sizes: Vec<Option<u64>>,
    cells: HashMap<(usize, u64), u32>,
    objs: Vec<Option<u32>>,
    /// Values of all address terms, once every address and size is known.
    named: Option<Rc<BTreeSet<u64>>>,
    /// Chosen partition per class of unnamed positions.
    classes: HashMap<u64, u32>,
}

struct Enumerator<'a> {
    env: &'a Env,
    conj: &'a Conjunction,
    syms: HashMap<String, Sym>,
    heap_names: Vec<String>,
    addr_names: Vec<String>,
    ar_names: Vec<(String, usize, usize)>,
    obj_names: Vec<String>,
    /// Object values; labels index this table.
    table: Vec<Value>,
    /// Labels may be renamed freely (uninterpreted object sort).
    symmetric: bool,
    bound: u64,
    budget: u64,
    nodes: u64,
    /// Addresses and sizes of the symbols the literals mention.
    numeric: Vec<Need>,
    addr_terms: Vec<Term>,
    alloc_heaps: Vec<Term>,
    /// Partitions of `n + 1` elements as restricted growth strings, element 0
    /// standing for the default object.
    partitions: HashMap<usize, Vec<Vec<u8>>>,
}

fn partitions(n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                let top = *p.iter().max().unwrap();
                (0..=top + 1).map(move |b| {
                    let mut q = p.clone();
                    q.push(b);
                    q
                })
            })
            .collect();
    }
    out
}

fn unsupported(t: &Term, env: &Env) -> Stop {
    Stop::Fail(OracleError::Unsupported(t.to_sexpr(env).to_string()))
}

impl<'a> Enumerator<'a> {
    fn object_sort(&self) -> &Sort {
        &self.env.heaps()[0].object_sort
    }

    fn label_of(&mut self, v: Value) -> u32 {
        match self.table.iter().position(|x| *x == v) {
            Some(i) => i as u32,
            None => {
                self.table.push(v);
                self.table.len() as u32 - 1
            }
        }
    }

    fn def_obj(&mut self, a: &Assignment) -> Result<ObjV, Stop> {
        let def = self.env.heaps()[0].def_obj.clone();
        match self.eval(&def, a)? {
            LV::Obj(o) => Ok(o),
            _ => Err(unsupported(&def, self.env)),
        }
    }

    fn resolve(o: ObjV, a: &Assignment) -> ObjV {
        let found = match o {
            ObjV::Label(_) | ObjV::Blocked(_) | ObjV::Fresh(..) => None,
            ObjV::Const(k) => a.objs[k],
            ObjV::Cell(j, p) => a.cells.get(&(j, p)).copied(),
        };
        found.map_or(o, ObjV::Label)
    }

    fn need_of(o: ObjV) -> Stop {
        Stop::Need(match o {
            ObjV::Const(k) => Need::Obj(k),
            ObjV::Cell(j, p) => Need::Cell(j, p),
            ObjV::Blocked(n) => n,
            ObjV::Label(_) | ObjV::Fresh(..) => unreachable!("decided values need nothing"),
        })
    }

    fn same_obj(x: ObjV, y: ObjV, a: &Assignment) -> Result<bool, Stop> {
        match (Self::resolve(x, a), Self::resolve(y, a)) {
            (x, y) if x == y && !matches!(x, ObjV::Blocked(_)) => Ok(true),
            (ObjV::Fresh(..), _) | (_, ObjV::Fresh(..)) => Ok(false),
            (ObjV::Label(l), ObjV::Label(m)) => Ok(l == m),
            (ObjV::Label(_), o) | (o, _) => Err(Self::need_of(o)),
        }
    }

    fn read(&mut self, h: &VHeap, p: u64, a: &Assignment) -> Result<ObjV, Stop> {
        if p == 0 || p > h.size {
            return self.def_obj(a);
        }
        if let Some(&(_, o)) = h.overlay.iter().rev().find(|(q, _)| *q == p) {
            return Ok(o);
        }
        match h.base {
            Some(j) => self.cell(j, p, a),
            None => self.def_obj(a),
        }
    }

    fn cell(&mut self, j: usize, p: u64, a: &Assignment) -> Result<ObjV, Stop> {
        match &a.named {
            Some(named) if !named.contains(&p) => {}
            _ => return Ok(ObjV::Cell(j, p)),
        }
        let mask = Self::class_of(p, a);
        let Some(&pi) = a.classes.get(&mask) else {
            return Err(Stop::Need(Need::Class(mask)));
        };
        let at = (mask & ((1u64 << j) - 1)).count_ones() as usize + 1;
        match self.partitions_of(mask)[pi as usize][at] {
            0 => self.def_obj(a),
            b => Ok(ObjV::Fresh(mask, b)),
        }
    }

    /// The heaps whose size reaches `p`.
    fn class_of(p: u64, a: &Assignment) -> u64 {
        a.sizes
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some_and(|s| s >= p))
            .fold(0, |m, (j, _)| m | 1 << j)
    }

    fn partitions_of(&mut self, mask: u64) -> &Vec<Vec<u8>> {
        let n = mask.count_ones() as usize;
        self.partitions.entry(n).or_insert_with(|| partitions(n))
    }

    /// Every address a literal can look at, or `None` while some is unknown.
    fn named_points(&mut self, a: &Assignment) -> Option<BTreeSet<u64>> {
        let mut out = BTreeSet::from([0]);
        for t in self.addr_terms.clone() {
            match self.eval(&t, a) {
                Ok(LV::Addr(p)) => out.insert(p),
                _ => return None,
            };
        }
        for t in self.alloc_heaps.clone() {
            out.insert(self.size(&t, a).ok()? + 1);
        }
        Some(out)
    }

    fn heap_var(&self, j: usize, a: &Assignment) -> Result<VHeap, Stop> {
        let size = a.sizes[j].ok_or(Stop::Need(Need::Size(j)))?;
        Ok(VHeap {
            base: Some(j),
            size,
            overlay: vec![],
        })
    }

    fn equal(&mut self, x: &LV, y: &LV, a: &Assignment) -> Result<bool, Stop> {
        Ok(match (x, y) {
            (LV::Heap(g), LV::Heap(h)) => {
                if g.size != h.size {
                    return Ok(false);
                }
                // A decided mismatch anywhere wins over a need earlier on.
                let mut pending = None;
                for p in 1..=g.size {
                    let (x, y) = (self.read(g, p, a), self.read(h, p, a));
                    match x.and_then(|x| Self::same_obj(x, y?, a)) {
                        Ok(true) => {}
                        Ok(false) => return Ok(false),
                        Err(e @ Stop::Fail(_)) => return Err(e),
                        Err(e) => {
                            pending.get_or_insert(e);
                        }
                    }
                }
                match pending {
                    Some(e) => return Err(e),
                    None => true,
                }
            }
            (LV::Ar(g, p), LV::Ar(h, q)) => p == q && self.equal(&LV::Heap(g.clone()), &LV::Heap(h.clone()), a)?,
            (LV::Obj(x), LV::Obj(y)) => Self::same_obj(*x, *y, a)?,
            _ => x == y,
        })
    }

    fn eval(&mut self, t: &Term, a: &Assignment) -> Result<LV, Stop> {
        let env = self.env;
        let args = t.args();
        match &t.kind {
            TermKind::Bool(b) => return Ok(LV::Bool(*b)),
            TermKind::Const(name) => {
                return match self.syms.get(name) {
                    Some(Sym::Addr(i)) => a.addrs[*i].map(LV::Addr).ok_or(Stop::Need(Need::Addr(*i))),
                    Some(Sym::Heap(j)) => Ok(LV::Heap(self.heap_var(*j, a)?)),
                    Some(Sym::Obj(k)) => Ok(LV::Obj(Self::resolve(ObjV::Const(*k), a))),
                    Some(Sym::Ar(j, i)) => {
                        let h = self.heap_var(*j, a)?;
                        let p = a.addrs[*i].ok_or(Stop::Need(Need::Addr(*i)))?;
                        Ok(LV::Ar(h, p))
                    }
                    None => Err(unsupported(t, env)),
                };
            }
            _ => {}
        }
        if t.sort == *self.object_sort() && !t.has_heap_ops() && t.constants().is_empty() && !t.has_binders() {
            let v = eval(env, t, &Interpretation::default()).map_err(OracleError::from)?;
            return Ok(LV::Obj(ObjV::Label(self.label_of(v))));
        }
        let Some(op) = t.op() else {
            return Err(unsupported(t, env));
        };
        match op {
            Op::Heap(_, hop) => match hop {
                HeapOp::NullAddress => Ok(LV::Addr(0)),
                HeapOp::NthAddress(i) => Ok(LV::Addr(i.to_u64().ok_or_else(|| unsupported(t, env))?)),
                HeapOp::EmptyHeap => Ok(LV::Heap(VHeap {
                    base: None,
                    size: 0,
                    overlay: vec![],
                })),
                HeapOp::Read => {
                    let (LV::Heap(h), LV::Addr(p)) = (self.eval(&args[0], a)?, self.eval(&args[1], a)?) else {
                        return Err(unsupported(t, env));
                    };
                    Ok(LV::Obj(self.read(&h, p, a)?))
                }
                HeapOp::Write if self.size(&args[0], a)? == 0 => self.eval(&args[0], a),
                HeapOp::Write => {
                    let (LV::Heap(mut h), LV::Addr(p), LV::Obj(o)) = (
                        self.eval(&args[0], a)?,
                        self.eval(&args[1], a)?,
                        self.stored(&args[2], a)?,
                    ) else {
                        return Err(unsupported(t, env));
                    };
                    if p >= 1 && p <= h.size {
                        h.overlay.push((p, o));
                    }
                    Ok(LV::Heap(h))
                }
                HeapOp::Allocate => {
                    let (LV::Heap(mut h), LV::Obj(o)) = (self.eval(&args[0], a)?, self.stored(&args[1], a)?) else {
                        return Err(unsupported(t, env));
                    };
                    h.size += 1;
                    h.overlay.push((h.size, o));
                    let p = h.size;
                    Ok(LV::Ar(h, p))
                }
                HeapOp::Valid => {
                    let size = self.size(&args[0], a)?;
                    if size == 0 {
                        return Ok(LV::Bool(false));
                    }
                    let LV::Addr(p) = self.eval(&args[1], a)? else {
                        return Err(unsupported(t, env));
                    };
                    Ok(LV::Bool(p >= 1 && p <= size))
                }
            },
            Op::Selector { datatype, field, .. }
                if matches!(env.sort_kind_of(datatype), Some(SortKind::AllocResult(_))) =>
            {
                match self.eval(&args[0], a)? {
                    LV::Ar(h, _) if *field == 0 => Ok(LV::Heap(h)),
                    LV::Ar(_, p) => Ok(LV::Addr(p)),
                    _ => Err(unsupported(t, env)),
                }
            }
            Op::Constructor(_) if matches!(env.sort_kind(&t.sort), Some(SortKind::AllocResult(_))) => {
                match (self.eval(&args[0], a)?, self.eval(&args[1], a)?) {
                    (LV::Heap(h), LV::Addr(p)) => Ok(LV::Ar(h, p)),
                    _ => Err(unsupported(t, env)),
                }
            }
            Op::Not => match self.eval(&args[0], a)? {
                LV::Bool(b) => Ok(LV::Bool(!b)),
                _ => Err(unsupported(t, env)),
            },
            Op::And | Op::Or => {
                let target = matches!(op, Op::Or);
                for x in args {
                    if self.eval(x, a)? == LV::Bool(target) {
                        return Ok(LV::Bool(target));
                    }
                }
                Ok(LV::Bool(!target))
            }
            Op::Implies => {
                let p = self.eval(&args[0], a)? == LV::Bool(true);
                Ok(if p { self.eval(&args[1], a)? } else { LV::Bool(true) })
            }
            Op::Ite => {
                let c = self.eval(&args[0], a)? == LV::Bool(true);
                self.eval(&args[if c { 1 } else { 2 }], a)
            }
            Op::Eq | Op::Distinct if self.has_size(&args[0]) => {
                let sizes = args.iter().map(|x| self.size(x, a)).collect::<Result<Vec<_>, _>>()?;
                let differ = |i: usize, j: usize| sizes[i] != sizes[j];
                if matches!(op, Op::Eq) && (1..sizes.len()).any(|i| differ(i - 1, i)) {
                    return Ok(LV::Bool(false));
                }
                if matches!(op, Op::Distinct) && (0..sizes.len()).all(|i| (i + 1..sizes.len()).all(|j| differ(i, j))) {
                    return Ok(LV::Bool(true));
                }
                self.eval_eq(op, args, a)
            }
            Op::Eq | Op::Distinct => self.eval_eq(op, args, a),
            _ => Err(unsupported(t, env)),
        }
    }

    fn eval_eq(&mut self, op: &Op, args: &[Term], a: &Assignment) -> Result<LV, Stop> {
        match op {
            Op::Eq => {
                let vals = args.iter().map(|x| self.eval(x, a)).collect::<Result<Vec<_>, _>>()?;
                for w in vals.windows(2) {
                    if !self.equal(&w[0], &w[1], a)? {
                        return Ok(LV::Bool(false));
                    }
                }
                Ok(LV::Bool(true))
            }
            Op::Distinct => {
                let vals = args.iter().map(|x| self.eval(x, a)).collect::<Result<Vec<_>, _>>()?;
                for (i, x) in vals.iter().enumerate() {
                    for y in &vals[i + 1..] {
                        if self.equal(x, y, a)? {
                            return Ok(LV::Bool(false));
                        }
                    }
                }
                Ok(LV::Bool(true))
            }
            _ => unreachable!("only equalities"),
        }
    }

    fn has_size(&self, t: &Term) -> bool {
        matches!(
            self.env.sort_kind(&t.sort),
            Some(SortKind::Heap(_) | SortKind::AllocResult(_))
        )
    }

    /// Size of a heap or allocation result, needing as little as possible.
    fn size(&mut self, t: &Term, a: &Assignment) -> Result<u64, Stop> {
        let args = t.args();
        if let TermKind::Const(name) = &t.kind {
            if let Some(Sym::Heap(j) | Sym::Ar(j, _)) = self.syms.get(name) {
                return a.sizes[*j].ok_or(Stop::Need(Need::Size(*j)));
            }
        }
        match t.op() {
            Some(Op::Heap(_, HeapOp::EmptyHeap)) => Ok(0),
            Some(Op::Heap(_, HeapOp::Write)) => self.size(&args[0], a),
            Some(Op::Heap(_, HeapOp::Allocate)) => Ok(self.size(&args[0], a)? + 1),
            Some(Op::Selector { field: 0, .. } | Op::Constructor(_)) if self.has_size(&args[0]) => {
                self.size(&args[0], a)
            }
            _ => match self.eval(t, a)? {
                LV::Heap(h) | LV::Ar(h, _) => Ok(h.size),
                _ => Err(unsupported(t, self.env)),
            },
        }
    }

    /// An object about to be stored; what it needs is deferred until it is compared.
    fn stored(&mut self, t: &Term, a: &Assignment) -> Result<LV, Stop> {
        match self.eval(t, a) {
            Err(Stop::Need(n)) => Ok(LV::Obj(ObjV::Blocked(n))),
            r => r,
        }
    }

    fn max_label(&self, a: &Assignment) -> Option<u32> {
        a.cells.values().chain(a.objs.iter().flatten()).copied().max()
    }

    fn labels(&self, a: &Assignment) -> Vec<u32> {
        let n = self.table.len() as u32;
        if self.symmetric {
            let top = self.max_label(a).map_or(0, |m| m + 1).min(n.saturating_sub(1));
            (0..=top).collect()
        } else {
            (0..n).collect()
        }
    }

    fn dfs(&mut self, a: &mut Assignment) -> Result<Option<Interpretation>, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::Refused {
                budget: self.budget,
                estimate: self.estimate(),
            });
        }
        // Unnamed positions are only known once every address and size is, so
        // with renamable objects those come before any heap cell.
        let mut fixed_points = false;
        if self.symmetric && a.named.is_none() {
            if let Some(unset) = self.numeric.iter().find(|n| !self.is_set(**n, a)).copied() {
                return self.expand(a, Some(unset));
            }
            if let Some(named) = self.named_points(a) {
                a.named = Some(Rc::new(named));
                fixed_points = true;
            }
        }
        let r = self.expand(a, None);
        if fixed_points {
            a.named = None;
        }
        r
    }

    fn is_set(&self, need: Need, a: &Assignment) -> bool {
        match need {
            Need::Addr(i) => a.addrs[i].is_some(),
            Need::Size(j) => a.sizes[j].is_some(),
            Need::Cell(j, p) => a.cells.contains_key(&(j, p)),
            Need::Obj(k) => a.objs[k].is_some(),
            Need::Class(m) => a.classes.contains_key(&m),
        }
    }

    /// Branches on a need of some undecided literal. With `numeric` given,
    /// heap cells are held back and `numeric` is the fallback.
    fn expand(&mut self, a: &mut Assignment, numeric: Option<Need>) -> Result<Option<Interpretation>, OracleError> {
        let mut needs = Vec::new();
        match self.check(a, Some(&mut needs))? {
            false => return Ok(None),
            true if needs.is_empty() => return self.finish(a).map(Some),
            true => {}
        }
        if let Some(fallback) = numeric {
            needs.retain(|n| !matches!(n, Need::Cell(..)));
            if needs.is_empty() {
                needs.push(fallback);
            }
        }
        // Forward checking: keep the values no literal refutes outright. Forced
        // needs go first, heap cells last, otherwise the fewest survivors.
        let key = |n: Need, v: &Vec<u64>| (v.len() > 1, matches!(n, Need::Cell(..) | Need::Class(_)), v.len());
        let mut best: Option<(Need, Vec<u64>)> = None;
        for need in needs {
            let mut survivors = Vec::new();
            for v in self.domain(need, a) {
                self.set(need, v, a);
                if self.check(a, None)? {
                    survivors.push(v);
                }
            }
            self.unset(need, a);
            if best.as_ref().is_none_or(|(n, b)| key(need, &survivors) < key(*n, b)) {
                let done = survivors.len() <= 1;
                best = Some((need, survivors));
                if done {
                    break;
                }
            }
        }
        let (need, values) = best.expect("at least one need");
        for v in values {
            self.set(need, v, a);
            if let Some(m) = self.dfs(a)? {
                return Ok(Some(m));
            }
        }
        self.unset(need, a);
        Ok(None)
    }

    /// False when some literal is already refuted. Collects the distinct
    /// first needs of undecided literals when asked.
    fn check(&mut self, a: &Assignment, mut needs: Option<&mut Vec<Need>>) -> Result<bool, OracleError> {
        let conj = self.conj;
        for lit in &conj.literals {
            match self.eval(&lit.atom, a) {
                Ok(LV::Bool(b)) if b == lit.positive => continue,
                Ok(LV::Bool(_)) => return Ok(false),
                Ok(_) => return Err(OracleError::Unsupported(lit.atom.to_sexpr(self.env).to_string())),
                Err(Stop::Fail(e)) => return Err(e),
                Err(Stop::Need(need)) => {
                    if let Some(n) = needs.as_deref_mut() {
                        if !n.contains(&need) {
                            n.push(need);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    fn domain(&mut self, need: Need, a: &Assignment) -> Vec<u64> {
        match need {
            Need::Addr(_) | Need::Size(_) => (0..=self.bound).collect(),
            Need::Cell(..) | Need::Obj(_) => self.labels(a).into_iter().map(u64::from).collect(),
            Need::Class(m) => (0..self.partitions_of(m).len() as u64).collect(),
        }
    }

    fn set(&self, need: Need, v: u64, a: &mut Assignment) {
        match need {
            Need::Addr(i) => a.addrs[i] = Some(v),
            Need::Size(j) => a.sizes[j] = Some(v),
            Need::Cell(j, p) => {
                a.cells.insert((j, p), v as u32);
            }
            Need::Obj(k) => a.objs[k] = Some(v as u32),
            Need::Class(m) => {
                a.classes.insert(m, v as u32);
            }
        }
    }

    fn unset(&self, need: Need, a: &mut Assignment) {
        match need {
            Need::Addr(i) => a.addrs[i] = None,
            Need::Size(j) => a.sizes[j] = None,
            Need::Cell(j, p) => {
                a.cells.remove(&(j, p));
            }
            Need::Obj(k) => a.objs[k] = None,
            Need::Class(m) => {
                a.classes.remove(&m);
            }
        }
    }

    /// Fills unassigned symbols with arbitrary values and confirms the model.
    fn finish(&mut self, a: &Assignment) -> Result<Interpretation, OracleError> {
        let fallback = self.table[0].clone();
        let mut interp = Interpretation::default();
        for (k, n) in self.obj_names.iter().enumerate() {
            let v = a.objs[k].map_or(fallback.clone(), |l| self.table[l as usize].clone());
            interp.consts.insert(n.clone(), v);
        }
        let def = eval(self.env, &self.env.heaps()[0].def_obj, &interp)?;
        let mut contents = vec![];
        for j in 0..self.heap_names.len() {
            let mut cells = vec![];
            for p in 1..=a.sizes[j].unwrap_or(0) {
                let unnamed = a.named.as_ref().is_some_and(|n| !n.contains(&p));
                let mask = Self::class_of(p, a);
                let v = match a.classes.get(&mask) {
                    Some(&pi) if unnamed => {
                        let at = (mask & ((1u64 << j) - 1)).count_ones() as usize + 1;
                        match self.partitions_of(mask)[pi as usize][at] {
                            0 => def.clone(),
                            b => self.fresh(b),
                        }
                    }
                    _ => a
                        .cells
                        .get(&(j, p))
                        .map_or(fallback.clone(), |&l| self.table[l as usize].clone()),
                };
                cells.push(v);
            }
            contents.push(cells);
        }
        let heap = |j: usize| HeapValue {
            contents: contents[j].clone(),
        };
        // Components of allocation-result constants are not symbols of their own.
        for (i, n) in self
            .addr_names
            .iter()
            .enumerate()
            .filter(|(_, n)| self.syms.contains_key(*n))
        {
            interp.consts.insert(n.clone(), Value::addr(a.addrs[i].unwrap_or(0)));
        }
        for (j, n) in self
            .heap_names
            .iter()
            .enumerate()
            .filter(|(_, n)| self.syms.contains_key(*n))
        {
            interp.consts.insert(n.clone(), Value::Heap(heap(j)));
        }
        for (n, j, i) in &self.ar_names {
            let ctor = self.env.heaps()[0].alloc_result_ctor.clone();
            let v = Value::ctor(ctor, vec![Value::Heap(heap(*j)), Value::addr(a.addrs[*i].unwrap_or(0))]);
            interp.consts.insert(n.clone(), v);
        }
        for lit in &self.conj.literals {
            if eval(self.env, &lit.term(), &interp)? != Value::Bool(true) {
                return Err(OracleError::Mismatch(lit.term().to_sexpr(self.env).to_string()));
            }
        }
        Ok(interp)
    }

    /// A value outside the label table, distinct per block.
    fn fresh(&self, block: u8) -> Value {
        match &self.table[0] {
            Value::Elem { sort, .. } => Value::Elem {
                sort: sort.clone(),
                index: self.table.len() as u32 + block as u32,
            },
            v => v.clone(),
        }
    }

    fn estimate(&self) -> f64 {
        let numeric = (self.addr_names.len() + self.heap_names.len()) as f64;
        let cells = self.heap_names.len() as f64 * self.bound as f64 + self.obj_names.len() as f64;
        (self.bound as f64 + 1.0).powf(numeric) * (self.table.len().max(1) as f64).powf(cells)
    }
}

fn finite_sort(env: &Env, sort: &Sort, seen: &mut BTreeSet<String>) -> bool {
    match sort {
        Sort::Bool => true,
        Sort::Named(n) => match env.datatype(n) {
            Some(dt) if seen.insert(n.clone()) => {
                let ok = dt
                    .constructors
                    .iter()
                    .all(|c| c.fields.iter().all(|f| finite_sort(env, &f.sort, seen)));
                seen.remove(n);
                ok
            }
            _ => false,
        },
        _ => false,
    }
}

struct Census {
    max_nth: u64,
    addr_consts: BTreeSet<String>,
    heap_consts: BTreeSet<String>,
    ar_consts: BTreeSet<String>,
    allocs: HashSet<Term>,
    objects: HashSet<Term>,
    heap_diseqs: usize,
}

fn census(conj: &Conjunction) -> Result<Census, OracleError> {
    let env = &conj.env;
    let sig = conj.heap().map_err(|e| OracleError::Unsupported(e.to_string()))?;
    let mut c = Census {
        max_nth: 0,
        addr_consts: BTreeSet::new(),
        heap_consts: BTreeSet::new(),
        ar_consts: BTreeSet::new(),
        allocs: HashSet::new(),
        objects: HashSet::new(),
        heap_diseqs: 0,
    };
    let mut visit = |t: &Term| {
        if let Some((_, op)) = t.heap_op() {
            match op {
                HeapOp::NthAddress(i) => c.max_nth = c.max_nth.max(i.to_u64().unwrap_or(u64::MAX)),
                HeapOp::Allocate => {
                    c.allocs.insert(t.clone());
                }
                _ => {}
            }
        }
        if t.sort == sig.object_sort {
            c.objects.insert(t.clone());
        }
        if let TermKind::Const(n) = &t.kind {
            match env.sort_kind(&t.sort) {
                Some(SortKind::Address(_)) => c.addr_consts.insert(n.clone()),
                Some(SortKind::Heap(_)) => c.heap_consts.insert(n.clone()),
                Some(SortKind::AllocResult(_)) => c.ar_consts.insert(n.clone()),
                _ => false,
            };
        }
    };
    sig.def_obj.visit(&mut visit);
    for lit in &conj.literals {
        lit.atom.visit(&mut visit);
        let heapish = |t: &Term| {
            matches!(
                env.sort_kind(&t.sort),
                Some(SortKind::Heap(_) | SortKind::AllocResult(_))
            )
        };
        let args = lit.atom.args();
        match (lit.atom.op(), lit.positive) {
            (Some(Op::Eq), false) if args.first().is_some_and(heapish) => c.heap_diseqs += args.len() - 1,
            (Some(Op::Distinct), true) if args.first().is_some_and(heapish) => {
                c.heap_diseqs += args.len() * (args.len() - 1) / 2
            }
            _ => {}
        }
    }
    Ok(c)
}

/// Bounds at which enumeration is complete for the conjunction; see the module docs.
pub fn model_bound(conj: &Conjunction) -> Result<OracleBounds, OracleError> {
    let c = census(conj)?;
    let points = c.addr_consts.len() + c.heap_consts.len() + 2 * c.ar_consts.len() + c.heap_diseqs + c.allocs.len();
    Ok(OracleBounds {
        max_value: c.max_nth + points as u64,
        objects: c.objects.len() + 1 + 2 * c.heap_diseqs,
    })
}

/// Searches all interpretations within `bounds`, visiting at most `budget` nodes.
pub fn enumerate_models(conj: &Conjunction, bounds: OracleBounds, budget: u64) -> Result<OracleVerdict, OracleError> {
    let env = &conj.env;
    let sig = conj.heap().map_err(|e| OracleError::Unsupported(e.to_string()))?;
    let census = census(conj)?;
    let mut e = Enumerator {
        env,
        conj,
        syms: HashMap::new(),
        heap_names: vec![],
        addr_names: vec![],
        ar_names: vec![],
        obj_names: vec![],
        table: vec![],
        symmetric: false,
        bound: bounds.max_value,
        budget,
        nodes: 0,
        numeric: vec![],
        addr_terms: vec![],
        alloc_heaps: vec![],
        partitions: HashMap::new(),
    };
    for (name, f) in env.functions() {
        if !f.args.is_empty() || f.body.is_some() {
            continue;
        }
        let sym = match env.sort_kind(&f.result) {
            Some(SortKind::Address(_)) => {
                e.addr_names.push(name.clone());
                Sym::Addr(e.addr_names.len() - 1)
            }
            Some(SortKind::Heap(_)) => {
                e.heap_names.push(name.clone());
                Sym::Heap(e.heap_names.len() - 1)
            }
            Some(SortKind::AllocResult(_)) => {
                e.heap_names.push(format!("{name}._1"));
                e.addr_names.push(format!("{name}._2"));
                let (j, i) = (e.heap_names.len() - 1, e.addr_names.len() - 1);
                e.ar_names.push((name.clone(), j, i));
                Sym::Ar(j, i)
            }
            _ if f.result == sig.object_sort => {
                e.obj_names.push(name.clone());
                Sym::Obj(e.obj_names.len() - 1)
            }
            _ => continue,
        };
        e.syms.insert(name.clone(), sym);
    }
    let mut addr_terms = HashSet::new();
    let mut alloc_heaps = HashSet::new();
    for lit in &conj.literals {
        lit.atom.visit(&mut |t: &Term| {
            if matches!(env.sort_kind(&t.sort), Some(SortKind::Address(_))) {
                addr_terms.insert(t.clone());
            }
            if let Some((_, HeapOp::Allocate)) = t.heap_op() {
                alloc_heaps.insert(t.args()[0].clone());
            }
        });
        for (name, _) in lit.atom.constants() {
            let needs = match e.syms.get(&name) {
                Some(Sym::Addr(i)) => vec![Need::Addr(*i)],
                Some(Sym::Heap(j)) => vec![Need::Size(*j)],
                Some(Sym::Ar(j, i)) => vec![Need::Size(*j), Need::Addr(*i)],
                _ => vec![],
            };
            for n in needs {
                if !e.numeric.contains(&n) {
                    e.numeric.push(n);
                }
            }
        }
    }
    e.addr_terms = addr_terms.into_iter().collect();
    e.alloc_heaps = alloc_heaps.into_iter().collect();

    let k = bounds.objects.max(1);
    match env.sort_kind(&sig.object_sort) {
        Some(SortKind::Uninterpreted) => {
            let name = sig.object_sort.name().unwrap_or_default().to_string();
            e.symmetric = true;
            e.table = (0..k as u32)
                .map(|index| Value::Elem {
                    sort: name.clone(),
                    index,
                })
                .collect();
        }
        Some(SortKind::Datatype) => {
            let mut grounds = BTreeSet::new();
            for t in &census.objects {
                if !t.has_heap_ops() && t.constants().is_empty() && !t.has_binders() {
                    grounds.insert(eval(env, t, &Interpretation::default())?);
                }
            }
            for v in grounds {
                e.label_of(v);
            }
            let grounds = e.table.len();
            let finite = finite_sort(env, &sig.object_sort, &mut BTreeSet::new());
            let mut ub = Bounds {
                adt_depth: if finite { env.datatypes().count() as u32 + 1 } else { 3 },
                ..Bounds::default()
            };
            if let Some(n) = sig.object_sort.name() {
                ub.sort_limits.insert(n.to_string(), grounds + k);
            }
            let universe = Universes::new(env, &ub).of(&sig.object_sort)?;
            for v in universe.iter() {
                if e.table.len() >= grounds + k {
                    break;
                }
                e.label_of(v.clone());
            }
        }
        _ => {
            return Err(OracleError::Unsupported(format!(
                "object sort {}",
                sig.object_sort.to_sexpr()
            )))
        }
    }

    let mut a = Assignment {
        addrs: vec![None; e.addr_names.len()],
        sizes: vec![None; e.heap_names.len()],
        cells: HashMap::new(),
        objs: vec![None; e.obj_names.len()],
        ..Assignment::default()
    };
    let found = e.dfs(&mut a)?;
    Ok(match found {
        Some(m) => OracleVerdict::Sat(m),
        None => OracleVerdict::UnsatWithinBounds,
    })
}
