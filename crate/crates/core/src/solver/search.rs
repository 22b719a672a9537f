//! Arrangement search. Addresses and heap sizes live in a difference-bound
//! matrix; a node fixes order and validity facts until every fact relevant
//! to the object constraints is entailed, then a model is read off the least
//! solution and checked by the evaluator.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use super::dbm::Dbm;
use super::purify::{purify, AddrNode, ConstNode, FlatConstraints, HeapNode, ObjKind, ObjNode};
use super::{Conjunction, FragmentError, SolveResult, SolveStats, Verdict};
use crate::elaborator::{Env, Sort, SortKind};
use crate::semantics::{eval, Bounds, HeapValue, Interpretation, Universes, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Search nodes before giving up with `unknown`.
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: 1_000_000 }
    }
}

/// `x_i - x_j <= c` over matrix indices.
type Con = (usize, usize, i64);

#[derive(Debug, Clone)]
struct Alt {
    cons: Vec<Con>,
    witness: Option<usize>,
}

impl Alt {
    fn plain(cons: Vec<Con>) -> Alt {
        Alt { cons, witness: None }
    }
}

#[derive(Debug, Clone, Copy)]
enum Fact {
    Choice(usize),
    /// Relative order of two addresses.
    Order(usize, usize),
    /// Position of an address relative to a heap class: zero, valid or above the size.
    Valid(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    Yes,
    No,
    Open,
}

struct Witness {
    var: usize,
    classes: (usize, usize),
}

struct Problem<'a> {
    conj: &'a Conjunction,
    flat: FlatConstraints,
    class_of: Vec<usize>,
    n_classes: usize,
    comp_of: Vec<usize>,
    n_addr_vars: usize,
    witnesses: Vec<Witness>,
    static_touch: Vec<BTreeSet<usize>>,
    choices: Vec<Vec<Alt>>,
    classes_in_comp: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct State {
    dbm: Dbm,
    chosen: Vec<Option<usize>>,
}

struct Ctx {
    nodes: u64,
    leaves: u64,
    budget: u64,
    exhausted: bool,
    /// A leaf was dropped because an object universe was truncated.
    incomplete: Option<String>,
    model_failure: Option<String>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Union-find over objects and heap cells, tracking ground values and disequalities.
struct Objects {
    parent: Vec<usize>,
    ground: Vec<Option<Value>>,
    cells: HashMap<(usize, usize), usize>,
    diseqs: Vec<(usize, usize)>,
}

impl Objects {
    fn new(kinds: &[ObjKind]) -> Objects {
        Objects {
            parent: (0..kinds.len()).collect(),
            ground: kinds
                .iter()
                .map(|k| match k {
                    ObjKind::Ground(v) => Some(v.clone()),
                    _ => None,
                })
                .collect(),
            cells: HashMap::new(),
            diseqs: Vec::new(),
        }
    }

    fn root(&mut self, x: usize) -> usize {
        find(&mut self.parent, x)
    }

    fn cell(&mut self, class: usize, addr: usize) -> usize {
        let next = self.parent.len();
        let id = *self.cells.entry((class, addr)).or_insert(next);
        if id == next {
            self.parent.push(id);
            self.ground.push(None);
        }
        id
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra == rb {
            return true;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        let merged = match (self.ground[lo].take(), self.ground[hi].take()) {
            (Some(x), Some(y)) if x != y => return false,
            (x, y) => x.or(y),
        };
        self.parent[hi] = lo;
        self.ground[lo] = merged;
        true
    }

    fn consistent(&mut self) -> bool {
        for i in 0..self.diseqs.len() {
            let (a, b) = self.diseqs[i];
            let (ra, rb) = (self.root(a), self.root(b));
            if ra == rb {
                return false;
            }
            if let (Some(x), Some(y)) = (&self.ground[ra], &self.ground[rb]) {
                if x == y {
                    return false;
                }
            }
        }
        true
    }
}

fn finite_sort(env: &Env, sort: &Sort, visiting: &mut Vec<String>) -> bool {
    match sort {
        Sort::Bool => true,
        Sort::Int | Sort::Array(..) => false,
        Sort::Named(n) => {
            let Some(dt) = env.datatype(n) else {
                return false;
            };
            if visiting.contains(n) {
                return false;
            }
            visiting.push(n.clone());
            let ok = dt
                .constructors
                .iter()
                .flat_map(|c| &c.fields)
                .all(|f| finite_sort(env, &f.sort, visiting));
            visiting.pop();
            ok
        }
    }
}

impl<'a> Problem<'a> {
    fn new(conj: &'a Conjunction, flat: FlatConstraints) -> Problem<'a> {
        let mut parent: Vec<usize> = (0..flat.heap_count).collect();
        for &(a, b) in &flat.heap_eq {
            let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let mut class_ids = HashMap::new();
        let class_of: Vec<usize> = (0..flat.heap_count)
            .map(|h| {
                let r = find(&mut parent, h);
                let next = class_ids.len();
                *class_ids.entry(r).or_insert(next)
            })
            .collect();
        let n_classes = class_ids.len();

        let mut cparent: Vec<usize> = (0..n_classes).collect();
        let defs = flat
            .writes
            .iter()
            .map(|w| (w.out, w.heap))
            .chain(flat.allocs.iter().map(|a| (a.out, a.heap)));
        for (x, y) in defs {
            let (rx, ry) = (find(&mut cparent, class_of[x.0]), find(&mut cparent, class_of[y.0]));
            cparent[rx.max(ry)] = rx.min(ry);
        }
        let mut comp_ids = HashMap::new();
        let comp_of: Vec<usize> = (0..n_classes)
            .map(|c| {
                let r = find(&mut cparent, c);
                let next = comp_ids.len();
                *comp_ids.entry(r).or_insert(next)
            })
            .collect();
        let n_comps = comp_ids.len();
        let mut classes_in_comp = vec![vec![]; n_comps];
        for (c, &k) in comp_of.iter().enumerate() {
            classes_in_comp[k].push(c);
        }

        let mut static_touch = vec![BTreeSet::new(); n_comps];
        for r in &flat.reads {
            static_touch[comp_of[class_of[r.heap.0]]].insert(r.addr.0);
        }
        for w in &flat.writes {
            static_touch[comp_of[class_of[w.out.0]]].insert(w.addr.0);
        }
        for a in &flat.allocs {
            static_touch[comp_of[class_of[a.out.0]]].insert(a.addr.0);
        }

        let n_witness = flat.heap_neq.len() + flat.ar_neq.len();
        let n_addr_vars = flat.addr_count() + n_witness;
        let mut p = Problem {
            conj,
            class_of,
            n_classes,
            comp_of,
            n_addr_vars,
            witnesses: vec![],
            static_touch,
            choices: vec![],
            classes_in_comp,
            flat,
        };
        p.build_choices();
        p
    }

    fn size(&self, class: usize) -> usize {
        self.n_addr_vars + class
    }

    fn size_of(&self, h: HeapNode) -> usize {
        self.size(self.class_of[h.0])
    }

    fn heap_neq_alts(&mut self, h1: HeapNode, h2: HeapNode) -> Vec<Alt> {
        let (c1, c2) = (self.class_of[h1.0], self.class_of[h2.0]);
        if c1 == c2 {
            return vec![];
        }
        let (s1, s2) = (self.size(c1), self.size(c2));
        let w = self.flat.addr_count() + self.witnesses.len();
        self.witnesses.push(Witness {
            var: w,
            classes: (c1, c2),
        });
        vec![
            Alt::plain(vec![(s1, s2, -1)]),
            Alt::plain(vec![(s2, s1, -1)]),
            Alt {
                cons: vec![(s1, s2, 0), (s2, s1, 0), (0, w, -1), (w, s1, 0)],
                witness: Some(self.witnesses.len() - 1),
            },
        ]
    }

    fn build_choices(&mut self) {
        let mut choices = vec![];
        for &(h, a, positive) in &self.flat.valid.clone() {
            if !positive {
                let s = self.size_of(h);
                choices.push(vec![Alt::plain(vec![(s, a.0, -1)]), Alt::plain(vec![(a.0, 0, 0)])]);
            }
        }
        for &(a, b) in &self.flat.addr_neq.clone() {
            choices.push(vec![Alt::plain(vec![(a.0, b.0, -1)]), Alt::plain(vec![(b.0, a.0, -1)])]);
        }
        for &(h1, h2) in &self.flat.heap_neq.clone() {
            choices.push(self.heap_neq_alts(h1, h2));
        }
        for &((h1, a1), (h2, a2)) in &self.flat.ar_neq.clone() {
            let mut alts = self.heap_neq_alts(h1, h2);
            alts.push(Alt::plain(vec![(a1.0, a2.0, -1)]));
            alts.push(Alt::plain(vec![(a2.0, a1.0, -1)]));
            choices.push(alts);
        }
        self.choices = choices;
    }

    /// Root constraints; `None` if already inconsistent.
    fn initial(&self) -> Option<State> {
        let f = &self.flat;
        let n = self.n_addr_vars + self.n_classes;
        let mut d = Dbm::new(n);
        let mut ok = (1..n).all(|x| d.add(0, x, 0));
        for (x, v) in f.addr_fixed.iter().enumerate() {
            if let Some(v) = v {
                ok &= d.add_eq(x, 0, *v as i64);
            }
        }
        for &h in &f.empties {
            ok &= d.add_eq(self.size_of(h), 0, 0);
        }
        for w in &f.writes {
            ok &= d.add_eq(self.size_of(w.out), self.size_of(w.heap), 0);
        }
        for a in &f.allocs {
            let s = self.size_of(a.heap);
            ok &= d.add_eq(self.size_of(a.out), s, 1) && d.add_eq(a.addr.0, s, 1);
        }
        for &(h, a, positive) in &f.valid {
            if positive {
                ok &= d.add(0, a.0, -1) && d.add(a.0, self.size_of(h), 0);
            }
        }
        for &(a, b) in &f.addr_eq {
            ok &= d.add_eq(a.0, b.0, 0);
        }
        ok &= f.heap_neq.iter().all(|(a, b)| self.class_of[a.0] != self.class_of[b.0]);
        ok &= !f.trivially_false;
        ok.then(|| State {
            dbm: d,
            chosen: vec![None; self.choices.len()],
        })
    }

    fn active_witnesses(&self, st: &State) -> Vec<usize> {
        st.chosen
            .iter()
            .enumerate()
            .filter_map(|(k, c)| c.and_then(|i| self.choices[k][i].witness))
            .collect()
    }

    fn touching(&self, st: &State) -> Vec<Vec<usize>> {
        let mut t = self.static_touch.clone();
        for w in self.active_witnesses(st) {
            let w = &self.witnesses[w];
            t[self.comp_of[w.classes.0]].insert(w.var);
            t[self.comp_of[w.classes.1]].insert(w.var);
        }
        t.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    fn alts(&self, fact: Fact) -> Vec<Alt> {
        match fact {
            Fact::Choice(k) => self.choices[k].clone(),
            Fact::Order(p, q) => vec![
                Alt::plain(vec![(p, q, -1)]),
                Alt::plain(vec![(q, p, -1)]),
                Alt::plain(vec![(p, q, 0), (q, p, 0)]),
            ],
            Fact::Valid(q, c) => {
                let s = self.size(c);
                vec![
                    Alt::plain(vec![(0, q, -1), (q, s, 0)]),
                    Alt::plain(vec![(s, q, -1)]),
                    Alt::plain(vec![(q, 0, 0)]),
                ]
            }
        }
    }

    fn eq_status(d: &Dbm, p: usize, q: usize) -> Tri {
        if d.entails(p, q, 0) && d.entails(q, p, 0) {
            Tri::Yes
        } else if d.entails(p, q, -1) || d.entails(q, p, -1) {
            Tri::No
        } else {
            Tri::Open
        }
    }

    fn valid_status(&self, d: &Dbm, q: usize, class: usize) -> Tri {
        let s = self.size(class);
        if d.entails(0, q, -1) && d.entails(q, s, 0) {
            Tri::Yes
        } else if d.entails(q, 0, 0) || d.entails(s, q, -1) {
            Tri::No
        } else {
            Tri::Open
        }
    }

    /// Smallest address of `touch` equal to `q`, or `q` itself.
    fn rep(d: &Dbm, touch: &[usize], q: usize) -> usize {
        touch
            .iter()
            .copied()
            .find(|&p| p < q && Self::eq_status(d, p, q) == Tri::Yes)
            .unwrap_or(q)
    }

    /// Object constraints implied by the entailed part of the arrangement.
    fn objects(&self, st: &State, touch: &[Vec<usize>]) -> Option<Objects> {
        let f = &self.flat;
        let d = &st.dbm;
        let mut os = Objects::new(&f.objs);
        let def = f.def_obj.0;
        let mut ok = true;
        for r in &f.reads {
            let c = self.class_of[r.heap.0];
            match self.valid_status(d, r.addr.0, c) {
                Tri::Yes => {
                    let cell = os.cell(c, Self::rep(d, &touch[self.comp_of[c]], r.addr.0));
                    ok &= os.union(r.obj.0, cell);
                }
                Tri::No => ok &= os.union(r.obj.0, def),
                Tri::Open => {}
            }
        }
        for w in &f.writes {
            let (co, ci) = (self.class_of[w.out.0], self.class_of[w.heap.0]);
            let t = &touch[self.comp_of[co]];
            let p_valid = self.valid_status(d, w.addr.0, ci);
            for &q in t {
                if p_valid == Tri::Open || self.valid_status(d, q, co) != Tri::Yes {
                    continue;
                }
                let rq = Self::rep(d, t, q);
                let here = os.cell(co, rq);
                let hit = if p_valid == Tri::No {
                    Tri::No
                } else {
                    Self::eq_status(d, q, w.addr.0)
                };
                ok &= match hit {
                    Tri::Yes => os.union(here, w.obj.0),
                    Tri::No => {
                        let below = os.cell(ci, rq);
                        os.union(here, below)
                    }
                    Tri::Open => true,
                };
            }
        }
        for a in &f.allocs {
            let (co, ci) = (self.class_of[a.out.0], self.class_of[a.heap.0]);
            let t = &touch[self.comp_of[co]];
            for &q in t {
                if self.valid_status(d, q, co) != Tri::Yes {
                    continue;
                }
                let rq = Self::rep(d, t, q);
                let here = os.cell(co, rq);
                ok &= match Self::eq_status(d, q, a.addr.0) {
                    Tri::Yes => os.union(here, a.obj.0),
                    Tri::No => {
                        let below = os.cell(ci, rq);
                        os.union(here, below)
                    }
                    Tri::Open => true,
                };
            }
        }
        for &(x, y) in &f.obj_eq {
            ok &= os.union(x.0, y.0);
        }
        if !ok {
            return None;
        }
        os.diseqs.extend(f.obj_neq.iter().map(|(x, y)| (x.0, y.0)));
        for wi in self.active_witnesses(st) {
            let w = &self.witnesses[wi];
            let (c1, c2) = w.classes;
            if self.valid_status(d, w.var, c1) == Tri::Yes {
                let r1 = Self::rep(d, &touch[self.comp_of[c1]], w.var);
                let r2 = Self::rep(d, &touch[self.comp_of[c2]], w.var);
                let (x, y) = (os.cell(c1, r1), os.cell(c2, r2));
                os.diseqs.push((x, y));
            }
        }
        os.consistent().then_some(os)
    }

    fn undecided_facts(&self, st: &State, touch: &[Vec<usize>]) -> Vec<Fact> {
        let open: Vec<Fact> = (0..self.choices.len())
            .filter(|&k| st.chosen[k].is_none())
            .map(Fact::Choice)
            .collect();
        if !open.is_empty() {
            return open;
        }
        let mut facts = vec![];
        let mut seen = BTreeSet::new();
        for (k, t) in touch.iter().enumerate() {
            for (i, &p) in t.iter().enumerate() {
                for &q in &t[i + 1..] {
                    if seen.insert((p, q)) && !self.decided(&st.dbm, Fact::Order(p, q)) {
                        facts.push(Fact::Order(p, q));
                    }
                }
                for &c in &self.classes_in_comp[k] {
                    if !self.decided(&st.dbm, Fact::Valid(p, c)) {
                        facts.push(Fact::Valid(p, c));
                    }
                }
            }
        }
        facts
    }

    fn decided(&self, d: &Dbm, fact: Fact) -> bool {
        self.alts(fact)
            .iter()
            .any(|a| a.cons.iter().all(|&(i, j, c)| d.entails(i, j, c)))
    }

    fn dfs(&self, st: State, ctx: &mut Ctx) -> Option<Interpretation> {
        ctx.nodes += 1;
        if ctx.nodes > ctx.budget {
            ctx.exhausted = true;
            return None;
        }
        let touch = self.touching(&st);
        let os = self.objects(&st, &touch)?;

        let mut best: Option<(Fact, Vec<Alt>)> = None;
        for fact in self.undecided_facts(&st, &touch) {
            let allowed: Vec<Alt> = self
                .alts(fact)
                .into_iter()
                .filter(|a| a.cons.iter().all(|&(i, j, c)| st.dbm.allows(i, j, c)))
                .collect();
            if allowed.is_empty() {
                return None;
            }
            if best.as_ref().is_none_or(|(_, b)| allowed.len() < b.len()) {
                let forced = allowed.len() == 1;
                best = Some((fact, allowed));
                if forced {
                    break;
                }
            }
        }
        let Some((fact, alts)) = best else {
            ctx.leaves += 1;
            return self.leaf(&st, &touch, os, ctx);
        };
        for alt in alts {
            let mut next = st.clone();
            if !alt.cons.iter().all(|&(i, j, c)| next.dbm.add(i, j, c)) {
                continue;
            }
            if let Fact::Choice(k) = fact {
                next.chosen[k] = self.choices[k]
                    .iter()
                    .position(|a| a.cons == alt.cons && a.witness == alt.witness);
            }
            if let Some(m) = self.dfs(next, ctx) {
                return Some(m);
            }
            if ctx.exhausted {
                return None;
            }
        }
        None
    }

    /// Values for the object classes; `None` if a finite sort runs out of values.
    fn color(&self, os: &mut Objects, ctx: &mut Ctx) -> Option<HashMap<usize, Value>> {
        let env = &self.conj.env;
        let sort = &self.flat.object_sort;
        let n = os.parent.len();
        let roots: Vec<usize> = (0..n).filter(|&x| os.root(x) == x).collect();
        if let Some(SortKind::Uninterpreted) = env.sort_kind(sort) {
            let name = sort.name().unwrap_or_default().to_string();
            return Some(
                roots
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| {
                        (
                            r,
                            Value::Elem {
                                sort: name.clone(),
                                index: i as u32,
                            },
                        )
                    })
                    .collect(),
            );
        }
        let finite = finite_sort(env, sort, &mut vec![]);
        let mut bounds = Bounds {
            adt_depth: env.datatypes().count() as u32 + 1,
            ..Bounds::default()
        };
        if !finite {
            bounds.adt_depth = 3;
            if let Some(name) = sort.name() {
                bounds.sort_limits.insert(name.to_string(), 2 * n + 2);
            }
        }
        let candidates = match Universes::new(env, &bounds).of(sort) {
            Ok(u) => u,
            Err(e) => {
                ctx.incomplete = Some(format!("object universe: {e}"));
                return None;
            }
        };
        let mut values: HashMap<usize, Value> = HashMap::new();
        let mut free = vec![];
        for &r in &roots {
            match &os.ground[r] {
                Some(v) => {
                    values.insert(r, v.clone());
                }
                None => free.push(r),
            }
        }
        let diseqs: Vec<(usize, usize)> = os
            .diseqs
            .clone()
            .into_iter()
            .map(|(a, b)| (os.root(a), os.root(b)))
            .collect();
        fn go(
            i: usize,
            free: &[usize],
            candidates: &[Value],
            diseqs: &[(usize, usize)],
            values: &mut HashMap<usize, Value>,
        ) -> bool {
            let Some(&r) = free.get(i) else {
                return true;
            };
            for v in candidates {
                let clash = diseqs
                    .iter()
                    .any(|&(a, b)| (a == r && values.get(&b) == Some(v)) || (b == r && values.get(&a) == Some(v)));
                if clash {
                    continue;
                }
                values.insert(r, v.clone());
                if go(i + 1, free, candidates, diseqs, values) {
                    return true;
                }
                values.remove(&r);
            }
            false
        }
        if go(0, &free, &candidates, &diseqs, &mut values) {
            Some(values)
        } else {
            if !finite {
                ctx.incomplete = Some("object universe truncated".into());
            }
            None
        }
    }

    fn leaf(&self, st: &State, touch: &[Vec<usize>], mut os: Objects, ctx: &mut Ctx) -> Option<Interpretation> {
        let f = &self.flat;
        let d = &st.dbm;
        let colors = self.color(&mut os, ctx)?;
        let val = d.least_solution(0);
        let obj_value = |os: &mut Objects, x: usize| colors[&os.root(x)].clone();
        let def_value = obj_value(&mut os, f.def_obj.0);
        let mut contents: HashMap<usize, HeapValue> = HashMap::new();
        let mut heap_value = |os: &mut Objects, class: usize| -> HeapValue {
            if let Some(h) = contents.get(&class) {
                return h.clone();
            }
            let size = val[self.size(class)] as usize;
            let mut objs = vec![def_value.clone(); size];
            let t = &touch[self.comp_of[class]];
            for &q in t {
                let v = val[q] as usize;
                if (1..=size).contains(&v) {
                    if let Some(&cell) = os.cells.get(&(class, Self::rep(d, t, q))) {
                        objs[v - 1] = obj_value(os, cell);
                    }
                }
            }
            let h = HeapValue { contents: objs };
            contents.insert(class, h.clone());
            h
        };
        let sig = self.conj.heap().expect("checked by purify");
        let mut interp = Interpretation::default();
        for (name, node) in &f.consts {
            let v = match *node {
                ConstNode::Addr(AddrNode(a)) => Value::addr(val[a] as u64),
                ConstNode::Heap(HeapNode(h)) => Value::Heap(heap_value(&mut os, self.class_of[h])),
                ConstNode::Obj(ObjNode(o)) => obj_value(&mut os, o),
                ConstNode::AllocResult(HeapNode(h), AddrNode(a)) => Value::ctor(
                    sig.alloc_result_ctor.clone(),
                    vec![
                        Value::Heap(heap_value(&mut os, self.class_of[h])),
                        Value::addr(val[a] as u64),
                    ],
                ),
            };
            interp.consts.insert(name.clone(), v);
        }
        for lit in &self.conj.literals {
            match eval(&self.conj.env, &lit.term(), &interp) {
                Ok(Value::Bool(true)) => {}
                other => {
                    ctx.model_failure = Some(format!(
                        "model check failed on {}: {other:?}",
                        lit.term().to_sexpr(&self.conj.env)
                    ));
                    return None;
                }
            }
        }
        Some(interp)
    }
}

pub fn solve(conj: &Conjunction) -> Result<SolveResult, FragmentError> {
    solve_with(conj, &SolveOptions::default())
}

pub fn solve_with(conj: &Conjunction, opts: &SolveOptions) -> Result<SolveResult, FragmentError> {
    let start = Instant::now();
    let flat = purify(conj)?;
    let problem = Problem::new(conj, flat);
    let mut ctx = Ctx {
        nodes: 0,
        leaves: 0,
        budget: opts.budget.max(1),
        exhausted: false,
        incomplete: None,
        model_failure: None,
    };
    let model = problem.initial().and_then(|st| problem.dfs(st, &mut ctx));
    let verdict = match model {
        Some(m) => Verdict::Sat(m),
        None if ctx.exhausted => Verdict::Unknown(format!("search budget of {} nodes exhausted", opts.budget)),
        None => match ctx.model_failure.or(ctx.incomplete) {
            Some(why) => Verdict::Unknown(why),
            None => Verdict::Unsat,
        },
    };
    Ok(SolveResult {
        verdict,
        stats: SolveStats {
            nodes: ctx.nodes,
            leaves: ctx.leaves,
            time: start.elapsed(),
        },
    })
}
