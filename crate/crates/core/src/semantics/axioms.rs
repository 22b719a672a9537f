//! The twelve heap axioms, checked exhaustively over finite universes.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::ops::{sem_allocate, sem_read, sem_valid, sem_write};
use super::universe::{Bounds, Universes};
use super::value::{AddressValue, HeapValue, Value};
use super::EvalError;
use crate::elaborator::{Env, HeapId, HeapSignature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomId {
    Row1,
    Row2,
    Ext,
    Roa1,
    Roa2,
    Alloc1,
    Alloc2,
    Ivwt,
    Ivrd,
    Vld1,
    Vld2,
    Cons,
}

impl AxiomId {
    pub const ALL: [AxiomId; 12] = [
        AxiomId::Row1,
        AxiomId::Row2,
        AxiomId::Ext,
        AxiomId::Roa1,
        AxiomId::Roa2,
        AxiomId::Alloc1,
        AxiomId::Alloc2,
        AxiomId::Ivwt,
        AxiomId::Ivrd,
        AxiomId::Vld1,
        AxiomId::Vld2,
        AxiomId::Cons,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Row1 => "row1",
            AxiomId::Row2 => "row2",
            AxiomId::Ext => "ext",
            AxiomId::Roa1 => "roa1",
            AxiomId::Roa2 => "roa2",
            AxiomId::Alloc1 => "alloc1",
            AxiomId::Alloc2 => "alloc2",
            AxiomId::Ivwt => "ivwt",
            AxiomId::Ivrd => "ivrd",
            AxiomId::Vld1 => "vld1",
            AxiomId::Vld2 => "vld2",
            AxiomId::Cons => "cons",
        }
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown axiom `{s}`"))
    }
}

/// Variable assignment violating an axiom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub bindings: Vec<(String, String)>,
}

impl Counterexample {
    fn new(bindings: &[(&str, &dyn fmt::Debug)]) -> Self {
        Counterexample {
            bindings: bindings
                .iter()
                .map(|(n, v)| (n.to_string(), format!("{v:?}")))
                .collect(),
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bindings.iter().map(|(n, v)| format!("{n}={v}")).collect();
        f.write_str(&parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    /// Number of instances evaluated.
    pub instances: u64,
    pub counterexample: Option<Counterexample>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// A candidate model of the heap axioms over finite universes.
pub trait HeapModel {
    type Heap: Clone + PartialEq + fmt::Debug;
    type Addr: Clone + PartialEq + fmt::Debug;
    type Obj: Clone + PartialEq + fmt::Debug;

    fn empty(&self) -> Self::Heap;
    fn null(&self) -> Self::Addr;
    fn def_obj(&self) -> Self::Obj;
    fn valid(&self, h: &Self::Heap, p: &Self::Addr) -> bool;
    fn read(&self, h: &Self::Heap, p: &Self::Addr) -> Self::Obj;
    fn write(&self, h: &Self::Heap, p: &Self::Addr, o: &Self::Obj) -> Self::Heap;
    fn allocate(&self, h: &Self::Heap, o: &Self::Obj) -> (Self::Heap, Self::Addr);

    fn heaps(&self) -> Vec<Self::Heap>;
    fn addrs(&self) -> Vec<Self::Addr>;
    fn objects(&self) -> Vec<Self::Obj>;
}

/// Canonical heaps with addresses numbered by allocation order.
#[derive(Debug, Clone)]
pub struct ConcreteModel {
    pub heaps: Vec<HeapValue>,
    pub addrs: Vec<AddressValue>,
    pub objects: Vec<Value>,
    pub def_obj: Value,
}

/// Universe sizes of the axiom battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatteryBounds {
    pub heap_size: u64,
    pub objects: usize,
    pub addr_max: u64,
}

impl Default for BatteryBounds {
    fn default() -> Self {
        BatteryBounds {
            heap_size: 3,
            objects: 3,
            addr_max: 5,
        }
    }
}

impl FromStr for BatteryBounds {
    type Err = String;

    /// Parses `h:o:a`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [h, o, a] = parts.as_slice() else {
            return Err(format!("bounds must be `heap:objects:addresses`, got `{s}`"));
        };
        let num = |x: &str| {
            x.parse::<u64>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| format!("bound `{x}` is not a positive integer"))
        };
        Ok(BatteryBounds {
            heap_size: num(h)?,
            objects: num(o)? as usize,
            addr_max: num(a)?,
        })
    }
}

impl ConcreteModel {
    /// Objects are the first `bounds.objects` values of the object sort's enumeration.
    pub fn from_env(env: &Env, heap: HeapId, bounds: BatteryBounds) -> Result<Self, EvalError> {
        let sig = env.heap(heap);
        let mut b = Bounds {
            heap_size: bounds.heap_size,
            addr_max: bounds.addr_max,
            uninterpreted: bounds.objects as u32,
            ..Bounds::default()
        };
        if let Some(n) = sig.object_sort.name() {
            b.sort_limits.insert(n.to_string(), bounds.objects);
        }
        let u = Universes::new(env, &b);
        let mut objects = u.of(&sig.object_sort)?.as_ref().clone();
        objects.truncate(bounds.objects);
        let interp = super::Interpretation::new(b.clone());
        let def_obj = super::eval(env, &sig.def_obj, &interp)?;
        Ok(ConcreteModel::new(objects, def_obj, bounds.heap_size, bounds.addr_max))
    }

    pub fn new(objects: Vec<Value>, def_obj: Value, heap_size: u64, addr_max: u64) -> Self {
        let mut heaps = vec![HeapValue::default()];
        let mut frontier = heaps.clone();
        for _ in 0..heap_size {
            frontier = frontier
                .iter()
                .flat_map(|h| {
                    objects.iter().map(move |o| {
                        let mut h2 = h.clone();
                        h2.contents.push(o.clone());
                        h2
                    })
                })
                .collect();
            heaps.extend(frontier.iter().cloned());
        }
        ConcreteModel {
            heaps,
            addrs: (0..=addr_max).map(AddressValue).collect(),
            objects,
            def_obj,
        }
    }
}

impl HeapModel for ConcreteModel {
    type Heap = HeapValue;
    type Addr = AddressValue;
    type Obj = Value;

    fn empty(&self) -> HeapValue {
        HeapValue::default()
    }
    fn null(&self) -> AddressValue {
        AddressValue::NULL
    }
    fn def_obj(&self) -> Value {
        self.def_obj.clone()
    }
    fn valid(&self, h: &HeapValue, p: &AddressValue) -> bool {
        sem_valid(h, *p)
    }
    fn read(&self, h: &HeapValue, p: &AddressValue) -> Value {
        sem_read(h, *p, &self.def_obj)
    }
    fn write(&self, h: &HeapValue, p: &AddressValue, o: &Value) -> HeapValue {
        sem_write(h, *p, o.clone())
    }
    fn allocate(&self, h: &HeapValue, o: &Value) -> (HeapValue, AddressValue) {
        sem_allocate(h, o.clone())
    }
    fn heaps(&self) -> Vec<HeapValue> {
        self.heaps.clone()
    }
    fn addrs(&self) -> Vec<AddressValue> {
        self.addrs.clone()
    }
    fn objects(&self) -> Vec<Value> {
        self.objects.clone()
    }
}

/// Checks one axiom over every instantiation from the model's universes.
/// [cons] is checked with the canonical witness f(i) = i allocations of
/// defObj, g(i) = the address returned by the i-th of them.
pub fn check_axiom<M: HeapModel>(m: &M, axiom: AxiomId) -> AxiomReport {
    let (hs, ps, os) = (m.heaps(), m.addrs(), m.objects());
    let mut instances = 0u64;
    macro_rules! fail {
        ($($n:literal = $v:expr),*) => {
            return Some(Counterexample::new(&[$(($n, &$v as &dyn fmt::Debug)),*]))
        };
    }
    let same_validity = |h1: &M::Heap, h2: &M::Heap| ps.iter().all(|p| m.valid(h1, p) == m.valid(h2, p));
    let mut search = || -> Option<Counterexample> {
        match axiom {
            AxiomId::Row1 => {
                for h in &hs {
                    for p in &ps {
                        for o in &os {
                            instances += 1;
                            if m.valid(h, p) && m.read(&m.write(h, p, o), p) != *o {
                                fail!("h" = h, "p" = p, "o" = o);
                            }
                        }
                    }
                }
            }
            AxiomId::Row2 => {
                for h in &hs {
                    for p1 in &ps {
                        for p2 in &ps {
                            for o in &os {
                                instances += 1;
                                if p1 != p2 && m.read(&m.write(h, p1, o), p2) != m.read(h, p2) {
                                    fail!("h" = h, "p1" = p1, "p2" = p2, "o" = o);
                                }
                            }
                        }
                    }
                }
            }
            AxiomId::Ext => {
                for h1 in &hs {
                    for h2 in &hs {
                        instances += 1;
                        let premise = ps
                            .iter()
                            .all(|p| m.valid(h1, p) == m.valid(h2, p) && m.read(h1, p) == m.read(h2, p));
                        if premise && h1 != h2 {
                            fail!("h1" = h1, "h2" = h2);
                        }
                    }
                }
            }
            AxiomId::Roa1 | AxiomId::Roa2 | AxiomId::Alloc1 => {
                for h in &hs {
                    for o in &os {
                        let (h2, a) = m.allocate(h, o);
                        match axiom {
                            AxiomId::Roa1 => {
                                instances += 1;
                                if m.read(&h2, &a) != *o {
                                    fail!("h" = h, "o" = o);
                                }
                            }
                            AxiomId::Roa2 => {
                                for p in &ps {
                                    instances += 1;
                                    if *p != a && m.read(&h2, p) != m.read(h, p) {
                                        fail!("h" = h, "o" = o, "p" = p);
                                    }
                                }
                            }
                            _ => {
                                instances += 1;
                                if m.valid(h, &a) || !m.valid(&h2, &a) {
                                    fail!("h" = h, "o" = o);
                                }
                                for p in &ps {
                                    instances += 1;
                                    if *p != a && m.valid(h, p) != m.valid(&h2, p) {
                                        fail!("h" = h, "o" = o, "p" = p);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            AxiomId::Alloc2 => {
                for h1 in &hs {
                    for h2 in &hs {
                        if !same_validity(h1, h2) {
                            instances += (os.len() * os.len()) as u64;
                            continue;
                        }
                        for o1 in &os {
                            for o2 in &os {
                                instances += 1;
                                if m.allocate(h1, o1).1 != m.allocate(h2, o2).1 {
                                    fail!("h1" = h1, "h2" = h2, "o1" = o1, "o2" = o2);
                                }
                            }
                        }
                    }
                }
            }
            AxiomId::Ivwt => {
                for h in &hs {
                    for p in &ps {
                        for o in &os {
                            instances += 1;
                            if !m.valid(h, p) && m.write(h, p, o) != *h {
                                fail!("h" = h, "p" = p, "o" = o);
                            }
                        }
                    }
                }
            }
            AxiomId::Ivrd => {
                for h in &hs {
                    for p in &ps {
                        instances += 1;
                        if !m.valid(h, p) && m.read(h, p) != m.def_obj() {
                            fail!("h" = h, "p" = p);
                        }
                    }
                }
            }
            AxiomId::Vld1 => {
                let e = m.empty();
                for p in &ps {
                    instances += 1;
                    if m.valid(&e, p) {
                        fail!("p" = p);
                    }
                }
            }
            AxiomId::Vld2 => {
                let n = m.null();
                for h in &hs {
                    instances += 1;
                    if m.valid(h, &n) {
                        fail!("h" = h);
                    }
                }
            }
            AxiomId::Cons => {
                let mut f = vec![m.empty()];
                let mut g = vec![m.null()];
                for i in 0..ps.len() {
                    let (h, a) = m.allocate(&f[i], &m.def_obj());
                    f.push(h);
                    g.push(a);
                }
                for p in &ps {
                    instances += 1;
                    if !g.contains(p) {
                        fail!("p" = p, "g" = g);
                    }
                }
            }
        }
        None
    };
    let counterexample = search();
    AxiomReport {
        axiom,
        instances,
        counterexample,
    }
}

pub fn check_all<M: HeapModel>(m: &M) -> Vec<AxiomReport> {
    AxiomId::ALL.iter().map(|&a| check_axiom(m, a)).collect()
}

/// Declaration used by the axiom battery when no script is given.
pub const BATTERY_DECLARATION: &str = "(declare-heap Heap Addr Object O_Empty ((Object 0))
  (((O_Empty) (O_Int (val Int)) (O_Ptr (ptr Addr)))))";

/// The axiom as a closed heap-language formula over `sig`. [cons] is
/// instantiated with its canonical witness up to `cons_depth` allocations.
pub fn axiom_formula(env: &Env, sig: &HeapSignature, axiom: AxiomId, cons_depth: u64) -> String {
    let (h, a, o, ar) = (
        &sig.heap_sort,
        &sig.addr_sort,
        sig.object_sort.to_string(),
        &sig.alloc_result_sort,
    );
    let def = sig.def_obj.to_sexpr(env).to_string();
    let (empty, null) = (&sig.empty_heap, &sig.null_address);
    match axiom {
        AxiomId::Row1 => format!(
            "(forall ((h {h}) (p {a}) (o {o})) (=> (valid h p) (= (read (write h p o) p) o)))"
        ),
        AxiomId::Row2 => format!(
            "(forall ((h {h}) (p1 {a}) (p2 {a}) (o {o})) (=> (not (= p1 p2)) (= (read (write h p1 o) p2) (read h p2))))"
        ),
        AxiomId::Ext => format!(
            "(forall ((h1 {h}) (h2 {h})) (=> (forall ((p {a})) (and (= (valid h1 p) (valid h2 p)) (= (read h1 p) (read h2 p)))) (= h1 h2)))"
        ),
        AxiomId::Roa1 => format!(
            "(forall ((h {h}) (o {o}) (ar {ar})) (=> (= (allocate h o) ar) (= (read (_1 ar) (_2 ar)) o)))"
        ),
        AxiomId::Roa2 => format!(
            "(forall ((h {h}) (o {o}) (ar {ar}) (p {a})) (=> (and (= (allocate h o) ar) (not (= p (_2 ar)))) (= (read (_1 ar) p) (read h p))))"
        ),
        AxiomId::Alloc1 => format!(
            "(forall ((h {h}) (o {o}) (ar {ar})) (=> (= (allocate h o) ar) (and (not (valid h (_2 ar))) (valid (_1 ar) (_2 ar)) (forall ((p {a})) (=> (not (= (_2 ar) p)) (= (valid h p) (valid (_1 ar) p)))))))"
        ),
        AxiomId::Alloc2 => format!(
            "(forall ((h1 {h}) (h2 {h}) (o1 {o}) (o2 {o})) (=> (forall ((p {a})) (= (valid h1 p) (valid h2 p))) (= (_2 (allocate h1 o1)) (_2 (allocate h2 o2)))))"
        ),
        AxiomId::Ivwt => format!(
            "(forall ((h {h}) (p {a}) (o {o})) (=> (not (valid h p)) (= (write h p o) h)))"
        ),
        AxiomId::Ivrd => format!("(forall ((h {h}) (p {a})) (=> (not (valid h p)) (= (read h p) {def})))"),
        AxiomId::Vld1 => format!("(forall ((p {a})) (not (valid {empty} p)))"),
        AxiomId::Vld2 => format!("(forall ((h {h})) (not (valid h {null})))"),
        AxiomId::Cons => {
            let mut f = empty.to_string();
            let mut cases = vec![format!("(= p {null})")];
            for _ in 0..cons_depth {
                let alloc = format!("(allocate {f} {def})");
                cases.push(format!("(= p (_2 {alloc}))"));
                f = format!("(_1 {alloc})");
            }
            format!("(forall ((p {a})) (or {}))", cases.join(" "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elaborator::elaborate_str;
    use crate::semantics::{eval, Interpretation};

    fn model() -> ConcreteModel {
        let s = elaborate_str(BATTERY_DECLARATION).unwrap();
        ConcreteModel::from_env(&s.env, HeapId(0), BatteryBounds::default()).unwrap()
    }

    #[test]
    fn battery_objects() {
        let m = model();
        let shown: Vec<String> = m.objects.iter().map(|o| o.to_string()).collect();
        assert_eq!(shown, ["O_Empty", "(O_Int 0)", "(O_Ptr #addr0)"]);
        assert_eq!(m.heaps.len(), 40);
        assert_eq!(m.addrs.len(), 6);
    }

    #[test]
    fn all_axioms_pass() {
        let m = model();
        for r in check_all(&m) {
            assert!(r.passed(), "{} failed: {}", r.axiom, r.counterexample.unwrap());
            assert!(r.instances > 0);
        }
    }

    #[test]
    fn cons_witness() {
        let r = check_axiom(&model(), AxiomId::Cons);
        assert!(r.passed());
        assert_eq!(r.instances, 6);
    }

    /// Writes outside the allocated range leave junk behind.
    struct Leaky(ConcreteModel);

    #[derive(Debug, Clone, PartialEq)]
    struct LeakyHeap(HeapValue, Vec<(u64, Value)>);

    impl HeapModel for Leaky {
        type Heap = LeakyHeap;
        type Addr = AddressValue;
        type Obj = Value;
        fn empty(&self) -> LeakyHeap {
            LeakyHeap(HeapValue::default(), vec![])
        }
        fn null(&self) -> AddressValue {
            AddressValue::NULL
        }
        fn def_obj(&self) -> Value {
            self.0.def_obj.clone()
        }
        fn valid(&self, h: &LeakyHeap, p: &AddressValue) -> bool {
            sem_valid(&h.0, *p)
        }
        fn read(&self, h: &LeakyHeap, p: &AddressValue) -> Value {
            sem_read(&h.0, *p, &self.0.def_obj)
        }
        fn write(&self, h: &LeakyHeap, p: &AddressValue, o: &Value) -> LeakyHeap {
            let mut junk = h.1.clone();
            if !sem_valid(&h.0, *p) {
                junk.push((p.0, o.clone()));
            }
            LeakyHeap(sem_write(&h.0, *p, o.clone()), junk)
        }
        fn allocate(&self, h: &LeakyHeap, o: &Value) -> (LeakyHeap, AddressValue) {
            let (h2, a) = sem_allocate(&h.0, o.clone());
            (LeakyHeap(h2, h.1.clone()), a)
        }
        fn heaps(&self) -> Vec<LeakyHeap> {
            let base: Vec<LeakyHeap> = self.0.heaps.iter().map(|h| LeakyHeap(h.clone(), vec![])).collect();
            let mut out = base.clone();
            for h in &base {
                for p in &self.0.addrs {
                    for o in &self.0.objects {
                        out.push(self.write(h, p, o));
                    }
                }
            }
            out
        }
        fn addrs(&self) -> Vec<AddressValue> {
            self.0.addrs.clone()
        }
        fn objects(&self) -> Vec<Value> {
            self.0.objects.clone()
        }
    }

    #[test]
    fn leaky_write_breaks_ext() {
        let leaky = Leaky(model());
        let r = check_axiom(&leaky, AxiomId::Ext);
        assert!(!r.passed());
        let cex = r.counterexample.unwrap();
        assert_eq!(cex.bindings.len(), 2);
        assert!(check_axiom(&leaky, AxiomId::Ivwt).counterexample.is_some());
        assert!(check_axiom(&leaky, AxiomId::Row1).passed());
    }

    /// The formula texts agree with the native checks under bounded evaluation.
    #[test]
    fn formulas_hold_in_heap_semantics() {
        let s = elaborate_str(BATTERY_DECLARATION).unwrap();
        let sig = &s.env.heaps()[0];
        let mut bounds = Bounds {
            heap_size: 2,
            addr_max: 3,
            int_min: 0,
            int_max: 0,
            ..Bounds::default()
        };
        bounds.sort_limits.insert("Object".into(), 2);
        let interp = Interpretation::new(bounds);
        for ax in AxiomId::ALL {
            let text = axiom_formula(&s.env, sig, ax, 3);
            let t = s
                .env
                .typecheck_formula(&crate::frontend::parse_sexpr(&text).unwrap())
                .unwrap();
            assert_eq!(eval(&s.env, &t, &interp).unwrap(), Value::Bool(true), "{ax}: {text}");
        }
    }

    #[test]
    fn bounds_parse() {
        assert_eq!("3:3:5".parse::<BatteryBounds>().unwrap(), BatteryBounds::default());
        assert!("3:0:5".parse::<BatteryBounds>().is_err());
        assert!("3:3".parse::<BatteryBounds>().is_err());
    }
}
