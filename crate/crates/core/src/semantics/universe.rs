//! Finite universes of values used for bounded quantifiers and enumeration.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::value::{ArrayValue, HeapValue, Value};
use super::EvalError;
use crate::elaborator::{Datatype, Env, Sort, SortKind};

/// Size limits of the finite universes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    /// Largest heap size (number of allocations).
    pub heap_size: u64,
    /// Addresses range over `0..=addr_max`.
    pub addr_max: u64,
    pub int_min: i64,
    pub int_max: i64,
    /// Universe size of uninterpreted sorts without an entry in `sort_limits`.
    pub uninterpreted: u32,
    /// Maximal nesting of datatype constructors.
    pub adt_depth: u32,
    /// Keeps only the first `n` values of the named sort's enumeration.
    pub sort_limits: BTreeMap<String, usize>,
    /// Refuse to build any universe larger than this.
    pub max_universe: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            heap_size: 3,
            addr_max: 5,
            int_min: -2,
            int_max: 2,
            uninterpreted: 3,
            adt_depth: 3,
            sort_limits: BTreeMap::new(),
            max_universe: 2_000_000,
        }
    }
}

/// Integers of the range in the order 0, 1, -1, 2, -2, ...
pub fn int_universe(min: i64, max: i64) -> Vec<Value> {
    let in_range = |i: i64| i >= min && i <= max;
    let mut out = Vec::new();
    if in_range(0) {
        out.push(Value::int(0));
    }
    for k in 1..=min.unsigned_abs().max(max.unsigned_abs()) as i64 {
        out.extend([k, -k].into_iter().filter(|&i| in_range(i)).map(Value::int));
    }
    out
}

/// Tuples of indices into lists of the given lengths, ordered by index sum
/// and then lexicographically.
fn diagonal_tuples(lens: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &n in lens {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t2 = t.clone();
                    t2.push(i);
                    t2
                })
            })
            .collect();
    }
    out.sort_by_key(|t| (t.iter().sum::<usize>(), t.clone()));
    out
}

/// Memoized universes for one environment.
pub struct Universes<'a> {
    env: &'a Env,
    bounds: &'a Bounds,
    cache: RefCell<HashMap<Sort, Rc<Vec<Value>>>>,
}

impl<'a> Universes<'a> {
    pub fn new(env: &'a Env, bounds: &'a Bounds) -> Self {
        Universes {
            env,
            bounds,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn bounds(&self) -> &Bounds {
        self.bounds
    }

    fn check_size(&self, sort: &Sort, n: usize) -> Result<(), EvalError> {
        if n > self.bounds.max_universe {
            return Err(EvalError::UniverseTooLarge {
                sort: sort.to_string(),
                size: n,
                limit: self.bounds.max_universe,
            });
        }
        Ok(())
    }

    fn limit(&self, sort: &Sort, mut vals: Vec<Value>) -> Vec<Value> {
        if let Some(n) = sort.name().and_then(|n| self.bounds.sort_limits.get(n)) {
            vals.truncate(*n);
        }
        vals
    }

    pub fn of(&self, sort: &Sort) -> Result<Rc<Vec<Value>>, EvalError> {
        if let Some(v) = self.cache.borrow().get(sort) {
            return Ok(v.clone());
        }
        let vals = Rc::new(self.build(sort)?);
        self.cache.borrow_mut().insert(sort.clone(), vals.clone());
        Ok(vals)
    }

    fn build(&self, sort: &Sort) -> Result<Vec<Value>, EvalError> {
        let b = self.bounds;
        let vals = match sort {
            Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Sort::Int => int_universe(b.int_min, b.int_max),
            Sort::Array(i, e) => {
                let (iu, eu) = (self.of(i)?, self.of(e)?);
                let count = (eu.len() as f64).powf(iu.len() as f64 + 1.0);
                if count > b.max_universe as f64 {
                    return Err(EvalError::UniverseTooLarge {
                        sort: sort.to_string(),
                        size: count.min(usize::MAX as f64) as usize,
                        limit: b.max_universe,
                    });
                }
                let mut out = BTreeSet::new();
                for d in eu.iter() {
                    let mut arrays = vec![ArrayValue::constant(d.clone())];
                    for k in iu.iter() {
                        arrays = arrays
                            .into_iter()
                            .flat_map(|a| {
                                eu.iter()
                                    .map(move |v| a.store(k.clone(), v.clone()))
                                    .collect::<Vec<_>>()
                            })
                            .collect();
                    }
                    out.extend(arrays.into_iter().map(Value::Array));
                }
                out.into_iter().collect()
            }
            Sort::Named(name) => match self.env.sort_kind_of(name) {
                None => return Err(EvalError::NoUniverse(name.clone())),
                Some(SortKind::Uninterpreted) => {
                    let n = b.sort_limits.get(name).map(|&n| n as u32).unwrap_or(b.uninterpreted);
                    (0..n)
                        .map(|index| Value::Elem {
                            sort: name.clone(),
                            index,
                        })
                        .collect()
                }
                Some(SortKind::Address(_)) => (0..=b.addr_max).map(Value::addr).collect(),
                Some(SortKind::Heap(id)) => {
                    let objs = self.of(&self.env.heap(id).object_sort)?;
                    let total: f64 = (0..=b.heap_size).map(|k| (objs.len() as f64).powi(k as i32)).sum();
                    if total > b.max_universe as f64 {
                        return Err(EvalError::UniverseTooLarge {
                            sort: sort.to_string(),
                            size: total.min(usize::MAX as f64) as usize,
                            limit: b.max_universe,
                        });
                    }
                    let mut out = vec![HeapValue::default()];
                    let mut frontier = vec![HeapValue::default()];
                    for _ in 0..b.heap_size {
                        frontier = frontier
                            .iter()
                            .flat_map(|h| {
                                objs.iter().map(move |o| {
                                    let mut h2 = h.clone();
                                    h2.contents.push(o.clone());
                                    h2
                                })
                            })
                            .collect();
                        out.extend(frontier.iter().cloned());
                    }
                    out.into_iter().map(Value::Heap).collect()
                }
                Some(SortKind::AllocResult(_) | SortKind::Datatype) => {
                    let dt = self.env.datatype(name).expect("declared datatype");
                    self.datatype_values(dt)?
                }
            },
        };
        self.check_size(sort, vals.len())?;
        Ok(self.limit(sort, vals))
    }

    /// Values of a datatype up to the depth bound: level by level, with
    /// constructors interleaved round-robin inside a level.
    fn datatype_values(&self, dt: &Datatype) -> Result<Vec<Value>, EvalError> {
        let mut levels: HashMap<String, Vec<Value>> = HashMap::new();
        let mut seen: HashMap<String, BTreeSet<Value>> = HashMap::new();
        self.datatype_levels(&dt.name, self.bounds.adt_depth, &mut levels, &mut seen)?;
        Ok(levels.remove(&dt.name).unwrap_or_default())
    }

    /// Fills `levels[name]` with all values of nesting depth ≤ `depth`.
    fn datatype_levels(
        &self,
        name: &str,
        depth: u32,
        levels: &mut HashMap<String, Vec<Value>>,
        seen: &mut HashMap<String, BTreeSet<Value>>,
    ) -> Result<(), EvalError> {
        // Iterate all datatypes reachable from `name` jointly, one depth at a time.
        let mut group = vec![name.to_string()];
        let mut i = 0;
        while i < group.len() {
            let dt = self.env.datatype(&group[i]).expect("datatype");
            for c in &dt.constructors {
                for f in &c.fields {
                    if let Sort::Named(n) = &f.sort {
                        if self.env.datatype(n).is_some() && !group.contains(n) {
                            group.push(n.clone());
                        }
                    }
                }
            }
            i += 1;
        }
        for g in &group {
            levels.entry(g.clone()).or_default();
            seen.entry(g.clone()).or_default();
        }
        for _ in 0..depth.max(1) {
            let snapshot: HashMap<String, Vec<Value>> = group.iter().map(|g| (g.clone(), levels[g].clone())).collect();
            let mut grew = false;
            for g in &group {
                let dt = self.env.datatype(g).expect("datatype");
                let mut per_ctor: Vec<Vec<Value>> = Vec::new();
                for c in &dt.constructors {
                    let mut field_vals: Vec<Rc<Vec<Value>>> = Vec::new();
                    for f in &c.fields {
                        match &f.sort {
                            Sort::Named(n) if snapshot.contains_key(n) => field_vals.push(Rc::new(snapshot[n].clone())),
                            s => field_vals.push(self.of(s)?),
                        }
                    }
                    let lens: Vec<usize> = field_vals.iter().map(|v| v.len()).collect();
                    let product: f64 = lens.iter().map(|&l| l as f64).product();
                    self.check_size(&Sort::named(g), product as usize)?;
                    let vals = diagonal_tuples(&lens)
                        .into_iter()
                        .map(|t| {
                            Value::ctor(
                                c.name.clone(),
                                t.iter().zip(&field_vals).map(|(&i, vs)| vs[i].clone()).collect(),
                            )
                        })
                        .filter(|v| !seen[g].contains(v))
                        .collect::<Vec<_>>();
                    per_ctor.push(vals);
                }
                let longest = per_ctor.iter().map(Vec::len).max().unwrap_or(0);
                for k in 0..longest {
                    for vals in &per_ctor {
                        if let Some(v) = vals.get(k) {
                            if seen.get_mut(g).unwrap().insert(v.clone()) {
                                levels.get_mut(g).unwrap().push(v.clone());
                                grew = true;
                            }
                        }
                    }
                }
                self.check_size(&Sort::named(g), levels[g].len())?;
            }
            if !grew {
                break;
            }
        }
        Ok(())
    }
}

/// Deterministic value of every sort, used for underspecified selector applications:
/// the first constructor (with finite values), recursively.
pub fn designated_value(env: &Env, sort: &Sort) -> Value {
    match sort {
        Sort::Bool => Value::Bool(false),
        Sort::Int => Value::int(0),
        Sort::Array(_, e) => Value::Array(ArrayValue::constant(designated_value(env, e))),
        Sort::Named(n) => match env.sort_kind_of(n) {
            Some(SortKind::Uninterpreted) => Value::Elem {
                sort: n.clone(),
                index: 0,
            },
            Some(SortKind::Address(_)) => Value::addr(0),
            Some(SortKind::Heap(_)) => Value::Heap(HeapValue::default()),
            _ => designated_ctor(env, n, &mut Vec::new()).expect("well-founded datatype"),
        },
    }
}

fn designated_ctor(env: &Env, dt: &str, stack: &mut Vec<String>) -> Option<Value> {
    if stack.iter().any(|s| s == dt) {
        return None;
    }
    stack.push(dt.to_string());
    let d = env.datatype(dt)?;
    let result = d.constructors.iter().find_map(|c| {
        let args = c
            .fields
            .iter()
            .map(|f| match &f.sort {
                Sort::Named(n) if env.datatype(n).is_some() => designated_ctor(env, n, stack),
                s => Some(designated_value(env, s)),
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Value::ctor(c.name.clone(), args))
    });
    stack.pop();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elaborator::elaborate_str;

    #[test]
    fn int_order() {
        assert_eq!(int_universe(-2, 2), [0, 1, -1, 2, -2].map(Value::int).to_vec());
        assert_eq!(int_universe(-1, 3), [0, 1, -1, 2, 3].map(Value::int).to_vec());
        assert_eq!(int_universe(1, 2), [1, 2].map(Value::int).to_vec());
    }

    #[test]
    fn heap_universe_counts() {
        let s = elaborate_str("(declare-sort O 0) (declare-heap H A O (O_E) () ())");
        // `O_E` is not a term of an uninterpreted sort.
        assert!(s.is_err());
        let s = elaborate_str("(declare-heap H A Int 0 () ())").unwrap();
        let bounds = Bounds {
            int_min: 0,
            int_max: 2,
            ..Bounds::default()
        };
        let u = Universes::new(&s.env, &bounds);
        assert_eq!(u.of(&Sort::named("H")).unwrap().len(), 1 + 3 + 9 + 27);
        assert_eq!(u.of(&Sort::named("A")).unwrap().len(), 6);
        assert_eq!(u.of(&Sort::named("AllocationResultH")).unwrap().len(), 40 * 6);
    }

    #[test]
    fn round_robin_datatype_order() {
        let s = elaborate_str(
            "(declare-heap Heap Addr Object O_Empty ((Object 0))
               (((O_Empty) (O_Int (val Int)) (O_Ptr (ptr Addr)))))",
        )
        .unwrap();
        let mut bounds = Bounds::default();
        bounds.sort_limits.insert("Object".into(), 5);
        let u = Universes::new(&s.env, &bounds);
        let objs = u.of(&Sort::named("Object")).unwrap();
        let shown: Vec<String> = objs.iter().map(|v| v.to_string()).collect();
        assert_eq!(
            shown,
            ["O_Empty", "(O_Int 0)", "(O_Ptr #addr0)", "(O_Int 1)", "(O_Ptr #addr1)"]
        );
    }

    #[test]
    fn recursive_datatype_depth() {
        let s = elaborate_str("(declare-datatypes ((L 0)) (((nil) (cons (hd Bool) (tl L)))))").unwrap();
        let bounds = Bounds {
            adt_depth: 3,
            ..Bounds::default()
        };
        let u = Universes::new(&s.env, &bounds);
        // depth 1: nil; depth 2: 2 lists of length 1; depth 3: 4 of length 2.
        assert_eq!(u.of(&Sort::named("L")).unwrap().len(), 1 + 2 + 4);
    }

    #[test]
    fn designated_values() {
        let s = elaborate_str("(declare-datatypes ((L 0)) (((cons (hd Int) (tl L)) (nil))))").unwrap();
        assert_eq!(designated_value(&s.env, &Sort::named("L")), Value::ctor("nil", vec![]));
    }

    #[test]
    fn universe_budget_refusal() {
        let s = elaborate_str("(declare-heap H A Int 0 () ())").unwrap();
        let bounds = Bounds {
            heap_size: 12,
            max_universe: 1000,
            ..Bounds::default()
        };
        let u = Universes::new(&s.env, &bounds);
        assert!(matches!(
            u.of(&Sort::named("H")),
            Err(EvalError::UniverseTooLarge { .. })
        ));
    }
}
