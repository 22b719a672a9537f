use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ops::{sem_allocate, sem_read, sem_valid, sem_write};
use super::universe::{designated_value, Bounds, Universes};
use super::value::{AddressValue, ArrayValue, HeapValue, Value};
use super::EvalError;
use crate::elaborator::{Env, HeapOp, Op, Term, TermKind};

/// Interpretation of an uninterpreted function as a finite table.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FunctionTable {
    pub entries: Vec<(Vec<Value>, Value)>,
    /// Result for arguments without an entry.
    pub default: Option<Value>,
}

/// Values of the free constants and functions, plus the universe bounds
/// for quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "InterpretationRepr", into = "InterpretationRepr")]
pub struct Interpretation {
    pub bounds: Bounds,
    pub consts: BTreeMap<String, Value>,
    pub functions: BTreeMap<String, FunctionTable>,
}

/// JSON schema version of [`Interpretation`].
pub const INTERPRETATION_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct InterpretationRepr {
    v: u32,
    #[serde(default)]
    bounds: Bounds,
    #[serde(default)]
    consts: BTreeMap<String, Value>,
    #[serde(default)]
    functions: BTreeMap<String, FunctionTable>,
}

impl TryFrom<InterpretationRepr> for Interpretation {
    type Error = String;

    fn try_from(r: InterpretationRepr) -> Result<Self, String> {
        if r.v != INTERPRETATION_VERSION {
            return Err(format!("unsupported interpretation version {}", r.v));
        }
        Ok(Interpretation {
            bounds: r.bounds,
            consts: r.consts,
            functions: r.functions,
        })
    }
}

impl From<Interpretation> for InterpretationRepr {
    fn from(i: Interpretation) -> Self {
        InterpretationRepr {
            v: INTERPRETATION_VERSION,
            bounds: i.bounds,
            consts: i.consts,
            functions: i.functions,
        }
    }
}

impl Interpretation {
    pub fn new(bounds: Bounds) -> Self {
        Interpretation {
            bounds,
            ..Default::default()
        }
    }

    pub fn with_const(mut self, name: impl Into<String>, v: Value) -> Self {
        self.consts.insert(name.into(), v);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Evaluates terms of one environment under one interpretation.
pub struct Evaluator<'a> {
    env: &'a Env,
    interp: &'a Interpretation,
    universes: Universes<'a>,
    def_objs: Vec<Value>,
}

type Locals = Vec<(String, Value)>;

fn bool_of(v: Value) -> Result<bool, EvalError> {
    v.as_bool()
        .ok_or_else(|| EvalError::Type(format!("expected Bool, got {v}")))
}

fn int_of(v: Value) -> Result<BigInt, EvalError> {
    match v {
        Value::Int(i) => Ok(i),
        v => Err(EvalError::Type(format!("expected Int, got {v}"))),
    }
}

fn heap_of(v: Value) -> Result<HeapValue, EvalError> {
    match v {
        Value::Heap(h) => Ok(h),
        v => Err(EvalError::Type(format!("expected a heap, got {v}"))),
    }
}

fn addr_of(v: Value) -> Result<AddressValue, EvalError> {
    v.as_addr()
        .ok_or_else(|| EvalError::Type(format!("expected an address, got {v}")))
}

fn array_of(v: Value) -> Result<ArrayValue, EvalError> {
    match v {
        Value::Array(a) => Ok(a),
        v => Err(EvalError::Type(format!("expected an array, got {v}"))),
    }
}

/// Euclidean division; division by zero yields 0 for both quotient and remainder.
fn div_mod(m: &BigInt, n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let a = n.abs();
    let r = ((m % &a) + &a) % &a;
    let q = (m - &r) / n;
    (q, r)
}

impl<'a> Evaluator<'a> {
    pub fn new(env: &'a Env, interp: &'a Interpretation) -> Result<Self, EvalError> {
        let mut ev = Evaluator {
            env,
            interp,
            universes: Universes::new(env, &interp.bounds),
            def_objs: Vec::new(),
        };
        let defs = env
            .heaps()
            .iter()
            .map(|h| ev.eval(&h.def_obj))
            .collect::<Result<Vec<_>, _>>()?;
        ev.def_objs = defs;
        Ok(ev)
    }

    pub fn env(&self) -> &Env {
        self.env
    }

    pub fn universes(&self) -> &Universes<'a> {
        &self.universes
    }

    pub fn def_obj(&self, heap: usize) -> &Value {
        &self.def_objs[heap]
    }

    pub fn eval(&self, t: &Term) -> Result<Value, EvalError> {
        self.eval_in(t, &mut Vec::new())
    }

    pub fn eval_bool(&self, t: &Term) -> Result<bool, EvalError> {
        bool_of(self.eval(t)?)
    }

    /// Evaluates with the given local variable bindings.
    pub fn eval_with(&self, t: &Term, locals: &[(String, Value)]) -> Result<Value, EvalError> {
        self.eval_in(t, &mut locals.to_vec())
    }

    fn quantify(
        &self,
        vars: &[(String, crate::elaborator::Sort)],
        body: &Term,
        locals: &mut Locals,
        forall: bool,
    ) -> Result<bool, EvalError> {
        let Some(((name, sort), rest)) = vars.split_first() else {
            return bool_of(self.eval_in(body, locals)?);
        };
        let universe = self.universes.of(sort)?;
        for v in universe.iter() {
            locals.push((name.clone(), v.clone()));
            let r = self.quantify(rest, body, locals, forall);
            locals.pop();
            if r? != forall {
                return Ok(!forall);
            }
        }
        Ok(forall)
    }

    fn eval_in(&self, t: &Term, locals: &mut Locals) -> Result<Value, EvalError> {
        match &t.kind {
            TermKind::Bool(b) => Ok(Value::Bool(*b)),
            TermKind::Int(i) => Ok(Value::Int(i.clone())),
            TermKind::Var(v) => locals
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, val)| val.clone())
                .ok_or_else(|| EvalError::Unassigned(v.clone())),
            TermKind::Const(c) => self
                .interp
                .consts
                .get(c)
                .cloned()
                .ok_or_else(|| EvalError::Unassigned(c.clone())),
            TermKind::Let(binds, body) => {
                let vals = binds
                    .iter()
                    .map(|(n, b)| Ok((n.clone(), self.eval_in(b, locals)?)))
                    .collect::<Result<Vec<_>, EvalError>>()?;
                let depth = locals.len();
                locals.extend(vals);
                let r = self.eval_in(body, locals);
                locals.truncate(depth);
                r
            }
            TermKind::Forall(vars, body) => Ok(Value::Bool(self.quantify(vars, body, locals, true)?)),
            TermKind::Exists(vars, body) => Ok(Value::Bool(self.quantify(vars, body, locals, false)?)),
            TermKind::App(op, args) => self.eval_app(t, op, args, locals),
        }
    }

    fn eval_app(&self, t: &Term, op: &Op, args: &[Term], locals: &mut Locals) -> Result<Value, EvalError> {
        let arg = |i: usize, locals: &mut Locals| self.eval_in(&args[i], locals);
        match op {
            Op::Not => Ok(Value::Bool(!bool_of(arg(0, locals)?)?)),
            Op::And => {
                for a in args {
                    if !bool_of(self.eval_in(a, locals)?)? {
                        return Ok(Value::Bool(false));
                    }
                }
                Ok(Value::Bool(true))
            }
            Op::Or => {
                for a in args {
                    if bool_of(self.eval_in(a, locals)?)? {
                        return Ok(Value::Bool(true));
                    }
                }
                Ok(Value::Bool(false))
            }
            Op::Implies => {
                // Right associative: a => (b => c).
                let (last, prems) = args.split_last().expect("at least two");
                for p in prems {
                    if !bool_of(self.eval_in(p, locals)?)? {
                        return Ok(Value::Bool(true));
                    }
                }
                self.eval_in(last, locals)
            }
            Op::Xor => {
                let mut acc = false;
                for a in args {
                    acc ^= bool_of(self.eval_in(a, locals)?)?;
                }
                Ok(Value::Bool(acc))
            }
            Op::Eq | Op::Distinct => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_in(a, locals))
                    .collect::<Result<Vec<_>, _>>()?;
                let r = if *op == Op::Eq {
                    vals.windows(2).all(|w| w[0] == w[1])
                } else {
                    (0..vals.len()).all(|i| (i + 1..vals.len()).all(|j| vals[i] != vals[j]))
                };
                Ok(Value::Bool(r))
            }
            Op::Ite => {
                if bool_of(arg(0, locals)?)? {
                    arg(1, locals)
                } else {
                    arg(2, locals)
                }
            }
            Op::Neg => Ok(Value::Int(-int_of(arg(0, locals)?)?)),
            Op::Abs => Ok(Value::Int(int_of(arg(0, locals)?)?.abs())),
            Op::Add | Op::Sub | Op::Mul | Op::Div | Op::Mod => {
                let vals = args
                    .iter()
                    .map(|a| int_of(self.eval_in(a, locals)?))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut it = vals.into_iter();
                let first = it.next().expect("arguments");
                Ok(Value::Int(it.fold(first, |acc, x| match op {
                    Op::Add => acc + x,
                    Op::Sub => acc - x,
                    Op::Mul => acc * x,
                    Op::Div => div_mod(&acc, &x).0,
                    _ => div_mod(&acc, &x).1,
                })))
            }
            Op::Le | Op::Lt | Op::Ge | Op::Gt => {
                let vals = args
                    .iter()
                    .map(|a| int_of(self.eval_in(a, locals)?))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Bool(vals.windows(2).all(|w| match op {
                    Op::Le => w[0] <= w[1],
                    Op::Lt => w[0] < w[1],
                    Op::Ge => w[0] >= w[1],
                    _ => w[0] > w[1],
                })))
            }
            Op::Select => {
                let a = array_of(arg(0, locals)?)?;
                Ok(a.select(&arg(1, locals)?))
            }
            Op::Store => {
                let a = array_of(arg(0, locals)?)?;
                Ok(Value::Array(a.store(arg(1, locals)?, arg(2, locals)?)))
            }
            Op::ConstArray => Ok(Value::Array(ArrayValue::constant(arg(0, locals)?))),
            Op::Constructor(c) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_in(a, locals))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Value::ctor(c.clone(), vals))
            }
            Op::Selector {
                datatype,
                constructor,
                field,
                ..
            } => {
                let v = arg(0, locals)?;
                let dt = self.env.datatype(datatype).expect("datatype");
                let c = &dt.constructors[*constructor];
                match v {
                    Value::Ctor { name, mut args } if name == c.name => Ok(args.swap_remove(*field)),
                    Value::Ctor { .. } => Ok(designated_value(self.env, &t.sort)),
                    v => Err(EvalError::Type(format!("selector applied to {v}"))),
                }
            }
            Op::Tester { datatype, constructor } => {
                let dt = self.env.datatype(datatype).expect("datatype");
                match arg(0, locals)? {
                    Value::Ctor { name, .. } => Ok(Value::Bool(name == dt.constructors[*constructor].name)),
                    v => Err(EvalError::Type(format!("tester applied to {v}"))),
                }
            }
            Op::Apply(f) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_in(a, locals))
                    .collect::<Result<Vec<_>, _>>()?;
                let fun = self.env.function(f).ok_or_else(|| EvalError::Unassigned(f.clone()))?;
                match &fun.body {
                    Some((params, body)) => {
                        let mut inner: Locals = params.iter().cloned().zip(vals).collect();
                        self.eval_in(body, &mut inner)
                    }
                    None => {
                        let table = self
                            .interp
                            .functions
                            .get(f)
                            .ok_or_else(|| EvalError::Unassigned(f.clone()))?;
                        table
                            .entries
                            .iter()
                            .find(|(k, _)| *k == vals)
                            .map(|(_, v)| v.clone())
                            .or_else(|| table.default.clone())
                            .ok_or_else(|| {
                                EvalError::Unassigned(format!(
                                    "{f} at ({})",
                                    vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
                                ))
                            })
                    }
                }
            }
            Op::Heap(id, hop) => {
                let def = &self.def_objs[id.0];
                let sig = self.env.heap(*id);
                match hop {
                    HeapOp::EmptyHeap => Ok(Value::Heap(HeapValue::default())),
                    HeapOp::NullAddress => Ok(Value::addr(0)),
                    HeapOp::NthAddress(i) => i
                        .to_u64()
                        .map(Value::addr)
                        .ok_or_else(|| EvalError::Unsupported(format!("address index {i} too large"))),
                    HeapOp::Valid => {
                        let h = heap_of(arg(0, locals)?)?;
                        Ok(Value::Bool(sem_valid(&h, addr_of(arg(1, locals)?)?)))
                    }
                    HeapOp::Read => {
                        let h = heap_of(arg(0, locals)?)?;
                        Ok(sem_read(&h, addr_of(arg(1, locals)?)?, def))
                    }
                    HeapOp::Write => {
                        let h = heap_of(arg(0, locals)?)?;
                        let a = addr_of(arg(1, locals)?)?;
                        Ok(Value::Heap(sem_write(&h, a, arg(2, locals)?)))
                    }
                    HeapOp::Allocate => {
                        let h = heap_of(arg(0, locals)?)?;
                        let (h2, a) = sem_allocate(&h, arg(1, locals)?);
                        Ok(Value::ctor(
                            sig.alloc_result_ctor.clone(),
                            vec![Value::Heap(h2), Value::Addr(a)],
                        ))
                    }
                }
            }
        }
    }
}

/// Evaluates a term in one call.
pub fn eval(env: &Env, t: &Term, interp: &Interpretation) -> Result<Value, EvalError> {
    Evaluator::new(env, interp)?.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elaborator::elaborate_str;

    const DECL: &str = "(declare-heap Heap Addr Object O_Empty ((Object 0))
        (((O_Empty) (O_Int (val Int)) (O_Ptr (ptr Addr)))))";

    fn check(extra: &str, interp: &Interpretation) -> Vec<Value> {
        let s = elaborate_str(&format!("{DECL}{extra}")).unwrap();
        let ev = Evaluator::new(&s.env, interp).unwrap();
        s.assertions().map(|t| ev.eval(t).unwrap()).collect()
    }

    #[test]
    fn ground_heap_terms() {
        let vals = check(
            "(declare-const o Object)
             (assert (valid (_1 (allocate emptyHeap o)) (_2 (allocate emptyHeap o))))
             (assert (= (read emptyHeap (_ nthAddr 1)) O_Empty))
             (assert (= (_2 (allocate (_1 (allocate emptyHeap o)) o)) (_ nthAddr 2)))
             (assert (= (val O_Empty) 0))",
            &Interpretation::default().with_const("o", Value::ctor("O_Int", vec![Value::int(4)])),
        );
        assert!(vals.iter().all(|v| *v == Value::Bool(true)), "{vals:?}");
    }

    #[test]
    fn bounded_quantifiers() {
        let vals = check(
            "(assert (forall ((h Heap) (p Addr)) (not (valid h nullAddr))))
             (assert (forall ((p Addr)) (not (valid emptyHeap p))))
             (assert (exists ((h Heap)) (valid h (_ nthAddr 3))))
             (assert (not (exists ((h Heap)) (valid h (_ nthAddr 4)))))",
            &Interpretation::new(Bounds {
                int_min: 0,
                int_max: 1,
                addr_max: 3,
                ..Bounds::default()
            }),
        );
        assert!(vals.iter().all(|v| *v == Value::Bool(true)), "{vals:?}");
    }

    #[test]
    fn chc_clause_discharge() {
        let s = elaborate_str(&format!(
            "{DECL}(declare-fun Inv1 (Heap) Bool)
             (assert (forall ((H Heap)) (=> (= H emptyHeap) (Inv1 H))))"
        ))
        .unwrap();
        let mut interp = Interpretation::new(Bounds {
            int_min: 0,
            int_max: 0,
            addr_max: 1,
            heap_size: 2,
            ..Bounds::default()
        });
        interp.functions.insert(
            "Inv1".into(),
            FunctionTable {
                entries: vec![(vec![Value::Heap(HeapValue::default())], Value::Bool(true))],
                default: Some(Value::Bool(false)),
            },
        );
        let t = s.assertions().next().unwrap();
        assert_eq!(eval(&s.env, t, &interp).unwrap(), Value::Bool(true));
        interp.functions.get_mut("Inv1").unwrap().entries.clear();
        assert_eq!(eval(&s.env, t, &interp).unwrap(), Value::Bool(false));
    }

    #[test]
    fn errors() {
        let s = elaborate_str(&format!("{DECL}(declare-const h Heap) (assert (valid h nullAddr))")).unwrap();
        let t = s.assertions().next().unwrap();
        assert!(matches!(
            eval(&s.env, t, &Interpretation::default()),
            Err(EvalError::Unassigned(_))
        ));
        let s = elaborate_str("(declare-sort U 0) (assert (forall ((x U)) (= x x)))").unwrap();
        let mut interp = Interpretation::default();
        interp.bounds.uninterpreted = 0;
        assert_eq!(
            eval(&s.env, s.assertions().next().unwrap(), &interp).unwrap(),
            Value::Bool(true)
        );
    }

    #[test]
    fn integer_division() {
        for (m, n, q, r) in [
            (7, 2, 3, 1),
            (-7, 2, -4, 1),
            (7, -2, -3, 1),
            (-7, -2, 4, 1),
            (5, 0, 0, 0),
        ] {
            let (qq, rr) = div_mod(&BigInt::from(m), &BigInt::from(n));
            assert_eq!((qq, rr), (BigInt::from(q), BigInt::from(r)), "{m} {n}");
        }
    }

    #[test]
    fn interpretation_json_round_trip() {
        let mut i = Interpretation::default().with_const(
            "h",
            Value::Heap(HeapValue {
                contents: vec![Value::ctor("O_Empty", vec![])],
            }),
        );
        i.functions.insert(
            "f".into(),
            FunctionTable {
                entries: vec![(vec![Value::addr(1)], Value::Bool(true))],
                default: None,
            },
        );
        let j = i.to_json();
        assert!(j.contains("\"v\": 1"));
        assert_eq!(Interpretation::from_json(&j).unwrap(), i);
        assert!(Interpretation::from_json(r#"{"v":2}"#).is_err());
        assert_eq!(
            Interpretation::from_json(r#"{"v":1}"#).unwrap(),
            Interpretation::default()
        );
    }
}
