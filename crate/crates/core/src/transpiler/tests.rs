use super::*;
use crate::elaborator::elaborate_str;
use crate::frontend::{parse_str_in, Dialect};
use crate::semantics::{eval, ArrayValue, Bounds, HeapValue, Interpretation, Value, BATTERY_DECLARATION};

fn lower(src: &str, cfg: &TranspileConfig) -> String {
    transpile_str(src, cfg).unwrap()
}

fn leaks(src: &str, out: &str) -> BTreeSet<String> {
    let env = elaborate_str(src).unwrap().env;
    let cmds = parse_str_in(out, Dialect::Plain).unwrap();
    leaked_symbols(&cmds, &heap_vocabulary(&env))
}

#[test]
fn preamble_shape() {
    let cmds = frontend::parse_str(BATTERY_DECLARATION).unwrap();
    let out = one_line(&transpile_script(&cmds, &TranspileConfig::default()).unwrap());
    let expected = [
        "(declare-datatypes ((Object 0)) (((O_Empty) (O_Int (val Int)) (O_Ptr (ptr Int)))))",
        "(declare-datatypes ((enc.Heap 0) (enc.AllocationResultHeap 0))",
        "(define-fun enc.validHeap ((h enc.Heap) (p Int)) Bool (and (< 0 p) (<= p (enc.HeapSize h))))",
        "(define-fun enc.emptyHeap () enc.Heap (enc.HeapCtor 0 ((as const (Array Int Object)) O_Empty)))",
    ];
    for e in expected {
        assert!(out.contains(e), "missing {e} in\n{out}");
    }
    for f in [
        "enc.readHeap",
        "enc.writeHeap",
        "enc.allocateHeap",
        "enc.heapEqHeap",
        "enc.wfHeap",
    ] {
        assert!(out.contains(&format!("(define-fun {f} ")), "{f}");
    }
    let printed = lower(BATTERY_DECLARATION, &TranspileConfig::default());
    assert!(leaks(BATTERY_DECLARATION, &printed).is_empty());
    assert!(elaborate_script(&parse_str_in(&printed, Dialect::Plain).unwrap()).is_ok());
}

#[test]
fn uncorrected_preamble_uses_declared_array() {
    let out = lower(BATTERY_DECLARATION, &TranspileConfig::uncorrected());
    assert!(out.contains("(declare-const enc.initHeap (Array Int Object))"));
    assert!(out.contains("(enc.HeapCtor 0 enc.initHeap)"));
    assert!(!out.contains("heapEq") && !out.contains("wfHeap"));
}

#[test]
fn read_and_write_are_guarded() {
    let out = one_line(
        &transpile_script(
            &frontend::parse_str(BATTERY_DECLARATION).unwrap(),
            &TranspileConfig::default(),
        )
        .unwrap(),
    );
    assert!(out.contains("(ite (enc.validHeap h p) (select (enc.HeapContents h) p) O_Empty)"));
    assert!(
        out.contains("(ite (enc.validHeap h p) (enc.HeapCtor (enc.HeapSize h) (store (enc.HeapContents h) p o)) h)")
    );
    assert!(out.contains("(enc.AllocationResultHeapCtor (enc.HeapCtor (+ (enc.HeapSize h) 1) (store (enc.HeapContents h) (+ (enc.HeapSize h) 1) o)) (+ (enc.HeapSize h) 1))"));
}

fn one_line(cmds: &[Command]) -> String {
    cmds.iter()
        .map(|c| c.to_sexpr().to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Lowered commands of `src`, after the battery preamble.
fn body_of(src: &str, cfg: &TranspileConfig) -> String {
    let preamble = transpile_script(&frontend::parse_str(BATTERY_DECLARATION).unwrap(), cfg).unwrap();
    let cmds = frontend::parse_str(&format!("{BATTERY_DECLARATION}\n{src}")).unwrap();
    one_line(&transpile_script(&cmds, cfg).unwrap()[preamble.len()..])
}

#[test]
fn heap_equality_and_guards() {
    let out = body_of(
        "(assert (forall ((h1 Heap) (h2 Heap)) (= h1 h2)))",
        &TranspileConfig::default(),
    );
    assert_eq!(
        out,
        "(assert (forall ((h1 enc.Heap) (h2 enc.Heap)) (=> (and (enc.wfHeap h1) (enc.wfHeap h2)) (enc.heapEqHeap h1 h2))))"
    );
    let out = body_of(
        "(assert (exists ((h Heap) (p Addr)) (not (= h (write h p O_Empty)))))",
        &TranspileConfig::default(),
    );
    assert_eq!(
        out,
        "(assert (exists ((h enc.Heap) (p Int)) (and (enc.wfHeap h) (>= p 0) (not (enc.heapEqHeap h (enc.writeHeap h p O_Empty))))))"
    );
    let out = body_of(
        "(assert (forall ((h1 Heap) (h2 Heap)) (= h1 h2)))",
        &TranspileConfig::uncorrected(),
    );
    assert_eq!(out, "(assert (forall ((h1 enc.Heap) (h2 enc.Heap)) (= h1 h2)))");
}

#[test]
fn addresses_become_integers() {
    let out = body_of(
        "(declare-const h Heap)\n(assert (valid h nullAddr))\n(assert (= (_ nthAddr 3) (_2 (allocate h O_Empty))))",
        &TranspileConfig::default(),
    );
    assert_eq!(
        out,
        "(declare-const h enc.Heap)\n(assert (enc.wfHeap h))\n(assert (enc.validHeap h 0))\n(assert (= 3 (enc.AllocationResultHeapAddr (enc.allocateHeap h O_Empty))))"
    );
}

#[test]
fn alloc_result_equality_and_functions() {
    let src = "(declare-fun f (Int) AllocationResultHeap)
(declare-fun g (Heap Int) Addr)
(define-fun sz ((h Heap)) Addr (_2 (allocate h O_Empty)))
(assert (= (f 0) (AllocResultHeap emptyHeap (g emptyHeap 1))))";
    let out = body_of(src, &TranspileConfig::default());
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "(declare-fun f (Int) enc.AllocationResultHeap)");
    assert_eq!(
        lines[1],
        "(assert (forall ((x!0 Int)) (and (enc.wfHeap (enc.AllocationResultHeapHeap (f x!0))) (>= (enc.AllocationResultHeapAddr (f x!0)) 0))))"
    );
    assert_eq!(lines[2], "(declare-fun g (enc.Heap Int) Int)");
    assert_eq!(
        lines[3],
        "(assert (forall ((x!0 enc.Heap) (x!1 Int)) (>= (g x!0 x!1) 0)))"
    );
    assert_eq!(
        lines[4],
        "(define-fun sz ((h enc.Heap)) Int (enc.AllocationResultHeapAddr (enc.allocateHeap h O_Empty)))"
    );
    assert!(lines[5].starts_with("(assert (and (enc.heapEqHeap (enc.AllocationResultHeapHeap (f 0)) (enc.AllocationResultHeapHeap (enc.AllocationResultHeapCtor enc.emptyHeap (g enc.emptyHeap 1))))"));
    assert!(leaks(
        &format!("{BATTERY_DECLARATION}\n{src}"),
        &lower(&format!("{BATTERY_DECLARATION}\n{src}"), &TranspileConfig::default())
    )
    .is_empty());
}

#[test]
fn heap_free_scripts_pass_through() {
    let src = "(set-logic ALL)\n(declare-fun x () Int)\n(assert (> x (- 3)))\n(check-sat)\n";
    let cmds = frontend::parse_str(src).unwrap();
    assert_eq!(transpile_script(&cmds, &TranspileConfig::default()).unwrap(), cmds);
    let mixed = format!("{BATTERY_DECLARATION}\n{src}");
    let out = lower(&mixed, &TranspileConfig::default());
    assert!(out.ends_with("(set-logic ALL)\n(declare-fun x () Int)\n(assert (> x (- 3)))\n(check-sat)\n"));
}

#[test]
fn prefix_collisions_are_rejected() {
    let src = format!("(declare-sort enc.Heap 0)\n{BATTERY_DECLARATION}");
    assert!(matches!(
        transpile_str(&src, &TranspileConfig::default()),
        Err(TranspileError::Collision(s)) if s == "enc.Heap"
    ));
    let cfg = TranspileConfig {
        prefix: "my_".into(),
        ..TranspileConfig::default()
    };
    let out = transpile_script(&frontend::parse_str(&src).unwrap(), &cfg).unwrap();
    assert!(one_line(&out).contains("(declare-datatypes ((my_Heap 0)"));
}

#[test]
fn heaps_inside_user_datatypes_are_rejected() {
    let src = format!("{BATTERY_DECLARATION}\n(declare-datatypes ((Box 0)) (((box (unbox Heap)))))");
    assert!(matches!(
        transpile_str(&src, &TranspileConfig::default()),
        Err(TranspileError::Untranspilable(_))
    ));
    let src = format!("{BATTERY_DECLARATION}\n(declare-datatypes ((Ref 0)) (((ref (target Addr)))))");
    assert!(lower(&src, &TranspileConfig::default()).contains("(declare-datatypes ((Ref 0)) (((ref (target Int)))))"));
}

#[test]
fn ordering_errors_propagate() {
    let src = format!("(declare-const h Heap)\n{BATTERY_DECLARATION}");
    assert!(matches!(
        transpile_str(&src, &TranspileConfig::default()),
        Err(TranspileError::Elab(_))
    ));
}

/// Addresses become integers, also inside objects.
fn lower_value(v: &Value) -> Value {
    match v {
        Value::Addr(a) => Value::int(a.0),
        Value::Ctor { name, args } => Value::ctor(name.clone(), args.iter().map(lower_value).collect()),
        _ => v.clone(),
    }
}

/// The record a canonical heap is mapped to.
fn concretize(h: &HeapValue, def: &Value) -> Value {
    let mut a = ArrayValue::constant(def.clone());
    for (i, o) in h.contents.iter().enumerate() {
        a = a.store(Value::int(i as i64 + 1), lower_value(o));
    }
    Value::ctor("enc.HeapCtor", vec![Value::int(h.size() as i64), Value::Array(a)])
}

/// Evaluates both sides under paired interpretations of one heap constant
/// `h` and one address constant `a`.
#[test]
fn differential_corpus() {
    let corpus = [
        "(valid h a)",
        "(= (read h a) O_Empty)",
        "(= (write h a (O_Int 1)) h)",
        "(not (= (write h a (O_Int 1)) h))",
        "(= (read (write h a (O_Int 1)) a) (O_Int 1))",
        "(= (_2 (allocate h O_Empty)) (_ nthAddr 2))",
        "(= (_1 (allocate h O_Empty)) (write h a O_Empty))",
        "(distinct h emptyHeap (_1 (allocate emptyHeap (O_Ptr a))))",
        "(= (read (_1 (allocate h (O_Ptr a))) (_2 (allocate h (O_Ptr a)))) (O_Ptr a))",
        "(and (valid h (_ nthAddr 1)) (= h (write h (_ nthAddr 1) (read h (_ nthAddr 1)))))",
        "(forall ((p Addr)) (=> (valid h p) (valid (_1 (allocate h O_Empty)) p)))",
        "(exists ((g Heap)) (and (valid g a) (= (read g a) (O_Int 1))))",
        "(= (ite (valid h a) h emptyHeap) (write h nullAddr O_Empty))",
    ];
    let decls = format!("{BATTERY_DECLARATION}\n(declare-const h Heap)\n(declare-const a Addr)");
    let mut bounds = Bounds {
        heap_size: 2,
        addr_max: 3,
        int_min: -1,
        int_max: 3,
        ..Bounds::default()
    };
    bounds.sort_limits.insert("Object".into(), 3);
    let def = Value::ctor("O_Empty", vec![]);
    for f in corpus {
        let src = format!("{decls}\n(assert {f})");
        let source = elaborate_str(&src).unwrap();
        let target = elaborate_script(
            &transpile_script(&frontend::parse_str(&src).unwrap(), &TranspileConfig::default()).unwrap(),
        )
        .unwrap();
        let model = crate::semantics::ConcreteModel::from_env(
            &source.env,
            HeapId(0),
            crate::semantics::BatteryBounds {
                heap_size: 2,
                objects: 3,
                addr_max: 3,
            },
        )
        .unwrap();
        let mut agree_sat = (false, false);
        for hv in &model.heaps {
            for a in 0..=3u64 {
                let si = Interpretation::new(bounds.clone())
                    .with_const("h", Value::Heap(hv.clone()))
                    .with_const("a", Value::addr(a));
                let ti = Interpretation::new(bounds.clone())
                    .with_const("h", concretize(hv, &def))
                    .with_const("a", Value::int(a as i64));
                let s = source
                    .assertions()
                    .all(|t| eval(&source.env, t, &si).unwrap() == Value::Bool(true));
                let t = target
                    .assertions()
                    .all(|t| eval(&target.env, t, &ti).unwrap() == Value::Bool(true));
                assert_eq!(s, t, "{f} at h={hv:?} a={a}");
                agree_sat.0 |= s;
                agree_sat.1 |= t;
            }
        }
        assert_eq!(agree_sat.0, agree_sat.1, "{f}");
    }
}

/// Non-canonical arrays, negative sizes and negative addresses are excluded
/// by the guards on free constants.
#[test]
fn junk_interpretations_violate_guards() {
    let src = format!("{BATTERY_DECLARATION}\n(declare-const h Heap)\n(declare-const a Addr)\n(assert true)");
    let target =
        elaborate_script(&transpile_script(&frontend::parse_str(&src).unwrap(), &TranspileConfig::default()).unwrap())
            .unwrap();
    let bounds = Bounds {
        int_min: -1,
        int_max: 2,
        ..Bounds::default()
    };
    let def = Value::ctor("O_Empty", vec![]);
    let junk_array = ArrayValue::constant(def.clone()).store(Value::int(2), Value::ctor("O_Int", vec![Value::int(1)]));
    let cases = [
        (
            Value::ctor("enc.HeapCtor", vec![Value::int(1), Value::Array(junk_array)]),
            Value::int(0),
        ),
        (
            Value::ctor(
                "enc.HeapCtor",
                vec![Value::int(-1), Value::Array(ArrayValue::constant(def.clone()))],
            ),
            Value::int(0),
        ),
        (concretize(&HeapValue::default(), &def), Value::int(-1)),
    ];
    for (h, a) in cases {
        let ti = Interpretation::new(bounds.clone())
            .with_const("h", h)
            .with_const("a", a);
        assert!(!target
            .assertions()
            .all(|t| eval(&target.env, t, &ti).unwrap() == Value::Bool(true)));
    }
}
