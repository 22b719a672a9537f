//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heapsmt::elaborator::{elaborate_str, HeapId};
use heapsmt::frontend::{parse_sexpr, parse_str_in, Dialect};
use heapsmt::redgen::{self, clause_shapes, decode, exhaustive, sat_to_heap, Cnf, MOTIVATION};
use heapsmt::semantics::{
    check_all, eval, AxiomId, BatteryBounds, Bounds, ConcreteModel, Interpretation, Value, BATTERY_DECLARATION,
};
use heapsmt::solver::fuzz::{random_conjunction, FuzzConfig};
use heapsmt::solver::{enumerate_models, model_bound, solve, Conjunction, OracleVerdict, Verdict};
use heapsmt::transpiler::battery::{check_axiom_arrays, ArrayBounds};
use heapsmt::transpiler::{heap_vocabulary, leaked_symbols, transpile_str, TranspileConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn holds(conj: &Conjunction, model: &Interpretation) -> Result<(), String> {
    for lit in &conj.literals {
        let v = eval(&conj.env, &lit.term(), model).map_err(|e| e.to_string())?;
        ensure(v == Value::Bool(true), || {
            format!("model falsifies a literal\n{}", conj.to_smt2())
        })?;
    }
    Ok(())
}

fn axiom_battery() -> Outcome {
    let t = Instant::now();
    let env = elaborate_str(BATTERY_DECLARATION).map_err(|e| e.to_string())?.env;
    let model = ConcreteModel::from_env(&env, HeapId(0), BatteryBounds::default()).map_err(|e| e.to_string())?;
    let reports = check_all(&model);
    let elapsed = t.elapsed();
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.axiom.to_string())
        .collect();
    ensure(reports.len() == 12 && failed.is_empty(), || {
        format!("failing: {failed:?}")
    })?;
    within(elapsed, Duration::from_secs(60))?;
    Ok(format!("12/12 at 3:3:5 in {elapsed:.2?}"))
}

fn defect_reproduction() -> Outcome {
    let ab = ArrayBounds::default();
    let run = |axiom, cfg: &TranspileConfig| {
        check_axiom_arrays(BATTERY_DECLARATION, axiom, cfg, ab).map_err(|e| e.to_string())
    };
    let raw = TranspileConfig::uncorrected();
    let ext = run(AxiomId::Ext, &raw)?;
    let ext_cex = ext.counterexample.ok_or("[ext] holds in uncorrected mode")?;
    let cons = run(AxiomId::Cons, &raw)?;
    let cons_cex = cons.counterexample.ok_or("[cons] holds in uncorrected mode")?;
    let p = cons_cex
        .bindings
        .iter()
        .find(|(n, _)| n == "p")
        .map(|(_, v)| v.clone())
        .ok_or("[cons] counterexample binds no address")?;
    ensure(p.starts_with("(- "), || {
        format!("[cons] counterexample address {p} is not negative")
    })?;
    let fixed = TranspileConfig::default();
    for axiom in [AxiomId::Ext, AxiomId::Cons] {
        let r = run(axiom, &fixed)?;
        ensure(r.passed(), || {
            format!("corrected {axiom} fails: {}", r.counterexample.unwrap())
        })?;
    }
    Ok(format!(
        "uncorrected [ext] fails ({ext_cex}); uncorrected [cons] fails at p = {p}; corrected both pass"
    ))
}

const FUZZ_SEED: u64 = 1;
const FUZZ_COUNT: u64 = 1000;

fn solver_oracle_agreement() -> Outcome {
    let t = Instant::now();
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..FUZZ_COUNT {
        let c = random_conjunction(FUZZ_SEED, i, FuzzConfig::default()).map_err(|e| e.to_string())?;
        let r = solve(&c).map_err(|e| format!("#{i}: {e}"))?;
        let b = model_bound(&c).map_err(|e| format!("#{i}: {e}"))?;
        let o = enumerate_models(&c, b, 200_000_000).map_err(|e| format!("#{i}: {e}"))?;
        match (&r.verdict, &o) {
            (Verdict::Sat(m), OracleVerdict::Sat(om)) => {
                holds(&c, m).map_err(|e| format!("#{i} solver: {e}"))?;
                holds(&c, om).map_err(|e| format!("#{i} oracle: {e}"))?;
                sat += 1;
            }
            (Verdict::Unsat, OracleVerdict::UnsatWithinBounds) => unsat += 1,
            _ => return Err(format!("#{i}: solver {}, oracle {o:?}\n{}", r.verdict, c.to_smt2())),
        }
    }
    let elapsed = t.elapsed();
    within(elapsed, Duration::from_secs(600))?;
    Ok(format!(
        "{FUZZ_COUNT} instances from seed {FUZZ_SEED} ({sat} sat, {unsat} unsat) agree in {elapsed:.2?}"
    ))
}

fn cnf_space() -> Vec<Cnf> {
    let mut cnfs = vec![];
    for m in 1..=2 {
        cnfs.extend(exhaustive(m, &clause_shapes(m, true), 4, true));
    }
    cnfs.extend(exhaustive(3, &clause_shapes(3, false), 4, false));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let m = rng.gen_range(1..=5);
        cnfs.push(Cnf::random(&mut rng, m, 8));
    }
    cnfs
}

/// Truth-table check, independent of `Cnf::eval`.
fn truth_table_sat(cnf: &Cnf) -> bool {
    (0u32..1 << cnf.vars).any(|bits| {
        cnf.clauses
            .iter()
            .all(|c| c.iter().any(|&l| (bits >> (l.unsigned_abs() - 1) & 1 == 1) == (l > 0)))
    })
}

fn sat_reduction() -> Outcome {
    let t = Instant::now();
    let cnfs = cnf_space();
    for cnf in &cnfs {
        let g = sat_to_heap(cnf).map_err(|e| format!("{cnf}: {e}"))?;
        let r = solve(&g.conjunction).map_err(|e| format!("{cnf}: {e}"))?;
        match (truth_table_sat(cnf), &r.verdict) {
            (true, Verdict::Sat(m)) => {
                ensure(cnf.eval(&decode(cnf, m)), || {
                    format!("{cnf}: decoded assignment falsifies it")
                })?;
                holds(&g.conjunction, m)?;
            }
            (false, Verdict::Unsat) => {}
            (b, v) => return Err(format!("{cnf}: truth table {b}, solver {v}")),
        }
    }
    Ok(format!("{} CNFs equisatisfiable in {:.2?}", cnfs.len(), t.elapsed()))
}

fn lemma2() -> Outcome {
    let t = Instant::now();
    let l = redgen::lemma2();
    let v = |g: &redgen::Generated| solve(&g.conjunction).map(|r| r.verdict).map_err(|e| e.to_string());
    let (a, b, ab) = (v(&l.a)?, v(&l.b)?, v(&l.combined)?);
    let elapsed = t.elapsed();
    ensure(a.is_sat() && b.is_sat() && ab.is_unsat(), || {
        format!("A {a}, B {b}, A and B {ab}")
    })?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("A sat, B sat, A and B unsat in {elapsed:.2?}"))
}

fn fixture_pipeline() -> Outcome {
    let script = elaborate_str(MOTIVATION).map_err(|e| e.to_string())?;
    let out = transpile_str(MOTIVATION, &TranspileConfig::default()).map_err(|e| e.to_string())?;
    let plain = parse_str_in(&out, Dialect::Plain).map_err(|e| format!("output does not re-parse: {e}"))?;
    let leaked = leaked_symbols(&plain, &heap_vocabulary(&script.env));
    ensure(leaked.is_empty(), || format!("heap symbols in output: {leaked:?}"))?;
    Ok(format!("{} plain commands, no heap symbols", plain.len()))
}

const ALLOC_DECLARATION: &str = "(declare-heap Heap Address Object O_Empty ((Object 0))
  (((O_Empty) (O_Int (val Int)))))";

/// A heap as the list of its objects, cell `i` at index `i - 1`.
struct ListHeap {
    term: String,
    cells: Vec<String>,
}

fn random_heap(rng: &mut impl Rng) -> ListHeap {
    let mut h = ListHeap {
        term: "emptyHeap".into(),
        cells: vec![],
    };
    for _ in 0..rng.gen_range(0..8) {
        let o = match rng.gen_range(-1..3) {
            -1 => "O_Empty".to_string(),
            k => format!("(O_Int {k})"),
        };
        if rng.gen_bool(0.6) {
            h.term = format!("(_1 (allocate {} {o}))", h.term);
            h.cells.push(o);
        } else {
            let a = rng.gen_range(0..=h.cells.len() as u64 + 1);
            let at = if a == 0 {
                "nullAddress".to_string()
            } else {
                format!("(_ nthAddress {a})")
            };
            h.term = format!("(write {} {at} {o})", h.term);
            if a >= 1 && a <= h.cells.len() as u64 {
                h.cells[a as usize - 1] = o;
            }
        }
    }
    h
}

fn allocation_determinism() -> Outcome {
    let env = elaborate_str(ALLOC_DECLARATION).map_err(|e| e.to_string())?.env;
    let interp = Interpretation::new(Bounds::default());
    let ev = |s: &str| -> Result<Value, String> {
        let e = parse_sexpr(s).map_err(|e| e.to_string())?;
        let t = env.typecheck(&e, &mut vec![]).map_err(|e| format!("{s}: {e}"))?;
        eval(&env, &t, &interp).map_err(|e| format!("{s}: {e}"))
    };
    let truth = |s: String| -> Result<(), String> { ensure(ev(&s)? == Value::Bool(true), || format!("false: {s}")) };
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let heaps: Vec<ListHeap> = (0..100).map(|_| random_heap(&mut rng)).collect();
    let mut fresh = vec![];
    for h in &heaps {
        let n = h.cells.len();
        for (i, o) in h.cells.iter().enumerate() {
            truth(format!("(= (read {} (_ nthAddress {})) {o})", h.term, i + 1))?;
        }
        truth(format!("(not (valid {} (_ nthAddress {})))", h.term, n + 1))?;
        let a = ev(&format!("(_2 (allocate {} O_Empty))", h.term))?;
        ensure(a == Value::addr(n as u64 + 1), || {
            format!("fresh address of a size-{n} heap is {a}")
        })?;
        fresh.push((n, a));
    }
    let mut pairs = 0;
    for (i, (n, a)) in fresh.iter().enumerate() {
        for (m, b) in &fresh[i + 1..] {
            if n == m {
                ensure(a == b, || format!("size {n}: fresh addresses {a} and {b}"))?;
                pairs += 1;
            }
        }
    }
    for i in 1..=8u64 {
        let mut h = "emptyHeap".to_string();
        for _ in 1..i {
            h = format!("(_1 (allocate {h} O_Empty))");
        }
        let last = format!("(_2 (allocate {h} O_Empty))");
        truth(format!("(= {last} (_ nthAddress {i}))"))?;
        ensure(ev(&last)? == Value::addr(i), || {
            format!("allocation {i} did not return address {i}")
        })?;
    }
    Ok(format!("100 heaps, {pairs} equal-size pairs, nthAddress 1..=8"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 axiom battery", axiom_battery),
        ("2 defect reproduction", defect_reproduction),
        ("3 solver/oracle agreement", solver_oracle_agreement),
        ("4 SAT reduction", sat_reduction),
        ("5 interpolation instance", lemma2),
        ("6 fixture pipeline", fixture_pipeline),
        ("7 allocation determinism", allocation_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (name, f) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(e) => {
                failures += 1;
                println!("FAIL criterion {name}: {e}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
