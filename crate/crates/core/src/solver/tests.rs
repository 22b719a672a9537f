use super::fuzz::{random_conjunction, FuzzConfig};
use super::*;
use crate::semantics::{eval, Value};

const U: &str = "(declare-sort O 0)
(declare-const d O)
(declare-heap Heap Addr O d () ())
(declare-const h Heap) (declare-const h1 Heap) (declare-const h2 Heap)
(declare-const p Addr) (declare-const p1 Addr) (declare-const p2 Addr) (declare-const p3 Addr)
(declare-const o1 O) (declare-const o2 O)
";

fn conj(asserts: &str) -> Conjunction {
    Conjunction::parse(&format!("{U}{asserts}")).unwrap()
}

fn verdict(asserts: &str) -> Verdict {
    let c = conj(asserts);
    let r = solve(&c).unwrap();
    if let Verdict::Sat(m) = &r.verdict {
        for l in &c.literals {
            assert_eq!(eval(&c.env, &l.term(), m).unwrap(), Value::Bool(true));
        }
    }
    r.verdict
}

fn oracle(asserts: &str) -> OracleVerdict {
    let c = conj(asserts);
    let b = model_bound(&c).unwrap();
    enumerate_models(&c, b, 10_000_000).unwrap()
}

#[test]
fn valid_in_empty_heap_is_unsat() {
    assert!(verdict("(assert (valid emptyHeap p))").is_unsat());
    assert_eq!(oracle("(assert (valid emptyHeap p))"), OracleVerdict::UnsatWithinBounds);
}

#[test]
fn fresh_address_is_never_null() {
    assert!(verdict("(assert (= (_2 (allocate emptyHeap o1)) nullAddr))").is_unsat());
}

#[test]
fn write_to_invalid_address_reads_default() {
    let src = "(assert (= (read (write h p o1) p) o2)) (assert (not (= o1 o2)))";
    let c = conj(src);
    let Verdict::Sat(m) = solve(&c).unwrap().verdict else {
        panic!("expected sat");
    };
    let sig = c.heap().unwrap();
    let not_valid = Term::not(sig.valid(Term::constant("h", sig.heap()), Term::constant("p", sig.addr())));
    assert_eq!(eval(&c.env, &not_valid, &m).unwrap(), Value::Bool(true));
    assert_eq!(m.consts["o2"], m.consts["d"]);
    assert!(matches!(oracle(src), OracleVerdict::Sat(_)));
}

#[test]
fn lemma_two_instance() {
    let a = "(assert (= h2 (write h1 p1 o1))) (assert (valid h1 p1))";
    let b = "(assert (not (= p2 p3)))
        (assert (not (= (read h2 p2) (read h1 p2))))
        (assert (not (= (read h2 p3) (read h1 p3))))
        (assert (valid h1 p2)) (assert (valid h1 p3))";
    assert!(verdict(a).is_sat());
    assert!(verdict(b).is_sat());
    assert!(verdict(&format!("{a}{b}")).is_unsat());
}

#[test]
fn empty_conjunction_is_sat() {
    assert!(verdict("").is_sat());
    let OracleVerdict::Sat(m) = oracle("") else {
        panic!("expected sat");
    };
    assert_eq!(m.consts["p"], Value::addr(0));
}

#[test]
fn allocation_is_deterministic_in_the_size() {
    assert!(verdict(
        "(assert (= h1 (_1 (allocate h o1)))) (assert (= h2 (_1 (allocate h o2))))
         (assert (not (= (_2 (allocate h1 o1)) (_2 (allocate h2 o1)))))"
    )
    .is_unsat());
    assert!(verdict("(assert (= (_2 (allocate (_1 (allocate emptyHeap o1)) o2)) (_ nthAddr 2)))").is_sat());
    assert!(verdict("(assert (not (= (_2 (allocate (_1 (allocate emptyHeap o1)) o2)) (_ nthAddr 2))))").is_unsat());
}

#[test]
fn heap_disequality_needs_a_witness() {
    assert!(verdict("(assert (not (= h1 h2))) (assert (= h1 (write h2 p o1))) (assert (valid h2 p))").is_sat());
    assert!(verdict("(assert (not (= h1 h2))) (assert (= h1 (write h2 p (read h2 p))))").is_unsat());
    assert!(verdict("(assert (not (= h1 h1)))").is_unsat());
}

#[test]
fn purification_flattens_definitions() {
    let c = conj("(assert (= (read (write h p o1) p) o2))");
    let f = purify(&c).unwrap();
    assert_eq!(f.writes.len(), 1);
    assert_eq!(f.reads.len(), 1);
    assert_eq!(f.obj_eq.len(), 1);
    assert_eq!(f.reads[0].heap, f.writes[0].out);
    let text = f.to_string();
    assert!(text.contains("writeEq("), "{text}");
    let c = conj("(assert (valid emptyHeap p))");
    let f = purify(&c).unwrap();
    assert_eq!(f.empties.len(), 1);
    assert_eq!(f.valid, vec![(f.empties[0], f.valid[0].1, true)]);
}

#[test]
fn out_of_fragment_input_is_rejected() {
    for bad in [
        "(assert (forall ((q Addr)) (valid h q)))",
        "(declare-fun f (Addr) Addr) (assert (= (f p) p))",
        "(declare-const i Int) (assert (= i 0))",
        "(assert (or (valid h p) (valid h p1)))",
    ] {
        let c = Conjunction::parse(&format!("{U}{bad}")).unwrap();
        assert!(solve(&c).is_err(), "{bad}");
    }
}

#[test]
fn finite_object_datatypes_are_colored() {
    let src = "(declare-heap Heap Addr O O_A ((O 0)) (((O_A) (O_B))))
        (declare-const o1 O) (declare-const o2 O) (declare-const o3 O)";
    let c = Conjunction::parse(&format!("{src}(assert (distinct o1 o2 o3))")).unwrap();
    assert!(solve(&c).unwrap().verdict.is_unsat());
    let c = Conjunction::parse(&format!("{src}(assert (distinct o1 o2)) (assert (= o3 o1))")).unwrap();
    assert!(solve(&c).unwrap().verdict.is_sat());
}

#[test]
fn budget_exhaustion_is_unknown() {
    let c = conj("(assert (not (= p1 p2))) (assert (not (= p2 p3))) (assert (not (= (read h p1) (read h p2))))");
    let r = solve_with(&c, &SolveOptions { budget: 1 }).unwrap();
    assert!(matches!(r.verdict, Verdict::Unknown(_)), "{:?}", r.verdict);
}

#[test]
fn model_bound_counts_points() {
    let b = model_bound(&conj("")).unwrap();
    assert_eq!(b.max_value, 0);
    assert_eq!(b.objects, 2);
    let b = model_bound(&conj("(assert (valid (_1 (allocate emptyHeap d)) (_ nthAddr 1)))")).unwrap();
    assert!(b.max_value >= 2);
}

#[test]
fn oracle_refuses_beyond_budget() {
    let c = conj("(assert (not (= h1 h2)))");
    let b = model_bound(&c).unwrap();
    assert!(matches!(enumerate_models(&c, b, 1), Err(OracleError::Refused { .. })));
}

#[test]
fn fuzz_agreement_sample() {
    let cfg = FuzzConfig::default();
    for i in 0..150 {
        let c = random_conjunction(11, i, cfg).unwrap();
        let r = solve(&c).unwrap_or_else(|e| panic!("{e}\n{}", c.to_smt2()));
        let b = model_bound(&c).unwrap();
        let o = enumerate_models(&c, b, 20_000_000).unwrap_or_else(|e| panic!("{e}\n{}", c.to_smt2()));
        match (&r.verdict, &o) {
            (Verdict::Sat(_), OracleVerdict::Sat(_)) | (Verdict::Unsat, OracleVerdict::UnsatWithinBounds) => {}
            _ => panic!(
                "disagreement on #{i}: solver {}, oracle {o:?}\n{}",
                r.verdict,
                c.to_smt2()
            ),
        }
    }
}

#[test]
fn printed_conjunctions_reparse() {
    let c = random_conjunction(3, 0, FuzzConfig::default()).unwrap();
    let again = Conjunction::parse(&c.to_smt2()).unwrap();
    assert_eq!(again.literals, c.literals);
}
