use super::*;
use crate::elaborator::{elaborate_str, SortKind};
use crate::frontend::{parse_str_in, Dialect};
use crate::solver::{purify, solve, Verdict};
use crate::transpiler::{heap_vocabulary, leaked_symbols};

fn verdict(cnf: &Cnf) -> Verdict {
    let g = sat_to_heap(cnf).unwrap();
    solve(&g.conjunction).unwrap().verdict
}

#[test]
fn tautological_clause_writes_the_first_address() {
    let cnf = Cnf::new(1, vec![vec![1, -1]]).unwrap();
    let g = sat_to_heap(&cnf).unwrap();
    assert!(
        g.smt2
            .contains("(assert (= T (read (write h (_ nthAddr 1) T) (_ nthAddr 1))))"),
        "{}",
        g.smt2
    );
}

#[test]
fn four_cases_of_the_write_chain() {
    let cnf = Cnf::new(4, vec![vec![1, -2, 3, -3]]).unwrap();
    let g = sat_to_heap(&cnf).unwrap();
    let chain = "(read (write (write (write (write h a1 T) abar2 T) (_ nthAddr 1) T) nullAddr T) (_ nthAddr 1))";
    assert!(g.smt2.contains(chain), "{}", g.smt2);
}

#[test]
fn contradictory_units_are_unsat() {
    let cnf = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
    assert_eq!(cnf.brute_force(), None);
    assert!(verdict(&cnf).is_unsat());
}

#[test]
fn decoded_assignment_satisfies_the_cnf() {
    let cnf = Cnf::new(2, vec![vec![1, 2]]).unwrap();
    let Verdict::Sat(m) = verdict(&cnf) else {
        panic!("expected sat");
    };
    assert!(cnf.eval(&decode(&cnf, &m)));
}

#[test]
fn zero_variables_with_clauses_is_an_error() {
    let cnf = Cnf {
        vars: 0,
        clauses: vec![vec![1]],
    };
    assert!(matches!(
        sat_to_heap(&cnf),
        Err(RedgenError::Cnf(CnfError::NoVariables))
    ));
    assert!(verdict(&Cnf::new(0, vec![]).unwrap()).is_sat());
}

#[test]
fn reductions_stay_in_the_fragment() {
    let cnf = Cnf::new(3, vec![vec![1, -2], vec![2, 3, -3], vec![-1]]).unwrap();
    let g = sat_to_heap(&cnf).unwrap();
    assert!(purify(&g.conjunction).is_ok());
}

#[test]
fn small_cnfs_are_equisatisfiable() {
    for m in 1..=2 {
        for cnf in exhaustive(m, &clause_shapes(m, true), 2, true) {
            match (cnf.brute_force(), verdict(&cnf)) {
                (Some(_), Verdict::Sat(model)) => assert!(cnf.eval(&decode(&cnf, &model)), "{cnf}"),
                (None, Verdict::Unsat) => {}
                (b, v) => panic!("{cnf}: brute force {b:?}, solver {v}"),
            }
        }
    }
}

#[test]
fn lemma2_verdicts() {
    let l = lemma2();
    assert!(solve(&l.a.conjunction).unwrap().verdict.is_sat());
    assert!(solve(&l.b.conjunction).unwrap().verdict.is_sat());
    assert!(solve(&l.combined.conjunction).unwrap().verdict.is_unsat());
    assert_eq!(l.combined.conjunction.literals.len(), 7);
}

#[test]
fn motivation_declares_four_object_datatypes() {
    let s = elaborate_str(MOTIVATION).unwrap();
    let datatypes: Vec<&String> = s
        .env
        .datatypes()
        .map(|d| &d.name)
        .filter(|n| s.env.sort_kind_of(n) == Some(SortKind::Datatype))
        .collect();
    assert_eq!(datatypes.len(), 4, "{datatypes:?}");
    for n in ["Object", "IntList", "Cons", "Nil"] {
        assert!(datatypes.iter().any(|d| *d == n), "{n}");
    }
    assert_eq!(
        s.env.sort_kind_of("AllocationResultHeap"),
        Some(SortKind::AllocResult(s.env.heaps()[0].id))
    );
}

#[test]
fn transpiled_motivation_is_plain() {
    let files = fixture_files();
    let out = &files
        .iter()
        .find(|(n, _)| *n == "motivation.transpiled.smt2")
        .unwrap()
        .1;
    let plain = parse_str_in(out, Dialect::Plain).unwrap();
    let env = elaborate_str(MOTIVATION).unwrap().env;
    assert!(leaked_symbols(&plain, &heap_vocabulary(&env)).is_empty());
}

#[test]
fn every_fixture_reparses() {
    for (name, text) in fixture_files() {
        let dialect = if name.contains("transpiled") {
            Dialect::Plain
        } else {
            Dialect::Heap
        };
        let cmds = parse_str_in(&text, dialect).unwrap_or_else(|e| panic!("{name}: {e}"));
        crate::elaborator::elaborate_script(&cmds).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn emitted_files_match_the_generators() {
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_fixtures(dir.path()).unwrap();
    assert_eq!(paths.len(), fixture_files().len());
    for ((_, text), path) in fixture_files().iter().zip(&paths) {
        assert_eq!(&std::fs::read_to_string(path).unwrap(), text);
    }
}
