//! Benchmark generators: the SAT-to-heap reduction, the interpolation
//! instance and the linked-list fixtures.

mod cnf;
mod fixtures;

use std::fmt::Write as _;

pub use cnf::{clause_shapes, exhaustive, Cnf, CnfError};
pub use fixtures::{emit_fixtures, fixture_files, EXT_DEFECT, MOTIVATION};

use crate::semantics::{Interpretation, Value};
use crate::solver::{Conjunction, SolverError};

#[derive(Debug, thiserror::Error)]
pub enum RedgenError {
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error("generated script does not elaborate: {0}")]
    Generated(#[from] SolverError),
}

/// A generated script and the conjunction it asserts.
#[derive(Debug, Clone)]
pub struct Generated {
    pub smt2: String,
    pub conjunction: Conjunction,
}

impl Generated {
    fn new(smt2: String) -> Result<Generated, RedgenError> {
        let conjunction = Conjunction::parse(&smt2)?;
        Ok(Generated { smt2, conjunction })
    }
}

const REDUCTION_PREAMBLE: &str = "(declare-sort O 0)
(declare-const defObj O)
(declare-heap Heap Addr O defObj () ())
(declare-const T O)
(declare-const F O)
(declare-const h Heap)
";

fn addr_var(j: usize, positive: bool) -> String {
    if positive {
        format!("a{j}")
    } else {
        format!("abar{j}")
    }
}

/// The address written for variable `j` in `clause`.
fn target(clause: &[i32], j: usize) -> String {
    let pos = clause.contains(&(j as i32));
    let neg = clause.contains(&-(j as i32));
    match (pos, neg) {
        (true, true) => "(_ nthAddr 1)".into(),
        (true, false) => addr_var(j, true),
        (false, true) => addr_var(j, false),
        (false, false) => "nullAddr".into(),
    }
}

/// Encodes `cnf` as a conjunction of heap literals over a heap with two
/// cells holding `F`. Each clause writes `T` along a chain, one write per
/// variable, and reads cell 1 back.
pub fn sat_to_heap(cnf: &Cnf) -> Result<Generated, RedgenError> {
    cnf.validate()?;
    let mut s = String::from(REDUCTION_PREAMBLE);
    for j in 1..=cnf.vars {
        writeln!(s, "(declare-const {} Addr)", addr_var(j, true)).unwrap();
        writeln!(s, "(declare-const {} Addr)", addr_var(j, false)).unwrap();
    }
    s.push_str("(assert (not (= T F)))\n");
    s.push_str("(assert (= h (_1 (allocate (_1 (allocate emptyHeap F)) F))))\n");
    for j in 1..=cnf.vars {
        let (a, abar) = (addr_var(j, true), addr_var(j, false));
        writeln!(s, "(assert (valid h {a}))").unwrap();
        writeln!(s, "(assert (valid h {abar}))").unwrap();
        writeln!(s, "(assert (not (= {a} {abar})))").unwrap();
    }
    for clause in &cnf.clauses {
        let mut w = "h".to_string();
        for j in 1..=cnf.vars {
            w = format!("(write {w} {} T)", target(clause, j));
        }
        writeln!(s, "(assert (= T (read {w} (_ nthAddr 1))))").unwrap();
    }
    s.push_str("(check-sat)\n");
    Generated::new(s)
}

/// Reads an assignment off a model of [`sat_to_heap`]: `x_j` holds iff `a_j`
/// is the first address.
pub fn decode(cnf: &Cnf, model: &Interpretation) -> Vec<bool> {
    (1..=cnf.vars)
        .map(|j| model.consts.get(&addr_var(j, true)) == Some(&Value::addr(1)))
        .collect()
}

const LEMMA2_PREAMBLE: &str = "(declare-sort O 0)
(declare-const defObj O)
(declare-heap Heap Addr O defObj () ())
(declare-const h1 Heap)
(declare-const h2 Heap)
(declare-const p1 Addr)
(declare-const p2 Addr)
(declare-const p3 Addr)
(declare-const o1 O)
";

const LEMMA2_A: &str = "(assert (= h2 (write h1 p1 o1)))
(assert (valid h1 p1))
";

const LEMMA2_B: &str = "(assert (not (= p2 p3)))
(assert (not (= (read h2 p2) (read h1 p2))))
(assert (not (= (read h2 p3) (read h1 p3))))
(assert (valid h1 p2))
(assert (valid h1 p3))
";

/// An unsatisfiable pair `A ∧ B` whose only interpolants quantify over addresses.
pub struct Lemma2 {
    pub a: Generated,
    pub b: Generated,
    pub combined: Generated,
}

pub fn lemma2() -> Lemma2 {
    let script =
        |body: &str| Generated::new(format!("{LEMMA2_PREAMBLE}{body}(check-sat)\n")).expect("fixed script elaborates");
    Lemma2 {
        a: script(LEMMA2_A),
        b: script(LEMMA2_B),
        combined: script(&format!("{LEMMA2_A}{LEMMA2_B}")),
    }
}

#[cfg(test)]
mod tests;
