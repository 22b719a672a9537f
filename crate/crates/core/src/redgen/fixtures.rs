use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::transpiler::{transpile_str, TranspileConfig};

/// A linked list built from a `Nil` and a `Cons` cell, its head incremented
/// in place and checked afterwards, as Horn clauses over one heap.
pub const MOTIVATION: &str = "(declare-heap Heap Address Object
  O_Empty
  ((IntList 0) (Cons 0) (Nil 0) (Object 0))
  (((IntList (sz Int)))
   ((Cons (head Int) (tail Address) (parentCons IntList)))
   ((Nil (parentNil IntList)))
   ((O_Empty)
    (O_Cons (getCons Cons))
    (O_Nil (getNil Nil)))))

(declare-fun Inv1 (Heap) Bool)
(declare-fun Inv2 (Heap Address) Bool)
(declare-fun Inv3 (Heap Address) Bool)
(declare-fun Inv4 (Heap Address) Bool)

(assert (Inv1 emptyHeap))
(assert (forall ((h Heap) (ar AllocationResultHeap))
  (=> (and (Inv1 h) (= ar (allocate h (O_Nil (Nil (IntList 0))))))
      (Inv2 (_1 ar) (_2 ar)))))
(assert (forall ((h Heap) (p Address) (ar AllocationResultHeap))
  (=> (and (Inv2 h p) (= ar (allocate h (O_Cons (Cons 0 p (IntList 1))))))
      (Inv3 (_1 ar) (_2 ar)))))
(assert (forall ((h Heap) (l Address))
  (=> (Inv3 h l) (valid h l))))
(assert (forall ((h Heap) (l Address) (c Cons))
  (=> (and (Inv3 h l) (= (read h l) (O_Cons c)))
      (Inv4 (write h l (O_Cons (Cons (+ (head c) 1) (tail c) (parentCons c)))) l))))
(assert (forall ((h Heap) (l Address) (n Nil))
  (=> (and (Inv3 h l) (= (read h l) (O_Nil n))) false)))
(assert (forall ((h Heap) (l Address) (c Cons))
  (=> (and (Inv4 h l) (= (read h l) (O_Cons c))) (= (head c) 1))))
(assert (forall ((h Heap) (l Address))
  (=> (Inv4 h l) (is-O_Cons (read h l)))))
(check-sat)
";

/// Two heaps that agree on every read and on validity but are asserted
/// different. Unsatisfiable over heaps; the bare array encoding, which
/// compares whole arrays, admits a model.
pub const EXT_DEFECT: &str = "(declare-heap Heap Address Object
  O_Empty
  ((Object 0))
  (((O_Empty) (O_Int (val Int)) (O_Ptr (ptr Address)))))
(declare-const h1 Heap)
(declare-const h2 Heap)
(assert (forall ((p Address))
  (and (= (valid h1 p) (valid h2 p)) (= (read h1 p) (read h2 p)))))
(assert (not (= h1 h2)))
(check-sat)
";

/// File names and contents of every fixture.
pub fn fixture_files() -> Vec<(&'static str, String)> {
    let l2 = super::lemma2();
    let transpiled = transpile_str(MOTIVATION, &TranspileConfig::default()).expect("the fixture transpiles");
    vec![
        ("motivation.smt2", MOTIVATION.to_string()),
        ("motivation.transpiled.smt2", transpiled),
        ("ext-defect.smt2", EXT_DEFECT.to_string()),
        ("lemma2-a.smt2", l2.a.smt2),
        ("lemma2-b.smt2", l2.b.smt2),
        ("lemma2.smt2", l2.combined.smt2),
    ]
}

/// Writes [`fixture_files`] into `dir`, creating it if needed.
pub fn emit_fixtures(dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    fixture_files()
        .into_iter()
        .map(|(name, text)| {
            let path = dir.join(name);
            fs::write(&path, text)?;
            Ok(path)
        })
        .collect()
}
