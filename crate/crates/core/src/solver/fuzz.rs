//! Seeded generator of random conjunctions in the ground heap fragment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Conjunction, SolverError};

/// Shape limits of generated conjunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FuzzConfig {
    pub max_literals: usize,
    pub addr_vars: usize,
    pub heap_vars: usize,
    pub obj_vars: usize,
    /// Nesting depth of heap terms.
    pub depth: u32,
    /// Largest `nth` index used.
    pub max_nth: u64,
    /// Percentage of conjunctions over a two-constructor datatype instead of an uninterpreted sort.
    pub datatype_percent: u32,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            max_literals: 6,
            addr_vars: 3,
            heap_vars: 2,
            obj_vars: 2,
            depth: 2,
            max_nth: 2,
            datatype_percent: 25,
        }
    }
}

const UNINTERPRETED: &str = "(declare-sort O 0)
(declare-const d O)
(declare-heap Heap Addr O d () ())
";

const DATATYPE: &str = "(declare-heap Heap Addr O O_A ((O 0)) (((O_A) (O_B))))
";

struct Gen<'a> {
    rng: &'a mut ChaCha8Rng,
    cfg: FuzzConfig,
    datatype: bool,
}

impl Gen<'_> {
    fn var(&mut self, prefix: &str, n: usize) -> String {
        format!("{prefix}{}", self.rng.gen_range(1..=n))
    }

    fn addr(&mut self, depth: u32) -> String {
        match self.rng.gen_range(0..10) {
            0 => "nullAddr".into(),
            1 | 2 if self.cfg.max_nth > 0 => format!("(_ nthAddr {})", self.rng.gen_range(1..=self.cfg.max_nth)),
            3 if depth > 0 => format!("(_2 (allocate {} {}))", self.heap(depth - 1), self.obj(depth - 1)),
            _ if self.cfg.addr_vars > 0 => self.var("a", self.cfg.addr_vars),
            _ => "nullAddr".into(),
        }
    }

    fn heap(&mut self, depth: u32) -> String {
        match self.rng.gen_range(0..10) {
            0 => "emptyHeap".into(),
            1..=3 if depth > 0 => format!(
                "(write {} {} {})",
                self.heap(depth - 1),
                self.addr(depth - 1),
                self.obj(depth - 1)
            ),
            4 | 5 if depth > 0 => format!("(_1 (allocate {} {}))", self.heap(depth - 1), self.obj(depth - 1)),
            _ if self.cfg.heap_vars > 0 => self.var("h", self.cfg.heap_vars),
            _ => "emptyHeap".into(),
        }
    }

    fn obj(&mut self, depth: u32) -> String {
        match self.rng.gen_range(0..10) {
            0..=2 if depth > 0 => format!("(read {} {})", self.heap(depth - 1), self.addr(depth - 1)),
            3 if self.datatype => ["O_A", "O_B"].choose(self.rng).unwrap().to_string(),
            3 => "d".into(),
            _ if self.cfg.obj_vars > 0 => self.var("o", self.cfg.obj_vars),
            _ => if self.datatype { "O_A" } else { "d" }.into(),
        }
    }

    fn atom(&mut self) -> String {
        let d = self.cfg.depth;
        match self.rng.gen_range(0..8) {
            0 | 1 => format!("(valid {} {})", self.heap(d), self.addr(d)),
            2 | 3 => format!("(= {} {})", self.addr(d), self.addr(d)),
            4 | 5 => format!("(= {} {})", self.obj(d), self.obj(d)),
            6 => format!("(= {} {})", self.heap(d), self.heap(d)),
            _ => format!(
                "(= (allocate {} {}) (allocate {} {}))",
                self.heap(d - 1),
                self.obj(d - 1),
                self.heap(d - 1),
                self.obj(d - 1)
            ),
        }
    }

    fn script(&mut self) -> String {
        let mut s = String::from(if self.datatype { DATATYPE } else { UNINTERPRETED });
        for i in 1..=self.cfg.addr_vars {
            s += &format!("(declare-const a{i} Addr)\n");
        }
        for i in 1..=self.cfg.heap_vars {
            s += &format!("(declare-const h{i} Heap)\n");
        }
        for i in 1..=self.cfg.obj_vars {
            s += &format!("(declare-const o{i} O)\n");
        }
        for _ in 0..self.rng.gen_range(1..=self.cfg.max_literals) {
            let atom = self.atom();
            if self.rng.gen_bool(0.4) {
                s += &format!("(assert (not {atom}))\n");
            } else {
                s += &format!("(assert {atom})\n");
            }
        }
        s
    }
}

/// SMT-LIB text of the `index`-th conjunction of the stream for `seed`.
pub fn random_script(seed: u64, index: u64, cfg: FuzzConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let datatype = rng.gen_range(0..100) < cfg.datatype_percent;
    Gen {
        rng: &mut rng,
        cfg,
        datatype,
    }
    .script()
}

pub fn random_conjunction(seed: u64, index: u64, cfg: FuzzConfig) -> Result<Conjunction, SolverError> {
    Conjunction::parse(&random_script(seed, index, cfg))
}
