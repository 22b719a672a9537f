//! Difference-bound matrix over integer variables, kept closed.

pub const INF: i64 = i64::MAX / 4;

/// `m[i][j]` is an upper bound on `x_i - x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dbm {
    n: usize,
    m: Vec<i64>,
}

impl Dbm {
    pub fn new(n: usize) -> Self {
        let mut m = vec![INF; n * n];
        for i in 0..n {
            m[i * n + i] = 0;
        }
        Dbm { n, m }
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.n + j]
    }

    /// Whether `x_i - x_j <= c` is consistent with the current bounds.
    pub fn allows(&self, i: usize, j: usize, c: i64) -> bool {
        let back = self.get(j, i);
        back >= INF || back + c >= 0
    }

    pub fn entails(&self, i: usize, j: usize, c: i64) -> bool {
        self.get(i, j) <= c
    }

    /// Adds `x_i - x_j <= c`; false on inconsistency (the matrix is then unusable).
    pub fn add(&mut self, i: usize, j: usize, c: i64) -> bool {
        if !self.allows(i, j, c) {
            return false;
        }
        if self.get(i, j) <= c {
            return true;
        }
        let n = self.n;
        let col_i: Vec<i64> = (0..n).map(|k| self.m[k * n + i]).collect();
        let row_j: Vec<i64> = (0..n).map(|l| self.m[j * n + l]).collect();
        for (k, &ki) in col_i.iter().enumerate() {
            if ki >= INF {
                continue;
            }
            for (l, &jl) in row_j.iter().enumerate() {
                if jl >= INF {
                    continue;
                }
                let cand = ki + c + jl;
                let cell = &mut self.m[k * n + l];
                if cand < *cell {
                    *cell = cand;
                }
            }
        }
        (0..n).all(|k| self.m[k * n + k] >= 0)
    }

    pub fn add_eq(&mut self, i: usize, j: usize, c: i64) -> bool {
        self.add(i, j, c) && self.add(j, i, -c)
    }

    /// Least solution with `x_zero = 0`, assuming every variable is bounded below by it.
    pub fn least_solution(&self, zero: usize) -> Vec<i64> {
        (0..self.n).map(|i| -self.get(zero, i)).collect()
    }
}
