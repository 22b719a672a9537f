use std::fmt;

use rand::Rng;

/// Clauses over variables `1..=vars`; literal `-j` is the negation of `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CnfError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("literal {lit} of clause {clause} is outside 1..={vars}")]
    OutOfRange { clause: usize, lit: i32, vars: usize },
    #[error("clauses over zero variables")]
    NoVariables,
    #[error("line {line}: {message}")]
    Dimacs { line: usize, message: String },
}

impl Cnf {
    pub fn new(vars: usize, clauses: Vec<Vec<i32>>) -> Result<Cnf, CnfError> {
        let cnf = Cnf { vars, clauses };
        cnf.validate()?;
        Ok(cnf)
    }

    pub fn validate(&self) -> Result<(), CnfError> {
        if self.vars == 0 && !self.clauses.is_empty() {
            return Err(CnfError::NoVariables);
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(CnfError::EmptyClause(i + 1));
            }
            if let Some(&lit) = c.iter().find(|l| l.unsigned_abs() as usize > self.vars || **l == 0) {
                return Err(CnfError::OutOfRange {
                    clause: i + 1,
                    lit,
                    vars: self.vars,
                });
            }
        }
        Ok(())
    }

    /// Reads DIMACS CNF. Comment lines and a trailing `%` section are skipped;
    /// clauses may span lines.
    pub fn parse_dimacs(src: &str) -> Result<Cnf, CnfError> {
        let err = |line: usize, message: String| CnfError::Dimacs { line, message };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = vec![];
        let mut current = vec![];
        for (n, line) in src.lines().enumerate().map(|(i, l)| (i + 1, l.trim())) {
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    ["cnf", v, c] if header.is_none() => {
                        let v = v.parse().map_err(|_| err(n, format!("bad variable count `{v}`")))?;
                        let c = c.parse().map_err(|_| err(n, format!("bad clause count `{c}`")))?;
                        header = Some((v, c));
                    }
                    _ => return Err(err(n, format!("bad problem line `{line}`"))),
                }
                continue;
            }
            if header.is_none() {
                return Err(err(n, "clause before the problem line".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| err(n, format!("bad literal `{tok}`")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        let (vars, count) = header.ok_or_else(|| err(0, "missing problem line".into()))?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != count {
            return Err(err(
                0,
                format!("header announces {count} clauses, found {}", clauses.len()),
            ));
        }
        Cnf::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }

    /// `assignment[j - 1]` is the value of `x_j`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    /// First satisfying assignment in binary counting order.
    pub fn brute_force(&self) -> Option<Vec<bool>> {
        assert!(self.vars < 32, "too many variables to enumerate");
        (0u32..1 << self.vars)
            .map(|bits| (0..self.vars).map(|j| bits >> j & 1 == 1).collect::<Vec<_>>())
            .find(|a| self.eval(a))
    }

    /// Uniform clause count in `1..=max_clauses`, widths in `1..=3`.
    pub fn random(rng: &mut impl Rng, vars: usize, max_clauses: usize) -> Cnf {
        let k = rng.gen_range(1..=max_clauses);
        let clauses = (0..k)
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let v = rng.gen_range(1..=vars) as i32;
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        Cnf { vars, clauses }
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clauses: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<String> = c
                    .iter()
                    .map(|&l| if l > 0 { format!("x{l}") } else { format!("¬x{}", -l) })
                    .collect();
                format!("({})", lits.join(" ∨ "))
            })
            .collect();
        if clauses.is_empty() {
            f.write_str("⊤")
        } else {
            f.write_str(&clauses.join(" ∧ "))
        }
    }
}

/// Every nonempty clause over `1..=vars` with each variable absent, positive
/// or negative, plus both polarities when `tautologies` is set.
pub fn clause_shapes(vars: usize, tautologies: bool) -> Vec<Vec<i32>> {
    let states = if tautologies { 4u32 } else { 3 };
    (1..states.pow(vars as u32))
        .map(|code| {
            let mut c = code;
            let mut clause = vec![];
            for j in 1..=vars as i32 {
                match c % states {
                    1 => clause.push(j),
                    2 => clause.push(-j),
                    3 => clause.extend([j, -j]),
                    _ => {}
                }
                c /= states;
            }
            clause
        })
        .collect()
}

/// Every CNF over `vars` variables with at most `max_clauses` clauses drawn
/// from `shapes`, up to clause order. With `repeats` the clauses form a
/// multiset, otherwise a set.
pub fn exhaustive(vars: usize, shapes: &[Vec<i32>], max_clauses: usize, repeats: bool) -> Vec<Cnf> {
    let mut out = vec![Cnf { vars, clauses: vec![] }];
    let mut frontier: Vec<(usize, Vec<Vec<i32>>)> = vec![(0, vec![])];
    for _ in 0..max_clauses {
        let mut next = vec![];
        for (start, clauses) in &frontier {
            for (i, s) in shapes.iter().enumerate().skip(*start) {
                let mut c = clauses.clone();
                c.push(s.clone());
                out.push(Cnf {
                    vars,
                    clauses: c.clone(),
                });
                next.push((if repeats { i } else { i + 1 }, c));
            }
        }
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let src = "c example\np cnf 3 2\n1 -3 0\n2\n3 -1 0\n%\n0\n";
        let cnf = Cnf::parse_dimacs(src).unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, -3], vec![2, 3, -1]]);
        assert_eq!(Cnf::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(Cnf::new(0, vec![vec![1]]), Err(CnfError::NoVariables));
        assert_eq!(Cnf::new(2, vec![vec![]]), Err(CnfError::EmptyClause(1)));
        assert!(matches!(
            Cnf::new(2, vec![vec![3]]),
            Err(CnfError::OutOfRange { lit: 3, .. })
        ));
        assert!(Cnf::parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(Cnf::parse_dimacs("1 0\n").is_err());
        assert!(Cnf::new(0, vec![]).is_ok());
    }

    #[test]
    fn brute_force_agrees_with_eval() {
        let unsat = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(unsat.brute_force(), None);
        let sat = Cnf::new(2, vec![vec![1, 2], vec![-1]]).unwrap();
        assert_eq!(sat.brute_force(), Some(vec![false, true]));
    }

    #[test]
    fn exhaustive_counts() {
        assert_eq!(clause_shapes(1, true), vec![vec![1], vec![-1], vec![1, -1]]);
        assert_eq!(clause_shapes(3, false).len(), 26);
        let shapes = clause_shapes(1, false);
        // Multisets of size ≤ 2 over two clauses: 1 + 2 + 3.
        assert_eq!(exhaustive(1, &shapes, 2, true).len(), 6);
        assert_eq!(exhaustive(1, &shapes, 2, false).len(), 4);
        let shapes = clause_shapes(2, true);
        assert!(exhaustive(2, &shapes, 2, true).iter().all(|c| c.validate().is_ok()));
    }
}
