//! Ground decision procedure for quantifier-free conjunctions of heap
//! literals, plus an independent bounded enumerator used as its oracle.

mod dbm;
pub mod fuzz;
mod oracle;
mod purify;
mod search;

use std::fmt;
use std::time::Duration;

use serde::Serialize;

use crate::elaborator::{elaborate_script, ElabError, Env, HeapSignature, ItemKind, Op, Script, Term, TermKind};
use crate::frontend::{self, Command, ParseError};
use crate::semantics::Interpretation;

pub use oracle::{enumerate_models, model_bound, OracleBounds, OracleError, OracleVerdict};
pub use purify::{purify, AddrNode, FlatConstraints, HeapNode, ObjKind, ObjNode};
pub use search::{solve, solve_with, SolveOptions};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("outside the ground heap fragment: {0}")]
pub struct FragmentError(pub String);

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Elab(#[from] ElabError),
    #[error(transparent)]
    Fragment(#[from] FragmentError),
}

/// A signed atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub atom: Term,
}

impl Literal {
    pub fn term(&self) -> Term {
        if self.positive {
            self.atom.clone()
        } else {
            Term::not(self.atom.clone())
        }
    }
}

/// Declarations plus a flat list of literals, read as their conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjunction {
    /// Every non-assert command of the source, minus `check-sat`, `get-model` and `exit`.
    pub preamble: Vec<Command>,
    pub env: Env,
    pub literals: Vec<Literal>,
}

fn split_literals(t: &Term, positive: bool, out: &mut Vec<Literal>) {
    match (&t.kind, positive) {
        (TermKind::App(Op::Not, args), _) => split_literals(&args[0], !positive, out),
        (TermKind::App(Op::And, args), true) => args.iter().for_each(|a| split_literals(a, true, out)),
        (TermKind::Bool(true), true) | (TermKind::Bool(false), false) => {}
        _ => out.push(Literal {
            positive,
            atom: t.clone(),
        }),
    }
}

impl Conjunction {
    pub fn from_script(script: &Script) -> Conjunction {
        let mut literals = Vec::new();
        let mut preamble = Vec::new();
        for item in &script.items {
            match &item.kind {
                ItemKind::Assert(t) => split_literals(t, true, &mut literals),
                _ if matches!(item.command, Command::CheckSat | Command::GetModel | Command::Exit) => {}
                _ => preamble.push(item.command.clone()),
            }
        }
        Conjunction {
            preamble,
            env: script.env.clone(),
            literals,
        }
    }

    pub fn parse(src: &str) -> Result<Conjunction, SolverError> {
        let commands = frontend::parse_str(src)?;
        let script = elaborate_script(&commands)?;
        Ok(Conjunction::from_script(&script))
    }

    /// Same declarations, other literals.
    pub fn with_literals(&self, literals: Vec<Literal>) -> Conjunction {
        Conjunction {
            preamble: self.preamble.clone(),
            env: self.env.clone(),
            literals,
        }
    }

    /// The single heap the fragment works over.
    pub fn heap(&self) -> Result<&HeapSignature, FragmentError> {
        match self.env.heaps() {
            [h] => Ok(h),
            [] => Err(FragmentError("no heap is declared".into())),
            _ => Err(FragmentError("more than one heap is declared".into())),
        }
    }

    pub fn to_smt2(&self) -> String {
        let mut commands = self.preamble.clone();
        commands.extend(
            self.literals
                .iter()
                .map(|l| Command::Assert(l.term().to_sexpr(&self.env))),
        );
        commands.push(Command::CheckSat);
        frontend::print_script(&commands)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    /// Search nodes visited, including the root.
    pub nodes: u64,
    /// Complete arrangements reached.
    pub leaves: u64,
    #[serde(serialize_with = "millis")]
    pub time: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Sat(Interpretation),
    Unsat,
    Unknown(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Verdict::Unsat)
    }

    pub fn model(&self) -> Option<&Interpretation> {
        match self {
            Verdict::Sat(m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: SolveStats,
}

#[cfg(test)]
mod tests;
