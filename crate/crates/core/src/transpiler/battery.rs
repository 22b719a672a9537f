//! The axiom battery under the array encoding: each axiom is stated in the
//! heap language, lowered, and evaluated exhaustively over small integer and
//! object universes.

use std::rc::Rc;

use super::{transpile_script, TranspileConfig, TranspileError};
use crate::elaborator::{elaborate_script, Env, Term, TermKind};
use crate::frontend::{self, Command};
use crate::semantics::{
    axiom_formula, AxiomId, AxiomReport, Bounds, Counterexample, EvalError, Evaluator, Interpretation, Value,
};

#[derive(Debug, thiserror::Error)]
pub enum BatteryError {
    #[error(transparent)]
    Transpile(#[from] TranspileError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error("the script declares no heap")]
    NoHeap,
}

/// Universe sizes for evaluating the lowered axioms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayBounds {
    /// Integers (sizes, addresses and array indices) range over `int_min..=int_max`.
    pub int_min: i64,
    pub int_max: i64,
    /// Number of object values.
    pub objects: usize,
}

impl Default for ArrayBounds {
    fn default() -> Self {
        ArrayBounds {
            int_min: -1,
            int_max: 2,
            objects: 2,
        }
    }
}

/// Lowered axiom together with the environment of the lowered script.
pub struct LoweredAxiom {
    pub env: Env,
    pub formula: Term,
    pub bounds: Bounds,
}

pub fn lower_axiom(
    declaration: &str,
    axiom: AxiomId,
    cfg: &TranspileConfig,
    ab: ArrayBounds,
) -> Result<LoweredAxiom, BatteryError> {
    let mut commands = frontend::parse_str(declaration).map_err(TranspileError::from)?;
    let source = elaborate_script(&commands).map_err(TranspileError::from)?;
    let sig = source.env.heaps().first().ok_or(BatteryError::NoHeap)?;
    let text = axiom_formula(&source.env, sig, axiom, ab.int_max.max(0) as u64);
    let formula = frontend::parse_sexpr(&text).map_err(TranspileError::from)?;
    commands.push(Command::Assert(formula));
    let lowered = transpile_script(&commands, cfg)?;
    let script = elaborate_script(&lowered).map_err(TranspileError::from)?;
    let formula = script.assertions().last().expect("axiom assertion").clone();
    let mut bounds = Bounds {
        int_min: ab.int_min,
        int_max: ab.int_max,
        ..Bounds::default()
    };
    if let Some(n) = sig.object_sort.name() {
        bounds.sort_limits.insert(n.to_string(), ab.objects);
    }
    Ok(LoweredAxiom {
        env: script.env,
        formula,
        bounds,
    })
}

/// Calls `f` on every tuple of the product; stops when `f` returns false.
fn for_each_tuple(universes: &[Rc<Vec<Value>>], mut f: impl FnMut(&[Value]) -> bool) {
    if universes.iter().any(|u| u.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; universes.len()];
    loop {
        let tuple: Vec<Value> = idx.iter().zip(universes).map(|(&i, u)| u[i].clone()).collect();
        if !f(&tuple) {
            return;
        }
        let mut k = idx.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < universes[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Checks one axiom under the array encoding. Free constants of the lowered
/// script (the unconstrained initial array in uncorrected mode) are
/// quantified universally alongside the axiom's own variables.
pub fn check_axiom_arrays(
    declaration: &str,
    axiom: AxiomId,
    cfg: &TranspileConfig,
    ab: ArrayBounds,
) -> Result<AxiomReport, BatteryError> {
    let l = lower_axiom(declaration, axiom, cfg, ab)?;
    let consts: Vec<(String, crate::elaborator::Sort)> = l
        .env
        .functions()
        .filter(|(_, f)| f.args.is_empty() && f.body.is_none())
        .map(|(n, f)| (n.clone(), f.result.clone()))
        .collect();
    let (vars, body) = match &l.formula.kind {
        TermKind::Forall(vars, body) => (vars.clone(), (**body).clone()),
        _ => (vec![], l.formula.clone()),
    };
    let probe = Interpretation::new(l.bounds.clone());
    let probe_eval = Evaluator::new(&l.env, &probe)?;
    let const_universes = consts
        .iter()
        .map(|(_, s)| probe_eval.universes().of(s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut instances = 0u64;
    let mut counterexample = None;
    let mut error = None;
    for_each_tuple(&const_universes, |cvals| {
        let mut interp = Interpretation::new(l.bounds.clone());
        for ((n, _), v) in consts.iter().zip(cvals) {
            interp = interp.with_const(n.clone(), v.clone());
        }
        let ev = match Evaluator::new(&l.env, &interp) {
            Ok(ev) => ev,
            Err(e) => {
                error = Some(e);
                return false;
            }
        };
        let var_universes = match vars
            .iter()
            .map(|(_, s)| ev.universes().of(s))
            .collect::<Result<Vec<_>, _>>()
        {
            Ok(u) => u,
            Err(e) => {
                error = Some(e);
                return false;
            }
        };
        let mut keep_going = true;
        for_each_tuple(&var_universes, |vvals| {
            instances += 1;
            let locals: Vec<(String, Value)> = vars.iter().map(|(n, _)| n.clone()).zip(vvals.iter().cloned()).collect();
            match ev.eval_with(&body, &locals) {
                Ok(Value::Bool(true)) => true,
                Ok(_) => {
                    let bindings = consts
                        .iter()
                        .map(|(n, _)| n.clone())
                        .zip(cvals.iter())
                        .chain(vars.iter().map(|(n, _)| n.clone()).zip(vvals.iter()))
                        .map(|(n, v)| (n, v.to_string()))
                        .collect();
                    counterexample = Some(Counterexample { bindings });
                    keep_going = false;
                    false
                }
                Err(e) => {
                    error = Some(e);
                    keep_going = false;
                    false
                }
            }
        });
        keep_going
    });
    if let Some(e) = error {
        return Err(e.into());
    }
    Ok(AxiomReport {
        axiom,
        instances,
        counterexample,
    })
}

pub fn check_all_arrays(
    declaration: &str,
    cfg: &TranspileConfig,
    ab: ArrayBounds,
) -> Result<Vec<AxiomReport>, BatteryError> {
    AxiomId::ALL
        .iter()
        .map(|&a| check_axiom_arrays(declaration, a, cfg, ab))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::BATTERY_DECLARATION;

    #[test]
    fn corrected_encoding_satisfies_every_axiom() {
        for r in check_all_arrays(BATTERY_DECLARATION, &TranspileConfig::default(), ArrayBounds::default()).unwrap() {
            assert!(r.passed(), "{}: {}", r.axiom, r.counterexample.unwrap());
            assert!(r.instances > 0, "{}", r.axiom);
        }
    }

    #[test]
    fn uncorrected_encoding_breaks_ext_and_cons() {
        let cfg = TranspileConfig::uncorrected();
        let ext = check_axiom_arrays(BATTERY_DECLARATION, AxiomId::Ext, &cfg, ArrayBounds::default()).unwrap();
        let cex = ext.counterexample.expect("ext must fail");
        assert!(cex.bindings.iter().any(|(n, _)| n == "h1"));
        let cons = check_axiom_arrays(BATTERY_DECLARATION, AxiomId::Cons, &cfg, ArrayBounds::default()).unwrap();
        let cex = cons.counterexample.expect("cons must fail");
        let p = &cex.bindings.iter().find(|(n, _)| n == "p").unwrap().1;
        assert!(p.starts_with("(- "), "expected a negative address, got {p}");
    }

    #[test]
    fn negative_sizes_break_roa1_without_guards() {
        let cfg = TranspileConfig::uncorrected();
        let r = check_axiom_arrays(BATTERY_DECLARATION, AxiomId::Roa1, &cfg, ArrayBounds::default()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn heap_eq_alone_keeps_negative_addresses() {
        let cfg = TranspileConfig {
            emit_wf_guards: false,
            ..TranspileConfig::default()
        };
        let r = check_axiom_arrays(BATTERY_DECLARATION, AxiomId::Cons, &cfg, ArrayBounds::default()).unwrap();
        assert!(!r.passed());
    }
}
