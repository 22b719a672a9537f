use num_bigint::BigInt;

use super::env::{Env, HEAP_FUNCTIONS};
use super::sort::{HeapId, Sort};
use super::term::{Op, Term, TermKind};
use super::{ElabError, ElabErrorKind};
use crate::frontend::{SExpr, SExprKind};

fn sort_err(e: &SExpr, message: impl Into<String>) -> ElabError {
    ElabError::new(ElabErrorKind::Sort, e.span, message)
}

fn unknown(e: &SExpr, name: &str) -> ElabError {
    ElabError::new(ElabErrorKind::UnknownSymbol, e.span, format!("unknown symbol `{name}`")).with_symbol(name)
}

fn unsupported(e: &SExpr, message: impl Into<String>) -> ElabError {
    ElabError::new(ElabErrorKind::Unsupported, e.span, message)
}

/// Variables in scope, innermost last.
pub type Context = Vec<(String, Sort)>;

impl Env {
    /// Type-checks a term. `ctx` holds bound variables and is restored on return.
    pub fn typecheck(&self, e: &SExpr, ctx: &mut Context) -> Result<Term, ElabError> {
        match &e.kind {
            SExprKind::Numeral(n) => Ok(Term::int(BigInt::from(n.clone()))),
            SExprKind::Symbol(s) => self.symbol_term(e, s, ctx),
            SExprKind::List(items) => self.list_term(e, items, ctx),
            SExprKind::Decimal(_) | SExprKind::Hexadecimal(_) | SExprKind::Binary(_) => {
                Err(unsupported(e, format!("literal `{e}` is outside the supported logic")))
            }
            SExprKind::Str(_) => Err(unsupported(e, "string literals are not supported")),
            SExprKind::Keyword(_) => Err(sort_err(e, format!("keyword `{e}` is not a term"))),
        }
    }

    /// Type-checks a closed formula.
    pub fn typecheck_formula(&self, e: &SExpr) -> Result<Term, ElabError> {
        let t = self.typecheck(e, &mut Vec::new())?;
        if t.sort != Sort::Bool {
            return Err(sort_err(
                e,
                format!("expected a formula of sort Bool, found `{}`", t.sort),
            ));
        }
        Ok(t)
    }

    fn symbol_term(&self, e: &SExpr, s: &str, ctx: &Context) -> Result<Term, ElabError> {
        if let Some((_, sort)) = ctx.iter().rev().find(|(n, _)| n == s) {
            return Ok(Term::var(s, sort.clone()));
        }
        match s {
            "true" => return Ok(Term::bool(true)),
            "false" => return Ok(Term::bool(false)),
            _ => {}
        }
        if let Some(f) = self.function(s) {
            if !f.args.is_empty() {
                return Err(sort_err(
                    e,
                    format!("function `{s}` expects {} arguments, got 0", f.args.len()),
                ));
            }
            return Ok(if f.body.is_some() {
                Term::app(Op::Apply(s.into()), vec![], f.result.clone())
            } else {
                Term::constant(s, f.result.clone())
            });
        }
        if let Some((dt, _, c)) = self.constructor(s) {
            if !c.fields.is_empty() {
                return Err(sort_err(
                    e,
                    format!("constructor `{s}` expects {} arguments, got 0", c.fields.len()),
                ));
            }
            return Ok(Term::app(Op::Constructor(s.into()), vec![], Sort::named(&dt.name)));
        }
        for sig in self.heaps() {
            if sig.empty_heap == s {
                return Ok(sig.empty());
            }
            if sig.null_address == s {
                return Ok(sig.null());
            }
        }
        Err(unknown(e, s))
    }

    fn args(&self, items: &[SExpr], ctx: &mut Context) -> Result<Vec<Term>, ElabError> {
        items.iter().map(|a| self.typecheck(a, ctx)).collect()
    }

    fn bind(&self, e: &SExpr, vars: &SExpr) -> Result<Vec<(String, Sort)>, ElabError> {
        let list = vars
            .as_list()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| sort_err(vars, "expected a non-empty list of sorted variables"))?;
        list.iter()
            .map(|v| match v.as_list() {
                Some([n, s]) => match n.as_symbol() {
                    Some(name) => Ok((name.to_string(), self.resolve_sort(s)?)),
                    None => Err(sort_err(n, "expected variable symbol")),
                },
                _ => Err(sort_err(v, format!("malformed binding in `{e}`"))),
            })
            .collect()
    }

    fn list_term(&self, e: &SExpr, items: &[SExpr], ctx: &mut Context) -> Result<Term, ElabError> {
        let Some((head, rest)) = items.split_first() else {
            return Err(sort_err(e, "empty application"));
        };
        if let Some(name) = head.as_symbol() {
            match name {
                "_" => return self.indexed_constant(e, rest),
                "as" => {
                    let [t, s] = rest else {
                        return Err(sort_err(e, "`as` expects a symbol and a sort"));
                    };
                    let sort = self.resolve_sort(s)?;
                    let term = self.typecheck(t, ctx)?;
                    if term.sort != sort {
                        return Err(sort_err(e, format!("`{t}` has sort `{}`, not `{sort}`", term.sort)));
                    }
                    return Ok(term);
                }
                "let" => {
                    let [binds, body] = rest else {
                        return Err(sort_err(e, "`let` expects bindings and a body"));
                    };
                    let binds = binds
                        .as_list()
                        .filter(|l| !l.is_empty())
                        .ok_or_else(|| sort_err(e, "`let` expects a non-empty binding list"))?;
                    let mut bound = Vec::new();
                    for b in binds {
                        let Some([n, t]) = b.as_list() else {
                            return Err(sort_err(b, "malformed `let` binding"));
                        };
                        let n = n.as_symbol().ok_or_else(|| sort_err(n, "expected variable symbol"))?;
                        bound.push((n.to_string(), self.typecheck(t, ctx)?));
                    }
                    let depth = ctx.len();
                    ctx.extend(bound.iter().map(|(n, t)| (n.clone(), t.sort.clone())));
                    let body = self.typecheck(body, ctx);
                    ctx.truncate(depth);
                    let body = body?;
                    let sort = body.sort.clone();
                    return Ok(Term::new(TermKind::Let(bound, Box::new(body)), sort));
                }
                "forall" | "exists" => {
                    let [vars, body_e] = rest else {
                        return Err(sort_err(e, format!("`{name}` expects variables and a body")));
                    };
                    let vars = self.bind(e, vars)?;
                    let depth = ctx.len();
                    ctx.extend(vars.iter().cloned());
                    let body = self.typecheck(body_e, ctx);
                    ctx.truncate(depth);
                    let body = body?;
                    if body.sort != Sort::Bool {
                        return Err(sort_err(body_e, "quantifier body must be Bool"));
                    }
                    let kind = if name == "forall" {
                        TermKind::Forall(vars, Box::new(body))
                    } else {
                        TermKind::Exists(vars, Box::new(body))
                    };
                    return Ok(Term::new(kind, Sort::Bool));
                }
                "!" => {
                    let Some(t) = rest.first() else {
                        return Err(sort_err(e, "`!` expects a term"));
                    };
                    return self.typecheck(t, ctx);
                }
                "match" => return Err(unsupported(e, "`match` is not supported")),
                _ => {}
            }
        }
        if rest.is_empty() {
            return Err(sort_err(e, format!("application `{e}` has no arguments")));
        }
        let args = self.args(rest, ctx)?;
        if let Some(head_items) = head.as_list() {
            return match head_items {
                [u, is, c] if u.is_symbol("_") && is.is_symbol("is") => {
                    let c = c.as_symbol().ok_or_else(|| sort_err(c, "expected constructor"))?;
                    self.tester(e, c, args)
                }
                [a, c, s] if a.is_symbol("as") && c.is_symbol("const") => {
                    let sort = self.resolve_sort(s)?;
                    let Sort::Array(_, el) = &sort else {
                        return Err(sort_err(s, format!("`as const` needs an array sort, got `{sort}`")));
                    };
                    if args.len() != 1 || &args[0].sort != el.as_ref() {
                        return Err(sort_err(
                            e,
                            format!("constant array of `{sort}` needs one argument of sort `{el}`"),
                        ));
                    }
                    Ok(Term::app(Op::ConstArray, args, sort))
                }
                _ => Err(unsupported(head, format!("unsupported function head `{head}`"))),
            };
        }
        let name = head
            .as_symbol()
            .ok_or_else(|| sort_err(head, format!("`{head}` is not a function symbol")))?;
        self.apply(e, name, args)
    }

    fn indexed_constant(&self, e: &SExpr, rest: &[SExpr]) -> Result<Term, ElabError> {
        if let [sym, idx] = rest {
            if let (Some(s), Some(i)) = (sym.as_symbol(), idx.as_numeral()) {
                if let Some(sig) = self.heaps().iter().find(|h| h.nth_address == s) {
                    return Ok(sig.nth(i.clone()));
                }
                return Err(unknown(e, s));
            }
        }
        Err(unsupported(e, format!("unsupported indexed identifier `{e}`")))
    }

    fn tester(&self, e: &SExpr, c: &str, args: Vec<Term>) -> Result<Term, ElabError> {
        let (dt, ci, _) = self.constructor(c).ok_or_else(|| unknown(e, c))?;
        if args.len() != 1 || args[0].sort != Sort::named(&dt.name) {
            return Err(sort_err(
                e,
                format!("tester for `{c}` expects one argument of sort `{}`", dt.name),
            ));
        }
        Ok(Term::app(
            Op::Tester {
                datatype: dt.name.clone(),
                constructor: ci,
            },
            args,
            Sort::Bool,
        ))
    }

    fn all_sort(&self, e: &SExpr, op: &str, args: &[Term], want: &Sort) -> Result<(), ElabError> {
        for a in args {
            if &a.sort != want {
                if self.is_address(&a.sort) && *want == Sort::Int {
                    return Err(sort_err(
                        e,
                        format!(
                            "`{op}`: no arithmetic on addresses (argument of address sort `{}`, expected `Int`)",
                            a.sort
                        ),
                    ));
                }
                return Err(sort_err(
                    e,
                    format!("`{op}` expects `{want}` but an argument has sort `{}`", a.sort),
                ));
            }
        }
        Ok(())
    }

    fn arity(e: &SExpr, op: &str, args: &[Term], ok: bool) -> Result<(), ElabError> {
        if ok {
            Ok(())
        } else {
            Err(sort_err(e, format!("`{op}` applied to {} arguments", args.len())))
        }
    }

    fn heap_id(&self, e: &SExpr, op: &str, t: &Term) -> Result<HeapId, ElabError> {
        self.heap_of_heap_sort(&t.sort).ok_or_else(|| {
            sort_err(
                e,
                format!("`{op}` expects a heap as first argument, found sort `{}`", t.sort),
            )
        })
    }

    fn apply(&self, e: &SExpr, name: &str, mut args: Vec<Term>) -> Result<Term, ElabError> {
        let n = args.len();
        let builtin = |op: Op, sort: Sort, args: Vec<Term>| Ok(Term::app(op, args, sort));
        match name {
            "not" => {
                Self::arity(e, name, &args, n == 1)?;
                self.all_sort(e, name, &args, &Sort::Bool)?;
                return builtin(Op::Not, Sort::Bool, args);
            }
            "and" | "or" | "xor" | "=>" => {
                Self::arity(e, name, &args, n >= 1 && (name != "=>" || n >= 2))?;
                self.all_sort(e, name, &args, &Sort::Bool)?;
                let op = match name {
                    "and" => Op::And,
                    "or" => Op::Or,
                    "xor" => Op::Xor,
                    _ => Op::Implies,
                };
                return builtin(op, Sort::Bool, args);
            }
            "=" | "distinct" => {
                Self::arity(e, name, &args, n >= 2)?;
                let s = args[0].sort.clone();
                if let Some(bad) = args.iter().find(|a| a.sort != s) {
                    return Err(sort_err(
                        e,
                        format!("`{name}` compares sort `{s}` with sort `{}`", bad.sort),
                    ));
                }
                let op = if name == "=" { Op::Eq } else { Op::Distinct };
                return builtin(op, Sort::Bool, args);
            }
            "ite" => {
                Self::arity(e, name, &args, n == 3)?;
                if args[0].sort != Sort::Bool {
                    return Err(sort_err(e, "`ite` condition must be Bool"));
                }
                if args[1].sort != args[2].sort {
                    return Err(sort_err(
                        e,
                        format!("`ite` branches have sorts `{}` and `{}`", args[1].sort, args[2].sort),
                    ));
                }
                let s = args[1].sort.clone();
                return builtin(Op::Ite, s, args);
            }
            "-" if n == 1 => {
                self.all_sort(e, name, &args, &Sort::Int)?;
                if let TermKind::Int(i) = &args[0].kind {
                    return Ok(Term::int(-i.clone()));
                }
                return builtin(Op::Neg, Sort::Int, args);
            }
            "+" | "-" | "*" | "div" | "mod" | "abs" => {
                Self::arity(
                    e,
                    name,
                    &args,
                    match name {
                        "div" | "mod" => n == 2,
                        "abs" => n == 1,
                        _ => n >= 2,
                    },
                )?;
                self.all_sort(e, name, &args, &Sort::Int)?;
                let op = match name {
                    "+" => Op::Add,
                    "-" => Op::Sub,
                    "*" => Op::Mul,
                    "div" => Op::Div,
                    "mod" => Op::Mod,
                    _ => Op::Abs,
                };
                return builtin(op, Sort::Int, args);
            }
            "<=" | "<" | ">=" | ">" => {
                Self::arity(e, name, &args, n >= 2)?;
                self.all_sort(e, name, &args, &Sort::Int)?;
                let op = match name {
                    "<=" => Op::Le,
                    "<" => Op::Lt,
                    ">=" => Op::Ge,
                    _ => Op::Gt,
                };
                return builtin(op, Sort::Bool, args);
            }
            "select" => {
                Self::arity(e, name, &args, n == 2)?;
                let Sort::Array(i, el) = args[0].sort.clone() else {
                    return Err(sort_err(e, format!("`select` on non-array sort `{}`", args[0].sort)));
                };
                if args[1].sort != *i {
                    return Err(sort_err(
                        e,
                        format!("`select` index has sort `{}`, expected `{i}`", args[1].sort),
                    ));
                }
                return builtin(Op::Select, *el, args);
            }
            "store" => {
                Self::arity(e, name, &args, n == 3)?;
                let Sort::Array(i, el) = args[0].sort.clone() else {
                    return Err(sort_err(e, format!("`store` on non-array sort `{}`", args[0].sort)));
                };
                if args[1].sort != *i || args[2].sort != *el {
                    return Err(sort_err(
                        e,
                        format!(
                            "`store` into `{}` with index `{}` and value `{}`",
                            args[0].sort, args[1].sort, args[2].sort
                        ),
                    ));
                }
                let s = args[0].sort.clone();
                return builtin(Op::Store, s, args);
            }
            _ => {}
        }
        if HEAP_FUNCTIONS.contains(&name) && !self.heaps().is_empty() {
            let id = self.heap_id(e, name, &args[0])?;
            let sig = self.heap(id);
            let want: Vec<Sort> = match name {
                "read" | "valid" => vec![sig.heap(), sig.addr()],
                "write" => vec![sig.heap(), sig.addr(), sig.object_sort.clone()],
                _ => vec![sig.heap(), sig.object_sort.clone()],
            };
            if args.len() != want.len() {
                return Err(sort_err(
                    e,
                    format!("`{name}` expects {} arguments, got {n}", want.len()),
                ));
            }
            for (a, w) in args.iter().zip(&want) {
                if &a.sort != w {
                    return Err(sort_err(
                        e,
                        format!("`{name}` expects sort `{w}` but the argument has sort `{}`", a.sort),
                    ));
                }
            }
            let mut it = args.drain(..);
            let (h, x) = (it.next().unwrap(), it.next().unwrap());
            let o = it.next();
            drop(it);
            return Ok(match name {
                "read" => sig.read(h, x),
                "valid" => sig.valid(h, x),
                "write" => sig.write(h, x, o.unwrap()),
                _ => sig.allocate(h, x),
            });
        }
        if let Some(c) = name.strip_prefix("is-") {
            if self.constructor(c).is_some() {
                return self.tester(e, c, args);
            }
        }
        if let Some((dt, _, c)) = self.constructor(name) {
            let want: Vec<&Sort> = c.fields.iter().map(|f| &f.sort).collect();
            if want.len() != n || args.iter().zip(&want).any(|(a, w)| &a.sort != *w) {
                let got: Vec<String> = args.iter().map(|a| a.sort.to_string()).collect();
                let want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
                return Err(sort_err(
                    e,
                    format!(
                        "constructor `{name}` expects ({}) but got ({})",
                        want.join(" "),
                        got.join(" ")
                    ),
                ));
            }
            return builtin(Op::Constructor(name.into()), Sort::named(&dt.name), args);
        }
        let candidates = self.selector_candidates(name);
        if !candidates.is_empty() {
            Self::arity(e, name, &args, n == 1)?;
            let arg_sort = &args[0].sort;
            let Some((dt, ci, fi)) = candidates
                .iter()
                .find(|(dt, _, _)| arg_sort.name() == Some(dt.as_str()))
            else {
                return Err(sort_err(
                    e,
                    format!("selector `{name}` is not defined on sort `{arg_sort}`"),
                ));
            };
            let sort = self.datatype(dt).unwrap().constructors[*ci].fields[*fi].sort.clone();
            return builtin(
                Op::Selector {
                    name: name.into(),
                    datatype: dt.clone(),
                    constructor: *ci,
                    field: *fi,
                },
                sort,
                args,
            );
        }
        if let Some(f) = self.function(name) {
            if f.args.len() != n || args.iter().zip(&f.args).any(|(a, w)| &a.sort != w) {
                let got: Vec<String> = args.iter().map(|a| a.sort.to_string()).collect();
                let want: Vec<String> = f.args.iter().map(|s| s.to_string()).collect();
                return Err(sort_err(
                    e,
                    format!(
                        "function `{name}` expects ({}) but got ({})",
                        want.join(" "),
                        got.join(" ")
                    ),
                ));
            }
            return if f.body.is_none() && n == 0 {
                Ok(Term::constant(name, f.result.clone()))
            } else {
                builtin(Op::Apply(name.into()), f.result.clone(), args)
            };
        }
        if self.sort_kind_of(name).is_some() {
            return Err(sort_err(e, format!("`{name}` is a sort, not a function")));
        }
        Err(unknown(e, name))
    }
}
