//! Lowering of heap scripts to plain SMT-LIB over integers, arrays and
//! datatypes.
//!
//! Each heap becomes a record `(size Int) (contents (Array Int Object))`,
//! addresses become integers, and the heap operations become defined
//! functions. By default two corrections are applied on top of the plain
//! encoding: heap equality is replaced by `heapEq` (agreement on the
//! allocated range), and every quantified or free heap-world variable is
//! guarded by a well-formedness predicate (`size >= 0`, contents equal to the
//! default object outside the allocated range, addresses `>= 0`).
//! [`TranspileConfig::uncorrected`] turns both off and builds `emptyHeap` from
//! an unconstrained array.

pub mod battery;

use std::collections::BTreeSet;

use crate::elaborator::{
    elaborate_script, ElabError, Env, HeapId, HeapOp, ItemKind, Op, Sort, SortKind, Term, TermKind, AR_ADDR_SELECTOR,
    AR_HEAP_SELECTOR, HEAP_FUNCTIONS,
};
use crate::frontend::{self, Command, ConstructorDec, ParseError, SExpr, SelectorDec, SortDec, SortedVar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranspileConfig {
    pub emit_heap_eq: bool,
    pub emit_wf_guards: bool,
    /// Prepended to every generated symbol.
    pub prefix: String,
}

impl Default for TranspileConfig {
    fn default() -> Self {
        TranspileConfig {
            emit_heap_eq: true,
            emit_wf_guards: true,
            prefix: "enc.".into(),
        }
    }
}

impl TranspileConfig {
    /// The plain encoding without either correction.
    pub fn uncorrected() -> Self {
        TranspileConfig {
            emit_heap_eq: false,
            emit_wf_guards: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TranspileError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Elab(#[from] ElabError),
    #[error("generated symbol `{0}` collides with an existing symbol")]
    Collision(String),
    #[error("cannot transpile: {0}")]
    Untranspilable(String),
}

/// Generated symbols of one heap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapNames {
    pub record: String,
    pub record_ctor: String,
    pub size: String,
    pub contents: String,
    pub pair: String,
    pub pair_ctor: String,
    pub pair_heap: String,
    pub pair_addr: String,
    pub valid: String,
    pub read: String,
    pub write: String,
    pub allocate: String,
    pub empty: String,
    pub heap_eq: String,
    pub wf: String,
    /// Unconstrained array backing `emptyHeap` in uncorrected mode.
    pub init: String,
}

impl HeapNames {
    fn new(prefix: &str, heap: &str, pair: &str) -> Self {
        let p = |s: String| format!("{prefix}{s}");
        HeapNames {
            record: p(heap.to_string()),
            record_ctor: p(format!("{heap}Ctor")),
            size: p(format!("{heap}Size")),
            contents: p(format!("{heap}Contents")),
            pair: p(pair.to_string()),
            pair_ctor: p(format!("{pair}Ctor")),
            pair_heap: p(format!("{pair}Heap")),
            pair_addr: p(format!("{pair}Addr")),
            valid: p(format!("valid{heap}")),
            read: p(format!("read{heap}")),
            write: p(format!("write{heap}")),
            allocate: p(format!("allocate{heap}")),
            empty: p(format!("empty{heap}")),
            heap_eq: p(format!("heapEq{heap}")),
            wf: p(format!("wf{heap}")),
            init: p(format!("init{heap}")),
        }
    }

    fn all(&self) -> [&str; 16] {
        [
            &self.record,
            &self.record_ctor,
            &self.size,
            &self.contents,
            &self.pair,
            &self.pair_ctor,
            &self.pair_heap,
            &self.pair_addr,
            &self.valid,
            &self.read,
            &self.write,
            &self.allocate,
            &self.empty,
            &self.heap_eq,
            &self.wf,
            &self.init,
        ]
    }
}

/// Where every heap-world symbol goes: heap sort → record, address sort →
/// `Int`, allocation result → pair, operations → defined functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteMap {
    pub heaps: Vec<HeapNames>,
}

impl RewriteMap {
    pub fn new(env: &Env, cfg: &TranspileConfig) -> Result<Self, TranspileError> {
        let taken = env.all_symbols();
        let mut seen = BTreeSet::new();
        let heaps: Vec<HeapNames> = env
            .heaps()
            .iter()
            .map(|s| HeapNames::new(&cfg.prefix, &s.heap_sort, &s.alloc_result_sort))
            .collect();
        for n in heaps.iter().flat_map(|h| h.all()) {
            if taken.contains(n) || !seen.insert(n) {
                return Err(TranspileError::Collision(n.to_string()));
            }
        }
        Ok(RewriteMap { heaps })
    }

    pub fn names(&self, id: HeapId) -> &HeapNames {
        &self.heaps[id.0]
    }

    pub fn sort(&self, env: &Env, s: &Sort) -> SExpr {
        match s {
            Sort::Array(i, e) => SExpr::app("Array", [self.sort(env, i), self.sort(env, e)]),
            _ => match env.sort_kind(s) {
                Some(SortKind::Heap(id)) => SExpr::symbol(self.names(id).record.as_str()),
                Some(SortKind::Address(_)) => SExpr::symbol("Int"),
                Some(SortKind::AllocResult(id)) => SExpr::symbol(self.names(id).pair.as_str()),
                _ => s.to_sexpr(),
            },
        }
    }
}

/// Every symbol that only exists in the heap language.
pub fn heap_vocabulary(env: &Env) -> BTreeSet<String> {
    let mut v: BTreeSet<String> = HEAP_FUNCTIONS.iter().map(|s| s.to_string()).collect();
    v.extend(["declare-heap", AR_HEAP_SELECTOR, AR_ADDR_SELECTOR].map(String::from));
    for s in env.heaps() {
        v.extend([
            s.heap_sort.clone(),
            s.addr_sort.clone(),
            s.alloc_result_sort.clone(),
            s.alloc_result_ctor.clone(),
            s.empty_heap.clone(),
            s.null_address.clone(),
            s.nth_address.clone(),
            format!("is-{}", s.alloc_result_ctor),
        ]);
    }
    v
}

/// Symbols of `commands` that belong to `vocabulary`.
pub fn leaked_symbols(commands: &[Command], vocabulary: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for c in commands {
        c.to_sexpr().for_each_symbol(&mut |s| {
            if vocabulary.contains(s) {
                out.insert(s.to_string());
            }
        });
    }
    out
}

fn sym(s: &str) -> SExpr {
    SExpr::symbol(s)
}

fn and(mut xs: Vec<SExpr>) -> SExpr {
    match xs.len() {
        0 => sym("true"),
        1 => xs.pop().unwrap(),
        _ => SExpr::app("and", xs),
    }
}

fn int_sort() -> SExpr {
    sym("Int")
}

fn one() -> SExpr {
    SExpr::numeral(1u32)
}

fn def_fun(name: &str, params: &[(&str, SExpr)], result: SExpr, body: SExpr) -> Command {
    Command::DefineFun {
        name: name.to_string(),
        params: params
            .iter()
            .map(|(n, s)| SortedVar {
                name: n.to_string(),
                sort: s.clone(),
            })
            .collect(),
        result,
        body,
    }
}

/// Rewrites typed terms into the array vocabulary.
struct Rewriter<'a> {
    env: &'a Env,
    rm: &'a RewriteMap,
    cfg: &'a TranspileConfig,
}

impl Rewriter<'_> {
    fn rw(&self, t: &Term) -> SExpr {
        t.to_sexpr_with(self.env, &|u| self.special(u))
    }

    fn heap_eq(&self, id: HeapId, a: SExpr, b: SExpr) -> SExpr {
        if self.cfg.emit_heap_eq {
            SExpr::app(&self.rm.names(id).heap_eq, [a, b])
        } else {
            SExpr::app("=", [a, b])
        }
    }

    /// Equality at sort `s`, or `None` when plain `=` is right.
    fn equality(&self, s: &Sort, a: SExpr, b: SExpr) -> Option<SExpr> {
        if !self.cfg.emit_heap_eq {
            return None;
        }
        match self.env.sort_kind(s) {
            Some(SortKind::Heap(id)) => Some(self.heap_eq(id, a, b)),
            Some(SortKind::AllocResult(id)) => {
                let n = self.rm.names(id);
                Some(and(vec![
                    self.heap_eq(
                        id,
                        SExpr::app(&n.pair_heap, [a.clone()]),
                        SExpr::app(&n.pair_heap, [b.clone()]),
                    ),
                    SExpr::app("=", [SExpr::app(&n.pair_addr, [a]), SExpr::app(&n.pair_addr, [b])]),
                ]))
            }
            _ => None,
        }
    }

    /// Well-formedness of a value of sort `s`, if any is needed.
    fn guard(&self, s: &Sort, x: SExpr) -> Option<SExpr> {
        if !self.cfg.emit_wf_guards {
            return None;
        }
        match self.env.sort_kind(s) {
            Some(SortKind::Heap(id)) => Some(SExpr::app(&self.rm.names(id).wf, [x])),
            Some(SortKind::Address(_)) => Some(SExpr::app(">=", [x, SExpr::numeral(0u32)])),
            Some(SortKind::AllocResult(id)) => {
                let n = self.rm.names(id);
                Some(and(vec![
                    SExpr::app(&n.wf, [SExpr::app(&n.pair_heap, [x.clone()])]),
                    SExpr::app(">=", [SExpr::app(&n.pair_addr, [x]), SExpr::numeral(0u32)]),
                ]))
            }
            _ => None,
        }
    }

    fn special(&self, t: &Term) -> Option<SExpr> {
        match &t.kind {
            TermKind::Forall(vars, body) | TermKind::Exists(vars, body) => {
                let forall = matches!(t.kind, TermKind::Forall(..));
                let binders = SExpr::list(
                    vars.iter()
                        .map(|(n, s)| SExpr::list(vec![sym(n), self.rm.sort(self.env, s)]))
                        .collect(),
                );
                let guards: Vec<SExpr> = vars.iter().filter_map(|(n, s)| self.guard(s, sym(n))).collect();
                let body = self.rw(body);
                let body = match (guards.is_empty(), forall) {
                    (true, _) => body,
                    (false, true) => SExpr::app("=>", [and(guards), body]),
                    (false, false) => {
                        let mut g = guards;
                        g.push(body);
                        and(g)
                    }
                };
                Some(SExpr::app(if forall { "forall" } else { "exists" }, [binders, body]))
            }
            TermKind::App(op, args) => self.special_app(op, args),
            _ => None,
        }
    }

    fn special_app(&self, op: &Op, args: &[Term]) -> Option<SExpr> {
        let rw_args = || args.iter().map(|a| self.rw(a)).collect::<Vec<_>>();
        match op {
            Op::Heap(id, h) => {
                let n = self.rm.names(*id);
                let a = rw_args();
                Some(match h {
                    HeapOp::Read => SExpr::app(&n.read, a),
                    HeapOp::Write => SExpr::app(&n.write, a),
                    HeapOp::Allocate => SExpr::app(&n.allocate, a),
                    HeapOp::Valid => SExpr::app(&n.valid, a),
                    HeapOp::EmptyHeap => sym(&n.empty),
                    HeapOp::NullAddress => SExpr::numeral(0u32),
                    HeapOp::NthAddress(i) => SExpr::numeral(i.clone()),
                })
            }
            Op::Eq if args.len() >= 2 => {
                let a = rw_args();
                let parts: Vec<SExpr> = a
                    .windows(2)
                    .map(|w| self.equality(&args[0].sort, w[0].clone(), w[1].clone()))
                    .collect::<Option<_>>()?;
                Some(and(parts))
            }
            Op::Distinct if args.len() >= 2 => {
                let a = rw_args();
                let mut parts = vec![];
                for i in 0..a.len() {
                    for j in i + 1..a.len() {
                        let e = self.equality(&args[0].sort, a[i].clone(), a[j].clone())?;
                        parts.push(SExpr::app("not", [e]));
                    }
                }
                Some(and(parts))
            }
            Op::Selector { datatype, field, .. } => {
                let Some(SortKind::AllocResult(id)) = self.env.sort_kind_of(datatype) else {
                    return None;
                };
                let n = self.rm.names(id);
                let sel = if *field == 0 { &n.pair_heap } else { &n.pair_addr };
                Some(SExpr::app(sel, rw_args()))
            }
            Op::Constructor(c) => {
                let (dt, _, _) = self.env.constructor(c)?;
                let Some(SortKind::AllocResult(id)) = self.env.sort_kind_of(&dt.name) else {
                    return None;
                };
                Some(SExpr::app(&self.rm.names(id).pair_ctor, rw_args()))
            }
            Op::Tester { datatype, .. } => {
                let Some(SortKind::AllocResult(id)) = self.env.sort_kind_of(datatype) else {
                    return None;
                };
                let tester = SExpr::app("_", [sym("is"), sym(&self.rm.names(id).pair_ctor)]);
                let mut items = vec![tester];
                items.extend(rw_args());
                Some(SExpr::list(items))
            }
            _ => None,
        }
    }

    fn involves_heaps(&self, t: &Term) -> bool {
        t.any(&|u| {
            self.env.mentions_heap_world(&u.sort)
                || u.heap_op().is_some()
                || match &u.kind {
                    TermKind::Forall(vs, _) | TermKind::Exists(vs, _) => {
                        vs.iter().any(|(_, s)| self.env.mentions_heap_world(s))
                    }
                    _ => false,
                }
        })
    }
}

/// Rewrites one elaborated term. Free constants are not guarded here; see
/// [`transpile_script`].
pub fn rewrite_term(env: &Env, rm: &RewriteMap, cfg: &TranspileConfig, t: &Term) -> SExpr {
    Rewriter { env, rm, cfg }.rw(t)
}

fn datatype_block(env: &Env, rm: &RewriteMap, names: &[String]) -> Command {
    let sorts = names
        .iter()
        .map(|n| SortDec {
            name: n.clone(),
            arity: 0,
        })
        .collect();
    let datatypes = names
        .iter()
        .map(|n| {
            env.datatype(n)
                .expect("registered datatype")
                .constructors
                .iter()
                .map(|c| ConstructorDec {
                    name: c.name.clone(),
                    selectors: c
                        .fields
                        .iter()
                        .map(|f| SelectorDec {
                            name: f.selector.clone(),
                            sort: rm.sort(env, &f.sort),
                        })
                        .collect(),
                })
                .collect()
        })
        .collect();
    Command::DeclareDatatypes { sorts, datatypes }
}

/// The preamble for one heap: object datatypes, record and pair datatypes,
/// and the defined operations.
pub fn transpile_heap_decl(env: &Env, id: HeapId, rm: &RewriteMap, cfg: &TranspileConfig) -> Vec<Command> {
    let sig = env.heap(id);
    let n = rm.names(id);
    let r = Rewriter { env, rm, cfg };
    let obj = rm.sort(env, &sig.object_sort);
    let def = r.rw(&sig.def_obj);
    let rec = || sym(&n.record);
    let arr = || SExpr::app("Array", [int_sort(), obj.clone()]);
    let size = |h: &str| SExpr::app(&n.size, [sym(h)]);
    let contents = |h: &str| SExpr::app(&n.contents, [sym(h)]);
    let size_plus_one = || SExpr::app("+", [size("h"), one()]);

    let mut out = vec![];
    if !sig.datatypes.is_empty() {
        out.push(datatype_block(env, rm, &sig.datatypes));
    }
    out.push(Command::DeclareDatatypes {
        sorts: vec![
            SortDec {
                name: n.record.clone(),
                arity: 0,
            },
            SortDec {
                name: n.pair.clone(),
                arity: 0,
            },
        ],
        datatypes: vec![
            vec![ConstructorDec {
                name: n.record_ctor.clone(),
                selectors: vec![
                    SelectorDec {
                        name: n.size.clone(),
                        sort: int_sort(),
                    },
                    SelectorDec {
                        name: n.contents.clone(),
                        sort: arr(),
                    },
                ],
            }],
            vec![ConstructorDec {
                name: n.pair_ctor.clone(),
                selectors: vec![
                    SelectorDec {
                        name: n.pair_heap.clone(),
                        sort: rec(),
                    },
                    SelectorDec {
                        name: n.pair_addr.clone(),
                        sort: int_sort(),
                    },
                ],
            }],
        ],
    });
    out.push(def_fun(
        &n.valid,
        &[("h", rec()), ("p", int_sort())],
        sym("Bool"),
        SExpr::app(
            "and",
            [
                SExpr::app("<", [SExpr::numeral(0u32), sym("p")]),
                SExpr::app("<=", [sym("p"), size("h")]),
            ],
        ),
    ));
    let valid_hp = || SExpr::app(&n.valid, [sym("h"), sym("p")]);
    out.push(def_fun(
        &n.read,
        &[("h", rec()), ("p", int_sort())],
        obj.clone(),
        SExpr::app(
            "ite",
            [valid_hp(), SExpr::app("select", [contents("h"), sym("p")]), def.clone()],
        ),
    ));
    out.push(def_fun(
        &n.write,
        &[("h", rec()), ("p", int_sort()), ("o", obj.clone())],
        rec(),
        SExpr::app(
            "ite",
            [
                valid_hp(),
                SExpr::app(
                    &n.record_ctor,
                    [size("h"), SExpr::app("store", [contents("h"), sym("p"), sym("o")])],
                ),
                sym("h"),
            ],
        ),
    ));
    out.push(def_fun(
        &n.allocate,
        &[("h", rec()), ("o", obj.clone())],
        sym(&n.pair),
        SExpr::app(
            &n.pair_ctor,
            [
                SExpr::app(
                    &n.record_ctor,
                    [
                        size_plus_one(),
                        SExpr::app("store", [contents("h"), size_plus_one(), sym("o")]),
                    ],
                ),
                size_plus_one(),
            ],
        ),
    ));
    let empty_contents = if cfg.emit_wf_guards {
        SExpr::list(vec![SExpr::app("as", [sym("const"), arr()]), def.clone()])
    } else {
        out.push(Command::DeclareConst {
            name: n.init.clone(),
            sort: arr(),
        });
        sym(&n.init)
    };
    out.push(def_fun(
        &n.empty,
        &[],
        rec(),
        SExpr::app(&n.record_ctor, [SExpr::numeral(0u32), empty_contents]),
    ));
    let in_range = |h: &str| {
        SExpr::app(
            "and",
            [
                SExpr::app("<=", [one(), sym("i")]),
                SExpr::app("<=", [sym("i"), size(h)]),
            ],
        )
    };
    let forall_i = |body: SExpr| {
        SExpr::app(
            "forall",
            [SExpr::list(vec![SExpr::list(vec![sym("i"), int_sort()])]), body],
        )
    };
    let at = |h: &str| SExpr::app("select", [contents(h), sym("i")]);
    if cfg.emit_heap_eq {
        out.push(def_fun(
            &n.heap_eq,
            &[("h1", rec()), ("h2", rec())],
            sym("Bool"),
            SExpr::app(
                "and",
                [
                    SExpr::app("=", [size("h1"), size("h2")]),
                    forall_i(SExpr::app(
                        "=>",
                        [in_range("h1"), SExpr::app("=", [at("h1"), at("h2")])],
                    )),
                ],
            ),
        ));
    }
    if cfg.emit_wf_guards {
        out.push(def_fun(
            &n.wf,
            &[("h", rec())],
            sym("Bool"),
            SExpr::app(
                "and",
                [
                    SExpr::app(">=", [size("h"), SExpr::numeral(0u32)]),
                    forall_i(SExpr::app(
                        "or",
                        [in_range("h"), SExpr::app("=", [at("h"), def.clone()])],
                    )),
                ],
            ),
        ));
    }
    out
}

/// Lowers a whole script. Commands that do not touch the heap world are
/// passed through unchanged.
pub fn transpile_script(commands: &[Command], cfg: &TranspileConfig) -> Result<Vec<Command>, TranspileError> {
    let script = elaborate_script(commands)?;
    let env = &script.env;
    if env.heaps().is_empty() {
        return Ok(commands.to_vec());
    }
    let rm = RewriteMap::new(env, cfg)?;
    let r = Rewriter { env, rm: &rm, cfg };
    let mut out = vec![];
    for item in &script.items {
        match &item.kind {
            ItemKind::Heap(id) => out.extend(transpile_heap_decl(env, *id, &rm, cfg)),
            ItemKind::Datatypes(names) => {
                let touches = names.iter().any(|n| {
                    env.datatype(n).is_some_and(|d| {
                        d.constructors
                            .iter()
                            .any(|c| c.fields.iter().any(|f| env.mentions_heap_world(&f.sort)))
                    })
                });
                if !touches {
                    out.push(item.command.clone());
                    continue;
                }
                for n in names {
                    for c in &env.datatype(n).expect("registered datatype").constructors {
                        for f in &c.fields {
                            let bad = f.sort.mentions(&|s| {
                                matches!(
                                    env.sort_kind(s),
                                    Some(SortKind::Heap(_)) | Some(SortKind::AllocResult(_))
                                )
                            });
                            if bad {
                                return Err(TranspileError::Untranspilable(format!(
                                    "field `{}` of datatype `{n}` stores a heap",
                                    f.selector
                                )));
                            }
                        }
                    }
                }
                out.push(datatype_block(env, &rm, names));
            }
            ItemKind::DeclareFun(name) => {
                let f = env.function(name).expect("declared function");
                if !f.args.iter().chain([&f.result]).any(|s| env.mentions_heap_world(s)) {
                    out.push(item.command.clone());
                    continue;
                }
                let args: Vec<SExpr> = f.args.iter().map(|s| rm.sort(env, s)).collect();
                let result = rm.sort(env, &f.result);
                out.push(match &item.command {
                    Command::DeclareConst { .. } => Command::DeclareConst {
                        name: name.clone(),
                        sort: result,
                    },
                    _ => Command::DeclareFun {
                        name: name.clone(),
                        args: args.clone(),
                        result,
                    },
                });
                let vars: Vec<String> = (0..f.args.len()).map(|i| format!("x!{i}")).collect();
                let app = if vars.is_empty() {
                    sym(name)
                } else {
                    SExpr::app(name, vars.iter().map(|v| sym(v)))
                };
                if let Some(g) = r.guard(&f.result, app) {
                    let g = if vars.is_empty() {
                        g
                    } else {
                        let binders = vars
                            .iter()
                            .zip(&args)
                            .map(|(v, s)| SExpr::list(vec![sym(v), s.clone()]))
                            .collect();
                        SExpr::app("forall", [SExpr::list(binders), g])
                    };
                    out.push(Command::Assert(g));
                }
            }
            ItemKind::DefineFun(name) => {
                let f = env.function(name).expect("defined function");
                let (params, body) = f.body.as_ref().expect("function body");
                if !f.args.iter().chain([&f.result]).any(|s| env.mentions_heap_world(s)) && !r.involves_heaps(body) {
                    out.push(item.command.clone());
                    continue;
                }
                out.push(Command::DefineFun {
                    name: name.clone(),
                    params: params
                        .iter()
                        .zip(&f.args)
                        .map(|(p, s)| SortedVar {
                            name: p.clone(),
                            sort: rm.sort(env, s),
                        })
                        .collect(),
                    result: rm.sort(env, &f.result),
                    body: r.rw(body),
                });
            }
            ItemKind::Assert(t) => {
                if r.involves_heaps(t) {
                    out.push(Command::Assert(r.rw(t)));
                } else {
                    out.push(item.command.clone());
                }
            }
            ItemKind::DeclareSort(_) | ItemKind::Other => out.push(item.command.clone()),
        }
    }
    Ok(out)
}

/// Parses, lowers and prints.
pub fn transpile_str(input: &str, cfg: &TranspileConfig) -> Result<String, TranspileError> {
    let commands = frontend::parse_str(input)?;
    Ok(frontend::print_script(&transpile_script(&commands, cfg)?))
}

#[cfg(test)]
mod tests;
