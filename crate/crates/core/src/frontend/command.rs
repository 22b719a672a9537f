use num_traits::ToPrimitive;

use super::lexer::Span;
use super::sexpr::SExpr;
use super::ParseError;

/// `(name arity)` entry of a datatype or heap declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortDec {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorDec {
    pub name: String,
    pub sort: SExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructorDec {
    pub name: String,
    pub selectors: Vec<SelectorDec>,
}

/// Payload of `(declare-heap Heap Addr Object defObj (sort_dec^n) (heap_datatype_dec^n))`.
///
/// Equality ignores `span`.
#[derive(Debug, Clone)]
pub struct HeapDeclSyntax {
    pub heap_sort: String,
    pub addr_sort: String,
    pub object_sort: SExpr,
    pub default_object: SExpr,
    pub sort_decs: Vec<SortDec>,
    pub datatypes: Vec<Vec<ConstructorDec>>,
    pub span: Span,
}

impl PartialEq for HeapDeclSyntax {
    fn eq(&self, o: &Self) -> bool {
        self.heap_sort == o.heap_sort
            && self.addr_sort == o.addr_sort
            && self.object_sort == o.object_sort
            && self.default_object == o.default_object
            && self.sort_decs == o.sort_decs
            && self.datatypes == o.datatypes
    }
}
impl Eq for HeapDeclSyntax {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedVar {
    pub name: String,
    pub sort: SExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    SetLogic(String),
    DeclareSort {
        name: String,
        arity: usize,
    },
    DeclareDatatypes {
        sorts: Vec<SortDec>,
        datatypes: Vec<Vec<ConstructorDec>>,
    },
    /// Singular `declare-datatype`; kept distinct so printing is faithful.
    DeclareDatatype {
        name: String,
        constructors: Vec<ConstructorDec>,
    },
    DeclareHeap(HeapDeclSyntax),
    DeclareFun {
        name: String,
        args: Vec<SExpr>,
        result: SExpr,
    },
    DeclareConst {
        name: String,
        sort: SExpr,
    },
    DefineFun {
        name: String,
        params: Vec<SortedVar>,
        result: SExpr,
        body: SExpr,
    },
    Assert(SExpr),
    CheckSat,
    GetModel,
    Exit,
    /// Any other command, kept verbatim.
    Opaque(SExpr),
}

/// Whether `declare-heap` is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dialect {
    #[default]
    Heap,
    /// Plain SMT-LIB: `declare-heap` is a syntax error.
    Plain,
}

fn err(span: Span, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        span,
        message: message.into(),
    }
}

fn symbol(e: &SExpr, what: &str) -> Result<String, ParseError> {
    e.as_symbol()
        .map(str::to_string)
        .ok_or_else(|| err(e.span, format!("expected {what} symbol, found `{e}`")))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
    e.as_list()
        .ok_or_else(|| err(e.span, format!("expected {what} list, found `{e}`")))
}

fn arity(e: &SExpr) -> Result<usize, ParseError> {
    e.as_numeral()
        .and_then(|n| n.to_usize())
        .ok_or_else(|| err(e.span, format!("expected arity numeral, found `{e}`")))
}

fn sort_dec(e: &SExpr) -> Result<SortDec, ParseError> {
    match list(e, "sort declaration")? {
        [name, n] => Ok(SortDec {
            name: symbol(name, "sort")?,
            arity: arity(n)?,
        }),
        _ => Err(err(e.span, "sort declaration must be `(<symbol> <numeral>)`")),
    }
}

fn constructor_dec(e: &SExpr) -> Result<ConstructorDec, ParseError> {
    let items = list(e, "constructor declaration")?;
    let (name, sels) = items
        .split_first()
        .ok_or_else(|| err(e.span, "empty constructor declaration"))?;
    let selectors = sels
        .iter()
        .map(|s| match list(s, "selector declaration")? {
            [n, sort] => Ok(SelectorDec {
                name: symbol(n, "selector")?,
                sort: sort.clone(),
            }),
            _ => Err(err(s.span, "selector declaration must be `(<symbol> <sort>)`")),
        })
        .collect::<Result<_, _>>()?;
    Ok(ConstructorDec {
        name: symbol(name, "constructor")?,
        selectors,
    })
}

fn datatype_dec(e: &SExpr) -> Result<Vec<ConstructorDec>, ParseError> {
    let items = list(e, "datatype declaration")?;
    if items.first().is_some_and(|h| h.is_symbol("par")) {
        return Err(err(
            e.span,
            "polymorphic (`par`) datatype declarations are not supported",
        ));
    }
    if items.is_empty() {
        return Err(err(e.span, "datatype declaration needs at least one constructor"));
    }
    items.iter().map(constructor_dec).collect()
}

fn sorted_var(e: &SExpr) -> Result<SortedVar, ParseError> {
    match list(e, "sorted variable")? {
        [n, sort] => Ok(SortedVar {
            name: symbol(n, "variable")?,
            sort: sort.clone(),
        }),
        _ => Err(err(e.span, "sorted variable must be `(<symbol> <sort>)`")),
    }
}

const HEAP_GRAMMAR: &str = "(declare-heap <symbol> <symbol> <sort> <term> (<sort_dec>^n) (<heap_datatype_dec>^n))";

fn heap_decl(e: &SExpr, args: &[SExpr]) -> Result<HeapDeclSyntax, ParseError> {
    let [heap, addr, obj, def, decs, dts] = args else {
        let what = if args.len() == 3 {
            "missing default-object term; "
        } else {
            ""
        };
        return Err(err(
            e.span,
            format!("{what}expected {HEAP_GRAMMAR}, got {} arguments", args.len()),
        ));
    };
    let sort_decs = list(decs, "sort declaration")?
        .iter()
        .map(sort_dec)
        .collect::<Result<Vec<_>, _>>()?;
    let datatypes = list(dts, "heap datatype declaration")?
        .iter()
        .map(|d| {
            let items = list(d, "heap datatype declaration")?;
            if items.is_empty() {
                return Err(err(
                    d.span,
                    "<heap_datatype_dec> ::= <constructor_dec>+ needs at least one constructor",
                ));
            }
            datatype_dec(d)
        })
        .collect::<Result<Vec<_>, _>>()?;
    if sort_decs.len() != datatypes.len() {
        return Err(err(
            e.span,
            format!(
                "{HEAP_GRAMMAR}: {} sort declarations but {} constructor lists",
                sort_decs.len(),
                datatypes.len()
            ),
        ));
    }
    Ok(HeapDeclSyntax {
        heap_sort: symbol(heap, "heap sort")?,
        addr_sort: symbol(addr, "address sort")?,
        object_sort: obj.clone(),
        default_object: def.clone(),
        sort_decs,
        datatypes,
        span: e.span,
    })
}

impl Command {
    /// Interprets one top-level s-expression.
    pub fn from_sexpr(e: &SExpr, dialect: Dialect) -> Result<Command, ParseError> {
        let items = list(e, "command")?;
        let Some((head, args)) = items.split_first() else {
            return Err(err(e.span, "empty command"));
        };
        let Some(name) = head.as_symbol() else {
            return Err(err(head.span, "command name must be a symbol"));
        };
        let cmd = match (name, args) {
            ("set-logic", [l]) => Command::SetLogic(symbol(l, "logic")?),
            ("declare-sort", [n, a]) => Command::DeclareSort {
                name: symbol(n, "sort")?,
                arity: arity(a)?,
            },
            ("declare-sort", [n]) => Command::DeclareSort {
                name: symbol(n, "sort")?,
                arity: 0,
            },
            ("declare-datatypes", [decs, dts]) => {
                let sorts = list(decs, "sort declaration")?
                    .iter()
                    .map(sort_dec)
                    .collect::<Result<Vec<_>, _>>()?;
                let datatypes = list(dts, "datatype declaration")?
                    .iter()
                    .map(datatype_dec)
                    .collect::<Result<Vec<_>, _>>()?;
                if sorts.len() != datatypes.len() {
                    return Err(err(
                        e.span,
                        format!(
                            "declare-datatypes: {} sort declarations but {} datatype declarations",
                            sorts.len(),
                            datatypes.len()
                        ),
                    ));
                }
                Command::DeclareDatatypes { sorts, datatypes }
            }
            ("declare-datatype", [n, dt]) => Command::DeclareDatatype {
                name: symbol(n, "sort")?,
                constructors: datatype_dec(dt)?,
            },
            ("declare-heap", _) if dialect == Dialect::Plain => {
                return Err(err(e.span, "declare-heap is not plain SMT-LIB"))
            }
            ("declare-heap", args) => Command::DeclareHeap(heap_decl(e, args)?),
            ("declare-fun", [n, a, r]) => Command::DeclareFun {
                name: symbol(n, "function")?,
                args: list(a, "argument sort")?.to_vec(),
                result: r.clone(),
            },
            ("declare-const", [n, s]) => Command::DeclareConst {
                name: symbol(n, "constant")?,
                sort: s.clone(),
            },
            ("define-fun", [n, ps, r, body]) => Command::DefineFun {
                name: symbol(n, "function")?,
                params: list(ps, "parameter")?
                    .iter()
                    .map(sorted_var)
                    .collect::<Result<_, _>>()?,
                result: r.clone(),
                body: body.clone(),
            },
            ("assert", [t]) => Command::Assert(t.clone()),
            ("check-sat", []) => Command::CheckSat,
            ("get-model", []) => Command::GetModel,
            ("exit", []) => Command::Exit,
            (
                "set-logic" | "declare-sort" | "declare-datatypes" | "declare-datatype" | "declare-fun"
                | "declare-const" | "define-fun" | "assert" | "check-sat" | "get-model" | "exit",
                _,
            ) => return Err(err(e.span, format!("malformed `{name}` command"))),
            _ => Command::Opaque(e.clone()),
        };
        Ok(cmd)
    }

    pub fn to_sexpr(&self) -> SExpr {
        fn sym(s: &str) -> SExpr {
            SExpr::symbol(s)
        }
        fn sort_decs(decs: &[SortDec]) -> SExpr {
            SExpr::list(
                decs.iter()
                    .map(|d| SExpr::list(vec![sym(&d.name), SExpr::numeral(d.arity as u64)]))
                    .collect(),
            )
        }
        fn ctors(cs: &[ConstructorDec]) -> SExpr {
            SExpr::list(
                cs.iter()
                    .map(|c| {
                        let mut items = vec![sym(&c.name)];
                        items.extend(
                            c.selectors
                                .iter()
                                .map(|s| SExpr::list(vec![sym(&s.name), s.sort.clone()])),
                        );
                        SExpr::list(items)
                    })
                    .collect(),
            )
        }
        match self {
            Command::SetLogic(l) => SExpr::app("set-logic", [sym(l)]),
            Command::DeclareSort { name, arity } => {
                SExpr::app("declare-sort", [sym(name), SExpr::numeral(*arity as u64)])
            }
            Command::DeclareDatatypes { sorts, datatypes } => SExpr::app(
                "declare-datatypes",
                [
                    sort_decs(sorts),
                    SExpr::list(datatypes.iter().map(|d| ctors(d)).collect()),
                ],
            ),
            Command::DeclareDatatype { name, constructors } => {
                SExpr::app("declare-datatype", [sym(name), ctors(constructors)])
            }
            Command::DeclareHeap(h) => SExpr::app(
                "declare-heap",
                [
                    sym(&h.heap_sort),
                    sym(&h.addr_sort),
                    h.object_sort.clone(),
                    h.default_object.clone(),
                    sort_decs(&h.sort_decs),
                    SExpr::list(h.datatypes.iter().map(|d| ctors(d)).collect()),
                ],
            ),
            Command::DeclareFun { name, args, result } => {
                SExpr::app("declare-fun", [sym(name), SExpr::list(args.clone()), result.clone()])
            }
            Command::DeclareConst { name, sort } => SExpr::app("declare-const", [sym(name), sort.clone()]),
            Command::DefineFun {
                name,
                params,
                result,
                body,
            } => SExpr::app(
                "define-fun",
                [
                    sym(name),
                    SExpr::list(
                        params
                            .iter()
                            .map(|p| SExpr::list(vec![sym(&p.name), p.sort.clone()]))
                            .collect(),
                    ),
                    result.clone(),
                    body.clone(),
                ],
            ),
            Command::Assert(t) => SExpr::app("assert", [t.clone()]),
            Command::CheckSat => SExpr::app("check-sat", []),
            Command::GetModel => SExpr::app("get-model", []),
            Command::Exit => SExpr::app("exit", []),
            Command::Opaque(e) => e.clone(),
        }
    }
}
