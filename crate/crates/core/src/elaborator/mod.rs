//! Sort tables, heap signatures and type checking.
//!
//! A script is elaborated command by command. Each `declare-heap` registers
//! its heap and address sorts, its object datatypes, the allocation-result
//! datatype, and the mangled nullary symbols (`empty<Heap>`, `null<Addr>`,
//! `(_ nth<Addr> i)`). `read`, `write`, `allocate` and `valid` are shared by
//! all heaps and resolved by the sort of their first argument.

mod env;
mod sort;
mod term;
mod typecheck;

pub use env::{
    mangle_names, Env, Function, HeapSignature, MangledNames, AR_ADDR_SELECTOR, AR_HEAP_SELECTOR, HEAP_FUNCTIONS,
};
pub use sort::{Constructor, Datatype, Field, HeapId, Sort, SortKind};
pub use term::{HeapOp, Op, Term, TermKind};
pub use typecheck::Context;

use std::fmt;

use crate::frontend::{self, Command, HeapDeclSyntax, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElabErrorKind {
    Declaration,
    Sort,
    UnknownSymbol,
    Unsupported,
    /// A heap symbol is used before the `declare-heap` that introduces it.
    Ordering,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElabError {
    pub kind: ElabErrorKind,
    pub span: Span,
    pub message: String,
    /// Offending symbol for unknown-symbol errors.
    pub symbol: Option<String>,
}

impl ElabError {
    pub fn new(kind: ElabErrorKind, span: Span, message: impl Into<String>) -> Self {
        ElabError {
            kind,
            span,
            message: message.into(),
            symbol: None,
        }
    }

    pub fn with_symbol(mut self, s: &str) -> Self {
        self.symbol = Some(s.to_string());
        self
    }
}

impl fmt::Display for ElabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ElabErrorKind::Declaration => "declaration error",
            ElabErrorKind::Sort => "sort error",
            ElabErrorKind::UnknownSymbol => "unknown symbol",
            ElabErrorKind::Unsupported => "unsupported",
            ElabErrorKind::Ordering => "ordering error",
        };
        write!(f, "{}: {what}: {}", self.span, self.message)
    }
}

impl std::error::Error for ElabError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ItemKind {
    /// Passed through without elaboration (`set-logic`, `check-sat`, opaque commands, ...).
    Other,
    DeclareSort(String),
    Datatypes(Vec<String>),
    Heap(HeapId),
    DeclareFun(String),
    DefineFun(String),
    Assert(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub command: Command,
    pub kind: ItemKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub env: Env,
    pub items: Vec<Item>,
}

impl Script {
    pub fn assertions(&self) -> impl Iterator<Item = &Term> {
        self.items.iter().filter_map(|i| match &i.kind {
            ItemKind::Assert(t) => Some(t),
            _ => None,
        })
    }
}

/// Symbols a heap declaration will introduce, excluding its shared operations.
fn introduced_symbols(d: &HeapDeclSyntax) -> Vec<String> {
    let m = mangle_names(&d.heap_sort, &d.addr_sort);
    let mut out = vec![
        d.heap_sort.clone(),
        d.addr_sort.clone(),
        m.empty_heap,
        m.null_address,
        m.nth_address,
        m.alloc_result_sort,
        m.alloc_result_ctor,
    ];
    out.extend(d.sort_decs.iter().map(|s| s.name.clone()));
    for dt in &d.datatypes {
        for c in dt {
            out.push(c.name.clone());
            out.push(format!("is-{}", c.name));
            out.extend(c.selectors.iter().map(|s| s.name.clone()));
        }
    }
    out
}

/// Best available source position of a command; commands do not carry their own.
fn command_span(c: &Command) -> Span {
    match c {
        Command::DeclareHeap(d) => d.span,
        Command::DeclareFun { result: e, .. }
        | Command::DeclareConst { sort: e, .. }
        | Command::DefineFun { body: e, .. }
        | Command::Assert(e)
        | Command::Opaque(e) => e.span,
        Command::DeclareDatatypes { datatypes, .. } => datatypes
            .first()
            .and_then(|d| d.first())
            .and_then(|c| c.selectors.first())
            .map(|s| s.sort.span)
            .unwrap_or_default(),
        _ => Span::default(),
    }
}

fn elaborate_command(env: &mut Env, c: &Command) -> Result<ItemKind, ElabError> {
    let span = command_span(c);
    Ok(match c {
        Command::DeclareSort { name, arity } => {
            env.declare_sort(name, *arity, span)?;
            ItemKind::DeclareSort(name.clone())
        }
        Command::DeclareDatatypes { sorts, datatypes } => {
            ItemKind::Datatypes(env.declare_datatypes(sorts, datatypes, span)?)
        }
        Command::DeclareDatatype { name, constructors } => {
            let dec = frontend::SortDec {
                name: name.clone(),
                arity: 0,
            };
            ItemKind::Datatypes(env.declare_datatypes(&[dec], std::slice::from_ref(constructors), span)?)
        }
        Command::DeclareHeap(d) => ItemKind::Heap(env.elaborate_heap_decl(d)?),
        Command::DeclareFun { name, args, result } => {
            let args = args
                .iter()
                .map(|a| env.resolve_sort(a))
                .collect::<Result<Vec<_>, _>>()?;
            let result = env.resolve_sort(result)?;
            env.declare_fun(name, args, result, span)?;
            ItemKind::DeclareFun(name.clone())
        }
        Command::DeclareConst { name, sort } => {
            let result = env.resolve_sort(sort)?;
            env.declare_fun(name, vec![], result, span)?;
            ItemKind::DeclareFun(name.clone())
        }
        Command::DefineFun {
            name,
            params,
            result,
            body,
        } => {
            let params = params
                .iter()
                .map(|p| Ok((p.name.clone(), env.resolve_sort(&p.sort)?)))
                .collect::<Result<Vec<_>, ElabError>>()?;
            let result_sort = env.resolve_sort(result)?;
            let mut ctx = params.clone();
            let t = env.typecheck(body, &mut ctx)?;
            if t.sort != result_sort {
                return Err(ElabError::new(
                    ElabErrorKind::Sort,
                    body.span,
                    format!("body of `{name}` has sort `{}`, declared `{result_sort}`", t.sort),
                ));
            }
            env.define_fun(name, params, result_sort, t, span)?;
            ItemKind::DefineFun(name.clone())
        }
        Command::Assert(t) => ItemKind::Assert(env.typecheck_formula(t)?),
        Command::SetLogic(_) | Command::CheckSat | Command::GetModel | Command::Exit | Command::Opaque(_) => {
            ItemKind::Other
        }
    })
}

/// Elaborates a whole script in order.
pub fn elaborate_script(commands: &[Command]) -> Result<Script, ElabError> {
    let mut env = Env::new();
    let mut items = Vec::new();
    for (i, c) in commands.iter().enumerate() {
        let kind = elaborate_command(&mut env, c).map_err(|e| {
            let later_heap = e.symbol.as_ref().and_then(|s| {
                commands[i + 1..].iter().find_map(|c| match c {
                    Command::DeclareHeap(d) if introduced_symbols(d).contains(s) => Some((s.clone(), d.span)),
                    _ => None,
                })
            });
            match later_heap {
                Some((s, at)) => ElabError::new(
                    ElabErrorKind::Ordering,
                    e.span,
                    format!("`{s}` is used before the heap declaration at {at} that introduces it"),
                )
                .with_symbol(&s),
                None => e,
            }
        })?;
        items.push(Item {
            command: c.clone(),
            kind,
        });
    }
    Ok(Script { env, items })
}

/// Parses and elaborates in one step.
pub fn elaborate_str(input: &str) -> Result<Script, Box<dyn std::error::Error + Send + Sync>> {
    let cmds = frontend::parse_str(input)?;
    Ok(elaborate_script(&cmds)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIST_HEAP: &str = "
(declare-heap Heap Addr Object O_Empty
  ((Object 0) (Node 0))
  (((O_Node (getNode Node)) (O_Empty))
   ((Node (val Int) (next Addr)))))
";

    fn script(extra: &str) -> Result<Script, ElabError> {
        elaborate_script(&frontend::parse_str(&format!("{LIST_HEAP}{extra}")).unwrap())
    }

    fn err(src: &str) -> ElabError {
        elaborate_script(&frontend::parse_str(src).unwrap()).unwrap_err()
    }

    #[test]
    fn heap_signature_names() {
        let s = script("").unwrap();
        let sig = &s.env.heaps()[0];
        assert_eq!(sig.alloc_result_sort, "AllocationResultHeap");
        assert_eq!(sig.null_address, "nullAddr");
        assert_eq!(sig.empty_heap, "emptyHeap");
        assert_eq!(sig.nth_address, "nthAddr");
        assert_eq!(sig.object_sort, Sort::named("Object"));
        assert_eq!(sig.datatypes, vec!["Object", "Node"]);
        let ar = s.env.datatype("AllocationResultHeap").unwrap();
        assert_eq!(ar.constructors.len(), 1);
        assert_eq!(ar.constructors[0].name, "AllocResultHeap");
        let sels: Vec<&str> = ar.constructors[0].fields.iter().map(|f| f.selector.as_str()).collect();
        assert_eq!(sels, ["_1", "_2"]);
    }

    #[test]
    fn typed_heap_operations() {
        let s = script(
            "(declare-const h Heap) (declare-const a Addr) (declare-const o Object)
             (assert (= (read h a) o))
             (assert (valid (write h a o) a))
             (assert (= ((_ is O_Node) o) (is-O_Empty o)))
             (assert (= (_2 (allocate h o)) (_ nthAddr 1)))
             (assert (= (_1 (allocate emptyHeap O_Empty)) h))",
        )
        .unwrap();
        let asserts: Vec<&Term> = s.assertions().collect();
        assert_eq!(asserts[0].args()[0].sort, Sort::named("Object"));
        assert_eq!(asserts[1].sort, Sort::Bool);
        let alloc = &asserts[3].args()[0].args()[0];
        assert_eq!(alloc.sort, Sort::named("AllocationResultHeap"));
    }

    #[test]
    fn address_arithmetic_rejected() {
        let e = script("(declare-const a Addr) (assert (= (+ a 1) 2))").unwrap_err();
        assert_eq!(e.kind, ElabErrorKind::Sort);
        assert!(e.message.contains("no arithmetic on addresses"), "{e}");
    }

    #[test]
    fn address_and_heap_sort_collide() {
        let e = err("(declare-heap H H O (O_E) ((O 0)) (((O_E))))");
        assert!(e.message.contains("collides with heap sort"), "{e}");
    }

    #[test]
    fn object_sort_equal_to_heap_sort() {
        let e = err("(declare-heap H A H (O_E) ((O 0)) (((O_E))))");
        assert!(e.message.contains("except the heap sort"), "{e}");
    }

    #[test]
    fn mangled_name_collision() {
        let e = err("(declare-fun nullAddr () Int) (declare-heap Heap Addr O O_E ((O 0)) (((O_E))))");
        assert!(e.message.contains("nullAddr"), "{e}");
    }

    #[test]
    fn heap_sort_not_storable() {
        let e = err("(declare-heap H A O O_E ((O 0)) (((O_E) (O_H (h H)))))");
        assert!(e.message.contains("cannot be stored"), "{e}");
    }

    #[test]
    fn object_sort_declared_before_heap() {
        let s = elaborate_script(
            &frontend::parse_str("(declare-datatypes ((O 0)) (((O_E) (O_I (i Int))))) (declare-heap H A O O_E () ())")
                .unwrap(),
        )
        .unwrap();
        assert_eq!(s.env.heaps()[0].object_sort, Sort::named("O"));
    }

    #[test]
    fn builtin_object_sort() {
        let s = elaborate_script(&frontend::parse_str("(declare-heap H A Int 0 () ())").unwrap()).unwrap();
        assert_eq!(s.env.heaps()[0].def_obj, Term::int(0));
    }

    #[test]
    fn default_object_is_state_free_and_well_sorted() {
        let e = err("(declare-heap H A Int true () ())");
        assert_eq!(e.kind, ElabErrorKind::Sort);
        let e = err("(declare-fun f (Int) Int) (declare-heap H A Int (f 0) () ())");
        assert!(e.message.contains("non-constant"), "{e}");
        let s = elaborate_str("(declare-sort O 0) (declare-const d O) (declare-heap H A O d () ())").unwrap();
        assert_eq!(s.env.heaps()[0].def_obj, Term::constant("d", Sort::named("O")));
        let e = err("(declare-heap H A Int x () ())");
        assert_eq!(e.kind, ElabErrorKind::UnknownSymbol);
    }

    #[test]
    fn cross_heap_application_is_a_sort_error() {
        let e = elaborate_script(
            &frontend::parse_str(
                "(declare-heap H1 A1 Int 0 () ()) (declare-heap H2 A2 Int 0 () ())
                 (declare-const h H1) (declare-const a A2) (assert (valid h a))",
            )
            .unwrap(),
        )
        .unwrap_err();
        assert!(e.message.contains("A1") && e.message.contains("A2"), "{e}");
    }

    #[test]
    fn use_before_heap_declaration() {
        let e = err("(declare-const h Heap) (declare-heap Heap Addr Int 0 () ())");
        assert_eq!(e.kind, ElabErrorKind::Ordering);
        let e = err("(assert (valid emptyHeap nullAddr)) (declare-heap Heap Addr Int 0 () ())");
        assert_eq!(e.kind, ElabErrorKind::Ordering);
    }

    #[test]
    fn non_well_founded_datatype() {
        let e = err("(declare-datatypes ((S 0)) (((mk (s S)))))");
        assert!(e.message.contains("well-founded"), "{e}");
    }

    #[test]
    fn arrays_of_addresses_rejected() {
        let e = script("(declare-const x (Array Int Addr))").unwrap_err();
        assert_eq!(e.kind, ElabErrorKind::Unsupported);
    }

    #[test]
    fn quantifiers_and_let() {
        let s = script(
            "(declare-fun I (Heap Addr) Bool)
             (assert (forall ((h Heap) (p Addr)) (=> (I h p) (let ((o (read h p))) (is-O_Node o)))))",
        )
        .unwrap();
        let t = s.assertions().next().unwrap();
        assert!(matches!(t.kind, TermKind::Forall(..)));
    }

    #[test]
    fn elaboration_is_deterministic() {
        let a = script("(declare-const h Heap)").unwrap();
        let b = script("(declare-const h Heap)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn terms_print_back() {
        let s = script(
            "(declare-const h Heap) (assert (= (read (write h (_ nthAddr 2) O_Empty) nullAddr) ((_ is O_Node) O_Empty)))",
        );
        // Sort error: Object vs Bool.
        assert!(s.is_err());
        let s = script(
            "(declare-const h Heap) (assert (not (= (read (write h (_ nthAddr 2) O_Empty) nullAddr) (O_Node (Node (- 3) nullAddr)))))",
        )
        .unwrap();
        let t = s.assertions().next().unwrap();
        assert_eq!(
            t.to_sexpr(&s.env).to_string(),
            "(not (= (read (write h (_ nthAddr 2) O_Empty) nullAddr) (O_Node (Node (- 3) nullAddr))))"
        );
    }
}
