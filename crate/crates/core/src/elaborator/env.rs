use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use super::sort::{Constructor, Datatype, Field, HeapId, Sort, SortKind};
use super::term::{HeapOp, Op, Term};
use super::{ElabError, ElabErrorKind};
use crate::frontend::{ConstructorDec, HeapDeclSyntax, SExpr, SortDec, Span};

/// Operation names shared by every heap and resolved by argument sort.
pub const HEAP_FUNCTIONS: [&str; 4] = ["read", "write", "allocate", "valid"];

/// Selector names of every allocation-result datatype.
pub const AR_HEAP_SELECTOR: &str = "_1";
pub const AR_ADDR_SELECTOR: &str = "_2";

/// Generated names of one heap declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MangledNames {
    pub empty_heap: String,
    pub null_address: String,
    /// Indexed symbol, used as `(_ <nth_address> i)`.
    pub nth_address: String,
    pub alloc_result_sort: String,
    pub alloc_result_ctor: String,
}

pub fn mangle_names(heap_sort: &str, addr_sort: &str) -> MangledNames {
    MangledNames {
        empty_heap: format!("empty{heap_sort}"),
        null_address: format!("null{addr_sort}"),
        nth_address: format!("nth{addr_sort}"),
        alloc_result_sort: format!("AllocationResult{heap_sort}"),
        alloc_result_ctor: format!("AllocResult{heap_sort}"),
    }
}

/// The elaborated product of one `declare-heap`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapSignature {
    pub id: HeapId,
    pub heap_sort: String,
    pub addr_sort: String,
    pub object_sort: Sort,
    /// Closed term of `object_sort`.
    pub def_obj: Term,
    pub alloc_result_sort: String,
    pub alloc_result_ctor: String,
    pub empty_heap: String,
    pub null_address: String,
    pub nth_address: String,
    /// Datatypes declared inside the heap declaration, in order.
    pub datatypes: Vec<String>,
}

impl HeapSignature {
    pub fn heap(&self) -> Sort {
        Sort::named(&self.heap_sort)
    }

    pub fn addr(&self) -> Sort {
        Sort::named(&self.addr_sort)
    }

    pub fn alloc_result(&self) -> Sort {
        Sort::named(&self.alloc_result_sort)
    }

    fn op(&self, op: HeapOp, args: Vec<Term>, sort: Sort) -> Term {
        Term::app(Op::Heap(self.id, op), args, sort)
    }

    pub fn read(&self, h: Term, a: Term) -> Term {
        self.op(HeapOp::Read, vec![h, a], self.object_sort.clone())
    }

    pub fn write(&self, h: Term, a: Term, o: Term) -> Term {
        self.op(HeapOp::Write, vec![h, a, o], self.heap())
    }

    pub fn allocate(&self, h: Term, o: Term) -> Term {
        self.op(HeapOp::Allocate, vec![h, o], self.alloc_result())
    }

    pub fn valid(&self, h: Term, a: Term) -> Term {
        self.op(HeapOp::Valid, vec![h, a], Sort::Bool)
    }

    pub fn empty(&self) -> Term {
        self.op(HeapOp::EmptyHeap, vec![], self.heap())
    }

    pub fn null(&self) -> Term {
        self.op(HeapOp::NullAddress, vec![], self.addr())
    }

    pub fn nth(&self, i: impl Into<BigUint>) -> Term {
        self.op(HeapOp::NthAddress(i.into()), vec![], self.addr())
    }

    /// `ar._1`
    pub fn ar_heap(&self, ar: Term) -> Term {
        Term::app(
            Op::Selector {
                name: AR_HEAP_SELECTOR.into(),
                datatype: self.alloc_result_sort.clone(),
                constructor: 0,
                field: 0,
            },
            vec![ar],
            self.heap(),
        )
    }

    /// `ar._2`
    pub fn ar_addr(&self, ar: Term) -> Term {
        Term::app(
            Op::Selector {
                name: AR_ADDR_SELECTOR.into(),
                datatype: self.alloc_result_sort.clone(),
                constructor: 0,
                field: 1,
            },
            vec![ar],
            self.addr(),
        )
    }

    pub fn mk_alloc_result(&self, h: Term, a: Term) -> Term {
        Term::app(
            Op::Constructor(self.alloc_result_ctor.clone()),
            vec![h, a],
            self.alloc_result(),
        )
    }
}

/// A declared (`body: None`) or defined function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub args: Vec<Sort>,
    pub result: Sort,
    pub body: Option<(Vec<String>, Term)>,
}

/// Sort table and symbol table of an elaborated script.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Env {
    sorts: BTreeMap<String, SortKind>,
    datatypes: BTreeMap<String, Datatype>,
    /// constructor name → (datatype, index)
    constructors: BTreeMap<String, (String, usize)>,
    /// selector name → (datatype, constructor, field); several entries only for `_1`/`_2`.
    selectors: BTreeMap<String, Vec<(String, usize, usize)>>,
    functions: BTreeMap<String, Function>,
    heaps: Vec<HeapSignature>,
}

fn decl_err(span: Span, message: impl Into<String>) -> ElabError {
    ElabError::new(ElabErrorKind::Declaration, span, message)
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn heaps(&self) -> &[HeapSignature] {
        &self.heaps
    }

    pub fn heap(&self, id: HeapId) -> &HeapSignature {
        &self.heaps[id.0]
    }

    pub fn datatype(&self, name: &str) -> Option<&Datatype> {
        self.datatypes.get(name)
    }

    pub fn datatypes(&self) -> impl Iterator<Item = &Datatype> {
        self.datatypes.values()
    }

    pub fn constructor(&self, name: &str) -> Option<(&Datatype, usize, &Constructor)> {
        let (dt, i) = self.constructors.get(name)?;
        let dt = &self.datatypes[dt];
        Some((dt, *i, &dt.constructors[*i]))
    }

    pub fn selector_candidates(&self, name: &str) -> &[(String, usize, usize)] {
        self.selectors.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.get(name)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&String, &Function)> {
        self.functions.iter()
    }

    pub fn sort_kind_of(&self, name: &str) -> Option<SortKind> {
        self.sorts.get(name).copied()
    }

    pub fn sort_kind(&self, sort: &Sort) -> Option<SortKind> {
        sort.name().and_then(|n| self.sort_kind_of(n))
    }

    pub fn heap_of_heap_sort(&self, sort: &Sort) -> Option<HeapId> {
        match self.sort_kind(sort) {
            Some(SortKind::Heap(id)) => Some(id),
            _ => None,
        }
    }

    pub fn heap_of_addr_sort(&self, sort: &Sort) -> Option<HeapId> {
        match self.sort_kind(sort) {
            Some(SortKind::Address(id)) => Some(id),
            _ => None,
        }
    }

    pub fn is_address(&self, sort: &Sort) -> bool {
        self.heap_of_addr_sort(sort).is_some()
    }

    /// True if the sort is a heap, address or allocation-result sort, or contains one.
    pub fn mentions_heap_world(&self, sort: &Sort) -> bool {
        sort.mentions(&|s| {
            matches!(
                self.sort_kind(s),
                Some(SortKind::Heap(_) | SortKind::Address(_) | SortKind::AllocResult(_))
            )
        })
    }

    pub fn is_sort_taken(&self, name: &str) -> bool {
        self.sorts.contains_key(name) || ["Bool", "Int", "Array"].contains(&name)
    }

    /// True if `name` is bound in the function namespace.
    pub fn is_function_taken(&self, name: &str) -> bool {
        self.constructors.contains_key(name)
            || self.selectors.contains_key(name)
            || self.functions.contains_key(name)
            || self
                .heaps
                .iter()
                .any(|h| h.empty_heap == name || h.null_address == name || h.nth_address == name)
            || (!self.heaps.is_empty() && HEAP_FUNCTIONS.contains(&name))
            || ["true", "false"].contains(&name)
    }

    /// All symbols bound by the environment, for collision checks of generated names.
    pub fn all_symbols(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .sorts
            .keys()
            .chain(self.constructors.keys())
            .chain(self.selectors.keys())
            .chain(self.functions.keys())
            .cloned()
            .collect();
        for h in &self.heaps {
            out.extend([h.empty_heap.clone(), h.null_address.clone(), h.nth_address.clone()]);
        }
        out
    }

    pub fn resolve_sort(&self, e: &SExpr) -> Result<Sort, ElabError> {
        if let Some(name) = e.as_symbol() {
            return match name {
                "Bool" => Ok(Sort::Bool),
                "Int" => Ok(Sort::Int),
                _ if self.sorts.contains_key(name) => Ok(Sort::named(name)),
                _ => Err(
                    ElabError::new(ElabErrorKind::UnknownSymbol, e.span, format!("unknown sort `{name}`"))
                        .with_symbol(name),
                ),
            };
        }
        match e.as_list() {
            Some([head, i, el]) if head.is_symbol("Array") => {
                let (i, el) = (self.resolve_sort(i)?, self.resolve_sort(el)?);
                let sort = Sort::array(i, el);
                if sort.mentions(&|s| {
                    matches!(
                        self.sort_kind(s),
                        Some(SortKind::Heap(_) | SortKind::Address(_) | SortKind::AllocResult(_))
                    )
                }) {
                    return Err(ElabError::new(
                        ElabErrorKind::Unsupported,
                        e.span,
                        format!("arrays over heap or address sorts are not supported: `{sort}`"),
                    ));
                }
                Ok(sort)
            }
            _ => Err(ElabError::new(
                ElabErrorKind::Sort,
                e.span,
                format!("unsupported sort expression `{e}`"),
            )),
        }
    }

    fn fresh_symbol(&self, name: &str, span: Span, what: &str) -> Result<(), ElabError> {
        let taken = if what == "sort" {
            self.is_sort_taken(name)
        } else {
            self.is_function_taken(name)
        };
        if taken {
            return Err(decl_err(span, format!("{what} `{name}` is already declared")));
        }
        Ok(())
    }

    pub fn declare_sort(&mut self, name: &str, arity: usize, span: Span) -> Result<(), ElabError> {
        if arity != 0 {
            return Err(ElabError::new(
                ElabErrorKind::Unsupported,
                span,
                format!("parametric sort `{name}` (arity {arity}) is not supported"),
            ));
        }
        self.fresh_symbol(name, span, "sort")?;
        self.sorts.insert(name.to_string(), SortKind::Uninterpreted);
        Ok(())
    }

    pub fn declare_fun(&mut self, name: &str, args: Vec<Sort>, result: Sort, span: Span) -> Result<(), ElabError> {
        self.fresh_symbol(name, span, "function")?;
        self.functions.insert(
            name.to_string(),
            Function {
                args,
                result,
                body: None,
            },
        );
        Ok(())
    }

    pub fn define_fun(
        &mut self,
        name: &str,
        params: Vec<(String, Sort)>,
        result: Sort,
        body: Term,
        span: Span,
    ) -> Result<(), ElabError> {
        self.fresh_symbol(name, span, "function")?;
        let (names, sorts) = params.into_iter().unzip();
        self.functions.insert(
            name.to_string(),
            Function {
                args: sorts,
                result,
                body: Some((names, body)),
            },
        );
        Ok(())
    }

    /// Registers a block of mutually recursive datatypes. `extra_sorts` are
    /// registered first with the given kinds (used for heap and address sorts).
    fn declare_datatype_block(
        &mut self,
        sorts: &[SortDec],
        decls: &[Vec<ConstructorDec>],
        span: Span,
        field_check: &dyn Fn(&Env, &Sort) -> Option<String>,
    ) -> Result<Vec<String>, ElabError> {
        let mut seen = BTreeSet::new();
        for s in sorts {
            if s.arity != 0 {
                return Err(ElabError::new(
                    ElabErrorKind::Unsupported,
                    span,
                    format!("parametric datatype `{}` is not supported", s.name),
                ));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(decl_err(span, format!("sort `{}` declared twice", s.name)));
            }
            self.fresh_symbol(&s.name, span, "sort")?;
        }
        for s in sorts {
            self.sorts.insert(s.name.clone(), SortKind::Datatype);
        }
        let mut local_syms = BTreeSet::new();
        let mut built = Vec::new();
        for (s, ctors) in sorts.iter().zip(decls) {
            let mut constructors = Vec::new();
            for c in ctors {
                if !local_syms.insert(c.name.clone()) {
                    return Err(decl_err(span, format!("constructor `{}` declared twice", c.name)));
                }
                self.fresh_symbol(&c.name, span, "constructor")?;
                let mut fields = Vec::new();
                for sel in &c.selectors {
                    if !local_syms.insert(sel.name.clone()) {
                        return Err(decl_err(span, format!("selector `{}` declared twice", sel.name)));
                    }
                    self.fresh_symbol(&sel.name, sel.sort.span, "selector")?;
                    let sort = self.resolve_sort(&sel.sort)?;
                    if let Some(msg) = field_check(self, &sort) {
                        return Err(ElabError::new(
                            ElabErrorKind::Sort,
                            sel.sort.span,
                            format!("field `{}` of constructor `{}`: {msg}", sel.name, c.name),
                        ));
                    }
                    fields.push(Field {
                        selector: sel.name.clone(),
                        sort,
                    });
                }
                constructors.push(Constructor {
                    name: c.name.clone(),
                    fields,
                });
            }
            built.push(Datatype {
                name: s.name.clone(),
                constructors,
            });
        }
        for dt in built {
            self.insert_datatype(dt);
        }
        let names: Vec<String> = sorts.iter().map(|s| s.name.clone()).collect();
        if let Some(empty) = self.uninhabited(&names).into_iter().next() {
            return Err(decl_err(
                span,
                format!("datatype `{empty}` has no finite values (not well-founded)"),
            ));
        }
        Ok(names)
    }

    fn insert_datatype(&mut self, dt: Datatype) {
        for (ci, c) in dt.constructors.iter().enumerate() {
            self.constructors.insert(c.name.clone(), (dt.name.clone(), ci));
            for (fi, f) in c.fields.iter().enumerate() {
                self.selectors
                    .entry(f.selector.clone())
                    .or_default()
                    .push((dt.name.clone(), ci, fi));
            }
        }
        self.datatypes.insert(dt.name.clone(), dt);
    }

    /// Datatypes among `names` without a finite value.
    fn uninhabited(&self, names: &[String]) -> Vec<String> {
        let mut inhabited: BTreeSet<&str> = BTreeSet::new();
        loop {
            let before = inhabited.len();
            for n in names {
                let dt = &self.datatypes[n];
                if dt.constructors.iter().any(|c| {
                    c.fields.iter().all(|f| match &f.sort {
                        Sort::Named(s) if names.contains(s) => inhabited.contains(s.as_str()),
                        _ => true,
                    })
                }) {
                    inhabited.insert(n);
                }
            }
            if inhabited.len() == before {
                break;
            }
        }
        names
            .iter()
            .filter(|n| !inhabited.contains(n.as_str()))
            .cloned()
            .collect()
    }

    pub fn declare_datatypes(
        &mut self,
        sorts: &[SortDec],
        decls: &[Vec<ConstructorDec>],
        span: Span,
    ) -> Result<Vec<String>, ElabError> {
        self.declare_datatype_block(sorts, decls, span, &|_, _| None)
    }

    /// Elaborates one heap declaration: sorts, object datatypes, the
    /// allocation-result datatype, and finally the default object.
    pub fn elaborate_heap_decl(&mut self, decl: &HeapDeclSyntax) -> Result<HeapId, ElabError> {
        let span = decl.span;
        let (h, a) = (decl.heap_sort.as_str(), decl.addr_sort.as_str());
        if h == a {
            return Err(decl_err(
                span,
                format!("address sort name `{a}` collides with heap sort name `{h}`"),
            ));
        }
        if decl.object_sort.is_symbol(h) {
            return Err(decl_err(
                decl.object_sort.span,
                format!("object sort may be any sort except the heap sort `{h}`"),
            ));
        }
        let names = mangle_names(h, a);
        let generated = [
            ("heap sort", h.to_string(), true),
            ("address sort", a.to_string(), true),
            ("allocation result sort", names.alloc_result_sort.clone(), true),
            ("empty heap", names.empty_heap.clone(), false),
            ("null address", names.null_address.clone(), false),
            ("nth address", names.nth_address.clone(), false),
            ("allocation result constructor", names.alloc_result_ctor.clone(), false),
        ];
        let mut unique = BTreeSet::new();
        for (what, n, is_sort) in &generated {
            if !unique.insert((n.clone(), *is_sort)) {
                return Err(decl_err(span, format!("generated {what} name `{n}` collides")));
            }
            let taken = if *is_sort {
                self.is_sort_taken(n)
            } else {
                self.is_function_taken(n)
            };
            if taken {
                return Err(decl_err(
                    span,
                    format!("generated {what} name `{n}` collides with an existing symbol"),
                ));
            }
        }
        for f in HEAP_FUNCTIONS {
            if self.functions.contains_key(f) || self.constructors.contains_key(f) || self.selectors.contains_key(f) {
                return Err(decl_err(
                    span,
                    format!("heap operation `{f}` collides with an existing symbol"),
                ));
            }
        }
        for sel in [AR_HEAP_SELECTOR, AR_ADDR_SELECTOR] {
            let taken_by_user = self
                .selector_candidates(sel)
                .iter()
                .any(|(dt, _, _)| !matches!(self.sorts.get(dt), Some(SortKind::AllocResult(_))));
            if taken_by_user || self.functions.contains_key(sel) || self.constructors.contains_key(sel) {
                return Err(decl_err(
                    span,
                    format!("selector `{sel}` collides with an existing symbol"),
                ));
            }
        }

        let id = HeapId(self.heaps.len());
        let snapshot = self.clone();
        let result = (|| {
            self.sorts.insert(h.to_string(), SortKind::Heap(id));
            self.sorts.insert(a.to_string(), SortKind::Address(id));
            let heap_sort = Sort::named(h);
            let ar_name = names.alloc_result_sort.clone();
            let datatypes = self.declare_datatype_block(&decl.sort_decs, &decl.datatypes, span, &|env, s| {
                let is_heapish = |x: &Sort| {
                    x == &heap_sort || matches!(env.sort_kind(x), Some(SortKind::Heap(_) | SortKind::AllocResult(_)))
                };
                if s.mentions(&is_heapish) {
                    Some(format!("heap sort `{s}` cannot be stored in a heap object"))
                } else if matches!(env.sort_kind(s), Some(SortKind::Address(other)) if other != id) {
                    Some(format!("address sort `{s}` belongs to a different heap than `{h}`"))
                } else {
                    None
                }
            })?;
            let object_sort = self.resolve_sort(&decl.object_sort)?;
            if matches!(self.sort_kind(&object_sort), Some(SortKind::AllocResult(_))) {
                return Err(decl_err(
                    decl.object_sort.span,
                    format!("object sort `{object_sort}` cannot be an allocation result sort"),
                ));
            }
            self.sorts.insert(ar_name.clone(), SortKind::AllocResult(id));
            self.insert_datatype(Datatype {
                name: ar_name.clone(),
                constructors: vec![Constructor {
                    name: names.alloc_result_ctor.clone(),
                    fields: vec![
                        Field {
                            selector: AR_HEAP_SELECTOR.into(),
                            sort: Sort::named(h),
                        },
                        Field {
                            selector: AR_ADDR_SELECTOR.into(),
                            sort: Sort::named(a),
                        },
                    ],
                }],
            });
            // Registered with a placeholder default object so its own
            // nullary symbols resolve while typing the real one.
            self.heaps.push(HeapSignature {
                id,
                heap_sort: h.to_string(),
                addr_sort: a.to_string(),
                object_sort: object_sort.clone(),
                def_obj: Term::bool(false),
                alloc_result_sort: ar_name,
                alloc_result_ctor: names.alloc_result_ctor.clone(),
                empty_heap: names.empty_heap.clone(),
                null_address: names.null_address.clone(),
                nth_address: names.nth_address.clone(),
                datatypes,
            });
            let def_obj = self.typecheck(&decl.default_object, &mut Vec::new())?;
            if def_obj.sort != object_sort {
                return Err(ElabError::new(
                    ElabErrorKind::Sort,
                    decl.default_object.span,
                    format!(
                        "default object has sort `{}` but the object sort is `{object_sort}`",
                        def_obj.sort
                    ),
                ));
            }
            if def_obj.any(&|t| {
                matches!(
                    t.heap_op(),
                    Some((
                        _,
                        HeapOp::Read | HeapOp::Write | HeapOp::Allocate | HeapOp::Valid | HeapOp::EmptyHeap
                    ))
                ) || matches!(t.op(), Some(Op::Apply(_)))
            }) {
                return Err(decl_err(
                    decl.default_object.span,
                    "default object may not use heap operations or non-constant functions",
                ));
            }
            self.heaps[id.0].def_obj = def_obj;
            Ok(id)
        })();
        if result.is_err() {
            *self = snapshot;
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mangling_follows_sort_names() {
        let m = mangle_names("Heap", "A");
        assert_eq!(m.null_address, "nullA");
        assert_eq!(m.empty_heap, "emptyHeap");
        assert_eq!(m.alloc_result_sort, "AllocationResultHeap");
        assert_eq!(m.alloc_result_ctor, "AllocResultHeap");
        assert_eq!(m.nth_address, "nthA");
    }
}
