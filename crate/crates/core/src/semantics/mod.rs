//! Reference semantics: heaps as finite sequences of objects, evaluated over
//! bounded universes.

pub mod axioms;
mod eval;
mod ops;
mod universe;
mod value;

pub use axioms::{
    axiom_formula, check_all, check_axiom, AxiomId, AxiomReport, BatteryBounds, ConcreteModel, Counterexample,
    HeapModel, BATTERY_DECLARATION,
};
pub use eval::{eval, Evaluator, FunctionTable, Interpretation, INTERPRETATION_VERSION};
pub use ops::{
    allocate_n, sem_allocate, sem_empty_heap, sem_nth_address, sem_null_address, sem_read, sem_valid, sem_write,
};
pub use universe::{designated_value, int_universe, Bounds, Universes};
pub use value::{AddressValue, ArrayValue, HeapValue, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no value assigned to `{0}`")]
    Unassigned(String),
    #[error("sort {0} has no finite universe")]
    NoUniverse(String),
    #[error("universe of sort {sort} has {size} values, more than the limit {limit}")]
    UniverseTooLarge { sort: String, size: usize, limit: usize },
    #[error("ill-typed value: {0}")]
    Type(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
