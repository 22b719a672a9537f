//! Toolkit for the SMT-LIB theory of heap.

pub mod elaborator;
pub mod frontend;
pub mod redgen;
pub mod semantics;
pub mod solver;
pub mod transpiler;
