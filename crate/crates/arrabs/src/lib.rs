//! arrabs rewrites array-manipulating programs in a small C subset into
//! array-free, loop-free programs that off-the-shelf bounded model
//! checkers can verify. Each array is replaced by a nondeterministically
//! chosen witness index and a witness variable standing in for the tracked
//! element; loops are replaced by a single pass over their bodies with
//! modified variables havocked.
//!
//! The crate also ships the machinery used to gain confidence in the
//! rewrite: a precision classifier that tells which assertions cannot
//! produce false alarms, a concrete interpreter plus nondeterminism
//! enumerator used as a differential oracle, a seeded program generator,
//! and a harness that drives an external bounded model checker.

pub mod analysis;
pub mod ast;
pub mod bmc;
pub mod enumerate;
pub mod generator;
pub mod interp;
pub mod lexer;
pub mod oracle;
pub mod parser;
pub mod precision;
pub mod printer;
pub mod suite;
pub mod transform;
pub mod validate;

pub use ast::{Expr, Lval, Program, Span, Stmt};
pub use parser::{parse, parse_transformed, Diagnostic};
pub use printer::{emit, emit_with, EmitConfig};
pub use validate::{validate_transformed, ConformanceReport};
