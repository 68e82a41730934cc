//! The construction machine: a small DSL whose programs place voxels.
//!
//! Programs are parsed from text, measured by their canonical byte length
//! and executed deterministically against a bounded world. The cursor
//! starts at the origin; `CALL` runs a definition as a stamp, restoring
//! the cursor afterwards and scaling every move distance and fill extent
//! inside it.

mod ast;
mod exec;
mod parse;

pub use ast::{block_len, is_identifier, Axis, Instruction, Program};
pub use exec::{
    execute, execute_with_cursor, placement_bounds, run, Builder, ExecutionLimits, ExtentBuilder, GridBuilder,
};
pub use parse::parse;

use crate::world::Cell;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum VmError {
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Syntax { pos: usize, expected: String, found: String },
    #[error("unknown name `{name}`{}", pos.map(|p| format!(" at byte {p}")).unwrap_or_default())]
    UnknownName { name: String, pos: Option<usize> },
    #[error("`{name}` calls itself")]
    Recursion { name: String },
    #[error("bad literal{}: {message}", pos.map(|p| format!(" at byte {p}")).unwrap_or_default())]
    BadLiteral { pos: Option<usize>, message: String },
    #[error("`{name}` is defined twice")]
    DuplicateName { name: String },
    #[error("placement at {cell} is outside the world")]
    OutOfBounds { cell: Cell },
    #[error("placement budget of {limit} exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("call depth limit of {limit} exceeded")]
    DepthExceeded { limit: usize },
    #[error("world dimensions must be positive")]
    InvalidDims,
    #[error("execution limits must be positive")]
    InvalidLimits,
}

/// Canonical text of a program.
pub fn serialize(program: &Program) -> String {
    program.to_string()
}

/// Length of the canonical text in bytes.
pub fn program_length(program: &Program) -> usize {
    ast::block_len(&program.instructions)
}
