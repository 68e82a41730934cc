//! Upper bounds on program-length complexity.
//!
//! [`synthesize_min`] returns a witness program for a structure; its
//! length bounds the length of the shortest program from above.
//! [`exhaustive_min`] finds the true minimum for tiny structures and
//! serves as an oracle for the heuristic pipeline.

mod emit;
mod exhaustive;
mod extract;
mod fold;
mod split;

pub use emit::{cuboid_program, literal_program, moves_between};
pub use exhaustive::{exhaustive_min, Enumerator, DEFAULT_NODE_BUDGET};
pub use extract::extract_defs;
pub use fold::{fold_program, merge_moves, net_delta};

use std::collections::HashMap;

use serde::Serialize;

use crate::vm::{program_length, serialize, Axis, Program, VmError};
use crate::world::{Cell, Dims, VoxelStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Literal,
    Compressed,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityBound {
    pub program: Program,
    pub length: usize,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error("structure has {cells} cells, more than the limit of {limit}")]
    BudgetExceeded { cells: usize, limit: usize },
    #[error("enumeration budget of {budget} nodes exceeded")]
    EnumerationBudgetExceeded { budget: u64 },
    #[error("world dimensions must be positive")]
    InvalidDims,
    #[error("structure does not match the enumerator's world")]
    DimsMismatch,
    #[error(transparent)]
    Vm(#[from] VmError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisConfig {
    pub max_cells: usize,
    pub max_defs: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig { max_cells: 1_000_000, max_defs: 64 }
    }
}

pub fn synthesize_min(s: &VoxelStructure) -> Result<ComplexityBound, SynthesisError> {
    synthesize_with(s, &SynthesisConfig::default())
}

/// Runs literal emission, cuboid decomposition, loop folding and DEF
/// extraction. A pass result replaces its input only when strictly
/// shorter; the shortest program over both starting points wins, ties
/// going to the smaller canonical text. Structures with empty planes
/// across them are also split there, each side solved on its own and the
/// two programs joined by one run of moves.
pub fn synthesize_with(s: &VoxelStructure, config: &SynthesisConfig) -> Result<ComplexityBound, SynthesisError> {
    if s.len() > config.max_cells {
        return Err(SynthesisError::BudgetExceeded { cells: s.len(), limit: config.max_cells });
    }
    let mut solver = Solver { config, memo: HashMap::new(), splits_left: MAX_SPLITS };
    let best = solver.solve(s.cells().collect());
    Ok(ComplexityBound { length: best.length, program: best.program, method: best.method })
}

/// Cut candidates examined per top-level call.
const MAX_SPLITS: usize = 256;

#[derive(Clone)]
struct Found {
    length: usize,
    text: String,
    program: Program,
    method: Method,
}

impl Found {
    fn new(program: Program, method: Method) -> Self {
        Found { length: program_length(&program), text: serialize(&program), program, method }
    }

    fn beats(&self, other: &Found) -> bool {
        (self.length, &self.text) < (other.length, &other.text)
    }
}

struct Solver<'c> {
    config: &'c SynthesisConfig,
    memo: HashMap<Vec<Cell>, Found>,
    splits_left: usize,
}

impl Solver<'_> {
    fn solve(&mut self, cells: Vec<Cell>) -> Found {
        if let Some(f) = self.memo.get(&cells) {
            return f.clone();
        }
        let mut best = self.pipeline(&cells);
        for axis in Axis::ALL {
            for (k, left, right) in split::cuts(&cells, axis) {
                if self.splits_left == 0 {
                    break;
                }
                self.splits_left -= 1;
                let l = self.solve(left);
                let r = self.solve(right);
                let offset = Cell::new(0, 0, 0).with(axis.index(), k);
                let cand = Found::new(split::join(&l.program, offset, &r.program), Method::Compressed);
                if cand.beats(&best) {
                    best = cand;
                }
            }
        }
        self.memo.insert(cells, best.clone());
        best
    }

    fn pipeline(&self, cells: &[Cell]) -> Found {
        let hi = |f: fn(&Cell) -> i64| cells.iter().map(f).max().unwrap_or(0) as usize + 1;
        let dims = Dims::new(hi(|c| c.x), hi(|c| c.y), hi(|c| c.z));
        let s = VoxelStructure::from_cells(dims, cells.iter().copied()).expect("cells are inside their hull");
        let literal = literal_program(&s);
        let mut best = Found::new(literal.clone(), Method::Literal);
        for start in [literal, cuboid_program(&s)] {
            let mut chain = start;
            let folded = fold_program(&chain);
            if program_length(&folded) < program_length(&chain) {
                chain = folded;
            }
            let extracted = extract_defs(&chain, self.config.max_defs);
            if program_length(&extracted) < program_length(&chain) {
                chain = extracted;
            }
            let cand = Found::new(chain, Method::Compressed);
            if cand.beats(&best) {
                best = cand;
            }
        }
        best
    }
}

/// Difference of the two bounds in bytes.
pub fn relative_complexity(a: &VoxelStructure, b: &VoxelStructure) -> Result<i64, SynthesisError> {
    Ok(synthesize_min(a)?.length as i64 - synthesize_min(b)?.length as i64)
}

#[cfg(test)]
mod tests;
