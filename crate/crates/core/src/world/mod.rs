//! Voxel structures and the functional analyses used as design constraints.

mod constraints;
mod enclosure;
mod io;
mod stability;
mod structure;

pub use constraints::{eval_constraints, Constraint, ConstraintKind, ConstraintSet, PenaltyReport};
pub use enclosure::enclosed_volume;
pub use io::{parse_structure, render};
pub use stability::{check_stability, unsupported_cells, StabilityReport, DEFAULT_MAX_OVERHANG};
pub use structure::{Cell, Dims, VoxelStructure};

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("structure file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("constraint file: {0}")]
    Constraint(String),
}
