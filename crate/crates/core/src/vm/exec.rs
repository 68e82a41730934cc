use std::collections::HashMap;

use crate::world::{Cell, Dims, VoxelStructure};

use super::ast::{Instruction, Program};
use super::VmError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExecutionLimits {
    pub max_placements: u64,
    pub max_call_depth: usize,
}

impl Default for ExecutionLimits {
    fn default() -> Self {
        ExecutionLimits { max_placements: 10_000_000, max_call_depth: 32 }
    }
}

impl ExecutionLimits {
    pub fn new(max_placements: u64, max_call_depth: usize) -> Result<Self, VmError> {
        if max_placements == 0 || max_call_depth == 0 {
            return Err(VmError::InvalidLimits);
        }
        Ok(ExecutionLimits { max_placements, max_call_depth })
    }
}

/// Receives every PLACE and FILL the machine performs. `extent` is the
/// already-scaled cuboid size; a PLACE arrives as `[1, 1, 1]`.
pub trait Builder {
    fn place(&mut self, anchor: Cell, extent: [u64; 3]) -> Result<(), VmError>;
}

/// Writes placements into a world, failing on the first cell outside it.
pub struct GridBuilder {
    pub structure: VoxelStructure,
}

impl GridBuilder {
    pub fn new(dims: Dims) -> Self {
        GridBuilder { structure: VoxelStructure::empty(dims) }
    }
}

impl Builder for GridBuilder {
    fn place(&mut self, anchor: Cell, extent: [u64; 3]) -> Result<(), VmError> {
        let dims = self.structure.dims();
        let far = Cell::new(
            anchor.x.saturating_add(extent[0] as i64 - 1),
            anchor.y.saturating_add(extent[1] as i64 - 1),
            anchor.z.saturating_add(extent[2] as i64 - 1),
        );
        for corner in [anchor, far] {
            if !dims.contains(corner) {
                let cell = Cell::new(
                    corner.x.clamp(anchor.x, far.x),
                    corner.y.clamp(anchor.y, far.y),
                    corner.z.clamp(anchor.z, far.z),
                );
                return Err(VmError::OutOfBounds { cell });
            }
        }
        for z in anchor.z..=far.z {
            for y in anchor.y..=far.y {
                for x in anchor.x..=far.x {
                    self.structure.insert(Cell::new(x, y, z));
                }
            }
        }
        Ok(())
    }
}

/// Records the inclusive bounding box of everything placed, with no world.
#[derive(Default)]
pub struct ExtentBuilder {
    pub bounds: Option<(Cell, Cell)>,
}

impl Builder for ExtentBuilder {
    fn place(&mut self, anchor: Cell, extent: [u64; 3]) -> Result<(), VmError> {
        let far = Cell::new(
            anchor.x.saturating_add(extent[0] as i64 - 1),
            anchor.y.saturating_add(extent[1] as i64 - 1),
            anchor.z.saturating_add(extent[2] as i64 - 1),
        );
        self.bounds = Some(match self.bounds {
            None => (anchor, far),
            Some((lo, hi)) => (
                Cell::new(lo.x.min(anchor.x), lo.y.min(anchor.y), lo.z.min(anchor.z)),
                Cell::new(hi.x.max(far.x), hi.y.max(far.y), hi.z.max(far.z)),
            ),
        });
        Ok(())
    }
}

struct Machine<'p, 'b, B: Builder> {
    defs: HashMap<&'p str, &'p [Instruction]>,
    limits: ExecutionLimits,
    builder: &'b mut B,
    cursor: Cell,
    placements: u64,
    depth: usize,
}

impl<'p, B: Builder> Machine<'p, '_, B> {
    fn run_block(&mut self, body: &'p [Instruction], scale: u64) -> Result<(), VmError> {
        for inst in body {
            self.step(inst, scale)?;
        }
        Ok(())
    }

    fn charge(&mut self, cells: u64) -> Result<(), VmError> {
        self.placements = self.placements.saturating_add(cells);
        if self.placements > self.limits.max_placements {
            return Err(VmError::BudgetExceeded { limit: self.limits.max_placements });
        }
        Ok(())
    }

    fn step(&mut self, inst: &'p Instruction, scale: u64) -> Result<(), VmError> {
        match inst {
            Instruction::Place => {
                self.charge(1)?;
                self.builder.place(self.cursor, [1, 1, 1])
            }
            Instruction::Fill { dx, dy, dz } => {
                let extent = [dx.saturating_mul(scale), dy.saturating_mul(scale), dz.saturating_mul(scale)];
                let cells = extent[0].saturating_mul(extent[1]).saturating_mul(extent[2]);
                self.charge(cells)?;
                self.builder.place(self.cursor, extent)
            }
            Instruction::Move { axis, n } => {
                let i = axis.index();
                let v = self.cursor.get(i).saturating_add(n.saturating_mul(scale as i64));
                self.cursor = self.cursor.with(i, v);
                Ok(())
            }
            Instruction::Repeat { count, body } => {
                let before_cursor = self.cursor;
                let before_placements = self.placements;
                self.run_block(body, scale)?;
                if self.placements == before_placements {
                    // Nothing was placed, so every iteration only shifts the
                    // cursor by the same amount.
                    let times = (*count - 1) as i64;
                    let shift = |a: i64, b: i64| b.saturating_add((b - a).saturating_mul(times));
                    self.cursor = Cell::new(
                        shift(before_cursor.x, self.cursor.x),
                        shift(before_cursor.y, self.cursor.y),
                        shift(before_cursor.z, self.cursor.z),
                    );
                    return Ok(());
                }
                for _ in 1..*count {
                    self.run_block(body, scale)?;
                }
                Ok(())
            }
            Instruction::Def { .. } => Ok(()),
            Instruction::Call { name, scale: s } => {
                let body = *self
                    .defs
                    .get(name.as_str())
                    .ok_or_else(|| VmError::UnknownName { name: name.clone(), pos: None })?;
                if self.depth >= self.limits.max_call_depth {
                    return Err(VmError::DepthExceeded { limit: self.limits.max_call_depth });
                }
                let saved = self.cursor;
                self.depth += 1;
                let result = self.run_block(body, scale.saturating_mul(*s));
                self.depth -= 1;
                self.cursor = saved;
                result
            }
        }
    }
}

/// Runs `program` from the origin, feeding placements to `builder`.
/// Returns the final cursor.
pub fn run<B: Builder>(program: &Program, limits: ExecutionLimits, builder: &mut B) -> Result<Cell, VmError> {
    let mut defs = HashMap::new();
    for inst in &program.instructions {
        if let Instruction::Def { name, body } = inst {
            defs.insert(name.as_str(), body.as_slice());
        }
    }
    let mut m = Machine { defs, limits, builder, cursor: Cell::new(0, 0, 0), placements: 0, depth: 0 };
    m.run_block(&program.instructions, 1)?;
    Ok(m.cursor)
}

/// Executes `program` in a world of `dims`. Any cell outside the world
/// aborts the run; no partial structure is returned.
pub fn execute(program: &Program, dims: Dims, limits: ExecutionLimits) -> Result<VoxelStructure, VmError> {
    execute_with_cursor(program, dims, limits).map(|(s, _)| s)
}

pub fn execute_with_cursor(
    program: &Program,
    dims: Dims,
    limits: ExecutionLimits,
) -> Result<(VoxelStructure, Cell), VmError> {
    if !dims.is_positive() {
        return Err(VmError::InvalidDims);
    }
    let mut builder = GridBuilder::new(dims);
    let cursor = run(program, limits, &mut builder)?;
    Ok((builder.structure, cursor))
}

/// Inclusive bounding box of everything the program places, computed
/// without a world; `None` when nothing is placed.
pub fn placement_bounds(program: &Program, limits: ExecutionLimits) -> Result<Option<(Cell, Cell)>, VmError> {
    let mut builder = ExtentBuilder::default();
    run(program, limits, &mut builder)?;
    Ok(builder.bounds)
}
