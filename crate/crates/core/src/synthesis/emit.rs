//! Direct witness programs: one PLACE per cell, or one FILL per cuboid.

use crate::vm::{Axis, Instruction, Program};
use crate::world::{Cell, VoxelStructure};

/// Relative moves taking the cursor from `from` to `to`, axes in X, Y, Z
/// order, zero moves omitted.
pub fn moves_between(from: Cell, to: Cell, out: &mut Vec<Instruction>) {
    for axis in Axis::ALL {
        let d = to.get(axis.index()) - from.get(axis.index());
        if d != 0 {
            out.push(Instruction::mv(axis, d));
        }
    }
}

/// Visits occupied cells in `(z, y, x)` order, moving to each and placing it.
pub fn literal_program(s: &VoxelStructure) -> Program {
    let mut out = Vec::new();
    let mut cursor = Cell::new(0, 0, 0);
    for c in s.cells() {
        moves_between(cursor, c, &mut out);
        out.push(Instruction::Place);
        cursor = c;
    }
    Program::new(out)
}

/// Greedy maximal cuboids. The first uncovered cell in `(z, y, x)` order
/// anchors a box grown along X, then Y, then Z over occupied cells; boxes
/// may overlap cells an earlier box already covered.
pub fn cuboid_program(s: &VoxelStructure) -> Program {
    let mut covered = VoxelStructure::empty(s.dims());
    let mut out = Vec::new();
    let mut cursor = Cell::new(0, 0, 0);
    for anchor in s.cells() {
        if covered.contains(anchor) {
            continue;
        }
        let mut ext = [1i64; 3];
        while s.contains(anchor.offset(ext[0], 0, 0)) {
            ext[0] += 1;
        }
        let nx = ext[0];
        let row_full = |y: i64, z: i64| (0..nx).all(|dx| s.contains(anchor.offset(dx, y, z)));
        while row_full(ext[1], 0) {
            ext[1] += 1;
        }
        while (0..ext[1]).all(|dy| row_full(dy, ext[2])) {
            ext[2] += 1;
        }
        for dz in 0..ext[2] {
            for dy in 0..ext[1] {
                for dx in 0..ext[0] {
                    covered.insert(anchor.offset(dx, dy, dz));
                }
            }
        }
        moves_between(cursor, anchor, &mut out);
        out.push(if ext == [1, 1, 1] {
            Instruction::Place
        } else {
            Instruction::fill(ext[0] as u64, ext[1] as u64, ext[2] as u64)
        });
        cursor = anchor;
    }
    Program::new(out)
}
