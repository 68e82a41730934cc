//! Static support rule.
//!
//! A cell is vertically supported when it sits on the ground (`z = 0`) or
//! on a vertically supported cell. Any other occupied cell is supported
//! when it is reachable, inside its own layer, from a vertically supported
//! cell through at most `max_overhang` face-adjacent occupied steps.
//! Overhanging cells carry nothing above them.

use std::collections::VecDeque;

use serde::Serialize;

use super::structure::{Cell, VoxelStructure};

pub const DEFAULT_MAX_OVERHANG: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    pub unstable_cells: Vec<Cell>,
    pub supported_count: usize,
}

pub fn check_stability(s: &VoxelStructure, max_overhang: usize) -> StabilityReport {
    let cells: Vec<Cell> = s.cells().collect();
    let unstable_cells = unsupported_cells(&cells, max_overhang);
    StabilityReport {
        stable: unstable_cells.is_empty(),
        supported_count: cells.len() - unstable_cells.len(),
        unstable_cells,
    }
}

/// Unsupported cells of an arbitrary cell set, in `(z, y, x)` order.
/// Works on the set's bounding box, so cost scales with the structure
/// rather than the world.
pub fn unsupported_cells(cells: &[Cell], max_overhang: usize) -> Vec<Cell> {
    let Some(first) = cells.first() else {
        return Vec::new();
    };
    let (mut lo, mut hi) = (*first, *first);
    for c in cells {
        lo = Cell::new(lo.x.min(c.x), lo.y.min(c.y), lo.z.min(c.z));
        hi = Cell::new(hi.x.max(c.x), hi.y.max(c.y), hi.z.max(c.z));
    }
    let (wx, wy, wz) = (
        (hi.x - lo.x + 1) as usize,
        (hi.y - lo.y + 1) as usize,
        (hi.z - lo.z + 1) as usize,
    );
    let idx = |x: usize, y: usize, z: usize| x + wx * (y + wy * z);

    const EMPTY: u8 = 0;
    const OCCUPIED: u8 = 1;
    const VERTICAL: u8 = 2;
    const LATERAL: u8 = 3;

    let mut grid = vec![EMPTY; wx * wy * wz];
    for c in cells {
        let (x, y, z) = ((c.x - lo.x) as usize, (c.y - lo.y) as usize, (c.z - lo.z) as usize);
        grid[idx(x, y, z)] = OCCUPIED;
    }

    let mut queue = VecDeque::new();
    let mut depth = vec![0usize; wx * wy];
    for z in 0..wz {
        let world_z = lo.z + z as i64;
        queue.clear();
        for y in 0..wy {
            for x in 0..wx {
                let i = idx(x, y, z);
                if grid[i] != OCCUPIED {
                    continue;
                }
                let grounded = if z == 0 {
                    world_z == 0
                } else {
                    grid[idx(x, y, z - 1)] == VERTICAL
                };
                if grounded {
                    grid[i] = VERTICAL;
                    depth[x + wx * y] = 0;
                    queue.push_back((x, y));
                }
            }
        }
        while let Some((x, y)) = queue.pop_front() {
            let d = depth[x + wx * y];
            if d == max_overhang {
                continue;
            }
            let mut visit = |nx: usize, ny: usize| {
                let j = idx(nx, ny, z);
                if grid[j] == OCCUPIED {
                    grid[j] = LATERAL;
                    depth[nx + wx * ny] = d + 1;
                    queue.push_back((nx, ny));
                }
            };
            if x > 0 {
                visit(x - 1, y);
            }
            if x + 1 < wx {
                visit(x + 1, y);
            }
            if y > 0 {
                visit(x, y - 1);
            }
            if y + 1 < wy {
                visit(x, y + 1);
            }
        }
    }

    let mut out = Vec::new();
    for z in 0..wz {
        for y in 0..wy {
            for x in 0..wx {
                if grid[idx(x, y, z)] == OCCUPIED {
                    out.push(Cell::new(lo.x + x as i64, lo.y + y as i64, lo.z + z as i64));
                }
            }
        }
    }
    out
}
