use std::collections::VecDeque;

use super::structure::{Cell, VoxelStructure};

/// Number of empty cells that cannot be reached from any face of the world
/// box by 6-connected steps through empty cells.
pub fn enclosed_volume(s: &VoxelStructure) -> usize {
    let d = s.dims();
    let mut seen = vec![false; d.volume()];
    let idx = |c: Cell| c.x as usize + d.nx * (c.y as usize + d.ny * c.z as usize);
    let mut queue = VecDeque::new();

    let seed = |c: Cell, seen: &mut Vec<bool>, queue: &mut VecDeque<Cell>| {
        if !s.contains(c) && !seen[idx(c)] {
            seen[idx(c)] = true;
            queue.push_back(c);
        }
    };
    for z in 0..d.nz as i64 {
        for y in 0..d.ny as i64 {
            for x in 0..d.nx as i64 {
                let on_face = x == 0
                    || y == 0
                    || z == 0
                    || x == d.nx as i64 - 1
                    || y == d.ny as i64 - 1
                    || z == d.nz as i64 - 1;
                if on_face {
                    seed(Cell::new(x, y, z), &mut seen, &mut queue);
                }
            }
        }
    }

    let mut reached = queue.len();
    const STEPS: [(i64, i64, i64); 6] = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)];
    while let Some(c) = queue.pop_front() {
        for (dx, dy, dz) in STEPS {
            let n = c.offset(dx, dy, dz);
            if d.contains(n) && !s.contains(n) && !seen[idx(n)] {
                seen[idx(n)] = true;
                reached += 1;
                queue.push_back(n);
            }
        }
    }
    d.volume() - s.len() - reached
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Dims;

    fn shell(dims: Dims, lo: i64, size: i64) -> VoxelStructure {
        let mut s = VoxelStructure::empty(dims);
        for z in lo..lo + size {
            for y in lo..lo + size {
                for x in lo..lo + size {
                    let inner = [x, y, z].iter().all(|&v| v > lo && v < lo + size - 1);
                    if !inner {
                        s.insert(Cell::new(x, y, z));
                    }
                }
            }
        }
        s
    }

    #[test]
    fn empty_world_encloses_nothing() {
        assert_eq!(enclosed_volume(&VoxelStructure::empty(Dims::new(5, 5, 5))), 0);
    }

    #[test]
    fn hollow_shell_encloses_its_center() {
        let s = shell(Dims::new(5, 5, 5), 1, 3);
        assert_eq!(s.len(), 26);
        assert_eq!(enclosed_volume(&s), 1);
    }

    #[test]
    fn solid_cube_encloses_nothing() {
        let mut s = VoxelStructure::empty(Dims::new(4, 4, 4));
        for z in 0..3 {
            for y in 0..3 {
                for x in 0..3 {
                    s.insert(Cell::new(x, y, z));
                }
            }
        }
        assert_eq!(enclosed_volume(&s), 0);
    }

    #[test]
    fn larger_shell_touching_world_faces() {
        // A 5x5x5 shell filling the whole world encloses its 3x3x3 core.
        let s = shell(Dims::new(5, 5, 5), 0, 5);
        assert_eq!(enclosed_volume(&s), 27);
    }

    #[test]
    fn six_neighbours_are_enough_to_enclose() {
        let dims = Dims::new(3, 3, 3);
        let cells = [(0, 1, 1), (2, 1, 1), (1, 0, 1), (1, 2, 1), (1, 1, 0), (1, 1, 2)];
        let s = VoxelStructure::from_cells(dims, cells.iter().map(|&(x, y, z)| Cell::new(x, y, z))).unwrap();
        assert_eq!(enclosed_volume(&s), 1);
    }
}
