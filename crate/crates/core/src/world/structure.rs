use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An integer grid cell. Cells order by `(z, y, x)`, the layer-major
/// order used for emission and tie-breaking everywhere in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Cell {
    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Cell { x, y, z }
    }

    pub fn offset(self, dx: i64, dy: i64, dz: i64) -> Self {
        Cell::new(self.x + dx, self.y + dy, self.z + dz)
    }

    pub fn get(self, axis: usize) -> i64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }

    pub fn with(mut self, axis: usize, value: i64) -> Self {
        match axis {
            0 => self.x = value,
            1 => self.y = value,
            _ => self.z = value,
        }
        self
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.z, self.y, self.x).cmp(&(other.z, other.y, other.x))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// World size in cells along each axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub const fn new(nx: usize, ny: usize, nz: usize) -> Self {
        Dims { nx, ny, nz }
    }

    pub fn volume(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_positive(&self) -> bool {
        self.nx > 0 && self.ny > 0 && self.nz > 0
    }

    pub fn get(&self, axis: usize) -> usize {
        match axis {
            0 => self.nx,
            1 => self.ny,
            _ => self.nz,
        }
    }

    pub fn max_extent(&self) -> usize {
        self.nx.max(self.ny).max(self.nz)
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x >= 0
            && c.y >= 0
            && c.z >= 0
            && (c.x as usize) < self.nx
            && (c.y as usize) < self.ny
            && (c.z as usize) < self.nz
    }

    fn index(&self, c: Cell) -> usize {
        c.x as usize + self.nx * (c.y as usize + self.ny * c.z as usize)
    }

    fn cell_at(&self, index: usize) -> Cell {
        let x = index % self.nx;
        let y = (index / self.nx) % self.ny;
        let z = index / (self.nx * self.ny);
        Cell::new(x as i64, y as i64, z as i64)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.nx, self.ny, self.nz)
    }
}

/// Dense occupancy grid. Storage is a bitset indexed `x + nx*(y + ny*z)`,
/// so index order is the `(z, y, x)` cell order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VoxelStructure {
    dims: Dims,
    bits: Vec<u64>,
    count: usize,
}

impl VoxelStructure {
    pub fn empty(dims: Dims) -> Self {
        VoxelStructure {
            dims,
            bits: vec![0; dims.volume().div_ceil(64)],
            count: 0,
        }
    }

    /// Builds a structure from cells; returns the first out-of-bounds cell
    /// as the error.
    pub fn from_cells<I>(dims: Dims, cells: I) -> Result<Self, Cell>
    where
        I: IntoIterator<Item = Cell>,
    {
        let mut s = VoxelStructure::empty(dims);
        for c in cells {
            if !s.insert(c) && !dims.contains(c) {
                return Err(c);
            }
        }
        Ok(s)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn contains(&self, c: Cell) -> bool {
        if !self.dims.contains(c) {
            return false;
        }
        let i = self.dims.index(c);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Marks `c` occupied. Returns false when `c` is outside the dims or
    /// already occupied.
    pub fn insert(&mut self, c: Cell) -> bool {
        if !self.dims.contains(c) {
            return false;
        }
        let i = self.dims.index(c);
        let mask = 1u64 << (i % 64);
        if self.bits[i / 64] & mask != 0 {
            return false;
        }
        self.bits[i / 64] |= mask;
        self.count += 1;
        true
    }

    pub fn remove(&mut self, c: Cell) -> bool {
        if !self.contains(c) {
            return false;
        }
        let i = self.dims.index(c);
        self.bits[i / 64] &= !(1u64 << (i % 64));
        self.count -= 1;
        true
    }

    /// Occupied cells in `(z, y, x)` order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(self.dims.cell_at(w * 64 + b))
            })
        })
    }

    /// Inclusive bounding box of the occupied cells, or `None` when empty.
    pub fn bounding_box(&self) -> Option<(Cell, Cell)> {
        let mut cells = self.cells();
        let first = cells.next()?;
        let (mut lo, mut hi) = (first, first);
        for c in cells {
            lo = Cell::new(lo.x.min(c.x), lo.y.min(c.y), lo.z.min(c.z));
            hi = Cell::new(hi.x.max(c.x), hi.y.max(c.y), hi.z.max(c.z));
        }
        Some((lo, hi))
    }

    /// Same occupied cells placed in a world of different dims.
    pub fn with_dims(&self, dims: Dims) -> Result<Self, Cell> {
        VoxelStructure::from_cells(dims, self.cells())
    }

    /// Translated copy in the same world; cells leaving the world are
    /// reported as the error.
    pub fn translated(&self, dx: i64, dy: i64, dz: i64) -> Result<Self, Cell> {
        VoxelStructure::from_cells(self.dims, self.cells().map(|c| c.offset(dx, dy, dz)))
    }
}

impl fmt::Debug for VoxelStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VoxelStructure")
            .field("dims", &self.dims)
            .field("cells", &self.cells().collect::<Vec<_>>())
            .finish()
    }
}
