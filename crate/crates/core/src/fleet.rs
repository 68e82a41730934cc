//! Fleets of buildings from one program, and attacks that transfer
//! between them.
//!
//! A robot builder repeats the program exactly, so a weakness found in one
//! building is present in all of them. A human builder occasionally shifts
//! a placement by one cell, which makes members differ.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::vm::{execute, run, Builder, ExecutionLimits, Program, VmError};
use crate::world::{unsupported_cells, Cell, Dims, VoxelStructure, DEFAULT_MAX_OVERHANG};

pub const DEFAULT_COLLAPSE_THRESHOLD: f64 = 0.5;

/// Exhaustive attack search is used up to this many cells.
pub const EXHAUSTIVE_CELL_LIMIT: usize = 500;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum FleetError {
    #[error("structure is already unstable ({cells} unsupported cells)")]
    AlreadyUnstable { cells: usize },
    #[error("attack budget must be at least 1")]
    ZeroBudget,
    #[error("jitter probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("fleet is empty")]
    EmptyFleet,
    #[error(transparent)]
    Vm(#[from] VmError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum BuilderModel {
    Robot,
    Human { p: f64, seed: u64 },
}

impl BuilderModel {
    pub fn human(p: f64, seed: u64) -> Result<Self, FleetError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(FleetError::InvalidProbability(p));
        }
        Ok(BuilderModel::Human { p, seed })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Attack {
    pub removed_cells: Vec<Cell>,
    pub k: usize,
    pub collapse_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FleetReport {
    pub n: usize,
    pub distinct_structures: usize,
    pub collapsed: usize,
    pub threshold: f64,
    pub transfer_rate: f64,
}

/// Displaces each placement with probability `p` by one of the 26 unit
/// offsets; displaced placements that leave the world are dropped.
struct JitterBuilder {
    structure: VoxelStructure,
    rng: ChaCha8Rng,
    p: f64,
}

impl Builder for JitterBuilder {
    fn place(&mut self, anchor: Cell, extent: [u64; 3]) -> Result<(), VmError> {
        let mut anchor = anchor;
        if self.rng.gen_bool(self.p) {
            let mut k = self.rng.gen_range(0..26);
            if k >= 13 {
                k += 1;
            }
            anchor = anchor.offset(k % 3 - 1, k / 3 % 3 - 1, k / 9 - 1);
        }
        let dims = self.structure.dims();
        let far = Cell::new(
            anchor.x + extent[0] as i64 - 1,
            anchor.y + extent[1] as i64 - 1,
            anchor.z + extent[2] as i64 - 1,
        );
        if !(dims.contains(anchor) && dims.contains(far)) {
            return Ok(());
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

/// Member `i` of a human fleet draws from stream `i` of the seeded
/// generator, so members do not depend on build order.
pub fn build_fleet(
    p: &Program,
    n: usize,
    model: BuilderModel,
    dims: Dims,
    limits: ExecutionLimits,
) -> Result<Vec<VoxelStructure>, FleetError> {
    let prototype = execute(p, dims, limits)?;
    match model {
        BuilderModel::Robot => Ok(vec![prototype; n]),
        BuilderModel::Human { p: prob, seed } => {
            if !(0.0..=1.0).contains(&prob) {
                return Err(FleetError::InvalidProbability(prob));
            }
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    let mut b = JitterBuilder { structure: VoxelStructure::empty(dims), rng, p: prob };
                    run(p, limits, &mut b)?;
                    Ok(b.structure)
                })
                .collect()
        }
    }
}

/// Fraction of the remaining cells that lose support when `removed` is
/// taken out. Cells that were unsupported before do not count.
pub fn collapse_fraction(s: &VoxelStructure, removed: &[Cell]) -> f64 {
    let before: HashSet<Cell> = unsupported_cells(&s.cells().collect::<Vec<_>>(), DEFAULT_MAX_OVERHANG)
        .into_iter()
        .collect();
    collapse_with(s, removed, &before)
}

fn collapse_with(s: &VoxelStructure, removed: &[Cell], before: &HashSet<Cell>) -> f64 {
    let remaining: Vec<Cell> = s.cells().filter(|c| !removed.contains(c)).collect();
    if remaining.is_empty() {
        return 0.0;
    }
    let lost = unsupported_cells(&remaining, DEFAULT_MAX_OVERHANG)
        .into_iter()
        .filter(|c| !before.contains(c))
        .count();
    lost as f64 / remaining.len() as f64
}

/// Ordering of candidate attacks: higher collapse first, then fewer
/// removals, then the lexicographically smaller cell list.
fn better(a: &(f64, Vec<Cell>), b: &(f64, Vec<Cell>)) -> bool {
    if a.0 != b.0 {
        return a.0 > b.0;
    }
    (a.1.len(), &a.1) < (b.1.len(), &b.1)
}

fn pick(a: (f64, Vec<Cell>), b: (f64, Vec<Cell>)) -> (f64, Vec<Cell>) {
    if better(&b, &a) {
        b
    } else {
        a
    }
}

/// Removal of at most `k` cells that brings down the largest share of the
/// rest. Exhaustive over singles and pairs for small structures with
/// `k <= 2`; otherwise the best single removal is added `k` times.
pub fn find_attack(s: &VoxelStructure, k: usize) -> Result<Attack, FleetError> {
    if k == 0 {
        return Err(FleetError::ZeroBudget);
    }
    let cells: Vec<Cell> = s.cells().collect();
    let unstable = unsupported_cells(&cells, DEFAULT_MAX_OVERHANG).len();
    if unstable > 0 {
        return Err(FleetError::AlreadyUnstable { cells: unstable });
    }
    let none = HashSet::new();
    let eval = |r: Vec<Cell>| (collapse_with(s, &r, &none), r);
    let empty = (f64::NEG_INFINITY, Vec::new());

    let (fraction, mut removed) = if k <= 2 && cells.len() <= EXHAUSTIVE_CELL_LIMIT {
        let singles = cells.par_iter().map(|&c| eval(vec![c])).reduce(|| empty.clone(), pick);
        if k == 2 {
            let pairs = (0..cells.len())
                .into_par_iter()
                .flat_map_iter(|i| (i + 1..cells.len()).map(move |j| (i, j)))
                .map(|(i, j)| eval(vec![cells[i], cells[j]]))
                .reduce(|| empty.clone(), pick);
            pick(singles, pairs)
        } else {
            singles
        }
    } else {
        let mut best = empty.clone();
        let mut chosen: Vec<Cell> = Vec::new();
        for _ in 0..k.min(cells.len()) {
            let step = cells
                .par_iter()
                .filter(|c| !chosen.contains(c))
                .map(|&c| {
                    let mut r = chosen.clone();
                    r.push(c);
                    r.sort();
                    eval(r)
                })
                .reduce(|| empty.clone(), pick);
            chosen = step.1.clone();
            best = pick(best, step);
        }
        best
    };
    removed.sort();
    Ok(Attack { removed_cells: removed, k, collapse_fraction: fraction.max(0.0) })
}

/// Applies one attack to every member; cells a member lacks are skipped.
pub fn transfer_rate(a: &Attack, fleet: &[VoxelStructure], threshold: f64) -> Result<FleetReport, FleetError> {
    if fleet.is_empty() {
        return Err(FleetError::EmptyFleet);
    }
    let fractions: Vec<f64> = fleet.par_iter().map(|s| collapse_fraction(s, &a.removed_cells)).collect();
    let collapsed = fractions.iter().filter(|&&f| f >= threshold).count();
    let mut distinct: Vec<&VoxelStructure> = Vec::new();
    for s in fleet {
        if !distinct.contains(&s) {
            distinct.push(s);
        }
    }
    Ok(FleetReport {
        n: fleet.len(),
        distinct_structures: distinct.len(),
        collapsed,
        threshold,
        transfer_rate: collapsed as f64 / fleet.len() as f64,
    })
}
