//! Regularity features and fractal dimension.
//!
//! Straight runs, flat exposed surfaces and mirror symmetry are the marks
//! of artificial structures; their mean is the regularity index and one
//! minus it the naturalness. The box-counting dimension measures
//! self-similarity across scales.

use std::collections::HashSet;

use serde::Serialize;

use crate::world::{Cell, VoxelStructure};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NaturalnessError {
    #[error("structure is empty")]
    EmptyStructure,
    #[error("only {sizes} box sizes fit the structure, at least 3 are needed")]
    TooSmall { sizes: usize },
}

pub const DEFAULT_MIN_PATCH: usize = 4;
pub const DEFAULT_THRESHOLD: f64 = 0.5;

fn bounds(s: &VoxelStructure) -> Result<(Cell, Cell), NaturalnessError> {
    s.bounding_box().ok_or(NaturalnessError::EmptyStructure)
}

fn extent(lo: Cell, hi: Cell, axis: usize) -> i64 {
    hi.get(axis) - lo.get(axis) + 1
}

/// Longest run of occupied cells along an axis over the bounding-box
/// extent on that axis, maximized over axes. Axes along which the
/// structure is one cell thick are skipped; if all are, the score is 1.
pub fn straightness_score(s: &VoxelStructure) -> Result<f64, NaturalnessError> {
    let (lo, hi) = bounds(s)?;
    let mut best: Option<f64> = None;
    for axis in 0..3 {
        let e = extent(lo, hi, axis);
        if e < 2 {
            continue;
        }
        let mut longest = 0;
        for c in s.cells() {
            let prev = c.with(axis, c.get(axis) - 1);
            if s.contains(prev) {
                continue;
            }
            let mut run = 1;
            while s.contains(c.with(axis, c.get(axis) + run)) {
                run += 1;
            }
            longest = longest.max(run);
        }
        let score = longest as f64 / e as f64;
        best = Some(best.map_or(score, |b: f64| b.max(score)));
    }
    Ok(best.unwrap_or(1.0))
}

const DIRS: [(usize, i64); 6] = [(0, -1), (0, 1), (1, -1), (1, 1), (2, -1), (2, 1)];

/// Share of exposed faces lying in flat patches of at least `min_patch`
/// faces. A patch is a 4-connected set of coplanar faces with the same
/// outward normal.
pub fn planarity_score(s: &VoxelStructure, min_patch: usize) -> Result<f64, NaturalnessError> {
    bounds(s)?;
    let exposed = |c: Cell, (axis, sign): (usize, i64)| !s.contains(c.with(axis, c.get(axis) + sign));
    let mut seen: HashSet<(Cell, usize)> = HashSet::new();
    let mut total = 0usize;
    let mut in_patches = 0usize;
    for c in s.cells() {
        for (di, &dir) in DIRS.iter().enumerate() {
            if !exposed(c, dir) || !seen.insert((c, di)) {
                continue;
            }
            let (axis, _) = dir;
            let mut area = 0;
            let mut stack = vec![c];
            while let Some(f) = stack.pop() {
                area += 1;
                for other in (0..3).filter(|&a| a != axis) {
                    for step in [-1, 1] {
                        let g = f.with(other, f.get(other) + step);
                        if s.contains(g) && exposed(g, dir) && seen.insert((g, di)) {
                            stack.push(g);
                        }
                    }
                }
            }
            total += area;
            if area >= min_patch {
                in_patches += area;
            }
        }
    }
    Ok(in_patches as f64 / total as f64)
}

/// Fraction of cells whose mirror image through the bounding-box center
/// is occupied, for the plane normal to `axis`.
pub fn mirror_score(s: &VoxelStructure, axis: usize) -> Result<f64, NaturalnessError> {
    let (lo, hi) = bounds(s)?;
    let sum = lo.get(axis) + hi.get(axis);
    let matched = s.cells().filter(|c| s.contains(c.with(axis, sum - c.get(axis)))).count();
    Ok(matched as f64 / s.len() as f64)
}

/// Best of the three axis-aligned mirror scores.
pub fn symmetry_score(s: &VoxelStructure) -> Result<f64, NaturalnessError> {
    let mut best: f64 = 0.0;
    for axis in 0..3 {
        best = best.max(mirror_score(s, axis)?);
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DimensionFit {
    pub dimension: f64,
    pub r2: f64,
    pub sizes: usize,
}

/// Box-counting dimension over box sizes 1, 2, 4, ... up to half the
/// largest extent. Boxes are aligned to the bounding-box minimum corner.
pub fn box_counting_dimension(s: &VoxelStructure) -> Result<DimensionFit, NaturalnessError> {
    let (lo, hi) = bounds(s)?;
    let max_extent = (0..3).map(|a| extent(lo, hi, a)).max().unwrap_or(1);
    let mut points = Vec::new();
    let mut sigma = 1i64;
    while sigma * 2 <= max_extent {
        let boxes: HashSet<(i64, i64, i64)> = s
            .cells()
            .map(|c| ((c.x - lo.x) / sigma, (c.y - lo.y) / sigma, (c.z - lo.z) / sigma))
            .collect();
        points.push(((1.0 / sigma as f64).ln(), (boxes.len() as f64).ln()));
        sigma *= 2;
    }
    if points.len() < 3 {
        return Err(NaturalnessError::TooSmall { sizes: points.len() });
    }
    let (dimension, r2) = least_squares(&points);
    Ok(DimensionFit { dimension, r2, sizes: points.len() })
}

/// Slope and coefficient of determination of a straight-line fit.
fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, r2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Label {
    Natural,
    Artificial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NaturalnessReport {
    pub straightness: f64,
    pub planarity: f64,
    pub symmetry: f64,
    /// Per-axis mirror scores; `symmetry` is their maximum.
    pub mirror: [f64; 3],
    /// Absent when the structure is too small for three box sizes.
    pub fractal_dimension: Option<f64>,
    pub fractal_r2: Option<f64>,
    pub regularity_index: f64,
    pub naturalness: f64,
    pub threshold: f64,
    pub label: Label,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaturalnessConfig {
    pub min_patch: usize,
    pub threshold: f64,
}

impl Default for NaturalnessConfig {
    fn default() -> Self {
        NaturalnessConfig { min_patch: DEFAULT_MIN_PATCH, threshold: DEFAULT_THRESHOLD }
    }
}

pub fn naturalness_report(s: &VoxelStructure, config: &NaturalnessConfig) -> Result<NaturalnessReport, NaturalnessError> {
    let straightness = straightness_score(s)?;
    let planarity = planarity_score(s, config.min_patch)?;
    let mirror = [mirror_score(s, 0)?, mirror_score(s, 1)?, mirror_score(s, 2)?];
    let symmetry = mirror.iter().copied().fold(0.0, f64::max);
    let fit = match box_counting_dimension(s) {
        Ok(f) => Some(f),
        Err(NaturalnessError::TooSmall { .. }) => None,
        Err(e) => return Err(e),
    };
    let regularity_index = (straightness + planarity + symmetry) / 3.0;
    let naturalness = 1.0 - regularity_index;
    Ok(NaturalnessReport {
        straightness,
        planarity,
        symmetry,
        mirror,
        fractal_dimension: fit.map(|f| f.dimension),
        fractal_r2: fit.map(|f| f.r2),
        regularity_index,
        naturalness,
        threshold: config.threshold,
        label: if naturalness >= config.threshold { Label::Natural } else { Label::Artificial },
    })
}
