//! Pattern-dictionary beauty score.
//!
//! A dictionary of primitive patterns plays the role of the perceiving
//! brain. A structure is explained by stamping patterns onto it; the cost
//! of listing those stamps is the description length `D`, the cells no
//! stamp explains form the residual, and the residual's synthesized
//! program length is `r`. The score is `D * N + r` with `N` the number of
//! patterns. Lower scores are more beautiful.

use std::collections::{BinaryHeap, HashSet};
use std::cmp::Reverse;
use std::fmt;

use serde::Serialize;

use crate::synthesis::{synthesize_min, SynthesisError};
use crate::vm::is_identifier;
use crate::world::{Cell, VoxelStructure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub name: String,
    /// Offsets with the minimum corner at the origin, in `(z, y, x)` order.
    pub cells: Vec<Cell>,
}

impl Pattern {
    /// Normalizes `cells` so their minimum corner is the origin.
    pub fn new(name: impl Into<String>, cells: impl IntoIterator<Item = Cell>) -> Result<Self, AestheticsError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(AestheticsError::BadName(name));
        }
        let mut cells: Vec<Cell> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(AestheticsError::EmptyPattern(name));
        }
        let min = |f: fn(&Cell) -> i64| cells.iter().map(f).min().unwrap_or(0);
        let (mx, my, mz) = (min(|c| c.x), min(|c| c.y), min(|c| c.z));
        for c in &mut cells {
            *c = c.offset(-mx, -my, -mz);
        }
        cells.sort();
        cells.dedup();
        Ok(Pattern { name, cells })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternDictionary {
    patterns: Vec<Pattern>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AestheticsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("pattern `{0}` is defined twice")]
    DuplicateName(String),
    #[error("pattern `{0}` has no cells")]
    EmptyPattern(String),
    #[error("`{0}` is not a valid pattern name")]
    BadName(String),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

impl PatternDictionary {
    pub fn new(patterns: Vec<Pattern>) -> Result<Self, AestheticsError> {
        let mut seen = HashSet::new();
        for p in &patterns {
            if !seen.insert(p.name.as_str()) {
                return Err(AestheticsError::DuplicateName(p.name.clone()));
            }
        }
        Ok(PatternDictionary { patterns })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    /// `N`, the number of patterns.
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Parses `.pat` text: `PATTERN name` headers, each followed by
    /// `x y z` offset lines. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, AestheticsError> {
        let mut patterns = Vec::new();
        let mut current: Option<(String, Vec<Cell>, usize)> = None;
        let finish = |cur: Option<(String, Vec<Cell>, usize)>, out: &mut Vec<Pattern>| -> Result<(), AestheticsError> {
            if let Some((name, cells, line)) = cur {
                if cells.is_empty() {
                    return Err(AestheticsError::Parse { line, message: format!("pattern `{name}` has no cells") });
                }
                out.push(Pattern::new(name, cells)?);
            }
            Ok(())
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let words: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
            match words.as_slice() {
                [] => {}
                ["PATTERN", name] => {
                    finish(current.take(), &mut patterns)?;
                    if !is_identifier(name) {
                        return Err(AestheticsError::Parse { line, message: format!("bad pattern name `{name}`") });
                    }
                    current = Some((name.to_string(), Vec::new(), line));
                }
                [x, y, z] => {
                    let Some((_, cells, _)) = current.as_mut() else {
                        return Err(AestheticsError::Parse { line, message: "offset before any PATTERN".into() });
                    };
                    let num = |w: &str| {
                        w.parse::<i64>()
                            .map_err(|_| AestheticsError::Parse { line, message: format!("bad offset `{w}`") })
                    };
                    cells.push(Cell::new(num(x)?, num(y)?, num(z)?));
                }
                _ => {
                    return Err(AestheticsError::Parse { line, message: format!("unexpected line `{}`", raw.trim()) })
                }
            }
        }
        finish(current, &mut patterns)?;
        PatternDictionary::new(patterns)
    }
}

impl fmt::Display for PatternDictionary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "PATTERN {}", p.name)?;
            for c in &p.cells {
                writeln!(f, "{} {} {}", c.x, c.y, c.z)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement {
    pub pattern: String,
    pub anchor: [i64; 3],
}

impl Placement {
    /// Canonical `STAMP name x y z` line.
    pub fn line(&self) -> String {
        format!("STAMP {} {} {} {}", self.pattern, self.anchor[0], self.anchor[1], self.anchor[2])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub placements: Vec<Placement>,
    pub covered: VoxelStructure,
    pub residual: VoxelStructure,
}

/// Greedy cover: repeatedly stamps the placement that explains the most
/// new cells, ties going to the lowest `(pattern index, z, y, x)`.
pub fn cover(s: &VoxelStructure, dict: &PatternDictionary) -> Cover {
    let dims = s.dims();
    // Every placement that lands on occupied cells only.
    let mut fits: Vec<(usize, Cell)> = Vec::new();
    for (pi, p) in dict.patterns.iter().enumerate() {
        let mut anchors: Vec<Cell> = Vec::new();
        let first = p.cells[0];
        for c in s.cells() {
            let anchor = c.offset(-first.x, -first.y, -first.z);
            if p.cells.iter().all(|o| s.contains(anchor.offset(o.x, o.y, o.z))) {
                anchors.push(anchor);
            }
        }
        anchors.sort();
        anchors.dedup();
        fits.extend(anchors.into_iter().map(|a| (pi, a)));
    }

    let mut covered = VoxelStructure::empty(dims);
    let gain = |covered: &VoxelStructure, (pi, a): (usize, Cell)| {
        dict.patterns[pi].cells.iter().filter(|o| !covered.contains(a.offset(o.x, o.y, o.z))).count()
    };
    // Gains only shrink as cells get covered, so a lazily refreshed heap
    // yields the same choice as a full rescan.
    let mut heap: BinaryHeap<(usize, Reverse<(usize, Cell)>)> =
        fits.iter().map(|&f| (gain(&covered, f), Reverse(f))).collect();
    let mut placements = Vec::new();
    while let Some((g, Reverse(f))) = heap.pop() {
        if g == 0 {
            break;
        }
        let fresh = gain(&covered, f);
        if fresh != g {
            heap.push((fresh, Reverse(f)));
            continue;
        }
        let (pi, a) = f;
        for o in &dict.patterns[pi].cells {
            covered.insert(a.offset(o.x, o.y, o.z));
        }
        placements.push(Placement { pattern: dict.patterns[pi].name.clone(), anchor: [a.x, a.y, a.z] });
    }
    let mut residual = VoxelStructure::empty(dims);
    for c in s.cells().filter(|&c| !covered.contains(c)) {
        residual.insert(c);
    }
    Cover { placements, covered, residual }
}

/// `D`: the bytes of the stamp lines joined by newlines.
pub fn description_length(c: &Cover) -> usize {
    c.placements.iter().map(|p| p.line().len()).sum::<usize>() + c.placements.len().saturating_sub(1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeautyScore {
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: usize,
    pub score: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeautyReport {
    #[serde(flatten)]
    pub score: BeautyScore,
    pub placements: Vec<Placement>,
    pub residual_cells: usize,
}

pub fn beauty_score(s: &VoxelStructure, dict: &PatternDictionary) -> Result<BeautyScore, AestheticsError> {
    Ok(beauty_report(s, dict)?.score)
}

pub fn beauty_report(s: &VoxelStructure, dict: &PatternDictionary) -> Result<BeautyReport, AestheticsError> {
    let c = cover(s, dict);
    let d = description_length(&c);
    let n = dict.len();
    let r = synthesize_min(&c.residual)?.length;
    Ok(BeautyReport {
        score: BeautyScore { d, n, r, score: d * n + r },
        residual_cells: c.residual.len(),
        placements: c.placements,
    })
}
