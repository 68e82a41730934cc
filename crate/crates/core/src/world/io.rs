//! The layered `.vox.txt` text format.
//!
//! ```text
//! DIMS nx ny nz
//! LAYER 0
//! #..        <- row y = 0
//! ...
//! LAYER 1
//! ...
//! ```
//!
//! `#` is occupied and `.` empty. Lines are LF separated and the rendered
//! form carries no trailing newline.

use super::structure::{Cell, Dims, VoxelStructure};
use super::WorldError;

pub fn render(s: &VoxelStructure) -> String {
    let d = s.dims();
    let mut out = format!("DIMS {} {} {}", d.nx, d.ny, d.nz);
    out.reserve(d.volume() + d.ny * d.nz + 10 * d.nz);
    for z in 0..d.nz {
        out.push_str(&format!("\nLAYER {z}"));
        for y in 0..d.ny {
            out.push('\n');
            for x in 0..d.nx {
                let c = Cell::new(x as i64, y as i64, z as i64);
                out.push(if s.contains(c) { '#' } else { '.' });
            }
        }
    }
    out
}

pub fn parse_structure(text: &str) -> Result<VoxelStructure, WorldError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let eof = text.lines().count();
    let err = |line: usize, message: String| WorldError::Parse { line: line + 1, message };

    let (n, header) = lines.next().ok_or_else(|| err(0, "missing DIMS header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "DIMS" {
        return Err(err(n, format!("expected `DIMS nx ny nz`, found `{header}`")));
    }
    let mut extents = [0usize; 3];
    for (slot, tok) in extents.iter_mut().zip(&parts[1..]) {
        *slot = tok
            .parse()
            .ok()
            .filter(|&v: &usize| v > 0)
            .ok_or_else(|| err(n, format!("bad dimension `{tok}`")))?;
    }
    let dims = Dims::new(extents[0], extents[1], extents[2]);
    let mut s = VoxelStructure::empty(dims);

    for z in 0..dims.nz {
        let (n, line) = lines
            .next()
            .ok_or_else(|| err(eof, format!("missing LAYER {z}")))?;
        if line.trim() != format!("LAYER {z}") {
            return Err(err(n, format!("expected `LAYER {z}`, found `{line}`")));
        }
        for y in 0..dims.ny {
            let (n, row) = lines
                .next()
                .ok_or_else(|| err(eof, format!("missing row {y} of layer {z}")))?;
            let row = row.trim();
            if row.chars().count() != dims.nx {
                return Err(err(n, format!("row has {} cells, expected {}", row.chars().count(), dims.nx)));
            }
            for (x, ch) in row.chars().enumerate() {
                match ch {
                    '#' => {
                        s.insert(Cell::new(x as i64, y as i64, z as i64));
                    }
                    '.' => {}
                    other => return Err(err(n, format!("unexpected character `{other}`"))),
                }
            }
        }
    }
    if let Some((n, extra)) = lines.next() {
        return Err(err(n, format!("trailing content `{extra}`")));
    }
    Ok(s)
}
