//! Splitting a structure along empty planes and joining the two witness
//! programs with one run of moves.

use std::collections::{HashMap, HashSet};

use crate::vm::{run, Axis, ExecutionLimits, ExtentBuilder, Instruction, Program};
use crate::world::Cell;

use super::emit::moves_between;
use super::fold::merge_moves;

/// Final cursor of a program, ignoring the world.
pub fn final_cursor(program: &Program) -> Cell {
    let mut b = ExtentBuilder::default();
    run(program, ExecutionLimits::default(), &mut b).expect("witness programs run")
}

fn rename(inst: &Instruction, map: &HashMap<String, String>) -> Instruction {
    let rn = |n: &String| map.get(n).cloned().unwrap_or_else(|| n.clone());
    match inst {
        Instruction::Repeat { count, body } => {
            Instruction::repeat(*count, body.iter().map(|i| rename(i, map)).collect())
        }
        Instruction::Def { name, body } => Instruction::def(rn(name), body.iter().map(|i| rename(i, map)).collect()),
        Instruction::Call { name, scale } => Instruction::call(rn(name), *scale),
        other => other.clone(),
    }
}

/// `first`, then a move to `offset`, then `second` shifted there. The
/// definitions of `second` are renamed away from those of `first`.
pub fn join(first: &Program, offset: Cell, second: &Program) -> Program {
    let mut out = first.instructions.clone();
    let cursor = if first.is_empty() { Cell::new(0, 0, 0) } else { final_cursor(first) };
    moves_between(cursor, offset, &mut out);
    let mut used: HashSet<String> = first.defs().into_iter().map(|(n, _)| n.to_string()).collect();
    used.extend(second.defs().into_iter().map(|(n, _)| n.to_string()));
    let mut map = HashMap::new();
    for (name, _) in second.defs() {
        if first.defs().iter().any(|(n, _)| *n == name) {
            let fresh = (b'a'..=b'z')
                .map(|c| (c as char).to_string())
                .chain((0..).map(|i| format!("s{i}")))
                .find(|n| !used.contains(n))
                .expect("names are unbounded");
            used.insert(fresh.clone());
            map.insert(name.to_string(), fresh);
        }
    }
    out.extend(second.instructions.iter().map(|i| rename(i, &map)));
    Program::new(merge_moves(out, true))
}

/// Cuts along `axis` at every coordinate `k` inside a run of empty planes.
/// Returns the cells below the cut and the cells above it shifted by `-k`.
pub fn cuts(cells: &[Cell], axis: Axis) -> Vec<(i64, Vec<Cell>, Vec<Cell>)> {
    let a = axis.index();
    let mut coords: Vec<i64> = cells.iter().map(|c| c.get(a)).collect();
    coords.sort_unstable();
    coords.dedup();
    let mut out = Vec::new();
    for w in coords.windows(2) {
        if w[1] - w[0] < 2 {
            continue;
        }
        let left: Vec<Cell> = cells.iter().copied().filter(|c| c.get(a) < w[1]).collect();
        for k in w[0] + 1..=w[1] {
            let right: Vec<Cell> =
                cells.iter().filter(|c| c.get(a) >= w[1]).map(|c| c.with(a, c.get(a) - k)).collect();
            out.push((k, left.clone(), right));
        }
    }
    out
}
