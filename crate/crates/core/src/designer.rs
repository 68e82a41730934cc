//! Design search: find a program whose building is well explained by the
//! pattern dictionary and violates no constraint.
//!
//! The objective of a program is the residual complexity of its building
//! under the dictionary plus the weighted constraint penalties, both in
//! bytes. Simulated annealing edits the program; every dictionary pattern
//! is compiled into a DEF at the top of the program so that stamping a
//! primitive is a single edit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::aesthetics::{cover, PatternDictionary};
use crate::synthesis::{extract_defs, literal_program, synthesize_min};
use crate::vm::{execute, program_length, Axis, ExecutionLimits, Instruction, Program};
use crate::world::{eval_constraints, ConstraintSet, Dims, VoxelStructure};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DesignerError {
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
}

/// Relative frequencies of the edit moves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MoveWeights {
    pub insert: f64,
    pub delete: f64,
    pub perturb: f64,
    pub wrap: f64,
    pub extract: f64,
    pub stamp: f64,
}

impl Default for MoveWeights {
    fn default() -> Self {
        MoveWeights { insert: 3.0, delete: 2.0, perturb: 3.0, wrap: 1.0, extract: 0.5, stamp: 3.0 }
    }
}

impl MoveWeights {
    fn as_array(&self) -> [f64; 6] {
        [self.insert, self.delete, self.perturb, self.wrap, self.extract, self.stamp]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    pub seed: u64,
    pub iterations: usize,
    pub initial_temperature: f64,
    pub cooling: f64,
    pub dims: Dims,
    pub max_program_bytes: usize,
    pub move_weights: MoveWeights,
}

impl SearchParams {
    pub fn new(seed: u64, iterations: usize, dims: Dims) -> Self {
        SearchParams {
            seed,
            iterations,
            initial_temperature: 10.0,
            cooling: 0.999,
            dims,
            max_program_bytes: 4096,
            move_weights: MoveWeights::default(),
        }
    }

    pub fn validate(&self) -> Result<(), DesignerError> {
        let bad = |m: &str| Err(DesignerError::InvalidParams(m.to_string()));
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling must lie strictly between 0 and 1");
        }
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return bad("initial temperature must be positive");
        }
        if !self.dims.is_positive() {
            return bad("dims must be positive");
        }
        let w = self.move_weights.as_array();
        if w.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || w.iter().sum::<f64>() <= 0.0 {
            return bad("move weights must be non-negative with a positive sum");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Objective of the current program after this step.
    pub objective: f64,
    pub accepted: bool,
    pub best: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchTrace {
    pub records: Vec<TraceRecord>,
}

impl SearchTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,objective,accepted,best\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{},{}\n", r.iteration, r.objective, u8::from(r.accepted), r.best));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Objective {
    pub residual: usize,
    pub penalty: f64,
    pub total: f64,
}

/// `J(p)`; `f64::INFINITY` when the program fails to run in `dims`.
pub fn objective(p: &Program, dict: &PatternDictionary, cs: &ConstraintSet, dims: Dims) -> f64 {
    objective_parts(p, dict, cs, dims).map_or(f64::INFINITY, |o| o.total)
}

pub fn objective_parts(p: &Program, dict: &PatternDictionary, cs: &ConstraintSet, dims: Dims) -> Option<Objective> {
    let s = execute(p, dims, ExecutionLimits::default()).ok()?;
    Some(structure_objective(&s, dict, cs))
}

pub fn structure_objective(s: &VoxelStructure, dict: &PatternDictionary, cs: &ConstraintSet) -> Objective {
    let residual = cover(s, dict).residual;
    let r = synthesize_min(&residual).map_or(usize::MAX, |b| b.length);
    let penalty = eval_constraints(s, cs).total;
    Objective { residual: r, penalty, total: r as f64 + penalty }
}

/// One DEF per dictionary pattern, named after it, whose body places the
/// pattern's cells relative to the cursor.
pub fn dictionary_preamble(dict: &PatternDictionary) -> Vec<Instruction> {
    dict.patterns()
        .iter()
        .map(|p| {
            let hi = |f: fn(&crate::world::Cell) -> i64| p.cells.iter().map(f).max().unwrap_or(0) as usize + 1;
            let dims = Dims::new(hi(|c| c.x), hi(|c| c.y), hi(|c| c.z));
            let s = VoxelStructure::from_cells(dims, p.cells.iter().copied()).expect("pattern fits its hull");
            Instruction::def(p.name.clone(), literal_program(&s).instructions)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub best: Program,
    pub best_objective: f64,
    pub trace: SearchTrace,
}

/// Simulated annealing from the bare dictionary preamble.
pub fn optimize(dict: &PatternDictionary, cs: &ConstraintSet, params: &SearchParams) -> Result<SearchResult, DesignerError> {
    optimize_from(Program::new(dictionary_preamble(dict)), dict, cs, params)
}

/// Simulated annealing from `initial`, which should start with the
/// dictionary preamble so that stamps are callable.
pub fn optimize_from(
    initial: Program,
    dict: &PatternDictionary,
    cs: &ConstraintSet,
    params: &SearchParams,
) -> Result<SearchResult, DesignerError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let eval = |p: &Program| objective(p, dict, cs, params.dims);

    let mut current = initial;
    let mut current_j = eval(&current);
    let mut best = current.clone();
    let mut best_j = current_j;
    let mut temperature = params.initial_temperature;
    let mut trace = SearchTrace::default();
    let dict_names: Vec<String> = dict.patterns().iter().map(|p| p.name.clone()).collect();

    for iteration in 0..params.iterations {
        let proposal = propose(&current, &dict_names, params, &mut rng);
        let mut accepted = false;
        if let Some(p) = proposal.filter(|p| program_length(p) <= params.max_program_bytes) {
            let j = eval(&p);
            let delta = j - current_j;
            // Draw unconditionally so the random stream does not depend on
            // the sign of delta.
            let u: f64 = rng.gen();
            if j.is_finite() && (delta <= 0.0 || u < (-delta / temperature).exp()) {
                current = p;
                current_j = j;
                accepted = true;
                if (current_j, program_length(&current)) < (best_j, program_length(&best)) {
                    best = current.clone();
                    best_j = current_j;
                }
            }
        }
        trace.records.push(TraceRecord { iteration, objective: current_j, accepted, best: best_j });
        temperature *= params.cooling;
    }
    Ok(SearchResult { best, best_objective: best_j, trace })
}

/// Independent annealing runs seeded `seed + i`; the best result wins,
/// ties going to the lowest island. The outcome does not depend on how
/// many threads run the islands.
pub fn optimize_islands(
    dict: &PatternDictionary,
    cs: &ConstraintSet,
    params: &SearchParams,
    islands: usize,
) -> Result<SearchResult, DesignerError> {
    let runs: Vec<Result<SearchResult, DesignerError>> = (0..islands.max(1))
        .into_par_iter()
        .map(|i| {
            let p = SearchParams { seed: params.seed.wrapping_add(i as u64), ..params.clone() };
            optimize(dict, cs, &p)
        })
        .collect();
    let mut best: Option<SearchResult> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.best_objective < b.best_objective) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one island"))
}

fn defs_end(p: &Program) -> usize {
    p.instructions.iter().take_while(|i| matches!(i, Instruction::Def { .. })).count()
}

fn random_instruction(rng: &mut ChaCha8Rng, defs: &[String]) -> Instruction {
    let axis = Axis::from_index(rng.gen_range(0..3));
    let n = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
    match rng.gen_range(0..if defs.is_empty() { 3 } else { 4 }) {
        0 => Instruction::Place,
        1 => Instruction::fill(rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3)),
        2 => Instruction::mv(axis, n),
        _ => Instruction::call(defs[rng.gen_range(0..defs.len())].clone(), 1),
    }
}

fn int_slots(list: &[Instruction]) -> usize {
    list.iter()
        .map(|i| match i {
            Instruction::Fill { .. } => 3,
            Instruction::Move { .. } | Instruction::Call { .. } => 1,
            Instruction::Repeat { body, .. } => 1 + int_slots(body),
            _ => 0,
        })
        .sum()
}

/// Adds `delta` to the `n`th integer literal, keeping it in range.
/// Returns false when the edit would leave the literal invalid.
fn perturb(list: &mut [Instruction], mut n: usize, delta: i64) -> bool {
    for inst in list {
        let slots = int_slots(std::slice::from_ref(inst));
        if n >= slots {
            n -= slots;
            continue;
        }
        let bump = |v: u64, min: u64| {
            let next = v as i64 + delta;
            (next >= min as i64).then_some(next as u64)
        };
        return match inst {
            Instruction::Fill { dx, dy, dz } => {
                let slot = [dx, dy, dz].into_iter().nth(n).expect("slot in range");
                bump(*slot, 1).map(|v| *slot = v).is_some()
            }
            Instruction::Move { n: m, .. } => {
                let next = *m + delta;
                (next != 0).then(|| *m = next).is_some()
            }
            Instruction::Call { scale, .. } => bump(*scale, 1).map(|v| *scale = v).is_some(),
            Instruction::Repeat { count, body } => {
                if n == 0 {
                    bump(*count, 2).map(|v| *count = v).is_some()
                } else {
                    perturb(body, n - 1, delta)
                }
            }
            _ => false,
        };
    }
    false
}

fn propose(current: &Program, dict_names: &[String], params: &SearchParams, rng: &mut ChaCha8Rng) -> Option<Program> {
    let weights = params.move_weights.as_array();
    let total: f64 = weights.iter().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut kind = 0;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            kind = i;
            break;
        }
        pick -= w;
        kind = i;
    }
    let start = defs_end(current);
    let mut inst = current.instructions.clone();
    let body_len = inst.len() - start;
    let all_defs: Vec<String> = current.defs().into_iter().map(|(n, _)| n.to_string()).collect();
    match kind {
        0 => {
            let at = start + rng.gen_range(0..=body_len);
            inst.insert(at, random_instruction(rng, &all_defs));
        }
        1 => {
            if body_len == 0 {
                return None;
            }
            inst.remove(start + rng.gen_range(0..body_len));
        }
        2 => {
            let slots = int_slots(&inst[start..]);
            if slots == 0 {
                return None;
            }
            let n = rng.gen_range(0..slots);
            let step = if rng.gen_bool(0.5) { 1 } else { 2 };
            let delta = if rng.gen_bool(0.5) { step } else { -step };
            if !perturb(&mut inst[start..], n, delta) {
                return None;
            }
        }
        3 => {
            if body_len == 0 {
                return None;
            }
            let from = start + rng.gen_range(0..body_len);
            let len = rng.gen_range(1..=(inst.len() - from).min(4));
            let count = rng.gen_range(2..=4);
            let block: Vec<Instruction> = inst.drain(from..from + len).collect();
            inst.insert(from, Instruction::repeat(count, block));
        }
        4 => {
            let out = extract_defs(current, 1);
            return (out != *current).then_some(out);
        }
        _ => {
            if dict_names.is_empty() {
                return None;
            }
            let at = start + rng.gen_range(0..=body_len);
            let name = dict_names[rng.gen_range(0..dict_names.len())].clone();
            inst.insert(at, Instruction::call(name, 1));
        }
    }
    Some(Program::new(inst))
}
