//! Loop folding: runs of an identical instruction block become REPEAT.

use crate::vm::{block_len, Axis, Instruction, Program};

/// Longest block (in instructions) considered for folding or extraction.
pub const MAX_BLOCK: usize = 16;

/// Cursor displacement of a block run at scale 1.
pub fn net_delta(insts: &[Instruction]) -> [i64; 3] {
    let mut d = [0i64; 3];
    for inst in insts {
        match inst {
            Instruction::Move { axis, n } => d[axis.index()] += n,
            Instruction::Repeat { count, body } => {
                let inner = net_delta(body);
                for (acc, v) in d.iter_mut().zip(inner) {
                    *acc += v * *count as i64;
                }
            }
            _ => {}
        }
    }
    d
}

pub fn moves_for(delta: [i64; 3]) -> Vec<Instruction> {
    Axis::ALL
        .iter()
        .filter(|a| delta[a.index()] != 0)
        .map(|&a| Instruction::mv(a, delta[a.index()]))
        .collect()
}

/// Collapses every run of consecutive MOVEs into at most one move per
/// axis. When `trailing_free` is set, a final run of moves is dropped:
/// at the end of the program or of a stamp body the cursor is discarded.
pub fn merge_moves(insts: Vec<Instruction>, trailing_free: bool) -> Vec<Instruction> {
    let mut out = Vec::with_capacity(insts.len());
    let mut pending = [0i64; 3];
    let mut has_pending = false;
    for inst in insts {
        if let Instruction::Move { axis, n } = inst {
            pending[axis.index()] += n;
            has_pending = true;
            continue;
        }
        if has_pending {
            out.extend(moves_for(pending));
            pending = [0; 3];
            has_pending = false;
        }
        out.push(inst);
    }
    if has_pending && !trailing_free {
        out.extend(moves_for(pending));
    }
    out
}

pub fn fold_program(program: &Program) -> Program {
    Program::new(fold_list(program.instructions.clone(), true))
}

fn fold_list(insts: Vec<Instruction>, trailing_free: bool) -> Vec<Instruction> {
    let insts: Vec<Instruction> = insts
        .into_iter()
        .map(|inst| match inst {
            Instruction::Repeat { count, body } => Instruction::Repeat { count, body: fold_list(body, false) },
            Instruction::Def { name, body } => Instruction::Def { name, body: fold_list(body, true) },
            other => other,
        })
        .collect();
    let mut current = merge_moves(insts, trailing_free);
    for _ in 0..64 {
        let before = block_len(&current);
        let next = merge_moves(fold_pass(&current, trailing_free), trailing_free);
        if block_len(&next) >= before {
            break;
        }
        current = next;
    }
    current
}

struct Candidate {
    saving: i64,
    span: usize,
    replacement: Vec<Instruction>,
}

fn digits(v: usize) -> i64 {
    v.to_string().len() as i64
}

/// One left-to-right sweep; at each position the most profitable fold
/// starting there is applied.
fn fold_pass(list: &[Instruction], trailing_free: bool) -> Vec<Instruction> {
    let n = list.len();
    let mut prefix = vec![0i64; n + 1];
    for (i, inst) in list.iter().enumerate() {
        prefix[i + 1] = prefix[i] + inst.canonical_len() as i64;
    }
    let span_len = |i: usize, j: usize| prefix[j] - prefix[i] + (j - i) as i64 - 1;

    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        let mut best: Option<Candidate> = None;
        for l in 1..=MAX_BLOCK.min(n - i) {
            let block = &list[i..i + l];
            if block.iter().any(|b| matches!(b, Instruction::Def { .. })) {
                break;
            }
            let mut k = 1;
            while i + (k + 1) * l <= n && list[i + k * l..i + (k + 1) * l] == *block {
                k += 1;
            }
            let body_len = span_len(i, i + l);
            let rep_len = |count: usize| 12 + digits(count) + body_len;

            if k >= 2 {
                let saving = span_len(i, i + k * l) - rep_len(k);
                consider(&mut best, saving, k * l, || vec![Instruction::repeat(k as u64, block.to_vec())]);
            }

            // B^k followed by a prefix C of B whose remainder is pure moves:
            // run B once more and undo the trailing moves.
            let after = i + k * l;
            for c in (1..l).rev() {
                if after + c > n || list[after..after + c] != block[..c] {
                    continue;
                }
                if !block[c..].iter().all(Instruction::is_move) {
                    continue;
                }
                let at_end = trailing_free && after + c == n;
                let comp = if at_end {
                    Vec::new()
                } else {
                    let d = net_delta(&block[c..]);
                    moves_for([-d[0], -d[1], -d[2]])
                };
                let comp_len: i64 = comp.iter().map(|m| m.canonical_len() as i64 + 1).sum();
                let saving = span_len(i, after + c) - rep_len(k + 1) - comp_len;
                consider(&mut best, saving, k * l + c, || {
                    let mut r = vec![Instruction::repeat(k as u64 + 1, block.to_vec())];
                    r.extend(comp.iter().cloned());
                    r
                });
                break;
            }
        }
        match best {
            Some(c) => {
                out.extend(c.replacement);
                i += c.span;
            }
            None => {
                out.push(list[i].clone());
                i += 1;
            }
        }
    }
    out
}

fn consider(best: &mut Option<Candidate>, saving: i64, span: usize, build: impl FnOnce() -> Vec<Instruction>) {
    if saving <= 0 || best.as_ref().is_some_and(|b| b.saving >= saving) {
        return;
    }
    *best = Some(Candidate { saving, span, replacement: build() });
}
