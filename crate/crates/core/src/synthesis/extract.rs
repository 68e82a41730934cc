//! Repeated-block extraction: a block that occurs several times becomes a
//! DEF and each occurrence a CALL.

use std::collections::{HashMap, HashSet};

use crate::vm::{block_len, program_length, Instruction, Program};

use super::fold::{merge_moves, moves_for, net_delta, MAX_BLOCK};

/// Beyond this many top-level instructions extraction is skipped; the
/// window table would dominate the run time.
const MAX_INSTRUCTIONS: usize = 50_000;

pub fn extract_defs(program: &Program, max_defs: usize) -> Program {
    let mut current = program.clone();
    for _ in 0..max_defs {
        match extract_once(&current) {
            Some(next) if program_length(&next) < program_length(&current) => current = next,
            _ => break,
        }
    }
    current
}

fn fresh_name(used: &HashSet<&str>) -> String {
    let letters = (b'a'..=b'z').map(|c| (c as char).to_string());
    let numbered = (0..).map(|i| format!("s{i}"));
    letters.chain(numbered).find(|n| !used.contains(n.as_str())).expect("names are unbounded")
}

struct Choice {
    saving: i64,
    start: usize,
    len: usize,
}

fn extract_once(program: &Program) -> Option<Program> {
    let list = &program.instructions;
    if list.len() > MAX_INSTRUCTIONS {
        return None;
    }
    let defs_end = list.iter().take_while(|i| matches!(i, Instruction::Def { .. })).count();
    let used: HashSet<&str> = program.defs().into_iter().map(|(n, _)| n).collect();
    if list[defs_end..].iter().any(|i| matches!(i, Instruction::Def { .. })) {
        return None;
    }
    let name = fresh_name(&used);
    let call_len = 5 + name.len() as i64;

    let mut windows: HashMap<&[Instruction], Vec<usize>> = HashMap::new();
    for start in defs_end..list.len() {
        for len in 2..=MAX_BLOCK.min(list.len() - start) {
            windows.entry(&list[start..start + len]).or_default().push(start);
        }
    }

    let mut best: Option<Choice> = None;
    for (window, starts) in &windows {
        if starts.len() < 2 {
            continue;
        }
        let len = window.len();
        let mut count = 0i64;
        let mut next_free = 0;
        for &s in starts {
            if s >= next_free {
                count += 1;
                next_free = s + len;
            }
        }
        if count < 2 {
            continue;
        }
        let body = merge_moves(window.to_vec(), true);
        if body.is_empty() {
            continue;
        }
        let comp: i64 = moves_for(net_delta(window)).iter().map(|m| m.canonical_len() as i64 + 1).sum();
        let def_cost = 10 + name.len() as i64 + block_len(&body) as i64;
        let saving = count * (block_len(window) as i64 - call_len - comp) - def_cost;
        let start = starts[0];
        let better = match &best {
            None => saving > 0,
            Some(b) => saving > b.saving || (saving == b.saving && (start, len) < (b.start, b.len)),
        };
        if better {
            best = Some(Choice { saving, start, len });
        }
    }

    let choice = best?;
    let window = &list[choice.start..choice.start + choice.len];
    let comp = moves_for(net_delta(window));
    let mut out: Vec<Instruction> = list[..defs_end].to_vec();
    out.push(Instruction::def(name.clone(), merge_moves(window.to_vec(), true)));
    let mut i = defs_end;
    while i < list.len() {
        if i + choice.len <= list.len() && &list[i..i + choice.len] == window {
            out.push(Instruction::call(name.clone(), 1));
            out.extend(comp.iter().cloned());
            i += choice.len;
        } else {
            out.push(list[i].clone());
            i += 1;
        }
    }
    Some(Program::new(merge_moves(out, true)))
}
