//! Exhaustive shortest-program search for tiny structures.
//!
//! Statements and statement sequences are tabulated by canonical length
//! and deduplicated by their effect: the cells they place relative to the
//! cursor and the cursor displacement, evaluated at every scale a stamp
//! can run at. The top level is then a shortest-path search over states
//! (cursor, cells placed so far, definitions in scope). Runs of moves
//! between placing statements are collapsed into a precomputed table of
//! cheapest move sequences, and definitions are only tried at boundaries
//! between placing statements. Neither restriction loses a minimum: any
//! program can be rewritten into that form without growing, and the
//! rewrite is never lexicographically larger.
//!
//! Integer literals are bounded by the largest world dimension.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex};

use crate::vm::{execute, parse, program_length, ExecutionLimits};
use crate::world::{Dims, VoxelStructure};

use super::{ComplexityBound, Method, SynthesisError};

type P = [i32; 3];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Effect {
    cells: Vec<P>,
    delta: P,
}

/// Effect at scales 1..=K; `None` where the statement cannot run inside
/// the world at that scale.
type Sig = Arc<Vec<Option<Effect>>>;

fn add(a: P, b: P) -> P {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn min_corner(cells: &[P]) -> P {
    let mut m = cells[0];
    for c in cells {
        for i in 0..3 {
            m[i] = m[i].min(c[i]);
        }
    }
    m
}

impl Effect {
    fn fits(&self, dims: P) -> bool {
        if self.cells.is_empty() {
            return true;
        }
        let mut lo = self.cells[0];
        let mut hi = self.cells[0];
        for c in &self.cells {
            for i in 0..3 {
                lo[i] = lo[i].min(c[i]);
                hi[i] = hi[i].max(c[i]);
            }
        }
        (0..3).all(|i| hi[i] - lo[i] < dims[i])
    }

    fn then(&self, next: &Effect, dims: P) -> Option<Effect> {
        let mut cells = self.cells.clone();
        cells.extend(next.cells.iter().map(|&c| add(c, self.delta)));
        cells.sort_unstable();
        cells.dedup();
        let e = Effect { cells, delta: add(self.delta, next.delta) };
        e.fits(dims).then_some(e)
    }

    fn is_noop(&self) -> bool {
        self.cells.is_empty() && self.delta == [0, 0, 0]
    }
}

fn is_dead(sig: &[Option<Effect>]) -> bool {
    sig.iter().all(|e| e.as_ref().is_none_or(Effect::is_noop))
}

struct Entry {
    len: usize,
    text: String,
    sig: Sig,
}

struct Placing {
    len: usize,
    text: String,
    /// Min corner of the placed cells relative to the cursor.
    corner: P,
    /// Cursor after the statement, relative to that corner.
    after: P,
}

struct DefCandidate {
    len: usize,
    body: String,
    sig: Sig,
}

struct Tables {
    stmt: Vec<Vec<Entry>>,
    placing: HashMap<Vec<P>, Vec<Placing>>,
    defs: Vec<DefCandidate>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct CtxKey {
    defs: Vec<Sig>,
    cap: usize,
}

fn def_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("a{i}")
    }
}

/// Reusable search engine for one world size and length bound. Tables
/// are shared between searches, so enumerating many structures through
/// one engine is much cheaper than calling [`exhaustive_min`] repeatedly.
pub struct Enumerator {
    dims: Dims,
    d: P,
    max_len: usize,
    lit: i64,
    scales: usize,
    node_budget: u64,
    root: Arc<Tables>,
    moves: HashMap<P, (usize, String)>,
    cache: Mutex<HashMap<CtxKey, Arc<Tables>>>,
}

pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

impl Enumerator {
    pub fn new(dims: Dims, max_len: usize, node_budget: u64) -> Result<Self, SynthesisError> {
        if !dims.is_positive() {
            return Err(SynthesisError::InvalidDims);
        }
        let lit = dims.max_extent() as i64;
        // Longest chain of scaled stamps that fits: a one-cell DEF, then
        // DEFs that each call the previous one scaled, then a scaled CALL.
        let mut depth = 0u32;
        while 15 + 18 * depth as usize + 8 + (depth as usize) < max_len {
            depth += 1;
        }
        let scales = (lit as usize).saturating_pow(depth.max(1));
        let d = [dims.nx as i32, dims.ny as i32, dims.nz as i32];
        let mut e = Enumerator {
            dims,
            d,
            max_len,
            lit,
            scales,
            node_budget,
            root: Arc::new(Tables { stmt: Vec::new(), placing: HashMap::new(), defs: Vec::new() }),
            moves: HashMap::new(),
            cache: Mutex::new(HashMap::new()),
        };
        let mut nodes = 0;
        let root = e.build(&[], max_len, &mut nodes)?;
        e.moves = e.move_table(&root);
        e.root = Arc::new(root);
        Ok(e)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    fn charge(&self, nodes: &mut u64, n: u64) -> Result<(), SynthesisError> {
        *nodes += n;
        if *nodes > self.node_budget {
            return Err(SynthesisError::EnumerationBudgetExceeded { budget: self.node_budget });
        }
        Ok(())
    }

    fn base_statements(&self, defs: &[Sig]) -> Vec<(usize, String, Sig)> {
        let k = self.scales;
        let mut out = Vec::new();
        let place = Effect { cells: vec![[0, 0, 0]], delta: [0, 0, 0] };
        out.push(("PLACE".to_string(), Arc::new(vec![Some(place); k])));
        for a in 1..=self.lit {
            for b in 1..=self.lit {
                for c in 1..=self.lit {
                    let sig = (1..=k as i64)
                        .map(|t| {
                            let ext = [a * t, b * t, c * t];
                            if (0..3).any(|i| ext[i] > self.d[i] as i64) {
                                return None;
                            }
                            let mut cells = Vec::new();
                            for x in 0..ext[0] as i32 {
                                for y in 0..ext[1] as i32 {
                                    for z in 0..ext[2] as i32 {
                                        cells.push([x, y, z]);
                                    }
                                }
                            }
                            cells.sort_unstable();
                            Some(Effect { cells, delta: [0, 0, 0] })
                        })
                        .collect();
                    out.push((format!("FILL {a} {b} {c}"), Arc::new(sig)));
                }
            }
        }
        for (ai, axis) in ["X", "Y", "Z"].iter().enumerate() {
            for n in (-self.lit..=self.lit).filter(|&n| n != 0) {
                let sig = (1..=k as i64)
                    .map(|t| {
                        let mut delta = [0; 3];
                        delta[ai] = (n * t) as i32;
                        Some(Effect { cells: Vec::new(), delta })
                    })
                    .collect();
                out.push((format!("MOVE {axis} {n}"), Arc::new(sig)));
            }
        }
        for (i, def) in defs.iter().enumerate() {
            for s in 1..=self.lit as usize {
                let sig = (1..=k).map(|t| if t * s <= k { def[t * s - 1].clone() } else { None }).collect();
                let text = if s == 1 { format!("CALL {}", def_name(i)) } else { format!("CALL {} {s}", def_name(i)) };
                out.push((text, Arc::new(sig)));
            }
        }
        out.into_iter().map(|(t, s)| (t.len(), t, s)).collect()
    }

    fn build(&self, defs: &[Sig], cap: usize, nodes: &mut u64) -> Result<Tables, SynthesisError> {
        let base = self.base_statements(defs);
        let mut stmt: Vec<Vec<Entry>> = (0..=cap).map(|_| Vec::new()).collect();
        let mut seq: Vec<Vec<Entry>> = (0..=cap).map(|_| Vec::new()).collect();
        let mut stmt_seen: HashMap<Sig, usize> = HashMap::new();
        let mut seq_seen: HashMap<Sig, usize> = HashMap::new();

        for l in 1..=cap {
            let mut cands: HashMap<Sig, String> = HashMap::new();
            let offer = |cands: &mut HashMap<Sig, String>, sig: Sig, text: String| {
                if is_dead(&sig) {
                    return;
                }
                match cands.get_mut(&sig) {
                    Some(t) if *t <= text => {}
                    Some(t) => *t = text,
                    None => {
                        cands.insert(sig, text);
                    }
                }
            };
            for (len, text, sig) in &base {
                if *len == l {
                    offer(&mut cands, sig.clone(), text.clone());
                }
            }
            for count in 2..=self.lit {
                let head = 12 + count.to_string().len();
                if l <= head {
                    continue;
                }
                for body in &seq[l - head] {
                    self.charge(nodes, 1)?;
                    let sig = body
                        .sig
                        .iter()
                        .map(|e| {
                            let e = e.as_ref()?;
                            let mut acc = e.clone();
                            for _ in 1..count {
                                acc = acc.then(e, self.d)?;
                            }
                            Some(acc)
                        })
                        .collect();
                    offer(&mut cands, Arc::new(sig), format!("REPEAT {count} {{\n{}\n}}", body.text));
                }
            }
            let mut fresh: Vec<Entry> = cands
                .into_iter()
                .filter(|(sig, _)| !stmt_seen.contains_key(sig))
                .map(|(sig, text)| Entry { len: l, text, sig })
                .collect();
            fresh.sort_by(|a, b| a.text.cmp(&b.text));
            for e in &fresh {
                stmt_seen.insert(e.sig.clone(), l);
            }
            stmt[l] = fresh;

            let mut cands: HashMap<Sig, String> = HashMap::new();
            for e in &stmt[l] {
                offer(&mut cands, e.sig.clone(), e.text.clone());
            }
            #[allow(clippy::needless_range_loop)]
            for a in 1..l.saturating_sub(1) {
                let b = l - 1 - a;
                if seq[a].is_empty() || stmt[b].is_empty() {
                    continue;
                }
                self.charge(nodes, (seq[a].len() * stmt[b].len()) as u64)?;
                for x in &seq[a] {
                    for y in &stmt[b] {
                        let sig: Vec<Option<Effect>> = x
                            .sig
                            .iter()
                            .zip(y.sig.iter())
                            .map(|(p, q)| p.as_ref()?.then(q.as_ref()?, self.d))
                            .collect();
                        if is_dead(&sig) {
                            continue;
                        }
                        offer(&mut cands, Arc::new(sig), format!("{}\n{}", x.text, y.text));
                    }
                }
            }
            let mut fresh: Vec<Entry> = cands
                .into_iter()
                .filter(|(sig, _)| !seq_seen.contains_key(sig))
                .map(|(sig, text)| Entry { len: l, text, sig })
                .collect();
            fresh.sort_by(|a, b| a.text.cmp(&b.text));
            for e in &fresh {
                seq_seen.insert(e.sig.clone(), l);
            }
            seq[l] = fresh;
        }

        let mut placing: HashMap<Vec<P>, Vec<Placing>> = HashMap::new();
        let mut best_placing: HashMap<(Vec<P>, P, P), (usize, String)> = HashMap::new();
        for e in stmt.iter().flatten() {
            let Some(eff) = &e.sig[0] else { continue };
            if eff.cells.is_empty() {
                continue;
            }
            let corner = min_corner(&eff.cells);
            let shape: Vec<P> = eff.cells.iter().map(|&c| sub(c, corner)).collect();
            let key = (shape, corner, sub(eff.delta, corner));
            let cand = (e.len, e.text.clone());
            match best_placing.get(&key) {
                Some(b) if *b <= cand => {}
                _ => {
                    best_placing.insert(key, cand);
                }
            }
        }
        let mut sorted: Vec<_> = best_placing.into_iter().collect();
        sorted.sort_by(|a, b| (a.1 .0, &a.1 .1).cmp(&(b.1 .0, &b.1 .1)));
        for ((shape, corner, after), (len, text)) in sorted {
            placing.entry(shape).or_default().push(Placing { len, text, corner, after });
        }

        let mut def_best: HashMap<Sig, (usize, String)> = HashMap::new();
        for e in seq.iter().flatten() {
            let sig: Vec<Option<Effect>> = e
                .sig
                .iter()
                .map(|x| x.as_ref().map(|x| Effect { cells: x.cells.clone(), delta: [0, 0, 0] }))
                .collect();
            if sig.iter().all(|x| x.as_ref().is_none_or(|x| x.cells.is_empty())) {
                continue;
            }
            let cand = (e.len, e.text.clone());
            let sig = Arc::new(sig);
            match def_best.get(&sig) {
                Some(b) if *b <= cand => {}
                _ => {
                    def_best.insert(sig, cand);
                }
            }
        }
        let mut defs: Vec<DefCandidate> =
            def_best.into_iter().map(|(sig, (len, body))| DefCandidate { len, body, sig }).collect();
        defs.sort_by(|a, b| (a.len, &a.body).cmp(&(b.len, &b.body)));

        Ok(Tables { stmt, placing, defs })
    }

    /// Cheapest pure-move statement sequence for every reachable
    /// displacement. Costs count one separator per statement.
    fn move_table(&self, root: &Tables) -> HashMap<P, (usize, String)> {
        let mut steps: Vec<(usize, String, P)> = Vec::new();
        for e in root.stmt.iter().flatten() {
            if let Some(eff) = &e.sig[0] {
                if eff.cells.is_empty() && eff.delta != [0, 0, 0] {
                    steps.push((e.len, e.text.clone(), eff.delta));
                }
            }
        }
        let bound = self.max_len + 1;
        let mut best: HashMap<P, (usize, String)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0usize, String::new(), [0i32; 3])));
        while let Some(Reverse((cost, text, at))) = heap.pop() {
            if best.contains_key(&at) {
                continue;
            }
            best.insert(at, (cost, text.clone()));
            for (len, t, delta) in &steps {
                let c = cost + len + 1;
                let next = add(at, *delta);
                if c <= bound && !best.contains_key(&next) {
                    heap.push(Reverse((c, format!("{text}{t}\n"), next)));
                }
            }
        }
        best
    }

    fn tables_for(&self, key: &CtxKey, nodes: &mut u64) -> Result<Arc<Tables>, SynthesisError> {
        if key.defs.is_empty() {
            return Ok(self.root.clone());
        }
        if let Some(t) = self.cache.lock().expect("cache poisoned").get(key) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.build(&key.defs, key.cap, nodes)?);
        self.cache.lock().expect("cache poisoned").insert(key.clone(), t.clone());
        Ok(t)
    }

    /// Shortest program of at most `max_len` bytes producing `s`, ties
    /// broken by the smallest canonical text.
    pub fn search(&self, s: &VoxelStructure) -> Result<Option<ComplexityBound>, SynthesisError> {
        if s.dims() != self.dims {
            return Err(SynthesisError::DimsMismatch);
        }
        let cells: Vec<P> = s.cells().map(|c| [c.x as i32, c.y as i32, c.z as i32]).collect();
        if cells.len() > 64 {
            return Err(SynthesisError::EnumerationBudgetExceeded { budget: self.node_budget });
        }
        let found = self.dijkstra(&cells)?;
        let Some((len, text)) = found else { return Ok(None) };
        let program = parse(&text).expect("enumerated programs parse");
        debug_assert_eq!(program_length(&program), len);
        let built = execute(&program, self.dims, ExecutionLimits::default());
        assert!(built.as_ref() == Ok(s), "enumerated witness does not reproduce the structure:\n{text}");
        Ok(Some(ComplexityBound { length: len, program, method: Method::Exhaustive }))
    }

    fn dijkstra(&self, cells: &[P]) -> Result<Option<(usize, String)>, SynthesisError> {
        if cells.is_empty() {
            return Ok(Some((0, String::new())));
        }
        let n = cells.len();
        let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let bit: HashMap<P, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let bound = self.max_len + 1;
        let mut nodes = 0u64;

        // Contexts seen by this search, with the placing options they
        // offer on this structure.
        struct Ctx {
            key: CtxKey,
            tables: Arc<Tables>,
            options: Vec<(u64, P, usize)>,
            shapes: Vec<Vec<P>>,
        }
        let mut ctxs: Vec<Ctx> = Vec::new();
        let mut ctx_ids: HashMap<CtxKey, usize> = HashMap::new();

        let fits = |sig: &Sig| {
            sig.iter().flatten().any(|e| {
                !e.cells.is_empty()
                    && cells.iter().any(|&p| {
                        let v = sub(p, e.cells[0]);
                        e.cells.iter().all(|&c| bit.contains_key(&add(c, v)))
                    })
            })
        };

        let mut open_ctx = |key: CtxKey, nodes: &mut u64, ctxs: &mut Vec<Ctx>| -> Result<usize, SynthesisError> {
            if let Some(&id) = ctx_ids.get(&key) {
                return Ok(id);
            }
            let tables = self.tables_for(&key, nodes)?;
            let mut options = Vec::new();
            let mut shapes = Vec::new();
            let mut add_option = |mask: u64, subset: &[P], options: &mut Vec<(u64, P, usize)>| {
                let o = min_corner(subset);
                let mut shape: Vec<P> = subset.iter().map(|&c| sub(c, o)).collect();
                shape.sort_unstable();
                if tables.placing.contains_key(&shape) {
                    options.push((mask, o, shapes.len()));
                    shapes.push(shape);
                }
            };
            if n <= 12 {
                for mask in 1..=full {
                    let subset: Vec<P> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| cells[i]).collect();
                    add_option(mask, &subset, &mut options);
                }
            } else {
                let mut seen = std::collections::HashSet::new();
                for shape in tables.placing.keys() {
                    for &p in cells {
                        let v = sub(p, shape[0]);
                        let mut mask = 0u64;
                        let mut subset = Vec::with_capacity(shape.len());
                        for &c in shape {
                            match bit.get(&add(c, v)) {
                                Some(&i) => {
                                    mask |= 1 << i;
                                    subset.push(add(c, v));
                                }
                                None => {
                                    mask = 0;
                                    break;
                                }
                            }
                        }
                        if mask != 0 && seen.insert(mask) {
                            add_option(mask, &subset, &mut options);
                        }
                    }
                }
                options.sort_by_key(|o| o.0);
            }
            let id = ctxs.len();
            ctx_ids.insert(key.clone(), id);
            ctxs.push(Ctx { key, tables, options, shapes });
            Ok(id)
        };

        let root = open_ctx(CtxKey { defs: Vec::new(), cap: self.max_len }, &mut nodes, &mut ctxs)?;
        type Key = (P, u64, usize);
        let mut best: HashMap<Key, (usize, String)> = HashMap::new();
        let mut closed: std::collections::HashSet<Key> = std::collections::HashSet::new();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0usize, String::new(), [0i32; 3], 0u64, root)));

        while let Some(Reverse((cost, text, cursor, mask, ctx))) = heap.pop() {
            if !closed.insert((cursor, mask, ctx)) {
                continue;
            }
            if mask == full {
                let mut text = text;
                text.pop();
                return Ok(Some((cost - 1, text)));
            }
            self.charge(&mut nodes, 1)?;
            let mut push = |c: usize, t: String, cur: P, m: u64, x: usize, heap: &mut BinaryHeap<_>| {
                let key = (cur, m, x);
                if closed.contains(&key) {
                    return;
                }
                match best.get(&key) {
                    Some((bc, bt)) if (*bc, bt) <= (c, &t) => {}
                    _ => {
                        best.insert(key, (c, t.clone()));
                        heap.push(Reverse((c, t, cur, m, x)));
                    }
                }
            };

            let tables = ctxs[ctx].tables.clone();
            for &(tmask, o, shape_id) in &ctxs[ctx].options {
                for p in &tables.placing[&ctxs[ctx].shapes[shape_id]] {
                    if cost + p.len + 1 > bound {
                        break;
                    }
                    let anchor = sub(o, p.corner);
                    let Some((mc, mt)) = self.moves.get(&sub(anchor, cursor)) else { continue };
                    let c = cost + mc + p.len + 1;
                    if c > bound {
                        continue;
                    }
                    push(c, format!("{text}{mt}{}\n", p.text), add(o, p.after), mask | tmask, ctx, &mut heap);
                }
            }

            let name = def_name(ctxs[ctx].key.defs.len());
            for cand in &tables.defs {
                let def_len = 8 + name.len() + 1 + cand.len;
                let c = cost + def_len + 1;
                if c + 7 > bound {
                    break;
                }
                if !fits(&cand.sig) {
                    continue;
                }
                let mut defs = ctxs[ctx].key.defs.clone();
                defs.push(cand.sig.clone());
                let cap = ctxs[ctx].key.cap - def_len - 1;
                let next = open_ctx(CtxKey { defs, cap }, &mut nodes, &mut ctxs)?;
                push(c, format!("{text}DEF {name} {{\n{}\n}}\n", cand.body), cursor, mask, next, &mut heap);
            }
        }
        Ok(None)
    }
}

/// Shortest program of at most `max_len` canonical bytes that builds `s`
/// in its own world, or `None` when there is none.
pub fn exhaustive_min(s: &VoxelStructure, max_len: usize) -> Result<Option<ComplexityBound>, SynthesisError> {
    Enumerator::new(s.dims(), max_len, DEFAULT_NODE_BUDGET)?.search(s)
}
