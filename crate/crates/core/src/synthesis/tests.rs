use proptest::prelude::*;

use super::*;
use crate::vm::{execute, parse, ExecutionLimits};
use crate::world::{Cell, Dims};

fn structure(dims: Dims, cells: &[(i64, i64, i64)]) -> VoxelStructure {
    VoxelStructure::from_cells(dims, cells.iter().map(|&(x, y, z)| Cell::new(x, y, z))).unwrap()
}

fn reproduces(b: &ComplexityBound, s: &VoxelStructure) -> bool {
    execute(&b.program, s.dims(), ExecutionLimits::default()).as_ref() == Ok(s)
        && b.length == program_length(&b.program)
}

#[test]
fn single_cell_and_empty() {
    let d = Dims::new(3, 3, 3);
    let one = structure(d, &[(0, 0, 0)]);
    let b = synthesize_min(&one).unwrap();
    assert_eq!((b.length, serialize(&b.program).as_str()), (5, "PLACE"));
    let empty = VoxelStructure::empty(d);
    assert_eq!(synthesize_min(&empty).unwrap().length, 0);
    assert_eq!(relative_complexity(&one, &empty).unwrap(), 5);
    assert_eq!(relative_complexity(&one, &one).unwrap(), 0);
}

#[test]
fn row_and_slab() {
    let d = Dims::new(4, 4, 1);
    let row = structure(d, &[(0, 0, 0), (1, 0, 0), (2, 0, 0)]);
    let b = synthesize_min(&row).unwrap();
    assert!(b.length <= 10);
    assert!(reproduces(&b, &row));
    let slab = structure(d, &(0..16).map(|i| (i % 4, i / 4, 0)).collect::<Vec<_>>());
    assert_eq!(synthesize_min(&slab).unwrap().length, 10);
}

#[test]
fn cell_limit() {
    let d = Dims::new(4, 4, 1);
    let slab = structure(d, &(0..16).map(|i| (i % 4, i / 4, 0)).collect::<Vec<_>>());
    let config = SynthesisConfig { max_cells: 10, ..SynthesisConfig::default() };
    assert!(matches!(synthesize_with(&slab, &config), Err(SynthesisError::BudgetExceeded { .. })));
}

#[test]
fn oracle_examples() {
    let d = Dims::new(3, 3, 3);
    let b = exhaustive_min(&structure(d, &[(0, 0, 0)]), 5).unwrap().unwrap();
    assert_eq!(serialize(&b.program), "PLACE");
    assert_eq!(b.method, Method::Exhaustive);
    assert!(exhaustive_min(&structure(d, &[(0, 0, 1)]), 5).unwrap().is_none());
    let row = structure(d, &[(0, 0, 0), (1, 0, 0), (2, 0, 0)]);
    let b = exhaustive_min(&row, 12).unwrap().unwrap();
    assert_eq!((b.length, serialize(&b.program).as_str()), (10, "FILL 3 1 1"));
    assert_eq!(exhaustive_min(&VoxelStructure::empty(d), 5).unwrap().unwrap().length, 0);
}

#[test]
fn oracle_finds_moves_and_loops() {
    let d = Dims::new(3, 3, 3);
    let b = exhaustive_min(&structure(d, &[(0, 0, 1)]), 40).unwrap().unwrap();
    assert_eq!(serialize(&b.program), "MOVE Z 1\nPLACE");
    // A diagonal: a loop beats spelling the moves out.
    let pair = structure(d, &[(0, 0, 0), (1, 1, 0), (2, 2, 0)]);
    let b = exhaustive_min(&pair, 40).unwrap().unwrap();
    assert!(reproduces(&b, &pair));
    let lit = program_length(&literal_program(&pair));
    assert!(b.length < lit, "{} vs {lit}", b.length);
    assert_eq!(serialize(&b.program), "REPEAT 3 {\nPLACE\nMOVE X 1\nMOVE Y 1\n}");
    assert!(b.length <= synthesize_min(&pair).unwrap().length);
}

#[test]
fn oracle_budget_guard() {
    let d = Dims::new(3, 3, 3);
    assert!(matches!(
        Enumerator::new(d, 40, 10),
        Err(SynthesisError::EnumerationBudgetExceeded { budget: 10 })
    ));
}

#[test]
fn overhead_cancels() {
    let d = Dims::new(5, 5, 2);
    let a = structure(d, &[(0, 0, 0), (1, 0, 0), (4, 4, 1)]);
    let b = structure(d, &[(2, 2, 0)]);
    let pa = synthesize_min(&a).unwrap();
    let pb = synthesize_min(&b).unwrap();
    let preamble = parse("DEF zz {\nFILL 2 2 2\n}").unwrap();
    let with = |p: &Program| {
        let mut inst = preamble.instructions.clone();
        inst.extend(p.instructions.iter().cloned());
        Program::new(inst)
    };
    let (qa, qb) = (with(&pa.program), with(&pb.program));
    assert_eq!(program_length(&qa), pa.length + program_length(&preamble) + 1);
    assert_eq!(execute(&qa, d, ExecutionLimits::default()).unwrap(), a);
    assert_eq!(
        program_length(&qa) as i64 - program_length(&qb) as i64,
        relative_complexity(&a, &b).unwrap()
    );
}

#[test]
fn empty_witness_gains_no_separator() {
    let d = Dims::new(2, 1, 1);
    let preamble = parse("DEF zz {\nPLACE\n}").unwrap();
    let empty = synthesize_min(&VoxelStructure::empty(d)).unwrap().program;
    let one = synthesize_min(&structure(d, &[(0, 0, 0)])).unwrap().program;
    let with = |p: &Program| {
        let mut inst = preamble.instructions.clone();
        inst.extend(p.instructions.iter().cloned());
        program_length(&Program::new(inst))
    };
    let overhead = program_length(&preamble);
    assert_eq!(with(&empty), overhead);
    assert_eq!(with(&one), overhead + 1 + program_length(&one));
}

fn arb_structure() -> impl Strategy<Value = VoxelStructure> {
    (1usize..7, 1usize..7, 1usize..4).prop_flat_map(|(nx, ny, nz)| {
        let dims = Dims::new(nx, ny, nz);
        proptest::collection::vec(any::<bool>(), nx * ny * nz).prop_map(move |bits| {
            let mut s = VoxelStructure::empty(dims);
            for (i, b) in bits.into_iter().enumerate() {
                if b {
                    s.insert(Cell::new((i % nx) as i64, (i / nx % ny) as i64, (i / (nx * ny)) as i64));
                }
            }
            s
        })
    })
}

proptest! {
    #[test]
    fn pipeline_is_sound_and_dominates_literal(s in arb_structure()) {
        let b = synthesize_min(&s).unwrap();
        prop_assert!(reproduces(&b, &s));
        prop_assert!(b.length <= program_length(&literal_program(&s)));
    }

    #[test]
    fn every_pass_is_sound(s in arb_structure()) {
        for p in [
            literal_program(&s),
            cuboid_program(&s),
            fold_program(&literal_program(&s)),
            extract_defs(&fold_program(&cuboid_program(&s)), 8),
        ] {
            prop_assert_eq!(execute(&p, s.dims(), ExecutionLimits::default()).unwrap(), s.clone());
        }
    }

    #[test]
    fn disjoint_union_is_subadditive(a in arb_structure(), b in arb_structure(), gap in 1usize..3) {
        let (da, db) = (a.dims(), b.dims());
        let dims = Dims::new(da.nx + gap + db.nx, da.ny.max(db.ny), da.nz.max(db.nz));
        let mut u = a.with_dims(dims).unwrap();
        let v = b.with_dims(dims).unwrap().translated((da.nx + gap) as i64, 0, 0).unwrap();
        for c in v.cells() {
            u.insert(c);
        }
        let lu = synthesize_min(&u).unwrap().length;
        let la = synthesize_min(&a).unwrap().length;
        let lb = synthesize_min(&b).unwrap().length;
        prop_assert!(lu <= la + lb + 30, "{lu} > {la} + {lb} + 30");
    }
}
