use std::fmt;

use super::VmError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    Place,
    Fill { dx: u64, dy: u64, dz: u64 },
    Move { axis: Axis, n: i64 },
    Repeat { count: u64, body: Vec<Instruction> },
    Def { name: String, body: Vec<Instruction> },
    Call { name: String, scale: u64 },
}

impl Instruction {
    pub fn fill(dx: u64, dy: u64, dz: u64) -> Self {
        Instruction::Fill { dx, dy, dz }
    }

    pub fn mv(axis: Axis, n: i64) -> Self {
        Instruction::Move { axis, n }
    }

    pub fn repeat(count: u64, body: Vec<Instruction>) -> Self {
        Instruction::Repeat { count, body }
    }

    pub fn def(name: impl Into<String>, body: Vec<Instruction>) -> Self {
        Instruction::Def { name: name.into(), body }
    }

    pub fn call(name: impl Into<String>, scale: u64) -> Self {
        Instruction::Call { name: name.into(), scale }
    }

    pub fn is_move(&self) -> bool {
        matches!(self, Instruction::Move { .. })
    }

    /// Canonical byte length of this instruction, including the lines of
    /// any body.
    pub fn canonical_len(&self) -> usize {
        match self {
            Instruction::Place => 5,
            Instruction::Fill { dx, dy, dz } => 7 + digits(*dx) + digits(*dy) + digits(*dz),
            Instruction::Move { n, .. } => 7 + n.unsigned_abs().to_string().len() + usize::from(*n < 0),
            Instruction::Repeat { count, body } => 11 + digits(*count) + body_len(body),
            Instruction::Def { name, body } => 8 + name.len() + body_len(body),
            Instruction::Call { name, scale } => {
                5 + name.len() + if *scale == 1 { 0 } else { 1 + digits(*scale) }
            }
        }
    }
}

fn digits(v: u64) -> usize {
    v.to_string().len()
}

fn body_len(body: &[Instruction]) -> usize {
    if body.is_empty() {
        0
    } else {
        1 + block_len(body)
    }
}

/// Canonical length of an instruction list joined by single LFs.
pub fn block_len(body: &[Instruction]) -> usize {
    body.iter().map(Instruction::canonical_len).sum::<usize>() + body.len().saturating_sub(1)
}

/// Identifier rule shared by DEF names and dictionary pattern names.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Program {
    pub instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        Program { instructions }
    }

    /// Top-level definitions in program order.
    pub fn defs(&self) -> Vec<(&str, &[Instruction])> {
        self.instructions
            .iter()
            .filter_map(|i| match i {
                Instruction::Def { name, body } => Some((name.as_str(), body.as_slice())),
                _ => None,
            })
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Checks literal ranges, name uniqueness, top-level-only DEFs and that
    /// every CALL targets an earlier DEF.
    pub fn validate(&self) -> Result<(), VmError> {
        let mut defined: Vec<&str> = Vec::new();
        for inst in &self.instructions {
            if let Instruction::Def { name, body } = inst {
                if !is_identifier(name) {
                    return Err(VmError::BadLiteral { pos: None, message: format!("`{name}` is not an identifier") });
                }
                if defined.contains(&name.as_str()) {
                    return Err(VmError::DuplicateName { name: name.clone() });
                }
                validate_block(body, &defined, Some(name))?;
                defined.push(name);
            } else {
                validate_block(std::slice::from_ref(inst), &defined, None)?;
            }
        }
        Ok(())
    }
}

fn validate_block(body: &[Instruction], defined: &[&str], within: Option<&str>) -> Result<(), VmError> {
    for inst in body {
        match inst {
            Instruction::Place => {}
            Instruction::Fill { dx, dy, dz } => {
                if *dx < 1 || *dy < 1 || *dz < 1 {
                    return Err(VmError::BadLiteral { pos: None, message: "FILL extents must be >= 1".into() });
                }
            }
            Instruction::Move { n, .. } => {
                if *n == 0 {
                    return Err(VmError::BadLiteral { pos: None, message: "MOVE distance must be nonzero".into() });
                }
            }
            Instruction::Repeat { count, body } => {
                if *count < 2 {
                    return Err(VmError::BadLiteral { pos: None, message: "REPEAT count must be >= 2".into() });
                }
                validate_block(body, defined, within)?;
            }
            Instruction::Def { name, .. } => {
                return Err(VmError::Syntax {
                    pos: 0,
                    expected: "statement (DEF is only allowed at top level)".into(),
                    found: format!("DEF {name}"),
                });
            }
            Instruction::Call { name, scale } => {
                if *scale < 1 {
                    return Err(VmError::BadLiteral { pos: None, message: "CALL scale must be >= 1".into() });
                }
                if within == Some(name.as_str()) {
                    return Err(VmError::Recursion { name: name.clone() });
                }
                if !defined.contains(&name.as_str()) {
                    return Err(VmError::UnknownName { name: name.clone(), pos: None });
                }
            }
        }
    }
    Ok(())
}

fn write_block(f: &mut fmt::Formatter<'_>, body: &[Instruction]) -> fmt::Result {
    for (i, inst) in body.iter().enumerate() {
        if i > 0 {
            f.write_str("\n")?;
        }
        write!(f, "{inst}")?;
    }
    Ok(())
}

/// Canonical text: one instruction per line, single spaces, block headers
/// ending in `{`, closing `}` on its own line, no trailing newline.
impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Place => f.write_str("PLACE"),
            Instruction::Fill { dx, dy, dz } => write!(f, "FILL {dx} {dy} {dz}"),
            Instruction::Move { axis, n } => write!(f, "MOVE {axis} {n}"),
            Instruction::Repeat { count, body } => {
                write!(f, "REPEAT {count} {{")?;
                if !body.is_empty() {
                    f.write_str("\n")?;
                    write_block(f, body)?;
                }
                f.write_str("\n}")
            }
            Instruction::Def { name, body } => {
                write!(f, "DEF {name} {{")?;
                if !body.is_empty() {
                    f.write_str("\n")?;
                    write_block(f, body)?;
                }
                f.write_str("\n}")
            }
            Instruction::Call { name, scale } => {
                if *scale == 1 {
                    write!(f, "CALL {name}")
                } else {
                    write!(f, "CALL {name} {scale}")
                }
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_block(f, &self.instructions)
    }
}
