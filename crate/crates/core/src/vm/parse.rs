use super::ast::{is_identifier, Axis, Instruction, Program};
use super::VmError;

struct Token<'a> {
    text: &'a str,
    pos: usize,
}

fn tokenize(src: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in src.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &src[s..i], pos: s });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token { text: &src[s..], pos: s });
    }
    out
}

struct Parser<'a> {
    tokens: Vec<Token<'a>>,
    at: usize,
    end: usize,
    defined: Vec<String>,
}

/// Parses DSL source. Tokens are maximal runs of non-whitespace, so
/// layout between tokens is free.
pub fn parse(src: &str) -> Result<Program, VmError> {
    let tokens = tokenize(src);
    let mut p = Parser { tokens, at: 0, end: src.len(), defined: Vec::new() };
    let instructions = p.block(true, None)?;
    Ok(Program::new(instructions))
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.at)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn syntax(&self, expected: &str) -> VmError {
        VmError::Syntax {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self.peek().map_or_else(|| "end of input".to_string(), |t| format!("`{}`", t.text)),
        }
    }

    fn next_text(&mut self, expected: &str) -> Result<(&'a str, usize), VmError> {
        let tok = self.peek().ok_or_else(|| self.syntax(expected))?;
        let out = (tok.text, tok.pos);
        self.at += 1;
        Ok(out)
    }

    fn expect(&mut self, word: &str) -> Result<(), VmError> {
        match self.peek() {
            Some(t) if t.text == word => {
                self.at += 1;
                Ok(())
            }
            _ => Err(self.syntax(&format!("`{word}`"))),
        }
    }

    fn int(&mut self) -> Result<(i64, usize), VmError> {
        let pos = self.pos();
        let (text, _) = self.next_text("integer")?;
        let digits = text.strip_prefix('-').unwrap_or(text);
        let well_formed = !digits.is_empty()
            && digits.bytes().all(|b| b.is_ascii_digit())
            && !(digits.len() > 1 && digits.starts_with('0'));
        if !well_formed {
            self.at -= 1;
            return Err(self.syntax("integer"));
        }
        text.parse::<i64>()
            .map(|v| (v, pos))
            .map_err(|_| VmError::BadLiteral { pos: Some(pos), message: format!("integer `{text}` out of range") })
    }

    fn at_least(&mut self, min: i64, what: &str) -> Result<u64, VmError> {
        let (v, pos) = self.int()?;
        if v < min {
            return Err(VmError::BadLiteral { pos: Some(pos), message: format!("{what} must be >= {min}, got {v}") });
        }
        Ok(v as u64)
    }

    fn block(&mut self, top_level: bool, within: Option<&str>) -> Result<Vec<Instruction>, VmError> {
        let mut out = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                if top_level {
                    return Ok(out);
                }
                return Err(self.syntax("`}`"));
            };
            if tok.text == "}" {
                if top_level {
                    return Err(self.syntax("statement"));
                }
                self.at += 1;
                return Ok(out);
            }
            out.push(self.statement(top_level, within)?);
        }
    }

    fn statement(&mut self, top_level: bool, within: Option<&str>) -> Result<Instruction, VmError> {
        let keyword_pos = self.pos();
        let (keyword, _) = self.next_text("statement")?;
        match keyword {
            "PLACE" => Ok(Instruction::Place),
            "FILL" => {
                let dx = self.at_least(1, "FILL extent")?;
                let dy = self.at_least(1, "FILL extent")?;
                let dz = self.at_least(1, "FILL extent")?;
                Ok(Instruction::Fill { dx, dy, dz })
            }
            "MOVE" => {
                let axis = match self.peek().map(|t| t.text) {
                    Some("X") => Axis::X,
                    Some("Y") => Axis::Y,
                    Some("Z") => Axis::Z,
                    _ => return Err(self.syntax("axis `X`, `Y` or `Z`")),
                };
                self.at += 1;
                let (n, pos) = self.int()?;
                if n == 0 {
                    return Err(VmError::BadLiteral { pos: Some(pos), message: "MOVE distance must be nonzero".into() });
                }
                Ok(Instruction::Move { axis, n })
            }
            "REPEAT" => {
                let count = self.at_least(2, "REPEAT count")?;
                self.expect("{")?;
                let body = self.block(false, within)?;
                Ok(Instruction::Repeat { count, body })
            }
            "DEF" => {
                if !top_level {
                    self.at -= 1;
                    return Err(self.syntax("statement (DEF is only allowed at top level)"));
                }
                let name = self.ident()?;
                if self.defined.iter().any(|d| d == &name) {
                    return Err(VmError::DuplicateName { name });
                }
                self.expect("{")?;
                let body = self.block(false, Some(&name))?;
                self.defined.push(name.clone());
                Ok(Instruction::Def { name, body })
            }
            "CALL" => {
                let name_pos = self.pos();
                let name = self.ident()?;
                if within == Some(name.as_str()) {
                    return Err(VmError::Recursion { name });
                }
                if !self.defined.iter().any(|d| d == &name) {
                    return Err(VmError::UnknownName { name, pos: Some(name_pos) });
                }
                let has_scale = self
                    .peek()
                    .is_some_and(|t| t.text.starts_with(|c: char| c.is_ascii_digit() || c == '-'));
                let scale = if has_scale { self.at_least(1, "CALL scale")? } else { 1 };
                Ok(Instruction::Call { name, scale })
            }
            _ => {
                self.at -= 1;
                debug_assert_eq!(self.pos(), keyword_pos);
                Err(self.syntax("statement"))
            }
        }
    }

    fn ident(&mut self) -> Result<String, VmError> {
        match self.peek() {
            Some(t) if is_identifier(t.text) => {
                let name = t.text.to_string();
                self.at += 1;
                Ok(name)
            }
            _ => Err(self.syntax("identifier")),
        }
    }
}
