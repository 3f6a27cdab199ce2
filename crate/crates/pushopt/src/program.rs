//! Programs: parsing, printing, and the atom representation.
//!
//! A program is an ordered list of atoms. An atom is a literal (`true`,
//! `-2`, `0.5`), a named instruction, or a parenthesised block of further
//! atoms. The text format is whitespace-separated tokens with balanced
//! parentheses; the canonical printed form wraps the whole program in one
//! pair of parentheses, so `parse(print(p))` structurally equals `p`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::op::{registry, Op};

/// One executable atom of a program.
#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Bool(bool),
    Int(i64),
    Float(f64),
    Op(Op),
    Block(Arc<[Instruction]>),
}

impl Instruction {
    /// Number of atoms this item contributes to a program's size.
    /// A block counts itself plus everything nested inside it, since the
    /// interpreter charges one execution for unpacking the block.
    pub fn atom_count(&self) -> usize {
        match self {
            Instruction::Block(items) => {
                1 + items.iter().map(Instruction::atom_count).sum::<usize>()
            }
            _ => 1,
        }
    }
}

/// An evolvable, executable Push program.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub items: Vec<Instruction>,
}

impl Program {
    pub fn new(items: Vec<Instruction>) -> Self {
        Program { items }
    }

    pub fn empty() -> Self {
        Program { items: Vec::new() }
    }

    /// Total atom count, including atoms inside nested blocks.
    pub fn atom_count(&self) -> usize {
        self.items.iter().map(Instruction::atom_count).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unknown instruction `{token}` at token {position}")]
    UnknownInstruction { token: String, position: usize },
    #[error("unbalanced `)` at token {position}")]
    UnexpectedClose { position: usize },
    #[error("unclosed `(` opened at token {position}")]
    UnclosedOpen { position: usize },
}

enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if let Some(tail) = rest.strip_prefix('(') {
            tokens.push(Token::Open);
            rest = tail;
        } else if let Some(tail) = rest.strip_prefix(')') {
            tokens.push(Token::Close);
            rest = tail;
        } else {
            let end = rest
                .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
                .unwrap_or(rest.len());
            tokens.push(Token::Atom(&rest[..end]));
            rest = &rest[end..];
        }
    }
    tokens
}

fn parse_atom(token: &str, position: usize) -> Result<Instruction, ParseError> {
    match token {
        "true" => return Ok(Instruction::Bool(true)),
        "false" => return Ok(Instruction::Bool(false)),
        _ => {}
    }
    if let Ok(i) = token.parse::<i64>() {
        return Ok(Instruction::Int(i));
    }
    // Float literals must be visibly floats: they carry a decimal point or
    // an exponent, so `7` stays an integer and `inf` stays unresolvable.
    if token.contains('.') || token.contains(['e', 'E']) {
        if let Ok(f) = token.parse::<f64>() {
            if f.is_finite() {
                return Ok(Instruction::Float(f));
            }
        }
    }
    if let Some(op) = registry().lookup(token) {
        return Ok(Instruction::Op(op));
    }
    Err(ParseError::UnknownInstruction {
        token: token.to_string(),
        position,
    })
}

/// Parses program text.
///
/// If the entire text is a single parenthesised group, the group's contents
/// become the program (the canonical printed form); otherwise the top-level
/// token sequence is the program and every parenthesised group is a block.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(text);
    // (open position, items collected at that nesting level)
    let mut stack: Vec<(usize, Vec<Instruction>)> = vec![(0, Vec::new())];
    for (index, token) in tokens.iter().enumerate() {
        let position = index + 1;
        match token {
            Token::Open => stack.push((position, Vec::new())),
            Token::Close => {
                let (_, items) = stack.pop().expect("level");
                let Some(parent) = stack.last_mut() else {
                    return Err(ParseError::UnexpectedClose { position });
                };
                parent.1.push(Instruction::Block(items.into()));
            }
            Token::Atom(text) => {
                stack
                    .last_mut()
                    .expect("level")
                    .1
                    .push(parse_atom(text, position)?);
            }
        }
    }
    if stack.len() > 1 {
        return Err(ParseError::UnclosedOpen {
            position: stack.last().expect("level").0,
        });
    }
    let (_, top) = stack.pop().expect("level");
    // Strip the conventional outer parentheses.
    if top.len() == 1 {
        if let Some(Instruction::Block(items)) = top.first() {
            return Ok(Program::new(items.to_vec()));
        }
    }
    Ok(Program::new(top))
}

/// Formats a float so it re-parses as a float (always keeps a `.` or
/// exponent) and recovers the exact same value.
pub fn format_float(value: f64) -> String {
    let mut s = format!("{value}");
    if !s.contains('.') && !s.contains(['e', 'E']) {
        s.push_str(".0");
    }
    s
}

fn write_item(out: &mut String, item: &Instruction) {
    match item {
        Instruction::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Instruction::Int(i) => out.push_str(&i.to_string()),
        Instruction::Float(f) => out.push_str(&format_float(*f)),
        Instruction::Op(op) => out.push_str(registry().name(*op)),
        Instruction::Block(items) => {
            out.push('(');
            for (i, inner) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_item(out, inner);
            }
            out.push(')');
        }
    }
}

/// Prints a program in canonical form: `(atom atom ...)`.
pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    out.push('(');
    for (i, item) in program.items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_item(&mut out, item);
    }
    out.push(')');
    out
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}
