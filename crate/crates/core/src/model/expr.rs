//! Update expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or    := xor ('|' xor)*
//! xor   := and ('^' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | atom
//! atom  := ident ['\''] | bits | '(' or ')' | FUNC '(' or ',' or ')'
//! ```
//!
//! `FUNC` is one of `XOR AND OR XNOR NAND NOR`; `bits` is a run of `0`/`1`
//! and denotes a constant vector. A trailing `'` refers to the value the
//! variable takes after the current step.

use std::fmt;

use crate::binvec::{BinaryVector, Gate};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var { name: String, next: bool },
    Const(BinaryVector),
    Not(Box<Expr>),
    Gate {
        gate: Gate,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var {
            name: name.to_string(),
            next: false,
        }
    }

    pub fn next(name: &str) -> Expr {
        Expr::Var {
            name: name.to_string(),
            next: true,
        }
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn gate(gate: Gate, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Gate {
            gate,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Every variable reference, in left-to-right order, with repeats.
    pub fn references(&self) -> Vec<(&str, bool)> {
        let mut out = Vec::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs<'a>(&'a self, out: &mut Vec<(&'a str, bool)>) {
        match self {
            Expr::Var { name, next } => out.push((name, *next)),
            Expr::Const(_) => {}
            Expr::Not(e) => e.collect_refs(out),
            Expr::Gate { lhs, rhs, .. } => {
                lhs.collect_refs(out);
                rhs.collect_refs(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var { name, next } => {
                f.write_str(name)?;
                if *next {
                    f.write_str("'")?;
                }
                Ok(())
            }
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Not(e) => write!(f, "!{e}"),
            Expr::Gate { gate, lhs, rhs } => match gate {
                Gate::Xor => write!(f, "({lhs} ^ {rhs})"),
                Gate::And => write!(f, "({lhs} & {rhs})"),
                Gate::Or => write!(f, "({lhs} | {rhs})"),
                Gate::Xnor | Gate::Nand | Gate::Nor => {
                    write!(f, "{gate}({lhs}, {rhs})")
                }
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Bits(String),
    Prime,
    Bang,
    Amp,
    Caret,
    Pipe,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Bits(s) => format!("constant '{s}'"),
            Tok::Prime => "'''".into(),
            Tok::Bang => "'!'".into(),
            Tok::Amp => "'&'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

fn syntax(column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        column,
        message: message.into(),
    }
}

/// Tokens with their 1-based character column.
fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let ch = chars[i];
        let single = match ch {
            '\'' => Some(Tok::Prime),
            '!' | '~' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '^' => Some(Tok::Caret),
            '|' => Some(Tok::Pipe),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            toks.push((t, col));
            i += 1;
        } else if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if let Some(bad) = word.find(|c| c != '0' && c != '1') {
                return Err(syntax(col + bad, format!("constants may only contain 0 and 1, found {word:?}")));
            }
            toks.push((Tok::Bits(word), col));
        } else {
            return Err(syntax(col, format!("unexpected character {ch:?}")));
        }
    }
    Ok(toks)
}

fn function_gate(name: &str) -> Option<Gate> {
    Gate::ALL.into_iter().find(|g| g.name() == name)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

const OPERAND: &str = "identifier, constant, '!' or '('";

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".into(), Tok::describe)
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(
                self.col(),
                format!("expected {}, found {}", tok.describe(), self.found()),
            ))
        }
    }

    fn starts_operand(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::Bits(_) | Tok::Bang | Tok::LParen)
        )
    }

    /// One left-associative precedence level.
    fn binary(
        &mut self,
        op: Tok,
        gate: Gate,
        next: fn(&mut Parser) -> Result<Expr>,
    ) -> Result<Expr> {
        let mut lhs = next(self)?;
        while self.peek() == Some(&op) {
            let op_col = self.col();
            self.pos += 1;
            if !self.starts_operand() {
                return Err(syntax(
                    op_col,
                    format!("expected {OPERAND} after {}, found {}", op.describe(), self.found()),
                ));
            }
            let rhs = next(self)?;
            lhs = Expr::gate(gate, lhs, rhs);
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr> {
        self.binary(Tok::Pipe, Gate::Or, Parser::xor)
    }

    fn xor(&mut self) -> Result<Expr> {
        self.binary(Tok::Caret, Gate::Xor, Parser::and)
    }

    fn and(&mut self) -> Result<Expr> {
        self.binary(Tok::Amp, Gate::And, Parser::unary)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Bang) {
            let col = self.col();
            self.pos += 1;
            if !self.starts_operand() {
                return Err(syntax(col, format!("expected {OPERAND} after '!', found {}", self.found())));
            }
            return Ok(Expr::negate(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let gate = function_gate(&name).ok_or_else(|| {
                        syntax(col, format!("unknown function '{name}', expected one of XOR, AND, OR, XNOR, NAND, NOR"))
                    })?;
                    self.pos += 1;
                    let lhs = self.or()?;
                    self.expect(Tok::Comma)?;
                    let rhs = self.or()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::gate(gate, lhs, rhs));
                }
                let next = self.peek() == Some(&Tok::Prime);
                if next {
                    self.pos += 1;
                }
                Ok(Expr::Var { name, next })
            }
            Some(Tok::Bits(bits)) => {
                self.pos += 1;
                Ok(Expr::Const(bits.parse()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.or()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(syntax(col, format!("expected {OPERAND}, found {}", self.found()))),
        }
    }
}

/// Parses one update expression. Errors carry the 1-based column.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: text.chars().count() + 1,
    };
    let e = p.or()?;
    if p.pos < p.toks.len() {
        return Err(syntax(
            p.col(),
            format!("expected operator or end of input, found {}", p.found()),
        ));
    }
    Ok(e)
}
