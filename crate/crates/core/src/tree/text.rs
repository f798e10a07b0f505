//! Canonical infix text: `(a op b)` with single spaces around the operator,
//! variables `x1`..`x6`, constants in shortest round-trip form, and
//! `sig(a)` for the logistic node.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Node, Op};
use crate::data::FEATURE_COUNT;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

pub(super) fn to_text(node: &Node) -> String {
    let mut out = String::new();
    write_node(node, &mut out);
    out
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Var(i) => {
            let _ = write!(out, "x{}", i + 1);
        }
        Node::Const(c) => {
            let _ = write!(out, "{c:?}");
        }
        Node::Binary { op, left, right } => {
            out.push('(');
            write_node(left, out);
            out.push(' ');
            out.push(op.symbol());
            out.push(' ');
            write_node(right, out);
            out.push(')');
        }
        Node::Logistic(inner) => {
            out.push_str("sig(");
            write_node(inner, out);
            out.push(')');
        }
    }
}

pub(super) fn parse(s: &str) -> Result<Node, ParseError> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let node = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(node)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        self.skip_ws();
        match self.src.get(self.pos) {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let left = self.expr()?;
                self.skip_ws();
                let op = match self.src.get(self.pos) {
                    Some(b'+') => Op::Add,
                    Some(b'-') => Op::Sub,
                    Some(b'*') => Op::Mul,
                    Some(b'/') => Op::Div,
                    _ => return Err(self.error("expected operator")),
                };
                self.pos += 1;
                let right = self.expr()?;
                self.expect(b')')?;
                Ok(Node::binary(op, left, right))
            }
            Some(b'x') => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.take_while(|c| c.is_ascii_digit());
                let index: usize = digits.parse().map_err(|_| ParseError {
                    position: start,
                    message: "expected variable index".into(),
                })?;
                if index == 0 || index > FEATURE_COUNT {
                    return Err(ParseError {
                        position: start,
                        message: format!("variable x{index} out of range x1..x{FEATURE_COUNT}"),
                    });
                }
                Ok(Node::Var(index - 1))
            }
            Some(b's') => {
                if self.src[self.pos..].starts_with(b"sig(") {
                    self.pos += 4;
                    let inner = self.expr()?;
                    self.expect(b')')?;
                    Ok(Node::Logistic(Box::new(inner)))
                } else {
                    Err(self.error("unknown token"))
                }
            }
            Some(c) if c.is_ascii_digit() || *c == b'-' || *c == b'.' => {
                let start = self.pos;
                let tok = self.take_while(|c| {
                    c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E')
                });
                match tok.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Node::Const(v)),
                    _ => Err(ParseError {
                        position: start,
                        message: format!("invalid constant {tok:?}"),
                    }),
                }
            }
            Some(_) => Err(self.error("unknown token")),
        }
    }

    fn take_while(&mut self, f: impl Fn(u8) -> bool) -> String {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|&c| f(c)) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
}
