//! Recursive-descent parser for φ rules.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' atom)?
//! atom   := INT | 'n' | 'x' '(' expr ')' | '(' expr ')'
//! ```

use std::str::FromStr;

use num_bigint::BigUint;

use super::ast::{BinOp, Expr};
use super::PhiError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigUint),
    N,
    X,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Caret,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::N => "'n'".into(),
            Tok::X => "'x'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const ATOM_START: &[&str] = &["integer", "'n'", "'x'", "'('"];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, PhiError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = pos;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let value = BigUint::from_str(&text[pos..end]).expect("ascii digits");
            out.push((pos, Tok::Int(value)));
            continue;
        }
        let tok = match c {
            'n' => Tok::N,
            'x' => Tok::X,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            other => {
                return Err(PhiError::Syntax {
                    position: pos,
                    expected: ATOM_START.iter().chain(&["operator"]).map(|s| s.to_string()).collect(),
                    found: format!("{other:?}"),
                })
            }
        };
        out.push((pos, tok));
        chars.next();
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> PhiError {
        let (position, tok) = &self.toks[self.at];
        PhiError::Syntax {
            position: *position,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), PhiError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, PhiError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, PhiError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, PhiError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exp = self.atom()?;
            return Ok(Expr::binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, PhiError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::N => {
                self.bump();
                Ok(Expr::Index)
            }
            Tok::X => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Digit(Box::new(inner)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.error(ATOM_START)),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, PhiError> {
    if text.trim().is_empty() {
        return Err(PhiError::EmptyInput);
    }
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(e)
}
