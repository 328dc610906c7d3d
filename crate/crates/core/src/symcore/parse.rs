//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := ("+" | "-") unary | power
//! power   := atom ("^" exponent)?
//! exponent:= "-"? INTEGER | "(" "-"? INTEGER ")"
//! atom    := INTEGER | IDENT | "(" expr ")"
//! IDENT   := [A-Za-z_][A-Za-z0-9_]*
//! INTEGER := [0-9]+
//! ```
//!
//! `-x^2` parses as `-(x^2)`; `a/b*c` as `(a/b)*c`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::error::SymError;
use super::expr::Expr;
use super::symbols::SymbolTable;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>, SymError> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_whitespace() {
                lx.pos += 1;
            }
            let start = lx.pos;
            let Some(&c) = lx.src.get(lx.pos) else {
                out.push((Tok::End, start));
                return Ok(out);
            };
            if c.is_ascii_digit() {
                while lx.pos < lx.src.len() && lx.src[lx.pos].is_ascii_digit() {
                    lx.pos += 1;
                }
                let digits = std::str::from_utf8(&lx.src[start..lx.pos]).expect("ascii");
                out.push((Tok::Int(digits.parse().expect("digits")), start));
            } else if c.is_ascii_alphabetic() || c == b'_' {
                while lx.pos < lx.src.len()
                    && (lx.src[lx.pos].is_ascii_alphanumeric() || lx.src[lx.pos] == b'_')
                {
                    lx.pos += 1;
                }
                let name = std::str::from_utf8(&lx.src[start..lx.pos]).expect("ascii");
                out.push((Tok::Ident(name.to_string()), start));
            } else if b"+-*/^()".contains(&c) {
                lx.pos += 1;
                out.push((Tok::Op(c as char), start));
            } else {
                return Err(SymError::Syntax {
                    position: start,
                    message: format!(
                        "unexpected character `{}`",
                        text[start..].chars().next().unwrap_or('?')
                    ),
                });
            }
        }
    }
}

struct Parser<'t> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    table: &'t Arc<SymbolTable>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SymError> {
        Err(SymError::Syntax {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), SymError> {
        if *self.peek() == Tok::Op(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let pos = self.pos();
                    let rhs = self.unary()?;
                    acc = acc.checked_div(&rhs).map_err(|_| SymError::Syntax {
                        position: pos,
                        message: "division by zero".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn exponent(&mut self) -> Result<i32, SymError> {
        let paren = *self.peek() == Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.bump();
        }
        let e = match self.bump() {
            Tok::Int(n) => i32::try_from(n).or_else(|_| self.error("exponent too large"))?,
            _ => return self.error("exponent must be an integer literal"),
        };
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -e } else { e })
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let pos = self.pos();
            let e = self.exponent()?;
            return base.powi(e).map_err(|_| SymError::Syntax {
                position: pos,
                message: "negative power of zero".into(),
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SymError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::rational(self.table, BigRational::from_integer(n))),
            Tok::Ident(name) => match self.table.lookup(&name) {
                Some(id) => Ok(Expr::symbol(self.table, id)),
                None => Err(SymError::UnknownIdentifier {
                    name,
                    position: pos,
                }),
            },
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::End => Err(SymError::Syntax {
                position: pos,
                message: "unexpected end of input".into(),
            }),
            Tok::Op(c) => Err(SymError::Syntax {
                position: pos,
                message: format!("unexpected `{c}`"),
            }),
        }
    }
}

pub fn parse(text: &str, table: &Arc<SymbolTable>) -> Result<Expr, SymError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, table };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}
