//! Infix expression parser: `+ - * / ^`, parentheses, integers, decimals and
//! identifiers. `^` binds tighter than unary minus on its left and is right
//! associative.

use std::str::FromStr;

use num_bigint::BigInt;

use super::expr::{Expr, Symbol, Q};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message} at offset {offset}")]
pub struct ExprParseError {
    pub message: String,
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize, usize)>, ExprParseError> {
    let mut lx = Lexer { src, toks: Vec::new() };
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if "+-*/^()".contains(c) {
            lx.toks.push((Tok::Op(c), pos, 1));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].1.is_ascii_digit() || bytes[i].1 == '.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i].1 == 'e' || bytes[i].1 == 'E') {
                let save = i;
                i += 1;
                if i < bytes.len() && (bytes[i].1 == '+' || bytes[i].1 == '-') {
                    i += 1;
                }
                if i < bytes.len() && bytes[i].1.is_ascii_digit() {
                    while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let end = bytes.get(i).map(|b| b.0).unwrap_or(src.len());
            let text = &lx.src[pos..end];
            let value = parse_decimal(text).ok_or_else(|| ExprParseError {
                message: format!("malformed number `{text}`"),
                offset: pos,
                len: end - pos,
            })?;
            lx.toks.push((Tok::Num(value), pos, end - pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].1.is_alphanumeric() || bytes[i].1 == '_' || bytes[i].1 == '\'') {
                i += 1;
            }
            let end = bytes.get(i).map(|b| b.0).unwrap_or(src.len());
            lx.toks.push((Tok::Ident(src[pos..end].to_string()), pos, end - pos));
            continue;
        }
        return Err(ExprParseError { message: format!("unexpected character `{c}`"), offset: pos, len: c.len_utf8() });
    }
    Ok(lx.toks)
}

/// Exact value of a decimal literal such as `0.25` or `1e-3`.
pub fn parse_decimal(text: &str) -> Option<Q> {
    let (mant, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], i64::from_str(&text[i + 1..]).ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if frac_part.contains('.') {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n = BigInt::from_str(&digits).ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let v = if scale >= 0 {
        Q::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    Some(v)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ExprParseError> {
        let len = self.toks.get(self.pos).map(|t| t.2).unwrap_or(0);
        Err(ExprParseError { message: msg.to_string(), offset: self.offset(), len })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                let t = self.term()?;
                terms.push(Expr::Mul(vec![Expr::int(-1), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat('*') {
                factors.push(self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                factors.push(Expr::Pow(Box::new(d), Box::new(Expr::int(-1))));
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Mul(factors) })
    }

    fn unary(&mut self) -> Result<Expr, ExprParseError> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(Expr::Mul(vec![Expr::int(-1), inner]));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprParseError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(Symbol::new(&s)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(_) => self.err("unexpected token"),
            None => self.err("unexpected end of expression"),
        }
    }
}

/// Parses without normalizing.
pub fn parse_expr_raw(src: &str) -> Result<Expr, ExprParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ExprParseError { message: "empty expression".into(), offset: 0, len: 0 });
    }
    let mut p = Parser { toks, pos: 0, end: src.len() };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprParseError> {
    Ok(parse_expr_raw(src)?.simplify())
}

/// Returns every `(identifier, byte offset)` in the source, in order.
pub fn identifiers(src: &str) -> Result<Vec<(String, usize)>, ExprParseError> {
    Ok(lex(src)?
        .into_iter()
        .filter_map(|(t, pos, _)| match t {
            Tok::Ident(s) => Some((s, pos)),
            _ => None,
        })
        .collect())
}
