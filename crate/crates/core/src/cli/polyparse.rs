//! Recursive-descent parser for polynomial flags such as `x^3` or `1+2x-0.5x^2`.
//!
//! Grammar (whitespace allowed between tokens):
//!
//! ```text
//! poly := term (('+' | '-') term)*
//! term := ['+' | '-'] (number ['*'] [mono] | mono)
//! mono := 'x' ['^' integer]
//! ```

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Highest exponent accepted by the parser.
pub const MAX_PARSED_DEGREE: usize = 1000;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn syntax(src: &str, pos: usize, what: &str) -> Error {
    Error::InvalidInput(format!("cannot parse polynomial '{src}' at offset {pos}: {what}"))
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn poly(&mut self) -> Result<Vec<f64>> {
        let mut coeffs = vec![0.0];
        let (c, k) = self.term(true)?;
        add_term(&mut coeffs, c, k);
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(coeffs),
                Some(b'+') | Some(b'-') => {
                    let (c, k) = self.term(false)?;
                    add_term(&mut coeffs, c, k);
                }
                Some(_) => return Err(syntax(self.src, self.pos, "expected '+' or '-'")),
            }
        }
    }

    /// `first` allows an unsigned leading term.
    fn term(&mut self, first: bool) -> Result<(f64, usize)> {
        self.skip_ws();
        let sign = if self.eat(b'-') {
            -1.0
        } else if self.eat(b'+') || first {
            1.0
        } else {
            return Err(syntax(self.src, self.pos, "expected a sign"));
        };
        self.skip_ws();
        let coeff = self.number()?;
        let explicit_times = coeff.is_some() && self.eat(b'*');
        self.skip_ws();
        let power = if self.peek() == Some(b'x') {
            self.pos += 1;
            if self.eat(b'^') {
                self.skip_ws();
                self.integer()?
            } else {
                1
            }
        } else if coeff.is_none() || explicit_times {
            return Err(syntax(self.src, self.pos, "expected a number or 'x'"));
        } else {
            0
        };
        Ok((sign * coeff.unwrap_or(1.0), power))
    }

    fn number(&mut self) -> Result<Option<f64>> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end == start {
            return Ok(None);
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut e = end + 1;
            if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                e += 1;
            }
            let digits = e;
            while e < bytes.len() && bytes[e].is_ascii_digit() {
                e += 1;
            }
            if e > digits {
                end = e;
            }
        }
        let text = &self.src[start..end];
        let v: f64 = text
            .parse()
            .map_err(|_| syntax(self.src, start, &format!("bad number '{text}'")))?;
        if !v.is_finite() {
            return Err(syntax(self.src, start, "number is not finite"));
        }
        self.pos = end;
        Ok(Some(v))
    }

    fn integer(&mut self) -> Result<usize> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let k: usize = self.src[start..self.pos]
            .parse()
            .map_err(|_| syntax(self.src, start, "expected a nonnegative integer exponent"))?;
        if k > MAX_PARSED_DEGREE {
            return Err(syntax(self.src, start, "exponent too large"));
        }
        Ok(k)
    }
}

fn add_term(coeffs: &mut Vec<f64>, c: f64, k: usize) {
    if coeffs.len() <= k {
        coeffs.resize(k + 1, 0.0);
    }
    coeffs[k] += c;
}

pub fn parse_polynomial(src: &str) -> Result<Polynomial> {
    let mut p = Parser { src, pos: 0 };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(syntax(src, 0, "empty polynomial"));
    }
    Ok(Polynomial::new(p.poly()?))
}
