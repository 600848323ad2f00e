//! Recursive-descent parser for rational expressions such as
//! `(x1^2-10)/((x1^2-4)*(x1^2-7))`.
//!
//! Variables are `x1..xn`; `x`, `y`, `z` alias the first three. Literals may be integers or
//! decimals; `^` takes an integer exponent, possibly negative.

use super::mpoly::{MPoly, MultiRatFunc};
use super::rational::{parse_rat, Rational};
use crate::error::{Error, Result};

pub fn parse_multi_ratfunc(src: &str, nvars: usize) -> Result<MultiRatFunc> {
    let mut p = Parser {
        s: src.as_bytes(),
        pos: 0,
        nvars,
    };
    let r = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<MultiRatFunc> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiRatFunc> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.div(&d);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiRatFunc> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiRatFunc> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let mut neg = false;
            if self.peek() == Some(b'-') {
                neg = true;
                self.pos += 1;
            } else if self.peek() == Some(b'(') {
                self.pos += 1;
                let e = self.integer()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                if e < 0 && base.is_zero() {
                    return Err(self.err("negative power of zero"));
                }
                return Ok(base.powi(e));
            }
            let e = self.integer()?;
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return Err(self.err("negative power of zero"));
            }
            return Ok(base.powi(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32> {
        self.ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.err("expected integer exponent"))
    }

    fn atom(&mut self) -> Result<MultiRatFunc> {
        let c = self
            .peek()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < self.s.len()
                && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.')
            {
                self.pos += 1;
            }
            let lit = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
            let v: Rational = parse_rat(lit).map_err(|_| self.err("bad number"))?;
            return Ok(MultiRatFunc::constant(self.nvars, v));
        }
        if c.is_ascii_alphabetic() {
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
            let k = match name {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                _ => name
                    .strip_prefix('x')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .map(|d| d - 1)
                    .ok_or_else(|| self.err(&format!("unknown variable `{name}`")))?,
            };
            if k >= self.nvars {
                return Err(self.err(&format!("variable `{name}` out of range")));
            }
            return Ok(MultiRatFunc::from_poly(MPoly::var(self.nvars, k)));
        }
        Err(self.err("unexpected character"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{int, rat};

    #[test]
    fn parses_sakane_correction() {
        let r = parse_multi_ratfunc("(x1^2-10)/((x1^2-4)*(x1^2-7))", 3).unwrap();
        assert_eq!(r.eval(&[int(0), int(5), int(5)]).unwrap(), rat(-10, 28));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_multi_ratfunc("x1 +* 2", 1).is_err());
        assert!(parse_multi_ratfunc("x4", 2).is_err());
        assert!(parse_multi_ratfunc("1/(x-x)", 1).is_err());
    }
}
