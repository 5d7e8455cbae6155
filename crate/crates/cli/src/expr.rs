//! Text syntax for quadratic forms.
//!
//! ```text
//! expr  := '0' | ['-'] term (('+' | '-') term)*
//! term  := [coef '*'] var ('*' var | '^2')
//! coef  := amono | '(' apoly ')'
//! apoly := amono (('+' | '-') amono)*     over GF(p), in the modulus root 'a'
//! amono := integer ['*' 'a' ['^' integer]] | 'a' ['^' integer]
//! var   := 'x0' | 'x1' | 'x2' | 'x3'
//! ```
//! Whitespace is ignored. Integer coefficients must lie in `0..p`.

use std::fmt;

use qcl_core::quadric::monomial_index;
use qcl_core::{Fe, Field, Form4};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.pos + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a Field,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, field: &'a Field) -> Parser<'a> {
        Parser { src: text.as_bytes(), pos: 0, field }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("integer too large")
        })
    }

    /// An integer that must be a residue mod p.
    fn residue(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        let n = self.integer()?;
        if n >= self.field.p() as u64 {
            self.pos = start;
            return self.err(format!("coefficient {n} is not in GF({})", self.field.q()));
        }
        Ok(n as u32)
    }

    fn a_power(&mut self) -> Result<usize, ParseError> {
        self.expect(b'a')?;
        if self.eat(b'^') {
            Ok(self.integer()? as usize)
        } else {
            Ok(1)
        }
    }

    /// Polynomial in `a`, returned as digits from the constant term up. Only
    /// a parenthesized coefficient may have several monomials.
    fn apoly(&mut self, several: bool) -> Result<Vec<u32>, ParseError> {
        let p = self.field.p();
        let mut digits: Vec<u32> = Vec::new();
        let mut negate = several && self.eat(b'-');
        loop {
            let (c, deg) = match self.peek() {
                Some(b'a') => (1, self.a_power()?),
                Some(c) if c.is_ascii_digit() => {
                    let c = self.residue()?;
                    if self.peek() == Some(b'*') && self.src.get(self.next_non_ws(self.pos + 1)) == Some(&b'a') {
                        self.expect(b'*')?;
                        (c, self.a_power()?)
                    } else {
                        (c, 0)
                    }
                }
                _ => return self.err("expected a coefficient"),
            };
            if deg >= 64 {
                return self.err("exponent too large");
            }
            if digits.len() <= deg {
                digits.resize(deg + 1, 0);
            }
            let c = if negate { (p - c) % p } else { c };
            digits[deg] = (digits[deg] + c) % p;
            if several && self.eat(b'+') {
                negate = false;
            } else if several && self.eat(b'-') {
                negate = true;
            } else {
                return Ok(digits);
            }
        }
    }

    fn next_non_ws(&self, mut i: usize) -> usize {
        while i < self.src.len() && self.src[i].is_ascii_whitespace() {
            i += 1;
        }
        i
    }

    fn coef(&mut self) -> Result<Option<Fe>, ParseError> {
        let start = self.pos;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let d = self.apoly(true)?;
                self.expect(b')')?;
                self.expect(b'*')?;
                Ok(Some(self.field.from_digits(&d)))
            }
            Some(b'a') | Some(b'0'..=b'9') => {
                let d = self.apoly(false)?;
                if !self.eat(b'*') {
                    self.pos = start;
                    return self.err("expected '*' after coefficient");
                }
                Ok(Some(self.field.from_digits(&d)))
            }
            _ => Ok(None),
        }
    }

    fn var(&mut self) -> Result<usize, ParseError> {
        self.expect(b'x')?;
        let start = self.pos;
        let i = self.integer()?;
        if i > 3 {
            self.pos = start;
            return self.err(format!("variable x{i} out of range (x0..x3)"));
        }
        Ok(i as usize)
    }

    fn term(&mut self) -> Result<(Fe, usize), ParseError> {
        let c = self.coef()?.unwrap_or(Fe::ONE);
        let i = self.var()?;
        let j = if self.eat(b'^') {
            let start = self.pos;
            if self.integer()? != 2 {
                self.pos = start;
                return self.err("only the exponent 2 is allowed");
            }
            i
        } else if self.eat(b'*') {
            self.var()?
        } else {
            return self.err("expected '*' or '^2' after variable");
        };
        Ok((c, monomial_index(i.min(j), i.max(j))))
    }
}

/// Parses a form over `field`; like terms are combined.
pub fn parse_form(text: &str, field: &Field) -> Result<Form4, ParseError> {
    let mut p = Parser::new(text, field);
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    if p.peek() == Some(b'0') && p.next_non_ws(p.pos + 1) == text.len() {
        return Ok(Form4::ZERO);
    }
    let mut coeffs = [Fe::ZERO; 10];
    let mut negate = p.eat(b'-');
    loop {
        let (c, k) = p.term()?;
        let c = if negate { field.neg(c) } else { c };
        coeffs[k] = field.add(coeffs[k], c);
        if p.eat(b'+') {
            negate = false;
        } else if p.eat(b'-') {
            negate = true;
        } else if p.peek().is_none() {
            return Ok(Form4::new(coeffs));
        } else {
            return p.err("expected '+', '-' or end of input");
        }
    }
}

fn format_coef(field: &Field, c: Fe) -> String {
    let digits = field.digits(c);
    if digits.iter().skip(1).all(|&d| d == 0) {
        return digits[0].to_string();
    }
    let mut terms = Vec::new();
    for (deg, &d) in digits.iter().enumerate().rev() {
        if d == 0 {
            continue;
        }
        let mono = match deg {
            0 => String::new(),
            1 => "a".to_string(),
            k => format!("a^{k}"),
        };
        terms.push(match (d, deg) {
            (d, 0) => d.to_string(),
            (1, _) => mono,
            (d, _) => format!("{d}*{mono}"),
        });
    }
    format!("({})", terms.join("+"))
}

/// Canonical text of a form, in monomial order; parses back to the same form.
pub fn format_form(field: &Field, f: &Form4) -> String {
    let mut terms = Vec::new();
    for (k, &(i, j)) in qcl_core::quadric::MONOMIALS4.iter().enumerate() {
        let c = f.coeffs()[k];
        if c.is_zero() {
            continue;
        }
        let mono = if i == j { format!("x{i}^2") } else { format!("x{i}*x{j}") };
        terms.push(if c == Fe::ONE { mono } else { format!("{}*{mono}", format_coef(field, c)) });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}
