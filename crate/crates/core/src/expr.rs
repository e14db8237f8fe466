//! Parser for sum expressions such as `(7+k)^9 / ((3+k)^13 (8+k)^8)`.
//!
//! Grammar, whitespace-insensitive:
//!
//! ```text
//! expr    := product [ "/" product ]
//! product := "1" | factor { ["*"] factor }
//! factor  := base [ "^" int ] | "(" product ")"
//! base    := "k" | "(" int "+" "k" ")" | "(" "k" "+" int ")" | "(" "k" ")"
//! ```
//!
//! Denominator factors get negative exponents. The summation skips every `k`
//! at which a denominator base vanishes.

use crate::error::{Error, Result};
use crate::modarith::Prime;
use crate::oracle::SumSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factor {
    pub offset: u64,
    pub exp: i64,
}

pub fn parse(input: &str) -> Result<Vec<Factor>> {
    let chars: Vec<char> = input.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parser = Parser { chars, pos: 0 };
    let mut factors = parser.product()?;
    if parser.eat('/') {
        let denom = parser.product()?;
        factors.extend(denom.into_iter().map(|f| Factor { exp: -f.exp, ..f }));
    }
    if parser.pos != parser.chars.len() {
        return Err(parser.error("unexpected input"));
    }
    Ok(factors)
}

/// Parses and builds the sum with automatic exclusions.
pub fn parse_spec(pr: &Prime, input: &str) -> Result<SumSpec> {
    let terms: Vec<(u64, i64)> = parse(input)?
        .into_iter()
        .map(|f| (f.offset % pr.p(), f.exp))
        .collect();
    if terms.is_empty() {
        return Err(Error::Parse("expression has no factors".into()));
    }
    SumSpec::with_auto_exclusions(pr, terms)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, what: &str) -> Error {
        let rest: String = self.chars[self.pos.min(self.chars.len())..]
            .iter()
            .collect();
        Error::Parse(format!("{what} at position {} (`{rest}`)", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    fn int(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("integer too large"))
    }

    fn exponent(&mut self) -> Result<i64> {
        if !self.eat('^') {
            return Ok(1);
        }
        let e = self.int()?;
        if e == 0 {
            return Err(self.error("exponents must be at least 1"));
        }
        i64::try_from(e).map_err(|_| self.error("exponent too large"))
    }

    fn product(&mut self) -> Result<Vec<Factor>> {
        if self.peek() == Some('1') && !self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            return Ok(vec![]);
        }
        let mut out = self.factor()?;
        loop {
            self.eat('*');
            match self.peek() {
                Some('(') | Some('k') => out.extend(self.factor()?),
                _ => return Ok(out),
            }
        }
    }

    fn factor(&mut self) -> Result<Vec<Factor>> {
        if self.eat('k') {
            let exp = self.exponent()?;
            return Ok(vec![Factor { offset: 0, exp }]);
        }
        self.expect('(')?;
        if let Some(offset) = self.linear_base()? {
            self.expect(')')?;
            let exp = self.exponent()?;
            return Ok(vec![Factor { offset, exp }]);
        }
        let inner = self.product()?;
        self.expect(')')?;
        if self.peek() == Some('^') {
            return Err(self.error("exponents apply to single factors only"));
        }
        Ok(inner)
    }

    /// After `(`: `c+k`, `k+c` or `k`. `None` means a nested product follows.
    fn linear_base(&mut self) -> Result<Option<u64>> {
        match self.peek() {
            Some('k') => {
                self.pos += 1;
                if self.eat('+') {
                    Ok(Some(self.int()?))
                } else {
                    Ok(Some(0))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let c = self.int()?;
                self.expect('+')?;
                self.expect('k')?;
                Ok(Some(c))
            }
            _ => Ok(None),
        }
    }
}
