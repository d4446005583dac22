//! Polynomials in g1, g2, g3 with rational coefficients.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary | '/' integer)*
//! unary   := '-' unary | power
//! power   := primary ('^' integer)?
//! primary := integer ('/' integer)? | g1 | g2 | g3 | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use ramanujan_core::dmf::DmfElement;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    /// Zero-based character offset.
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    i: usize,
    src: &'a str,
}

pub fn parse(src: &str) -> Result<DmfElement, ParseError> {
    let chars: Vec<(usize, char)> = src
        .chars()
        .enumerate()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut p = Parser { chars, i: 0, src };
    if p.chars.is_empty() {
        return Err(ParseError {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    if p.i < p.chars.len() {
        return Err(p.error(format!("unexpected {:?}", p.chars[p.i].1)));
    }
    Ok(e)
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.chars
            .get(self.i)
            .map_or(self.src.chars().count(), |c| c.0)
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos(),
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<DmfElement, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<DmfElement, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let at = self.pos();
                let den = self.integer()?;
                if den == BigInt::from(0) {
                    return Err(ParseError {
                        pos: at,
                        msg: "zero denominator".into(),
                    });
                }
                acc = acc.scale(&BigRational::new(BigInt::from(1), den));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<DmfElement, ParseError> {
        if self.eat('-') {
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<DmfElement, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let at = self.pos();
            let n = self.integer()?;
            let e: u32 = n.try_into().map_err(|_| ParseError {
                pos: at,
                msg: "exponent too large".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.i;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.i += 1;
        }
        if start == self.i {
            return Err(self.error("expected an integer"));
        }
        let digits: String = self.chars[start..self.i].iter().map(|c| c.1).collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn primary(&mut self) -> Result<DmfElement, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut den = BigInt::from(1);
                if self.eat('/') {
                    let at = self.pos();
                    den = self.integer()?;
                    if den == BigInt::from(0) {
                        return Err(ParseError {
                            pos: at,
                            msg: "zero denominator".into(),
                        });
                    }
                }
                Ok(DmfElement::constant(BigRational::new(num, den)))
            }
            Some('g') => {
                let at = self.pos();
                self.i += 1;
                match self.peek() {
                    Some(k @ '1'..='3') => {
                        self.i += 1;
                        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                            return Err(ParseError {
                                pos: at,
                                msg: "unknown symbol".into(),
                            });
                        }
                        Ok(DmfElement::g(k as usize - '0' as usize))
                    }
                    _ => Err(ParseError {
                        pos: at,
                        msg: "expected g1, g2 or g3".into(),
                    }),
                }
            }
            Some('(') => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_renders() {
        assert_eq!(parse("g1").unwrap().to_string(), "g1");
        assert_eq!(
            parse("g1^2 - 1/12*g2").unwrap().to_string(),
            "g1^2 - 1/12 g2"
        );
        assert_eq!(
            parse("(g1 + g2)*(g1 - g2)").unwrap(),
            parse("g1^2 - g2^2").unwrap()
        );
        assert_eq!(parse("-g3 + 3").unwrap().to_string(), "-g3 + 3");
        assert_eq!(parse("2/4").unwrap(), parse("1/2").unwrap());
        assert_eq!(
            parse("g1^2 - g2/12").unwrap(),
            parse("g1^2 - 1/12*g2").unwrap()
        );
        assert_eq!(parse("g1*g2/3/2").unwrap(), parse("1/6*g1*g2").unwrap());
    }

    #[test]
    fn reports_positions() {
        assert_eq!(parse("g1 + g4").unwrap_err().pos, 5);
        assert_eq!(parse("g1 +").unwrap_err().pos, 4);
        assert_eq!(parse("(g1").unwrap_err().pos, 3);
        assert_eq!(parse("1/0").unwrap_err().pos, 2);
        assert_eq!(parse("g1 $").unwrap_err().pos, 3);
        assert_eq!(parse("").unwrap_err().pos, 0);
        assert_eq!(parse("g1^x").unwrap_err().pos, 3);
        assert_eq!(parse("g2/0").unwrap_err().pos, 3);
        assert_eq!(parse("g2/g1").unwrap_err().pos, 3);
    }
}
