//! Integer expressions such as `2^127-1` or `17*31*41` for large inputs.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := power ('*' power)*
//! power   := atom ('^' power)?
//! atom    := digits | '(' sum ')'
//! ```

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Natural, Result};

/// Results wider than this are refused rather than computed.
pub const MAX_RESULT_BITS: u64 = 1 << 24;

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn fail(&self, reason: impl Into<String>) -> Error {
        Error::Expression { input: self.input.to_string(), reason: reason.into() }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<BigInt> {
        let mut acc = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<BigInt> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.power()?;
            if acc.bits() + rhs.bits() > MAX_RESULT_BITS {
                return Err(self.fail("result too large"));
            }
            acc *= rhs;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<BigInt> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let exp = self.power()?;
        if exp.is_negative() {
            return Err(self.fail("negative exponent"));
        }
        let e = exp.to_u32().ok_or_else(|| self.fail("exponent too large"))?;
        if base.bits().saturating_sub(1).saturating_mul(u64::from(e)) > MAX_RESULT_BITS {
            return Err(self.fail("result too large"));
        }
        Ok(num_traits::pow(base, e as usize))
    }

    fn atom(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.fail(format!("expected ')' at offset {}", self.pos)));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                Ok(self.input[start..self.pos].parse().expect("ascii digits"))
            }
            Some(c) => Err(self.fail(format!("unexpected {:?} at offset {}", c as char, self.pos))),
            None => Err(self.fail("unexpected end of input")),
        }
    }
}

/// Evaluates an expression to a nonnegative integer.
pub fn parse_natural(input: &str) -> Result<Natural> {
    let mut p = Parser { input, bytes: input.as_bytes(), pos: 0 };
    let v = p.sum()?;
    if p.peek().is_some() {
        return Err(p.fail(format!("trailing input at offset {}", p.pos)));
    }
    match v.sign() {
        Sign::Minus => Err(p.fail("value is negative")),
        _ if v.is_zero() => Ok(BigUint::zero()),
        _ => Ok(v.magnitude().clone()),
    }
}
