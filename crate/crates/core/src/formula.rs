//! Exact evaluation of closed-form length formulas.
//!
//! Formulas are plain strings such as `"4^(m*s*2^(m-1)*k) - 4^(m*s*2^(m-1)*u)"`
//! over the variables `m`, `s`, `k`, `u`, evaluated over the rationals so that
//! negative exponents and non-integral quotients are reported as they are.
//!
//! Grammar: `expr := term (('+' | '-') term)*`, `term := factor (('*' | '/')
//! factor)*`, `factor := '-' factor | power`, `power := atom ('^' factor)?`,
//! `atom := integer | variable | '(' expr ')'`. `^` is right associative and
//! its exponent must evaluate to an integer.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest exponent magnitude accepted by `^`.
const MAX_EXPONENT: i64 = 1 << 20;

pub fn evaluate(formula: &str, vars: &BTreeMap<&str, i64>) -> Result<BigRational> {
    let mut p = Parser {
        src: formula.as_bytes(),
        pos: 0,
        vars,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

/// Renders an integer as `"n"` and anything else as `"p/q"`.
pub fn render(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// An exact value obtained from a construction, for comparison with a
/// formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measured(pub BigRational);

impl Measured {
    pub fn ratio(num: &BigUint, den: &BigUint) -> Self {
        Measured(BigRational::new(
            BigInt::from(num.clone()),
            BigInt::from(den.clone()),
        ))
    }
}

impl From<&BigUint> for Measured {
    fn from(x: &BigUint) -> Self {
        Measured(BigRational::from_integer(BigInt::from(x.clone())))
    }
}

impl From<BigUint> for Measured {
    fn from(x: BigUint) -> Self {
        Measured(BigRational::from_integer(BigInt::from(x)))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a BTreeMap<&'a str, i64>,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Precondition(format!(
            "formula {:?}: {what} at offset {}",
            String::from_utf8_lossy(self.src),
            self.pos
        ))
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

    fn expr(&mut self) -> Result<BigRational> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BigRational> {
        let mut acc = self.factor()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            if op == b'*' {
                acc *= rhs;
            } else {
                if rhs.is_zero() {
                    return Err(self.error("division by zero"));
                }
                acc /= rhs;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BigRational> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.factor()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.factor()?;
            if !exp.is_integer() {
                return Err(self.error("non-integral exponent"));
            }
            let e = exp
                .to_integer()
                .to_i64()
                .filter(|e| e.abs() <= MAX_EXPONENT)
                .ok_or_else(|| self.error("exponent too large"))?;
            if base.is_zero() && e < 0 {
                return Err(self.error("zero to a negative power"));
            }
            let mag = num_traits::pow(base.clone(), e.unsigned_abs() as usize);
            return Ok(if e < 0 { mag.recip() } else { mag });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<BigRational> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let n: BigInt = digits.parse().expect("digits");
                Ok(BigRational::from_integer(n))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let v = self
                    .vars
                    .get(name)
                    .ok_or_else(|| self.error(&format!("unknown variable {name:?}")))?;
                Ok(BigRational::from_integer(BigInt::from(*v)))
            }
            _ => Err(self.error("expected a number, variable or '('")),
        }
    }
}

/// True when `x` is a positive integer.
pub fn is_positive_integer(x: &BigRational) -> bool {
    x.is_integer() && x.is_positive()
}

/// `x` as an exact integer, if it is one.
pub fn as_integer(x: &BigRational) -> Option<BigInt> {
    x.is_integer().then(|| x.to_integer())
}
