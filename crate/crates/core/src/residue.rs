//! Arithmetic in the chain ring `Z_{4^s} = Z_{2^{2s}}`.
//!
//! Elements are plain [`Residue`] values; the modulus lives in a [`Zq`]
//! context so that several rings can be handled side by side. Because the
//! modulus is a power of two, reduction is a bit mask and multiplication can
//! use wrapping machine arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported base exponent: `4^31 = 2^62` still fits a `u64`.
pub const MAX_S: u32 = 31;
/// Largest supported tower width.
pub const MAX_M: usize = 16;

/// An element of `Z_{4^s}`, always reduced with respect to its context.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Residue(pub(crate) u64);

impl Residue {
    pub const ZERO: Residue = Residue(0);
    pub const ONE: Residue = Residue(1);

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Residue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// The ring `Z_{4^s}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Zq {
    s: u32,
    mask: u64,
}

impl Zq {
    pub fn new(s: u32) -> Result<Self> {
        if s == 0 || s > MAX_S {
            return Err(Error::InvalidParams(format!(
                "s must lie in 1..={MAX_S}, got {s}"
            )));
        }
        Ok(Zq {
            s,
            mask: (1u64 << (2 * s)) - 1,
        })
    }

    #[inline]
    pub fn s(&self) -> u32 {
        self.s
    }

    /// Number of bits of the modulus, `2s`.
    #[inline]
    pub fn bits(&self) -> u32 {
        2 * self.s
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.mask + 1
    }

    /// Reduces an unsigned integer into the ring.
    #[inline]
    pub fn elem(&self, v: u64) -> Residue {
        Residue(v & self.mask)
    }

    /// Reduces a signed integer into the ring (`-1` maps to `4^s - 1`).
    #[inline]
    pub fn from_i64(&self, v: i64) -> Residue {
        Residue((v as u64) & self.mask)
    }

    /// Accepts `v` only if it is already a reduced representative.
    pub fn check(&self, v: u64) -> Result<Residue> {
        if v > self.mask {
            Err(Error::ContextMismatch(format!(
                "value {v} is not reduced modulo {}",
                self.modulus()
            )))
        } else {
            Ok(Residue(v))
        }
    }

    #[inline]
    pub fn add(&self, x: Residue, y: Residue) -> Residue {
        Residue(x.0.wrapping_add(y.0) & self.mask)
    }

    #[inline]
    pub fn sub(&self, x: Residue, y: Residue) -> Residue {
        Residue(x.0.wrapping_sub(y.0) & self.mask)
    }

    #[inline]
    pub fn neg(&self, x: Residue) -> Residue {
        Residue(x.0.wrapping_neg() & self.mask)
    }

    #[inline]
    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        Residue(x.0.wrapping_mul(y.0) & self.mask)
    }

    /// `x + a*y`, the inner step of every elimination loop.
    #[inline]
    pub fn mul_add(&self, x: Residue, a: Residue, y: Residue) -> Residue {
        Residue(x.0.wrapping_add(a.0.wrapping_mul(y.0)) & self.mask)
    }

    /// Checked binary operation: both operands must be reduced for this ring.
    pub fn apply(&self, op: ArithOp, x: Residue, y: Residue) -> Result<Residue> {
        let x = self.check(x.0)?;
        let y = self.check(y.0)?;
        Ok(match op {
            ArithOp::Add => self.add(x, y),
            ArithOp::Sub => self.sub(x, y),
            ArithOp::Mul => self.mul(x, y),
        })
    }

    #[inline]
    pub fn is_unit(&self, x: Residue) -> bool {
        x.0 & 1 == 1
    }

    /// Inverse of an odd residue, by Newton iteration on the 2-adic inverse.
    pub fn inv_unit(&self, x: Residue) -> Result<Residue> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit {
                value: x.0,
                modulus: self.modulus(),
            });
        }
        // x*x = 1 mod 8 for odd x, so y = x is correct to three bits; each
        // step doubles the number of correct bits.
        let mut y = x.0;
        for _ in 0..6 {
            y = y.wrapping_mul(2u64.wrapping_sub(x.0.wrapping_mul(y)));
        }
        Ok(Residue(y & self.mask))
    }

    /// 2-adic valuation; the zero element has valuation `2s`.
    #[inline]
    pub fn valuation(&self, x: Residue) -> u32 {
        if x.0 == 0 {
            self.bits()
        } else {
            x.0.trailing_zeros()
        }
    }

    /// `min(x, 4^s - x)`.
    #[inline]
    pub fn lee_weight(&self, x: Residue) -> u64 {
        let other = self.neg(x).0;
        x.0.min(other)
    }

    /// Iterates over every element in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = Residue> {
        (0..=self.mask).map(Residue)
    }
}

/// The pair `(m, s)` fixing the tower `Z_{4^s} ⊂ A_{m-1} ⊂ R^{s,m}`.
///
/// `m` must be even and at least 4: `m - 1` then is odd, hence a unit of
/// `Z_{4^s}`, and the second kappa idempotent is non-zero.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct RingParams {
    m: usize,
    zq: Zq,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    m: usize,
    s: u32,
}

impl TryFrom<RawParams> for RingParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        RingParams::new(raw.m, raw.s)
    }
}

impl From<RingParams> for RawParams {
    fn from(p: RingParams) -> Self {
        RawParams { m: p.m, s: p.s() }
    }
}

impl RingParams {
    pub fn new(m: usize, s: u32) -> Result<Self> {
        if m < 4 || m % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "m must be even and at least 4 (m - 1 has to be a unit mod 4^s, and m = 2 \
                 makes the second kappa idempotent vanish); got m = {m}"
            )));
        }
        if m > MAX_M {
            return Err(Error::InvalidParams(format!(
                "m = {m} exceeds the supported maximum {MAX_M}"
            )));
        }
        Ok(RingParams { m, zq: Zq::new(s)? })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn s(&self) -> u32 {
        self.zq.s()
    }

    #[inline]
    pub fn zq(&self) -> Zq {
        self.zq
    }

    /// Number of idempotent generators `v_1..v_{m-1}` of the subset algebra.
    #[inline]
    pub fn vars(&self) -> usize {
        self.m - 1
    }

    /// `2^{m-1}`, the number of monomials of `A_{m-1}`.
    #[inline]
    pub fn subsets(&self) -> usize {
        1 << (self.m - 1)
    }

    /// `m * 2^{m-1}`, the rank of `R^{s,m}` as a free `Z_{4^s}`-module.
    #[inline]
    pub fn tower_rank(&self) -> usize {
        self.m * self.subsets()
    }
}
