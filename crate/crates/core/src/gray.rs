//! Gray maps from `(a, b, c)` triples over `A_{m-1}` to vectors over `Z_{4^s}`.
//!
//! `psi2` sends one element of `A_{m-1}` to its subset partial sums (the zeta
//! transform). `phi_element` concatenates the images of `a`, `b` and `c`, and
//! `phi_tuple` lays out an `n`-tuple of triples as letter block, then subset,
//! then position:
//!
//! ```text
//! index = ((letter * 2^{m-1}) + T) * n + i
//! ```
//!
//! The Gray weight of a triple is the Lee weight of its image, so the map is
//! an isometry by construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{Residue, RingParams};
use crate::subset::{mobius_in_place, SubsetAlgebra, SubsetPoly};
use crate::tower::subset_algebra;

/// Name of the coordinate order, recorded in serialized vectors.
pub const GRAY_ORDER: &str = "abc/subset/position";

/// The `κ₁`, `κ₂`, `κ₃` input coefficients of one code position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripleRepr {
    pub a: SubsetPoly,
    pub b: SubsetPoly,
    pub c: SubsetPoly,
}

impl TripleRepr {
    pub fn new(a: SubsetPoly, b: SubsetPoly, c: SubsetPoly) -> Result<Self> {
        if a.algebra() != b.algebra() || a.algebra() != c.algebra() {
            return Err(Error::ContextMismatch(
                "triple components over different algebras".into(),
            ));
        }
        Ok(TripleRepr { a, b, c })
    }

    pub fn zero(alg: SubsetAlgebra) -> Self {
        TripleRepr {
            a: alg.zero(),
            b: alg.zero(),
            c: alg.zero(),
        }
    }

    pub fn algebra(&self) -> SubsetAlgebra {
        self.a.algebra()
    }

    /// Component for letter `l` in `1..=3`.
    pub fn letter(&self, l: u8) -> &SubsetPoly {
        match l {
            1 => &self.a,
            2 => &self.b,
            3 => &self.c,
            _ => panic!("letter {l} out of range 1..=3"),
        }
    }

    pub fn letter_mut(&mut self, l: u8) -> &mut SubsetPoly {
        match l {
            1 => &mut self.a,
            2 => &mut self.b,
            3 => &mut self.c,
            _ => panic!("letter {l} out of range 1..=3"),
        }
    }

    pub fn add(&self, other: &TripleRepr) -> TripleRepr {
        TripleRepr {
            a: self.a.add(&other.a),
            b: self.b.add(&other.b),
            c: self.c.add(&other.c),
        }
    }

    pub fn sub(&self, other: &TripleRepr) -> TripleRepr {
        TripleRepr {
            a: self.a.sub(&other.a),
            b: self.b.sub(&other.b),
            c: self.c.sub(&other.c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn gray_weight(&self) -> u64 {
        phi_element(self).weight()
    }
}

/// A vector over `Z_{4^s}` in Gray coordinate order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GrayVector {
    pub n: usize,
    pub m: usize,
    pub s: u32,
    pub order: String,
    pub coords: Vec<Residue>,
}

impl GrayVector {
    pub fn params(&self) -> Result<RingParams> {
        RingParams::new(self.m, self.s)
    }

    /// Sum of the Lee weights of the coordinates.
    pub fn weight(&self) -> u64 {
        let zq = crate::residue::Zq::new(self.s).expect("validated on construction");
        self.coords.iter().map(|&x| zq.lee_weight(x)).sum()
    }

    pub fn add(&self, other: &GrayVector) -> Result<GrayVector> {
        if (self.n, self.m, self.s) != (other.n, other.m, other.s) {
            return Err(Error::ContextMismatch(
                "Gray vectors of different shapes".into(),
            ));
        }
        let zq = crate::residue::Zq::new(self.s)?;
        Ok(GrayVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&x, &y)| zq.add(x, y))
                .collect(),
            ..self.clone()
        })
    }
}

/// Subset partial sums of `a`, in bitmask order.
pub fn psi2(a: &SubsetPoly) -> Vec<Residue> {
    a.zeta()
}

pub fn phi_element(t: &TripleRepr) -> GrayVector {
    phi_tuple(std::slice::from_ref(t)).expect("a single triple is well formed")
}

/// Gray image of an `n`-tuple; see the module documentation for the layout.
pub fn phi_tuple(ts: &[TripleRepr]) -> Result<GrayVector> {
    let first = ts
        .first()
        .ok_or_else(|| Error::Precondition("phi_tuple needs at least one position".into()))?;
    let alg = first.algebra();
    for t in ts {
        if t.algebra() != alg {
            return Err(Error::ContextMismatch(
                "positions over different algebras".into(),
            ));
        }
    }
    let n = ts.len();
    let subsets = alg.len();
    let mut coords = vec![Residue::ZERO; 3 * subsets * n];
    for (i, t) in ts.iter().enumerate() {
        for l in 1..=3u8 {
            let img = psi2(t.letter(l));
            let base = (l as usize - 1) * subsets;
            for (subset, &x) in img.iter().enumerate() {
                coords[(base + subset) * n + i] = x;
            }
        }
    }
    Ok(GrayVector {
        n,
        m: alg.vars() + 1,
        s: alg.zq().s(),
        order: GRAY_ORDER.to_string(),
        coords,
    })
}

/// Inverse of [`phi_tuple`] (Möbius transform per letter and position).
pub fn phi_inverse(g: &GrayVector) -> Result<Vec<TripleRepr>> {
    let params = g.params()?;
    let alg = subset_algebra(params);
    let subsets = alg.len();
    let n = g.n;
    if g.coords.len() != 3 * subsets * n {
        return Err(Error::LengthMismatch {
            expected: 3 * subsets * n,
            got: g.coords.len(),
        });
    }
    let zq = params.zq();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = TripleRepr::zero(alg);
        for l in 1..=3u8 {
            let base = (l as usize - 1) * subsets;
            let mut xs: Vec<Residue> = (0..subsets)
                .map(|sub| g.coords[(base + sub) * n + i])
                .collect();
            for x in &xs {
                zq.check(x.value())?;
            }
            mobius_in_place(zq, &mut xs);
            *t.letter_mut(l) = alg.from_coeffs(xs)?;
        }
        out.push(t);
    }
    Ok(out)
}

/// Gray weight of an `n`-tuple of triples.
pub fn gray_weight(ts: &[TripleRepr]) -> Result<u64> {
    Ok(phi_tuple(ts)?.weight())
}

/// `gray_weight(x - y)`.
pub fn gray_distance(x: &[TripleRepr], y: &[TripleRepr]) -> Result<u64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let diff: Vec<TripleRepr> = x.iter().zip(y).map(|(a, b)| a.sub(b)).collect();
    gray_weight(&diff)
}
