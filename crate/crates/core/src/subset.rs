//! The algebra `A_k = Z_{4^s}[v_1..v_k] / (v_i^2 = v_i)`.
//!
//! A monomial is a product of distinct `v_i`, so monomials are indexed by
//! subsets of `{1..k}` stored as bitmasks (bit `i - 1` set iff `v_i` occurs).
//! Coefficients are kept in increasing bitmask order, and the product of two
//! monomials is the monomial of the union of their subsets.
//!
//! Evaluating an element at the `2^k` points `v_i ∈ {0, 1}` is the subset
//! zeta transform, and it is a ring isomorphism `A_k ≅ Z_{4^s}^{2^k}` onto
//! the pointwise product. The orthogonal idempotents `η_S` are the preimages
//! of the unit coordinate vectors.

use crate::audit::{AuditEntry, AuditReport, Status};
use crate::error::{Error, Result};
use crate::residue::{Residue, Zq};

/// Upper bound on the number of idempotent generators.
pub const MAX_VARS: usize = 20;

/// The algebra `A_k` for a fixed number of generators `k` over `Z_{4^s}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetAlgebra {
    vars: usize,
    zq: Zq,
}

impl SubsetAlgebra {
    pub fn new(vars: usize, zq: Zq) -> Result<Self> {
        if vars > MAX_VARS {
            return Err(Error::InvalidParams(format!(
                "at most {MAX_VARS} idempotent generators are supported, got {vars}"
            )));
        }
        Ok(SubsetAlgebra { vars, zq })
    }

    #[inline]
    pub fn vars(&self) -> usize {
        self.vars
    }

    #[inline]
    pub fn zq(&self) -> Zq {
        self.zq
    }

    /// `2^k`, the number of monomials.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.vars
    }

    /// Bitmask of the full subset `{1..k}`.
    #[inline]
    pub fn full_subset(&self) -> usize {
        self.len() - 1
    }

    pub fn zero(&self) -> SubsetPoly {
        SubsetPoly {
            alg: *self,
            coeffs: vec![Residue::ZERO; self.len()],
        }
    }

    pub fn one(&self) -> SubsetPoly {
        self.constant(Residue::ONE)
    }

    pub fn constant(&self, c: Residue) -> SubsetPoly {
        let mut p = self.zero();
        p.coeffs[0] = c;
        p
    }

    /// The monomial `c * prod_{i in subset} v_i`.
    pub fn monomial(&self, subset: usize, c: Residue) -> SubsetPoly {
        assert!(subset < self.len(), "subset {subset:#b} out of range");
        let mut p = self.zero();
        p.coeffs[subset] = c;
        p
    }

    /// The generator `v_i` (1-based, as in the ring presentation).
    pub fn var(&self, i: usize) -> SubsetPoly {
        assert!(i >= 1 && i <= self.vars, "v_{i} is not a generator");
        self.monomial(1 << (i - 1), Residue::ONE)
    }

    pub fn from_coeffs(&self, coeffs: Vec<Residue>) -> Result<SubsetPoly> {
        if coeffs.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: coeffs.len(),
            });
        }
        for c in &coeffs {
            self.zq.check(c.value())?;
        }
        Ok(SubsetPoly { alg: *self, coeffs })
    }

    /// Builds an element from raw integers, reducing each modulo `4^s`.
    pub fn from_u64s(&self, values: &[u64]) -> Result<SubsetPoly> {
        self.from_coeffs(values.iter().map(|&v| self.zq.elem(v)).collect())
    }

    /// `η_S = prod_{i in S} v_i * prod_{j not in S} (1 - v_j)`, expanded.
    ///
    /// The coefficient of the monomial `T ⊇ S` is `(-1)^{|T \ S|}`; all
    /// other coefficients vanish.
    pub fn eta(&self, subset: usize) -> SubsetPoly {
        assert!(subset < self.len(), "subset {subset:#b} out of range");
        let mut p = self.zero();
        let minus_one = self.zq.from_i64(-1);
        for (t, c) in p.coeffs.iter_mut().enumerate() {
            if t & subset == subset {
                *c = if (t ^ subset).count_ones() % 2 == 0 {
                    Residue::ONE
                } else {
                    minus_one
                };
            }
        }
        p
    }

    pub fn eta_system(&self) -> EtaSystem {
        EtaSystem {
            etas: (0..self.len()).map(|s| self.eta(s)).collect(),
        }
    }

    /// Inverse of [`SubsetPoly::zeta`]: interpolates an element from its
    /// values at the `2^k` points.
    pub fn mobius(&self, coords: &[Residue]) -> Result<SubsetPoly> {
        if coords.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: coords.len(),
            });
        }
        let mut coeffs = coords.to_vec();
        mobius_in_place(self.zq, &mut coeffs);
        Ok(SubsetPoly { alg: *self, coeffs })
    }

    /// Audits the η family: count, idempotency, pairwise orthogonality and
    /// summing to one, all by exact recomputation.
    pub fn verify_eta_system(&self) -> AuditReport {
        let sys = self.eta_system();
        let mut report = AuditReport::default();

        let count = sys.etas.len();
        report.push(AuditEntry::new(
            "eta.count",
            "eta family of A_{m-1}",
            Status::from_bool(count == self.len()),
            serde_json::json!({ "count": count, "expected": self.len() }),
        ));

        let non_idempotent: Vec<usize> = (0..count)
            .filter(|&s| sys.etas[s].mul(&sys.etas[s]) != sys.etas[s])
            .collect();
        report.push(AuditEntry::new(
            "eta.idempotent",
            "eta family of A_{m-1}",
            Status::from_bool(non_idempotent.is_empty()),
            serde_json::json!({ "checked": count, "failing_subsets": non_idempotent }),
        ));

        let mut non_orthogonal = Vec::new();
        for s in 0..count {
            for t in (s + 1)..count {
                if !sys.etas[s].mul(&sys.etas[t]).is_zero() {
                    non_orthogonal.push((s, t));
                }
            }
        }
        report.push(AuditEntry::new(
            "eta.orthogonal",
            "eta family of A_{m-1}",
            Status::from_bool(non_orthogonal.is_empty()),
            serde_json::json!({
                "pairs_checked": count * (count - 1) / 2,
                "failing_pairs": non_orthogonal,
            }),
        ));

        let sum = sys.etas.iter().fold(self.zero(), |acc, e| acc.add(e));
        report.push(AuditEntry::new(
            "eta.sum_to_one",
            "eta family of A_{m-1}",
            Status::from_bool(sum == self.one()),
            serde_json::json!({ "sum": sum.coeff_values() }),
        ));
        report
    }
}

/// An element of `A_k`: `2^k` coefficients in bitmask order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsetPoly {
    alg: SubsetAlgebra,
    coeffs: Vec<Residue>,
}

impl SubsetPoly {
    #[inline]
    pub fn algebra(&self) -> SubsetAlgebra {
        self.alg
    }

    #[inline]
    pub fn coeffs(&self) -> &[Residue] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, subset: usize) -> Residue {
        self.coeffs[subset]
    }

    pub fn coeff_values(&self) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.value()).collect()
    }

    pub fn into_coeffs(self) -> Vec<Residue> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    fn same_context(&self, other: &SubsetPoly) -> Result<()> {
        if self.alg != other.alg {
            return Err(Error::ContextMismatch(format!(
                "A_{} over Z_4^{} vs A_{} over Z_4^{}",
                self.alg.vars,
                self.alg.zq.s(),
                other.alg.vars,
                other.alg.zq.s()
            )));
        }
        Ok(())
    }

    fn zip_with(&self, other: &SubsetPoly, f: impl Fn(Residue, Residue) -> Residue) -> SubsetPoly {
        assert_eq!(self.alg, other.alg, "subset algebra context mismatch");
        SubsetPoly {
            alg: self.alg,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &SubsetPoly) -> SubsetPoly {
        let zq = self.alg.zq;
        self.zip_with(other, |a, b| zq.add(a, b))
    }

    pub fn sub(&self, other: &SubsetPoly) -> SubsetPoly {
        let zq = self.alg.zq;
        self.zip_with(other, |a, b| zq.sub(a, b))
    }

    pub fn neg(&self) -> SubsetPoly {
        let zq = self.alg.zq;
        SubsetPoly {
            alg: self.alg,
            coeffs: self.coeffs.iter().map(|&c| zq.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Residue) -> SubsetPoly {
        let zq = self.alg.zq;
        SubsetPoly {
            alg: self.alg,
            coeffs: self.coeffs.iter().map(|&a| zq.mul(a, c)).collect(),
        }
    }

    /// Product in `A_k`: `c_U = sum_{S ∪ T = U} a_S b_T`.
    ///
    /// Computed as pointwise multiplication of zeta transforms, which costs
    /// `O(k 2^k)` instead of the `O(4^k)` of the direct union convolution.
    ///
    /// # Panics
    ///
    /// If the operands live in different algebras; see [`SubsetPoly::try_mul`].
    pub fn mul(&self, other: &SubsetPoly) -> SubsetPoly {
        assert_eq!(self.alg, other.alg, "subset algebra context mismatch");
        let zq = self.alg.zq;
        let mut a = self.coeffs.clone();
        let mut b = other.coeffs.clone();
        zeta_in_place(zq, &mut a);
        zeta_in_place(zq, &mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x = zq.mul(*x, *y);
        }
        mobius_in_place(zq, &mut a);
        SubsetPoly {
            alg: self.alg,
            coeffs: a,
        }
    }

    pub fn try_mul(&self, other: &SubsetPoly) -> Result<SubsetPoly> {
        self.same_context(other)?;
        Ok(self.mul(other))
    }

    pub fn try_add(&self, other: &SubsetPoly) -> Result<SubsetPoly> {
        self.same_context(other)?;
        Ok(self.add(other))
    }

    /// Values at the `2^k` points of `{0,1}^k`: coordinate `S` is
    /// `sum_{T ⊆ S} a_T`, the evaluation at `v_i = [i ∈ S]`.
    pub fn zeta(&self) -> Vec<Residue> {
        let mut out = self.coeffs.clone();
        zeta_in_place(self.alg.zq, &mut out);
        out
    }
}

/// The complete orthogonal idempotent system `{η_S}` of `A_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaSystem {
    pub etas: Vec<SubsetPoly>,
}

/// In-place subset-sum butterfly: `c_S <- sum_{T ⊆ S} c_T`.
pub(crate) fn zeta_in_place(zq: Zq, xs: &mut [Residue]) {
    debug_assert!(xs.len().is_power_of_two());
    let n = xs.len();
    let mut bit = 1;
    while bit < n {
        for block in xs.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (l, h) in lo.iter().zip(hi.iter_mut()) {
                *h = zq.add(*h, *l);
            }
        }
        bit <<= 1;
    }
}

/// Inverse butterfly of [`zeta_in_place`].
pub(crate) fn mobius_in_place(zq: Zq, xs: &mut [Residue]) {
    debug_assert!(xs.len().is_power_of_two());
    let n = xs.len();
    let mut bit = 1;
    while bit < n {
        for block in xs.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (l, h) in lo.iter().zip(hi.iter_mut()) {
                *h = zq.sub(*h, *l);
            }
        }
        bit <<= 1;
    }
}
