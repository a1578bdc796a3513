//! The tower ring `R^{s,m} = A_{m-1}[v_m] / (v_m^m - v_m)`.
//!
//! An element is stored as `m` coefficients from `A_{m-1}`, one per
//! `v_m`-degree `0..m-1`, flattened into `m * 2^{m-1}` residues (degree-major,
//! subset bitmask minor). The flat layout doubles as the digit expansion of an
//! element over the free `Z_{4^s}`-module of rank `m * 2^{m-1}`.

use num_bigint::BigUint;

use crate::audit::{AuditEntry, AuditReport, Status};
use crate::error::{Error, Result};
use crate::linalg::ZModMatrix;
use crate::residue::{Residue, RingParams};
use crate::subset::{mobius_in_place, zeta_in_place, SubsetAlgebra, SubsetPoly};

/// Reduces a `v_m` exponent using `v_m^m = v_m`.
///
/// Exponents `e >= m` map to `((e - 1) mod (m - 1)) + 1`; smaller exponents,
/// including `0`, are left alone.
#[inline]
pub fn reduce_exponent(e: usize, m: usize) -> usize {
    if e < m {
        e
    } else {
        (e - 1) % (m - 1) + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerElement {
    params: RingParams,
    coeffs: Vec<Residue>,
}

impl TowerElement {
    pub fn zero(params: RingParams) -> Self {
        TowerElement {
            params,
            coeffs: vec![Residue::ZERO; params.tower_rank()],
        }
    }

    pub fn one(params: RingParams) -> Self {
        Self::constant(params, Residue::ONE)
    }

    pub fn constant(params: RingParams, c: Residue) -> Self {
        let mut e = Self::zero(params);
        e.coeffs[0] = c;
        e
    }

    /// `c * v_m^degree * prod_{i in subset} v_i`.
    pub fn monomial(params: RingParams, degree: usize, subset: usize, c: Residue) -> Self {
        assert!(degree < params.m() && subset < params.subsets());
        let mut e = Self::zero(params);
        e.coeffs[degree * params.subsets() + subset] = c;
        e
    }

    /// The generator `v_i` for `1 <= i <= m`; `v_m` is the tower variable.
    pub fn var(params: RingParams, i: usize) -> Self {
        assert!(i >= 1 && i <= params.m(), "v_{i} is not a generator");
        if i == params.m() {
            Self::monomial(params, 1, 0, Residue::ONE)
        } else {
            Self::monomial(params, 0, 1 << (i - 1), Residue::ONE)
        }
    }

    /// Embeds `A_{m-1}` as the `v_m`-degree-0 part.
    pub fn from_subset(params: RingParams, a: &SubsetPoly) -> Result<Self> {
        Self::from_parts(params, std::slice::from_ref(a))
    }

    /// `sum_d parts[d] * v_m^d`; missing trailing parts are zero.
    pub fn from_parts(params: RingParams, parts: &[SubsetPoly]) -> Result<Self> {
        let alg = subset_algebra(params);
        if parts.len() > params.m() {
            return Err(Error::LengthMismatch {
                expected: params.m(),
                got: parts.len(),
            });
        }
        let mut e = Self::zero(params);
        let n = params.subsets();
        for (d, p) in parts.iter().enumerate() {
            if p.algebra() != alg {
                return Err(Error::ContextMismatch(format!(
                    "degree-{d} coefficient is not an element of A_{} over Z_4^{}",
                    params.vars(),
                    params.s()
                )));
            }
            e.coeffs[d * n..(d + 1) * n].copy_from_slice(p.coeffs());
        }
        Ok(e)
    }

    /// Inverse of [`TowerElement::digits`].
    pub fn from_digits(params: RingParams, digits: &[Residue]) -> Result<Self> {
        if digits.len() != params.tower_rank() {
            return Err(Error::LengthMismatch {
                expected: params.tower_rank(),
                got: digits.len(),
            });
        }
        for d in digits {
            params.zq().check(d.value())?;
        }
        Ok(TowerElement {
            params,
            coeffs: digits.to_vec(),
        })
    }

    #[inline]
    pub fn params(&self) -> RingParams {
        self.params
    }

    /// Coordinates over the monomial basis `v_m^d x_S`, degree-major.
    #[inline]
    pub fn digits(&self) -> &[Residue] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, degree: usize, subset: usize) -> Residue {
        self.coeffs[degree * self.params.subsets() + subset]
    }

    pub fn degree_part(&self, degree: usize) -> SubsetPoly {
        let n = self.params.subsets();
        subset_algebra(self.params)
            .from_coeffs(self.coeffs[degree * n..(degree + 1) * n].to_vec())
            .expect("slice has the algebra's length")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when only the `v_m`-degree-0 part is non-zero, i.e. the element
    /// lies in the subring `A_{m-1}`.
    pub fn in_subset_algebra(&self) -> bool {
        self.coeffs[self.params.subsets()..]
            .iter()
            .all(|c| c.is_zero())
    }

    /// Number of non-zero monomial coefficients.
    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    fn check_context(&self, other: &TowerElement) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ContextMismatch(format!(
                "R^(s={},m={}) vs R^(s={},m={})",
                self.params.s(),
                self.params.m(),
                other.params.s(),
                other.params.m()
            )));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &TowerElement,
        f: impl Fn(Residue, Residue) -> Residue,
    ) -> TowerElement {
        assert_eq!(self.params, other.params, "tower ring context mismatch");
        TowerElement {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &TowerElement) -> TowerElement {
        let zq = self.params.zq();
        self.zip_with(other, |a, b| zq.add(a, b))
    }

    pub fn sub(&self, other: &TowerElement) -> TowerElement {
        let zq = self.params.zq();
        self.zip_with(other, |a, b| zq.sub(a, b))
    }

    pub fn neg(&self) -> TowerElement {
        let zq = self.params.zq();
        TowerElement {
            params: self.params,
            coeffs: self.coeffs.iter().map(|&c| zq.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Residue) -> TowerElement {
        let zq = self.params.zq();
        TowerElement {
            params: self.params,
            coeffs: self.coeffs.iter().map(|&a| zq.mul(a, c)).collect(),
        }
    }

    /// Exact product with exponent reduction.
    ///
    /// Each degree slice is moved to evaluation coordinates over the subset
    /// lattice, where `A_{m-1}` multiplies pointwise; what remains per point is
    /// a product in `Z_{4^s}[v_m]/(v_m^m - v_m)`.
    ///
    /// # Panics
    ///
    /// If the operands belong to different rings; see [`TowerElement::try_mul`].
    pub fn mul(&self, other: &TowerElement) -> TowerElement {
        assert_eq!(self.params, other.params, "tower ring context mismatch");
        let zq = self.params.zq();
        let m = self.params.m();
        let n = self.params.subsets();
        let a = self.to_points();
        let b = other.to_points();
        let mut out = vec![Residue::ZERO; m * n];
        for d1 in 0..m {
            let sa = &a[d1 * n..(d1 + 1) * n];
            if sa.iter().all(|c| c.is_zero()) {
                continue;
            }
            for d2 in 0..m {
                let sb = &b[d2 * n..(d2 + 1) * n];
                let d = reduce_exponent(d1 + d2, m);
                let dst = &mut out[d * n..(d + 1) * n];
                for ((o, &x), &y) in dst.iter_mut().zip(sa).zip(sb) {
                    *o = zq.mul_add(*o, x, y);
                }
            }
        }
        TowerElement::from_points(self.params, out)
    }

    pub fn try_mul(&self, other: &TowerElement) -> Result<TowerElement> {
        self.check_context(other)?;
        Ok(self.mul(other))
    }

    pub fn try_add(&self, other: &TowerElement) -> Result<TowerElement> {
        self.check_context(other)?;
        Ok(self.add(other))
    }

    pub fn square(&self) -> TowerElement {
        self.mul(self)
    }

    pub fn is_idempotent(&self) -> bool {
        self.square() == *self
    }

    /// Zeta transform of every degree slice.
    pub(crate) fn to_points(&self) -> Vec<Residue> {
        let zq = self.params.zq();
        let mut pts = self.coeffs.clone();
        for slice in pts.chunks_exact_mut(self.params.subsets()) {
            zeta_in_place(zq, slice);
        }
        pts
    }

    /// Inverse of [`TowerElement::to_points`].
    pub(crate) fn from_points(params: RingParams, mut pts: Vec<Residue>) -> TowerElement {
        for slice in pts.chunks_exact_mut(params.subsets()) {
            mobius_in_place(params.zq(), slice);
        }
        TowerElement {
            params,
            coeffs: pts,
        }
    }
}

pub(crate) fn subset_algebra(params: RingParams) -> SubsetAlgebra {
    SubsetAlgebra::new(params.vars(), params.zq()).expect("m is bounded by MAX_M")
}

/// The three orthogonal idempotents splitting `R^{s,m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaSystem {
    pub k1: TowerElement,
    pub k2: TowerElement,
    pub k3: TowerElement,
}

impl KappaSystem {
    /// Builds
    ///
    /// * `κ₁ = η_∅ · (m-1)^{-1} · (v_m + v_m^2 + … + v_m^{m-1})`
    /// * `κ₂ = η_∅ · -(m-1)^{-1} · (v_m + … + v_m^{m-2} - (m-2) v_m^{m-1})`
    /// * `κ₃ = 1 - η_∅ · v_m^{m-1}`
    ///
    /// where `η_∅ = prod (1 - v_i)`, and checks the Pierce conditions. A
    /// failed check is an internal invariant violation and returns an error.
    pub fn new(params: RingParams) -> Result<Self> {
        let zq = params.zq();
        let m = params.m();
        let alg = subset_algebra(params);
        let eta0 = alg.eta(0);
        let inv = zq.inv_unit(zq.elem((m - 1) as u64))?;

        let mut k1_parts = vec![alg.zero()];
        let mut k2_parts = vec![alg.zero()];
        for t in 1..m {
            k1_parts.push(eta0.scale(inv));
            let bracket = if t == m - 1 {
                zq.from_i64(-((m - 2) as i64))
            } else {
                Residue::ONE
            };
            k2_parts.push(eta0.scale(zq.mul(zq.neg(inv), bracket)));
        }
        let k1 = TowerElement::from_parts(params, &k1_parts)?;
        let k2 = TowerElement::from_parts(params, &k2_parts)?;
        let k3 = TowerElement::one(params).sub(&TowerElement::from_parts(params, &{
            let mut parts = vec![alg.zero(); m];
            parts[m - 1] = eta0;
            parts
        })?);

        let sys = KappaSystem { k1, k2, k3 };
        let report = sys.verify_pierce();
        if let Some(bad) = report.entries.iter().find(|e| e.status != Status::Pass) {
            return Err(Error::Precondition(format!(
                "kappa system failed its own check {}: {}",
                bad.claim, bad.evidence
            )));
        }
        Ok(sys)
    }

    pub fn params(&self) -> RingParams {
        self.k1.params()
    }

    pub fn get(&self, l: u8) -> &TowerElement {
        match l {
            1 => &self.k1,
            2 => &self.k2,
            3 => &self.k3,
            _ => panic!("kappa index {l} out of range 1..=3"),
        }
    }

    pub fn as_array(&self) -> [&TowerElement; 3] {
        [&self.k1, &self.k2, &self.k3]
    }

    /// Recomputes sum-to-one, idempotency, pairwise orthogonality and
    /// non-vanishing exactly.
    pub fn verify_pierce(&self) -> AuditReport {
        let params = self.params();
        let ks = self.as_array();
        let mut report = AuditReport::default();
        let anchor = "kappa idempotent system";

        let sum = ks[0].add(ks[1]).add(ks[2]);
        report.push(AuditEntry::new(
            "kappa.sum_to_one",
            anchor,
            Status::from_bool(sum == TowerElement::one(params)),
            serde_json::json!({ "m": params.m(), "s": params.s() }),
        ));

        let failing: Vec<usize> = (0..3)
            .filter(|&i| !ks[i].is_idempotent())
            .map(|i| i + 1)
            .collect();
        report.push(AuditEntry::new(
            "kappa.idempotent",
            anchor,
            Status::from_bool(failing.is_empty()),
            serde_json::json!({ "failing": failing }),
        ));

        let mut failing = Vec::new();
        for i in 0..3 {
            for j in (i + 1)..3 {
                if !ks[i].mul(ks[j]).is_zero() {
                    failing.push((i + 1, j + 1));
                }
            }
        }
        report.push(AuditEntry::new(
            "kappa.orthogonal",
            anchor,
            Status::from_bool(failing.is_empty()),
            serde_json::json!({ "failing_pairs": failing }),
        ));

        let zeros: Vec<usize> = (0..3).filter(|&i| ks[i].is_zero()).map(|i| i + 1).collect();
        report.push(AuditEntry::new(
            "kappa.nonzero",
            anchor,
            Status::from_bool(zeros.is_empty()),
            serde_json::json!({ "zero": zeros }),
        ));
        report
    }
}

/// A unit coefficient of a block idempotent: reading this digit of
/// `z * value` recovers `z * unit` for every scalar `z`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Marker {
    pub subset: usize,
    pub degree: usize,
    pub unit: Residue,
}

impl Marker {
    /// Flat digit index of the marker inside a tower element.
    pub fn digit_index(&self, params: RingParams) -> usize {
        self.degree * params.subsets() + self.subset
    }
}

/// `κ_l · η_S` together with its marker (absent for zero blocks).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockIdempotent {
    pub l: u8,
    pub subset: usize,
    pub value: TowerElement,
    pub marker: Option<Marker>,
}

impl BlockIdempotent {
    pub fn is_zero_block(&self) -> bool {
        self.marker.is_none()
    }
}

/// Position of block `(l, S)` in the canonical block order (`l` outer,
/// subset bitmask inner).
#[inline]
pub fn block_index(params: RingParams, l: u8, subset: usize) -> usize {
    (l as usize - 1) * params.subsets() + subset
}

/// All `3 * 2^{m-1}` products `κ_l η_S`, in block order.
///
/// Zero products are kept and flagged. Fails if a product is not idempotent
/// or a non-zero product has no unit coefficient.
pub fn block_idempotents(kappa: &KappaSystem) -> Result<Vec<BlockIdempotent>> {
    let params = kappa.params();
    let alg = subset_algebra(params);
    let zq = params.zq();
    let mut out = Vec::with_capacity(3 * params.subsets());
    for l in 1..=3u8 {
        for subset in 0..params.subsets() {
            let eta = TowerElement::from_subset(params, &alg.eta(subset))?;
            let value = kappa.get(l).mul(&eta);
            if !value.is_idempotent() {
                return Err(Error::Precondition(format!(
                    "kappa_{l} * eta_{subset:#b} is not idempotent"
                )));
            }
            let marker = if value.is_zero() {
                None
            } else {
                let found = (0..params.subsets())
                    .flat_map(|s| (0..params.m()).map(move |d| (s, d)))
                    .map(|(s, d)| (s, d, value.coeff(d, s)))
                    .find(|&(_, _, c)| zq.is_unit(c));
                match found {
                    Some((subset, degree, unit)) => Some(Marker {
                        subset,
                        degree,
                        unit,
                    }),
                    None => {
                        return Err(Error::Precondition(format!(
                            "kappa_{l} * eta_{subset:#b} has no unit coefficient"
                        )))
                    }
                }
            };
            out.push(BlockIdempotent {
                l,
                subset,
                value,
                marker,
            });
        }
    }
    Ok(out)
}

/// Multiplication-by-`e` matrix: row `j` holds the digits of `e * b_j` for
/// the `j`-th monomial basis element `b_j`.
pub fn multiplication_matrix(e: &TowerElement) -> ZModMatrix {
    let params = e.params();
    let mut rows = Vec::with_capacity(params.tower_rank());
    for d in 0..params.m() {
        for s in 0..params.subsets() {
            let b = TowerElement::monomial(params, d, s, Residue::ONE);
            rows.push(e.mul(&b).digits().to_vec());
        }
    }
    ZModMatrix::from_rows(params.zq(), params.tower_rank(), rows).expect("rows have tower rank")
}

/// `|e · R^{s,m}|`, the size of the principal ideal generated by `e`.
pub fn ideal_cardinality(e: &TowerElement) -> BigUint {
    multiplication_matrix(e).span_cardinality()
}

/// `|R^{s,m}| = 4^{s m 2^{m-1}}`.
pub fn ring_cardinality(params: RingParams) -> BigUint {
    BigUint::from(1u8) << (2 * params.s() as usize * params.tower_rank())
}

/// `|A_{m-1}| = 4^{s 2^{m-1}}`.
pub fn subset_algebra_cardinality(params: RingParams) -> BigUint {
    BigUint::from(1u8) << (2 * params.s() as usize * params.subsets())
}

/// Measures the three summands `κ_i R` of the kappa splitting and compares
/// each with `|A_{m-1}|`, the size the splitting into copies of `A_{m-1}`
/// would require. The product of the three sizes must equal `|R|`.
pub fn verify_factor_sizes(kappa: &KappaSystem) -> AuditReport {
    let params = kappa.params();
    let a_size = subset_algebra_cardinality(params);
    let sizes: Vec<BigUint> = kappa
        .as_array()
        .iter()
        .map(|k| ideal_cardinality(k))
        .collect();
    let mut report = AuditReport::default();
    for (i, size) in sizes.iter().enumerate() {
        report.push(AuditEntry::new(
            format!("kappa_ideal_{}.equals_subset_algebra", i + 1),
            "splitting into copies of A_{m-1}",
            Status::compare(&a_size, size),
            serde_json::json!({
                "stated": a_size.to_string(),
                "measured": size.to_string(),
                "measured_log4": log4(size),
            }),
        ));
    }
    let product: BigUint = sizes.iter().product();
    let ring = ring_cardinality(params);
    report.push(AuditEntry::new(
        "kappa_ideals.product_equals_ring",
        "direct sum of the kappa ideals",
        Status::from_bool(product == ring),
        serde_json::json!({
            "product": product.to_string(),
            "ring": ring.to_string(),
        }),
    ));
    report
}

/// Every `κ_l η_S` is idempotent; also reports which products vanish.
pub fn verify_block_idempotents(kappa: &KappaSystem) -> Result<AuditReport> {
    let params = kappa.params();
    let blocks = block_idempotents(kappa)?;
    let non_idempotent: Vec<(u8, usize)> = blocks
        .iter()
        .filter(|b| !b.value.is_idempotent())
        .map(|b| (b.l, b.subset))
        .collect();
    let zero_blocks: Vec<(u8, usize)> = blocks
        .iter()
        .filter(|b| b.is_zero_block())
        .map(|b| (b.l, b.subset))
        .collect();
    let mut sum = TowerElement::zero(params);
    for b in &blocks {
        sum = sum.add(&b.value);
    }
    let mut orthogonal = true;
    'outer: for (i, a) in blocks.iter().enumerate() {
        if a.is_zero_block() {
            continue;
        }
        for b in &blocks[i + 1..] {
            if !b.is_zero_block() && !a.value.mul(&b.value).is_zero() {
                orthogonal = false;
                break 'outer;
            }
        }
    }
    let mut report = AuditReport::default();
    report.push(AuditEntry::new(
        "block_idempotents.idempotent",
        "products kappa_l eta_S",
        Status::from_bool(non_idempotent.is_empty()),
        serde_json::json!({
            "checked": blocks.len(),
            "failing": non_idempotent,
            "zero_blocks": zero_blocks,
            "nonzero_blocks": blocks.len() - zero_blocks.len(),
        }),
    ));
    report.push(AuditEntry::new(
        "block_idempotents.complete_orthogonal",
        "products kappa_l eta_S",
        Status::from_bool(orthogonal && sum == TowerElement::one(params)),
        serde_json::json!({ "orthogonal": orthogonal, "sum_is_one": sum == TowerElement::one(params) }),
    ));
    Ok(report)
}

/// `log_4` of a power of two, as a string (may be a half-integer).
pub(crate) fn log4(x: &BigUint) -> String {
    let bits = x.bits().saturating_sub(1);
    if bits % 2 == 0 {
        (bits / 2).to_string()
    } else {
        format!("{}.5", bits / 2)
    }
}
