//! Linear codes over `R^{s,m}` assembled from per-block component codes.
//!
//! A code is given by one generator matrix over `Z_{4^s}` for every block
//! `(l, S)`, `l ∈ {1, 2, 3}`, `S ⊆ {1..m-1}`. Its codewords are the sums
//!
//! ```text
//! Σ_{l,S} κ_l η_S · x_{l,S},    x_{l,S} in the row span of block (l, S)
//! ```
//!
//! taken over `Z_{4^s}`. The code is stored as the Howell form of its digit
//! expansion, a submodule of the free `Z_{4^s}`-module of rank
//! `n · m · 2^{m-1}` (position-major, then the tower digit order).
//!
//! The per-block vectors `x_{l,S}` form a [`Bundle`]. Blocks with
//! `κ_l η_S = 0` contribute nothing to the code, so only the non-zero blocks
//! of a bundle can be recovered from a codeword.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::audit::{AuditEntry, AuditReport, Status};
use crate::error::{Error, Result};
use crate::gray::{phi_tuple, GrayVector, TripleRepr, GRAY_ORDER};
use crate::linalg::{RowSpan, ZModMatrix};
use crate::residue::{Residue, RingParams, Zq};
use crate::subset::SubsetPoly;
use crate::tower::{
    block_idempotents, block_index, subset_algebra, BlockIdempotent, KappaSystem, TowerElement,
};

/// Default enumeration budget for [`RCode::min_weight_report`].
pub const DEFAULT_WEIGHT_BUDGET: u64 = 1 << 20;

/// Generator rows of one block `(l, S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub l: u8,
    pub subset: usize,
    pub rows: Vec<Vec<u64>>,
}

/// Wire form of a code: ring parameters, length and the populated blocks.
/// Blocks that are not listed are empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub m: usize,
    pub s: u32,
    pub n: usize,
    #[serde(default)]
    pub blocks: Vec<BlockSpec>,
}

impl ComponentSpec {
    pub fn empty(params: RingParams, n: usize) -> Self {
        ComponentSpec {
            m: params.m(),
            s: params.s(),
            n,
            blocks: Vec::new(),
        }
    }

    pub fn params(&self) -> Result<RingParams> {
        RingParams::new(self.m, self.s)
    }

    /// Appends a block. Entries must already be reduced modulo `4^s`.
    pub fn with_block(mut self, l: u8, subset: usize, rows: Vec<Vec<u64>>) -> Self {
        self.blocks.push(BlockSpec { l, subset, rows });
        self
    }

    /// One generator matrix per block, in block order.
    pub fn components(&self) -> Result<Vec<ZModMatrix>> {
        let params = self.params()?;
        if self.n == 0 {
            return Err(Error::InvalidParams(
                "code length n must be at least 1".into(),
            ));
        }
        let zq = params.zq();
        let mut comps: Vec<Option<ZModMatrix>> = vec![None; 3 * params.subsets()];
        for (k, b) in self.blocks.iter().enumerate() {
            if !(1..=3).contains(&b.l) {
                return Err(Error::OutOfRange(format!(
                    "blocks[{k}].l = {} is not in 1..=3",
                    b.l
                )));
            }
            if b.subset >= params.subsets() {
                return Err(Error::OutOfRange(format!(
                    "blocks[{k}].subset = {} exceeds {}",
                    b.subset,
                    params.subsets() - 1
                )));
            }
            let mut rows = Vec::with_capacity(b.rows.len());
            for (r, row) in b.rows.iter().enumerate() {
                if row.len() != self.n {
                    return Err(Error::Precondition(format!(
                        "blocks[{k}].rows[{r}] has {} entries, expected n = {}",
                        row.len(),
                        self.n
                    )));
                }
                let row: Result<Vec<Residue>> = row.iter().map(|&v| zq.check(v)).collect();
                rows.push(
                    row.map_err(|e| Error::Precondition(format!("blocks[{k}].rows[{r}]: {e}")))?,
                );
            }
            let slot = &mut comps[block_index(params, b.l, b.subset)];
            if slot.is_some() {
                return Err(Error::Precondition(format!(
                    "block (l={}, subset={}) is listed twice",
                    b.l, b.subset
                )));
            }
            *slot = Some(ZModMatrix::from_rows(zq, self.n, rows)?);
        }
        Ok(comps
            .into_iter()
            .map(|c| c.unwrap_or_else(|| ZModMatrix::zeros(zq, 0, self.n)))
            .collect())
    }
}

/// Per-block component vectors `x_{l,S} ∈ Z_{4^s}^n`, in block order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bundle {
    params: RingParams,
    n: usize,
    blocks: Vec<Vec<Residue>>,
}

impl Bundle {
    pub fn zero(params: RingParams, n: usize) -> Self {
        Bundle {
            params,
            n,
            blocks: vec![vec![Residue::ZERO; n]; 3 * params.subsets()],
        }
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: u8, subset: usize) -> &[Residue] {
        &self.blocks[block_index(self.params, l, subset)]
    }

    pub fn set(&mut self, l: u8, subset: usize, x: Vec<Residue>) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        for v in &x {
            self.params.zq().check(v.value())?;
        }
        self.blocks[block_index(self.params, l, subset)] = x;
        Ok(())
    }

    pub fn blocks(&self) -> &[Vec<Residue>] {
        &self.blocks
    }

    pub fn add(&self, other: &Bundle) -> Bundle {
        assert_eq!(
            (self.params, self.n),
            (other.params, other.n),
            "bundle shape mismatch"
        );
        let zq = self.params.zq();
        Bundle {
            params: self.params,
            n: self.n,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(x, y)| x.iter().zip(y).map(|(&a, &b)| zq.add(a, b)).collect())
                .collect(),
        }
    }

    /// Per-position triples: letter `l` at position `i` is
    /// `Σ_S x_{l,S}[i] · x_S` with `x_S` the monomial of `S`.
    pub fn triples(&self) -> Vec<TripleRepr> {
        let alg = subset_algebra(self.params);
        let subsets = self.params.subsets();
        (0..self.n)
            .map(|i| {
                let letter = |l: u8| -> SubsetPoly {
                    let coeffs = (0..subsets).map(|s| self.get(l, s)[i]).collect();
                    alg.from_coeffs(coeffs).expect("length 2^{m-1}")
                };
                TripleRepr {
                    a: letter(1),
                    b: letter(2),
                    c: letter(3),
                }
            })
            .collect()
    }

    pub fn gray_image(&self) -> GrayVector {
        phi_tuple(&self.triples()).expect("n >= 1")
    }

    /// Zeroes every block flagged in `zero_blocks`.
    fn restricted(&self, blocks: &[BlockIdempotent]) -> Bundle {
        let mut out = self.clone();
        for b in blocks {
            if b.is_zero_block() {
                out.blocks[block_index(self.params, b.l, b.subset)] = vec![Residue::ZERO; self.n];
            }
        }
        out
    }
}

/// One row of the stacked generator matrix: `κ_l η_S · g` for a row `g` of
/// block `(l, S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackedRow {
    pub l: u8,
    pub subset: usize,
    pub row: Vec<TowerElement>,
    /// `κ_l η_S = 0`, so the row vanishes.
    pub degenerate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CardinalityReport {
    /// `|C|`, from the Howell form of the digit expansion.
    #[serde(with = "crate::wire::big_decimal")]
    pub measured: BigUint,
    /// Product of the span sizes of all `3 · 2^{m-1}` blocks.
    #[serde(with = "crate::wire::big_decimal")]
    pub paper_product: BigUint,
    /// Product over the blocks with `κ_l η_S ≠ 0`.
    #[serde(with = "crate::wire::big_decimal")]
    pub nonzero_product: BigUint,
    pub status: Status,
    /// Zero blocks `(l, S)` whose component span is non-trivial.
    pub populated_zero_blocks: Vec<(u8, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct WeightOptions {
    pub budget: u64,
    pub samples: u64,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for WeightOptions {
    fn default() -> Self {
        WeightOptions {
            budget: DEFAULT_WEIGHT_BUDGET,
            samples: 1 << 16,
            seed: 0,
            workers: None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMethod {
    Exhaustive,
    /// Minimum over random codewords; an upper bound on the true minimum.
    SampledUpperBound,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MinWeightReport {
    pub method: WeightMethod,
    pub codewords_examined: u64,
    /// `None` for the zero code.
    pub min_hamming: Option<u64>,
    pub min_gray: Option<u64>,
    pub seed: Option<u64>,
}

/// A code over `R^{s,m}` built from component generator matrices.
#[derive(Clone, Debug)]
pub struct RCode {
    params: RingParams,
    n: usize,
    components: Vec<ZModMatrix>,
    kappa: KappaSystem,
    blocks: Vec<BlockIdempotent>,
    digits: RowSpan,
}

impl RCode {
    pub fn build(spec: &ComponentSpec) -> Result<RCode> {
        let params = spec.params()?;
        let components = spec.components()?;
        Self::from_components(params, spec.n, components)
    }

    /// `components` must hold one matrix with `n` columns per block.
    pub fn from_components(
        params: RingParams,
        n: usize,
        components: Vec<ZModMatrix>,
    ) -> Result<RCode> {
        if components.len() != 3 * params.subsets() {
            return Err(Error::LengthMismatch {
                expected: 3 * params.subsets(),
                got: components.len(),
            });
        }
        for c in &components {
            if c.cols() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: c.cols(),
                });
            }
            if c.zq() != params.zq() {
                return Err(Error::ContextMismatch(
                    "component over a different modulus".into(),
                ));
            }
        }
        let kappa = KappaSystem::new(params)?;
        let blocks = block_idempotents(&kappa)?;
        let mut rows = Vec::new();
        for (b, comp) in blocks.iter().zip(&components) {
            if b.is_zero_block() {
                continue;
            }
            for g in comp.row_iter() {
                rows.push(block_row_digits(&b.value, g));
            }
        }
        let digits = RowSpan::from_rows(params.zq(), n * params.tower_rank(), rows);
        Ok(RCode {
            params,
            n,
            components,
            kappa,
            blocks,
            digits,
        })
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> &KappaSystem {
        &self.kappa
    }

    pub fn blocks(&self) -> &[BlockIdempotent] {
        &self.blocks
    }

    pub fn component(&self, l: u8, subset: usize) -> &ZModMatrix {
        &self.components[block_index(self.params, l, subset)]
    }

    pub fn components(&self) -> &[ZModMatrix] {
        &self.components
    }

    /// Howell form of the digit expansion.
    pub fn digit_span(&self) -> &RowSpan {
        &self.digits
    }

    /// The spec that rebuilds this code (non-empty blocks only).
    pub fn spec(&self) -> ComponentSpec {
        let mut spec = ComponentSpec::empty(self.params, self.n);
        for (b, comp) in self.blocks.iter().zip(&self.components) {
            if comp.rows() > 0 {
                spec.blocks.push(BlockSpec {
                    l: b.l,
                    subset: b.subset,
                    rows: comp.to_u64_rows(),
                });
            }
        }
        spec
    }

    pub fn cardinality(&self) -> BigUint {
        self.digits.cardinality()
    }

    /// Rows `κ_l η_S · g` in block order, zero rows kept and flagged.
    pub fn stacked_generator(&self) -> Vec<StackedRow> {
        let mut out = Vec::new();
        for (b, comp) in self.blocks.iter().zip(&self.components) {
            for g in comp.row_iter() {
                out.push(StackedRow {
                    l: b.l,
                    subset: b.subset,
                    row: g.iter().map(|&z| b.value.scale(z)).collect(),
                    degenerate: b.is_zero_block(),
                });
            }
        }
        out
    }

    /// `Σ_{l,S} κ_l η_S · x_{l,S}`.
    pub fn compose(&self, bundle: &Bundle) -> Result<Vec<TowerElement>> {
        self.check_bundle(bundle)?;
        let mut w = vec![TowerElement::zero(self.params); self.n];
        for (b, x) in self.blocks.iter().zip(bundle.blocks()) {
            if b.is_zero_block() {
                continue;
            }
            for (wi, &xi) in w.iter_mut().zip(x) {
                if !xi.is_zero() {
                    *wi = wi.add(&b.value.scale(xi));
                }
            }
        }
        Ok(w)
    }

    /// Recovers the non-zero-block components of a codeword via the block
    /// markers. Zero blocks come back as zero vectors.
    pub fn extract_components(&self, w: &[TowerElement]) -> Result<Bundle> {
        let digits = self.word_digits(w)?;
        if !self.digits.contains(&digits)? {
            return Err(Error::NotInCode);
        }
        Ok(self.extract_unchecked(w))
    }

    fn extract_unchecked(&self, w: &[TowerElement]) -> Bundle {
        let zq = self.params.zq();
        let mut out = Bundle::zero(self.params, self.n);
        for b in &self.blocks {
            let Some(mk) = b.marker else { continue };
            let inv = zq.inv_unit(mk.unit).expect("marker is a unit");
            let idx = mk.digit_index(self.params);
            let x: Vec<Residue> = w
                .iter()
                .map(|wi| zq.mul(b.value.mul(wi).digits()[idx], inv))
                .collect();
            out.blocks[block_index(self.params, b.l, b.subset)] = x;
        }
        out
    }

    pub fn word_digits(&self, w: &[TowerElement]) -> Result<Vec<Residue>> {
        if w.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: w.len(),
            });
        }
        let mut out = Vec::with_capacity(self.n * self.params.tower_rank());
        for wi in w {
            if wi.params() != self.params {
                return Err(Error::ContextMismatch(
                    "codeword over a different ring".into(),
                ));
            }
            out.extend_from_slice(wi.digits());
        }
        Ok(out)
    }

    pub fn word_from_digits(&self, digits: &[Residue]) -> Result<Vec<TowerElement>> {
        let rank = self.params.tower_rank();
        if digits.len() != self.n * rank {
            return Err(Error::LengthMismatch {
                expected: self.n * rank,
                got: digits.len(),
            });
        }
        digits
            .chunks_exact(rank)
            .map(|c| TowerElement::from_digits(self.params, c))
            .collect()
    }

    pub fn contains(&self, w: &[TowerElement]) -> Result<bool> {
        self.digits.contains(&self.word_digits(w)?)
    }

    fn check_bundle(&self, bundle: &Bundle) -> Result<()> {
        if bundle.params() != self.params || bundle.n() != self.n {
            return Err(Error::ContextMismatch(
                "bundle shape does not match the code".into(),
            ));
        }
        Ok(())
    }

    /// Measured size against the product of all block sizes.
    pub fn cardinality_report(&self) -> CardinalityReport {
        let measured = self.cardinality();
        let mut paper_product = BigUint::from(1u8);
        let mut nonzero_product = BigUint::from(1u8);
        let mut populated_zero_blocks = Vec::new();
        for (b, comp) in self.blocks.iter().zip(&self.components) {
            let size = comp.span_cardinality();
            if b.is_zero_block() {
                if size > BigUint::from(1u8) {
                    populated_zero_blocks.push((b.l, b.subset));
                }
            } else {
                nonzero_product *= &size;
            }
            paper_product *= size;
        }
        CardinalityReport {
            status: Status::compare(&paper_product, &measured),
            measured,
            paper_product,
            nonzero_product,
            populated_zero_blocks,
        }
    }

    /// The code built from the blockwise duals of the components.
    pub fn dual_code(&self) -> Result<RCode> {
        let comps: Result<Vec<ZModMatrix>> = self
            .components
            .iter()
            .map(|c| c.dual_generators(self.n))
            .collect();
        RCode::from_components(self.params, self.n, comps?)
    }

    /// One row per block row: `g` placed at every Gray subset column
    /// `T ⊇ S` inside letter block `l`.
    pub fn gray_generator_matrix(&self) -> ZModMatrix {
        let n = self.n;
        let subsets = self.params.subsets();
        let cols = 3 * subsets * n;
        let mut rows = Vec::new();
        for (b, comp) in self.blocks.iter().zip(&self.components) {
            for g in comp.row_iter() {
                rows.push(gray_pattern_row(subsets, n, b.l, b.subset, g));
            }
        }
        ZModMatrix::from_rows(self.params.zq(), cols, rows).expect("rows have 3·2^{m-1}·n entries")
    }

    /// Span of `Φ` over the code, computed from the non-zero blocks.
    pub fn gray_image_span(&self) -> RowSpan {
        let n = self.n;
        let subsets = self.params.subsets();
        let mut rows = Vec::new();
        for (b, comp) in self.blocks.iter().zip(&self.components) {
            if b.is_zero_block() {
                continue;
            }
            for g in comp.row_iter() {
                rows.push(gray_pattern_row(subsets, n, b.l, b.subset, g));
            }
        }
        RowSpan::from_rows(self.params.zq(), 3 * subsets * n, rows)
    }

    /// `Φ` of a codeword: the Gray image of its extracted bundle.
    pub fn gray_of_word(&self, w: &[TowerElement]) -> Result<GrayVector> {
        Ok(self.extract_components(w)?.gray_image())
    }

    /// Codewords paired with their Gray images: each row is the digit
    /// expansion followed by the `Φ` coordinates.
    fn graph_span(&self) -> RowSpan {
        let n = self.n;
        let subsets = self.params.subsets();
        let mut rows = Vec::new();
        for (b, comp) in self.blocks.iter().zip(&self.components) {
            if b.is_zero_block() {
                continue;
            }
            for g in comp.row_iter() {
                let mut row = block_row_digits(&b.value, g);
                row.extend(gray_pattern_row(subsets, n, b.l, b.subset, g));
                rows.push(row);
            }
        }
        let cols = n * self.params.tower_rank() + 3 * subsets * n;
        RowSpan::from_rows(self.params.zq(), cols, rows)
    }

    /// Minimum Hamming weight over `R` and minimum Gray (Lee) weight of the
    /// non-zero codewords, by enumeration when `|C| <= budget` and by seeded
    /// sampling otherwise.
    pub fn min_weight_report(&self, opts: &WeightOptions) -> MinWeightReport {
        let graph = self.graph_span();
        let zq = self.params.zq();
        let rank = self.params.tower_rank();
        let split = self.n * rank;
        let weigh = |v: &[Residue]| -> Option<(u64, u64)> {
            if v.iter().all(|x| x.is_zero()) {
                return None;
            }
            let hamming = v[..split]
                .chunks_exact(rank)
                .filter(|c| c.iter().any(|x| !x.is_zero()))
                .count() as u64;
            let gray = v[split..].iter().map(|&x| zq.lee_weight(x)).sum();
            Some((hamming, gray))
        };
        let min2 = |a: Option<(u64, u64)>, b: Option<(u64, u64)>| match (a, b) {
            (Some(x), Some(y)) => Some((x.0.min(y.0), x.1.min(y.1))),
            (x, None) => x,
            (None, y) => y,
        };
        let log = graph.log2_cardinality();
        let exhaustive = log < 64 && (1u64 << log) <= opts.budget;
        let run = || {
            if exhaustive {
                let total = 1u64 << log;
                let mins = (0..total)
                    .into_par_iter()
                    .map(|i| weigh(&graph.element(u128::from(i))))
                    .reduce(|| None, min2);
                (total, mins)
            } else {
                let radices = graph.radices();
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                let picks: Vec<Vec<u64>> = (0..opts.samples)
                    .map(|_| radices.iter().map(|&r| rng.gen_range(0..r)).collect())
                    .collect();
                let mins = picks
                    .par_iter()
                    .map(|c| weigh(&graph.combine(c)))
                    .reduce(|| None, min2);
                (opts.samples, mins)
            }
        };
        let (examined, mins) = match opts.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .expect("thread pool")
                .install(run),
            None => run(),
        };
        MinWeightReport {
            method: if exhaustive {
                WeightMethod::Exhaustive
            } else {
                WeightMethod::SampledUpperBound
            },
            codewords_examined: examined,
            min_hamming: mins.map(|m| m.0),
            min_gray: mins.map(|m| m.1),
            seed: (!exhaustive).then_some(opts.seed),
        }
    }

    /// Size of the `R`-span of the stacked generator rows (as opposed to
    /// the `Z_{4^s}`-span that defines the code).
    pub fn r_span_cardinality(&self) -> BigUint {
        let rank = self.params.tower_rank();
        let mut rows = Vec::new();
        for sr in self.stacked_generator() {
            if sr.degenerate {
                continue;
            }
            for d in 0..self.params.m() {
                for s in 0..self.params.subsets() {
                    let mono = TowerElement::monomial(self.params, d, s, Residue::ONE);
                    let mut row = Vec::with_capacity(self.n * rank);
                    for x in &sr.row {
                        row.extend_from_slice(x.mul(&mono).digits());
                    }
                    rows.push(row);
                }
            }
        }
        RowSpan::from_rows(self.params.zq(), self.n * rank, rows).cardinality()
    }

    /// Whether the code is closed under multiplication by `v_1..v_m`, i.e. an
    /// `R`-submodule and not only a `Z_{4^s}`-submodule.
    pub fn r_closure_audit(&self) -> AuditReport {
        let mut counterexample = None;
        'outer: for (row_idx, row) in self.digits.rows().iter().enumerate() {
            let w = self
                .word_from_digits(row)
                .expect("Howell rows have code length");
            for var in 1..=self.params.m() {
                let v = TowerElement::var(self.params, var);
                let moved: Vec<TowerElement> = w.iter().map(|x| x.mul(&v)).collect();
                let digits = self.word_digits(&moved).expect("same shape");
                if !self.digits.contains(&digits).expect("same length") {
                    counterexample = Some((row_idx, var));
                    break 'outer;
                }
            }
        }
        let mut report = AuditReport::default();
        report.push(AuditEntry::new(
            "code.r_submodule_closure",
            "code as an R-submodule (artifact check)",
            Status::from_bool(counterexample.is_none()),
            json!({
                "z_span_size": self.cardinality().to_string(),
                "r_span_size": self.r_span_cardinality().to_string(),
                "counterexample": counterexample.map(|(r, v)| json!({ "howell_row": r, "variable": v })),
            }),
        ));
        report
    }
}

/// Ambient inner product `Σ x_i y_i` in `R^{s,m}`.
pub fn inner_product(x: &[TowerElement], y: &[TowerElement]) -> Result<TowerElement> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let first = x
        .first()
        .ok_or_else(|| Error::Precondition("empty vectors".into()))?;
    let mut acc = TowerElement::zero(first.params());
    for (a, b) in x.iter().zip(y) {
        acc = acc.add(&a.try_mul(b)?);
    }
    Ok(acc)
}

/// Number of non-zero positions.
pub fn hamming_weight(w: &[TowerElement]) -> usize {
    w.iter().filter(|x| !x.is_zero()).count()
}

fn block_row_digits(value: &TowerElement, g: &[Residue]) -> Vec<Residue> {
    let zq = value.params().zq();
    let mut out = Vec::with_capacity(g.len() * value.digits().len());
    for &z in g {
        out.extend(value.digits().iter().map(|&d| zq.mul(d, z)));
    }
    out
}

fn gray_pattern_row(subsets: usize, n: usize, l: u8, subset: usize, g: &[Residue]) -> Vec<Residue> {
    let mut row = vec![Residue::ZERO; 3 * subsets * n];
    let base = (l as usize - 1) * subsets;
    for t in 0..subsets {
        if t & subset == subset {
            row[(base + t) * n..(base + t + 1) * n].copy_from_slice(g);
        }
    }
    row
}

/// Checks the Gray generator matrix against `Φ` computed through the triple
/// representation, block row by block row.
pub fn verify_gray_generator(code: &RCode) -> AuditReport {
    let params = code.params();
    let zq: Zq = params.zq();
    let mut via_phi = Vec::new();
    for (b, comp) in code.blocks.iter().zip(&code.components) {
        for g in comp.row_iter() {
            let mut bundle = Bundle::zero(params, code.n);
            bundle
                .set(b.l, b.subset, g.to_vec())
                .expect("row has n entries");
            via_phi.push(bundle.gray_image().coords);
        }
    }
    let direct = code.gray_generator_matrix();
    let rowwise = direct
        .row_iter()
        .zip(&via_phi)
        .all(|(a, b)| a == b.as_slice());
    let span_direct = direct.row_span();
    let span_phi = RowSpan::from_rows(zq, direct.cols(), via_phi);
    let mut report = AuditReport::default();
    report.push(AuditEntry::new(
        "gray.generator_matrix_pattern",
        "Gray image of the generator matrix",
        Status::from_bool(rowwise && span_direct == span_phi),
        json!({
            "rows": direct.rows(),
            "cols": direct.cols(),
            "order": GRAY_ORDER,
            "span_size": span_direct.cardinality().to_string(),
        }),
    ));
    let gray = code.gray_image_span().cardinality();
    let size = code.cardinality();
    report.push(AuditEntry::new(
        "gray.image_size_equals_code_size",
        "size of the Gray image",
        Status::from_bool(gray == size),
        json!({ "gray_image": gray.to_string(), "code": size.to_string() }),
    ));
    report
}

/// Orthogonality of [`RCode::dual_code`] to the code under `Σ x_i y_i`.
///
/// All pairs when `|C|·|C^⊥| <= 2^16`. Otherwise every pair of spanning rows
/// (which decides the question, the form being bilinear) plus `samples`
/// random pairs.
pub fn duality_audit(code: &RCode, samples: u64, seed: u64) -> Result<AuditReport> {
    let dual = code.dual_code()?;
    let product = code.cardinality() * dual.cardinality();
    let exhaustive = product <= BigUint::from(1u32 << 16);
    let words = |c: &RCode, rows: Vec<Vec<Residue>>| -> Result<Vec<Vec<TowerElement>>> {
        rows.iter().map(|r| c.word_from_digits(r)).collect()
    };
    let (xs, ys) = if exhaustive {
        (
            words(&dual, dual.digits.enumerate(1 << 16).expect("small"))?,
            words(code, code.digits.enumerate(1 << 16).expect("small"))?,
        )
    } else {
        (
            words(&dual, dual.digits.rows().to_vec())?,
            words(code, code.digits.rows().to_vec())?,
        )
    };
    let mut pairs = 0u64;
    let mut violation = None;
    'outer: for (i, x) in xs.iter().enumerate() {
        for (j, y) in ys.iter().enumerate() {
            pairs += 1;
            if !inner_product(x, y)?.is_zero() {
                violation = Some(json!({ "dual_word": i, "code_word": j }));
                break 'outer;
            }
        }
    }
    let mut sampled = 0u64;
    if !exhaustive && violation.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |span: &RowSpan, rng: &mut ChaCha8Rng| -> Vec<Residue> {
            let coords: Vec<u64> = span
                .radices()
                .iter()
                .map(|&r| rng.gen_range(0..r))
                .collect();
            span.combine(&coords)
        };
        for _ in 0..samples {
            let x = dual.word_from_digits(&pick(&dual.digits, &mut rng))?;
            let y = code.word_from_digits(&pick(&code.digits, &mut rng))?;
            sampled += 1;
            if !inner_product(&x, &y)?.is_zero() {
                violation = Some(json!({ "sampled_pair": sampled }));
                break;
            }
        }
    }
    let ambient = crate::tower::ring_cardinality(code.params).pow(code.n as u32);
    let mut report = AuditReport::default();
    report.push(AuditEntry::new(
        "duality.orthogonality",
        "dual code as the blockwise sum of component duals",
        Status::from_bool(violation.is_none()),
        json!({
            "exhaustive": exhaustive,
            "pairs_checked": pairs,
            "random_pairs": sampled,
            "seed": (!exhaustive).then_some(seed),
            "code_size": code.cardinality().to_string(),
            "dual_size": dual.cardinality().to_string(),
            "size_product": product.to_string(),
            "ambient_size": ambient.to_string(),
            "violation": violation,
        }),
    ));
    Ok(report)
}

/// The restricted bundle: zero-block entries cleared.
pub fn restrict_to_nonzero_blocks(code: &RCode, bundle: &Bundle) -> Bundle {
    bundle.restricted(code.blocks())
}
