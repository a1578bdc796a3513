//! `R^{s,m}[x]/(x^n - 1)`, the τ idempotents, cyclic shifts and
//! quasi-cyclic codes.
//!
//! A word of length `n` and a quotient polynomial are the same thing: the
//! coefficient of `x^i` sits at position `i`, so multiplying by `x^d` is a
//! right rotation by `d`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::audit::{AuditEntry, AuditReport, Status};
use crate::code::RCode;
use crate::error::{Error, Result};
use crate::linalg::RowSpan;
use crate::residue::{Residue, RingParams};
use crate::tower::{subset_algebra, KappaSystem, TowerElement};

/// Note attached to every quasi-cyclic builder result.
pub const QC_PROVENANCE: &str =
    "orbit-span builder: span of the x^(jd) multiples of the generators; no further structure is claimed";

/// An element of `R^{s,m}[x]/(x^n - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientPoly {
    params: RingParams,
    coeffs: Vec<TowerElement>,
}

impl QuotientPoly {
    pub fn new(coeffs: Vec<TowerElement>) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::InvalidParams("a quotient polynomial needs n >= 1".into()))?;
        let params = first.params();
        if coeffs.iter().any(|c| c.params() != params) {
            return Err(Error::ContextMismatch(
                "coefficients over different rings".into(),
            ));
        }
        Ok(QuotientPoly { params, coeffs })
    }

    pub fn zero(params: RingParams, n: usize) -> Self {
        assert!(n >= 1, "n must be at least 1");
        QuotientPoly {
            params,
            coeffs: vec![TowerElement::zero(params); n],
        }
    }

    pub fn constant(n: usize, c: TowerElement) -> Self {
        let mut p = Self::zero(c.params(), n);
        p.coeffs[0] = c;
        p
    }

    pub fn one(params: RingParams, n: usize) -> Self {
        Self::constant(n, TowerElement::one(params))
    }

    /// `c · x^degree`, with the exponent reduced mod `n`.
    pub fn monomial(n: usize, degree: usize, c: TowerElement) -> Self {
        let mut p = Self::zero(c.params(), n);
        p.coeffs[degree % n] = c;
        p
    }

    /// The constant `η_S`.
    pub fn eta(params: RingParams, n: usize, subset: usize) -> Result<Self> {
        let alg = subset_algebra(params);
        if subset >= alg.len() {
            return Err(Error::OutOfRange(format!(
                "subset {subset} of {} variables",
                alg.vars()
            )));
        }
        Ok(Self::constant(
            n,
            TowerElement::from_subset(params, &alg.eta(subset))?,
        ))
    }

    /// `n^{-1} (1 + x + … + x^{n-1})`, an idempotent for odd `n`.
    pub fn averaging(params: RingParams, n: usize) -> Result<Self> {
        let zq = params.zq();
        let inv = zq.inv_unit(zq.elem(n as u64))?;
        Ok(QuotientPoly {
            params,
            coeffs: vec![TowerElement::constant(params, inv); n],
        })
    }

    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[TowerElement] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<TowerElement> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TowerElement::is_zero)
    }

    /// Whether every coefficient lies in `A_{m-1}`.
    pub fn in_subset_algebra(&self) -> bool {
        self.coeffs.iter().all(TowerElement::in_subset_algebra)
    }

    fn check_context(&self, other: &QuotientPoly) -> Result<()> {
        if self.params != other.params {
            return Err(Error::ContextMismatch(
                "quotient polynomials over different rings".into(),
            ));
        }
        if self.n() != other.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &QuotientPoly) -> Result<QuotientPoly> {
        self.check_context(other)?;
        Ok(QuotientPoly {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &QuotientPoly) -> Result<QuotientPoly> {
        self.check_context(other)?;
        Ok(QuotientPoly {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.sub(b))
                .collect(),
        })
    }

    /// Multiplies every coefficient by the ring element `c`.
    pub fn scale(&self, c: &TowerElement) -> Result<QuotientPoly> {
        Ok(QuotientPoly {
            params: self.params,
            coeffs: self
                .coeffs
                .iter()
                .map(|a| a.try_mul(c))
                .collect::<Result<_>>()?,
        })
    }

    pub fn mul(&self, other: &QuotientPoly) -> Result<QuotientPoly> {
        quotient_mul(self, other)
    }

    /// `x^d · self`.
    pub fn shift(&self, d: usize) -> QuotientPoly {
        QuotientPoly {
            params: self.params,
            coeffs: cyclic_shift(&self.coeffs, d),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        quotient_mul(self, self).expect("same context") == *self
    }

    /// Digits of all coefficients, position-major.
    pub fn digits(&self) -> Vec<Residue> {
        self.coeffs
            .iter()
            .flat_map(|c| c.digits().iter().copied())
            .collect()
    }
}

/// Cyclic convolution of the coefficient vectors.
pub fn quotient_mul(f: &QuotientPoly, g: &QuotientPoly) -> Result<QuotientPoly> {
    f.check_context(g)?;
    let n = f.n();
    let mut out = vec![TowerElement::zero(f.params); n];
    for (i, a) in f.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let k = (i + j) % n;
            out[k] = out[k].add(&a.mul(b));
        }
    }
    Ok(QuotientPoly {
        params: f.params,
        coeffs: out,
    })
}

/// Serialized form: the tower digits of each coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientPolyWire {
    pub m: usize,
    pub s: u32,
    pub n: usize,
    pub coeffs: Vec<Vec<u64>>,
}

impl From<&QuotientPoly> for QuotientPolyWire {
    fn from(p: &QuotientPoly) -> Self {
        QuotientPolyWire {
            m: p.params.m(),
            s: p.params.s(),
            n: p.n(),
            coeffs: p
                .coeffs
                .iter()
                .map(|c| c.digits().iter().map(|d| d.value()).collect())
                .collect(),
        }
    }
}

impl TryFrom<QuotientPolyWire> for QuotientPoly {
    type Error = Error;

    fn try_from(w: QuotientPolyWire) -> Result<Self> {
        let params = RingParams::new(w.m, w.s)?;
        if w.coeffs.len() != w.n {
            return Err(Error::LengthMismatch {
                expected: w.n,
                got: w.coeffs.len(),
            });
        }
        let zq = params.zq();
        let coeffs = w
            .coeffs
            .iter()
            .map(|ds| {
                let ds = ds
                    .iter()
                    .map(|&d| zq.check(d))
                    .collect::<Result<Vec<_>>>()?;
                TowerElement::from_digits(params, &ds)
            })
            .collect::<Result<Vec<_>>>()?;
        QuotientPoly::new(coeffs)
    }
}

/// Admissible inputs of [`tau_build`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauChoice {
    Zero,
    One,
    /// `η_S`, `S` as a bitmask.
    Eta(usize),
    /// `n^{-1}(1 + x + … + x^{n-1})`.
    Averaging,
    /// `η_S · n^{-1}(1 + x + … + x^{n-1})`.
    EtaAveraging(usize),
    /// Arbitrary coefficients in `A_{m-1}`: one subset-coefficient vector per
    /// power of `x`. Checked for idempotency.
    Custom(Vec<Vec<u64>>),
}

impl TauChoice {
    pub fn is_custom(&self) -> bool {
        matches!(self, TauChoice::Custom(_))
    }

    pub fn to_poly(&self, params: RingParams, n: usize) -> Result<QuotientPoly> {
        match self {
            TauChoice::Zero => Ok(QuotientPoly::zero(params, n)),
            TauChoice::One => Ok(QuotientPoly::one(params, n)),
            TauChoice::Eta(s) => QuotientPoly::eta(params, n, *s),
            TauChoice::Averaging => QuotientPoly::averaging(params, n),
            TauChoice::EtaAveraging(s) => {
                let eta = QuotientPoly::eta(params, n, *s)?;
                eta.mul(&QuotientPoly::averaging(params, n)?)
            }
            TauChoice::Custom(rows) => {
                if rows.len() != n {
                    return Err(Error::LengthMismatch {
                        expected: n,
                        got: rows.len(),
                    });
                }
                let alg = subset_algebra(params);
                let coeffs = rows
                    .iter()
                    .map(|r| TowerElement::from_subset(params, &alg.from_u64s(r)?))
                    .collect::<Result<Vec<_>>>()?;
                QuotientPoly::new(coeffs)
            }
        }
    }

    /// `0`, `1` and every `η_S`.
    pub fn constants(params: RingParams) -> Vec<TauChoice> {
        let mut out = vec![TauChoice::Zero, TauChoice::One];
        out.extend((0..params.subsets()).map(TauChoice::Eta));
        out
    }
}

/// `κ₁e₁ + κ₂e₂ + κ₃e₃` without any check.
pub fn tau_combine(kappa: &KappaSystem, es: [&QuotientPoly; 3]) -> Result<QuotientPoly> {
    es[0].check_context(es[1])?;
    es[0].check_context(es[2])?;
    if es[0].params() != kappa.params() {
        return Err(Error::ContextMismatch(
            "κ system over a different ring".into(),
        ));
    }
    let mut tau = QuotientPoly::zero(kappa.params(), es[0].n());
    for (l, e) in (1..=3u8).zip(es) {
        tau = tau.add(&e.scale(kappa.get(l))?)?;
    }
    Ok(tau)
}

/// `τ = κ₁e₁ + κ₂e₂ + κ₃e₃` for idempotents `e_i` of `A_{m-1}[x]/(x^n - 1)`.
///
/// Fails with [`Error::NotIdempotent`] naming the first offending slot
/// (1-based), and re-checks `τ² = τ` on the result.
pub fn tau_build(
    kappa: &KappaSystem,
    e1: &QuotientPoly,
    e2: &QuotientPoly,
    e3: &QuotientPoly,
) -> Result<QuotientPoly> {
    for (slot, e) in [e1, e2, e3].into_iter().enumerate() {
        if !e.in_subset_algebra() {
            return Err(Error::Precondition(format!(
                "input {} has coefficients outside A_(m-1)",
                slot + 1
            )));
        }
        if !e.is_idempotent() {
            return Err(Error::NotIdempotent { slot: slot + 1 });
        }
    }
    let tau = tau_combine(kappa, [e1, e2, e3])?;
    if !tau.is_idempotent() {
        return Err(Error::Precondition(
            "τ built from idempotents is not idempotent".into(),
        ));
    }
    Ok(tau)
}

/// A random element of `A_{m-1}[x]/(x^n - 1)` that is not idempotent.
pub fn random_non_idempotent(params: RingParams, n: usize, rng: &mut impl Rng) -> QuotientPoly {
    let alg = subset_algebra(params);
    let zq = params.zq();
    loop {
        let coeffs = (0..n)
            .map(|_| {
                let cs: Vec<Residue> = (0..alg.len()).map(|_| zq.elem(rng.gen())).collect();
                TowerElement::from_subset(params, &alg.from_coeffs(cs).expect("width"))
                    .expect("same ring")
            })
            .collect();
        let p = QuotientPoly::new(coeffs).expect("n >= 1");
        if !p.is_idempotent() {
            return p;
        }
    }
}

/// Default lengths for [`lemma_audit`].
pub const LEMMA_LENGTHS: [usize; 3] = [1, 3, 7];

/// Forward direction is exhaustive below this many digit operations
/// (roughly triples × n² × tower rank).
const FORWARD_BUDGET: usize = 4_000_000;
const FORWARD_SAMPLES: usize = 300;

/// Both directions of "τ is idempotent iff every `e_i` is".
///
/// * forward: every triple of constants from `{0, 1, η_S}` at each length
///   gives an idempotent τ (seeded sample of triples for large `m`).
/// * converse: `random` non-idempotents per length, each put in every slot
///   with the other two drawn from the constants; any idempotent τ is a
///   counterexample. The fixed witness `e₁ = 2v₁`, `e₂ = e₃ = 0`, `n = 1` is
///   always tried first.
pub fn lemma_audit(
    params: RingParams,
    lengths: &[usize],
    random: usize,
    seed: u64,
) -> Result<AuditReport> {
    let kappa = KappaSystem::new(params)?;
    let choices = TauChoice::constants(params);
    let mut report = AuditReport::default();

    let c = choices.len();
    let cost: usize =
        lengths.iter().map(|n| n * n).sum::<usize>() * c * c * c * params.tower_rank();
    let exhaustive = cost <= FORWARD_BUDGET;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for &n in lengths {
        let polys: Vec<QuotientPoly> = choices
            .iter()
            .map(|c| c.to_poly(params, n))
            .collect::<Result<_>>()?;
        let triples: Vec<[usize; 3]> = if exhaustive {
            (0..c * c * c)
                .map(|t| [t / (c * c), (t / c) % c, t % c])
                .collect()
        } else {
            (0..FORWARD_SAMPLES)
                .map(|_| {
                    [
                        rng.gen_range(0..c),
                        rng.gen_range(0..c),
                        rng.gen_range(0..c),
                    ]
                })
                .collect()
        };
        for [i, j, k] in triples {
            let tau = tau_combine(&kappa, [&polys[i], &polys[j], &polys[k]])?;
            checked += 1;
            if !tau.is_idempotent() && failures.len() < 8 {
                failures.push(json!({"n": n, "e": [&choices[i], &choices[j], &choices[k]]}));
            }
        }
    }
    report.push(AuditEntry::new(
        "lemma.forward",
        "idempotent e_i give an idempotent τ",
        Status::from_bool(failures.is_empty()),
        json!({
            "lengths": lengths,
            "choices": choices,
            "exhaustive": exhaustive,
            "triples_checked": checked,
            "failures": failures,
        }),
    ));

    let mut counterexamples = Vec::new();
    let alg = subset_algebra(params);
    let witness = QuotientPoly::constant(
        1,
        TowerElement::from_subset(params, &alg.var(1).scale(Residue(2)))?,
    );
    let zero = QuotientPoly::zero(params, 1);
    let witness_tau = tau_combine(&kappa, [&witness, &zero, &zero])?;
    let witness_holds = witness_tau.is_idempotent() && !witness.is_idempotent();
    if witness_holds {
        counterexamples.push(json!({
            "n": 1, "slot": 1,
            "e": ["2*v1", "0", "0"],
            "tau": QuotientPolyWire::from(&witness_tau),
        }));
    }
    let mut trials = 0u64;
    let mut random_hits = 0u64;
    for &n in lengths {
        for _ in 0..random {
            let bad = random_non_idempotent(params, n, &mut rng);
            for slot in 0..3 {
                let mut es: Vec<QuotientPoly> = (0..3)
                    .map(|_| choices[rng.gen_range(0..choices.len())].to_poly(params, n))
                    .collect::<Result<_>>()?;
                es[slot] = bad.clone();
                let tau = tau_combine(&kappa, [&es[0], &es[1], &es[2]])?;
                trials += 1;
                if tau.is_idempotent() {
                    random_hits += 1;
                    if counterexamples.len() < 8 {
                        counterexamples.push(json!({
                            "n": n, "slot": slot + 1,
                            "non_idempotent": QuotientPolyWire::from(&bad),
                        }));
                    }
                }
            }
        }
    }
    report.push(AuditEntry::new(
        "lemma.converse",
        "an idempotent τ forces idempotent e_i",
        Status::from_bool(counterexamples.is_empty()),
        json!({
            "seed": seed,
            "random_trials": trials,
            "random_counterexamples": random_hits,
            "fixed_witness_refutes": witness_holds,
            "counterexamples": counterexamples,
        }),
    ));
    Ok(report)
}

/// Rotates right by `d`: position `i` moves to `i + d mod n`.
pub fn cyclic_shift<T: Clone>(w: &[T], d: usize) -> Vec<T> {
    let mut out = w.to_vec();
    if !out.is_empty() {
        let len = out.len();
        out.rotate_right(d % len);
    }
    out
}

/// What a quasi-cyclic check runs on.
#[derive(Clone, Copy, Debug)]
pub enum QcTarget<'a> {
    Code(&'a RCode),
    /// The `R^{s,m}`-span of explicit words.
    Generators {
        params: RingParams,
        words: &'a [Vec<TowerElement>],
    },
    /// A row span over `Z_{4^s}` whose positions are `width` digits wide.
    Digits {
        span: &'a RowSpan,
        width: usize,
    },
}

/// The `Z_{4^s}` span of `R^{s,m}`-multiples of the words, in digits.
pub fn r_span(params: RingParams, words: &[Vec<TowerElement>]) -> Result<RowSpan> {
    let n = words
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidParams("at least one generator is needed".into()))?;
    let basis = tower_basis(params);
    let mut rows = Vec::with_capacity(words.len() * basis.len());
    for w in words {
        if w.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: w.len(),
            });
        }
        for b in &basis {
            let mut row = Vec::with_capacity(n * params.tower_rank());
            for x in w {
                row.extend_from_slice(x.try_mul(b)?.digits());
            }
            rows.push(row);
        }
    }
    Ok(RowSpan::from_rows(
        params.zq(),
        n * params.tower_rank(),
        rows,
    ))
}

fn tower_basis(params: RingParams) -> Vec<TowerElement> {
    (0..params.m())
        .flat_map(|d| {
            (0..params.subsets()).map(move |s| TowerElement::monomial(params, d, s, Residue::ONE))
        })
        .collect()
}

/// Decides whether the span is invariant under rotation by `d` positions by
/// testing every spanning row. Codes with at most `enumerate_limit` words
/// are also checked word by word.
pub fn qc_invariance_check(
    target: QcTarget<'_>,
    d: usize,
    enumerate_limit: u64,
) -> Result<AuditReport> {
    let owned;
    let (span, width) = match target {
        QcTarget::Code(code) => (code.digit_span(), code.params().tower_rank()),
        QcTarget::Generators { params, words } => {
            owned = r_span(params, words)?;
            (&owned, params.tower_rank())
        }
        QcTarget::Digits { span, width } => (span, width),
    };
    if width == 0 || span.cols() % width != 0 {
        return Err(Error::InvalidParams(format!(
            "{} digit columns do not split into positions of width {width}",
            span.cols()
        )));
    }
    let n = span.cols() / width;
    if d == 0 || n % d != 0 {
        return Err(Error::InvalidParams(format!(
            "shift {d} does not divide the length {n}"
        )));
    }
    let mut failing = None;
    for (i, row) in span.rows().iter().enumerate() {
        if !span.contains(&cyclic_shift(row, d * width))? {
            failing = Some(i);
            break;
        }
    }
    let mut words_checked = None;
    if failing.is_none() {
        if let Some(words) = span.enumerate(enumerate_limit) {
            for w in &words {
                if !span.contains(&cyclic_shift(w, d * width))? {
                    return Err(Error::Precondition(
                        "span invariant on generators but not on a word".into(),
                    ));
                }
            }
            words_checked = Some(words.len());
        }
    }
    let mut report = AuditReport::default();
    report.push(AuditEntry::new(
        "qc.shift_invariance",
        "quasi-cyclic codes: invariance under every d-th cyclic shift",
        Status::from_bool(failing.is_none()),
        json!({
            "n": n,
            "d": d,
            "spanning_rows_checked": span.rows().len(),
            "first_failing_row": failing,
            "words_checked": words_checked,
            "cardinality": span.cardinality().to_string(),
        }),
    ));
    Ok(report)
}

/// A code spanned by the `x^{jd}` multiples of `ℓ` generators.
#[derive(Clone, Debug)]
pub struct QcCode {
    params: RingParams,
    n: usize,
    d: usize,
    generators: Vec<QuotientPoly>,
    span: RowSpan,
}

impl QcCode {
    pub fn params(&self) -> RingParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of generators `ℓ`.
    pub fn index(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[QuotientPoly] {
        &self.generators
    }

    pub fn span(&self) -> &RowSpan {
        &self.span
    }

    pub fn cardinality(&self) -> num_bigint::BigUint {
        self.span.cardinality()
    }

    pub fn contains(&self, w: &QuotientPoly) -> Result<bool> {
        if w.params() != self.params || w.n() != self.n {
            return Err(Error::ContextMismatch("word of a different shape".into()));
        }
        self.span.contains(&w.digits())
    }

    pub fn invariance(&self, d: usize, enumerate_limit: u64) -> Result<AuditReport> {
        qc_invariance_check(
            QcTarget::Digits {
                span: &self.span,
                width: self.params.tower_rank(),
            },
            d,
            enumerate_limit,
        )
    }
}

/// The `R^{s,m}`-span of `{x^{jd} g_i : 0 <= j < n/d}`.
pub fn qc_from_generators(gs: &[QuotientPoly], d: usize) -> Result<QcCode> {
    let first = gs
        .first()
        .ok_or_else(|| Error::InvalidParams("at least one generator is needed".into()))?;
    let (params, n) = (first.params(), first.n());
    for g in gs {
        first.check_context(g)?;
    }
    if d == 0 || n % d != 0 {
        return Err(Error::InvalidParams(format!(
            "shift {d} does not divide the length {n}"
        )));
    }
    let words: Vec<Vec<TowerElement>> = gs
        .iter()
        .flat_map(|g| (0..n / d).map(move |j| g.shift(j * d).into_coeffs()))
        .collect();
    Ok(QcCode {
        params,
        n,
        d,
        generators: gs.to_vec(),
        span: r_span(params, &words)?,
    })
}
