//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Each library result is compared with a brute-force oracle written here.
//! Checks listed in `KNOWN_RED` print FAIL without failing the run; a known
//! red check that starts passing fails it, so the list cannot go stale.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ringcodes::code::{duality_audit, verify_gray_generator, Bundle};
use ringcodes::cyclic::{
    qc_from_generators, random_non_idempotent, tau_build, tau_combine, QuotientPoly, TauChoice,
};
use ringcodes::families::{
    family_length_audit, weight_stats, FamilyRing, FamilyType, LazyGenerator, StatsOptions,
    LENGTH_FORMULAS,
};
use ringcodes::formula;
use ringcodes::gray::phi_inverse;
use ringcodes::linalg::ZModMatrix;
use ringcodes::subset::SubsetAlgebra;
use ringcodes::tower::{block_idempotents, verify_block_idempotents, KappaSystem};
use ringcodes::{ComponentSpec, RCode, Residue, RingParams, Status, TowerElement, Zq};

const SEED: u64 = 0x5eed_2024;
const TOTAL_BUDGET: Duration = Duration::from_secs(60);

/// `(criterion, check)` pairs that are expected to fail.
const KNOWN_RED: &[(u8, &str)] = &[(4, "converse")];

type Res<T> = ringcodes::Result<T>;

#[derive(Default)]
struct Check {
    failures: BTreeMap<String, (usize, String)>,
    notes: Vec<String>,
}

impl Check {
    fn ensure(&mut self, part: &str, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            let slot = self
                .failures
                .entry(part.to_string())
                .or_insert_with(|| (0, detail()));
            slot.0 += 1;
        }
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    run: fn(&mut Check) -> Res<()>,
}

fn params(m: usize, s: u32) -> RingParams {
    RingParams::new(m, s).expect("valid parameters")
}

fn vals(xs: &[Residue]) -> Vec<u64> {
    xs.iter().map(|r| r.value()).collect()
}

fn res(zq: Zq, xs: &[u64]) -> Vec<Residue> {
    xs.iter().map(|&x| zq.elem(x)).collect()
}

// ---------------------------------------------------------------- oracles

/// Schoolbook product in `R^{s,m}` on raw digits.
fn tower_mul(p: RingParams, a: &[u64], b: &[u64]) -> Vec<u64> {
    let (m, n) = (p.m(), p.subsets());
    let mask = p.zq().modulus() - 1;
    let mut out = vec![0u64; m * n];
    for d1 in 0..m {
        for s1 in 0..n {
            let x = a[d1 * n + s1];
            if x == 0 {
                continue;
            }
            for d2 in 0..m {
                let mut e = d1 + d2;
                while e >= m {
                    e -= m - 1;
                }
                for s2 in 0..n {
                    let y = b[d2 * n + s2];
                    if y != 0 {
                        let idx = e * n + (s1 | s2);
                        out[idx] = (out[idx] + x * y) & mask;
                    }
                }
            }
        }
    }
    out
}

fn subset_mul(q: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len()];
    for (s, &x) in a.iter().enumerate() {
        for (t, &y) in b.iter().enumerate() {
            out[s | t] = (out[s | t] + x * y) % q;
        }
    }
    out
}

/// Value at every point: `f(P) = Σ_{T ⊆ P} a_T`.
fn point_values(q: u64, a: &[u64]) -> Vec<u64> {
    (0..a.len())
        .map(|p| {
            (0..a.len())
                .filter(|&t| t & !p == 0)
                .map(|t| a[t])
                .sum::<u64>()
                % q
        })
        .collect()
}

fn quotient_square(p: RingParams, coeffs: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = coeffs.len();
    let mask = p.zq().modulus() - 1;
    let mut out = vec![vec![0u64; p.tower_rank()]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = tower_mul(p, &coeffs[i], &coeffs[j]);
            for (o, x) in out[(i + j) % n].iter_mut().zip(prod) {
                *o = (*o + x) & mask;
            }
        }
    }
    out
}

fn poly_digits(f: &QuotientPoly) -> Vec<Vec<u64>> {
    f.coeffs().iter().map(|c| vals(c.digits())).collect()
}

fn is_idempotent_oracle(f: &QuotientPoly) -> bool {
    let c = poly_digits(f);
    quotient_square(f.params(), &c) == c
}

fn all_vectors(q: u64, n: usize) -> impl Iterator<Item = Vec<u64>> {
    (0..q.pow(n as u32)).map(move |mut i| {
        (0..n)
            .map(|_| {
                let d = i % q;
                i /= q;
                d
            })
            .collect()
    })
}

/// Every `Z_q`-combination of `rows`, by enumeration.
fn brute_span(q: u64, cols: usize, rows: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    all_vectors(q, rows.len())
        .map(|cs| {
            let mut v = vec![0u64; cols];
            for (c, r) in cs.iter().zip(rows) {
                for (x, y) in v.iter_mut().zip(r) {
                    *x = (*x + c * y) % q;
                }
            }
            v
        })
        .collect()
}

fn rotate_positions(digits: &[Residue], rank: usize, d: usize) -> Vec<Residue> {
    let n = digits.len() / rank;
    let mut out = vec![Residue::ZERO; digits.len()];
    for i in 0..n {
        let j = (i + d) % n;
        out[j * rank..(j + 1) * rank].copy_from_slice(&digits[i * rank..(i + 1) * rank]);
    }
    out
}

// ------------------------------------------------------------ criterion 1

fn pierce(c: &mut Check) -> Res<()> {
    for (m, s) in [(4, 1), (4, 2), (6, 1)] {
        let p = params(m, s);
        let kappa = KappaSystem::new(p)?;
        let ks: Vec<Vec<u64>> = kappa.as_array().iter().map(|k| vals(k.digits())).collect();
        let mut one = vec![0u64; p.tower_rank()];
        one[0] = 1;
        let q = p.zq().modulus();
        for i in 0..3 {
            c.ensure("idempotent", tower_mul(p, &ks[i], &ks[i]) == ks[i], || {
                format!("κ{} at ({m},{s})", i + 1)
            });
            for j in (i + 1)..3 {
                c.ensure(
                    "orthogonal",
                    tower_mul(p, &ks[i], &ks[j]).iter().all(|&x| x == 0),
                    || format!("κ{}κ{} at ({m},{s})", i + 1, j + 1),
                );
            }
        }
        let sum: Vec<u64> = (0..p.tower_rank())
            .map(|d| (ks[0][d] + ks[1][d] + ks[2][d]) % q)
            .collect();
        c.ensure("sum", sum == one, || format!("Σκ ≠ 1 at ({m},{s})"));
        c.ensure("library", kappa.verify_pierce().all_pass(), || {
            format!("verify_pierce at ({m},{s})")
        });
    }
    Ok(())
}

// ------------------------------------------------------------ criterion 2

fn eta_suite(c: &mut Check) -> Res<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 2);
    for m in [4usize, 6] {
        for s in [1u32, 2] {
            let zq = Zq::new(s)?;
            let q = zq.modulus();
            let alg = SubsetAlgebra::new(m - 1, zq)?;
            let len = alg.len();
            let etas: Vec<Vec<u64>> = (0..len).map(|t| alg.eta(t).coeff_values()).collect();
            let mut sum = vec![0u64; len];
            for (t, e) in etas.iter().enumerate() {
                c.ensure("idempotent", subset_mul(q, e, e) == *e, || {
                    format!("η_{t:#b} at m={m}, s={s}")
                });
                for (u, f) in etas.iter().enumerate().skip(t + 1) {
                    c.ensure(
                        "orthogonal",
                        subset_mul(q, e, f).iter().all(|&x| x == 0),
                        || format!("η_{t:#b} η_{u:#b} at m={m}, s={s}"),
                    );
                }
                let mut unit = vec![0u64; len];
                unit[t] = 1;
                c.ensure(
                    "zeta(η_S) = e_S",
                    vals(&alg.eta(t).zeta()) == unit && point_values(q, e) == unit,
                    || format!("S = {t:#b} at m={m}, s={s}"),
                );
                for (x, y) in sum.iter_mut().zip(e) {
                    *x = (*x + y) % q;
                }
            }
            let mut one = vec![0u64; len];
            one[0] = 1;
            c.ensure("sum", sum == one, || format!("Ση ≠ 1 at m={m}, s={s}"));
            c.ensure("library", alg.verify_eta_system().all_pass(), || {
                format!("verify_eta_system at m={m}, s={s}")
            });

            for _ in 0..1000 {
                let a: Vec<u64> = (0..len).map(|_| rng.gen_range(0..q)).collect();
                let poly = alg.from_u64s(&a)?;
                let z = poly.zeta();
                c.ensure("zeta oracle", vals(&z) == point_values(q, &a), || {
                    format!("m={m}, s={s}")
                });
                c.ensure("möbius∘zeta", alg.mobius(&z)? == poly, || {
                    format!("m={m}, s={s}")
                });
                let w = res(
                    zq,
                    &(0..len).map(|_| rng.gen_range(0..q)).collect::<Vec<_>>(),
                );
                c.ensure("zeta∘möbius", alg.mobius(&w)?.zeta() == w, || {
                    format!("m={m}, s={s}")
                });
            }
        }
    }
    c.note("1000 random round trips at each of (m, s) ∈ {4, 6} × {1, 2}");
    Ok(())
}

// ------------------------------------------------------------ criterion 3

fn block_suite(c: &mut Check) -> Res<()> {
    for s in [1u32, 2] {
        let p = params(4, s);
        let kappa = KappaSystem::new(p)?;
        let blocks = block_idempotents(&kappa)?;
        c.ensure("count", blocks.len() == 3 * p.subsets(), || {
            format!("{} blocks at s={s}", blocks.len())
        });
        let mut zero = Vec::new();
        for b in &blocks {
            let v = vals(b.value.digits());
            c.ensure("idempotent", tower_mul(p, &v, &v) == v, || {
                format!("κ{}η_{:#b} at s={s}", b.l, b.subset)
            });
            let is_zero = v.iter().all(|&x| x == 0);
            c.ensure("zero flag", is_zero == b.is_zero_block(), || {
                format!("({}, {:#b}) at s={s}", b.l, b.subset)
            });
            if is_zero {
                zero.push((b.l, b.subset));
            }
        }
        let expected: Vec<(u8, usize)> = [1u8, 2]
            .iter()
            .flat_map(|&l| (1..p.subsets()).map(move |t| (l, t)))
            .collect();
        c.ensure("zero blocks", zero == expected, || {
            format!("computed {zero:?} at s={s}")
        });
        c.ensure(
            "library",
            verify_block_idempotents(&kappa)?.all_pass(),
            || format!("s={s}"),
        );
    }
    c.note("zero blocks at m=4: exactly (1,S) and (2,S) for S ≠ ∅; 10 nonzero blocks");
    Ok(())
}

// ------------------------------------------------------------ criterion 4

fn lemma_suite(c: &mut Check) -> Res<()> {
    let p = params(4, 1);
    let kappa = KappaSystem::new(p)?;
    let choices = TauChoice::constants(p);
    c.ensure("choices", choices.len() == 2 + p.subsets(), || {
        format!("{} constants", choices.len())
    });
    let k = choices.len();
    let mut forward = 0u64;
    for n in [1usize, 3, 7] {
        let polys: Vec<QuotientPoly> = choices
            .iter()
            .map(|t| t.to_poly(p, n))
            .collect::<Res<_>>()?;
        for e in &polys {
            c.ensure("inputs idempotent", is_idempotent_oracle(e), || {
                format!("constant at n={n}")
            });
        }
        for t in 0..k * k * k {
            let [i, j, l] = [t / (k * k), (t / k) % k, t % k];
            let tau = tau_combine(&kappa, [&polys[i], &polys[j], &polys[l]])?;
            let oracle = is_idempotent_oracle(&tau);
            c.ensure("forward", oracle, || {
                format!(
                    "n={n}: ({:?}, {:?}, {:?})",
                    choices[i], choices[j], choices[l]
                )
            });
            c.ensure("library agrees", oracle == tau.is_idempotent(), || {
                format!("n={n}")
            });
            forward += 1;
        }
    }
    c.note(format!(
        "forward: all {forward} triples from {{0, 1, η_S}} at n ∈ {{1, 3, 7}} give τ² = τ"
    ));

    // converse: a non-idempotent input must spoil τ
    let alg = SubsetAlgebra::new(3, p.zq())?;
    let witness = QuotientPoly::constant(
        1,
        TowerElement::from_subset(p, &alg.var(1).scale(p.zq().elem(2)))?,
    );
    let zero = QuotientPoly::zero(p, 1);
    let wtau = tau_combine(&kappa, [&witness, &zero, &zero])?;
    let witness_refutes = !is_idempotent_oracle(&witness) && is_idempotent_oracle(&wtau);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let (mut trials, mut hits) = (0u64, 0u64);
    let mut hits_by_n = BTreeMap::new();
    for n in [1usize, 3, 7] {
        for _ in 0..10 {
            let bad = random_non_idempotent(p, n, &mut rng);
            c.ensure("non-idempotent sample", !is_idempotent_oracle(&bad), || {
                format!("n={n}")
            });
            for slot in 0..3 {
                let mut es: Vec<QuotientPoly> = (0..3)
                    .map(|_| choices[rng.gen_range(0..k)].to_poly(p, n))
                    .collect::<Res<_>>()?;
                es[slot] = bad.clone();
                let tau = tau_combine(&kappa, [&es[0], &es[1], &es[2]])?;
                trials += 1;
                if is_idempotent_oracle(&tau) {
                    hits += 1;
                    *hits_by_n.entry(n).or_insert(0u64) += 1;
                }
            }
        }
    }
    c.ensure("converse", !witness_refutes && hits == 0, || {
        format!(
            "{}; {hits} of {trials} random trials also gave τ² = τ (by length: {hits_by_n:?})",
            if witness_refutes {
                "e1 = 2v1, e2 = e3 = 0 at n=1 is not idempotent, yet τ = 0 is"
            } else {
                "fixed witness did not refute"
            }
        )
    });
    // tau_build rejects the witness slot even though τ itself is idempotent
    let rejected = matches!(
        tau_build(&kappa, &witness, &zero, &zero),
        Err(ringcodes::Error::NotIdempotent { slot: 1 })
    );
    c.ensure("tau_build guard", rejected, || {
        "non-idempotent e1 accepted".into()
    });
    Ok(())
}

// ------------------------------------------------------------ criterion 5

fn random_entry(rng: &mut ChaCha8Rng, q: u64) -> u64 {
    let x = rng.gen_range(0..q);
    if rng.gen_bool(0.5) {
        (x << rng.gen_range(1..q.trailing_zeros())) % q
    } else {
        x
    }
}

fn howell_oracle(c: &mut Check) -> Res<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let mut members = 0u64;
    for trial in 0..200 {
        let s = 1 + (trial % 2) as u32;
        let zq = Zq::new(s)?;
        let q = zq.modulus();
        let n = rng.gen_range(1..=4usize);
        let r = rng.gen_range(1..=3usize);
        let rows: Vec<Vec<u64>> = (0..r)
            .map(|_| (0..n).map(|_| random_entry(&mut rng, q)).collect())
            .collect();
        let mat = ZModMatrix::from_u64_rows(zq, n, &rows)?;
        let span = brute_span(q, n, &rows);
        let label = || format!("Z_{q}, rows {rows:?}");

        c.ensure(
            "span_cardinality",
            mat.span_cardinality() == BigUint::from(span.len()),
            label,
        );
        let rs = mat.row_span();
        let annihilated: HashSet<Vec<u64>> = all_vectors(q, n)
            .filter(|v| {
                rows.iter()
                    .all(|g| v.iter().zip(g).map(|(a, b)| a * b).sum::<u64>() % q == 0)
            })
            .collect();
        for v in all_vectors(q, n) {
            let rv = res(zq, &v);
            c.ensure("membership", rs.contains(&rv)? == span.contains(&v), label);
            members += 1;
        }
        for _ in 0..32 {
            let v: Vec<u64> = (0..n).map(|_| random_entry(&mut rng, q)).collect();
            c.ensure(
                "is_member",
                mat.is_member(&res(zq, &v))? == span.contains(&v),
                label,
            );
        }
        for v in span.iter().take(32) {
            c.ensure("is_member", mat.is_member(&res(zq, v))?, label);
        }

        let dual = mat.dual_generators(n)?;
        for g in dual.to_u64_rows() {
            c.ensure("dual rows annihilate", annihilated.contains(&g), label);
        }
        let ds = dual.row_span();
        c.ensure(
            "dual size",
            ds.cardinality() == BigUint::from(annihilated.len()),
            label,
        );
        for v in &annihilated {
            c.ensure("dual spans annihilator", ds.contains(&res(zq, v))?, label);
        }
    }
    c.note(format!(
        "100 matrices over Z_4 and 100 over Z_16; {members} membership queries"
    ));
    Ok(())
}

// ------------------------------------------------------- specs for 6 – 8

struct SpecCase {
    spec: ComponentSpec,
    /// `(l, S, row)` for every populated block.
    populated: Vec<(u8, usize, Vec<u64>)>,
}

fn random_specs() -> Vec<SpecCase> {
    let p = params(4, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    (0..50)
        .map(|_| {
            let n = rng.gen_range(1..=2usize);
            let count = rng.gen_range(0..=6usize);
            let mut spec = ComponentSpec::empty(p, n);
            let mut populated = Vec::new();
            for idx in sample(&mut rng, 3 * p.subsets(), count).into_vec() {
                let (l, t) = ((idx / p.subsets()) as u8 + 1, idx % p.subsets());
                let row: Vec<u64> = loop {
                    let r: Vec<u64> = (0..n).map(|_| rng.gen_range(0..4)).collect();
                    if r.iter().any(|&x| x != 0) {
                        break r;
                    }
                };
                spec = spec.with_block(l, t, vec![row.clone()]);
                populated.push((l, t, row));
            }
            SpecCase { spec, populated }
        })
        .collect()
}

/// Every codeword as digits, by summing block multiples.
fn brute_code(code: &RCode, case: &SpecCase) -> HashSet<Vec<u64>> {
    let p = code.params();
    let n = code.n();
    let rank = p.tower_rank();
    let values: Vec<Vec<u64>> = case
        .populated
        .iter()
        .map(|(l, t, _)| {
            let b = code
                .blocks()
                .iter()
                .find(|b| b.l == *l && b.subset == *t)
                .expect("block");
            vals(b.value.digits())
        })
        .collect();
    all_vectors(4, case.populated.len())
        .map(|cs| {
            let mut w = vec![0u64; n * rank];
            for ((c, (_, _, row)), v) in cs.iter().zip(&case.populated).zip(&values) {
                for i in 0..n {
                    let scalar = c * row[i] % 4;
                    for d in 0..rank {
                        w[i * rank + d] = (w[i * rank + d] + scalar * v[d]) % 4;
                    }
                }
            }
            w
        })
        .collect()
}

fn multiples(row: &[u64]) -> usize {
    (0..4u64)
        .map(|c| row.iter().map(|x| c * x % 4).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

// ------------------------------------------------------------ criterion 6

fn cardinality_suite(c: &mut Check) -> Res<()> {
    let mut with_zero = 0;
    for (k, case) in random_specs().iter().enumerate() {
        let code = RCode::build(&case.spec)?;
        let words = brute_code(&code, case);
        let zero_blocks: Vec<(u8, usize)> = case
            .populated
            .iter()
            .filter(|(l, _, _)| *l < 3)
            .filter(|(_, t, _)| *t != 0)
            .map(|(l, t, _)| (*l, *t))
            .collect();
        let nonzero: BigUint = case
            .populated
            .iter()
            .filter(|(l, t, _)| !zero_blocks.contains(&(*l, *t)))
            .map(|(_, _, r)| BigUint::from(multiples(r)))
            .product();
        let full: BigUint = case
            .populated
            .iter()
            .map(|(_, _, r)| BigUint::from(multiples(r)))
            .product();
        let report = code.cardinality_report();
        let label = || format!("spec {k}: {:?}", case.populated);
        c.ensure(
            "measured = enumeration",
            report.measured == BigUint::from(words.len()),
            label,
        );
        c.ensure(
            "measured = nonzero-block product",
            report.measured == nonzero,
            label,
        );
        c.ensure("nonzero product", report.nonzero_product == nonzero, label);
        c.ensure("full product reported", report.paper_product == full, label);
        c.ensure(
            "verdict",
            (report.status == Status::Pass) == zero_blocks.is_empty(),
            label,
        );
        let mut listed = report.populated_zero_blocks.clone();
        listed.sort();
        let mut expect = zero_blocks.clone();
        expect.sort();
        c.ensure("zero blocks listed", listed == expect, label);
        for w in &words {
            c.ensure(
                "words in span",
                code.digit_span().contains(&res(p41zq(), w))?,
                label,
            );
        }
        if !zero_blocks.is_empty() {
            with_zero += 1;
        }
    }
    c.note(format!("{with_zero} of 50 specs populate a zero block; their full product is reported as a discrepancy"));
    Ok(())
}

fn p41zq() -> Zq {
    params(4, 1).zq()
}

// ------------------------------------------------------------ criterion 7

fn inner_oracle(p: RingParams, x: &[TowerElement], y: &[TowerElement]) -> bool {
    let mut acc = vec![0u64; p.tower_rank()];
    for (a, b) in x.iter().zip(y) {
        for (o, v) in acc
            .iter_mut()
            .zip(tower_mul(p, &vals(a.digits()), &vals(b.digits())))
        {
            *o = (*o + v) % p.zq().modulus();
        }
    }
    acc.iter().all(|&v| v == 0)
}

fn duality_suite(c: &mut Check) -> Res<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let (mut exhaustive, mut pairs) = (0, 0u64);
    for (k, case) in random_specs().iter().enumerate() {
        let code = RCode::build(&case.spec)?;
        let dual = code.dual_code()?;
        let p = code.params();
        let label = || format!("spec {k}: {:?}", case.populated);
        let nonzero_blocks = code.blocks().iter().filter(|b| !b.is_zero_block()).count();
        let product = code.cardinality() * dual.cardinality();
        c.ensure(
            "size product",
            product == BigUint::from(4u8).pow((nonzero_blocks * code.n()) as u32),
            label,
        );
        let (xs, ys) = if product <= BigUint::from(1u32 << 16) {
            exhaustive += 1;
            (
                dual.digit_span().enumerate(1 << 16).expect("small"),
                code.digit_span().enumerate(1 << 16).expect("small"),
            )
        } else {
            // spanning rows decide it by bilinearity; random pairs on top
            let pick = |span: &ringcodes::linalg::RowSpan, rng: &mut ChaCha8Rng| {
                let coords: Vec<u64> = span
                    .radices()
                    .iter()
                    .map(|&r| rng.gen_range(0..r))
                    .collect();
                span.combine(&coords)
            };
            let mut xs = dual.digit_span().rows().to_vec();
            let mut ys = code.digit_span().rows().to_vec();
            for _ in 0..8 {
                xs.push(pick(dual.digit_span(), &mut rng));
                ys.push(pick(code.digit_span(), &mut rng));
            }
            (xs, ys)
        };
        for x in &xs {
            let xw = dual.word_from_digits(x)?;
            for y in &ys {
                let yw = code.word_from_digits(y)?;
                c.ensure("orthogonal", inner_oracle(p, &xw, &yw), label);
                pairs += 1;
            }
        }
        c.ensure(
            "library audit",
            duality_audit(&code, 64, SEED)?.all_pass(),
            label,
        );
    }
    c.note(format!(
        "{exhaustive} of 50 specs small enough to enumerate (|C|·|C⊥| = 4^(10n) here); {pairs} pairs checked"
    ));
    Ok(())
}

// ------------------------------------------------------------ criterion 8

fn gray_oracle(b: &Bundle) -> Vec<u64> {
    let p = b.params();
    let (n, subsets) = (b.n(), p.subsets());
    let mut out = vec![0u64; 3 * subsets * n];
    for l in 1..=3u8 {
        for t in 0..subsets {
            for i in 0..n {
                let v: u64 = (0..subsets)
                    .filter(|&s| s & !t == 0)
                    .map(|s| b.get(l, s)[i].value())
                    .sum();
                out[(((l as usize - 1) * subsets) + t) * n + i] = v % p.zq().modulus();
            }
        }
    }
    out
}

fn random_bundle(p: RingParams, n: usize, rng: &mut ChaCha8Rng) -> Res<Bundle> {
    let mut b = Bundle::zero(p, n);
    for l in 1..=3u8 {
        for t in 0..p.subsets() {
            b.set(l, t, (0..n).map(|_| p.zq().elem(rng.gen())).collect())?;
        }
    }
    Ok(b)
}

fn gray_suite(c: &mut Check) -> Res<()> {
    let p = params(4, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut seen: HashMap<Vec<u64>, Vec<Vec<Residue>>> = HashMap::new();
    let mut prev: Option<Bundle> = None;
    for k in 0..1000 {
        let n = 1 + k % 2;
        let b = random_bundle(p, n, &mut rng)?;
        let g = b.gray_image();
        let coords = vals(&g.coords);
        c.ensure("Φ oracle", coords == gray_oracle(&b), || {
            format!("bundle {k}")
        });
        c.ensure("inverse", phi_inverse(&g)? == b.triples(), || {
            format!("bundle {k}")
        });
        if let Some(other) = seen.insert(coords, b.blocks().to_vec()) {
            c.ensure("injective", other == b.blocks(), || format!("bundle {k}"));
        }
        if let Some(a) = prev.take().filter(|a| a.n() == n) {
            let lhs = a.add(&b).gray_image();
            let rhs = a.gray_image().add(&g)?;
            c.ensure("additive", lhs.coords == rhs.coords, || {
                format!("bundles {} and {k}", k - 1)
            });
        }
        prev = Some(b);
    }

    let (mut spans, mut enumerated) = (0, 0);
    for (k, case) in random_specs().iter().enumerate() {
        let code = RCode::build(&case.spec)?;
        let label = || format!("spec {k}: {:?}", case.populated);
        let images: HashSet<Vec<u64>> = brute_code(&code, case)
            .iter()
            .map(|w| {
                Ok(vals(
                    &code
                        .gray_of_word(&code.word_from_digits(&res(p.zq(), w))?)?
                        .coords,
                ))
            })
            .collect::<Res<_>>()?;
        c.ensure(
            "|Φ(C)| = |C|",
            BigUint::from(images.len()) == code.cardinality(),
            label,
        );
        c.ensure(
            "library image size",
            verify_gray_generator(&code).all_pass(),
            label,
        );
        enumerated += 1;
        if case.populated.len() <= 2 {
            let g = code.gray_generator_matrix();
            let from_rows = brute_span(4, g.cols(), &g.to_u64_rows());
            let from_components: HashSet<Vec<u64>> = all_vectors(4, case.populated.len())
                .map(|cs| {
                    let mut b = Bundle::zero(p, code.n());
                    for (c, (l, t, row)) in cs.iter().zip(&case.populated) {
                        b.set(*l, *t, row.iter().map(|x| p.zq().elem(c * x)).collect())
                            .expect("n entries");
                    }
                    vals(&b.gray_image().coords)
                })
                .collect();
            c.ensure("Φ(G) span", from_rows == from_components, label);
            spans += 1;
        }
    }
    c.note(format!(
        "1000 random bundles; |Φ(C)| by enumeration on {enumerated} specs; Φ(G) span on the {spans} specs with ≤ 2 populated blocks"
    ));
    Ok(())
}

// ------------------------------------------------------------ criterion 9

fn lee(x: u64, q: u64) -> u64 {
    x.min(q - x)
}

fn families_suite(c: &mut Check) -> Res<()> {
    let z4 = FamilyRing::residues(1)?;
    for k in 1..=2usize {
        let g = LazyGenerator::simplex_alpha(z4, k)?;
        let len = 4u64.pow(k as u32);
        c.ensure("α length", *g.column_count() == BigUint::from(len), || {
            format!("k={k}")
        });
        let cols: Vec<Vec<u64>> = g
            .materialize(1 << 20)
            .expect("small")
            .iter()
            .map(|col| col.iter().map(|e| e[0].value()).collect())
            .collect();
        let distinct: HashSet<&Vec<u64>> = cols.iter().collect();
        c.ensure("α columns are Z_4^k", distinct.len() as u64 == len, || {
            format!("k={k}")
        });
        for msg in all_vectors(4, k).skip(1) {
            let weight: u64 = cols
                .iter()
                .map(|col| lee(msg.iter().zip(col).map(|(a, b)| a * b).sum::<u64>() % 4, 4))
                .sum();
            c.ensure("constant Lee weight", weight == len, || {
                format!("k={k}, message {msg:?}: {weight}")
            });
        }
        let stats = weight_stats(&g, &StatsOptions::default());
        c.ensure(
            "library stats",
            stats.exhaustive && stats.constant_lee_weight == Some(len),
            || format!("k={k}: {stats:?}"),
        );
    }

    for ring in [z4, FamilyRing::subset(1, 1)?] {
        let size = ring.cardinality();
        for k in 2..=3usize {
            let full: HashSet<Vec<Vec<Residue>>> = LazyGenerator::simplex_alpha(ring, k)?
                .materialize(1 << 16)
                .expect("small")
                .into_iter()
                .collect();
            for u in 1..k {
                let g = LazyGenerator::macdonald(ring, k, u, FamilyType::Alpha)?;
                let label = || format!("{} k={k} u={u}", ring.label());
                let expect = size.pow(k as u32) - size.pow(u as u32);
                c.ensure("MacDonald α length", *g.column_count() == expect, label);
                let cols = g.materialize(1 << 16).expect("small");
                let kept: HashSet<Vec<Vec<Residue>>> = cols.iter().cloned().collect();
                let cut: HashSet<Vec<Vec<Residue>>> = g
                    .punctured_block(1 << 16)
                    .expect("small")
                    .into_iter()
                    .collect();
                c.ensure("distinct", kept.len() == cols.len(), label);
                c.ensure(
                    "partition",
                    kept.is_disjoint(&cut) && kept.union(&cut).count() == full.len(),
                    label,
                );
            }
        }
    }

    for k in 1..=3usize {
        let p = params(4, 1);
        let g = LazyGenerator::simplex_alpha(FamilyRing::tower(p), k)?;
        let stated =
            BigUint::from(4u8).pow((p.m() * p.s() as usize * (1 << (p.m() - 1)) * k) as u32);
        let vars = BTreeMap::from([("m", 4i64), ("s", 1), ("k", k as i64)]);
        let evaluated = formula::evaluate("4^(m*s*2^(m-1)*k)", &vars)?;
        c.ensure("ring α length", *g.column_count() == stated, || {
            format!("k={k}")
        });
        c.ensure(
            "closed form",
            evaluated == BigRational::from_integer(stated.clone().into()),
            || format!("k={k}"),
        );
    }
    c.note("Z_4 α k ≤ 2 exhaustive; MacDonald α over Z_4 and A_1 for k ≤ 3; R^{1,4} α up to 4^96");
    Ok(())
}

// ----------------------------------------------------------- criterion 10

fn rational(s: &str) -> Option<BigRational> {
    s.parse().ok()
}

fn length_suite(c: &mut Check) -> Res<()> {
    let p = params(4, 1);
    let ring = BigUint::from(2u8).pow(64);
    let mut tallies = Vec::new();
    for (k, u) in [
        (1usize, None),
        (2, Some(1usize)),
        (3, Some(1)),
        (3, Some(2)),
    ] {
        let a = family_length_audit(p, k, u)?;
        let b = family_length_audit(p, k, u)?;
        let tag = format!("(4,1,{k},{})", u.map_or("·".to_string(), |u| u.to_string()));
        c.ensure(
            "deterministic",
            serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(),
            || tag.clone(),
        );
        let expected = if u.is_some() { 16 } else { 8 };
        c.ensure("entry count", a.entries.len() == expected, || {
            format!("{tag}: {}", a.entries.len())
        });

        let mut vars = BTreeMap::from([("m", 4i64), ("s", 1), ("k", k as i64)]);
        if let Some(u) = u {
            vars.insert("u", u as i64);
        }
        for e in &a.entries {
            let label = || format!("{tag} {}", e.id);
            if let Some((_, f)) = LENGTH_FORMULAS.iter().find(|(id, _)| *id == e.id) {
                c.ensure("verbatim formula", e.formula == *f, label);
            }
            let re = formula::evaluate(&e.formula, &vars).map(|v| formula::render(&v));
            match &re {
                Ok(v) => c.ensure("re-evaluation", *v == e.paper_value, label),
                Err(_) => c.ensure(
                    "re-evaluation",
                    e.paper_value.starts_with("not evaluated"),
                    label,
                ),
            }
            let verdict = match (&re, rational(&e.paper_value), rational(&e.measured_value)) {
                (Err(_), _, _) => Status::Fail,
                (Ok(_), Some(x), Some(y)) if x == y => Status::Pass,
                (Ok(_), Some(_), Some(_)) => Status::MeasuredDiscrepancy,
                _ => Status::Fail,
            };
            c.ensure("verdict", verdict == e.verdict, label);
        }

        let measured = |id: &str| a.get(id).and_then(|e| rational(&e.measured_value));
        let int = |x: BigUint| Some(BigRational::from_integer(x.into()));
        let big_k = (p.tower_rank() * k) as u32;
        c.ensure(
            "α length = |R|^k",
            measured("alpha.length") == int(ring.pow(k as u32)),
            || tag.clone(),
        );
        c.ensure(
            "α component = 4^K",
            measured("alpha.gray.component_length") == int(BigUint::from(4u8).pow(big_k)),
            || tag.clone(),
        );
        let mut families = vec!["alpha", "beta"];
        if let Some(u) = u {
            families.extend(["macdonald_alpha", "macdonald_beta"]);
            c.ensure(
                "MacDonald α length",
                measured("macdonald_alpha.length") == int(ring.pow(k as u32) - ring.pow(u as u32)),
                || tag.clone(),
            );
        }
        for f in families {
            let (len, count, comp, total) = (
                measured(&format!("{f}.length")),
                measured(&format!("{f}.gray.count")),
                measured(&format!("{f}.gray.component_length")),
                measured(&format!("{f}.gray.total_length")),
            );
            let gray = len.map(|l| l * BigRational::from_integer((3 * p.subsets()).into()));
            c.ensure(
                "Gray length = 3·2^(m-1)·L",
                gray.is_some() && gray == total,
                || format!("{tag} {f}"),
            );
            c.ensure(
                "count × component = Gray length",
                matches!((&count, &comp, &total), (Some(x), Some(y), Some(t)) if &(x * y) == t),
                || format!("{tag} {f}"),
            );
        }
        let pass = a
            .entries
            .iter()
            .filter(|e| e.verdict == Status::Pass)
            .count();
        tallies.push(format!("{tag} {pass}/{} agree", a.entries.len()));
    }
    c.note(format!(
        "{}; the rest are recorded discrepancies",
        tallies.join(", ")
    ));
    Ok(())
}

// ----------------------------------------------------------- criterion 11

fn shift_closed(
    c: &mut Check,
    part: &str,
    span: &ringcodes::linalg::RowSpan,
    rank: usize,
    d: usize,
    label: &str,
) -> Res<()> {
    for row in span.rows() {
        c.ensure(
            part,
            span.contains(&rotate_positions(row, rank, d))?,
            || label.to_string(),
        );
    }
    Ok(())
}

fn qc_suite(c: &mut Check) -> Res<()> {
    let p = params(4, 1);
    let kappa = KappaSystem::new(p)?;
    let rank = p.tower_rank();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let n = 7;
    let mut pool = vec![TauChoice::Zero, TauChoice::One, TauChoice::Averaging];
    for t in 0..p.subsets() {
        pool.push(TauChoice::Eta(t));
        pool.push(TauChoice::EtaAveraging(t));
    }
    let mut triples = vec![[TauChoice::Averaging, TauChoice::One, TauChoice::Eta(2)]];
    for _ in 0..11 {
        triples.push(std::array::from_fn(|_| {
            pool[rng.gen_range(0..pool.len())].clone()
        }));
    }
    let mut small = 0;
    for es in &triples {
        let label = format!("τ from {es:?}");
        let polys: Vec<QuotientPoly> = es.iter().map(|e| e.to_poly(p, n)).collect::<Res<_>>()?;
        let tau = tau_build(&kappa, &polys[0], &polys[1], &polys[2])?;
        c.ensure("τ idempotent", is_idempotent_oracle(&tau), || {
            label.clone()
        });
        let code = qc_from_generators(std::slice::from_ref(&tau), 1)?;
        shift_closed(c, "cyclic", code.span(), rank, 1, &label)?;
        for j in 0..n {
            c.ensure("x^j τ in code", code.contains(&tau.shift(j))?, || {
                label.clone()
            });
        }
        if let Some(words) = code.span().enumerate(1 << 12) {
            small += 1;
            for w in &words {
                c.ensure(
                    "cyclic",
                    code.span().contains(&rotate_positions(w, rank, 1))?,
                    || label.clone(),
                );
            }
        }
        c.ensure("library", code.invariance(1, 1 << 12)?.all_pass(), || {
            label.clone()
        });
    }

    for trial in 0..20 {
        let n = [2usize, 3, 4, 6][rng.gen_range(0..4)];
        let divisors: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
        let d = divisors[rng.gen_range(0..divisors.len())];
        let gens: Vec<QuotientPoly> = (0..rng.gen_range(1..=2))
            .map(|_| {
                let coeffs = (0..n)
                    .map(|_| {
                        let digits: Vec<Residue> = (0..rank)
                            .map(|_| {
                                if rng.gen_bool(0.2) {
                                    p.zq().elem(rng.gen())
                                } else {
                                    Residue::ZERO
                                }
                            })
                            .collect();
                        TowerElement::from_digits(p, &digits)
                    })
                    .collect::<Res<Vec<_>>>()?;
                QuotientPoly::new(coeffs)
            })
            .collect::<Res<_>>()?;
        let code = qc_from_generators(&gens, d)?;
        let label = format!("instance {trial}: n={n}, d={d}, {} generators", gens.len());
        shift_closed(c, "quasi-cyclic", code.span(), rank, d, &label)?;
        for g in &gens {
            c.ensure("generators in code", code.contains(g)?, || label.clone());
        }
        c.ensure("library", code.invariance(d, 1 << 10)?.all_pass(), || {
            label.clone()
        });
    }
    c.note(format!(
        "{} τ codes at n=7 ({small} also enumerated word by word); 20 random quasi-cyclic instances",
        triples.len()
    ));
    Ok(())
}

// ------------------------------------------------------------------ main

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            title: "κ idempotents: κ_i² = κ_i, κ_iκ_j = 0, Σκ_i = 1 at (4,1), (4,2), (6,1)",
            budget: Some(Duration::from_secs(1)),
            run: pierce,
        },
        Criterion {
            id: 2,
            title: "η idempotents and zeta/Möbius at m ∈ {4,6}, s ∈ {1,2}",
            budget: Some(Duration::from_secs(5)),
            run: eta_suite,
        },
        Criterion {
            id: 3,
            title: "block idempotents κ_lη_S and the zero-block list at (4,1), (4,2)",
            budget: None,
            run: block_suite,
        },
        Criterion {
            id: 4,
            title: "τ = Σκ_ie_i is idempotent iff every e_i is (m=4, s=1, n ∈ {1,3,7})",
            budget: Some(Duration::from_secs(10)),
            run: lemma_suite,
        },
        Criterion {
            id: 5,
            title: "Howell span size, membership and dual against enumeration",
            budget: None,
            run: howell_oracle,
        },
        Criterion {
            id: 6,
            title: "code cardinality on 50 random specs",
            budget: None,
            run: cardinality_suite,
        },
        Criterion {
            id: 7,
            title: "orthogonality of the blockwise dual on the same specs",
            budget: None,
            run: duality_suite,
        },
        Criterion {
            id: 8,
            title: "Gray map: additive, injective, size preserving, generator pattern",
            budget: None,
            run: gray_suite,
        },
        Criterion {
            id: 9,
            title: "simplex α and MacDonald α lengths and Lee weights",
            budget: None,
            run: families_suite,
        },
        Criterion {
            id: 10,
            title: "length formula audit: deterministic and internally consistent",
            budget: None,
            run: length_suite,
        },
        Criterion {
            id: 11,
            title: "shift invariance of τ codes and quasi-cyclic spans",
            budget: None,
            run: qc_suite,
        },
    ];

    let start = Instant::now();
    let (mut pass, mut fail, mut unexpected) = (0, 0, Vec::new());
    for cr in &criteria {
        let t0 = Instant::now();
        let mut check = Check::default();
        if let Err(e) = (cr.run)(&mut check) {
            check.ensure("error", false, || e.to_string());
        }
        let elapsed = t0.elapsed();
        if let Some(b) = cr.budget {
            check.ensure("time", elapsed <= b, || {
                format!(
                    "{:.2} s over the {:.0} s budget",
                    elapsed.as_secs_f64(),
                    b.as_secs_f64()
                )
            });
        }
        let ok = check.failures.is_empty();
        println!(
            "{} {:>2}  {}  ({:.2} s)",
            if ok { "PASS" } else { "FAIL" },
            cr.id,
            cr.title,
            elapsed.as_secs_f64()
        );
        for note in &check.notes {
            println!("         {note}");
        }
        for (part, (count, detail)) in &check.failures {
            let known = KNOWN_RED.contains(&(cr.id, part.as_str()));
            println!(
                "         {}{part}: {detail}{}",
                if known { "[known] " } else { "" },
                if *count > 1 {
                    format!(" (+{} more)", count - 1)
                } else {
                    String::new()
                }
            );
            if !known {
                unexpected.push(format!("{} {part}", cr.id));
            }
        }
        for (id, part) in KNOWN_RED.iter().filter(|(id, _)| *id == cr.id) {
            if !check.failures.contains_key(*part) {
                unexpected.push(format!("{id} {part} was expected to fail but passed"));
            }
        }
        if ok {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    let total = start.elapsed();
    if total > TOTAL_BUDGET {
        unexpected.push(format!(
            "total {:.1} s exceeds {} s",
            total.as_secs_f64(),
            TOTAL_BUDGET.as_secs()
        ));
    }
    println!("{pass} PASS, {fail} FAIL in {:.2} s", total.as_secs_f64());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected: {}", unexpected.join("; "));
        ExitCode::FAILURE
    }
}
