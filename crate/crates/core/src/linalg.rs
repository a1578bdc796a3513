//! Linear algebra over `Z_{2^{2s}}`: Howell normal form, span size,
//! membership and annihilator (dual) generators.
//!
//! Over a ring with zero divisors a plain echelon form does not decide
//! membership. For `(2, 1)` over `Z_4` the element `2·(2, 1) = (0, 2)` has a
//! zero first entry but is not a multiple of any lower row. The Howell form
//! feeds `2^{2s-e}·row` back into the elimination for every pivot `2^e`, so
//! that span elements vanishing on the first `c` columns are spanned by the
//! rows whose pivots lie beyond `c`.
//!
//! Pivots are powers of two and entries above a pivot `2^e` lie in
//! `[0, 2^e)`. With zero rows removed the form is unique per span.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{Residue, Zq};

/// A dense row-major matrix over `Z_{4^s}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZModMatrix {
    zq: Zq,
    rows: usize,
    cols: usize,
    data: Vec<Residue>,
}

impl ZModMatrix {
    pub fn zeros(zq: Zq, rows: usize, cols: usize) -> Self {
        ZModMatrix {
            zq,
            rows,
            cols,
            data: vec![Residue::ZERO; rows * cols],
        }
    }

    pub fn identity(zq: Zq, n: usize) -> Self {
        let mut m = Self::zeros(zq, n, n);
        for i in 0..n {
            m.data[i * n + i] = Residue::ONE;
        }
        m
    }

    pub fn from_rows(zq: Zq, cols: usize, rows: Vec<Vec<Residue>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n_rows = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for r in &row {
                zq.check(r.value())?;
            }
            data.extend(row);
        }
        Ok(ZModMatrix {
            zq,
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Convenience constructor from raw integers, reduced modulo `4^s`.
    pub fn from_u64_rows(zq: Zq, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        Self::from_rows(
            zq,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| zq.elem(v)).collect())
                .collect(),
        )
    }

    #[inline]
    pub fn zq(&self) -> Zq {
        self.zq
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Residue {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Residue] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Residue]> {
        // chunks_exact panics on a zero chunk size
        let cols = self.cols.max(1);
        self.data
            .chunks_exact(cols)
            .take(if self.cols == 0 { 0 } else { self.rows })
    }

    pub fn to_u64_rows(&self) -> Vec<Vec<u64>> {
        self.row_iter()
            .map(|r| r.iter().map(|c| c.value()).collect())
            .collect()
    }

    pub fn push_row(&mut self, row: &[Residue]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: row.len(),
            });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &ZModMatrix) -> Result<ZModMatrix> {
        if self.zq != other.zq {
            return Err(Error::ContextMismatch(
                "matrices over different moduli".into(),
            ));
        }
        if self.cols != other.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(ZModMatrix {
            zq: self.zq,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn transpose(&self) -> ZModMatrix {
        let mut t = ZModMatrix::zeros(self.zq, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn howell_form(&self) -> ZModMatrix {
        self.row_span().to_matrix()
    }

    pub fn row_span(&self) -> RowSpan {
        RowSpan::new(self)
    }

    /// Number of distinct `Z_{4^s}`-combinations of the rows.
    pub fn span_cardinality(&self) -> BigUint {
        self.row_span().cardinality()
    }

    pub fn is_member(&self, v: &[Residue]) -> Result<bool> {
        self.row_span().contains(v)
    }

    /// Generators of `{x : <x, row> = 0 for every row}` inside `Z_{4^s}^n`.
    pub fn dual_generators(&self, n: usize) -> Result<ZModMatrix> {
        if self.cols != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: self.cols,
            });
        }
        Ok(self.row_span().annihilator())
    }
}

/// Pivot of a Howell row: column and the exponent `e` of the entry `2^e`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pivot {
    pub col: usize,
    pub exp: u32,
}

/// The row span of a matrix, held in Howell normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RowSpan {
    zq: Zq,
    cols: usize,
    rows: Vec<Vec<Residue>>,
    pivots: Vec<(usize, u32)>,
}

impl RowSpan {
    pub fn new(m: &ZModMatrix) -> Self {
        Self::from_rows(m.zq, m.cols, m.row_iter().map(|r| r.to_vec()).collect())
    }

    pub fn zero(zq: Zq, cols: usize) -> Self {
        RowSpan {
            zq,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Howell reduction of the given rows. Each row must have `cols` entries.
    pub fn from_rows(zq: Zq, cols: usize, input: Vec<Vec<Residue>>) -> Self {
        let bits = zq.bits();
        let mut work: Vec<Vec<Residue>> = input
            .into_iter()
            .inspect(|r| assert_eq!(r.len(), cols, "row length mismatch"))
            .filter(|r| r.iter().any(|c| !c.is_zero()))
            .collect();
        let mut pivots = Vec::new();
        let mut top = 0;
        for c in 0..cols {
            if top == work.len() {
                break;
            }
            let best = (top..work.len())
                .filter(|&i| !work[i][c].is_zero())
                .min_by_key(|&i| work[i][c].value().trailing_zeros());
            let Some(best) = best else { continue };
            work.swap(top, best);

            let lead = work[top][c].value();
            let exp = lead.trailing_zeros();
            let unit_inv = zq
                .inv_unit(Residue(lead >> exp))
                .expect("odd part is a unit");
            for x in work[top][c..].iter_mut() {
                *x = zq.mul(*x, unit_inv);
            }

            let (head, tail) = work.split_at_mut(top + 1);
            let pivot_row = &head[top];
            for row in tail.iter_mut() {
                let v = row[c].value();
                if v == 0 {
                    continue;
                }
                let q = zq.neg(Residue(v >> exp));
                for (x, &p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x = zq.mul_add(*x, q, p);
                }
            }

            if exp > 0 {
                let factor = zq.elem(1u64 << (bits - exp));
                let closure: Vec<Residue> = work[top].iter().map(|&x| zq.mul(x, factor)).collect();
                if closure.iter().any(|x| !x.is_zero()) {
                    work.push(closure);
                }
            }
            pivots.push((c, exp));
            top += 1;
            // rows that became zero need no further processing
            let mut kept: Vec<Vec<Residue>> = work.split_off(top);
            kept.retain(|r| r.iter().any(|x| !x.is_zero()));
            work.append(&mut kept);
        }
        work.truncate(top);

        // reduce entries above each pivot into [0, 2^exp)
        for p in 0..work.len() {
            let (c, exp) = pivots[p];
            let (above, below) = work.split_at_mut(p);
            let pivot_row = &below[0];
            for row in above.iter_mut() {
                let q = row[c].value() >> exp;
                if q == 0 {
                    continue;
                }
                let q = zq.neg(zq.elem(q));
                for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x = zq.mul_add(*x, q, y);
                }
            }
        }
        RowSpan {
            zq,
            cols,
            rows: work,
            pivots,
        }
    }

    #[inline]
    pub fn zq(&self) -> Zq {
        self.zq
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Howell rows, in pivot order.
    pub fn rows(&self) -> &[Vec<Residue>] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<Pivot> {
        self.pivots
            .iter()
            .map(|&(col, exp)| Pivot { col, exp })
            .collect()
    }

    pub fn to_matrix(&self) -> ZModMatrix {
        ZModMatrix::from_rows(self.zq, self.cols, self.rows.clone())
            .expect("rows have cols entries")
    }

    /// `log_2 |span|`, the sum of `2s - e` over the pivots.
    pub fn log2_cardinality(&self) -> u64 {
        let bits = self.zq.bits();
        self.pivots.iter().map(|&(_, e)| u64::from(bits - e)).sum()
    }

    pub fn cardinality(&self) -> BigUint {
        BigUint::from(1u8) << self.log2_cardinality()
    }

    /// Reduces `v` against the Howell rows; returns the remainder and the
    /// coefficients used. `v` is in the span iff the remainder is zero.
    pub fn reduce(&self, v: &[Residue]) -> (Vec<Residue>, Vec<Residue>) {
        assert_eq!(v.len(), self.cols);
        let zq = self.zq;
        let mut rem = v.to_vec();
        let mut coeffs = vec![Residue::ZERO; self.rows.len()];
        for (i, (&(c, exp), row)) in self.pivots.iter().zip(&self.rows).enumerate() {
            let x = rem[c].value();
            if x & ((1u64 << exp) - 1) != 0 {
                return (rem, coeffs);
            }
            let q = zq.elem(x >> exp);
            if q.is_zero() {
                continue;
            }
            coeffs[i] = q;
            let nq = zq.neg(q);
            for (r, &y) in rem[c..].iter_mut().zip(&row[c..]) {
                *r = zq.mul_add(*r, nq, y);
            }
        }
        (rem, coeffs)
    }

    pub fn contains(&self, v: &[Residue]) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let (rem, _) = self.reduce(v);
        Ok(rem.iter().all(|x| x.is_zero()))
    }

    /// Whether every row of `other` lies in this span.
    pub fn contains_span(&self, other: &RowSpan) -> Result<bool> {
        for r in &other.rows {
            if !self.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Radix of each Howell row: the coefficients `0..2^{2s-e}` give every
    /// span element exactly once.
    pub fn radices(&self) -> Vec<u64> {
        let bits = self.zq.bits();
        self.pivots
            .iter()
            .map(|&(_, e)| 1u64 << (bits - e))
            .collect()
    }

    /// The span element with mixed-radix coordinates `coords`.
    pub fn combine(&self, coords: &[u64]) -> Vec<Residue> {
        let zq = self.zq;
        let mut out = vec![Residue::ZERO; self.cols];
        for (row, &k) in self.rows.iter().zip(coords) {
            if k == 0 {
                continue;
            }
            let k = zq.elem(k);
            for (o, &x) in out.iter_mut().zip(row) {
                *o = zq.mul_add(*o, k, x);
            }
        }
        out
    }

    /// The `index`-th element in mixed-radix order (first row fastest).
    pub fn element(&self, mut index: u128) -> Vec<Residue> {
        let coords: Vec<u64> = self
            .radices()
            .iter()
            .map(|&r| {
                let d = (index % u128::from(r)) as u64;
                index /= u128::from(r);
                d
            })
            .collect();
        self.combine(&coords)
    }

    /// Enumerates every element of the span, each exactly once.
    ///
    /// Returns `None` when the span has more than `limit` elements.
    pub fn enumerate(&self, limit: u64) -> Option<Vec<Vec<Residue>>> {
        let log = self.log2_cardinality();
        if log >= 64 || (1u64 << log) > limit {
            return None;
        }
        Some((0..(1u128 << log)).map(|i| self.element(i)).collect())
    }

    /// Generators of the annihilator `{x : <x, row> = 0 for all rows}`.
    ///
    /// Reduces `[Mᵀ | I]` to Howell form; the rows whose `Mᵀ` part vanishes
    /// span exactly the left kernel of `Mᵀ`.
    pub fn annihilator(&self) -> ZModMatrix {
        let n = self.cols;
        let r = self.rows.len();
        let aug: Vec<Vec<Residue>> = (0..n)
            .map(|i| {
                let mut row: Vec<Residue> = self.rows.iter().map(|g| g[i]).collect();
                row.extend((0..n).map(|j| if i == j { Residue::ONE } else { Residue::ZERO }));
                row
            })
            .collect();
        let h = RowSpan::from_rows(self.zq, r + n, aug);
        let kernel: Vec<Vec<Residue>> = h
            .rows
            .iter()
            .filter(|row| row[..r].iter().all(|x| x.is_zero()))
            .map(|row| row[r..].to_vec())
            .collect();
        ZModMatrix::from_rows(self.zq, n, kernel).expect("kernel rows have n entries")
    }
}
