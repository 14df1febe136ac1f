//! Exact rank of sparse integer matrices by fraction-free row reduction.
//!
//! Rows are reduced one at a time against an echelon basis keyed by leading
//! column. After each elimination step the row is divided by its content, which
//! keeps entries small on the combinatorial matrices produced by the oracle.
//! The fast path runs in `i128` with checked arithmetic; on overflow the whole
//! computation is redone over `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

pub type SparseRow = Vec<(u32, i64)>;

trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn is_one(&self) -> bool;
    fn div_exact(&self, other: &Self) -> Self;
    /// `a * x - b * y`
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn mul(a: &Self, x: &Self) -> Option<Self>;
}

impl Scalar for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.unsigned_abs(), other.unsigned_abs());
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a as i128
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn mul(a: &Self, x: &Self) -> Option<Self> {
        a.checked_mul(*x)
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }
    fn div_exact(&self, other: &Self) -> Self {
        self / other
    }
    fn mul_sub(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn mul(a: &Self, x: &Self) -> Option<Self> {
        Some(a * x)
    }
}

struct Overflow;

fn normalize<S: Scalar>(row: &mut [(u32, S)]) -> Result<(), Overflow> {
    let mut g = S::from_i64(0);
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let flip = row.first().map(|(_, v)| v.is_neg()).unwrap_or(false);
    if !g.is_one() && !g.is_zero() {
        for (_, v) in row.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
    if flip {
        for (_, v) in row.iter_mut() {
            *v = v.neg().ok_or(Overflow)?;
        }
    }
    Ok(())
}

/// `pivot_lead * row - row_lead * pivot`, scaled down by `gcd(pivot_lead, row_lead)`.
fn eliminate<S: Scalar>(row: &[(u32, S)], pivot: &[(u32, S)]) -> Result<Vec<(u32, S)>, Overflow> {
    let a = &pivot[0].1;
    let b = &row[0].1;
    let g = a.gcd(b);
    let a = a.div_exact(&g);
    let b = b.div_exact(&g);
    let zero = S::from_i64(0);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(u32::MAX);
        let cj = pivot.get(j).map(|e| e.0).unwrap_or(u32::MAX);
        let (col, v) = if ci < cj {
            let v = S::mul(&a, &row[i].1).ok_or(Overflow)?;
            i += 1;
            (ci, v)
        } else if cj < ci {
            let v = S::mul_sub(&a, &zero, &b, &pivot[j].1).ok_or(Overflow)?;
            j += 1;
            (cj, v)
        } else {
            let v = S::mul_sub(&a, &row[i].1, &b, &pivot[j].1).ok_or(Overflow)?;
            i += 1;
            j += 1;
            (ci, v)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    normalize(&mut out)?;
    Ok(out)
}

fn rank_generic<S: Scalar>(rows: &[SparseRow], ncols: usize) -> Result<usize, Overflow> {
    let mut pivots: Vec<Option<Vec<(u32, S)>>> = vec![None; ncols];
    let mut rank = 0;
    for r in rows {
        let mut row: Vec<(u32, S)> = r
            .iter()
            .filter(|(_, v)| *v != 0)
            .map(|&(c, v)| (c, S::from_i64(v)))
            .collect();
        normalize(&mut row)?;
        while let Some(&(lead, _)) = row.first() {
            match &pivots[lead as usize] {
                Some(p) => row = eliminate(&row, p)?,
                None => {
                    pivots[lead as usize] = Some(row);
                    rank += 1;
                    break;
                }
            }
        }
        if rank == ncols {
            break;
        }
    }
    Ok(rank)
}

/// Exact rank over the rationals of the matrix whose rows are `rows`.
/// Each row must be sorted by column with columns `< ncols`.
pub fn exact_rank(rows: &[SparseRow], ncols: usize) -> usize {
    match rank_generic::<i128>(rows, ncols) {
        Ok(r) => r,
        Err(Overflow) => {
            log::debug!("i128 overflow in rank computation, retrying with BigInt");
            rank_generic::<BigInt>(rows, ncols).unwrap_or_else(|_| unreachable!())
        }
    }
}

/// Same computation forced through big integers; used to audit the fast path.
pub fn exact_rank_bigint(rows: &[SparseRow], ncols: usize) -> usize {
    rank_generic::<BigInt>(rows, ncols).unwrap_or_else(|_| unreachable!())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dense_to_rows(m: &[Vec<i64>]) -> Vec<SparseRow> {
        m.iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(c, v)| (c as u32, *v))
                    .collect()
            })
            .collect()
    }

    /// Rank via Gaussian elimination over exact rationals.
    fn rational_rank(m: &[Vec<i64>]) -> usize {
        use num_rational::BigRational;
        let mut a: Vec<Vec<BigRational>> = m
            .iter()
            .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
            .collect();
        let rows = a.len();
        let cols = if rows == 0 { 0 } else { a[0].len() };
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(rank, p);
            for i in 0..rows {
                if i != rank && !a[i][c].is_zero() {
                    let f = &a[i][c] / &a[rank][c];
                    for k in 0..cols {
                        let s = &f * &a[rank][k];
                        a[i][k] -= s;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_ranks() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert_eq!(exact_rank(&dense_to_rows(&m), 3), 2);
        assert_eq!(exact_rank(&[], 5), 0);
        let id: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| (i == j) as i64).collect()).collect();
        assert_eq!(exact_rank(&dense_to_rows(&id), 4), 4);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        // Hilbert-like matrix with huge entries forces the BigInt path.
        let big = 1i64 << 40;
        let m: Vec<Vec<i64>> = (0..6)
            .map(|i| (0..6).map(|j| if i == j { big - i as i64 } else { big / (i + j + 1) as i64 }).collect())
            .collect();
        let rows = dense_to_rows(&m);
        assert_eq!(exact_rank(&rows, 6), rational_rank(&m));
        assert_eq!(exact_rank_bigint(&rows, 6), rational_rank(&m));
    }

    proptest! {
        #[test]
        fn matches_rational_elimination(
            m in prop::collection::vec(prop::collection::vec(-3i64..=3, 6), 0..8)
        ) {
            let rows = dense_to_rows(&m);
            prop_assert_eq!(exact_rank(&rows, 6), rational_rank(&m));
        }

        #[test]
        fn rank_is_independent_of_row_order(
            m in prop::collection::vec(prop::collection::vec(-2i64..=2, 5), 1..8),
            seed in 0usize..100
        ) {
            let rows = dense_to_rows(&m);
            let mut shuffled = rows.clone();
            let n = shuffled.len();
            shuffled.rotate_left(seed % n);
            shuffled.reverse();
            prop_assert_eq!(exact_rank(&rows, 5), exact_rank(&shuffled, 5));
        }
    }
}
