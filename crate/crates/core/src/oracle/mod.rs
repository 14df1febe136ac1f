//! Bigraded Hilbert function of `J(d) = ∩_{i<j} (x_i - x_j, y_i - y_j)^{d_i}`
//! in `Q[x1..x4, y1..y4]`, computed one bidegree at a time by exact linear
//! algebra.
//!
//! Membership of a polynomial in `(u, v)^e`, with `u = x_i - x_j` and
//! `v = y_i - y_j`, is tested after the change of coordinates `x_i = u + x_j`,
//! `y_i = v + y_j`: the polynomial lies in the power iff every coefficient of
//! `u^s v^s' * m` with `s + s' < e` vanishes. Each such coefficient is one row
//! of a sparse integer constraint matrix over the monomials of the bidegree.

pub mod rank;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::{CacheKey, Store};
use crate::engine::CoxeterDegrees;
use crate::error::{OracleError, ParseError};
use rank::{exact_rank, SparseRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    /// x-degree
    pub p: u32,
    /// y-degree
    pub r: u32,
}

impl Bidegree {
    pub fn new(p: u32, r: u32) -> Self {
        Bidegree { p, r }
    }

    /// Dimension of the space of monomials of this bidegree in four x's and four y's.
    pub fn ambient_dim(self) -> u64 {
        monomial_count(4, self.p) * monomial_count(4, self.r)
    }
}

/// Exponent attached to each of the six strand pairs; pair `(i, j)` gets `d_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PairExponents([[u32; 4]; 4]);

impl PairExponents {
    pub fn from_degrees(d: &CoxeterDegrees) -> Self {
        let dv = d.as_array();
        let mut e = [[0; 4]; 4];
        for i in 0..4 {
            for j in (i + 1)..4 {
                e[i][j] = dv[i];
            }
        }
        PairExponents(e)
    }

    /// Exponent for the 0-based pair `(i, j)`, `i < j`.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.0[i][j]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..4).flat_map(move |i| ((i + 1)..4).map(move |j| (i, j, self.0[i][j])))
    }

    fn key(&self) -> String {
        self.pairs().map(|(_, _, e)| e.to_string()).collect::<Vec<_>>().join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowTag {
    /// 0-based strand pair
    pub pair: (usize, usize),
    /// order of the coefficient in `u` and `v`
    pub du: u32,
    pub dv: u32,
}

/// Sparse integer matrix of linear conditions on the monomials of one bidegree.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    pub ncols: usize,
    pub rows: Vec<SparseRow>,
    pub tags: Vec<RowTag>,
}

impl ConstraintSystem {
    pub fn stack(mut self, other: ConstraintSystem) -> ConstraintSystem {
        debug_assert_eq!(self.ncols, other.ncols);
        self.rows.extend(other.rows);
        self.tags.extend(other.tags);
        self
    }

    pub fn rank(&self) -> usize {
        exact_rank(&self.rows, self.ncols)
    }

    /// Dimension of the common solution space.
    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// True when `v` (dense, indexed by column) satisfies every row.
    pub fn satisfied_by(&self, v: &[i64]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().map(|&(c, x)| x as i128 * v[c as usize] as i128).sum::<i128>() == 0)
    }
}

pub fn monomial_count(nvars: u32, deg: u32) -> u64 {
    // binom(deg + nvars - 1, nvars - 1)
    let mut acc: u64 = 1;
    for i in 1..nvars as u64 {
        acc = acc * (deg as u64 + i) / i;
    }
    acc
}

/// Exponent vectors of total degree `deg` in `nvars` variables, in
/// lexicographically decreasing order (`x1^deg` first).
pub fn exponent_vectors(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    fn go(nvars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == nvars {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=deg).rev() {
            prefix.push(e);
            go(nvars, deg - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if deg == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// The monomial basis of one bidegree: pairs of x- and y-exponent vectors.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub nvars: usize,
    pub columns: Vec<(Vec<u32>, Vec<u32>)>,
}

impl MonomialBasis {
    pub fn full(bd: Bidegree) -> Self {
        Self::with_vars(4, bd)
    }

    fn with_vars(nvars: usize, bd: Bidegree) -> Self {
        let xs = exponent_vectors(nvars, bd.p);
        let ys = exponent_vectors(nvars, bd.r);
        let mut columns = Vec::with_capacity(xs.len() * ys.len());
        for x in &xs {
            for y in &ys {
                columns.push((x.clone(), y.clone()));
            }
        }
        MonomialBasis { nvars, columns }
    }

    pub fn index_of(&self, x: &[u32], y: &[u32]) -> Option<usize> {
        self.columns.iter().position(|(a, b)| a == x && b == y)
    }
}

fn binom_i64(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as i64;
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n as i64 - i) / (i + 1);
    }
    acc
}

/// Rows for membership in `(x_i - x_j, y_i - y_j)^e` over the given basis.
fn pair_rows(basis: &MonomialBasis, i: usize, j: usize, e: u32) -> ConstraintSystem {
    let mut index: HashMap<(u32, u32, Vec<u32>, Vec<u32>), usize> = HashMap::new();
    let mut rows: Vec<SparseRow> = Vec::new();
    let mut tags = Vec::new();
    for (col, (x, y)) in basis.columns.iter().enumerate() {
        for s in 0..=x[i].min(e.saturating_sub(1)) {
            for s2 in 0..=y[i] {
                if s + s2 >= e {
                    break;
                }
                let mut xr = x.clone();
                xr[j] += x[i] - s;
                xr[i] = 0;
                let mut yr = y.clone();
                yr[j] += y[i] - s2;
                yr[i] = 0;
                let coef = binom_i64(x[i], s) * binom_i64(y[i], s2);
                let key = (s, s2, xr, yr);
                let r = *index.entry(key).or_insert_with(|| {
                    rows.push(Vec::new());
                    tags.push(RowTag {
                        pair: (i, j),
                        du: s,
                        dv: s2,
                    });
                    rows.len() - 1
                });
                rows[r].push((col as u32, coef));
            }
        }
    }
    ConstraintSystem {
        ncols: basis.columns.len(),
        rows,
        tags,
    }
}

/// Constraint rows, in the full eight-variable ring, for one strand pair.
/// `i < j` are 1-based strand indices.
pub fn pair_constraints(i: usize, j: usize, e: u32, bd: Bidegree) -> ConstraintSystem {
    assert!(1 <= i && i < j && j <= 4, "pair ({i}, {j}) out of range");
    pair_rows(&MonomialBasis::full(bd), i - 1, j - 1, e)
}

/// The stacked system for all six pairs.
pub fn stacked_constraints(d: &CoxeterDegrees, bd: Bidegree) -> ConstraintSystem {
    let basis = MonomialBasis::full(bd);
    let exps = PairExponents::from_degrees(d);
    let mut sys = ConstraintSystem {
        ncols: basis.columns.len(),
        ..Default::default()
    };
    for (i, j, e) in exps.pairs() {
        if e > 0 {
            sys = sys.stack(pair_rows(&basis, i, j, e));
        }
    }
    sys
}

/// `dim J(d)` at one bidegree, from the full eight-variable constraint system.
pub fn dim_j(d: &CoxeterDegrees, bd: Bidegree) -> u64 {
    stacked_constraints(d, bd).nullity() as u64
}

/// Dimension at one bidegree of the ideal `J'` of the translation-reduced ring
/// `Q[w1..w3, z1..z3]`, `w_k = x_k - x_4`, `z_k = y_k - y_4`. Since
/// `J = J' ⊗ Q[x4, y4]`, `dim J(p, r)` is the sum of these over
/// `p' <= p`, `r' <= r`.
///
/// Pairs `(k, 4)` become the monomial ideals `(w_k, z_k)^{d_k}`, so they only
/// remove columns; the three remaining pairs contribute rows.
pub fn dim_j_reduced(exps: &PairExponents, bd: Bidegree) -> u64 {
    let mut basis = MonomialBasis::with_vars(3, bd);
    basis
        .columns
        .retain(|(x, y)| (0..3).all(|k| x[k] + y[k] >= exps.get(k, 3)));
    if basis.columns.is_empty() {
        return 0;
    }
    let mut sys = ConstraintSystem {
        ncols: basis.columns.len(),
        ..Default::default()
    };
    for i in 0..3 {
        for j in (i + 1)..3 {
            let e = exps.get(i, j);
            if e > 0 {
                sys = sys.stack(pair_rows(&basis, i, j, e));
            }
        }
    }
    sys.nullity() as u64
}

/// Bigraded Hilbert function of `J(d)` on all `(p, r)` with `p + r <= max_total`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidegreeTable {
    pub degrees: [u32; 4],
    pub max_total: u32,
    /// Keyed by `(p, r)`.
    pub dims: BTreeMap<(u32, u32), u64>,
}

impl BidegreeTable {
    pub fn get(&self, p: u32, r: u32) -> Option<u64> {
        self.dims.get(&(p, r)).copied()
    }

    /// Entries in output order: by `p + r`, then `p`.
    pub fn ordered(&self) -> Vec<(u32, u32, u64)> {
        let mut v: Vec<_> = self.dims.iter().map(|(&(p, r), &d)| (p, r, d)).collect();
        v.sort_by_key(|&(p, r, _)| (p + r, p));
        v
    }

    /// Data lines only, without the header; identical for any `d4`.
    pub fn body_text(&self) -> String {
        let mut s = String::new();
        for (p, r, d) in self.ordered() {
            let _ = writeln!(s, "{p} {r} {d}");
        }
        s.push_str("end\n");
        s
    }

    pub fn to_text(&self) -> String {
        let [d1, d2, d3, d4] = self.degrees;
        format!("hilb v1 d {d1} {d2} {d3} {d4} max {}\n{}", self.max_total, self.body_text())
    }

    pub fn to_json(&self) -> String {
        let entries: Vec<_> = self
            .ordered()
            .into_iter()
            .map(|(p, r, dim)| serde_json::json!({"p": p, "r": r, "dim": dim}))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "format": "hilb v1",
            "d": self.degrees,
            "max": self.max_total,
            "entries": entries,
        }))
        .expect("table serializes")
    }

    pub fn parse_text(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| ParseError::new(1, "empty input"))?;
        let f: Vec<&str> = header.split(' ').collect();
        if f.len() != 9 || f[0] != "hilb" || f[1] != "v1" || f[2] != "d" || f[7] != "max" {
            return Err(ParseError::new(1, "expected `hilb v1 d <d1> <d2> <d3> <d4> max <N>`"));
        }
        let num = |s: &str| s.parse::<u32>().map_err(|e| ParseError::new(1, e.to_string()));
        let degrees = [num(f[3])?, num(f[4])?, num(f[5])?, num(f[6])?];
        let max_total = num(f[8])?;
        let mut dims = BTreeMap::new();
        let mut ended = false;
        for (i, line) in lines {
            if line == "end" {
                ended = true;
                break;
            }
            let g: Vec<&str> = line.split(' ').collect();
            let bad = || ParseError::new(i + 1, format!("bad entry `{line}`"));
            if g.len() != 3 {
                return Err(bad());
            }
            let p: u32 = g[0].parse().map_err(|_| bad())?;
            let r: u32 = g[1].parse().map_err(|_| bad())?;
            let d: u64 = g[2].parse().map_err(|_| bad())?;
            dims.insert((p, r), d);
        }
        if !ended {
            return Err(ParseError::new(0, "missing `end`"));
        }
        Ok(BidegreeTable {
            degrees,
            max_total,
            dims,
        })
    }
}

/// Computes Hilbert tables, optionally persisting per-bidegree results.
#[derive(Clone, Default)]
pub struct Oracle {
    store: Option<Store>,
    parallel: bool,
}

impl Oracle {
    pub fn new() -> Self {
        Oracle {
            store: None,
            parallel: true,
        }
    }

    pub fn with_store(mut self, store: Option<Store>) -> Self {
        self.store = store;
        self
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }

    pub fn parallel(mut self, yes: bool) -> Self {
        self.parallel = yes;
        self
    }

    fn reduced_dim(&self, exps: &PairExponents, bd: Bidegree) -> Result<u64, OracleError> {
        let key = CacheKey::new(format!("oracle/reduced/{}/{}/{}", exps.key(), bd.p, bd.r));
        if let Some(store) = &self.store {
            if let Some(v) = store.get(&key)? {
                return v
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| OracleError::BadCachedValue(v.clone()));
            }
        }
        let dim = dim_j_reduced(exps, bd);
        if let Some(store) = &self.store {
            store.put(&key, &format!("{dim}\n"))?;
        }
        Ok(dim)
    }

    /// `dim J(d)` for every `(p, r)` with `p + r <= max_total`.
    pub fn hilb_table(&self, d: &CoxeterDegrees, max_total: u32) -> Result<BidegreeTable, OracleError> {
        let exps = PairExponents::from_degrees(d);
        let jobs: Vec<Bidegree> = (0..=max_total)
            .flat_map(|s| (0..=s).map(move |p| Bidegree::new(p, s - p)))
            .collect();
        // Largest bidegrees first so the long jobs start early.
        let mut order = jobs.clone();
        order.sort_by_key(|bd| std::cmp::Reverse(monomial_count(3, bd.p) * monomial_count(3, bd.r)));
        let results: Vec<(Bidegree, Result<u64, OracleError>)> = if self.parallel {
            order.par_iter().map(|&bd| (bd, self.reduced_dim(&exps, bd))).collect()
        } else {
            order.iter().map(|&bd| (bd, self.reduced_dim(&exps, bd))).collect()
        };
        let mut reduced: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        for (bd, r) in results {
            reduced.insert((bd.p, bd.r), r?);
        }
        let mut dims = BTreeMap::new();
        for bd in jobs {
            let mut total = 0u64;
            for p in 0..=bd.p {
                for r in 0..=bd.r {
                    total += reduced[&(p, r)];
                }
            }
            dims.insert((bd.p, bd.r), total);
        }
        Ok(BidegreeTable {
            degrees: d.as_array(),
            max_total,
            dims,
        })
    }
}

/// Convenience wrapper: parallel, uncached.
pub fn hilb_table(d: &CoxeterDegrees, max_total: u32) -> BidegreeTable {
    Oracle::new()
        .hilb_table(d, max_total)
        .expect("uncached oracle cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(d: [u32; 4]) -> CoxeterDegrees {
        CoxeterDegrees::new(d).unwrap()
    }

    fn brute_solution_dim(sys: &ConstraintSystem) -> usize {
        // Independent route: dense rational elimination.
        use num_bigint::BigInt;
        use num_rational::BigRational;
        use num_traits::Zero;
        let n = sys.ncols;
        let mut m: Vec<Vec<BigRational>> = sys
            .rows
            .iter()
            .map(|r| {
                let mut v = vec![BigRational::zero(); n];
                for &(c, x) in r {
                    v[c as usize] = BigRational::from_integer(BigInt::from(x));
                }
                v
            })
            .collect();
        let mut rank = 0;
        for c in 0..n {
            let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(rank, p);
            for i in 0..m.len() {
                if i != rank && !m[i][c].is_zero() {
                    let f = &m[i][c] / &m[rank][c];
                    for k in c..n {
                        let s = &f * &m[rank][k];
                        m[i][k] -= s;
                    }
                }
            }
            rank += 1;
        }
        n - rank
    }

    #[test]
    fn exponent_vectors_counts() {
        for (nv, d) in [(4usize, 0u32), (4, 3), (3, 5), (1, 4)] {
            assert_eq!(exponent_vectors(nv, d).len() as u64, monomial_count(nv as u32, d));
        }
        assert_eq!(exponent_vectors(2, 1), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn pair_constraints_zero_exponent_is_empty() {
        let sys = pair_constraints(1, 2, 0, Bidegree::new(2, 1));
        assert!(sys.rows.is_empty());
        assert_eq!(sys.nullity() as u64, Bidegree::new(2, 1).ambient_dim());
    }

    #[test]
    fn pair_constraints_linear_forms() {
        let sys = pair_constraints(3, 4, 1, Bidegree::new(1, 0));
        assert_eq!(sys.nullity(), 1);
        assert_eq!(brute_solution_dim(&sys), 1);
        // x3 - x4 spans it
        let basis = MonomialBasis::full(Bidegree::new(1, 0));
        let mut v = vec![0i64; basis.columns.len()];
        v[basis.index_of(&[0, 0, 1, 0], &[0, 0, 0, 0]).unwrap()] = 1;
        v[basis.index_of(&[0, 0, 0, 1], &[0, 0, 0, 0]).unwrap()] = -1;
        assert!(sys.satisfied_by(&v));

        let sys = pair_constraints(3, 4, 2, Bidegree::new(1, 0));
        assert_eq!(sys.nullity(), 0);
    }

    #[test]
    fn dim_j_examples() {
        for (p, r) in [(0, 0), (2, 1), (3, 3)] {
            let bd = Bidegree::new(p, r);
            assert_eq!(dim_j(&deg([0, 0, 0, 0]), bd), bd.ambient_dim());
        }
        assert_eq!(dim_j(&deg([1, 1, 1, 1]), Bidegree::new(6, 0)), 1);
        assert_eq!(dim_j(&deg([1, 1, 1, 1]), Bidegree::new(1, 0)), 0);
        let sys = stacked_constraints(&deg([1, 1, 1, 1]), Bidegree::new(6, 0));
        assert_eq!(brute_solution_dim(&sys), 1);
    }

    /// Coordinate vector of `prod_{i<j} (x_i - x_j)^{d_i}` in the full basis.
    fn vandermonde_power(d: &CoxeterDegrees) -> (Bidegree, Vec<i64>) {
        use std::collections::BTreeMap;
        let dv = d.as_array();
        let mut poly: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        poly.insert(vec![0; 4], 1);
        for i in 0..4 {
            for j in (i + 1)..4 {
                for _ in 0..dv[i] {
                    let mut next = BTreeMap::new();
                    for (m, c) in &poly {
                        let mut mi = m.clone();
                        mi[i] += 1;
                        *next.entry(mi).or_insert(0) += c;
                        let mut mj = m.clone();
                        mj[j] += 1;
                        *next.entry(mj).or_insert(0) -= c;
                    }
                    next.retain(|_, c| *c != 0);
                    poly = next;
                }
            }
        }
        let p = 3 * dv[0] + 2 * dv[1] + dv[2];
        let bd = Bidegree::new(p, 0);
        let basis = MonomialBasis::full(bd);
        let mut v = vec![0; basis.columns.len()];
        for (m, c) in poly {
            v[basis.index_of(&m, &[0, 0, 0, 0]).unwrap()] = c;
        }
        (bd, v)
    }

    #[test]
    fn product_element_satisfies_all_constraints() {
        for d in [[0, 0, 1, 1], [0, 1, 1, 1], [1, 1, 1, 1], [0, 1, 2, 2], [1, 1, 2, 2]] {
            let d = deg(d);
            let (bd, v) = vandermonde_power(&d);
            assert!(stacked_constraints(&d, bd).satisfied_by(&v), "{d:?}");
        }
    }

    #[test]
    fn reduced_ring_matches_full_ring() {
        for d in [[0, 0, 1, 1], [0, 1, 1, 1], [1, 1, 1, 1], [0, 1, 2, 2], [1, 1, 2, 2], [0, 0, 2, 2]] {
            let d = deg(d);
            let t = hilb_table(&d, 5);
            for (p, r, dim) in t.ordered() {
                assert_eq!(dim, dim_j(&d, Bidegree::new(p, r)), "{d:?} at ({p},{r})");
            }
        }
    }

    #[test]
    fn single_pair_series() {
        // (q + t - qt) / ((1-q)^4 (1-t)^4)
        let t = hilb_table(&deg([0, 0, 1, 1]), 7);
        let c = |p: u32, r: u32| -> i64 {
            if p > 1000 {
                return 0;
            }
            (monomial_count(4, p) * monomial_count(4, r)) as i64
        };
        for (p, r, dim) in t.ordered() {
            let mut want = 0i64;
            if p >= 1 {
                want += c(p - 1, r);
            }
            if r >= 1 {
                want += c(p, r - 1);
            }
            if p >= 1 && r >= 1 {
                want -= c(p - 1, r - 1);
            }
            assert_eq!(dim as i64, want, "({p},{r})");
        }
    }

    #[test]
    fn symmetric_and_monotone() {
        let t = hilb_table(&deg([1, 1, 2, 2]), 6);
        for (p, r, dim) in t.ordered() {
            assert_eq!(Some(dim), t.get(r, p));
        }
        let small = hilb_table(&deg([0, 1, 1, 1]), 6);
        let big = hilb_table(&deg([1, 1, 1, 1]), 6);
        for (p, r, dim) in big.ordered() {
            assert!(dim <= small.get(p, r).unwrap());
            assert!(small.get(p, r).unwrap() <= Bidegree::new(p, r).ambient_dim());
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let d = deg([0, 1, 2, 2]);
        let a = Oracle::new().serial().hilb_table(&d, 6).unwrap();
        let b = Oracle::new().hilb_table(&d, 6).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn text_round_trip() {
        let t = hilb_table(&deg([0, 1, 1, 3]), 4);
        let s = t.to_text();
        assert!(s.starts_with("hilb v1 d 0 1 1 3 max 4\n0 0 "));
        assert_eq!(BidegreeTable::parse_text(&s).unwrap(), t);
    }
}
