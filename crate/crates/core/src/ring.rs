//! Exact arithmetic in `Z[q, a][t, t^-1]` localized at `(1 - q)`.
//!
//! Every homology value produced by the engine is a [`GradedSeries`]: a
//! Laurent polynomial numerator over a power of `(1 - q)`. Values are kept in
//! a canonical form where `(1 - q)` does not divide the numerator, so
//! equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// A monomial `q^q t^t a^a`. Ordering is lexicographic in `(q, t, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub q: u32,
    pub t: i32,
    pub a: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { q: 0, t: 0, a: 0 };

    pub const fn new(q: u32, t: i32, a: u32) -> Self {
        Monomial { q, t, a }
    }

    pub fn mul(self, other: Monomial) -> Monomial {
        Monomial {
            q: self.q + other.q,
            t: self.t + other.t,
            a: self.a + other.a,
        }
    }

    pub fn pow(self, n: u32) -> Monomial {
        Monomial {
            q: self.q * n,
            t: self.t * n as i32,
            a: self.a * n,
        }
    }

    /// Exponents in the `(Q, T, A)` grading, using `q = Q^2`, `t = T^2 Q^-2`,
    /// `a = A Q^-2`.
    pub fn to_qta(self) -> QtaMonomial {
        QtaMonomial {
            q: 2 * self.q as i64 - 2 * self.t as i64 - 2 * self.a as i64,
            t: 2 * self.t as i64,
            a: self.a,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (sym, e) in [("q", self.q as i64), ("t", self.t as i64), ("a", self.a as i64)] {
            match e {
                0 => {}
                1 => parts.push(sym.to_string()),
                _ => parts.push(format!("{sym}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Exponents of a monomial in the original `(Q, T, A)` gradings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QtaMonomial {
    pub q: i64,
    pub t: i64,
    pub a: u32,
}

/// Finite sum of monomials with nonzero big-integer coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(Monomial::ONE, BigInt::one())
    }

    pub fn monomial(m: Monomial, c: impl Into<BigInt>) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(m, c.into());
        p
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut p = LaurentPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical `(q, t, a)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> BigInt {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn mul_monomial(&self, m: Monomial) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term carrying a positive power of `a`.
    pub fn specialize_a0(&self) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.a == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Groups coefficients by `(t, a)`, giving a sparse polynomial in `q` for each.
    fn q_slices(&self) -> BTreeMap<(i32, u32), BTreeMap<u32, BigInt>> {
        let mut slices: BTreeMap<(i32, u32), BTreeMap<u32, BigInt>> = BTreeMap::new();
        for (m, c) in &self.terms {
            slices.entry((m.t, m.a)).or_default().insert(m.q, c.clone());
        }
        slices
    }

    /// True when `(1 - q)` divides the polynomial, i.e. it vanishes at `q = 1`.
    pub fn divisible_by_one_minus_q(&self) -> bool {
        self.q_slices()
            .values()
            .all(|s| s.values().fold(BigInt::zero(), |acc, c| acc + c).is_zero())
    }

    /// Exact quotient by `(1 - q)`, or `None` if it does not divide.
    pub fn div_one_minus_q(&self) -> Option<LaurentPoly> {
        let mut out = LaurentPoly::zero();
        for ((t, a), slice) in self.q_slices() {
            let lo = *slice.keys().next().unwrap();
            let hi = *slice.keys().next_back().unwrap();
            // b_i = sum_{j <= i} c_j; the final partial sum must vanish.
            let mut running = BigInt::zero();
            for i in lo..=hi {
                if let Some(c) = slice.get(&i) {
                    running += c;
                }
                if i == hi {
                    if !running.is_zero() {
                        return None;
                    }
                } else if !running.is_zero() {
                    out.add_term(Monomial::new(i, t, a), running.clone());
                }
            }
        }
        Some(out)
    }

    pub fn mul_one_minus_q(&self) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &self.terms {
            out.add_term(m.mul(Monomial::new(1, 0, 0)), -c);
        }
        out
    }

    pub fn min_t(&self) -> Option<i32> {
        self.terms.keys().map(|m| m.t).min()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if *m == Monomial::ONE {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(*m2), c1 * c2);
            }
        }
        out
    }
}

/// `numerator / (1 - q)^denom`, always held in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSeries {
    numerator: LaurentPoly,
    denom: u32,
}

impl Default for GradedSeries {
    fn default() -> Self {
        GradedSeries::zero()
    }
}

impl GradedSeries {
    /// Builds `numerator / (1 - q)^denom` and cancels common `(1 - q)` factors.
    pub fn new(numerator: LaurentPoly, denom: u32) -> Self {
        let mut numerator = numerator;
        let mut denom = denom;
        if numerator.is_zero() {
            denom = 0;
        }
        while denom > 0 {
            match numerator.div_one_minus_q() {
                Some(q) => {
                    numerator = q;
                    denom -= 1;
                }
                None => break,
            }
        }
        GradedSeries { numerator, denom }
    }

    pub fn zero() -> Self {
        GradedSeries {
            numerator: LaurentPoly::zero(),
            denom: 0,
        }
    }

    pub fn one() -> Self {
        GradedSeries::from_poly(LaurentPoly::one())
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        GradedSeries { numerator: p, denom: 0 }
    }

    pub fn constant(c: i64) -> Self {
        GradedSeries::from_poly(LaurentPoly::monomial(Monomial::ONE, c))
    }

    pub fn monomial(q: u32, t: i32, a: u32) -> Self {
        GradedSeries::from_poly(LaurentPoly::monomial(Monomial::new(q, t, a), 1))
    }

    pub fn q() -> Self {
        GradedSeries::monomial(1, 0, 0)
    }

    pub fn t() -> Self {
        GradedSeries::monomial(0, 1, 0)
    }

    pub fn a() -> Self {
        GradedSeries::monomial(0, 0, 1)
    }

    /// `1 / (1 - q)^e`.
    pub fn inv_one_minus_q(e: u32) -> Self {
        GradedSeries {
            numerator: LaurentPoly::one(),
            denom: e,
        }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.numerator
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Multiplies by `1 / (1 - q)^e`.
    pub fn div_one_minus_q(&self, e: u32) -> Self {
        GradedSeries::new(self.numerator.clone(), self.denom + e)
    }

    pub fn mul_monomial(&self, m: Monomial) -> Self {
        GradedSeries {
            numerator: self.numerator.mul_monomial(m),
            denom: self.denom,
        }
    }

    /// Shorthand for multiplying by `q^q t^t`.
    pub fn shift(&self, q: u32, t: i32) -> Self {
        self.mul_monomial(Monomial::new(q, t, 0))
    }

    pub fn pow(&self, n: u32) -> Self {
        GradedSeries::new(self.numerator.pow(n), self.denom * n)
    }

    pub fn specialize_a0(&self) -> Self {
        GradedSeries::new(self.numerator.specialize_a0(), self.denom)
    }

    pub fn has_a_terms(&self) -> bool {
        self.numerator.terms().any(|(m, _)| m.a > 0)
    }

    /// `sum_{i < n} x^i` as a polynomial.
    pub fn geom_sum(x: Monomial, n: u32) -> Self {
        GradedSeries::from_poly(LaurentPoly::from_terms(
            (0..n).map(|i| (x.pow(i), BigInt::one())),
        ))
    }

    fn lift(&self, e: u32) -> LaurentPoly {
        let mut num = self.numerator.clone();
        for _ in self.denom..e {
            num = num.mul_one_minus_q();
        }
        num
    }

    /// Coefficients of `q^0 .. q^order` of the power-series expansion in `q`.
    pub fn expand(&self, q_order: u32) -> CoeffTable {
        let e = self.denom;
        // (1 - q)^-e = sum_j binom(e - 1 + j, j) q^j
        let mut series_coeffs: Vec<BigInt> = Vec::with_capacity(q_order as usize + 1);
        for j in 0..=q_order {
            series_coeffs.push(if e == 0 {
                if j == 0 {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            } else {
                binomial(e - 1 + j, j)
            });
        }
        let mut entries: BTreeMap<(u32, i32, u32), BigInt> = BTreeMap::new();
        for (m, c) in self.numerator.terms() {
            if m.q > q_order {
                continue;
            }
            for (j, s) in series_coeffs.iter().enumerate().take((q_order - m.q) as usize + 1) {
                if s.is_zero() {
                    continue;
                }
                let key = (m.q + j as u32, m.t, m.a);
                let v = entries.entry(key).or_default();
                *v += c * s;
            }
        }
        entries.retain(|_, v| !v.is_zero());
        CoeffTable { entries, q_order }
    }

    /// Canonical text form: `series v1 denom <e>`, one `<coef> <q> <t> <a>`
    /// line per term, then `end`.
    pub fn to_canonical_text(&self) -> String {
        let mut s = format!("series v1 denom {}\n", self.denom);
        for (m, c) in self.numerator.terms() {
            s.push_str(&format!("{} {} {} {}\n", c, m.q, m.t, m.a));
        }
        s.push_str("end\n");
        s
    }

    pub fn parse_canonical_text(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| ParseError::new(1, "empty input"))?;
        let denom = header
            .strip_prefix("series v1 denom ")
            .ok_or_else(|| ParseError::new(1, "expected `series v1 denom <e>`"))?
            .parse::<u32>()
            .map_err(|e| ParseError::new(1, e.to_string()))?;
        let mut terms = Vec::new();
        let mut ended = false;
        for (i, line) in lines.by_ref() {
            if line == "end" {
                ended = true;
                break;
            }
            terms.push(parse_term_fields(line, i + 1)?);
        }
        if !ended {
            return Err(ParseError::new(0, "missing `end`"));
        }
        if let Some((i, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(ParseError::new(i + 1, format!("trailing content `{extra}`")));
        }
        let x = build_checked(terms, denom)?;
        Ok(x)
    }

    pub fn min_t(&self) -> Option<i32> {
        self.numerator.min_t()
    }

    /// Numerator coefficients keyed by `(q, t)`, summed over the `a` grading.
    pub fn terms_by_q_t(&self) -> BTreeMap<(u32, i32), BigInt> {
        let mut out: BTreeMap<(u32, i32), BigInt> = BTreeMap::new();
        for (m, c) in self.numerator.terms() {
            *out.entry((m.q, m.t)).or_default() += c;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }
}

/// Parses `<coef> <q> <t> <a>`.
pub(crate) fn parse_term_fields(line: &str, lineno: usize) -> Result<(Monomial, BigInt), ParseError> {
    let fields: Vec<&str> = line.split(' ').collect();
    if fields.len() != 4 {
        return Err(ParseError::new(lineno, format!("expected 4 fields, got `{line}`")));
    }
    let c: BigInt = fields[0]
        .parse()
        .map_err(|_| ParseError::new(lineno, format!("bad coefficient `{}`", fields[0])))?;
    let q: u32 = fields[1]
        .parse()
        .map_err(|_| ParseError::new(lineno, format!("bad q exponent `{}`", fields[1])))?;
    let t: i32 = fields[2]
        .parse()
        .map_err(|_| ParseError::new(lineno, format!("bad t exponent `{}`", fields[2])))?;
    let a: u32 = fields[3]
        .parse()
        .map_err(|_| ParseError::new(lineno, format!("bad a exponent `{}`", fields[3])))?;
    Ok((Monomial::new(q, t, a), c))
}

/// Rebuilds a series from serialized terms, insisting the input was already
/// canonical so that serialization round-trips bit-exactly.
pub(crate) fn build_checked(terms: Vec<(Monomial, BigInt)>, denom: u32) -> Result<GradedSeries, ParseError> {
    for w in terms.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(ParseError::new(0, "terms not in strictly increasing canonical order"));
        }
    }
    if terms.iter().any(|(_, c)| c.is_zero()) {
        return Err(ParseError::new(0, "zero coefficient"));
    }
    let num = LaurentPoly::from_terms(terms);
    let x = GradedSeries::new(num.clone(), denom);
    if x.denom != denom || x.numerator != num {
        return Err(ParseError::new(0, "series is not in canonical form"));
    }
    Ok(x)
}

impl fmt::Display for GradedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.denom {
            0 => write!(f, "{}", self.numerator),
            1 => write!(f, "({})/(1 - q)", self.numerator),
            e => write!(f, "({})/(1 - q)^{e}", self.numerator),
        }
    }
}

impl Add for &GradedSeries {
    type Output = GradedSeries;
    fn add(self, rhs: &GradedSeries) -> GradedSeries {
        let e = self.denom.max(rhs.denom);
        GradedSeries::new(&self.lift(e) + &rhs.lift(e), e)
    }
}

impl Sub for &GradedSeries {
    type Output = GradedSeries;
    fn sub(self, rhs: &GradedSeries) -> GradedSeries {
        let e = self.denom.max(rhs.denom);
        GradedSeries::new(&self.lift(e) - &rhs.lift(e), e)
    }
}

impl Mul for &GradedSeries {
    type Output = GradedSeries;
    fn mul(self, rhs: &GradedSeries) -> GradedSeries {
        GradedSeries::new(&self.numerator * &rhs.numerator, self.denom + rhs.denom)
    }
}

impl Neg for &GradedSeries {
    type Output = GradedSeries;
    fn neg(self) -> GradedSeries {
        GradedSeries {
            numerator: -&self.numerator,
            denom: self.denom,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GradedSeries {
            type Output = GradedSeries;
            fn $m(self, rhs: GradedSeries) -> GradedSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&GradedSeries> for GradedSeries {
            type Output = GradedSeries;
            fn $m(self, rhs: &GradedSeries) -> GradedSeries {
                (&self).$m(rhs)
            }
        }
        impl $tr<GradedSeries> for &GradedSeries {
            type Output = GradedSeries;
            fn $m(self, rhs: GradedSeries) -> GradedSeries {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GradedSeries {
    type Output = GradedSeries;
    fn neg(self) -> GradedSeries {
        -&self
    }
}

/// Truncated `q`-expansion: coefficient of `q^i t^j a^k` for every `i <= q_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    entries: BTreeMap<(u32, i32, u32), BigInt>,
    q_order: u32,
}

impl CoeffTable {
    pub fn q_order(&self) -> u32 {
        self.q_order
    }

    pub fn get(&self, q: u32, t: i32, a: u32) -> BigInt {
        self.entries.get(&(q, t, a)).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(u32, i32, u32), &BigInt)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest coefficient, counting absent keys as zero.
    pub fn min_coefficient(&self) -> BigInt {
        self.entries
            .values()
            .min()
            .map(|m| m.clone().min(BigInt::zero()))
            .unwrap_or_default()
    }

    /// Truncated product of two expansions.
    pub fn convolve(&self, other: &CoeffTable) -> CoeffTable {
        let q_order = self.q_order.min(other.q_order);
        let mut entries: BTreeMap<(u32, i32, u32), BigInt> = BTreeMap::new();
        for ((q1, t1, a1), c1) in &self.entries {
            for ((q2, t2, a2), c2) in &other.entries {
                if q1 + q2 > q_order {
                    continue;
                }
                *entries.entry((q1 + q2, t1 + t2, a1 + a2)).or_default() += c1 * c2;
            }
        }
        entries.retain(|_, v| !v.is_zero());
        CoeffTable { entries, q_order }
    }
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
