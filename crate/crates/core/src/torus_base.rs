//! Homology of full twists on two and four strands.
//!
//! `HHH(FT_2^k)` follows from the `K_n` calculus at `n = 1`. `HHH(FT_4^n)` for
//! `n >= 1` is external data held in a [`BaseCaseTable`]; its `a = 0` layer can
//! be rebuilt from the Hilbert series of `J(n, n, n, n)` by
//! [`derive_ft4_a0`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cache::sha256_hex;
use crate::engine::EvalMode;
use crate::error::{BaseCaseError, EngineError, ParseError};
use crate::oracle::BidegreeTable;
use crate::ring::{self, GradedSeries, LaurentPoly, Monomial};

/// Expansion order used to validate imported entries.
pub const VALIDATION_ORDER: u32 = 10;

fn unknot(mode: EvalMode) -> GradedSeries {
    mode.apply((GradedSeries::one() + GradedSeries::a()).div_one_minus_q(1))
}

/// `u(k) = (1 - q) HHH(FT_2^k)`: `u(0) = (1+a)^2/(1-q)`,
/// `u(k) = t^-1 (t+a)(1+a) + q t^-1 u(k-1)`.
pub fn u2(k: u32, mode: EvalMode) -> GradedSeries {
    let one_a = GradedSeries::one() + GradedSeries::a();
    let step = mode.apply((GradedSeries::t() + GradedSeries::a()) * &one_a).shift(0, -1);
    let base = mode.apply(one_a.pow(2).div_one_minus_q(1));
    (0..k).fold(base, |prev, _| &step + &prev.shift(1, -1))
}

/// `HHH(FT_2^k)`, the closure of the torus link `T(2, 2k)`.
pub fn ft2(k: u32, mode: EvalMode) -> GradedSeries {
    u2(k, mode).div_one_minus_q(1)
}

/// `HHH(FT_4^n)`. `n = 0` is the 4-component unlink; otherwise the table is
/// consulted, falling back to specializing a full-`a` entry in `a0` mode.
pub fn ft4(n: u32, mode: EvalMode, table: &BaseCaseTable) -> Result<GradedSeries, EngineError> {
    if n == 0 {
        return Ok(unknot(mode).pow(4));
    }
    let missing = || EngineError::MissingBaseCase { n, mode };
    match mode {
        EvalMode::FullA => table.get(n, EvalMode::FullA).map(|e| e.series.clone()).ok_or_else(missing),
        EvalMode::A0 => table
            .get(n, EvalMode::A0)
            .map(|e| e.series.clone())
            .or_else(|| table.get(n, EvalMode::FullA).map(|e| e.series.specialize_a0()))
            .ok_or_else(missing),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCaseEntry {
    pub n: u32,
    pub mode: EvalMode,
    pub series: GradedSeries,
    /// Free-form origin note, e.g. `oracle order 11 shift 0 -6`.
    pub provenance: Option<String>,
}

impl BaseCaseEntry {
    fn body_lines(&self) -> Vec<String> {
        let mut lines = vec![
            "family FT4".to_string(),
            format!("n {}", self.n),
            format!("mode {}", self.mode),
        ];
        if let Some(p) = &self.provenance {
            lines.push(format!("provenance {p}"));
        }
        lines.push(format!("denom-exponent {}", self.series.denom_exp()));
        for (m, c) in self.series.numerator().terms() {
            lines.push(format!("term {} {} {} {}", c, m.q, m.t, m.a));
        }
        lines
    }

    /// SHA-256 of the block lines preceding `checksum`, each newline-terminated.
    pub fn checksum(&self) -> String {
        checksum_of(&self.body_lines())
    }

    /// Positivity to [`VALIDATION_ORDER`] and, for `a0` entries, absence of `a`.
    pub fn validate(&self) -> Result<(), BaseCaseError> {
        if self.mode == EvalMode::A0 && self.series.has_a_terms() {
            return Err(BaseCaseError::UnexpectedATerms { n: self.n });
        }
        let min = self.series.expand(VALIDATION_ORDER).min_coefficient();
        if min.is_negative() {
            return Err(BaseCaseError::PositivityViolation {
                n: self.n,
                coefficient: min.to_string(),
            });
        }
        Ok(())
    }
}

fn checksum_of(lines: &[String]) -> String {
    let mut s = String::new();
    for l in lines {
        s.push_str(l);
        s.push('\n');
    }
    sha256_hex(&s)
}

/// `HHH(FT_4^n)` entries keyed by `(n, mode)`, `n >= 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BaseCaseTable {
    entries: BTreeMap<(u32, EvalMode), BaseCaseEntry>,
}

/// `true` if `x = m * y` for a single monomial `m` with coefficient 1.
fn equal_up_to_monomial(x: &GradedSeries, y: &GradedSeries) -> bool {
    if x.denom_exp() != y.denom_exp() || x.numerator().len() != y.numerator().len() {
        return false;
    }
    let (Some((mx, cx)), Some((my, cy))) = (x.numerator().terms().next(), y.numerator().terms().next()) else {
        return x.is_zero() && y.is_zero();
    };
    if cx != cy || mx.q < my.q || mx.a < my.a {
        return false;
    }
    let dm = Monomial::new(mx.q - my.q, mx.t - my.t, mx.a - my.a);
    y.mul_monomial(dm) == *x
}

impl BaseCaseTable {
    pub fn get(&self, n: u32, mode: EvalMode) -> Option<&BaseCaseEntry> {
        self.entries.get(&(n, mode))
    }

    pub fn entries(&self) -> impl Iterator<Item = &BaseCaseEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Validates and adds an entry. Re-adding an identical series is a no-op.
    pub fn insert(&mut self, entry: BaseCaseEntry) -> Result<(), BaseCaseError> {
        if entry.n == 0 {
            return Err(ParseError::new(0, "base cases start at n = 1").into());
        }
        entry.validate()?;
        let conflict = BaseCaseError::Conflict {
            n: entry.n,
            mode: entry.mode,
        };
        if let Some(old) = self.entries.get(&(entry.n, entry.mode)) {
            return if old.series == entry.series { Ok(()) } else { Err(conflict) };
        }
        let other_mode = match entry.mode {
            EvalMode::FullA => EvalMode::A0,
            EvalMode::A0 => EvalMode::FullA,
        };
        if let Some(other) = self.entries.get(&(entry.n, other_mode)) {
            let (full, a0) = match entry.mode {
                EvalMode::FullA => (&entry.series, &other.series),
                EvalMode::A0 => (&other.series, &entry.series),
            };
            let s = full.specialize_a0();
            if !equal_up_to_monomial(&s, a0) && !equal_up_to_monomial(a0, &s) {
                return Err(conflict);
            }
        }
        self.entries.insert((entry.n, entry.mode), entry);
        Ok(())
    }

    pub fn merge(&mut self, other: &BaseCaseTable) -> Result<(), BaseCaseError> {
        for e in other.entries() {
            self.insert(e.clone())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("hhh-basecase v1\n");
        for e in self.entries.values() {
            for l in e.body_lines() {
                s.push_str(&l);
                s.push('\n');
            }
            let _ = writeln!(s, "checksum {}", e.checksum());
            s.push_str("end\n");
        }
        s
    }

    /// Reads the `hhh-basecase v1` format, checking every checksum and the
    /// positivity of every entry.
    pub fn parse(text: &str) -> Result<Self, BaseCaseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l)).peekable();
        match lines.next() {
            Some((_, "hhh-basecase v1")) => {}
            _ => return Err(ParseError::new(1, "expected `hhh-basecase v1`").into()),
        }
        let mut table = BaseCaseTable::default();
        while let Some(&(lineno, line)) = lines.peek() {
            if line.trim().is_empty() {
                lines.next();
                continue;
            }
            if line != "family FT4" {
                return Err(ParseError::new(lineno, format!("expected `family FT4`, got `{line}`")).into());
            }
            let mut block: Vec<String> = Vec::new();
            let mut next = |what: &str| -> Result<(usize, &str), ParseError> {
                lines
                    .next()
                    .ok_or_else(|| ParseError::new(0, format!("unexpected end of input, expected {what}")))
            };
            let (_, l) = next("family")?;
            block.push(l.to_string());
            let (i, l) = next("n")?;
            let n: u32 = l
                .strip_prefix("n ")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| ParseError::new(i, format!("expected `n <int>`, got `{l}`")))?;
            block.push(l.to_string());
            let (i, l) = next("mode")?;
            let mode = l
                .strip_prefix("mode ")
                .and_then(EvalMode::parse)
                .ok_or_else(|| ParseError::new(i, format!("expected `mode <fullA|a0>`, got `{l}`")))?;
            block.push(l.to_string());
            let (mut i, mut l) = next("denom-exponent")?;
            let mut provenance = None;
            if let Some(p) = l.strip_prefix("provenance ") {
                provenance = Some(p.to_string());
                block.push(l.to_string());
                (i, l) = next("denom-exponent")?;
            }
            let denom: u32 = l
                .strip_prefix("denom-exponent ")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| ParseError::new(i, format!("expected `denom-exponent <int>`, got `{l}`")))?;
            block.push(l.to_string());
            let mut terms = Vec::new();
            let stated = loop {
                let (i, l) = next("term or checksum")?;
                if let Some(rest) = l.strip_prefix("term ") {
                    terms.push(ring::parse_term_fields(rest, i)?);
                    block.push(l.to_string());
                } else if let Some(h) = l.strip_prefix("checksum ") {
                    break h.to_string();
                } else {
                    return Err(ParseError::new(i, format!("unexpected line `{l}`")).into());
                }
            };
            match next("end")? {
                (_, "end") => {}
                (i, l) => return Err(ParseError::new(i, format!("expected `end`, got `{l}`")).into()),
            }
            let actual = checksum_of(&block);
            if actual != stated {
                return Err(BaseCaseError::ChecksumMismatch { n, stated, actual });
            }
            let series = ring::build_checked(terms, denom)?;
            table.insert(BaseCaseEntry {
                n,
                mode,
                series,
                provenance,
            })?;
        }
        Ok(table)
    }

    pub fn import(path: &std::path::Path) -> Result<Self, BaseCaseError> {
        BaseCaseTable::parse(&std::fs::read_to_string(path)?)
    }
}

/// Result of rebuilding an `a = 0` numerator from Hilbert-function data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reconstruction {
    /// `N(q, t) / (1 - q)^4`, divided by the `q^0` monomial of `N`.
    pub series: GradedSeries,
    /// The monomial `t^s` removed from the raw numerator, as `(q, t)` exponents.
    pub shift: (u32, i32),
    pub order: u32,
}

/// `(sum_{p+r <= order} dim_{p,r} q^p t^r) (1-q)^4 (1-t)^4`, truncated to total
/// degree `<= order`, keyed by `(p, r)`.
pub fn hilbert_numerator(table: &BidegreeTable, order: u32) -> BTreeMap<(u32, u32), BigInt> {
    // (1-q)^4 (1-t)^4 coefficients
    let w: Vec<BigInt> = (0..=4u32)
        .map(|i| {
            let b = ring::binomial(4, i);
            if i % 2 == 0 { b } else { -b }
        })
        .collect();
    let mut out = BTreeMap::new();
    for s in 0..=order {
        for p in 0..=s {
            let r = s - p;
            let mut acc = BigInt::zero();
            for i in 0..=p.min(4) {
                for j in 0..=r.min(4) {
                    let dim = table.get(p - i, r - j).unwrap_or(0);
                    acc += &w[i as usize] * &w[j as usize] * BigInt::from(dim);
                }
            }
            if !acc.is_zero() {
                out.insert((p, r), acc);
            }
        }
    }
    out
}

/// Rebuilds `HHH^{a=0}(FT_4^n)` from the Hilbert table of `J(n, n, n, n)`.
///
/// The numerator truncated at `order` must carry no terms of total degree
/// `order - 1` or `order` (so it equals the truncation at `order - 2`). The
/// result is normalized so that its `q^0` part is `1`.
pub fn derive_ft4_a0(table: &BidegreeTable, order: u32) -> Result<Reconstruction, BaseCaseError> {
    if table.max_total < order {
        return Err(BaseCaseError::InsufficientTable {
            have: table.max_total,
            need: order,
        });
    }
    let lower = order.saturating_sub(2);
    let num = hilbert_numerator(table, order);
    if num.keys().any(|&(p, r)| p + r > lower) {
        return Err(BaseCaseError::NotStabilized { lower, upper: order });
    }
    let q0: Vec<(&(u32, u32), &BigInt)> = num.iter().filter(|((p, _), _)| *p == 0).collect();
    let shift_t = match q0.as_slice() {
        [(&(0, r), c)] if c.is_one() => r as i32,
        _ => {
            let shown: Vec<String> = q0.iter().map(|((_, r), c)| format!("{c}*t^{r}")).collect();
            return Err(BaseCaseError::Normalization(shown.join(" + ")));
        }
    };
    let poly = LaurentPoly::from_terms(
        num.into_iter()
            .map(|((p, r), c)| (Monomial::new(p, r as i32 - shift_t, 0), c)),
    );
    let series = GradedSeries::new(poly, 4);
    let min = series.expand(order).min_coefficient();
    if min.is_negative() {
        return Err(BaseCaseError::NegativeCoefficient {
            coefficient: min.to_string(),
        });
    }
    Ok(Reconstruction {
        series,
        shift: (0, -shift_t),
        order,
    })
}

impl Reconstruction {
    pub fn into_entry(self, n: u32) -> BaseCaseEntry {
        BaseCaseEntry {
            n,
            mode: EvalMode::A0,
            provenance: Some(format!("oracle order {} shift {} {}", self.order, self.shift.0, self.shift.1)),
            series: self.series,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{CoxeterDegrees, Engine, FamilyKey};
    use crate::oracle::hilb_table;

    fn full(k: u32) -> GradedSeries {
        ft2(k, EvalMode::FullA)
    }

    #[test]
    fn ft2_examples() {
        let one_a = GradedSeries::one() + GradedSeries::a();
        assert_eq!(full(0), one_a.pow(2).div_one_minus_q(2));
        let num = (GradedSeries::t() + GradedSeries::a()).shift(0, -1)
            * &one_a
            * (GradedSeries::one() - GradedSeries::q())
            + one_a.pow(2).shift(1, -1);
        assert_eq!(full(1), num.div_one_minus_q(2));
        let c00 = Engine::new().eval(FamilyKey::Ctw3 { n: 0, k: 0 }, EvalMode::FullA).unwrap();
        let lhs = (GradedSeries::monomial(0, 2, 0) + GradedSeries::a())
            * (GradedSeries::t() + GradedSeries::a())
            * (GradedSeries::one() - GradedSeries::q())
            * full(0);
        assert_eq!(lhs, *c00);
    }

    #[test]
    fn ft2_recursion_consistency() {
        let one_minus_q = GradedSeries::one() - GradedSeries::q();
        let rhs = (GradedSeries::t() + GradedSeries::a()).shift(0, -1) * (GradedSeries::one() + GradedSeries::a());
        for k in 1..=10 {
            let lhs = &one_minus_q * &full(k) - (&one_minus_q * &full(k - 1)).shift(1, -1);
            assert_eq!(lhs, rhs, "k = {k}");
        }
    }

    #[test]
    fn ft4_lookup() {
        let table = BaseCaseTable::default();
        let e = Engine::new();
        let d = CoxeterDegrees::new([0, 0, 0, 0]).unwrap();
        assert_eq!(
            ft4(0, EvalMode::FullA, &table).unwrap(),
            e.hhh_coxeter(&d, EvalMode::FullA).unwrap()
        );
        assert_eq!(ft4(0, EvalMode::A0, &table).unwrap(), GradedSeries::inv_one_minus_q(4));
        assert!(matches!(
            ft4(1, EvalMode::FullA, &table),
            Err(EngineError::MissingBaseCase { n: 1, .. })
        ));
    }

    fn sample_entry() -> BaseCaseEntry {
        BaseCaseEntry {
            n: 1,
            mode: EvalMode::A0,
            series: (GradedSeries::one() + GradedSeries::monomial(1, 3, 0)).div_one_minus_q(4),
            provenance: Some("test".into()),
        }
    }

    #[test]
    fn base_case_file_round_trip() {
        let mut table = BaseCaseTable::default();
        table.insert(sample_entry()).unwrap();
        let text = table.to_text();
        let back = BaseCaseTable::parse(&text).unwrap();
        assert_eq!(back, table);
        assert_eq!(back.to_text(), text);
        assert_eq!(back.len(), 1);
    }

    #[test]
    fn altered_checksum_is_rejected() {
        let mut table = BaseCaseTable::default();
        table.insert(sample_entry()).unwrap();
        let text = table.to_text();
        let pos = text.find("checksum ").unwrap() + "checksum ".len();
        let mut bytes = text.into_bytes();
        bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
        let text = String::from_utf8(bytes).unwrap();
        assert!(matches!(
            BaseCaseTable::parse(&text),
            Err(BaseCaseError::ChecksumMismatch { n: 1, .. })
        ));
        // altering a term also breaks the checksum
        let mut table = BaseCaseTable::default();
        table.insert(sample_entry()).unwrap();
        let text = table.to_text().replace("term 1 1 3 0", "term 2 1 3 0");
        assert!(matches!(BaseCaseTable::parse(&text), Err(BaseCaseError::ChecksumMismatch { .. })));
    }

    #[test]
    fn negative_entry_is_rejected() {
        let entry = BaseCaseEntry {
            series: GradedSeries::one() - GradedSeries::monomial(2, 0, 0) - GradedSeries::monomial(2, 0, 0),
            ..sample_entry()
        };
        let lines = entry.body_lines();
        let text = format!(
            "hhh-basecase v1\n{}\nchecksum {}\nend\n",
            lines.join("\n"),
            entry.checksum()
        );
        assert!(matches!(
            BaseCaseTable::parse(&text),
            Err(BaseCaseError::PositivityViolation { n: 1, .. })
        ));
    }

    #[test]
    fn a0_entry_with_a_terms_is_rejected() {
        let entry = BaseCaseEntry {
            series: GradedSeries::one() + GradedSeries::a(),
            ..sample_entry()
        };
        assert!(matches!(
            BaseCaseTable::default().insert(entry),
            Err(BaseCaseError::UnexpectedATerms { n: 1 })
        ));
    }

    #[test]
    fn derive_on_trivial_ideal() {
        let d = CoxeterDegrees::new([0, 0, 0, 0]).unwrap();
        let r = derive_ft4_a0(&hilb_table(&d, 6), 6).unwrap();
        assert_eq!(r.series, GradedSeries::inv_one_minus_q(4));
        assert_eq!(r.shift, (0, 0));
    }

    #[test]
    fn derive_on_single_pair_ideal() {
        let d = CoxeterDegrees::new([0, 0, 1, 1]).unwrap();
        let r = derive_ft4_a0(&hilb_table(&d, 6), 6).unwrap();
        // q + t - qt, divided by its q^0 monomial t
        let want = GradedSeries::one() + GradedSeries::monomial(1, -1, 0) - GradedSeries::q();
        assert_eq!(r.series, want.div_one_minus_q(4));
        assert_eq!(r.shift, (0, -1));
        // stable under raising the order
        let r8 = derive_ft4_a0(&hilb_table(&d, 8), 8).unwrap();
        assert_eq!(r8.series, r.series);
    }

    #[test]
    fn derive_requires_enough_data() {
        let d = CoxeterDegrees::new([1, 1, 1, 1]).unwrap();
        let table = hilb_table(&d, 6);
        assert!(matches!(derive_ft4_a0(&table, 8), Err(BaseCaseError::InsufficientTable { .. })));
        assert!(matches!(derive_ft4_a0(&table, 6), Err(BaseCaseError::NotStabilized { .. })));
    }
}
