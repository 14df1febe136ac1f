//! Engine/oracle comparison, positivity certificates and closed-form checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::engine::{k4_closed, CoxeterDegrees, Engine, EvalMode, FamilyKey};
use crate::error::VerifyError;
use crate::oracle::{BidegreeTable, Oracle};
use crate::ring::{binomial, GradedSeries};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityReport {
    pub label: String,
    pub order: u32,
    /// Smallest expansion coefficient, `0` for the zero series.
    #[serde(serialize_with = "as_string")]
    pub min_coefficient: BigInt,
    pub pass: bool,
}

fn as_string<S: serde::Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl PositivityReport {
    pub fn to_text(&self) -> String {
        format!(
            "positivity {} order {} min {} {}\n",
            self.label,
            self.order,
            self.min_coefficient,
            verdict(self.pass)
        )
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

pub fn positivity_check(label: &str, x: &GradedSeries, order: u32) -> PositivityReport {
    let min = x.expand(order).min_coefficient();
    PositivityReport {
        label: label.to_string(),
        order,
        pass: !min.is_negative(),
        min_coefficient: min,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    /// Oracle-side bidegree; may be negative for engine terms mapped outside
    /// the quadrant.
    pub p: i64,
    pub r: i64,
    #[serde(serialize_with = "as_string")]
    pub engine: BigInt,
    #[serde(serialize_with = "as_string")]
    pub oracle: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub d: [u32; 4],
    #[serde(rename = "maxTotal")]
    pub max_total: u32,
    /// `(q, t)` exponents of the monomial `m` with `engine = m * oracle`.
    pub shift: (i64, i64),
    pub verdict: bool,
    pub mismatches: Vec<Mismatch>,
}

impl MatchReport {
    pub fn to_text(&self) -> String {
        let [d1, d2, d3, d4] = self.d;
        let mut s = format!(
            "match d {d1} {d2} {d3} {d4} max {} shift q^{} t^{} {}\n",
            self.max_total,
            self.shift.0,
            self.shift.1,
            verdict(self.verdict)
        );
        for m in &self.mismatches {
            let _ = writeln!(s, "mismatch {} {} engine {} oracle {}", m.p, m.r, m.engine, m.oracle);
        }
        s
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::json!({
            "d": self.d,
            "maxTotal": self.max_total,
            "shift": {"q": self.shift.0, "t": self.shift.1},
            "verdict": verdict(self.verdict),
            "mismatches": self.mismatches,
        });
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

/// Coefficient of `q^j` in `(1 - q)^-e`.
fn inv_one_minus_coeff(e: u32, j: u32) -> BigInt {
    if e == 0 {
        BigInt::from((j == 0) as u8)
    } else {
        binomial(e - 1 + j, j)
    }
}

/// Bigraded expansion of `t^sigma * x / (1 - t)^4` for an `a`-free series.
struct EngineSide {
    terms: BTreeMap<(u32, i32), BigInt>,
    denom: u32,
    sigma: i32,
}

impl EngineSide {
    fn new(x: &GradedSeries) -> Self {
        let sigma = x.min_t().map(|m| (-m).max(0)).unwrap_or(0);
        EngineSide {
            terms: x.terms_by_q_t(),
            denom: x.denom_exp(),
            sigma,
        }
    }

    fn coeff(&self, p: u32, r: u32) -> BigInt {
        let mut acc = BigInt::zero();
        for (&(q, t), c) in &self.terms {
            let t = t + self.sigma;
            if q > p || t > r as i32 {
                continue;
            }
            let dr = r - t as u32;
            acc += c * inv_one_minus_coeff(self.denom, p - q) * binomial(dr + 3, 3);
        }
        acc
    }
}

fn lex_min_nonzero(entries: impl Iterator<Item = ((u32, u32), bool)>) -> Option<(u32, u32)> {
    entries.filter(|(_, nz)| *nz).map(|(k, _)| k).min()
}

/// Compares `HHH^{a=0}(beta(d)) / (1 - t)^4` with the Hilbert table of `J(d)`
/// on every bidegree of total degree `<= max_total`, up to one monomial.
pub fn compare_with_ideal(
    engine: &Engine,
    oracle: &Oracle,
    d: &CoxeterDegrees,
    max_total: u32,
) -> Result<MatchReport, VerifyError> {
    let series = engine.hhh_coxeter(d, EvalMode::A0)?;
    let table = oracle.hilb_table(d, max_total)?;
    Ok(compare_tables(&series, &table))
}

fn bidegrees(max_total: u32) -> impl Iterator<Item = (u32, u32)> {
    (0..=max_total).flat_map(|s| (0..=s).map(move |p| (p, s - p)))
}

/// The comparison behind [`compare_with_ideal`], on precomputed inputs.
pub fn compare_tables(series: &GradedSeries, table: &BidegreeTable) -> MatchReport {
    let max_total = table.max_total;
    let side = EngineSide::new(series);
    let engine_min = lex_min_nonzero(bidegrees(max_total).map(|(p, r)| ((p, r), !side.coeff(p, r).is_zero())));
    let oracle_min = lex_min_nonzero(table.dims.iter().map(|(&k, &v)| (k, v != 0)));
    let mut report = MatchReport {
        d: table.degrees,
        max_total,
        shift: (0, 0),
        verdict: false,
        mismatches: Vec::new(),
    };
    let (Some(em), Some(om)) = (engine_min, oracle_min) else {
        // Both sides vanish in range: nothing to align, nothing to disagree on.
        report.verdict = engine_min.is_none() && oracle_min.is_none();
        return report;
    };
    // oracle(p, r) = engine(p - dq, r - dt)
    let dq = om.0 as i64 - em.0 as i64;
    let dt = om.1 as i64 - em.1 as i64;
    report.shift = (-dq, -(dt + side.sigma as i64));
    for (p, r) in bidegrees(max_total) {
        let oracle_v = BigInt::from(table.get(p, r).unwrap_or(0));
        let (ep, er) = (p as i64 - dq, r as i64 - dt);
        let engine_v = if ep < 0 || er < 0 {
            BigInt::zero()
        } else {
            side.coeff(ep as u32, er as u32)
        };
        if engine_v != oracle_v {
            report.mismatches.push(Mismatch {
                p: p as i64,
                r: r as i64,
                engine: engine_v,
                oracle: oracle_v,
            });
        }
    }
    // Engine terms that land outside the quadrant once shifted.
    for (p, r) in bidegrees(max_total) {
        let (op, or) = (p as i64 + dq, r as i64 + dt);
        if op >= 0 && or >= 0 {
            continue;
        }
        let v = side.coeff(p, r);
        if !v.is_zero() {
            report.mismatches.push(Mismatch {
                p: op,
                r: or,
                engine: v,
                oracle: BigInt::zero(),
            });
        }
    }
    report.verdict = report.mismatches.is_empty();
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityFailure {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub checked: usize,
    pub failures: Vec<IdentityFailure>,
}

impl CrossCheckReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, name: impl FnOnce() -> String, lhs: &GradedSeries, rhs: &GradedSeries) {
        self.checked += 1;
        if lhs != rhs {
            self.failures.push(IdentityFailure {
                name: name(),
                lhs: lhs.to_canonical_text(),
                rhs: rhs.to_canonical_text(),
            });
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("identities {} checked {}\n", self.checked, verdict(self.pass()));
        for f in &self.failures {
            let _ = write!(s, "failed {}\nlhs\n{}rhs\n{}", f.name, f.lhs, f.rhs);
        }
        s
    }
}

/// Internal consistency of the closed forms for `n, k <= max`:
/// the `K_4` closure product, `C(n)` and `sigma_3^{2k} C(n)` against their
/// recursions, and the one-step against the two-step form of `Btw3`.
pub fn closed_form_cross_checks(max: u32) -> CrossCheckReport {
    let engine = Engine::new();
    let mut report = CrossCheckReport::default();
    let closure = |i: i32| GradedSeries::monomial(0, i, 0) + GradedSeries::a();
    let product = (1..=3).fold(closure(0), |acc, i| acc * closure(i));
    report.check(|| "K4 closure product".into(), &k4_closed(), &product);
    let t = |e: i32| GradedSeries::monomial(0, e, 0);
    let qt = |e: i32| GradedSeries::monomial(1, e, 0);
    for mode in [EvalMode::FullA, EvalMode::A0] {
        let ev = |key: FamilyKey| -> GradedSeries {
            (*engine.eval(key, mode).expect("no FT4 base case on this path")).clone()
        };
        for n in 0..=max {
            report.check(
                || format!("C({n}) closed form ({mode})"),
                &ev(FamilyKey::Ctw3 { n, k: 0 }),
                &Engine::c_closed_form(n, mode),
            );
            for k in 0..=max {
                report.check(
                    || format!("Ctw3({n},{k}) closed form vs recursion ({mode})"),
                    &ev(FamilyKey::Ctw3 { n, k }),
                    &Engine::ctw3_by_recursion(n, k, mode),
                );
                if n >= 1 {
                    let one_step = t(-2) * ev(FamilyKey::Ctw3 { n, k })
                        + qt(-2)
                            * (t(-2) * ev(FamilyKey::Ctw3 { n: n - 1, k: k + 1 })
                                + qt(-2) * ev(FamilyKey::Btw3 { n: n - 1, k: k + 1 }));
                    report.check(
                        || format!("Btw3({n},{k}) one-step vs two-step ({mode})"),
                        &one_step,
                        &ev(FamilyKey::Btw3 { n, k }),
                    );
                }
            }
        }
    }
    report
}
