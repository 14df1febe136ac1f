//! The acceptance suite, runnable from the library, the CLI and the tests.
//!
//! Each criterion returns a verdict, a human-readable detail line, and the
//! deterministic output it produced (canonical series, table bodies,
//! reports). Criterion 8 reruns 1-7 under different schedules and cache
//! states and compares those outputs byte for byte.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cache::{sha256_hex, Store};
use crate::engine::{CoxeterDegrees, Engine, EvalMode, FamilyKey};
use crate::oracle::Oracle;
use crate::ring::GradedSeries;
use crate::torus_base::{self, derive_ft4_a0, BaseCaseTable};
use crate::verify::{closed_form_cross_checks, compare_with_ideal, positivity_check};

/// `a = 0` layers of `HHH(FT_4^n)`, `n = 1, 2, 3`, rebuilt from the oracle at
/// orders 11, 17 and 23 by `hhh basecase derive`.
pub const BUNDLED_A0: &str = include_str!("../data/ft4_a0.basecase");

pub fn bundled_a0_table() -> BaseCaseTable {
    BaseCaseTable::parse(BUNDLED_A0).expect("bundled base cases are valid")
}

/// Degrees compared against the oracle, with their `maxTotal`.
pub const ORACLE_GRID: [([u32; 4], u32); 10] = [
    ([0, 0, 0, 0], 8),
    ([0, 0, 1, 1], 8),
    ([0, 1, 1, 1], 8),
    ([0, 1, 2, 2], 8),
    ([0, 2, 2, 2], 8),
    ([1, 1, 1, 1], 8),
    ([1, 1, 2, 2], 8),
    ([0, 0, 0, 0], 10),
    ([0, 0, 1, 1], 10),
    ([0, 1, 1, 1], 10),
];

/// Stabilization order for the `n = 1` derivation.
pub const FT4_1_ORDER: u32 = 11;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub output: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {}: {} ({})",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail
        )
    }

    pub fn line_with_time(&self) -> String {
        format!("{} [{:.2?}]", self.line(), self.elapsed)
    }

    pub fn digest(&self) -> String {
        sha256_hex(&self.output)
    }
}

/// Execution settings; none of them may change any output.
#[derive(Clone, Default)]
pub struct Harness {
    pub parallel: bool,
    pub store: Option<Store>,
}

fn deg(d: [u32; 4]) -> CoxeterDegrees {
    CoxeterDegrees::new(d).expect("sorted degrees")
}

impl Harness {
    pub fn new(parallel: bool, store: Option<Store>) -> Self {
        Harness { parallel, store }
    }

    fn engine(&self, bases: BaseCaseTable) -> Engine {
        Engine::with_bases(bases).with_store(self.store.clone())
    }

    fn oracle(&self) -> Oracle {
        Oracle::new().with_store(self.store.clone()).parallel(self.parallel)
    }

    fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        if self.parallel {
            items.par_iter().map(f).collect()
        } else {
            items.iter().map(f).collect()
        }
    }

    /// Bundled `a0` base cases plus a fresh oracle derivation of `n = 1`; the
    /// two must agree.
    fn a0_bases(&self) -> Result<BaseCaseTable, String> {
        let mut t = bundled_a0_table();
        let d = deg([1, 1, 1, 1]);
        let table = self.oracle().hilb_table(&d, FT4_1_ORDER).map_err(|e| e.to_string())?;
        let r = derive_ft4_a0(&table, FT4_1_ORDER).map_err(|e| e.to_string())?;
        t.insert(r.into_entry(1)).map_err(|e| e.to_string())?;
        Ok(t)
    }

    pub fn run(&self, id: u8) -> CriterionResult {
        let start = Instant::now();
        let (name, res) = match id {
            1 => ("closed-form identities", self.c1()),
            2 => ("base-case consistency", self.c2()),
            3 => ("split-link factorization", self.c3()),
            4 => ("positivity certificates", self.c4()),
            5 => ("engine vs oracle", self.c5()),
            6 => ("a0 base-case reconstruction", self.c6()),
            7 => ("d4 irrelevance", self.c7()),
            8 => ("determinism", self.c8()),
            _ => ("unknown", Err(format!("no criterion {id}"))),
        };
        let elapsed = start.elapsed();
        let (pass, detail, output) = match res {
            Ok((pass, detail, output)) => (pass, detail, output),
            Err(e) => (false, e, String::new()),
        };
        CriterionResult {
            id,
            name,
            pass,
            detail,
            output,
            elapsed,
        }
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        (1..=8).map(|id| self.run(id)).collect()
    }

    fn c1(&self) -> Result<(bool, String, String), String> {
        let start = Instant::now();
        let r = closed_form_cross_checks(6);
        let fast = start.elapsed() < Duration::from_secs(1);
        let detail = format!("{} identities, {} failed, under 1 s: {fast}", r.checked, r.failures.len());
        Ok((r.pass() && fast, detail, r.to_text()))
    }

    fn c2(&self) -> Result<(bool, String, String), String> {
        let start = Instant::now();
        let e = self.engine(BaseCaseTable::default());
        let mut out = String::new();
        let mut ok = true;
        let closure = |i: i32| GradedSeries::monomial(0, i, 0) + GradedSeries::a();
        let one_minus_q = GradedSeries::one() - GradedSeries::q();
        for k in 0..=8 {
            let lhs = closure(2) * closure(1) * &one_minus_q * torus_base::ft2(k, EvalMode::FullA);
            let rhs = e.eval(FamilyKey::Ctw3 { n: 0, k }, EvalMode::FullA).map_err(|e| e.to_string())?;
            ok &= lhs == *rhs;
            let _ = write!(out, "Ctw3(0,{k})\n{}", rhs.to_canonical_text());
        }
        let step = closure(1).shift(0, -1) * (GradedSeries::one() + GradedSeries::a());
        for k in 1..=10 {
            let u = torus_base::u2(k, EvalMode::FullA);
            let prev = torus_base::u2(k - 1, EvalMode::FullA);
            ok &= &one_minus_q * &torus_base::ft2(k, EvalMode::FullA) == u;
            ok &= &u - &prev.shift(1, -1) == step;
            let _ = write!(out, "u({k})\n{}", u.to_canonical_text());
        }
        let fast = start.elapsed() < Duration::from_secs(1);
        Ok((ok && fast, format!("k <= 8 and k <= 10 exact, under 1 s: {fast}"), out))
    }

    fn c3(&self) -> Result<(bool, String, String), String> {
        let e = self.engine(BaseCaseTable::default());
        let unknot2 = (GradedSeries::one() + GradedSeries::a()).div_one_minus_q(1).pow(2);
        let ks: Vec<u32> = (0..=8).collect();
        let rows = self.map(&ks, |&k| {
            let v = e.hhh_coxeter(&deg([0, 0, k, k]), EvalMode::FullA)?;
            Ok::<_, crate::EngineError>((v == torus_base::ft2(k, EvalMode::FullA) * &unknot2, v))
        });
        let mut out = String::new();
        let mut ok = true;
        for (k, row) in ks.iter().zip(rows) {
            let (eq, v) = row.map_err(|e| e.to_string())?;
            ok &= eq;
            let _ = write!(out, "d 0 0 {k} {k}\n{}", v.to_canonical_text());
        }
        Ok((ok, "k <= 8".into(), out))
    }

    fn c4(&self) -> Result<(bool, String, String), String> {
        let mut cases: Vec<([u32; 4], EvalMode)> = Vec::new();
        for d2 in 0..=4 {
            for d3 in d2..=4 {
                cases.push(([0, d2, d3, d3], EvalMode::FullA));
            }
        }
        for d1 in 0..=3 {
            for d2 in d1..=3 {
                for d3 in d2..=3 {
                    cases.push(([d1, d2, d3, d3], EvalMode::A0));
                }
            }
        }
        let e = self.engine(self.a0_bases()?);
        let reports = self.map(&cases, |&(d, mode)| {
            let v = e.hhh_coxeter(&deg(d), mode)?;
            Ok::<_, crate::EngineError>(positivity_check(&format!("{} {mode}", deg(d)), &v, 12))
        });
        let mut out = String::new();
        let mut failed = 0;
        for r in reports {
            let r = r.map_err(|e| e.to_string())?;
            failed += usize::from(!r.pass);
            out.push_str(&r.to_text());
        }
        Ok((failed == 0, format!("{} series to order 12, {failed} failed", cases.len()), out))
    }

    fn c5(&self) -> Result<(bool, String, String), String> {
        let e = self.engine(self.a0_bases()?);
        let o = self.oracle();
        // The oracle parallelizes internally; cases run in order.
        let mut out = String::new();
        let mut failed = Vec::new();
        let mut shifts = std::collections::BTreeMap::new();
        for &(d, max) in ORACLE_GRID.iter() {
            let r = compare_with_ideal(&e, &o, &deg(d), max).map_err(|e| e.to_string())?;
            if !r.verdict {
                failed.push(format!("{:?}@{max}", d));
            }
            // the shift must not move when maxTotal grows
            if let Some(prev) = shifts.insert(d, r.shift) {
                if prev != r.shift {
                    failed.push(format!("{:?} shift {:?} vs {:?}", d, prev, r.shift));
                }
            }
            out.push_str(&r.to_text());
        }
        let detail = if failed.is_empty() {
            format!("{} comparisons", ORACLE_GRID.len())
        } else {
            format!("failed: {}", failed.join(", "))
        };
        Ok((failed.is_empty(), detail, out))
    }

    fn c6(&self) -> Result<(bool, String, String), String> {
        let o = self.oracle();
        let d = deg([1, 1, 1, 1]);
        let mut out = String::new();
        let table = o.hilb_table(&d, FT4_1_ORDER + 2).map_err(|e| e.to_string())?;
        let r = derive_ft4_a0(&table, FT4_1_ORDER).map_err(|e| e.to_string())?;
        let r2 = derive_ft4_a0(&table, FT4_1_ORDER + 2).map_err(|e| e.to_string())?;
        let idempotent = r.series == r2.series && r.shift == r2.shift;
        let mut bases = BaseCaseTable::default();
        bases.insert(r.clone().into_entry(1)).map_err(|e| e.to_string())?;
        let bundled = bundled_a0_table();
        let agrees_with_bundled = bundled.get(1, EvalMode::A0).map(|b| b.series == r.series).unwrap_or(false);
        let e = self.engine(bases.clone());
        let hhh = e.hhh_coxeter(&d, EvalMode::A0).map_err(|e| e.to_string())?;
        let ft4 = torus_base::ft4(1, EvalMode::A0, &bases).map_err(|e| e.to_string())?;
        let identical = hhh == ft4;
        let _ = write!(out, "ft4(1) a0 shift {:?}\n{}", r.shift, r.series.to_canonical_text());

        // Oracle grid: symmetry everywhere, monotonicity on comparable pairs.
        let grid: Vec<[u32; 4]> = ORACLE_GRID.iter().filter(|(_, m)| *m == 8).map(|(d, _)| *d).collect();
        let tables = grid
            .iter()
            .map(|&d| o.hilb_table(&deg(d), 8))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let mut symmetric = true;
        for t in &tables {
            symmetric &= t.dims.iter().all(|(&(p, r), &v)| t.get(r, p) == Some(v));
            out.push_str(&t.to_text());
        }
        let mut monotone = true;
        let mut pairs = 0;
        for (i, a) in grid.iter().enumerate() {
            for (j, b) in grid.iter().enumerate() {
                if i != j && (0..3).all(|k| a[k] <= b[k]) {
                    pairs += 1;
                    monotone &= tables[i].dims.iter().all(|(k, &v)| v >= tables[j].dims[k]);
                }
            }
        }
        let ok = idempotent && agrees_with_bundled && identical && symmetric && monotone;
        let detail = format!(
            "stabilized at {FT4_1_ORDER}, idempotent {idempotent}, matches bundled {agrees_with_bundled}, \
             hhh = ft4 {identical}, symmetric {symmetric}, monotone on {pairs} pairs {monotone}"
        );
        Ok((ok, detail, out))
    }

    fn c7(&self) -> Result<(bool, String, String), String> {
        let e = self.engine(self.a0_bases()?);
        let o = self.oracle();
        let mut out = String::new();
        let mut ok = true;
        let grid: Vec<[u32; 4]> = ORACLE_GRID.iter().filter(|(_, m)| *m == 8).map(|(d, _)| *d).collect();
        for d in grid {
            let mut far = d;
            far[3] += 2;
            let (a, b) = (deg(d), deg(far));
            ok &= Engine::trace(a.root_key()) == Engine::trace(b.root_key());
            let mut modes = vec![EvalMode::A0];
            if d[0] == 0 {
                modes.push(EvalMode::FullA);
            }
            for mode in modes {
                let x = e.hhh_coxeter(&a, mode).map_err(|e| e.to_string())?.to_canonical_text();
                let y = e.hhh_coxeter(&b, mode).map_err(|e| e.to_string())?.to_canonical_text();
                ok &= x == y;
                out.push_str(&x);
            }
            let x = o.hilb_table(&a, 8).map_err(|e| e.to_string())?.body_text();
            let y = o.hilb_table(&b, 8).map_err(|e| e.to_string())?.body_text();
            ok &= x == y;
            out.push_str(&x);
        }
        Ok((ok, "engine series, memo traces and oracle table bodies".into(), out))
    }

    /// Reruns 1-7 serially and in parallel, each with a cold and then a warm
    /// cache, and compares every output with this harness's own run.
    fn c8(&self) -> Result<(bool, String, String), String> {
        let reference: Vec<String> = (1..=7).map(|id| self.run(id).digest()).collect();
        let mut ok = true;
        let mut runs = 0;
        for parallel in [false, true] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let store = Store::open(dir.path()).map_err(|e| e.to_string())?;
            for _state in ["cold", "warm"] {
                let h = Harness::new(parallel, Some(store.clone()));
                let digests: Vec<String> = (1..=7).map(|id| h.run(id).digest()).collect();
                ok &= digests == reference;
                runs += 1;
            }
            ok &= !store.is_empty().map_err(|e| e.to_string())?;
        }
        Ok((ok, format!("{runs} reruns of criteria 1-7 byte-identical: {ok}"), reference.join("\n")))
    }
}
