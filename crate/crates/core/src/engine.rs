//! Memoized evaluation of the recursion families for 4-strand Coxeter braids.
//!
//! Every family node is expanded by [`Engine::step`] into a linear combination
//! of simpler nodes and leaf values (the closed `K_4`, `HHH(FT_2^k)`,
//! `HHH(FT_4^n)`, constants). Evaluation sums these with the node values taken
//! from a write-once [`MemoStore`].

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::cache::{sha256_hex, CacheKey, Store};
use crate::error::{CacheError, EngineError};
use crate::ring::{GradedSeries, Monomial};
use crate::torus_base::{self, BaseCaseTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvalMode {
    #[serde(rename = "fullA")]
    FullA,
    #[serde(rename = "a0")]
    A0,
}

impl EvalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EvalMode::FullA => "fullA",
            EvalMode::A0 => "a0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fullA" => Some(EvalMode::FullA),
            "a0" => Some(EvalMode::A0),
            _ => None,
        }
    }

    /// Applies the mode to a value computed with generic `a`.
    pub fn apply(self, x: GradedSeries) -> GradedSeries {
        match self {
            EvalMode::FullA => x,
            EvalMode::A0 => x.specialize_a0(),
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Degrees `0 <= d1 <= d2 <= d3 <= d4` of the braid
/// `FT_2^{d3-d2} FT_3^{d2-d1} FT_4^{d1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoxeterDegrees([u32; 4]);

impl CoxeterDegrees {
    pub fn new(d: [u32; 4]) -> Result<Self, EngineError> {
        if d.windows(2).all(|w| w[0] <= w[1]) {
            Ok(CoxeterDegrees(d))
        } else {
            Err(EngineError::InvalidDegrees(d))
        }
    }

    pub fn as_array(&self) -> [u32; 4] {
        self.0
    }

    pub fn d1(&self) -> u32 {
        self.0[0]
    }

    /// The `A` node whose closure, divided by `(1 - q)`, is this braid.
    pub fn root_key(&self) -> FamilyKey {
        let [d1, d2, d3, _] = self.0;
        FamilyKey::A {
            n: d1,
            m: d2 - d1,
            l: d3 - d2,
        }
    }
}

impl fmt::Display for CoxeterDegrees {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

/// A node of the recursion. `n` counts `FT_4` factors, `m` counts `FT_3`,
/// `l` counts `FT_2`; `k`/`j` count `sigma_3^2` twists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKey {
    /// `K_1 FT_2^l FT_3^m FT_4^n`
    A { n: u32, m: u32, l: u32 },
    /// `K_2 FT_3^m FT_4^n`
    B { n: u32, m: u32 },
    /// `sigma_2^2 B(n, m)`
    Btw2 { n: u32, m: u32 },
    /// `sigma_3^{2k} B(n, 0)`
    Btw3 { n: u32, k: u32 },
    /// `sigma_2^2 sigma_3^{2j} B(n, 0)`
    Btw23 { n: u32, j: u32 },
    /// `sigma_3^{2k} C(n)`, with `C(n) = K_3 FT_4^n`
    Ctw3 { n: u32, k: u32 },
    /// `JM~_3 sigma_3^{2k} C(n)`, `JM~_3 = sigma_3 sigma_2^2 sigma_3`
    Jmc { n: u32, k: u32 },
}

impl fmt::Display for FamilyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilyKey::A { n, m, l } => write!(f, "A({n},{m},{l})"),
            FamilyKey::B { n, m } => write!(f, "B({n},{m})"),
            FamilyKey::Btw2 { n, m } => write!(f, "Btw2({n},{m})"),
            FamilyKey::Btw3 { n, k } => write!(f, "Btw3({n},{k})"),
            FamilyKey::Btw23 { n, j } => write!(f, "Btw23({n},{j})"),
            FamilyKey::Ctw3 { n, k } => write!(f, "Ctw3({n},{k})"),
            FamilyKey::Jmc { n, k } => write!(f, "Jmc({n},{k})"),
        }
    }
}

/// Right-hand side summand of one recursion step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    One,
    K4,
    Ft2(u32),
    Ft4(u32),
    Node(FamilyKey),
}

#[derive(Clone, Debug)]
pub struct Step {
    pub parts: Vec<(GradedSeries, Term)>,
}

/// Write-once table of evaluated nodes.
#[derive(Default)]
pub struct MemoStore {
    map: RwLock<HashMap<(FamilyKey, EvalMode), Arc<GradedSeries>>>,
}

impl MemoStore {
    pub fn get(&self, key: FamilyKey, mode: EvalMode) -> Option<Arc<GradedSeries>> {
        self.map.read().unwrap().get(&(key, mode)).cloned()
    }

    /// Inserts unless present and returns the stored value. A different value
    /// for an existing key means evaluation is not deterministic.
    pub fn insert(&self, key: FamilyKey, mode: EvalMode, value: GradedSeries) -> Arc<GradedSeries> {
        let mut map = self.map.write().unwrap();
        let stored = map.entry((key, mode)).or_insert_with(|| Arc::new(value.clone()));
        assert_eq!(**stored, value, "memo conflict at {key} ({mode})");
        stored.clone()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn m(q: u32, t: i32) -> GradedSeries {
    GradedSeries::monomial(q, t, 0)
}

fn c(v: i64) -> GradedSeries {
    GradedSeries::constant(v)
}

/// `t^i + a`
fn closure_factor(i: i32) -> GradedSeries {
    m(0, i) + GradedSeries::a()
}

/// `HHH(K_4) = (t^3 + a)(t^2 + a)(t + a)(1 + a)`.
pub fn k4_closed() -> GradedSeries {
    closure_factor(3) * closure_factor(2) * closure_factor(1) * closure_factor(0)
}

pub struct Engine {
    memo: MemoStore,
    bases: RwLock<BaseCaseTable>,
    store: Option<Store>,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        Engine::with_bases(BaseCaseTable::default())
    }

    pub fn with_bases(bases: BaseCaseTable) -> Self {
        Engine {
            memo: MemoStore::default(),
            bases: RwLock::new(bases),
            store: None,
        }
    }

    /// Persists evaluated nodes in `store`, keyed also by the base-case table.
    pub fn with_store(mut self, store: Option<Store>) -> Self {
        self.store = store;
        self
    }

    fn cache_key(&self, key: FamilyKey, mode: EvalMode) -> CacheKey {
        let tag = sha256_hex(&self.bases().to_text());
        CacheKey::new(format!("engine/{}/{mode}/{key}", &tag[..16]))
    }

    pub fn memo(&self) -> &MemoStore {
        &self.memo
    }

    pub fn bases(&self) -> std::sync::RwLockReadGuard<'_, BaseCaseTable> {
        self.bases.read().unwrap()
    }

    /// Adds base-case entries. Existing entries are never replaced.
    /// Memoized values do not depend on entries that were absent before, since
    /// evaluation through a missing entry fails without memoizing.
    pub fn merge_bases(&self, other: &BaseCaseTable) -> Result<(), crate::error::BaseCaseError> {
        self.bases.write().unwrap().merge(other)
    }

    /// The recursion step for `key`; coefficients already specialized to `mode`.
    pub fn step(key: FamilyKey, mode: EvalMode) -> Step {
        use FamilyKey::*;
        use Term::*;
        let a = GradedSeries::a;
        let parts: Vec<(GradedSeries, Term)> = match key {
            Ctw3 { n, k } => {
                // t^-3 (1 - (qt^-3)^n)/(1 - qt^-3) K_4 + (qt^-3)^n (t^2+a)(t+a)(1-q) FT_2^k
                let geo = GradedSeries::geom_sum(Monomial::new(1, -3, 0), n).shift(0, -3);
                let tail = (closure_factor(2) * closure_factor(1) * (c(1) - m(1, 0))).shift(n, -3 * n as i32);
                vec![(geo, K4), (tail, Ft2(k))]
            }
            Jmc { n: 0, k } => {
                let head = closure_factor(2).shift(0, -2) * closure_factor(2) * closure_factor(1) * closure_factor(0);
                let tail = (closure_factor(2) * closure_factor(1) * (c(1) - m(1, 0))).shift(1, -2);
                vec![(head, One), (tail, Ft2(k))]
            }
            Jmc { n, k } => vec![(m(0, -3), K4), (m(1, -3), Node(Jmc { n: n - 1, k }))],
            Btw3 { n: 0, k } => vec![(closure_factor(1) * closure_factor(0), Ft2(k))],
            Btw3 { n, k } => vec![
                (m(0, -2), Node(Ctw3 { n, k })),
                (m(1, -4), Node(Ctw3 { n: n - 1, k: k + 1 })),
                (m(2, -4), Node(Btw3 { n: n - 1, k: k + 1 })),
            ],
            Btw23 { n: 0, j } => {
                // (t+a) t^-1 [(t+a)(1-q) + q(1+a)]
                let inner = closure_factor(1) * (c(1) - m(1, 0)) + m(1, 0) * (c(1) + a());
                (vec![(closure_factor(1).shift(0, -1) * inner, Ft2(j))]) as Vec<_>
            }
            Btw23 { n, j } => vec![
                (m(0, -2), Node(Ctw3 { n, k: j })),
                (m(1, -4), Node(Jmc { n: n - 1, k: j })),
                (m(2, -4), Node(Btw23 { n: n - 1, j: j + 1 })),
            ],
            B { n, m: 0 } => vec![(c(1), Node(Btw3 { n, k: 0 }))],
            B { n, m: mm } => vec![
                (m(0, -2), Node(Ctw3 { n, k: 0 })),
                (m(1, -2), Node(B { n, m: mm - 1 })),
            ],
            Btw2 { n, m: 0 } => vec![(c(1), Node(Btw23 { n, j: 0 }))],
            Btw2 { n, m: mm } => vec![
                (m(0, -2), Node(Ctw3 { n, k: 0 })),
                (m(1, -2), Node(Btw2 { n, m: mm - 1 })),
            ],
            A { n, m: 0, l: 0 } => vec![(c(1) - m(1, 0), Ft4(n))],
            A { n, m: mm, l: 0 } => vec![
                (m(0, -1), Node(B { n, m: mm })),
                (m(1, -2), Node(Btw2 { n, m: mm - 1 })),
                (m(2, -3), Node(B { n, m: mm - 1 })),
                (m(3, -3), Node(A { n, m: mm - 1, l: 0 })),
            ],
            A { n, m: mm, l } => vec![
                (m(0, -1), Node(B { n, m: mm })),
                (m(1, -1), Node(A { n, m: mm, l: l - 1 })),
            ],
        };
        Step {
            parts: parts.into_iter().map(|(coef, term)| (mode.apply(coef), term)).collect(),
        }
    }

    fn term_value(&self, term: Term, mode: EvalMode) -> Result<Arc<GradedSeries>, EngineError> {
        Ok(match term {
            Term::One => Arc::new(GradedSeries::one()),
            Term::K4 => Arc::new(mode.apply(k4_closed())),
            Term::Ft2(k) => Arc::new(torus_base::ft2(k, mode)),
            Term::Ft4(n) => Arc::new(torus_base::ft4(n, mode, &self.bases())?),
            Term::Node(key) => self.eval(key, mode)?,
        })
    }

    /// Value of a family node.
    pub fn eval(&self, key: FamilyKey, mode: EvalMode) -> Result<Arc<GradedSeries>, EngineError> {
        if let Some(v) = self.memo.get(key, mode) {
            return Ok(v);
        }
        let ckey = self.store.as_ref().map(|_| self.cache_key(key, mode));
        if let (Some(store), Some(ck)) = (&self.store, &ckey) {
            if let Some(text) = store.get(ck)? {
                let v = GradedSeries::parse_canonical_text(&text).map_err(|e| CacheError::CorruptEntry {
                    key: ck.as_str().to_string(),
                    reason: e.to_string(),
                })?;
                return Ok(self.memo.insert(key, mode, v));
            }
        }
        let step = Engine::step(key, mode);
        let mut acc = GradedSeries::zero();
        for (coef, term) in &step.parts {
            let v = self.term_value(*term, mode)?;
            acc = acc + coef * &*v;
        }
        if let (Some(store), Some(ck)) = (&self.store, &ckey) {
            store.put(ck, &acc.to_canonical_text())?;
        }
        Ok(self.memo.insert(key, mode, acc))
    }

    /// `HHH(beta(d1, d2, d3, d4))`.
    pub fn hhh_coxeter(&self, d: &CoxeterDegrees, mode: EvalMode) -> Result<GradedSeries, EngineError> {
        Ok(self.eval(d.root_key(), mode)?.div_one_minus_q(1))
    }

    /// Every node and leaf reached from `root`, in sorted order.
    pub fn trace(root: FamilyKey) -> BTreeSet<Term> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![Term::Node(root)];
        while let Some(term) = stack.pop() {
            if !seen.insert(term) {
                continue;
            }
            if let Term::Node(key) = term {
                for (_, child) in Engine::step(key, EvalMode::FullA).parts {
                    stack.push(child);
                }
            }
        }
        seen
    }

    /// `sigma_3^{2k} C(n)` by unrolling `C(n) = t^-3 K_4 + q t^-3 C(n-1)` down to
    /// the twisted base `(t^2+a)(t+a)(1-q) HHH(FT_2^k)`.
    pub fn ctw3_by_recursion(n: u32, k: u32, mode: EvalMode) -> GradedSeries {
        let base = mode.apply(closure_factor(2) * closure_factor(1) * (c(1) - m(1, 0))) * torus_base::ft2(k, mode);
        let k4 = mode.apply(k4_closed());
        (0..n).fold(base, |prev, _| k4.shift(0, -3) + prev.shift(1, -3))
    }

    /// `C(n)` from its closed form with the untwisted base
    /// `(t^2+a)(t+a)(1+a)^2/(1-q)`.
    pub fn c_closed_form(n: u32, mode: EvalMode) -> GradedSeries {
        let geo = GradedSeries::geom_sum(Monomial::new(1, -3, 0), n).shift(0, -3);
        let base = (closure_factor(2) * closure_factor(1) * closure_factor(0).pow(2)).div_one_minus_q(1);
        mode.apply(geo * k4_closed() + base.shift(n, -3 * n as i32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_base::ft2;

    fn a() -> GradedSeries {
        GradedSeries::a()
    }
    fn t(e: i32) -> GradedSeries {
        m(0, e)
    }
    fn one_plus_a() -> GradedSeries {
        c(1) + a()
    }
    fn full(engine: &Engine, key: FamilyKey) -> GradedSeries {
        (*engine.eval(key, EvalMode::FullA).unwrap()).clone()
    }

    #[test]
    fn k4_closed_examples() {
        let k4 = k4_closed();
        // 2^4 products before collection; the a^2 t^3 term collects two of them
        assert_eq!(k4.numerator().len(), 15);
        assert_eq!(k4.specialize_a0(), t(6));
        let chain = one_plus_a() * (1..=3).map(closure_factor).fold(c(1), |acc, f| acc * f);
        assert_eq!(k4, chain);
    }

    #[test]
    fn ctw3_examples() {
        let e = Engine::new();
        let c00 = (closure_factor(2) * closure_factor(1) * one_plus_a().pow(2)).div_one_minus_q(1);
        assert_eq!(full(&e, FamilyKey::Ctw3 { n: 0, k: 0 }), c00);
        let want = k4_closed().shift(0, -3) + c00.shift(1, -3);
        assert_eq!(full(&e, FamilyKey::Ctw3 { n: 1, k: 0 }), want);
        let want = closure_factor(2) * closure_factor(1) * (c(1) - m(1, 0)) * ft2(2, EvalMode::FullA);
        assert_eq!(full(&e, FamilyKey::Ctw3 { n: 0, k: 2 }), want);
    }

    #[test]
    fn jmc_examples() {
        let e = Engine::new();
        for k in 0..3 {
            let base = t(-2)
                * closure_factor(2)
                * (closure_factor(2) * closure_factor(1) * one_plus_a()
                    + m(1, 0) * closure_factor(1) * (c(1) - m(1, 0)) * ft2(k, EvalMode::FullA));
            assert_eq!(full(&e, FamilyKey::Jmc { n: 0, k }), base);
            let step = k4_closed().shift(0, -3) + base.shift(1, -3);
            assert_eq!(full(&e, FamilyKey::Jmc { n: 1, k }), step);
        }
        let want = t(-2)
            * closure_factor(2)
            * closure_factor(1)
            * (closure_factor(2) * one_plus_a() + m(1, 0) * one_plus_a().pow(2).div_one_minus_q(1));
        assert_eq!(full(&e, FamilyKey::Jmc { n: 0, k: 0 }), want);
    }

    #[test]
    fn btw3_examples() {
        let e = Engine::new();
        let b00 = (closure_factor(1) * one_plus_a().pow(3)).div_one_minus_q(2);
        assert_eq!(full(&e, FamilyKey::Btw3 { n: 0, k: 0 }), b00);
        for k in 0..3 {
            let want = closure_factor(1) * one_plus_a() * ft2(k, EvalMode::FullA);
            assert_eq!(full(&e, FamilyKey::Btw3 { n: 0, k }), want);
        }
        let want = t(-2) * full(&e, FamilyKey::Ctw3 { n: 1, k: 0 })
            + m(1, -4) * full(&e, FamilyKey::Ctw3 { n: 0, k: 1 })
            + m(2, -4) * closure_factor(1) * one_plus_a() * ft2(1, EvalMode::FullA);
        assert_eq!(full(&e, FamilyKey::Btw3 { n: 1, k: 0 }), want);
    }

    #[test]
    fn btw23_examples() {
        let e = Engine::new();
        let factor = closure_factor(1) * t(-1) * (closure_factor(1) * (c(1) - m(1, 0)) + m(1, 0) * one_plus_a());
        for j in 0..3 {
            assert_eq!(full(&e, FamilyKey::Btw23 { n: 0, j }), &factor * &ft2(j, EvalMode::FullA));
        }
        let want = t(-2) * full(&e, FamilyKey::Ctw3 { n: 1, k: 0 })
            + m(1, -4) * full(&e, FamilyKey::Jmc { n: 0, k: 0 })
            + m(2, -4) * full(&e, FamilyKey::Btw23 { n: 0, j: 1 });
        assert_eq!(full(&e, FamilyKey::Btw23 { n: 1, j: 0 }), want);
        for n in 0..3 {
            assert_eq!(
                full(&e, FamilyKey::Btw23 { n, j: 0 }),
                full(&e, FamilyKey::Btw2 { n, m: 0 })
            );
        }
    }

    #[test]
    fn b_family_examples() {
        let e = Engine::new();
        let c00 = (closure_factor(2) * closure_factor(1) * one_plus_a().pow(2)).div_one_minus_q(1);
        let b00 = (closure_factor(1) * one_plus_a().pow(3)).div_one_minus_q(2);
        assert_eq!(full(&e, FamilyKey::B { n: 0, m: 0 }), b00);
        assert_eq!(full(&e, FamilyKey::B { n: 0, m: 1 }), t(-2) * c00 + m(1, -2) * b00);
        for n in 0..3 {
            assert_eq!(full(&e, FamilyKey::B { n, m: 0 }), full(&e, FamilyKey::Btw3 { n, k: 0 }));
        }
        let btw2_01 = t(-2) * full(&e, FamilyKey::Ctw3 { n: 0, k: 0 })
            + m(1, -2) * full(&e, FamilyKey::Btw23 { n: 0, j: 0 });
        assert_eq!(full(&e, FamilyKey::Btw2 { n: 0, m: 1 }), btw2_01);
        let factor = closure_factor(1) * t(-1) * (closure_factor(1) * (c(1) - m(1, 0)) + m(1, 0) * one_plus_a());
        assert_eq!(
            full(&e, FamilyKey::Btw2 { n: 0, m: 0 }),
            factor * one_plus_a().pow(2).div_one_minus_q(2)
        );
    }

    #[test]
    fn a_family_examples() {
        let e = Engine::new();
        let a000 = one_plus_a().pow(4).div_one_minus_q(3);
        assert_eq!(full(&e, FamilyKey::A { n: 0, m: 0, l: 0 }), a000);
        let b00 = (closure_factor(1) * one_plus_a().pow(3)).div_one_minus_q(2);
        assert_eq!(full(&e, FamilyKey::A { n: 0, m: 0, l: 1 }), t(-1) * &b00 + m(1, -1) * &a000);
        let want = t(-1) * full(&e, FamilyKey::B { n: 0, m: 1 })
            + m(1, -2) * full(&e, FamilyKey::Btw2 { n: 0, m: 0 })
            + m(2, -3) * b00
            + m(3, -3) * a000;
        assert_eq!(full(&e, FamilyKey::A { n: 0, m: 1, l: 0 }), want);
    }

    #[test]
    fn hhh_coxeter_examples() {
        let e = Engine::new();
        let unknot = one_plus_a().div_one_minus_q(1);
        let d = CoxeterDegrees::new([0, 0, 0, 0]).unwrap();
        assert_eq!(e.hhh_coxeter(&d, EvalMode::FullA).unwrap(), unknot.pow(4));
        for k in 0..4 {
            let d = CoxeterDegrees::new([0, 0, k, k + 1]).unwrap();
            assert_eq!(
                e.hhh_coxeter(&d, EvalMode::FullA).unwrap(),
                ft2(k, EvalMode::FullA) * unknot.pow(2)
            );
        }
        assert!(matches!(
            CoxeterDegrees::new([2, 1, 3, 3]),
            Err(EngineError::InvalidDegrees(_))
        ));
    }

    #[test]
    fn missing_base_case_is_reported() {
        let e = Engine::new();
        let d = CoxeterDegrees::new([1, 1, 1, 1]).unwrap();
        assert!(matches!(
            e.hhh_coxeter(&d, EvalMode::FullA),
            Err(EngineError::MissingBaseCase { n: 1, mode: EvalMode::FullA })
        ));
        assert!(matches!(
            e.hhh_coxeter(&d, EvalMode::A0),
            Err(EngineError::MissingBaseCase { n: 1, mode: EvalMode::A0 })
        ));
    }

    #[test]
    fn ctw3_closed_form_matches_recursion() {
        let e = Engine::new();
        for mode in [EvalMode::FullA, EvalMode::A0] {
            for n in 0..=6 {
                for k in 0..=6 {
                    assert_eq!(
                        *e.eval(FamilyKey::Ctw3 { n, k }, mode).unwrap(),
                        Engine::ctw3_by_recursion(n, k, mode),
                        "Ctw3({n},{k}) {mode}"
                    );
                }
                assert_eq!(*e.eval(FamilyKey::Ctw3 { n, k: 0 }, mode).unwrap(), Engine::c_closed_form(n, mode));
            }
        }
    }

    #[test]
    fn a0_mode_commutes_with_specialization() {
        let e = Engine::new();
        for d2 in 0..=4 {
            for d3 in d2..=4 {
                let d = CoxeterDegrees::new([0, d2, d3, d3]).unwrap();
                for term in Engine::trace(d.root_key()) {
                    if let Term::Node(key) = term {
                        let f = e.eval(key, EvalMode::FullA).unwrap().specialize_a0();
                        assert_eq!(f, *e.eval(key, EvalMode::A0).unwrap(), "{key}");
                    }
                }
            }
        }
    }

    #[test]
    fn trace_ignores_d4() {
        for d in [[0, 1, 2, 2], [0, 0, 3, 3], [1, 1, 2, 2]] {
            let mut d2 = d;
            d2[3] += 2;
            let a = CoxeterDegrees::new(d).unwrap();
            let b = CoxeterDegrees::new(d2).unwrap();
            assert_eq!(Engine::trace(a.root_key()), Engine::trace(b.root_key()));
        }
    }

    #[test]
    fn concurrent_evaluation_is_deterministic() {
        use rayon::prelude::*;
        let shared = Engine::new();
        let keys: Vec<FamilyKey> = (0..4)
            .flat_map(|n| (0..3).flat_map(move |m| (0..3).map(move |l| FamilyKey::A { n: 0, m: m + n, l })))
            .collect();
        let par: Vec<String> = keys
            .par_iter()
            .map(|&k| shared.eval(k, EvalMode::FullA).unwrap().to_canonical_text())
            .collect();
        let serial = Engine::new();
        let ser: Vec<String> = keys
            .iter()
            .rev()
            .map(|&k| serial.eval(k, EvalMode::FullA).unwrap().to_canonical_text())
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .collect();
        assert_eq!(par, ser);
    }
}
