use std::collections::BTreeMap;

use hhh_core::ring::{CoeffTable, GradedSeries, LaurentPoly, Monomial};
use num_bigint::BigInt;
use proptest::prelude::*;

fn arb_poly() -> impl Strategy<Value = GradedSeries> {
    prop::collection::vec((-4i64..=4, 0u32..3, -3i32..4, 0u32..3), 0..6).prop_map(|terms| {
        terms.into_iter().fold(GradedSeries::zero(), |acc, (c, q, t, a)| {
            acc + GradedSeries::monomial(q, t, a) * GradedSeries::constant(c)
        })
    })
}

fn arb_series() -> impl Strategy<Value = GradedSeries> {
    (arb_poly(), 0u32..4).prop_map(|(x, e)| x.div_one_minus_q(e))
}

fn arb_monomial() -> impl Strategy<Value = Monomial> {
    (0u32..3, -3i32..4, 0u32..3).prop_map(|(q, t, a)| Monomial::new(q, t, a))
}

/// Power-series coefficients of `x` computed by repeated multiplication with
/// `1 + q + q^2 + ...`, truncated at `order`.
fn naive_expand(x: &GradedSeries, order: u32) -> BTreeMap<(u32, i32, u32), BigInt> {
    let mut cur: BTreeMap<(u32, i32, u32), BigInt> = BTreeMap::new();
    for (m, c) in x.numerator().terms() {
        if m.q <= order {
            *cur.entry((m.q, m.t, m.a)).or_default() += c;
        }
    }
    for _ in 0..x.denom_exp() {
        let mut next: BTreeMap<(u32, i32, u32), BigInt> = BTreeMap::new();
        for ((q, t, a), c) in &cur {
            for j in 0..=(order - q) {
                *next.entry((q + j, *t, *a)).or_default() += c;
            }
        }
        cur = next;
    }
    cur.retain(|_, v| *v != BigInt::from(0));
    cur
}

fn table_map(t: &CoeffTable) -> BTreeMap<(u32, i32, u32), BigInt> {
    t.entries().map(|(k, v)| (*k, v.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(x in arb_series(), y in arb_series(), z in arb_series()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &GradedSeries::zero(), x.clone());
        prop_assert_eq!(&x * &GradedSeries::one(), x.clone());
        prop_assert!((&x - &x).is_zero());
    }
}

proptest! {
    #[test]
    fn lifted_representation_canonicalizes(x in arb_series(), k in 0u32..4) {
        let mut num = x.numerator().clone();
        for _ in 0..k {
            num = num.mul_one_minus_q();
        }
        prop_assert_eq!(GradedSeries::new(num, x.denom_exp() + k), x);
    }

    #[test]
    fn canonical_numerator_is_not_divisible(x in arb_series()) {
        prop_assert!(x.denom_exp() == 0 || !x.numerator().divisible_by_one_minus_q());
    }

    #[test]
    fn geom_sum_telescopes(m in arb_monomial(), n in 0u32..=10) {
        let x = GradedSeries::from_poly(LaurentPoly::monomial(m, 1));
        let lhs = &GradedSeries::geom_sum(m, n) * &(&GradedSeries::one() - &x);
        prop_assert_eq!(lhs, &GradedSeries::one() - &x.pow(n));
    }

    #[test]
    fn expand_matches_naive_expansion(x in arb_series(), order in 0u32..8) {
        prop_assert_eq!(table_map(&x.expand(order)), naive_expand(&x, order));
    }

    #[test]
    fn expand_is_multiplicative(x in arb_series(), y in arb_series(), order in 0u32..8) {
        let lhs = (&x * &y).expand(order);
        let rhs = x.expand(order).convolve(&y.expand(order));
        prop_assert_eq!(table_map(&lhs), table_map(&rhs));
    }

    #[test]
    fn qta_image_has_even_t(m in arb_monomial()) {
        prop_assert_eq!(m.to_qta().t % 2, 0);
    }

    #[test]
    fn a0_specialization_is_a_homomorphism(x in arb_series(), y in arb_series()) {
        prop_assert_eq!((&x * &y).specialize_a0(), &x.specialize_a0() * &y.specialize_a0());
        prop_assert_eq!((&x + &y).specialize_a0(), &x.specialize_a0() + &y.specialize_a0());
        prop_assert!(!x.specialize_a0().has_a_terms());
    }

    #[test]
    fn canonical_text_round_trips(x in arb_series()) {
        let s = x.to_canonical_text();
        prop_assert_eq!(GradedSeries::parse_canonical_text(&s).unwrap(), x);
    }
}
