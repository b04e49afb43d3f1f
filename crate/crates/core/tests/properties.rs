//! Property tests: ring axioms, inversion round trips, composition
//! associativity and enumeration canonicity on randomized inputs.

use cumulant_poly::combinat::{
    binomial, compositions, enumerate_integer_partitions, enumerate_partitions, indices_up_to,
    MultiIndex, MultiIndexPartition,
};
use cumulant_poly::ring::{rat_pow, ratio, Rational, SparsePoly};
use cumulant_poly::series::{compose_uni_outer, TruncatedSeries};
use num::bigint::BigInt;
use proptest::prelude::*;

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-3i64..=3, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

/// A delta series with the given shape, every coefficient randomized.
fn arb_delta_series(d: usize, order: u32) -> impl Strategy<Value = TruncatedSeries<Rational>> {
    let indices: Vec<MultiIndex> = indices_up_to(d, order)
        .into_iter()
        .filter(|i| !i.is_zero())
        .collect();
    let len = indices.len();
    proptest::collection::vec(arb_rational(), len).prop_map(move |values| {
        let mut s = TruncatedSeries::new(d, order).unwrap();
        for (i, v) in indices.iter().zip(values) {
            s.set(i.clone(), v).unwrap();
        }
        s
    })
}

fn arb_shape() -> impl Strategy<Value = (usize, u32)> {
    (1usize..=3, 2u32..=5)
}

fn arb_poly(nvars: usize, degree: u32) -> impl Strategy<Value = SparsePoly<Rational>> {
    let vars: Vec<String> = (0..nvars).map(|k| format!("x{k}")).collect();
    let monomials: Vec<MultiIndex> = indices_up_to(nvars, degree);
    let len = monomials.len();
    proptest::collection::vec(arb_rational(), len).prop_map(move |values| {
        let mut p = SparsePoly::zero_in(vars.clone());
        for (e, v) in monomials.iter().zip(values) {
            p.add_term(e.clone(), v);
        }
        p
    })
}

fn arb_multi_index() -> impl Strategy<Value = MultiIndex> {
    (1usize..=3).prop_flat_map(|d| {
        proptest::collection::vec(0u32..=3, d).prop_filter_map("nonzero index", |entries| {
            let i = MultiIndex::new(entries);
            (!i.is_zero() && i.total() <= 6).then_some(i)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exp_then_log_is_identity(f in arb_shape().prop_flat_map(|(d, o)| arb_delta_series(d, o))) {
        let round = f.exp().unwrap().log().unwrap();
        prop_assert_eq!(round, f);
    }

    #[test]
    fn log_then_exp_is_identity(f in arb_shape().prop_flat_map(|(d, o)| arb_delta_series(d, o))) {
        let mut unit = f.clone();
        unit.set(MultiIndex::zero(f.dim()), ratio(1, 1)).unwrap();
        let round = unit.log().unwrap().exp().unwrap();
        prop_assert_eq!(round, unit);
    }

    #[test]
    fn series_multiplication_is_commutative_and_associative(
        (f, g, h) in arb_shape().prop_flat_map(|(d, o)| {
            (arb_delta_series(d, o), arb_delta_series(d, o), arb_delta_series(d, o))
        })
    ) {
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(
            f.mul(&g).unwrap().mul(&h).unwrap(),
            f.mul(&g.mul(&h).unwrap()).unwrap()
        );
    }

    #[test]
    fn polynomial_ring_axioms(
        a in arb_poly(2, 2),
        b in arb_poly(2, 2),
        c in arb_poly(2, 2),
    ) {
        prop_assert_eq!(a.add_poly(&b).add_poly(&c), a.add_poly(&b.add_poly(&c)));
        prop_assert_eq!(a.mul_poly(&b), b.mul_poly(&a));
        prop_assert_eq!(
            a.mul_poly(&b).mul_poly(&c),
            a.mul_poly(&b.mul_poly(&c))
        );
        prop_assert_eq!(
            a.mul_poly(&b.add_poly(&c)),
            a.mul_poly(&b).add_poly(&a.mul_poly(&c))
        );
    }

    #[test]
    fn power_substitution_degenerates_to_evaluation(
        p in arb_poly(1, 4),
        x in arb_rational(),
    ) {
        let via_powers = p.umbral_substitute_power(|l| Some(rat_pow(&x, l))).unwrap();
        let direct = p.eval(std::slice::from_ref(&x)).unwrap();
        prop_assert_eq!(via_powers, direct);
    }

    #[test]
    fn outer_composition_is_associative(
        (g, h, f) in (1usize..=2, 2u32..=5).prop_flat_map(|(d, o)| {
            (arb_delta_series(1, o), arb_delta_series(1, o), arb_delta_series(d, o))
        })
    ) {
        let inner_first = compose_uni_outer(&g, &compose_uni_outer(&h, &f).unwrap()).unwrap();
        let outer_first = compose_uni_outer(&compose_uni_outer(&g, &h).unwrap(), &f).unwrap();
        prop_assert_eq!(inner_first, outer_first);
    }

    #[test]
    fn enumeration_is_canonical_and_duplicate_free(i in arb_multi_index()) {
        let parts = enumerate_partitions(&i).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for p in &parts {
            let rebuilt = MultiIndexPartition::new(i.clone(), p.parts().to_vec()).unwrap();
            prop_assert_eq!(&rebuilt, p);
            prop_assert!(seen.insert(format!("{p}")), "duplicate {}", p);
        }
        if i.dim() == 1 {
            prop_assert_eq!(parts.len(), enumerate_integer_partitions(i.get(0)).len());
        }
    }

    #[test]
    fn composition_counts_follow_stars_and_bars(
        i in arb_multi_index(),
        n in 1usize..=4,
    ) {
        prop_assume!(i.total() <= 5);
        let count = compositions(&i, n).unwrap().len();
        let expected: BigInt = i
            .entries()
            .iter()
            .map(|&e| binomial(e + n as u32 - 1, n as u32 - 1))
            .product();
        prop_assert_eq!(BigInt::from(count), expected);
    }
}
