#![allow(dead_code)]

use cumulant_poly::combinat::{indices_up_to, MultiIndex};
use cumulant_poly::cumulant::SequenceTable;
use cumulant_poly::ring::{ratio, Rational};
use cumulant_poly::series::TruncatedSeries;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn mi(entries: &[u32]) -> MultiIndex {
    MultiIndex::new(entries.to_vec())
}

/// A rational with small numerator and denominator, keeping exact test
/// arithmetic quick at order 6.
pub fn small_rational(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(-3..=3), rng.gen_range(1..=4))
}

pub fn random_cumulant_table(rng: &mut StdRng, d: usize, order: u32) -> SequenceTable<Rational> {
    let mut t = SequenceTable::cumulants(d, order).unwrap();
    for i in indices_up_to(d, order) {
        if i.is_zero() {
            continue;
        }
        if rng.gen_bool(0.8) {
            t.set(i, small_rational(rng)).unwrap();
        }
    }
    t
}

pub fn random_moment_table(rng: &mut StdRng, d: usize, order: u32) -> SequenceTable<Rational> {
    let mut t = SequenceTable::moments(d, order).unwrap();
    for i in indices_up_to(d, order) {
        if i.is_zero() {
            continue;
        }
        if rng.gen_bool(0.8) {
            t.set(i, small_rational(rng)).unwrap();
        }
    }
    t
}

pub fn random_delta_series(rng: &mut StdRng, d: usize, order: u32) -> TruncatedSeries<Rational> {
    let mut s = TruncatedSeries::new(d, order).unwrap();
    for i in indices_up_to(d, order) {
        if i.is_zero() {
            continue;
        }
        if rng.gen_bool(0.7) {
            s.set(i, small_rational(rng)).unwrap();
        }
    }
    s
}

/// A univariate delta series covering every order 1..=order, suitable as a
/// composition outer.
pub fn random_outer_series(rng: &mut StdRng, order: u32) -> TruncatedSeries<Rational> {
    let mut s = TruncatedSeries::new(1, order).unwrap();
    for j in 1..=order {
        s.set(mi(&[j]), small_rational(rng)).unwrap();
    }
    s
}
