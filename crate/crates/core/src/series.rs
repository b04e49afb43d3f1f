//! Truncated multivariate formal power series in exponential format and
//! their algebra: sum, product, exp, log, outer composition and Taylor
//! re-centering.
//!
//! A series stores coefficients a_i of sum a_i z^i / i! for all |i| <= D.
//! Missing keys mean zero. Binary operations truncate to the minimum of the
//! operand orders, which is exact for every retained total degree. The
//! constant term is stored as-is; delta-ness (zero constant term) is checked
//! per operation, so the two bookkeeping conventions of generating functions
//! (constant 1) and cumulant generating functions (constant 0) never mix
//! inside the kernel.

use std::collections::BTreeMap;

use crate::combinat::{indices_of_degree, multi_binomial, sub_indices, MultiIndex};
use crate::error::{Error, Result};
use crate::ring::{rat_pow, CoeffRing, Rational};

#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedSeries<C: CoeffRing = Rational> {
    dim: usize,
    order: u32,
    coeffs: BTreeMap<MultiIndex, C>,
}

impl<C: CoeffRing> TruncatedSeries<C> {
    /// The zero series of the given dimension and truncation order.
    pub fn new(dim: usize, order: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "series dimension must be >= 1".into(),
            ));
        }
        Ok(TruncatedSeries {
            dim,
            order,
            coeffs: BTreeMap::new(),
        })
    }

    /// The multiplicative identity (a_0 = 1).
    pub fn one(dim: usize, order: u32) -> Result<Self> {
        let mut s = Self::new(dim, order)?;
        s.set(MultiIndex::zero(dim), C::one())?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn set(&mut self, index: MultiIndex, value: C) -> Result<()> {
        if index.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: index.dim(),
            });
        }
        if index.total() > self.order {
            return Err(Error::InvalidParameter(format!(
                "index {index} exceeds truncation order {}",
                self.order
            )));
        }
        if value.is_zero() {
            self.coeffs.remove(&index);
        } else {
            self.coeffs.insert(index, value);
        }
        Ok(())
    }

    pub fn add_to(&mut self, index: MultiIndex, value: C) -> Result<()> {
        let updated = self.coeff(&index).add(&value);
        self.set(index, updated)
    }

    /// Coefficient at `index`; zero for any index not stored.
    pub fn coeff(&self, index: &MultiIndex) -> C {
        self.coeffs.get(index).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&MultiIndex::zero(self.dim))
    }

    /// A delta series has zero constant term and is the only admissible
    /// inner argument of a composition.
    pub fn is_delta(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.coeffs.iter()
    }

    /// Drops coefficients above `order`.
    pub fn truncated(&self, order: u32) -> Self {
        let mut out = self.clone();
        out.order = order.min(self.order);
        out.coeffs.retain(|i, _| i.total() <= out.order);
        out
    }

    fn common_shape(&self, rhs: &Self) -> Result<(usize, u32)> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok((self.dim, self.order.min(rhs.order)))
    }

    /// Coefficientwise sum, truncated to the minimum order.
    pub fn add(&self, rhs: &Self) -> Result<Self> {
        let (dim, order) = self.common_shape(rhs)?;
        let mut out = Self::new(dim, order)?;
        for (i, c) in self.coeffs.iter().chain(rhs.coeffs.iter()) {
            if i.total() <= order {
                out.add_to(i.clone(), c.clone())?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    /// Scalar multiple by an exact rational.
    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.scale(r);
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    /// Coefficientwise multiple by a ring element.
    pub fn scale_by(&self, value: &C) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.mul(value);
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        out
    }

    /// Exponential-format product: h_i = sum_{j <= i} binom(i; j) f_j g_{i-j}.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let (dim, order) = self.common_shape(rhs)?;
        let mut out = Self::new(dim, order)?;
        for (a, ca) in &self.coeffs {
            if a.total() > order {
                continue;
            }
            for (b, cb) in &rhs.coeffs {
                if a.total() + b.total() > order {
                    continue;
                }
                let i = a.add(b);
                let w = Rational::from(multi_binomial(&i, a));
                out.add_to(i, ca.mul(cb).scale(&w))?;
            }
        }
        Ok(out)
    }

    /// Coefficients of exp(f) for a delta series f, via the derivative
    /// recursion (exp f)' = f' exp f taken along one coordinate. The
    /// partition-sum formula stays available in the cumulant layer as the
    /// enumeration oracle; the two must agree exactly.
    pub fn exp(&self) -> Result<Self> {
        if !self.is_delta() {
            return Err(Error::NotDelta);
        }
        let mut out = Self::new(self.dim, self.order)?;
        out.set(MultiIndex::zero(self.dim), C::one())?;
        for degree in 1..=self.order {
            for i in indices_of_degree(self.dim, degree) {
                let r = (0..self.dim)
                    .find(|&r| i.get(r) > 0)
                    .expect("degree >= 1 has a positive entry");
                let j = i
                    .checked_sub(&MultiIndex::unit(self.dim, r))
                    .expect("entry r is positive");
                let mut acc = C::zero();
                for k in sub_indices(&j) {
                    let f_k = self.coeff(&k.add(&MultiIndex::unit(self.dim, r)));
                    if f_k.is_zero() {
                        continue;
                    }
                    let h_rest = out.coeff(&j.checked_sub(&k).expect("k <= j"));
                    if h_rest.is_zero() {
                        continue;
                    }
                    let w = Rational::from(multi_binomial(&j, &k));
                    acc = acc.add(&f_k.mul(&h_rest).scale(&w));
                }
                out.set(i, acc)?;
            }
        }
        Ok(out)
    }

    /// The unique delta series g with exp(g) = f to the truncation order;
    /// requires constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !(self.constant_term() == C::one()) {
            return Err(Error::ConstantTermNotOne);
        }
        let mut out = Self::new(self.dim, self.order)?;
        for degree in 1..=self.order {
            for i in indices_of_degree(self.dim, degree) {
                let r = (0..self.dim)
                    .find(|&r| i.get(r) > 0)
                    .expect("degree >= 1 has a positive entry");
                let j = i
                    .checked_sub(&MultiIndex::unit(self.dim, r))
                    .expect("entry r is positive");
                let mut acc = self.coeff(&i);
                for k in sub_indices(&j) {
                    if k == j {
                        continue;
                    }
                    let g_k = out.coeff(&k.add(&MultiIndex::unit(self.dim, r)));
                    if g_k.is_zero() {
                        continue;
                    }
                    let f_rest = self.coeff(&j.checked_sub(&k).expect("k <= j"));
                    if f_rest.is_zero() {
                        continue;
                    }
                    let w = Rational::from(multi_binomial(&j, &k));
                    acc = acc.sub(&g_k.mul(&f_rest).scale(&w));
                }
                out.set(i, acc)?;
            }
        }
        Ok(out)
    }

    /// Taylor re-centering: c_i = sum_j a_{i+j} theta^j / j! over every j
    /// with |i+j| within the stored order. The shift of the stored
    /// polynomial is computed exactly; whether it equals the shift of the
    /// underlying formal series depends on whether the series really is
    /// that polynomial, which only the caller can assert. The reported
    /// exact order is the full order for polynomial inputs and `None`
    /// otherwise.
    pub fn shift(&self, theta: &[Rational], input_is_polynomial: bool) -> Result<ShiftResult<C>> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: theta.len(),
            });
        }
        let mut out = Self::new(self.dim, self.order)?;
        for (m, a) in &self.coeffs {
            for j in sub_indices(m) {
                let i = m.checked_sub(&j).expect("j <= m");
                let mut w = Rational::new(1.into(), j.factorial());
                for (t, &e) in theta.iter().zip(j.entries()) {
                    w *= rat_pow(t, e);
                }
                if num::Zero::is_zero(&w) {
                    continue;
                }
                out.add_to(i, a.scale(&w))?;
            }
        }
        Ok(ShiftResult {
            exact_order: input_is_polynomial.then_some(self.order),
            series: out,
        })
    }
}

/// A shifted series together with the order through which its coefficients
/// are guaranteed exact (`None` when the input was a truncation of an
/// unknown tail, in which case no coefficient carries a guarantee).
#[derive(Clone, Debug)]
pub struct ShiftResult<C: CoeffRing> {
    pub series: TruncatedSeries<C>,
    pub exact_order: Option<u32>,
}

/// Composition with a univariate outer series: coefficients of
/// sum_{j>=1} g_j f^j / j!, both arguments delta, truncated at the smaller
/// of the two orders. Evaluated by a Horner scheme over f.
pub fn compose_uni_outer<C: CoeffRing>(
    outer: &TruncatedSeries<C>,
    inner: &TruncatedSeries<C>,
) -> Result<TruncatedSeries<C>> {
    if outer.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: outer.dim(),
        });
    }
    if !outer.is_delta() || !inner.is_delta() {
        return Err(Error::NotDelta);
    }
    let order = inner.order().min(outer.order());
    let inner = inner.truncated(order);
    let g = |j: u32| outer.coeff(&MultiIndex::new(vec![j]));
    let mut acc = TruncatedSeries::<C>::new(inner.dim(), order)?;
    for j in (1..=order).rev() {
        if j < order {
            acc = acc.mul(&inner)?;
        }
        let t_j = g(j).scale(&Rational::new(1.into(), crate::combinat::factorial(j)));
        acc.add_to(MultiIndex::zero(inner.dim()), t_j)?;
    }
    acc.mul(&inner)
}

/// Composition with a multivariate outer series: coefficients of
/// G(F_1,...,F_n) with G a delta series in n variables and every F_k a
/// delta series in the same d variables.
pub fn compose_multi_outer<C: CoeffRing>(
    outer: &TruncatedSeries<C>,
    inners: &[TruncatedSeries<C>],
) -> Result<TruncatedSeries<C>> {
    if inners.is_empty() {
        return Err(Error::InvalidParameter(
            "composition requires at least one inner series".into(),
        ));
    }
    if outer.dim() != inners.len() {
        return Err(Error::DimensionMismatch {
            expected: outer.dim(),
            found: inners.len(),
        });
    }
    if !outer.is_delta() {
        return Err(Error::NotDelta);
    }
    let dim = inners[0].dim();
    let mut order = outer.order();
    for f in inners {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: f.dim(),
            });
        }
        if !f.is_delta() {
            return Err(Error::NotDelta);
        }
        order = order.min(f.order());
    }
    // Powers F_k^p for p = 0..=order; inner series are delta, so F_k^p has
    // valuation p and powers beyond the order vanish.
    let mut powers: Vec<Vec<TruncatedSeries<C>>> = Vec::with_capacity(inners.len());
    for f in inners {
        let f = f.truncated(order);
        let mut ps = vec![TruncatedSeries::<C>::one(dim, order)?];
        for p in 1..=order {
            let next = ps[(p - 1) as usize].mul(&f)?;
            ps.push(next);
        }
        powers.push(ps);
    }
    let mut out = TruncatedSeries::<C>::new(dim, order)?;
    for (j, g_j) in outer.iter() {
        let total = j.total();
        if total == 0 || total > order {
            continue;
        }
        let mut term = TruncatedSeries::<C>::one(dim, order)?;
        for (k, &e) in j.entries().iter().enumerate() {
            if e > 0 {
                term = term.mul(&powers[k][e as usize])?;
            }
        }
        let w = Rational::new(1.into(), j.factorial());
        out = out.add(&term.scale_by(g_j).scale(&w))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, ratio};

    fn mi(entries: &[u32]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    fn exp_z(order: u32) -> TruncatedSeries {
        // The series of e^z: every coefficient 1 in exponential format.
        let mut s = TruncatedSeries::new(1, order).unwrap();
        for i in 0..=order {
            s.set(mi(&[i]), rat(1)).unwrap();
        }
        s
    }

    #[test]
    fn add_and_scale() {
        let mut f = TruncatedSeries::new(1, 3).unwrap();
        f.set(mi(&[1]), rat(1)).unwrap();
        let mut g = TruncatedSeries::new(1, 3).unwrap();
        g.set(mi(&[1]), rat(2)).unwrap();
        let h = f.add(&g).unwrap();
        assert_eq!(h.coeff(&mi(&[1])), rat(3));
        assert_eq!(f.scale(&rat(0)), TruncatedSeries::new(1, 3).unwrap());
    }

    #[test]
    fn add_requires_matching_dimension() {
        let f = TruncatedSeries::<Rational>::new(1, 3).unwrap();
        let g = TruncatedSeries::<Rational>::new(2, 3).unwrap();
        assert!(f.add(&g).is_err());
    }

    #[test]
    fn product_of_exponentials_doubles() {
        let f = exp_z(6);
        let h = f.mul(&f).unwrap();
        for i in 0..=6u32 {
            assert_eq!(h.coeff(&mi(&[i])), rat(1 << i), "coefficient 2^{i}");
        }
    }

    #[test]
    fn one_is_multiplicative_identity() {
        let mut f = TruncatedSeries::new(2, 4).unwrap();
        f.set(mi(&[1, 0]), ratio(2, 3)).unwrap();
        f.set(mi(&[1, 2]), rat(-5)).unwrap();
        let one = TruncatedSeries::one(2, 4).unwrap();
        assert_eq!(f.mul(&one).unwrap(), f);
    }

    #[test]
    fn bivariate_product_in_exponential_format() {
        let mut f = TruncatedSeries::new(2, 4).unwrap();
        f.set(mi(&[1, 0]), rat(1)).unwrap();
        let mut g = TruncatedSeries::new(2, 4).unwrap();
        g.set(mi(&[0, 1]), rat(1)).unwrap();
        let h = f.mul(&g).unwrap();
        assert_eq!(h.coeff(&mi(&[1, 1])), rat(1));
        assert_eq!(h.iter().count(), 1);
    }

    #[test]
    fn exp_of_all_ones_gives_bell_numbers() {
        let mut f = TruncatedSeries::new(1, 6).unwrap();
        for i in 1..=6u32 {
            f.set(mi(&[i]), rat(1)).unwrap();
        }
        let h = f.exp().unwrap();
        for (i, bell) in [1, 1, 2, 5, 15, 52, 203].iter().enumerate() {
            assert_eq!(h.coeff(&mi(&[i as u32])), rat(*bell));
        }
    }

    #[test]
    fn exp_of_linear_term_is_geometric() {
        let mu = ratio(3, 7);
        let mut f = TruncatedSeries::new(1, 5).unwrap();
        f.set(mi(&[1]), mu.clone()).unwrap();
        let h = f.exp().unwrap();
        for i in 0..=5u32 {
            assert_eq!(h.coeff(&mi(&[i])), rat_pow(&mu, i));
        }
    }

    #[test]
    fn exp_of_gaussian_gives_pair_counts() {
        let mut f = TruncatedSeries::new(1, 4).unwrap();
        f.set(mi(&[2]), rat(1)).unwrap();
        let h = f.exp().unwrap();
        assert_eq!(h.coeff(&mi(&[2])), rat(1));
        assert_eq!(h.coeff(&mi(&[3])), rat(0));
        assert_eq!(h.coeff(&mi(&[4])), rat(3));
    }

    #[test]
    fn exp_requires_delta() {
        let f = exp_z(3);
        assert_eq!(f.exp(), Err(Error::NotDelta));
    }

    #[test]
    fn log_inverts_the_bell_series() {
        let mut f = TruncatedSeries::new(1, 4).unwrap();
        for (i, bell) in [1, 1, 2, 5, 15].iter().enumerate() {
            f.set(mi(&[i as u32]), rat(*bell)).unwrap();
        }
        let g = f.log().unwrap();
        for i in 1..=4u32 {
            assert_eq!(g.coeff(&mi(&[i])), rat(1));
        }
    }

    #[test]
    fn log_requires_unit_constant() {
        let f = TruncatedSeries::<Rational>::new(1, 3).unwrap();
        assert_eq!(f.log(), Err(Error::ConstantTermNotOne));
    }

    #[test]
    fn compose_with_bell_outer_equals_exp() {
        let mut f = TruncatedSeries::new(2, 4).unwrap();
        f.set(mi(&[1, 0]), ratio(1, 2)).unwrap();
        f.set(mi(&[0, 1]), rat(3)).unwrap();
        f.set(mi(&[1, 1]), ratio(-2, 5)).unwrap();
        let mut ones = TruncatedSeries::new(1, 4).unwrap();
        for j in 1..=4u32 {
            ones.set(mi(&[j]), rat(1)).unwrap();
        }
        let composed = compose_uni_outer(&ones, &f).unwrap();
        let direct = f.exp().unwrap();
        // exp(f) = 1 + sum_{j>=1} f^j/j!; the composition omits the 1.
        let expected = direct
            .sub(&TruncatedSeries::one(2, 4).unwrap())
            .unwrap();
        assert_eq!(composed, expected);
    }

    #[test]
    fn unity_outer_is_left_identity() {
        let mut f = TruncatedSeries::new(2, 5).unwrap();
        f.set(mi(&[1, 0]), rat(2)).unwrap();
        f.set(mi(&[2, 1]), ratio(7, 3)).unwrap();
        let mut unity = TruncatedSeries::new(1, 5).unwrap();
        unity.set(mi(&[1]), rat(1)).unwrap();
        assert_eq!(compose_uni_outer(&unity, &f).unwrap(), f);
    }

    #[test]
    fn multi_outer_reduces_to_uni() {
        let mut f = TruncatedSeries::new(1, 5).unwrap();
        f.set(mi(&[1]), rat(1)).unwrap();
        f.set(mi(&[2]), ratio(1, 3)).unwrap();
        let mut g = TruncatedSeries::new(1, 5).unwrap();
        for j in 1..=5u32 {
            g.set(mi(&[j]), rat(j as i64 + 1)).unwrap();
        }
        let uni = compose_uni_outer(&g, &f).unwrap();
        let multi = compose_multi_outer(&g, std::slice::from_ref(&f)).unwrap();
        assert_eq!(uni, multi);
    }

    #[test]
    fn linear_outer_adds_inners() {
        let mut g = TruncatedSeries::new(2, 4).unwrap();
        g.set(mi(&[1, 0]), rat(1)).unwrap();
        g.set(mi(&[0, 1]), rat(1)).unwrap();
        let mut f1 = TruncatedSeries::new(1, 4).unwrap();
        f1.set(mi(&[1]), rat(4)).unwrap();
        f1.set(mi(&[3]), ratio(1, 2)).unwrap();
        let mut f2 = TruncatedSeries::new(1, 4).unwrap();
        f2.set(mi(&[2]), rat(-3)).unwrap();
        let got = compose_multi_outer(&g, &[f1.clone(), f2.clone()]).unwrap();
        assert_eq!(got, f1.add(&f2).unwrap());
    }

    #[test]
    fn mixed_outer_monomial() {
        // G = z1 z2 (coefficient 1 at (1,1)), F1 = F2 = z: result a_2 = 2.
        let mut g = TruncatedSeries::new(2, 4).unwrap();
        g.set(mi(&[1, 1]), rat(1)).unwrap();
        let mut z = TruncatedSeries::new(1, 4).unwrap();
        z.set(mi(&[1]), rat(1)).unwrap();
        let got = compose_multi_outer(&g, &[z.clone(), z]).unwrap();
        assert_eq!(got.coeff(&mi(&[2])), rat(2));
        assert_eq!(got.iter().count(), 1);
    }

    #[test]
    fn non_delta_inner_is_rejected() {
        let one = TruncatedSeries::<Rational>::one(1, 3).unwrap();
        let mut g = TruncatedSeries::new(1, 3).unwrap();
        g.set(mi(&[1]), rat(1)).unwrap();
        assert_eq!(compose_uni_outer(&g, &one), Err(Error::NotDelta));
        assert_eq!(
            compose_multi_outer(&g, std::slice::from_ref(&one)),
            Err(Error::NotDelta)
        );
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let mut f = TruncatedSeries::new(2, 4).unwrap();
        f.set(mi(&[1, 0]), rat(2)).unwrap();
        f.set(mi(&[2, 2]), ratio(5, 3)).unwrap();
        let shifted = f.shift(&[rat(0), rat(0)], true).unwrap();
        assert_eq!(shifted.series, f);
        assert_eq!(shifted.exact_order, Some(4));
    }

    #[test]
    fn shift_of_quadratic_gaussian_series() {
        // a_1 = m, a_2 = sigma^2, nothing else: shifting by t moves the
        // linear coefficient to m + sigma^2 t and keeps a_2.
        let m = ratio(1, 2);
        let sigma2 = ratio(2, 3);
        let t = rat(5);
        let mut f = TruncatedSeries::new(1, 2).unwrap();
        f.set(mi(&[1]), m.clone()).unwrap();
        f.set(mi(&[2]), sigma2.clone()).unwrap();
        let shifted = f.shift(&[t.clone()], true).unwrap().series;
        assert_eq!(shifted.coeff(&mi(&[1])), &m + &sigma2 * &t);
        assert_eq!(shifted.coeff(&mi(&[2])), sigma2);
    }

    #[test]
    fn shift_round_trips_on_polynomial_inputs() {
        let mut f = TruncatedSeries::new(2, 3).unwrap();
        f.set(mi(&[1, 0]), rat(1)).unwrap();
        f.set(mi(&[0, 2]), ratio(-3, 4)).unwrap();
        f.set(mi(&[1, 2]), rat(2)).unwrap();
        let theta = [ratio(1, 2), rat(-2)];
        let back: Vec<Rational> = theta.iter().map(|t| -t).collect();
        let once = f.shift(&theta, true).unwrap().series;
        let round = once.shift(&back, true).unwrap().series;
        assert_eq!(round, f);
    }

    #[test]
    fn shift_reports_no_guarantee_for_truncated_inputs() {
        let f = exp_z(4);
        let shifted = f.shift(&[rat(1)], false).unwrap();
        assert_eq!(shifted.exact_order, None);
    }
}
