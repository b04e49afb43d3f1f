//! Cumulant sequences and cumulant polynomial sequences: moment/cumulant
//! conversion, random-sum and generalized umbral-sum cumulants, multinomial
//! and augmented-matrix expansions, multivariable cumulant polynomials and
//! correlated substitution.
//!
//! An umbra is represented operationally by its [`SequenceTable`]; similar
//! umbrae collapse to table equality, and evaluation collapses to table
//! lookup. Independence is structural: independent components live in
//! separate tables.

use std::collections::BTreeMap;

use crate::combinat::{
    augmented_partitions, compositions, multinomial, partition_coefficient, MultiIndex, SizeCaps,
};
use crate::error::{Error, Result};
use crate::ring::{rat_pow, CoeffRing, Rational, SparsePoly};
use crate::series::{compose_uni_outer, TruncatedSeries};

/// Whether a table stores cumulants or moments. Metadata used by the
/// conversion operations to reject category errors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TableKind {
    Cumulant,
    Moment,
}

impl TableKind {
    pub fn name(&self) -> &'static str {
        match self {
            TableKind::Cumulant => "cumulant",
            TableKind::Moment => "moment",
        }
    }
}

/// A sequence {c_i} or {m_i} indexed by multi-indexes 1 <= |i| <= order.
/// Missing keys mean zero; the entry at the zero index is implicitly 1 for
/// moment-kind tables and 0 for cumulant-kind tables.
#[derive(Clone, PartialEq, Debug)]
pub struct SequenceTable<C: CoeffRing = Rational> {
    dim: usize,
    order: u32,
    kind: TableKind,
    entries: BTreeMap<MultiIndex, C>,
}

impl<C: CoeffRing> SequenceTable<C> {
    pub fn new(kind: TableKind, dim: usize, order: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "table dimension must be >= 1".into(),
            ));
        }
        Ok(SequenceTable {
            dim,
            order,
            kind,
            entries: BTreeMap::new(),
        })
    }

    pub fn cumulants(dim: usize, order: u32) -> Result<Self> {
        Self::new(TableKind::Cumulant, dim, order)
    }

    pub fn moments(dim: usize, order: u32) -> Result<Self> {
        Self::new(TableKind::Moment, dim, order)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn require_kind(&self, kind: TableKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            });
        }
        Ok(())
    }

    pub fn set(&mut self, index: MultiIndex, value: C) -> Result<()> {
        if index.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: index.dim(),
            });
        }
        if index.is_zero() || index.total() > self.order {
            return Err(Error::InvalidParameter(format!(
                "table entries live at 1 <= |i| <= {}, got {index}",
                self.order
            )));
        }
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
        Ok(())
    }

    /// The entry at `index`. Within the covered orders a missing key is
    /// zero; beyond the order (or at the wrong dimension) the entry is
    /// genuinely unknown and an error names the missing index.
    pub fn entry(&self, index: &MultiIndex) -> Result<C> {
        if index.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: index.dim(),
            });
        }
        if index.total() > self.order {
            return Err(Error::MissingIndex(index.clone()));
        }
        if index.is_zero() {
            return Ok(match self.kind {
                TableKind::Moment => C::one(),
                TableKind::Cumulant => C::zero(),
            });
        }
        Ok(self.entries.get(index).cloned().unwrap_or_else(C::zero))
    }

    /// Stored nonzero entries, graded lexicographic.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.entries.iter()
    }

    /// The series sum_i c_i z^i/i! over 1 <= |i| <= order, constant 0.
    pub fn to_delta_series(&self) -> TruncatedSeries<C> {
        let mut s = TruncatedSeries::new(self.dim, self.order).expect("dim >= 1");
        for (i, c) in &self.entries {
            s.set(i.clone(), c.clone()).expect("entry within order");
        }
        s
    }

    /// The same series with constant term 1, the generating-function
    /// convention.
    pub fn to_unit_series(&self) -> TruncatedSeries<C> {
        let mut s = self.to_delta_series();
        s.set(MultiIndex::zero(self.dim), C::one())
            .expect("zero index in range");
        s
    }

    /// Reads the coefficients of a series back into a table, dropping the
    /// constant term.
    pub fn from_series(kind: TableKind, series: &TruncatedSeries<C>) -> Self {
        let mut t = SequenceTable::new(kind, series.dim(), series.order()).expect("dim >= 1");
        for (i, c) in series.iter() {
            if !i.is_zero() {
                t.set(i.clone(), c.clone()).expect("series index in range");
            }
        }
        t
    }

    /// The unity umbra {1, 0, 0, ...}: the left identity of the umbral sum.
    pub fn unity_umbra(order: u32) -> Self {
        let mut t = SequenceTable::cumulants(1, order).expect("dim 1");
        if order >= 1 {
            t.set(MultiIndex::new(vec![1]), C::one()).expect("in range");
        }
        t
    }

    /// The Bell umbra: the all-ones cumulant sequence, i.e. Poisson(1).
    pub fn bell_umbra(order: u32) -> Self {
        let mut t = SequenceTable::cumulants(1, order).expect("dim 1");
        for j in 1..=order {
            t.set(MultiIndex::new(vec![j]), C::one()).expect("in range");
        }
        t
    }

    /// Poisson(rate): every cumulant equals the rate.
    pub fn poisson(rate: &Rational, order: u32) -> Self {
        let mut t = SequenceTable::cumulants(1, order).expect("dim 1");
        for j in 1..=order {
            t.set(MultiIndex::new(vec![j]), C::from_rational(rate))
                .expect("in range");
        }
        t
    }

    /// The deterministic index n: cumulant sequence {n, 0, 0, ...}.
    pub fn deterministic(value: C, order: u32) -> Self {
        let mut t = SequenceTable::cumulants(1, order).expect("dim 1");
        if order >= 1 && !value.is_zero() {
            t.set(MultiIndex::new(vec![1]), value).expect("in range");
        }
        t
    }

    /// Drops entries above `order`.
    pub fn truncated(&self, order: u32) -> Self {
        let order = order.min(self.order);
        let mut t = SequenceTable::new(self.kind, self.dim, order).expect("dim >= 1");
        for (i, c) in &self.entries {
            if i.total() <= order {
                t.set(i.clone(), c.clone()).expect("in range");
            }
        }
        t
    }

    /// Multiplies every entry by `r` (the linear scaling of a cumulant
    /// generating function, e.g. by a time horizon -- not the degree-graded
    /// scaling of [`scale_cumulants`]).
    pub fn scale_entries(&self, r: &Rational) -> Self {
        let mut t = SequenceTable::new(self.kind, self.dim, self.order).expect("dim >= 1");
        for (i, c) in &self.entries {
            let scaled = c.scale(r);
            if !scaled.is_zero() {
                t.set(i.clone(), scaled).expect("in range");
            }
        }
        t
    }
}

impl SequenceTable<SparsePoly<Rational>> {
    /// A cumulant table whose entries are the formal symbols c[i], one
    /// indeterminate per index with 1 <= |i| <= order.
    pub fn symbolic_cumulants(dim: usize, order: u32) -> Result<Self> {
        let indices: Vec<MultiIndex> = crate::combinat::indices_up_to(dim, order)
            .into_iter()
            .filter(|i| !i.is_zero())
            .collect();
        let vars: Vec<String> = indices.iter().map(|i| format!("c[{i}]")).collect();
        let mut t = SequenceTable::cumulants(dim, order)?;
        for (k, i) in indices.iter().enumerate() {
            t.set(i.clone(), SparsePoly::var(vars.clone(), k))?;
        }
        Ok(t)
    }
}

/// m_i = sum over partitions of i of i!/(m(lambda)! lambda!) prod c^r,
/// computed as exp of the delta series of the cumulants.
pub fn moments_from_cumulants<C: CoeffRing>(c: &SequenceTable<C>) -> Result<SequenceTable<C>> {
    c.require_kind(TableKind::Cumulant)?;
    let series = c.to_delta_series().exp()?;
    Ok(SequenceTable::from_series(TableKind::Moment, &series))
}

/// The inverse conversion: log of the unit-constant series of the moments.
pub fn cumulants_from_moments<C: CoeffRing>(m: &SequenceTable<C>) -> Result<SequenceTable<C>> {
    m.require_kind(TableKind::Moment)?;
    let series = m.to_unit_series().log()?;
    Ok(SequenceTable::from_series(TableKind::Cumulant, &series))
}

/// The i-th cumulant polynomial: a polynomial in one auxiliary
/// indeterminate y whose coefficients are products of cumulants over the
/// partitions of i. Its constant term is zero.
#[derive(Clone, PartialEq, Debug)]
pub struct CumulantPolynomial<C: CoeffRing = Rational> {
    index: MultiIndex,
    poly: SparsePoly<C>,
}

impl<C: CoeffRing> CumulantPolynomial<C> {
    pub fn index(&self) -> &MultiIndex {
        &self.index
    }

    pub fn poly(&self) -> &SparsePoly<C> {
        &self.poly
    }

    pub fn into_poly(self) -> SparsePoly<C> {
        self.poly
    }

    /// Exact evaluation at a rational y.
    pub fn eval(&self, y: &Rational) -> C {
        self.poly.eval(std::slice::from_ref(y)).expect("univariate")
    }

    /// Umbral substitution y^l -> g_l against a univariate table.
    pub fn substitute_table(&self, g: &SequenceTable<Rational>) -> Result<C> {
        if g.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: g.dim(),
            });
        }
        self.poly
            .umbral_substitute_power(|l| g.entry(&MultiIndex::new(vec![l])).ok())
    }
}

/// Builds C_{i,X}(y) = i! sum_{lambda |- i} y^{l(lambda)}/(m(lambda)! lambda!)
/// prod c_{lambda_j}^{r_j} by partition enumeration.
pub fn cumulant_polynomial<C: CoeffRing>(
    i: &MultiIndex,
    c: &SequenceTable<C>,
) -> Result<CumulantPolynomial<C>> {
    cumulant_polynomial_with_caps(i, c, &SizeCaps::default())
}

pub fn cumulant_polynomial_with_caps<C: CoeffRing>(
    i: &MultiIndex,
    c: &SequenceTable<C>,
    caps: &SizeCaps,
) -> Result<CumulantPolynomial<C>> {
    if i.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: i.dim(),
        });
    }
    let yvars = vec!["y".to_string()];
    let mut poly = SparsePoly::zero_in(yvars.clone());
    for lambda in enumerate_partitions_scaled(i, caps)? {
        let coeff = partition_coefficient(i, &lambda)?;
        let mut product = C::one();
        for (col, mult) in lambda.parts() {
            product = product.mul(&c.entry(col)?.pow(*mult));
        }
        poly.add_term(
            MultiIndex::new(vec![lambda.length()]),
            product.scale(&coeff),
        );
    }
    Ok(CumulantPolynomial {
        index: i.clone(),
        poly,
    })
}

fn enumerate_partitions_scaled(
    i: &MultiIndex,
    caps: &SizeCaps,
) -> Result<Vec<crate::combinat::MultiIndexPartition>> {
    crate::combinat::enumerate_partitions_with_caps(i, caps)
}

/// Degree threshold below which the random-sum formula runs by partition
/// enumeration; beyond it the series-composition route takes over. The two
/// routes agree exactly wherever both run.
pub const RANDOM_SUM_ENUM_CAP: u32 = 8;

/// Cumulants of a random sum (and of the generalized umbral sum): the
/// outer univariate cumulant sequence g composed with the inner sequence c,
/// h_i = i! sum_{lambda |- i} g_{l(lambda)}/(m(lambda)! lambda!) prod c^r.
pub fn random_sum_cumulants<C: CoeffRing>(
    g: &SequenceTable<C>,
    c: &SequenceTable<C>,
) -> Result<SequenceTable<C>> {
    check_random_sum_args(g, c)?;
    if c.order() <= RANDOM_SUM_ENUM_CAP && c.dim() <= SizeCaps::default().max_dim {
        random_sum_cumulants_by_enumeration(g, c)
    } else {
        random_sum_cumulants_by_composition(g, c)
    }
}

fn check_random_sum_args<C: CoeffRing>(
    g: &SequenceTable<C>,
    c: &SequenceTable<C>,
) -> Result<()> {
    if g.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: g.dim(),
        });
    }
    g.require_kind(TableKind::Cumulant)?;
    c.require_kind(TableKind::Cumulant)?;
    if g.order() < c.order() {
        return Err(Error::MissingOrder(c.order()));
    }
    Ok(())
}

/// The partition-sum route, faithful to the closed formula.
pub fn random_sum_cumulants_by_enumeration<C: CoeffRing>(
    g: &SequenceTable<C>,
    c: &SequenceTable<C>,
) -> Result<SequenceTable<C>> {
    check_random_sum_args(g, c)?;
    let caps = SizeCaps {
        max_dim: c.dim().max(SizeCaps::default().max_dim),
        max_degree: c.order().max(SizeCaps::default().max_degree),
    };
    let mut out = SequenceTable::cumulants(c.dim(), c.order())?;
    for degree in 1..=c.order() {
        for i in crate::combinat::indices_of_degree(c.dim(), degree) {
            let mut acc = C::zero();
            for lambda in enumerate_partitions_scaled(&i, &caps)? {
                let coeff = partition_coefficient(&i, &lambda)?;
                let g_l = g.entry(&MultiIndex::new(vec![lambda.length()]))?;
                if g_l.is_zero() {
                    continue;
                }
                let mut product = g_l;
                for (col, mult) in lambda.parts() {
                    product = product.mul(&c.entry(col)?.pow(*mult));
                }
                acc = acc.add(&product.scale(&coeff));
            }
            out.set(i, acc)?;
        }
    }
    Ok(out)
}

/// The scalable route through truncated series composition.
pub fn random_sum_cumulants_by_composition<C: CoeffRing>(
    g: &SequenceTable<C>,
    c: &SequenceTable<C>,
) -> Result<SequenceTable<C>> {
    check_random_sum_args(g, c)?;
    let composed = compose_uni_outer(&g.to_delta_series(), &c.to_delta_series())?;
    Ok(SequenceTable::from_series(TableKind::Cumulant, &composed))
}

fn y_vars(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("y{k}")).collect()
}

/// C_{i,X}(y_1 + ... + y_n): the univariate cumulant polynomial with the
/// sum of indeterminates substituted and expanded.
pub fn cumulant_poly_multinomial<C: CoeffRing>(
    i: &MultiIndex,
    c: &SequenceTable<C>,
    n: usize,
) -> Result<SparsePoly<C>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1 indeterminates".into()));
    }
    let univariate = cumulant_polynomial(i, c)?;
    let vars = y_vars(n);
    let mut sum: SparsePoly<C> = SparsePoly::zero_in(vars.clone());
    for k in 0..n {
        sum = sum.add_poly(&SparsePoly::var(vars.clone(), k));
    }
    univariate.poly().substitute(&[sum])
}

/// The same polynomial evaluated through the augmented-matrix sum: each
/// element of P_n(i) contributes its weight times y_1^{l_1}...y_n^{l_n}
/// times the product of cumulants over grouped columns. Kept as the second
/// route of the multinomial identity.
pub fn cumulant_poly_multinomial_augmented<C: CoeffRing>(
    i: &MultiIndex,
    c: &SequenceTable<C>,
    n: usize,
) -> Result<SparsePoly<C>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1 indeterminates".into()));
    }
    let vars = y_vars(n);
    let mut poly = SparsePoly::zero_in(vars);
    for aug in augmented_partitions(i, n)? {
        let mut product = C::one();
        for (col, total_mult, _origins) in aug.grouped_columns() {
            product = product.mul(&c.entry(&col)?.pow(total_mult));
        }
        poly.add_term(
            MultiIndex::new(aug.block_lengths()),
            product.scale(&aug.weight()),
        );
    }
    Ok(poly)
}

/// The multivariable cumulant polynomial over distinct tables:
/// sum over compositions i_1+...+i_n = i of binom(i; i_1..i_n)
/// C_{i_1,X_1}(y_1) ... C_{i_n,X_n}(y_n).
pub fn multivariable_cumulant_polynomial<C: CoeffRing>(
    i: &MultiIndex,
    tables: &[SequenceTable<C>],
) -> Result<SparsePoly<C>> {
    if tables.is_empty() {
        return Err(Error::InvalidParameter("need at least one table".into()));
    }
    let n = tables.len();
    for t in tables {
        if t.dim() != i.dim() {
            return Err(Error::DimensionMismatch {
                expected: i.dim(),
                found: t.dim(),
            });
        }
    }
    let vars = y_vars(n);
    let mut out: SparsePoly<C> = SparsePoly::zero_in(vars.clone());
    for comp in compositions(i, n)? {
        let weight = multinomial(i, &comp)?;
        let mut term = SparsePoly::constant(vars.clone(), C::one());
        for (k, part) in comp.iter().enumerate() {
            if part.is_zero() {
                continue;
            }
            let block = cumulant_polynomial(part, &tables[k])?;
            let mut lifted = SparsePoly::zero_in(vars.clone());
            for (exps, coeff) in block.poly().terms() {
                let mut e = vec![0u32; n];
                e[k] = exps.get(0);
                lifted.add_term(MultiIndex::new(e), coeff.clone());
            }
            term = term.mul_poly(&lifted);
        }
        out = out.add_poly(&term.scale_poly(&weight));
    }
    Ok(out)
}

/// What a correlated substitution plugs in for the monomials in
/// y_1, ..., y_n: joint moments of Y (the conditional-mean evaluation) or
/// joint cumulants of Y (the composition coefficients).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SubstitutionMode {
    Moments,
    Cumulants,
}

/// Substitutes a correlated random vector Y for the indeterminates of the
/// multivariable cumulant polynomial. In `Moments` mode each monomial
/// y^e maps to the joint moment of Y at e; in `Cumulants` mode to the
/// joint cumulant, which evaluates the coefficients of the multivariate
/// composition K_Y[K_{X_1}, ..., K_{X_n}]. The mode is always explicit.
pub fn correlated_substitution<C: CoeffRing>(
    i: &MultiIndex,
    tables: &[SequenceTable<C>],
    joint: &SequenceTable<Rational>,
    mode: SubstitutionMode,
) -> Result<C> {
    joint.require_kind(TableKind::Cumulant)?;
    if joint.dim() != tables.len() {
        return Err(Error::DimensionMismatch {
            expected: tables.len(),
            found: joint.dim(),
        });
    }
    let poly = multivariable_cumulant_polynomial(i, tables)?;
    let values = match mode {
        SubstitutionMode::Moments => moments_from_cumulants(joint)?,
        SubstitutionMode::Cumulants => joint.clone(),
    };
    poly.umbral_substitute(|e| values.entry(e).ok())
}

/// Cumulants of aX: the entry at i becomes a^{|i|} c_i.
pub fn scale_cumulants<C: CoeffRing>(a: &Rational, c: &SequenceTable<C>) -> SequenceTable<C> {
    let mut out = SequenceTable::new(c.kind(), c.dim(), c.order()).expect("dim >= 1");
    for (i, value) in c.iter() {
        out.set(i.clone(), value.scale(&rat_pow(a, i.total())))
            .expect("index in range");
    }
    out
}

/// Cumulants of a sum of independent vectors: the entrywise sum of the
/// tables, truncated to the smallest order.
pub fn convolve_cumulant_tables<C: CoeffRing>(
    tables: &[SequenceTable<C>],
) -> Result<SequenceTable<C>> {
    let first = tables
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one table".into()))?;
    let dim = first.dim();
    let order = tables.iter().map(|t| t.order()).min().unwrap_or(0);
    let mut out: SequenceTable<C> = SequenceTable::cumulants(dim, order)?;
    for t in tables {
        t.require_kind(TableKind::Cumulant)?;
        if t.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: t.dim(),
            });
        }
        for (i, value) in t.iter() {
            if i.total() <= order {
                let updated = out.entry(i)?.add(value);
                out.set(i.clone(), updated)?;
            }
        }
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

    fn bell_table(order: u32) -> SequenceTable {
        SequenceTable::<Rational>::bell_umbra(order)
    }

    #[test]
    fn all_ones_cumulants_give_bell_moments() {
        let m = moments_from_cumulants(&bell_table(6)).unwrap();
        for (i, bell) in [1i64, 2, 5, 15, 52, 203].iter().enumerate() {
            assert_eq!(m.entry(&mi(&[i as u32 + 1])).unwrap(), rat(*bell));
        }
    }

    #[test]
    fn independent_coordinates_give_product_moments() {
        let a = ratio(2, 3);
        let b = rat(-2);
        let mut c = SequenceTable::cumulants(2, 4).unwrap();
        c.set(mi(&[1, 0]), a.clone()).unwrap();
        c.set(mi(&[0, 1]), b.clone()).unwrap();
        let m = moments_from_cumulants(&c).unwrap();
        for i in 0..=4u32 {
            for j in 0..=(4 - i) {
                if i + j == 0 {
                    continue;
                }
                assert_eq!(
                    m.entry(&mi(&[i, j])).unwrap(),
                    rat_pow(&a, i) * rat_pow(&b, j)
                );
            }
        }
    }

    #[test]
    fn gaussian_fourth_moment_is_three() {
        let mut c = SequenceTable::cumulants(1, 4).unwrap();
        c.set(mi(&[2]), rat(1)).unwrap();
        let m = moments_from_cumulants(&c).unwrap();
        assert_eq!(m.entry(&mi(&[4])).unwrap(), rat(3));
        assert_eq!(m.entry(&mi(&[3])).unwrap(), rat(0));
    }

    #[test]
    fn geometric_moments_have_single_cumulant() {
        let mu = ratio(5, 4);
        let mut m = SequenceTable::moments(1, 5).unwrap();
        for i in 1..=5u32 {
            m.set(mi(&[i]), rat_pow(&mu, i)).unwrap();
        }
        let c = cumulants_from_moments(&m).unwrap();
        assert_eq!(c.entry(&mi(&[1])).unwrap(), mu);
        for i in 2..=5u32 {
            assert_eq!(c.entry(&mi(&[i])).unwrap(), rat(0));
        }
    }

    #[test]
    fn bell_moments_invert_to_all_ones() {
        let m = moments_from_cumulants(&bell_table(6)).unwrap();
        let c = cumulants_from_moments(&m).unwrap();
        assert_eq!(c, bell_table(6));
    }

    #[test]
    fn kind_is_checked() {
        let m = SequenceTable::<Rational>::moments(1, 3).unwrap();
        assert!(matches!(
            moments_from_cumulants(&m),
            Err(Error::KindMismatch { .. })
        ));
        let c = SequenceTable::<Rational>::cumulants(1, 3).unwrap();
        assert!(matches!(
            cumulants_from_moments(&c),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn cumulant_polynomial_of_unit_index_is_linear() {
        let mut c = SequenceTable::cumulants(1, 3).unwrap();
        c.set(mi(&[1]), ratio(7, 2)).unwrap();
        let p = cumulant_polynomial(&mi(&[1]), &c).unwrap();
        assert_eq!(p.poly().num_terms(), 1);
        assert_eq!(p.poly().coeff_of(&mi(&[1])), ratio(7, 2));
    }

    #[test]
    fn cumulant_polynomial_at_one_reproduces_moments() {
        let mut c = SequenceTable::cumulants(2, 4).unwrap();
        c.set(mi(&[1, 0]), ratio(1, 2)).unwrap();
        c.set(mi(&[0, 1]), rat(2)).unwrap();
        c.set(mi(&[1, 1]), ratio(-1, 3)).unwrap();
        c.set(mi(&[2, 0]), rat(1)).unwrap();
        let m = moments_from_cumulants(&c).unwrap();
        for degree in 1..=4u32 {
            for i in crate::combinat::indices_of_degree(2, degree) {
                let p = cumulant_polynomial(&i, &c).unwrap();
                assert_eq!(p.eval(&rat(1)), m.entry(&i).unwrap(), "index {i}");
            }
        }
    }

    #[test]
    fn cumulant_polynomial_has_no_constant_term() {
        let mut c = SequenceTable::cumulants(1, 5).unwrap();
        for j in 1..=5u32 {
            c.set(mi(&[j]), ratio(j as i64, 3)).unwrap();
        }
        for j in 1..=5u32 {
            let p = cumulant_polynomial(&mi(&[j]), &c).unwrap();
            assert_eq!(p.eval(&rat(0)), rat(0));
        }
    }

    #[test]
    fn cumulant_polynomial_names_missing_index() {
        let c = SequenceTable::<Rational>::cumulants(1, 2).unwrap();
        let err = cumulant_polynomial(&mi(&[3]), &c).unwrap_err();
        assert_eq!(err, Error::MissingIndex(mi(&[3])));
    }

    #[test]
    fn unity_outer_leaves_cumulants_fixed() {
        let mut c = SequenceTable::cumulants(2, 4).unwrap();
        c.set(mi(&[1, 0]), rat(3)).unwrap();
        c.set(mi(&[2, 1]), ratio(1, 5)).unwrap();
        let g = SequenceTable::<Rational>::unity_umbra(4);
        assert_eq!(random_sum_cumulants(&g, &c).unwrap(), c);
    }

    #[test]
    fn constant_outer_scales_cumulants() {
        let mut c = SequenceTable::cumulants(1, 4).unwrap();
        for j in 1..=4u32 {
            c.set(mi(&[j]), ratio(1, j as i64)).unwrap();
        }
        let g = SequenceTable::deterministic(rat(3), 4);
        let h = random_sum_cumulants(&g, &c).unwrap();
        for j in 1..=4u32 {
            assert_eq!(h.entry(&mi(&[j])).unwrap(), rat(3) * ratio(1, j as i64));
        }
    }

    #[test]
    fn poisson_outer_gives_scaled_moments() {
        let lambda = ratio(3, 2);
        let mut c = SequenceTable::cumulants(1, 5).unwrap();
        c.set(mi(&[1]), ratio(1, 2)).unwrap();
        c.set(mi(&[2]), rat(2)).unwrap();
        c.set(mi(&[3]), ratio(-1, 4)).unwrap();
        let g = SequenceTable::poisson(&lambda, 5);
        let h = random_sum_cumulants(&g, &c).unwrap();
        let m = moments_from_cumulants(&c).unwrap();
        for j in 1..=5u32 {
            assert_eq!(
                h.entry(&mi(&[j])).unwrap(),
                &lambda * m.entry(&mi(&[j])).unwrap()
            );
        }
    }

    #[test]
    fn enumeration_and_composition_routes_agree() {
        let mut c = SequenceTable::cumulants(2, 5).unwrap();
        c.set(mi(&[1, 0]), ratio(2, 7)).unwrap();
        c.set(mi(&[0, 1]), rat(-1)).unwrap();
        c.set(mi(&[1, 1]), ratio(3, 2)).unwrap();
        c.set(mi(&[2, 1]), ratio(-5, 3)).unwrap();
        let mut g = SequenceTable::cumulants(1, 5).unwrap();
        for j in 1..=5u32 {
            g.set(mi(&[j]), ratio(j as i64 - 3, 2)).unwrap();
        }
        assert_eq!(
            random_sum_cumulants_by_enumeration(&g, &c).unwrap(),
            random_sum_cumulants_by_composition(&g, &c).unwrap()
        );
    }

    #[test]
    fn outer_must_cover_inner_order() {
        let c = bell_table(4);
        let g = SequenceTable::<Rational>::unity_umbra(3);
        assert_eq!(
            random_sum_cumulants(&g, &c),
            Err(Error::MissingOrder(4))
        );
    }

    #[test]
    fn multinomial_routes_agree_on_2() {
        let mut c = SequenceTable::cumulants(1, 3).unwrap();
        c.set(mi(&[1]), ratio(1, 2)).unwrap();
        c.set(mi(&[2]), rat(3)).unwrap();
        let a = cumulant_poly_multinomial(&mi(&[2]), &c, 2).unwrap();
        let b = cumulant_poly_multinomial_augmented(&mi(&[2]), &c, 2).unwrap();
        assert_eq!(a, b);
        // (y1+y2)^2 c1^2 + (y1+y2) c2 expanded.
        assert_eq!(a.coeff_of(&mi(&[2, 0])), ratio(1, 4));
        assert_eq!(a.coeff_of(&mi(&[1, 1])), ratio(1, 2));
        assert_eq!(a.coeff_of(&mi(&[1, 0])), rat(3));
    }

    #[test]
    fn multinomial_with_one_slot_is_the_plain_polynomial() {
        let mut c = SequenceTable::cumulants(2, 3).unwrap();
        c.set(mi(&[1, 0]), rat(2)).unwrap();
        c.set(mi(&[0, 1]), ratio(1, 3)).unwrap();
        c.set(mi(&[1, 1]), rat(-1)).unwrap();
        let single = cumulant_poly_multinomial(&mi(&[2, 1]), &c, 1).unwrap();
        let plain = cumulant_polynomial(&mi(&[2, 1]), &c).unwrap();
        let single_terms: Vec<(Vec<u32>, Rational)> = single
            .terms()
            .map(|(e, v)| (e.entries().to_vec(), v.clone()))
            .collect();
        let plain_terms: Vec<(Vec<u32>, Rational)> = plain
            .poly()
            .terms()
            .map(|(e, v)| (e.entries().to_vec(), v.clone()))
            .collect();
        assert_eq!(single_terms, plain_terms);
    }

    #[test]
    fn multivariable_with_equal_tables_matches_multinomial() {
        let mut c = SequenceTable::cumulants(1, 4).unwrap();
        c.set(mi(&[1]), ratio(2, 3)).unwrap();
        c.set(mi(&[2]), rat(-1)).unwrap();
        c.set(mi(&[3]), ratio(1, 5)).unwrap();
        for n in 1..=3usize {
            let tables = vec![c.clone(); n];
            for i in 1..=3u32 {
                let multi = multivariable_cumulant_polynomial(&mi(&[i]), &tables).unwrap();
                let mult = cumulant_poly_multinomial(&mi(&[i]), &c, n).unwrap();
                assert_eq!(multi, mult, "i={i}, n={n}");
            }
        }
    }

    #[test]
    fn correlated_substitution_with_unity_recovers_cumulants() {
        let mut c = SequenceTable::cumulants(1, 4).unwrap();
        c.set(mi(&[1]), ratio(1, 2)).unwrap();
        c.set(mi(&[2]), rat(4)).unwrap();
        c.set(mi(&[3]), ratio(-2, 3)).unwrap();
        let unity = SequenceTable::<Rational>::unity_umbra(4);
        for i in 1..=4u32 {
            let got = correlated_substitution(
                &mi(&[i]),
                std::slice::from_ref(&c),
                &unity,
                SubstitutionMode::Cumulants,
            )
            .unwrap();
            assert_eq!(got, c.entry(&mi(&[i])).unwrap());
        }
    }

    #[test]
    fn scaling_is_homogeneous_of_total_degree() {
        let mut c = SequenceTable::cumulants(2, 3).unwrap();
        c.set(mi(&[1, 0]), rat(1)).unwrap();
        c.set(mi(&[0, 1]), ratio(1, 2)).unwrap();
        c.set(mi(&[1, 1]), rat(2)).unwrap();
        c.set(mi(&[2, 1]), rat(-3)).unwrap();
        let a = rat(2);
        let scaled = scale_cumulants(&a, &c);
        // |i| = 3: the polynomial scales by 2^3 = 8.
        let p_scaled = cumulant_polynomial(&mi(&[2, 1]), &scaled).unwrap();
        let p = cumulant_polynomial(&mi(&[2, 1]), &c).unwrap();
        assert_eq!(*p_scaled.poly(), p.poly().scale_poly(&rat(8)));
        // a = 1 and a = 0 degenerate cleanly.
        assert_eq!(scale_cumulants(&rat(1), &c), c);
        let zeroed = scale_cumulants(&rat(0), &c);
        assert_eq!(zeroed.iter().count(), 0);
    }

    #[test]
    fn convolution_adds_tables() {
        let mut g1 = SequenceTable::cumulants(1, 4).unwrap();
        g1.set(mi(&[2]), rat(1)).unwrap();
        let sum = convolve_cumulant_tables(&[g1.clone(), g1.clone()]).unwrap();
        assert_eq!(sum.entry(&mi(&[2])).unwrap(), rat(2));
        assert_eq!(convolve_cumulant_tables(&[g1.clone()]).unwrap(), g1);
    }

    #[test]
    fn symbolic_table_entries_are_named_symbols() {
        let t = SequenceTable::symbolic_cumulants(2, 2).unwrap();
        let e = t.entry(&mi(&[1, 1])).unwrap();
        assert_eq!(e.to_string(), "c[1,1]");
    }
}
