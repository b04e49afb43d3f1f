//! Symmetric-function identities and random-matrix cumulants: weighted-sum
//! moments in the power-sum basis, elementary symmetric polynomials under
//! the exponential convention, trace-moment conversion and the
//! simple-random-sampling invariance.
//!
//! "Random matrix" inputs are eigenvalue-law cumulant tables, never
//! concrete matrices; concrete sampling lives in the `mc` module.

use crate::combinat::{enumerate_integer_partitions, MultiIndex};
use crate::cumulant::{cumulant_polynomial, cumulants_from_moments, SequenceTable};
use crate::error::{Error, Result};
use crate::ring::{rat, Rational, SparsePoly};
use crate::series::TruncatedSeries;

fn y_vars(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("y{k}")).collect()
}

fn s_vars(max: u32) -> Vec<String> {
    (1..=max).map(|j| format!("s{j}")).collect()
}

/// The j-th power sum s_j = y_1^j + ... + y_n^j as a polynomial.
pub fn power_sum(j: u32, n: usize) -> SparsePoly<Rational> {
    let vars = y_vars(n);
    let mut p = SparsePoly::zero_in(vars.clone());
    for k in 0..n {
        let mut exps = vec![0u32; n];
        exps[k] = j;
        p.add_term(MultiIndex::new(exps), rat(1));
    }
    p
}

/// A polynomial over the formal power-sum symbols s_1, s_2, ...; expanding
/// substitutes s_j -> y_1^j + ... + y_n^j for a chosen n.
#[derive(Clone, PartialEq, Debug)]
pub struct PowerSumExpr {
    poly: SparsePoly<Rational>,
}

impl PowerSumExpr {
    pub fn new(poly: SparsePoly<Rational>) -> Self {
        PowerSumExpr { poly }
    }

    /// The expression in the s-basis (variables s1, s2, ...).
    pub fn poly(&self) -> &SparsePoly<Rational> {
        &self.poly
    }

    /// Expands into a symmetric polynomial in y_1, ..., y_n.
    pub fn expand(&self, n: usize) -> Result<SparsePoly<Rational>> {
        let images: Vec<SparsePoly<Rational>> = (1..=self.poly.nvars() as u32)
            .map(|j| power_sum(j, n))
            .collect();
        self.poly.substitute(&images)
    }
}

/// E[(X_1 y_1 + ... + X_n y_n)^i] for i.i.d. coordinates with cumulants c:
/// sum over integer partitions of i of d_lambda prod_j [c_j s_j]^{r_j},
/// returned in the power-sum basis together with its expansion in the y's.
pub fn weighted_sum_moment(
    i: u32,
    c: &SequenceTable<Rational>,
    n: usize,
) -> Result<(PowerSumExpr, SparsePoly<Rational>)> {
    if i == 0 {
        return Err(Error::InvalidParameter("need i >= 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    if c.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: c.dim(),
        });
    }
    let vars = s_vars(i);
    let mut poly = SparsePoly::zero_in(vars.clone());
    for lambda in enumerate_integer_partitions(i) {
        let mut coeff = lambda.d_lambda();
        let mut exps = vec![0u32; i as usize];
        for (part, r) in lambda.multiplicities() {
            let c_part = c.entry(&MultiIndex::new(vec![part]))?;
            coeff *= crate::ring::rat_pow(&c_part, r);
            exps[(part - 1) as usize] = r;
        }
        poly.add_term(MultiIndex::new(exps), coeff);
    }
    let expr = PowerSumExpr::new(poly);
    let expanded = expr.expand(n)?;
    Ok((expr, expanded))
}

/// Cumulants of the compositional inverse of e^z - 1 shifted to gf form:
/// c_i = (-1)^{i-1} (i-1)!. Its second cumulant is -1.
pub fn beta_inverse_cumulants(order: u32) -> SequenceTable<Rational> {
    let mut t = SequenceTable::cumulants(1, order).expect("dim 1");
    for i in 1..=order {
        let mut value = Rational::from(crate::combinat::factorial(i - 1));
        if i % 2 == 0 {
            value = -value;
        }
        t.set(MultiIndex::new(vec![i]), value).expect("in range");
    }
    t
}

/// Elementary symmetric polynomials under the exponential convention
/// sum e_i z^i/i! = prod_j (1 + y_j z), i.e. e_i here is i! times the
/// classical elementary symmetric polynomial. Direct product expansion;
/// index k of the returned list is e_k, for k = 0..=order.
pub fn elementary_symmetric(n: usize, order: u32) -> Result<Vec<SparsePoly<Rational>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    let vars = y_vars(n);
    // Classical e_i by the one-variable-at-a-time recurrence.
    let mut classical: Vec<SparsePoly<Rational>> =
        vec![SparsePoly::zero_in(vars.clone()); n + 1];
    classical[0] = SparsePoly::constant(vars.clone(), rat(1));
    for m in 0..n {
        let y_m = SparsePoly::<Rational>::var(vars.clone(), m);
        for k in (1..=(m + 1)).rev() {
            classical[k] = classical[k].add_poly(&classical[k - 1].mul_poly(&y_m));
        }
    }
    let mut out = Vec::with_capacity(order as usize + 1);
    for k in 0..=order {
        let classical_k = classical
            .get(k as usize)
            .cloned()
            .unwrap_or_else(|| SparsePoly::zero_in(vars.clone()));
        out.push(classical_k.scale_poly(&Rational::from(crate::combinat::factorial(k))));
    }
    Ok(out)
}

/// The same list through the generating-function route: exp of
/// sum_{i>0} (-1)^{i-1} (i-1)! s_i z^i / i!, a series over the polynomial
/// ring in y_1..y_n. The two routes must agree exactly.
pub fn elementary_symmetric_by_series(
    n: usize,
    order: u32,
) -> Result<Vec<SparsePoly<Rational>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    let beta_inv = beta_inverse_cumulants(order);
    let mut series: TruncatedSeries<SparsePoly<Rational>> = TruncatedSeries::new(1, order)?;
    for i in 1..=order {
        let c_i = beta_inv.entry(&MultiIndex::new(vec![i]))?;
        series.set(
            MultiIndex::new(vec![i]),
            power_sum(i, n).scale_poly(&c_i),
        )?;
    }
    let expanded = series.exp()?;
    let vars = y_vars(n);
    Ok((0..=order)
        .map(|k| {
            let c = expanded.coeff(&MultiIndex::new(vec![k]));
            // Coefficients of low orders may come back as promoted
            // constants; pin them to the y-variables.
            if c.vars() == vars.as_slice() {
                c
            } else {
                SparsePoly::constant(vars.clone(), c.constant_value())
            }
        })
        .collect())
}

/// Trace moments E[(Tr A)^i] of a diagonal random matrix with n i.i.d.
/// eigenvalues, dense for i = 1..=order.
#[derive(Clone, PartialEq, Debug)]
pub struct TraceMomentTable {
    n: usize,
    moments: Vec<Rational>,
}

impl TraceMomentTable {
    pub fn new(n: usize, moments: Vec<Rational>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimension must be >= 1".into(),
            ));
        }
        Ok(TraceMomentTable { n, moments })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.moments.len() as u32
    }

    /// E[(Tr A)^i]; 1-based order.
    pub fn moment(&self, i: u32) -> Result<&Rational> {
        self.moments
            .get(i as usize - 1)
            .ok_or(Error::MissingOrder(i))
    }

    pub fn moments(&self) -> &[Rational] {
        &self.moments
    }
}

/// E[(Tr A)^i] = C_{i,A}(n): the cumulant polynomial of the eigenvalue law
/// evaluated at the matrix dimension.
pub fn trace_moments_from_matrix_cumulants(
    c_a: &SequenceTable<Rational>,
    n: usize,
    order: u32,
) -> Result<TraceMomentTable> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "matrix dimension must be >= 1".into(),
        ));
    }
    if c_a.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: c_a.dim(),
        });
    }
    let y = rat(n as i64);
    let mut moments = Vec::with_capacity(order as usize);
    for i in 1..=order {
        let p = cumulant_polynomial(&MultiIndex::new(vec![i]), c_a)?;
        moments.push(p.eval(&y));
    }
    TraceMomentTable::new(n, moments)
}

/// Recovers the eigenvalue-law cumulants from trace moments: the cumulant
/// sequence of Tr A is n times the matrix cumulants, so convert and divide.
/// Exact inverse of [`trace_moments_from_matrix_cumulants`].
pub fn matrix_cumulants_from_trace_moments(
    tm: &TraceMomentTable,
) -> Result<SequenceTable<Rational>> {
    let mut m = SequenceTable::moments(1, tm.order())?;
    for (k, value) in tm.moments().iter().enumerate() {
        m.set(MultiIndex::new(vec![k as u32 + 1]), value.clone())?;
    }
    let trace_cumulants = cumulants_from_moments(&m)?;
    Ok(trace_cumulants.scale_entries(&Rational::new(1.into(), (tm.n() as i64).into())))
}

/// Outcome of the sampling-invariance check: the eigenvalue cumulants
/// recovered from the full matrix and from the subsample must coincide.
#[derive(Clone, PartialEq, Debug)]
pub struct SamplingInvarianceReport {
    pub from_full: SequenceTable<Rational>,
    pub from_sample: SequenceTable<Rational>,
    pub pass: bool,
}

/// Simple random sampling keeps matrix cumulants invariant: trace moments
/// of an m-subsample of n i.i.d. eigenvalues are C_{i,X}(m), and converting
/// back with dimension m recovers the same cumulant table as the full
/// matrix does with dimension n.
pub fn sampling_invariance_check(
    c_x: &SequenceTable<Rational>,
    n: usize,
    m: usize,
    order: u32,
) -> Result<SamplingInvarianceReport> {
    if m > n {
        return Err(Error::InvalidParameter(format!(
            "subsample size {m} exceeds sample size {n}"
        )));
    }
    let full = trace_moments_from_matrix_cumulants(c_x, n, order)?;
    let sample = trace_moments_from_matrix_cumulants(c_x, m, order)?;
    let from_full = matrix_cumulants_from_trace_moments(&full)?;
    let from_sample = matrix_cumulants_from_trace_moments(&sample)?;
    let pass = from_full == from_sample && from_full == c_x.truncated(order);
    Ok(SamplingInvarianceReport {
        from_full,
        from_sample,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ratio;

    fn mi(entries: &[u32]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    fn table(entries: &[(u32, Rational)], order: u32) -> SequenceTable<Rational> {
        let mut t = SequenceTable::cumulants(1, order).unwrap();
        for (i, v) in entries {
            t.set(mi(&[*i]), v.clone()).unwrap();
        }
        t
    }

    #[test]
    fn weighted_sum_moment_first_orders() {
        let c = table(&[(1, ratio(1, 2)), (2, rat(3))], 3);
        let (expr, expanded) = weighted_sum_moment(1, &c, 3).unwrap();
        // c1 * s1
        assert_eq!(expr.poly().coeff_of(&mi(&[1])), ratio(1, 2));
        assert_eq!(expanded.coeff_of(&mi(&[1, 0, 0])), ratio(1, 2));
        assert_eq!(expanded.coeff_of(&mi(&[0, 0, 1])), ratio(1, 2));

        let (expr, _) = weighted_sum_moment(2, &c, 2).unwrap();
        // c2 s2 + c1^2 s1^2
        assert_eq!(expr.poly().coeff_of(&mi(&[0, 1])), rat(3));
        assert_eq!(expr.poly().coeff_of(&mi(&[2, 0])), ratio(1, 4));
        assert_eq!(expr.poly().num_terms(), 2);
    }

    #[test]
    fn weighted_sum_moment_at_ones_is_the_cumulant_polynomial_at_n() {
        let c = table(&[(1, ratio(2, 3)), (2, rat(-1)), (3, ratio(1, 5))], 3);
        for n in 1..=4usize {
            for i in 1..=3u32 {
                let (_, expanded) = weighted_sum_moment(i, &c, n).unwrap();
                let at_ones = expanded.eval(&vec![rat(1); n]).unwrap();
                let poly = cumulant_polynomial(&mi(&[i]), &c).unwrap();
                assert_eq!(at_ones, poly.eval(&rat(n as i64)), "i={i}, n={n}");
            }
        }
    }

    #[test]
    fn elementary_symmetric_small_cases() {
        let e = elementary_symmetric(2, 3).unwrap();
        // Exponential convention: e_1 = y1 + y2, e_2 = 2 y1 y2, e_3 = 0.
        assert_eq!(e[1].coeff_of(&mi(&[1, 0])), rat(1));
        assert_eq!(e[1].coeff_of(&mi(&[0, 1])), rat(1));
        assert_eq!(e[2].coeff_of(&mi(&[1, 1])), rat(2));
        assert_eq!(e[2].num_terms(), 1);
        assert!(e[3].num_terms() == 0);
    }

    #[test]
    fn elementary_symmetric_routes_agree() {
        for n in 1..=4usize {
            let direct = elementary_symmetric(n, 6).unwrap();
            let via_series = elementary_symmetric_by_series(n, 6).unwrap();
            assert_eq!(direct, via_series, "n = {n}");
        }
    }

    #[test]
    fn beta_inverse_second_cumulant_is_negative() {
        let t = beta_inverse_cumulants(4);
        assert_eq!(t.entry(&mi(&[1])).unwrap(), rat(1));
        assert_eq!(t.entry(&mi(&[2])).unwrap(), rat(-1));
        assert_eq!(t.entry(&mi(&[3])).unwrap(), rat(2));
        assert_eq!(t.entry(&mi(&[4])).unwrap(), rat(-6));
    }

    #[test]
    fn trace_moments_low_orders() {
        let c = table(&[(1, ratio(1, 2)), (2, rat(3))], 2);
        let tm = trace_moments_from_matrix_cumulants(&c, 4, 2).unwrap();
        // i=1: n c1; i=2: n c2 + n^2 c1^2.
        assert_eq!(tm.moment(1).unwrap(), &(rat(4) * ratio(1, 2)));
        assert_eq!(
            tm.moment(2).unwrap(),
            &(rat(4) * rat(3) + rat(16) * ratio(1, 4))
        );
    }

    #[test]
    fn identity_law_gives_powers_of_n() {
        let c = table(&[(1, rat(1))], 5);
        let tm = trace_moments_from_matrix_cumulants(&c, 3, 5).unwrap();
        for i in 1..=5u32 {
            assert_eq!(tm.moment(i).unwrap(), &rat(3i64.pow(i)));
        }
    }

    #[test]
    fn trace_conversion_round_trips() {
        let c = table(
            &[(1, ratio(2, 7)), (2, rat(1)), (3, ratio(-3, 2)), (4, rat(2))],
            4,
        );
        for n in 1..=5usize {
            let tm = trace_moments_from_matrix_cumulants(&c, n, 4).unwrap();
            let back = matrix_cumulants_from_trace_moments(&tm).unwrap();
            assert_eq!(back, c, "n = {n}");
        }
    }

    #[test]
    fn gaussian_eigenvalue_law_round_trips() {
        let c = table(&[(2, rat(1))], 6);
        let tm = trace_moments_from_matrix_cumulants(&c, 5, 6).unwrap();
        let back = matrix_cumulants_from_trace_moments(&tm).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn sampling_invariance_holds() {
        let c = table(
            &[(1, ratio(1, 3)), (2, ratio(5, 2)), (3, rat(-2)), (4, ratio(7, 5))],
            6,
        );
        let report = sampling_invariance_check(&c, 5, 2, 6).unwrap();
        assert!(report.pass);
        assert_eq!(report.from_full, report.from_sample);

        // m = n is trivially equal; single cumulant stays single.
        assert!(sampling_invariance_check(&c, 4, 4, 5).unwrap().pass);
        let single = table(&[(1, ratio(9, 4))], 5);
        let report = sampling_invariance_check(&single, 6, 1, 5).unwrap();
        assert!(report.pass);
        assert_eq!(report.from_sample, single);
    }

    #[test]
    fn sampling_check_rejects_oversampling() {
        let c = table(&[(1, rat(1))], 3);
        assert!(sampling_invariance_check(&c, 2, 3, 3).is_err());
    }
}
