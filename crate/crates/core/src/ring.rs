//! Exact coefficient arithmetic: arbitrary-precision rationals and sparse
//! multivariate polynomials in auxiliary indeterminates.
//!
//! Every coefficient path in the crate goes through [`Rational`] (backed by
//! `num`'s `BigRational`, which keeps values canonical: coprime, positive
//! denominator) or through [`SparsePoly`], a term map keyed by dense
//! exponent vectors in graded lexicographic order. Series and tables are
//! generic over [`CoeffRing`] so the same kernel runs on numeric and
//! symbolic coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::combinat::MultiIndex;
use crate::error::{Error, Result};

/// Exact rational number, canonical form maintained by construction.
pub type Rational = num::BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from(BigInt::from(n))
}

/// Shorthand for p/q.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// r^k for a non-negative integer exponent.
pub fn rat_pow(r: &Rational, k: u32) -> Rational {
    let mut acc: Rational = One::one();
    for _ in 0..k {
        acc *= r;
    }
    acc
}

/// Parses "p/q" or "p" with optional sign.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let num: BigInt = p.trim().parse().map_err(|_| bad())?;
            let den: BigInt = q.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from(num))
        }
    }
}

/// Serializes as "p/q", or "p" when the denominator is 1. Used for every
/// rational in JSON output so no float loss can occur.
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest f64, used only at the Monte Carlo boundary.
pub fn rational_to_f64(r: &Rational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or_else(|| {
        let n = num::ToPrimitive::to_f64(r.numer()).unwrap_or(f64::NAN);
        let d = num::ToPrimitive::to_f64(r.denom()).unwrap_or(f64::NAN);
        n / d
    })
}

/// The coefficient ring of series and sequence tables: a commutative ring
/// with an exact scalar action of the rationals.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Scalar multiplication by an exact rational.
    fn scale(&self, r: &Rational) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    fn from_rational(r: &Rational) -> Self {
        Self::one().scale(r)
    }

    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl CoeffRing for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

/// A sparse multivariate polynomial: named indeterminates and a term map
/// from dense exponent vectors to nonzero coefficients, kept in graded
/// lexicographic order for deterministic serialization.
///
/// Binary operations require matching variable lists, except that a
/// constant polynomial (no term with a nonzero exponent) is silently
/// promoted to the other operand's variables. That promotion is what makes
/// `SparsePoly` itself a [`CoeffRing`].
#[derive(Clone, PartialEq, Debug)]
pub struct SparsePoly<C: CoeffRing = Rational> {
    vars: Vec<String>,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: CoeffRing> SparsePoly<C> {
    pub fn zero_in(vars: Vec<String>) -> Self {
        SparsePoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: Vec<String>, value: C) -> Self {
        let mut p = SparsePoly::zero_in(vars);
        if !value.is_zero() {
            let exps = MultiIndex::zero(p.vars.len());
            p.terms.insert(exps, value);
        }
        p
    }

    /// The k-th variable as a monomial.
    pub fn var(vars: Vec<String>, k: usize) -> Self {
        assert!(k < vars.len(), "variable index out of range");
        let exps = MultiIndex::unit(vars.len(), k);
        let mut terms = BTreeMap::new();
        terms.insert(exps, C::one());
        SparsePoly { vars, terms }
    }

    pub fn monomial(vars: Vec<String>, exps: MultiIndex, coeff: C) -> Self {
        assert_eq!(exps.dim(), vars.len(), "exponent vector length mismatch");
        let mut p = SparsePoly::zero_in(vars);
        p.add_term(exps, coeff);
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_of(&self, exps: &MultiIndex) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// True when no term carries a nonzero exponent.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.is_zero())
    }

    pub fn constant_value(&self) -> C {
        self.coeff_of(&MultiIndex::zero(self.vars.len()))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: MultiIndex, coeff: C) {
        assert_eq!(
            exps.dim(),
            self.vars.len(),
            "exponent vector length mismatch"
        );
        let updated = match self.terms.get(&exps) {
            Some(existing) => existing.add(&coeff),
            None => coeff,
        };
        if updated.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, updated);
        }
    }

    /// Rewrites a constant polynomial over a different variable list.
    /// Panics if the variable lists differ and `self` is not constant.
    fn promoted_to(&self, vars: &[String]) -> SparsePoly<C> {
        if self.vars == vars {
            return self.clone();
        }
        assert!(
            self.is_constant(),
            "polynomial variable sets differ: {:?} vs {:?}",
            self.vars,
            vars
        );
        SparsePoly::constant(vars.to_vec(), self.constant_value())
    }

    fn harmonized(&self, rhs: &SparsePoly<C>) -> (SparsePoly<C>, SparsePoly<C>) {
        if self.vars == rhs.vars {
            (self.clone(), rhs.clone())
        } else if self.is_constant() {
            (self.promoted_to(&rhs.vars), rhs.clone())
        } else {
            (self.clone(), rhs.promoted_to(&self.vars))
        }
    }

    pub fn add_poly(&self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        let (mut a, b) = self.harmonized(rhs);
        for (exps, coeff) in b.terms {
            a.add_term(exps, coeff);
        }
        a
    }

    pub fn neg_poly(&self) -> SparsePoly<C> {
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = coeff.neg();
        }
        out
    }

    pub fn sub_poly(&self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        self.add_poly(&rhs.neg_poly())
    }

    pub fn mul_poly(&self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        let (a, b) = self.harmonized(rhs);
        let mut out = SparsePoly::zero_in(a.vars.clone());
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                out.add_term(ea.add(eb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale_poly(&self, r: &Rational) -> SparsePoly<C> {
        if num::Zero::is_zero(r) {
            return SparsePoly::zero_in(self.vars.clone());
        }
        let mut out = self.clone();
        for coeff in out.terms.values_mut() {
            *coeff = coeff.scale(r);
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn pow_poly(&self, k: u32) -> SparsePoly<C> {
        let mut acc = SparsePoly::constant(self.vars.clone(), C::one());
        for _ in 0..k {
            acc = acc.mul_poly(self);
        }
        acc
    }

    /// Exact evaluation at a rational point; the point length must equal
    /// the number of indeterminates.
    pub fn eval(&self, point: &[Rational]) -> Result<C> {
        if point.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                found: point.len(),
            });
        }
        let mut acc = C::zero();
        for (exps, coeff) in &self.terms {
            let mut m: Rational = One::one();
            for (x, &e) in point.iter().zip(exps.entries()) {
                m *= rat_pow(x, e);
            }
            acc = acc.add(&coeff.scale(&m));
        }
        Ok(acc)
    }

    /// Substitutes `images[k]` for the k-th variable and expands. All
    /// images must share one variable list.
    pub fn substitute(&self, images: &[SparsePoly<C>]) -> Result<SparsePoly<C>> {
        if images.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                found: images.len(),
            });
        }
        let target_vars = images
            .iter()
            .find(|p| !p.is_constant())
            .map(|p| p.vars.clone())
            .unwrap_or_else(|| images.first().map(|p| p.vars.clone()).unwrap_or_default());
        let mut acc = SparsePoly::zero_in(target_vars.clone());
        for (exps, coeff) in &self.terms {
            let mut term = SparsePoly::constant(target_vars.clone(), coeff.clone());
            for (image, &e) in images.iter().zip(exps.entries()) {
                if e > 0 {
                    term = term.mul_poly(&image.pow_poly(e));
                }
            }
            acc = acc.add_poly(&term);
        }
        Ok(acc)
    }

    /// Umbral substitution for a univariate polynomial: each power y^l is
    /// replaced by the looked-up value g_l. A constant term passes through
    /// unchanged (g_0 is never consulted). A `None` lookup yields an error
    /// naming the missing order.
    pub fn umbral_substitute_power(
        &self,
        lookup: impl Fn(u32) -> Option<Rational>,
    ) -> Result<C> {
        if self.vars.len() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.vars.len(),
            });
        }
        let mut acc = C::zero();
        for (exps, coeff) in &self.terms {
            let l = exps.get(0);
            if l == 0 {
                acc = acc.add(coeff);
                continue;
            }
            let g = lookup(l).ok_or(Error::MissingOrder(l))?;
            acc = acc.add(&coeff.scale(&g));
        }
        Ok(acc)
    }

    /// Umbral substitution for the multivariate case: each monomial
    /// y_1^{e_1}...y_n^{e_n} is replaced by the looked-up value at
    /// (e_1,...,e_n). The zero monomial always maps to 1.
    pub fn umbral_substitute(
        &self,
        lookup: impl Fn(&MultiIndex) -> Option<Rational>,
    ) -> Result<C> {
        let mut acc = C::zero();
        for (exps, coeff) in &self.terms {
            if exps.is_zero() {
                acc = acc.add(coeff);
                continue;
            }
            let g = lookup(exps).ok_or_else(|| Error::MissingIndex(exps.clone()))?;
            acc = acc.add(&coeff.scale(&g));
        }
        Ok(acc)
    }
}

impl SparsePoly<Rational> {
    /// Leading sign normalization for display only.
    fn term_string(vars: &[String], exps: &MultiIndex, coeff: &Rational) -> String {
        let mut factors: Vec<String> = Vec::new();
        let abs = coeff.abs();
        if !abs.is_one() || exps.is_zero() {
            factors.push(rational_string(&abs));
        }
        for (name, &e) in vars.iter().zip(exps.entries()) {
            match e {
                0 => {}
                1 => factors.push(name.clone()),
                _ => factors.push(format!("{name}^{e}")),
            }
        }
        factors.join("*")
    }
}

impl fmt::Display for SparsePoly<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest graded-lex term first, matching the usual display order.
        let mut first = true;
        for (exps, coeff) in self.terms.iter().rev() {
            let negative = coeff.is_negative();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", Self::term_string(&self.vars, exps, coeff))?;
        }
        Ok(())
    }
}

impl fmt::Display for SparsePoly<SparsePoly<Rational>> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({coeff})")?;
            for (name, &e) in self.vars.iter().zip(exps.entries()) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl CoeffRing for SparsePoly<Rational> {
    fn zero() -> Self {
        SparsePoly::zero_in(Vec::new())
    }
    fn one() -> Self {
        SparsePoly::constant(Vec::new(), One::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.add_poly(rhs)
    }
    fn neg(&self) -> Self {
        self.neg_poly()
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.mul_poly(rhs)
    }
    fn scale(&self, r: &Rational) -> Self {
        self.scale_poly(r)
    }
}

impl SparsePoly<SparsePoly<Rational>> {
    /// Merges a polynomial-over-polynomials into a single flat polynomial.
    /// Outer variables come first; every non-constant coefficient must use
    /// one common variable list.
    pub fn flatten(&self) -> Result<SparsePoly<Rational>> {
        let inner_vars = self
            .terms
            .values()
            .find(|c| !c.is_constant())
            .map(|c| c.vars().to_vec())
            .unwrap_or_default();
        let mut vars = self.vars.clone();
        vars.extend(inner_vars.iter().cloned());
        let mut out = SparsePoly::zero_in(vars);
        for (outer_exps, coeff) in &self.terms {
            let coeff = if coeff.vars() == inner_vars.as_slice() {
                coeff.clone()
            } else if coeff.is_constant() {
                SparsePoly::constant(inner_vars.clone(), coeff.constant_value())
            } else {
                return Err(Error::InvalidParameter(format!(
                    "coefficient variable sets differ: {:?} vs {:?}",
                    coeff.vars(),
                    inner_vars
                )));
            };
            for (inner_exps, value) in coeff.terms() {
                let mut exps = outer_exps.entries().to_vec();
                exps.extend_from_slice(inner_exps.entries());
                out.add_term(MultiIndex::new(exps), value.clone());
            }
        }
        Ok(out)
    }
}

/// Exact polynomial evaluation (free-function form of [`SparsePoly::eval`]).
pub fn poly_eval<C: CoeffRing>(p: &SparsePoly<C>, point: &[Rational]) -> Result<C> {
    p.eval(point)
}
