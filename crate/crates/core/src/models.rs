//! Applied constructors: Gaussian and Poisson tables, Merton jump
//! diffusion, common-clock variance gamma, multivariate Hermite
//! polynomials, exponential-family series, exponential tilting and Sheffer
//! sequences.
//!
//! All model parameters are exact rationals end to end; irrational inputs
//! must be approximated by the caller before entering this layer.

use crate::combinat::MultiIndex;
use crate::cumulant::{
    moments_from_cumulants, multivariable_cumulant_polynomial, random_sum_cumulants,
    SequenceTable, TableKind,
};
use crate::error::{Error, Result};
use crate::ring::{rat, CoeffRing, Rational, SparsePoly};
use crate::series::TruncatedSeries;

fn check_square_symmetric(cov: &[Vec<Rational>], d: usize) -> Result<()> {
    if cov.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: cov.len(),
        });
    }
    for row in cov {
        if row.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: row.len(),
            });
        }
    }
    for r in 0..d {
        for s in (r + 1)..d {
            if cov[r][s] != cov[s][r] {
                return Err(Error::InvalidParameter(format!(
                    "covariance not symmetric at ({r},{s})"
                )));
            }
        }
    }
    Ok(())
}

/// Mean vector and symmetric covariance matrix. Positive semidefiniteness
/// is the caller's responsibility; only the Monte Carlo module checks it.
#[derive(Clone, PartialEq, Debug)]
pub struct GaussianSpec {
    mean: Vec<Rational>,
    cov: Vec<Vec<Rational>>,
}

impl GaussianSpec {
    pub fn new(mean: Vec<Rational>, cov: Vec<Vec<Rational>>) -> Result<Self> {
        if mean.is_empty() {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        check_square_symmetric(&cov, mean.len())?;
        Ok(GaussianSpec { mean, cov })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[Rational] {
        &self.mean
    }

    pub fn cov(&self) -> &[Vec<Rational>] {
        &self.cov
    }
}

/// The Gaussian cumulant table without the order >= 2 gate; second-order
/// entries are only present when the order admits them.
fn gaussian_table(mean: &[Rational], cov: &[Vec<Rational>], order: u32) -> SequenceTable {
    let d = mean.len();
    let mut t = SequenceTable::cumulants(d, order).expect("dim >= 1");
    if order >= 1 {
        for (r, m_r) in mean.iter().enumerate() {
            t.set(MultiIndex::unit(d, r), m_r.clone()).expect("order 1");
        }
    }
    if order >= 2 {
        for r in 0..d {
            for s in r..d {
                let index = MultiIndex::unit(d, r).add(&MultiIndex::unit(d, s));
                t.set(index, cov[r][s].clone()).expect("order 2");
            }
        }
    }
    t
}

/// Cumulants of a multivariate Gaussian: unit indexes carry the mean,
/// second-order indexes the covariance, everything above is zero.
pub fn gaussian_cumulants(spec: &GaussianSpec, order: u32) -> Result<SequenceTable> {
    if order < 2 {
        return Err(Error::InvalidParameter(
            "gaussian table needs order >= 2".into(),
        ));
    }
    Ok(gaussian_table(spec.mean(), spec.cov(), order))
}

/// Merton jump diffusion: drift, diffusion covariance, Poisson jump
/// intensity, Gaussian jump law and time horizon.
#[derive(Clone, PartialEq, Debug)]
pub struct MertonSpec {
    drift: Vec<Rational>,
    cov: Vec<Vec<Rational>>,
    jump_intensity: Rational,
    jump: GaussianSpec,
    horizon: Rational,
}

impl MertonSpec {
    pub fn new(
        drift: Vec<Rational>,
        cov: Vec<Vec<Rational>>,
        jump_intensity: Rational,
        jump: GaussianSpec,
        horizon: Rational,
    ) -> Result<Self> {
        if drift.is_empty() {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        check_square_symmetric(&cov, drift.len())?;
        if jump.dim() != drift.len() {
            return Err(Error::DimensionMismatch {
                expected: drift.len(),
                found: jump.dim(),
            });
        }
        if jump_intensity < rat(0) {
            return Err(Error::InvalidParameter("jump intensity must be >= 0".into()));
        }
        if horizon < rat(0) {
            return Err(Error::InvalidParameter("horizon must be >= 0".into()));
        }
        Ok(MertonSpec {
            drift,
            cov,
            jump_intensity,
            jump,
            horizon,
        })
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn drift(&self) -> &[Rational] {
        &self.drift
    }

    pub fn cov(&self) -> &[Vec<Rational>] {
        &self.cov
    }

    pub fn jump_intensity(&self) -> &Rational {
        &self.jump_intensity
    }

    pub fn jump(&self) -> &GaussianSpec {
        &self.jump
    }

    pub fn horizon(&self) -> &Rational {
        &self.horizon
    }
}

/// The per-unit-time cumulant table of the Merton process: Gaussian part
/// plus intensity times the jump-law moments of every order >= 1 (the
/// compound-Poisson expansion of the jump integral).
pub fn merton_cumulants(spec: &MertonSpec, order: u32) -> Result<SequenceTable> {
    let gaussian_part = gaussian_table(spec.drift(), spec.cov(), order);
    let jump_cumulants = gaussian_table(spec.jump().mean(), spec.jump().cov(), order);
    let jump_moments = moments_from_cumulants(&jump_cumulants)?;
    let mut out = gaussian_part;
    for (i, m) in jump_moments.iter() {
        let updated = out.entry(i)? + m * spec.jump_intensity();
        out.set(i.clone(), updated)?;
    }
    Ok(out)
}

/// Moments of the Merton process at the horizon: the per-unit-time table
/// scaled linearly by t, then converted.
pub fn merton_moments(spec: &MertonSpec, order: u32) -> Result<SequenceTable> {
    let unit = merton_cumulants(spec, order)?;
    let at_t = unit.scale_entries(spec.horizon());
    moments_from_cumulants(&at_t)
}

/// Common-clock variance gamma: a Brownian motion with drift subordinated
/// to one Gamma clock.
#[derive(Clone, PartialEq, Debug)]
pub struct VgSpec {
    t: Rational,
    nu: Rational,
    theta: Vec<Rational>,
    cov: Vec<Vec<Rational>>,
}

impl VgSpec {
    pub fn new(
        t: Rational,
        nu: Rational,
        theta: Vec<Rational>,
        cov: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        check_square_symmetric(&cov, theta.len())?;
        if nu <= rat(0) {
            return Err(Error::InvalidParameter("nu must be > 0".into()));
        }
        if t < rat(0) {
            return Err(Error::InvalidParameter("t must be >= 0".into()));
        }
        Ok(VgSpec { t, nu, theta, cov })
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn nu(&self) -> &Rational {
        &self.nu
    }

    pub fn theta(&self) -> &[Rational] {
        &self.theta
    }

    pub fn cov(&self) -> &[Vec<Rational>] {
        &self.cov
    }
}

/// The Gamma-clock outer sequence: g_i = (t/nu)(i-1)!, the cumulants of
/// the subordinator at time t.
pub fn vg_outer_cumulants(t: &Rational, nu: &Rational, order: u32) -> Result<SequenceTable> {
    if num::Zero::is_zero(nu) {
        return Err(Error::InvalidParameter("nu must be nonzero".into()));
    }
    let ratio = t / nu;
    let mut g = SequenceTable::cumulants(1, order)?;
    for i in 1..=order {
        let value = &ratio * Rational::from(crate::combinat::factorial(i - 1));
        g.set(MultiIndex::new(vec![i]), value)?;
    }
    Ok(g)
}

/// Cumulants of the variance gamma process at time t: the Gamma outer
/// sequence composed with the Gaussian increment N(theta nu, Sigma nu).
pub fn vg_cumulants(spec: &VgSpec, order: u32) -> Result<SequenceTable> {
    let g = vg_outer_cumulants(spec.t(), spec.nu(), order)?;
    let inner_mean: Vec<Rational> = spec.theta().iter().map(|x| x * spec.nu()).collect();
    let inner_cov: Vec<Vec<Rational>> = spec
        .cov()
        .iter()
        .map(|row| row.iter().map(|x| x * spec.nu()).collect())
        .collect();
    let inner = gaussian_table(&inner_mean, &inner_cov, order);
    random_sum_cumulants(&g, &inner)
}

/// Moments of the variance gamma process at time t.
pub fn vg_moments(spec: &VgSpec, order: u32) -> Result<SequenceTable> {
    moments_from_cumulants(&vg_cumulants(spec, order)?)
}

fn hermite_vars(d: usize) -> Vec<String> {
    if d == 1 {
        vec!["y".to_string()]
    } else {
        (1..=d).map(|r| format!("y{r}")).collect()
    }
}

/// The multivariate Hermite polynomial H_i(y, Sigma): the coefficient of
/// z^i/i! in exp(<y,z> - <z, z Sigma>/2), obtained from the two-table
/// multivariable cumulant polynomial evaluated at (1, -1).
pub fn hermite(i: &MultiIndex, cov: &[Vec<Rational>]) -> Result<SparsePoly<Rational>> {
    let d = i.dim();
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    check_square_symmetric(cov, d)?;
    let order = i.total().max(2);
    let vars = hermite_vars(d);

    // First table: K_Y(z) = <y, z> with symbolic y entries.
    let mut linear: SequenceTable<SparsePoly<Rational>> =
        SequenceTable::cumulants(d, order)?;
    for r in 0..d {
        linear.set(MultiIndex::unit(d, r), SparsePoly::var(vars.clone(), r))?;
    }

    // Second table: the centered Gaussian, constant coefficients.
    let mut gauss: SequenceTable<SparsePoly<Rational>> = SequenceTable::cumulants(d, order)?;
    for r in 0..d {
        for s in r..d {
            let index = MultiIndex::unit(d, r).add(&MultiIndex::unit(d, s));
            gauss.set(index, SparsePoly::constant(vars.clone(), cov[r][s].clone()))?;
        }
    }

    let poly = multivariable_cumulant_polynomial(i, &[linear, gauss])?;
    poly.eval(&[rat(1), rat(-1)])
}

/// The exponential-family expansion F_X(theta) = exp{<theta,x> - K_X(theta)}
/// as a truncated series: the moment sequence of the umbral difference
/// x - X, whose cumulant table carries x_r - c_{e_r} at the unit indexes
/// and -c_i everywhere above (K_{x-X} = <x,theta> - K_X).
pub fn nef_series(x: &[Rational], c: &SequenceTable, order: u32) -> Result<TruncatedSeries> {
    c.require_kind(TableKind::Cumulant)?;
    let d = c.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    let order = order.min(c.order());
    let mut diff = SequenceTable::cumulants(d, order)?;
    for r in 0..d {
        let unit = MultiIndex::unit(d, r);
        diff.set(unit.clone(), &x[r] - c.entry(&unit)?)?;
    }
    for (i, value) in c.iter() {
        if i.total() >= 2 && i.total() <= order {
            let updated = diff.entry(i)?.sub(value);
            diff.set(i.clone(), updated)?;
        }
    }
    Ok(moments_from_cumulants(&diff)?.to_unit_series())
}

/// A shifted cumulant table together with the order through which it is
/// guaranteed exact (`None` when the input was a truncation).
#[derive(Clone, Debug)]
pub struct ShiftedTable {
    pub table: SequenceTable,
    pub exact_order: Option<u32>,
}

/// Taylor re-centering of a cumulant table at theta: the table of
/// c_{i,theta} = sum_j c_{i+j} theta^j / j!, the exponential tilt of the
/// sequence. The shifted constant term is dropped (the tilted table is
/// renormalized to a unit constant). Exactness follows the shift rule:
/// guaranteed only when the caller asserts the table is a complete
/// polynomial, reported alongside the result.
pub fn shifted_cumulants(
    c: &SequenceTable,
    theta: &[Rational],
    input_is_polynomial: bool,
) -> Result<ShiftedTable> {
    c.require_kind(TableKind::Cumulant)?;
    let shifted = c.to_unit_series().shift(theta, input_is_polynomial)?;
    Ok(ShiftedTable {
        table: SequenceTable::from_series(TableKind::Cumulant, &shifted.series),
        exact_order: shifted.exact_order,
    })
}

/// Coefficients s_i of g(theta) exp{K(theta)} with g = exp(K~): the moment
/// sequence of the convolved table K~ + K.
pub fn sheffer_coefficients(
    ctilde: &SequenceTable,
    c: &SequenceTable,
    order: u32,
) -> Result<SequenceTable> {
    let combined = crate::cumulant::convolve_cumulant_tables(&[
        ctilde.truncated(order),
        c.truncated(order),
    ])?;
    moments_from_cumulants(&combined)
}
