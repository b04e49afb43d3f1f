//! Seeded Monte Carlo oracle for the symbolic pipeline: simulates Merton
//! jump diffusion, common-clock variance gamma, compound-Poisson random
//! sums and diagonal random matrices, and reports empirical moments with
//! batch-means standard errors.
//!
//! Floats exist only in this module; rationals convert at the boundary.
//! Sampling is deterministic per (seed, spec): each of the 100 batches runs
//! on its own counter-indexed ChaCha substream and the batch results are
//! merged in batch order, so estimates are bit-for-bit reproducible within
//! one build no matter how the batches are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use crate::combinat::{indices_up_to, MultiIndex};
use crate::cumulant::{
    cumulants_from_moments, moments_from_cumulants, random_sum_cumulants, SequenceTable,
};
use crate::error::{Error, Result};
use crate::models::{merton_moments, vg_moments, MertonSpec, VgSpec};
use crate::ring::{rat_pow, rational_to_f64, Rational};
use crate::symfunc::trace_moments_from_matrix_cumulants;

const BATCHES: u64 = 100;

/// A finitely supported distribution given by exact (value, probability)
/// pairs. Probabilities must be non-negative and sum to one exactly.
#[derive(Clone, PartialEq, Debug)]
pub struct FiniteSupport {
    points: Vec<(Rational, Rational)>,
}

impl FiniteSupport {
    pub fn new(points: Vec<(Rational, Rational)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty support".into()));
        }
        let mut total = Rational::from(num::BigInt::from(0));
        for (_, p) in &points {
            if p < &Rational::from(num::BigInt::from(0)) {
                return Err(Error::InvalidParameter("negative probability".into()));
            }
            total += p;
        }
        if total != Rational::from(num::BigInt::from(1)) {
            return Err(Error::InvalidParameter(
                "probabilities must sum to 1".into(),
            ));
        }
        Ok(FiniteSupport { points })
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    /// Exact raw moments m_i = sum p v^i for i = 1..=order.
    pub fn moments(&self, order: u32) -> SequenceTable<Rational> {
        let mut t = SequenceTable::moments(1, order).expect("dim 1");
        for i in 1..=order {
            let mut m = Rational::from(num::BigInt::from(0));
            for (v, p) in &self.points {
                m += p * rat_pow(v, i);
            }
            t.set(MultiIndex::new(vec![i]), m).expect("in range");
        }
        t
    }

    pub fn cumulants(&self, order: u32) -> Result<SequenceTable<Rational>> {
        cumulants_from_moments(&self.moments(order))
    }

    fn cumulative_f64(&self) -> Vec<(f64, f64)> {
        let mut acc = 0.0;
        self.points
            .iter()
            .map(|(v, p)| {
                acc += rational_to_f64(p);
                (acc, rational_to_f64(v))
            })
            .collect()
    }
}

/// A compound-Poisson random sum: a Poisson(intensity) number of i.i.d.
/// jumps drawn from a finite support.
#[derive(Clone, PartialEq, Debug)]
pub struct RandomSumSpec {
    pub intensity: Rational,
    pub jump: FiniteSupport,
}

/// A diagonal random matrix: n i.i.d. eigenvalues from a finite support;
/// the simulated observable is Tr A.
#[derive(Clone, PartialEq, Debug)]
pub struct MatrixSpec {
    pub n: usize,
    pub eigenvalues: FiniteSupport,
}

#[derive(Clone, PartialEq, Debug)]
pub enum ModelSpec {
    Merton(MertonSpec),
    VarianceGamma(VgSpec),
    RandomSum(RandomSumSpec),
    Matrix(MatrixSpec),
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Merton(m) => m.dim(),
            ModelSpec::VarianceGamma(v) => v.dim(),
            ModelSpec::RandomSum(_) | ModelSpec::Matrix(_) => 1,
        }
    }
}

/// What to simulate: a model, a sample count, an RNG seed and the largest
/// total moment order to estimate.
#[derive(Clone, PartialEq, Debug)]
pub struct SampleSpec {
    pub model: ModelSpec,
    pub samples: u64,
    pub seed: u64,
    pub max_order: u32,
}

/// One estimated mixed moment with its batch-means standard error.
#[derive(Clone, Debug)]
pub struct MomentEstimate {
    pub index: MultiIndex,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

fn to_f64_vec(xs: &[Rational]) -> Vec<f64> {
    xs.iter().map(rational_to_f64).collect()
}

fn to_f64_mat(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    m.iter().map(|row| to_f64_vec(row)).collect()
}

/// Cholesky factor of a positive semidefinite matrix; zero pivots are
/// tolerated so degenerate covariances (e.g. a zero block) sample fine.
fn cholesky(cov: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = cov.len();
    let scale = cov
        .iter()
        .flatten()
        .fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let tol = 1e-10 * scale;
    let mut l = vec![vec![0.0; d]; d];
    for j in 0..d {
        let mut diag = cov[j][j];
        for k in 0..j {
            diag -= l[j][k] * l[j][k];
        }
        if diag < -tol {
            return Err(Error::InvalidParameter(
                "covariance is not positive semidefinite".into(),
            ));
        }
        let pivot = if diag > tol { diag.sqrt() } else { 0.0 };
        l[j][j] = pivot;
        for i in (j + 1)..d {
            let mut v = cov[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k];
            }
            if pivot > 0.0 {
                l[i][j] = v / pivot;
            } else if v.abs() > tol {
                return Err(Error::InvalidParameter(
                    "covariance is not positive semidefinite".into(),
                ));
            }
        }
    }
    Ok(l)
}

fn lower_mul(l: &[Vec<f64>], z: &[f64], out: &mut [f64]) {
    for i in 0..l.len() {
        let mut acc = 0.0;
        for k in 0..=i {
            acc += l[i][k] * z[k];
        }
        out[i] = acc;
    }
}

fn draw_from(cumulative: &[(f64, f64)], rng: &mut ChaCha12Rng) -> f64 {
    let u: f64 = rng.gen();
    for (c, v) in cumulative {
        if u <= *c {
            return *v;
        }
    }
    cumulative.last().expect("nonempty support").1
}

enum Sampler {
    Merton {
        dim: usize,
        drift_t: Vec<f64>,
        diffusion: Vec<Vec<f64>>,
        sqrt_t: f64,
        jumps: Option<Poisson<f64>>,
        jump_mean: Vec<f64>,
        jump_chol: Vec<Vec<f64>>,
    },
    VarianceGamma {
        dim: usize,
        theta: Vec<f64>,
        chol: Vec<Vec<f64>>,
        clock: Option<Gamma<f64>>,
    },
    RandomSum {
        counts: Option<Poisson<f64>>,
        jump: Vec<(f64, f64)>,
    },
    Matrix {
        n: usize,
        eigenvalues: Vec<(f64, f64)>,
    },
}

impl Sampler {
    fn prepare(model: &ModelSpec) -> Result<Self> {
        match model {
            ModelSpec::Merton(spec) => {
                let t = rational_to_f64(spec.horizon());
                let rate_t = rational_to_f64(spec.jump_intensity()) * t;
                if rate_t < 0.0 {
                    return Err(Error::InvalidParameter("negative jump rate".into()));
                }
                let jumps = if rate_t > 0.0 {
                    Some(Poisson::new(rate_t).map_err(|e| {
                        Error::InvalidParameter(format!("bad jump intensity: {e}"))
                    })?)
                } else {
                    None
                };
                Ok(Sampler::Merton {
                    dim: spec.dim(),
                    drift_t: to_f64_vec(spec.drift()).iter().map(|m| m * t).collect(),
                    diffusion: cholesky(&to_f64_mat(spec.cov()))?,
                    sqrt_t: t.sqrt(),
                    jumps,
                    jump_mean: to_f64_vec(spec.jump().mean()),
                    jump_chol: cholesky(&to_f64_mat(spec.jump().cov()))?,
                })
            }
            ModelSpec::VarianceGamma(spec) => {
                let t = rational_to_f64(spec.t());
                let nu = rational_to_f64(spec.nu());
                let clock = if t > 0.0 {
                    Some(Gamma::new(t / nu, nu).map_err(|e| {
                        Error::InvalidParameter(format!("bad gamma clock: {e}"))
                    })?)
                } else {
                    None
                };
                Ok(Sampler::VarianceGamma {
                    dim: spec.dim(),
                    theta: to_f64_vec(spec.theta()),
                    chol: cholesky(&to_f64_mat(spec.cov()))?,
                    clock,
                })
            }
            ModelSpec::RandomSum(spec) => {
                let rate = rational_to_f64(&spec.intensity);
                if rate < 0.0 {
                    return Err(Error::InvalidParameter("negative intensity".into()));
                }
                let counts = if rate > 0.0 {
                    Some(Poisson::new(rate).map_err(|e| {
                        Error::InvalidParameter(format!("bad intensity: {e}"))
                    })?)
                } else {
                    None
                };
                Ok(Sampler::RandomSum {
                    counts,
                    jump: spec.jump.cumulative_f64(),
                })
            }
            ModelSpec::Matrix(spec) => {
                if spec.n == 0 {
                    return Err(Error::InvalidParameter(
                        "matrix dimension must be >= 1".into(),
                    ));
                }
                Ok(Sampler::Matrix {
                    n: spec.n,
                    eigenvalues: spec.eigenvalues.cumulative_f64(),
                })
            }
        }
    }

    fn draw(&self, rng: &mut ChaCha12Rng, x: &mut [f64], scratch: &mut [f64]) {
        match self {
            Sampler::Merton {
                dim,
                drift_t,
                diffusion,
                sqrt_t,
                jumps,
                jump_mean,
                jump_chol,
            } => {
                let d = *dim;
                for z in scratch[..d].iter_mut() {
                    *z = rng.sample(StandardNormal);
                }
                let (z, body) = scratch.split_at_mut(d);
                lower_mul(diffusion, z, &mut body[..d]);
                for r in 0..d {
                    x[r] = drift_t[r] + sqrt_t * body[r];
                }
                let n_jumps = match jumps {
                    Some(p) => p.sample(rng) as u64,
                    None => 0,
                };
                for _ in 0..n_jumps {
                    for z in scratch[..d].iter_mut() {
                        *z = rng.sample(StandardNormal);
                    }
                    let (z, body) = scratch.split_at_mut(d);
                    lower_mul(jump_chol, z, &mut body[..d]);
                    for r in 0..d {
                        x[r] += jump_mean[r] + body[r];
                    }
                }
            }
            Sampler::VarianceGamma {
                dim,
                theta,
                chol,
                clock,
            } => {
                let d = *dim;
                let g = match clock {
                    Some(gamma) => gamma.sample(rng),
                    None => 0.0,
                };
                for z in scratch[..d].iter_mut() {
                    *z = rng.sample(StandardNormal);
                }
                let (z, body) = scratch.split_at_mut(d);
                lower_mul(chol, z, &mut body[..d]);
                let sqrt_g = g.sqrt();
                for r in 0..d {
                    x[r] = theta[r] * g + sqrt_g * body[r];
                }
            }
            Sampler::RandomSum { counts, jump } => {
                let n = match counts {
                    Some(p) => p.sample(rng) as u64,
                    None => 0,
                };
                let mut acc = 0.0;
                for _ in 0..n {
                    acc += draw_from(jump, rng);
                }
                x[0] = acc;
            }
            Sampler::Matrix { n, eigenvalues } => {
                let mut acc = 0.0;
                for _ in 0..*n {
                    acc += draw_from(eigenvalues, rng);
                }
                x[0] = acc;
            }
        }
    }
}

/// Simulates the model and estimates every mixed moment with total order
/// 1..=max_order. Deterministic per (seed, spec).
pub fn simulate_moments(spec: &SampleSpec) -> Result<Vec<MomentEstimate>> {
    if spec.samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let sampler = Sampler::prepare(&spec.model)?;
    let d = spec.model.dim();
    let max_order = spec.max_order;
    let indices: Vec<MultiIndex> = indices_up_to(d, max_order)
        .into_iter()
        .filter(|i| !i.is_zero())
        .collect();

    let batch_count = BATCHES.min(spec.samples);
    let base = spec.samples / batch_count;
    let remainder = spec.samples % batch_count;
    let batch_size = |b: u64| base + u64::from(b < remainder);

    let batch_sums: Vec<Vec<f64>> = (0..batch_count)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
            rng.set_stream(b + 1);
            let mut sums = vec![0.0; indices.len()];
            let mut x = vec![0.0; d];
            let mut scratch = vec![0.0; 2 * d];
            let mut powers = vec![vec![1.0; max_order as usize + 1]; d];
            for _ in 0..batch_size(b) {
                sampler.draw(&mut rng, &mut x, &mut scratch);
                for r in 0..d {
                    for e in 1..=max_order as usize {
                        powers[r][e] = powers[r][e - 1] * x[r];
                    }
                }
                for (k, idx) in indices.iter().enumerate() {
                    let mut m = 1.0;
                    for (r, &e) in idx.entries().iter().enumerate() {
                        if e > 0 {
                            m *= powers[r][e as usize];
                        }
                    }
                    sums[k] += m;
                }
            }
            sums
        })
        .collect();

    let total_samples = spec.samples as f64;
    let mut out = Vec::with_capacity(indices.len());
    for (k, idx) in indices.iter().enumerate() {
        let total: f64 = batch_sums.iter().map(|sums| sums[k]).sum();
        let estimate = total / total_samples;
        let std_error = if batch_count >= 2 {
            let means: Vec<f64> = batch_sums
                .iter()
                .enumerate()
                .map(|(b, sums)| sums[k] / batch_size(b as u64) as f64)
                .collect();
            let grand = means.iter().sum::<f64>() / means.len() as f64;
            let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>()
                / ((means.len() - 1) as f64);
            (var / means.len() as f64).sqrt()
        } else {
            f64::INFINITY
        };
        out.push(MomentEstimate {
            index: idx.clone(),
            estimate,
            std_error,
            samples: spec.samples,
        });
    }
    Ok(out)
}

/// The exact moment table the simulation is validated against, computed
/// through the symbolic pipeline for the same model and order.
pub fn symbolic_moments(spec: &SampleSpec) -> Result<SequenceTable<Rational>> {
    match &spec.model {
        ModelSpec::Merton(m) => merton_moments(m, spec.max_order),
        ModelSpec::VarianceGamma(v) => vg_moments(v, spec.max_order),
        ModelSpec::RandomSum(rs) => {
            let jump_cumulants = rs.jump.cumulants(spec.max_order)?;
            let outer = SequenceTable::poisson(&rs.intensity, spec.max_order);
            let sum_cumulants = random_sum_cumulants(&outer, &jump_cumulants)?;
            moments_from_cumulants(&sum_cumulants)
        }
        ModelSpec::Matrix(m) => {
            let c_a = m.eigenvalues.cumulants(spec.max_order)?;
            let tm = trace_moments_from_matrix_cumulants(&c_a, m.n, spec.max_order)?;
            let mut t = SequenceTable::moments(1, spec.max_order)?;
            for i in 1..=spec.max_order {
                t.set(MultiIndex::new(vec![i]), tm.moment(i)?.clone())?;
            }
            Ok(t)
        }
    }
}

/// One line of a validation report.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub index: MultiIndex,
    pub symbolic: Rational,
    pub estimate: f64,
    pub std_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub threshold: f64,
    pub rows: Vec<ComparisonRow>,
    pub all_pass: bool,
}

/// Per-index check |symbolic - estimate| <= k * SE. Every index covered by
/// the symbolic table must have an estimate and vice versa.
pub fn compare(
    symbolic: &SequenceTable<Rational>,
    estimates: &[MomentEstimate],
    k: f64,
) -> Result<CompareReport> {
    let expected: Vec<MultiIndex> = indices_up_to(symbolic.dim(), symbolic.order())
        .into_iter()
        .filter(|i| !i.is_zero())
        .collect();
    let mut rows = Vec::with_capacity(expected.len());
    let mut all_pass = true;
    for idx in &expected {
        let est = estimates
            .iter()
            .find(|e| &e.index == idx)
            .ok_or_else(|| Error::MissingIndex(idx.clone()))?;
        let symbolic_value = symbolic.entry(idx)?;
        let sym_f = rational_to_f64(&symbolic_value);
        let pass = (sym_f - est.estimate).abs() <= k * est.std_error;
        all_pass &= pass;
        rows.push(ComparisonRow {
            index: idx.clone(),
            symbolic: symbolic_value,
            estimate: est.estimate,
            std_error: est.std_error,
            pass,
        });
    }
    for est in estimates {
        // Estimates beyond the symbolic order mean the orders do not align.
        symbolic.entry(&est.index)?;
    }
    Ok(CompareReport {
        threshold: k,
        rows,
        all_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::GaussianSpec;
    use crate::ring::{rat, ratio};

    fn mi(entries: &[u32]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    fn fair_coin() -> FiniteSupport {
        FiniteSupport::new(vec![(rat(0), ratio(1, 2)), (rat(1), ratio(1, 2))]).unwrap()
    }

    fn brownian_spec(samples: u64, seed: u64) -> SampleSpec {
        let merton = MertonSpec::new(
            vec![rat(0)],
            vec![vec![rat(1)]],
            rat(0),
            GaussianSpec::new(vec![rat(0)], vec![vec![rat(1)]]).unwrap(),
            rat(1),
        )
        .unwrap();
        SampleSpec {
            model: ModelSpec::Merton(merton),
            samples,
            seed,
            max_order: 2,
        }
    }

    #[test]
    fn identical_seeds_reproduce_bit_for_bit() {
        let spec = SampleSpec {
            model: ModelSpec::RandomSum(RandomSumSpec {
                intensity: rat(2),
                jump: fair_coin(),
            }),
            samples: 20_000,
            seed: 7,
            max_order: 3,
        };
        let a = simulate_moments(&spec).unwrap();
        let b = simulate_moments(&spec).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.estimate.to_bits(), y.estimate.to_bits());
            assert_eq!(x.std_error.to_bits(), y.std_error.to_bits());
        }
    }

    #[test]
    fn brownian_marginal_matches_unit_variance() {
        let spec = brownian_spec(200_000, 11);
        let est = simulate_moments(&spec).unwrap();
        let sym = symbolic_moments(&spec).unwrap();
        let report = compare(&sym, &est, 4.0).unwrap();
        assert!(report.all_pass, "{:?}", report.rows);
    }

    #[test]
    fn doubling_samples_shrinks_the_error_like_sqrt_two() {
        let se_of = |samples: u64| {
            let spec = brownian_spec(samples, 13);
            let est = simulate_moments(&spec).unwrap();
            est.iter()
                .find(|e| e.index == mi(&[1]))
                .unwrap()
                .std_error
        };
        let ratio = se_of(80_000) / se_of(40_000);
        let target = std::f64::consts::FRAC_1_SQRT_2;
        assert!(
            (ratio / target - 1.0).abs() < 0.2,
            "se ratio {ratio} vs {target}"
        );
    }

    #[test]
    fn compound_poisson_sum_matches_symbolic_moments() {
        let spec = SampleSpec {
            model: ModelSpec::RandomSum(RandomSumSpec {
                intensity: ratio(3, 2),
                jump: FiniteSupport::new(vec![
                    (rat(-1), ratio(1, 4)),
                    (rat(1), ratio(1, 2)),
                    (rat(2), ratio(1, 4)),
                ])
                .unwrap(),
            }),
            samples: 200_000,
            seed: 29,
            max_order: 3,
        };
        let report = compare(
            &symbolic_moments(&spec).unwrap(),
            &simulate_moments(&spec).unwrap(),
            4.0,
        )
        .unwrap();
        assert!(report.all_pass, "{:?}", report.rows);
    }

    #[test]
    fn trace_of_diagonal_matrix_matches_symbolic_moments() {
        let spec = SampleSpec {
            model: ModelSpec::Matrix(MatrixSpec {
                n: 4,
                eigenvalues: fair_coin(),
            }),
            samples: 150_000,
            seed: 31,
            max_order: 3,
        };
        let report = compare(
            &symbolic_moments(&spec).unwrap(),
            &simulate_moments(&spec).unwrap(),
            4.0,
        )
        .unwrap();
        assert!(report.all_pass, "{:?}", report.rows);
    }

    #[test]
    fn compare_threshold_semantics() {
        let mut sym = SequenceTable::moments(1, 1).unwrap();
        sym.set(mi(&[1]), rat(1)).unwrap();
        let est = vec![MomentEstimate {
            index: mi(&[1]),
            estimate: 1.0,
            std_error: 0.01,
            samples: 100,
        }];
        assert!(compare(&sym, &est, 0.5).unwrap().all_pass);

        // Shift the symbolic value by 10 SE: k = 4 must fail.
        let mut shifted = SequenceTable::moments(1, 1).unwrap();
        shifted.set(mi(&[1]), ratio(11, 10)).unwrap();
        let report = compare(&shifted, &est, 4.0).unwrap();
        assert!(!report.all_pass);
    }

    #[test]
    fn compare_requires_full_coverage() {
        let mut sym = SequenceTable::moments(1, 2).unwrap();
        sym.set(mi(&[1]), rat(1)).unwrap();
        let est = vec![MomentEstimate {
            index: mi(&[1]),
            estimate: 1.0,
            std_error: 0.1,
            samples: 10,
        }];
        assert_eq!(
            compare(&sym, &est, 4.0).unwrap_err(),
            Error::MissingIndex(mi(&[2]))
        );
    }

    #[test]
    fn non_psd_covariance_is_rejected() {
        let merton = MertonSpec::new(
            vec![rat(0), rat(0)],
            vec![vec![rat(1), rat(2)], vec![rat(2), rat(1)]],
            rat(0),
            GaussianSpec::new(vec![rat(0), rat(0)], vec![
                vec![rat(1), rat(0)],
                vec![rat(0), rat(1)],
            ])
            .unwrap(),
            rat(1),
        )
        .unwrap();
        let spec = SampleSpec {
            model: ModelSpec::Merton(merton),
            samples: 10,
            seed: 1,
            max_order: 2,
        };
        assert!(simulate_moments(&spec).is_err());
    }

    #[test]
    fn degenerate_supports_and_rates() {
        // Zero intensity: the sum is identically zero.
        let spec = SampleSpec {
            model: ModelSpec::RandomSum(RandomSumSpec {
                intensity: rat(0),
                jump: fair_coin(),
            }),
            samples: 1_000,
            seed: 3,
            max_order: 2,
        };
        let est = simulate_moments(&spec).unwrap();
        assert_eq!(est[0].estimate, 0.0);
        assert_eq!(est[1].estimate, 0.0);

        assert!(FiniteSupport::new(vec![(rat(1), ratio(1, 3))]).is_err());
        assert!(FiniteSupport::new(vec![(rat(1), ratio(4, 3)), (rat(0), ratio(-1, 3))]).is_err());
    }
}
