//! Exact arithmetic for multivariate cumulant polynomial sequences.
//!
//! The crate is organized around the pipeline
//! partitions -> exact coefficients -> truncated series -> cumulant
//! operations, with applied layers on top:
//!
//! - [`combinat`]: multi-index partitions, compositions, augmented
//!   matrices and the combinatorial coefficients
//! - [`ring`]: arbitrary-precision rationals and sparse multivariate
//!   polynomials, the two coefficient rings
//! - [`series`]: truncated exponential-format power series (sum, product,
//!   exp, log, composition, Taylor re-centering)
//! - [`cumulant`]: moment/cumulant conversion, cumulant polynomials,
//!   random-sum and umbral-sum composition, multivariable forms
//! - [`models`]: Gaussian, Merton jump diffusion, variance gamma, Hermite
//!   polynomials, exponential families, Sheffer sequences
//! - [`symfunc`]: power sums, elementary symmetric polynomials,
//!   random-matrix trace moments, sampling invariance
//! - [`mc`]: the seeded Monte Carlo oracle with batch-means errors
//! - [`io`]: the JSON formats shared with the command-line front end
//!
//! Everything outside [`mc`] is exact: coefficients are arbitrary-precision
//! rationals (or polynomials over them) end to end. All values are
//! immutable and every operation is a pure function, so the whole API is
//! safe to call concurrently.

pub mod combinat;
pub mod cumulant;
pub mod error;
pub mod io;
pub mod mc;
pub mod models;
pub mod ring;
pub mod series;
pub mod symfunc;

pub use combinat::{MultiIndex, MultiIndexPartition, SizeCaps};
pub use cumulant::{CumulantPolynomial, SequenceTable, SubstitutionMode, TableKind};
pub use error::{Error, Result};
pub use ring::{CoeffRing, Rational, SparsePoly};
pub use series::TruncatedSeries;
