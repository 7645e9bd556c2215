//! Pseudo-random samples from black-box smooth probability densities in
//! 1D and 2D by inverse transform sampling.
//!
//! The univariate path fits the density with an adaptive Chebyshev
//! expansion, integrates it coefficient-wise into a CDF, and inverts the
//! CDF pointwise by bisection. The bivariate path first compresses the
//! density into a low-rank sum of separable terms by cross approximation,
//! samples X from the marginal, then Y from the conditional slice — all
//! without evaluating the original density again after construction.
//!
//! ```
//! use chebsample::{
//!     cheb::Interval,
//!     density::DensityFn,
//!     rng::UniformSource,
//!     sampler1d::{sample_1d, DEFAULT_TOL_X},
//! };
//!
//! let iv = Interval::new(-8.0, 8.0).unwrap();
//! let f = DensityFn::new_1d(iv, |x: f64| (-x * x / 2.0).exp());
//! let mut rng = UniformSource::new(42);
//! let batch = sample_1d(&f, iv, 1000, &mut rng, chebsample::cheb::DEFAULT_TOL, DEFAULT_TOL_X)
//!     .unwrap();
//! assert_eq!(batch.points.len(), 1000);
//! ```

pub mod bench;
pub mod cheb;
pub mod density;
pub mod error;
pub mod expr;
pub mod gof;
pub mod lowrank;
pub mod quad;
pub mod rejection;
pub mod rng;
pub mod sampler1d;
pub mod sampler2d;

pub use error::{Error, Result};
