//! Bivariate inverse transform sampling: draw X from the marginal, then Y
//! from the conditional slice, all in coefficient space.

use crate::cheb::ChebSeries;
use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::lowrank::{aca_approximate, Domain2D, LowRank2D};
use crate::rng::UniformSource;
use crate::sampler1d::{bisect, Cdf1D, PairBatch};

/// Give up after this many consecutive degenerate conditional slices.
const MAX_REDRAWS: u32 = 100;

/// Precomputed state for repeated 2D draws: the low-rank factorization, the
/// marginal CDF, and per-column antiderivatives so each conditional CDF is
/// a coefficient-space linear combination rather than a fresh approximation.
pub struct Sampler2DSession {
    lr: LowRank2D,
    marginal_cdf: Cdf1D,
    col_antiderivatives: Vec<ChebSeries>,
    col_masses: Vec<f64>,
}

impl Sampler2DSession {
    pub fn low_rank(&self) -> &LowRank2D {
        &self.lr
    }

    pub fn marginal_cdf(&self) -> &Cdf1D {
        &self.marginal_cdf
    }

    pub fn col_masses(&self) -> &[f64] {
        &self.col_masses
    }

    pub fn col_antiderivatives(&self) -> &[ChebSeries] {
        &self.col_antiderivatives
    }
}

/// Factorize the density, build the marginal CDF directly from the marginal
/// series (no re-approximation), and precompute column antiderivatives.
pub fn build_session(f: &DensityFn, dom: Domain2D, tol: f64) -> Result<Sampler2DSession> {
    let lr = aca_approximate(f, dom, tol)?;
    let marginal = lr.marginal_x();
    let marginal_cdf = Cdf1D::from_series(marginal, tol)?;
    let col_antiderivatives: Vec<ChebSeries> =
        lr.cols().iter().map(|c| c.antiderivative()).collect();
    let col_masses: Vec<f64> = lr.cols().iter().map(|c| c.integrate()).collect();
    Ok(Sampler2DSession {
        lr,
        marginal_cdf,
        col_antiderivatives,
        col_masses,
    })
}

/// The conditional y-CDF at a fixed x, assembled from precomputed column
/// antiderivatives: `F(y) = Σ_j w_j C_j(y) / Σ_j w_j ∫c_j`,
/// `w_j = σ_j r_j(x0)`.
fn conditional_cdf_series(session: &Sampler2DSession, x0: f64) -> Result<(ChebSeries, f64)> {
    let lr = &session.lr;
    let weights: Vec<f64> = (0..lr.rank())
        .map(|j| lr.sigmas()[j] * lr.rows()[j].eval(x0))
        .collect();
    let mass: f64 = weights
        .iter()
        .zip(&session.col_masses)
        .map(|(w, m)| w * m)
        .sum();
    let y_iv = lr.domain().y_iv;
    if mass <= lr.tol() * lr.scale() * y_iv.length() {
        return Err(Error::ZeroSlice { x: x0 });
    }
    let len = session
        .col_antiderivatives
        .iter()
        .map(|s| s.coeffs().len())
        .max()
        .unwrap();
    let mut coeffs = vec![0.0; len];
    for (s, &w) in session.col_antiderivatives.iter().zip(&weights) {
        for (c, &sc) in coeffs.iter_mut().zip(s.coeffs()) {
            *c += w / mass * sc;
        }
    }
    Ok((ChebSeries::new(y_iv, coeffs), mass))
}

/// The normalized conditional CDF over `[c, d]` at `x0`, as used inside
/// `sample_2d`; exposed for testing.
pub fn conditional_cdf_at(session: &Sampler2DSession, x0: f64) -> Result<Cdf1D> {
    let (series, mass) = conditional_cdf_series(session, x0)?;
    Ok(Cdf1D::from_normalized(series, mass))
}

/// Draw `n` pairs. Marginal X first, then Y by bisecting the conditional
/// CDF. Degenerate slices (numerically zero marginal) trigger a redraw of X
/// with a fresh uniform.
pub fn sample_2d(
    session: &Sampler2DSession,
    n: usize,
    rng: &mut UniformSource,
    tol_x: f64,
) -> Result<PairBatch> {
    let y_iv = session.lr.domain().y_iv;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut redraws = 0;
        let (x, cond) = loop {
            let u = rng.next_uniform();
            let x = session.marginal_cdf.invert_fast(u, tol_x);
            match conditional_cdf_series(session, x) {
                Ok((series, _)) => break (x, series),
                Err(Error::ZeroSlice { .. }) => {
                    redraws += 1;
                    if redraws >= MAX_REDRAWS {
                        return Err(Error::DegenerateConditional);
                    }
                }
                Err(e) => return Err(e),
            }
        };
        let v = rng.next_uniform();
        let (y, _) = bisect(|t| cond.eval(t), y_iv, v, tol_x);
        points.push((x, y));
    }
    Ok(PairBatch {
        seed: rng.seed(),
        points,
    })
}
