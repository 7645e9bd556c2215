//! Univariate inverse transform sampling: build a CDF from a density
//! approximant, invert it pointwise by bisection, emit samples.

use std::io::Write;
use std::sync::OnceLock;

use crate::cheb::{adaptive_fit, ChebSeries, Interval, MAX_GRID_LOG2};
use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::rng::UniformSource;

/// Default relative x-tolerance for bisection; 47 iterations on any interval.
pub const DEFAULT_TOL_X: f64 = 1e-14;

/// A normalized, nondecreasing CDF in Chebyshev form, with the mass of the
/// unnormalized density kept as metadata.
#[derive(Debug, Clone)]
pub struct Cdf1D {
    series: ChebSeries,
    total_mass: f64,
    /// Piecewise low-degree re-expansion of the CDF, built on first use by
    /// the batch sampling path. Bisecting a short local piece costs far less
    /// than Clenshaw on the full series when the density needed a high
    /// degree, without changing what is being inverted.
    fast: OnceLock<FastInverter>,
}

#[derive(Debug, Clone)]
struct FastInverter {
    pieces: Vec<ChebSeries>,
    /// CDF values at the `pieces.len() + 1` equal-width piece edges.
    boundaries: Vec<f64>,
}

impl Cdf1D {
    /// Integrate and normalize a density approximant into a CDF.
    ///
    /// The series may be an adaptive fit of a black box or an exactly known
    /// expansion (e.g. a marginal of a low-rank factorization); either way
    /// no further approximation happens here.
    pub fn from_series(density: ChebSeries, tol: f64) -> Result<Cdf1D> {
        let iv = density.interval();
        let scale = density.max_abs(4).1;
        // Negativity check on a density-resolution grid.
        let n = (4 * (density.degree() + 1)).max(16);
        for x in crate::cheb::chebyshev_points(n, iv) {
            let v = density.eval(x);
            if v < -tol * scale {
                return Err(Error::NegativeDensity { x, value: v });
            }
        }
        let unnormalized = density.antiderivative();
        let total_mass = unnormalized.eval(iv.b());
        // NaN-safe: a NaN mass must also be rejected.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(total_mass > tol * scale * iv.length()) {
            return Err(Error::ZeroMass { mass: total_mass });
        }
        let coeffs = unnormalized
            .coeffs()
            .iter()
            .map(|c| c / total_mass)
            .collect();
        Ok(Cdf1D {
            series: ChebSeries::new(iv, coeffs),
            total_mass,
            fast: OnceLock::new(),
        })
    }

    /// Wrap a series that is already a normalized CDF (F(a)=0, F(b)=1),
    /// keeping its pre-normalization mass as metadata.
    pub(crate) fn from_normalized(series: ChebSeries, total_mass: f64) -> Cdf1D {
        Cdf1D {
            series,
            total_mass,
            fast: OnceLock::new(),
        }
    }

    pub fn series(&self) -> &ChebSeries {
        &self.series
    }

    /// Mass of the unnormalized density, `F̃(b)` before scaling.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn interval(&self) -> Interval {
        self.series.interval()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.series.eval(x)
    }

    /// Invert at `u` using the piecewise re-expansion: locate the bracket by
    /// binary search on precomputed edge values, then bisect the local piece
    /// down to the same absolute resolution `tol_x · (b − a)` as
    /// [`invert_cdf`]. Agrees with it up to that resolution.
    pub fn invert_fast(&self, u: f64, tol_x: f64) -> f64 {
        let fast = self.fast.get_or_init(|| self.build_fast_inverter());
        let k = fast.pieces.len();
        let j = fast
            .boundaries
            .partition_point(|&v| v < u)
            .saturating_sub(1)
            .min(k - 1);
        let piece = &fast.pieces[j];
        // Same absolute x-resolution as bisection on the full interval.
        let local_tol = (tol_x * self.interval().length() / piece.interval().length()).min(0.5);
        bisect(|x| piece.eval(x), piece.interval(), u, local_tol).0
    }

    fn build_fast_inverter(&self) -> FastInverter {
        let iv = self.interval();
        let k = (self.series.degree() / 16)
            .max(1)
            .next_power_of_two()
            .min(1024);
        let mut pieces = Vec::with_capacity(k);
        let mut boundaries = Vec::with_capacity(k + 1);
        for i in 0..k {
            let lo = iv.a() + iv.length() * i as f64 / k as f64;
            let hi = iv.a() + iv.length() * (i + 1) as f64 / k as f64;
            boundaries.push(self.series.eval(lo));
            let piece_iv = Interval::new(lo, hi).expect("piece bounds ordered");
            // The restriction of a polynomial to a short subinterval is
            // smooth; if the refit somehow does not settle, fall back to the
            // full series on that piece.
            let piece = adaptive_fit(
                |x| self.series.eval(x),
                piece_iv,
                crate::cheb::DEFAULT_TOL,
                9,
            )
            .unwrap_or_else(|_| self.series.clone());
            pieces.push(piece);
        }
        boundaries.push(self.series.eval(iv.b()));
        FastInverter { pieces, boundaries }
    }
}

/// Build the CDF of a black-box density: adaptive Chebyshev fit, indefinite
/// integral, normalization. Unnormalized inputs are accepted.
pub fn cdf_from_density(f: &DensityFn, iv: Interval, tol: f64) -> Result<Cdf1D> {
    let density = adaptive_fit(|x| f.eval1(x), iv, tol, MAX_GRID_LOG2)?;
    Cdf1D::from_series(density, tol)
}

/// Bisection solve of `eval(x) = u` on `iv` for a nondecreasing `eval`.
/// Runs exactly `ceil(log2(1/tol_x))` midpoint evaluations regardless of `u`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(eval: F, iv: Interval, u: f64, tol_x: f64) -> (f64, u32) {
    let width = iv.length();
    let mut lo = iv.a();
    let mut hi = iv.b();
    let mut iterations = 0;
    while hi - lo >= tol_x * width {
        let mid = 0.5 * (lo + hi);
        if eval(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), iterations)
}

/// Invert a CDF at `u ∈ [0, 1]` to relative x-tolerance `tol_x`.
pub fn invert_cdf(cdf: &Cdf1D, u: f64, tol_x: f64) -> f64 {
    bisect(|x| cdf.eval(x), cdf.interval(), u, tol_x).0
}

/// Like [`invert_cdf`], also reporting the number of bisection iterations
/// (constant for fixed `tol_x`: `ceil(log2(1/tol_x))`).
pub fn invert_cdf_counted(cdf: &Cdf1D, u: f64, tol_x: f64) -> (f64, u32) {
    bisect(|x| cdf.eval(x), cdf.interval(), u, tol_x)
}

/// An ordered batch of univariate draws together with the seed that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub points: Vec<f64>,
}

impl SampleBatch {
    /// CSV with a `# seed=<u64>` comment line and an `x` header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "x")?;
        for x in &self.points {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }
}

/// An ordered batch of bivariate draws.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBatch {
    pub seed: u64,
    pub points: Vec<(f64, f64)>,
}

impl PairBatch {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "x,y")?;
        for (x, y) in &self.points {
            writeln!(w, "{x},{y}")?;
        }
        Ok(())
    }
}

/// Draw `n` samples from an already built CDF. Pure in `(cdf, seed)`; the
/// original density is not consulted.
pub fn sample_1d_from_cdf(cdf: &Cdf1D, n: usize, rng: &mut UniformSource, tol_x: f64) -> SampleBatch {
    let points = (0..n)
        .map(|_| cdf.invert_fast(rng.next_uniform(), tol_x))
        .collect();
    SampleBatch {
        seed: rng.seed(),
        points,
    }
}

/// Build the CDF once, then draw `n` inverse transform samples. The density
/// is never evaluated after construction.
pub fn sample_1d(
    f: &DensityFn,
    iv: Interval,
    n: usize,
    rng: &mut UniformSource,
    tol: f64,
    tol_x: f64,
) -> Result<SampleBatch> {
    let cdf = cdf_from_density(f, iv, tol)?;
    Ok(sample_1d_from_cdf(&cdf, n, rng, tol_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::DEFAULT_TOL;
    use approx::assert_abs_diff_eq;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    #[test]
    fn uniform_cdf() {
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |_| 1.0);
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(cdf.total_mass(), 2.0, epsilon = 1e-13);
        for x in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            assert_abs_diff_eq!(cdf.eval(x), (x + 1.0) / 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn oscillatory_total_mass() {
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |x| 2.0 + (100.0 * x).cos());
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        let expected = 4.0 + (100.0f64).sin() / 50.0;
        assert_abs_diff_eq!(cdf.total_mass(), expected, epsilon = 1e-11);
    }

    #[test]
    fn negative_density_rejected() {
        let f = DensityFn::new_1d(iv(0.0, 1.0), |_| -1.0);
        let err = cdf_from_density(&f, iv(0.0, 1.0), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NegativeDensity { .. }));
    }

    #[test]
    fn zero_mass_rejected() {
        let f = DensityFn::new_1d(iv(0.0, 1.0), |_| 0.0);
        let err = cdf_from_density(&f, iv(0.0, 1.0), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::ZeroMass { .. }));
    }

    #[test]
    fn cdf_endpoint_invariants() {
        let f = DensityFn::new_1d(iv(-8.0, 8.0), |x: f64| (-x * x / 2.0).exp());
        let cdf = cdf_from_density(&f, iv(-8.0, 8.0), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(cdf.eval(-8.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cdf.eval(8.0), 1.0, epsilon = 1e-12);
        // Nondecreasing on a 1000-point grid, up to rounding slack.
        let mut prev = f64::NEG_INFINITY;
        for i in 0..1000 {
            let x = -8.0 + 16.0 * i as f64 / 999.0;
            let v = cdf.eval(x);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn bisection_midpoint_of_uniform() {
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |_| 1.0);
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        let x = invert_cdf(&cdf, 0.5, DEFAULT_TOL_X);
        assert_abs_diff_eq!(x, 0.0, epsilon = DEFAULT_TOL_X * 2.0);
    }

    #[test]
    fn bisection_iteration_count_is_47() {
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |_| 1.0);
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        for u in [0.0, 1e-9, 0.25, 0.5, 0.73, 1.0 - 1e-9, 1.0] {
            let (_, iters) = bisect(|x| cdf.eval(x), cdf.interval(), u, 1e-14);
            assert_eq!(iters, 47, "u={u}");
        }
    }

    #[test]
    fn gaussian_median_at_zero() {
        let f = DensityFn::new_1d(iv(-8.0, 8.0), |x: f64| (-x * x / 2.0).exp());
        let cdf = cdf_from_density(&f, iv(-8.0, 8.0), DEFAULT_TOL).unwrap();
        let x = invert_cdf(&cdf, 0.5, DEFAULT_TOL_X);
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn empty_batch_and_eval_count_freeze() {
        let f = DensityFn::new_1d(iv(0.0, 1.0), |_| 1.0);
        let mut rng = UniformSource::new(3);
        let batch = sample_1d(&f, iv(0.0, 1.0), 0, &mut rng, DEFAULT_TOL, DEFAULT_TOL_X).unwrap();
        assert!(batch.points.is_empty());
        let after_build = f.eval_count();
        assert!(after_build > 0);

        let cdf = cdf_from_density2(&f);
        let _ = sample_1d_from_cdf(&cdf, 100, &mut rng, DEFAULT_TOL_X);
        assert_eq!(f.eval_count(), 2 * after_build); // only the second build evaluated f
    }

    fn cdf_from_density2(f: &DensityFn) -> Cdf1D {
        cdf_from_density(f, f.x_interval(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn determinism_same_seed() {
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |x: f64| 1.5 - x * x);
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        let a = sample_1d_from_cdf(&cdf, 50, &mut UniformSource::new(9), DEFAULT_TOL_X);
        let b = sample_1d_from_cdf(&cdf, 50, &mut UniformSource::new(9), DEFAULT_TOL_X);
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_samples_match_transformed_uniforms() {
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |_| 1.0);
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        let batch = sample_1d_from_cdf(&cdf, 200, &mut UniformSource::new(11), DEFAULT_TOL_X);
        let mut rng = UniformSource::new(11);
        for x in &batch.points {
            let expected = 2.0 * rng.next_uniform() - 1.0;
            assert_abs_diff_eq!(*x, expected, epsilon = 4.0 * DEFAULT_TOL_X);
        }
    }

    #[test]
    fn fast_inverter_matches_bisection() {
        // High-degree CDF so the piecewise path actually partitions.
        let f = DensityFn::new_1d(iv(-1.0, 1.0), |x| crate::expr::sech(200.0 * x));
        let cdf = cdf_from_density(&f, iv(-1.0, 1.0), DEFAULT_TOL).unwrap();
        let mut rng = UniformSource::new(31);
        for _ in 0..500 {
            let u = rng.next_uniform();
            let slow = invert_cdf(&cdf, u, DEFAULT_TOL_X);
            let fast = cdf.invert_fast(u, DEFAULT_TOL_X);
            assert!(
                (slow - fast).abs() <= 4.0 * DEFAULT_TOL_X * cdf.interval().length(),
                "u={u}: {slow} vs {fast}"
            );
        }
    }

    #[test]
    fn csv_round_shape() {
        let batch = SampleBatch {
            seed: 7,
            points: vec![0.25, -0.5],
        };
        let mut buf = Vec::new();
        batch.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# seed=7\nx\n0.25\n-0.5\n");
    }
}
