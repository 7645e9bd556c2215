//! Randomized invariants of the approximation and sampling pipeline.

use chebsample::cheb::{
    chebyshev_points, cheb_transform_direct, cheb_transform_fast, clenshaw, ChebSeries, Interval,
    DEFAULT_TOL,
};
use chebsample::density::DensityFn;
use chebsample::sampler1d::{cdf_from_density, invert_cdf, Cdf1D, DEFAULT_TOL_X};
use proptest::prelude::*;

fn iv(a: f64, b: f64) -> Interval {
    Interval::new(a, b).unwrap()
}

/// A random low-degree Chebyshev series on a random interval.
fn arb_series() -> impl Strategy<Value = ChebSeries> {
    (
        prop::collection::vec(-1.0f64..1.0, 1..12),
        -5.0f64..0.0,
        0.5f64..5.0,
    )
        .prop_map(|(coeffs, a, len)| ChebSeries::new(iv(a, a + len), coeffs))
}

proptest! {
    /// Sampling a series at Chebyshev points and re-fitting reproduces it.
    #[test]
    fn interpolation_round_trip(s in arb_series()) {
        let pts = chebyshev_points(32, s.interval());
        let values: Vec<f64> = pts.iter().map(|&x| s.eval(x)).collect();
        let refit = ChebSeries::from_values(s.interval(), &values).unwrap();
        for i in 0..50 {
            let x = s.interval().a() + s.interval().length() * i as f64 / 49.0;
            prop_assert!((refit.eval(x) - s.eval(x)).abs() <= 1e-12);
        }
    }

    /// FFT-based and direct transforms agree on power-of-two grids.
    #[test]
    fn transforms_agree(values in prop::collection::vec(-10.0f64..10.0, 9..=9),
                        log2 in 3u32..9) {
        let n = 1usize << log2;
        // Upsample the 9 seeds onto n+1 points by cycling.
        let vals: Vec<f64> = (0..=n).map(|i| values[i % 9] * (1.0 + i as f64 / n as f64)).collect();
        let fast = cheb_transform_fast(&vals);
        let direct = cheb_transform_direct(&vals);
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (f, d) in fast.iter().zip(&direct) {
            prop_assert!((f - d).abs() <= 1e-13 * scale.max(1.0));
        }
    }

    /// Clenshaw evaluation matches the explicit cosine-sum definition.
    #[test]
    fn clenshaw_matches_trig_sum(coeffs in prop::collection::vec(-1.0f64..1.0, 1..20),
                                 t in -1.0f64..1.0) {
        let by_clenshaw = clenshaw(&coeffs, t);
        let theta = t.clamp(-1.0, 1.0).acos();
        let by_sum: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * theta).cos())
            .sum();
        prop_assert!((by_clenshaw - by_sum).abs() <= 1e-13 * coeffs.len() as f64);
    }

    /// Fundamental theorem: the antiderivative's endpoint difference equals
    /// the definite integral, and its centered difference recovers the series.
    #[test]
    fn antiderivative_consistency(s in arb_series()) {
        let f = s.antiderivative();
        let (a, b) = (s.interval().a(), s.interval().b());
        prop_assert!((f.eval(a)).abs() <= 1e-12);
        prop_assert!(((f.eval(b) - f.eval(a)) - s.integrate()).abs() <= 1e-11);
        let h = 1e-6 * s.interval().length();
        for i in 1..20 {
            let x = a + s.interval().length() * i as f64 / 20.0;
            let diff = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            prop_assert!((diff - s.eval(x)).abs() <= 1e-6);
        }
    }

    /// Definite integration is linear in the integrand.
    #[test]
    fn integral_linearity(c0 in prop::collection::vec(-1.0f64..1.0, 4..=4),
                          c1 in prop::collection::vec(-1.0f64..1.0, 4..=4),
                          alpha in -3.0f64..3.0) {
        let domain = iv(-2.0, 3.0);
        let s0 = ChebSeries::new(domain, c0.clone());
        let s1 = ChebSeries::new(domain, c1.clone());
        let combined = ChebSeries::new(
            domain,
            c0.iter().zip(&c1).map(|(a, b)| a + alpha * b).collect(),
        );
        let lhs = combined.integrate();
        let rhs = s0.integrate() + alpha * s1.integrate();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}

/// A fixed nontrivial CDF shared by the inversion properties.
fn gaussian_cdf() -> Cdf1D {
    let domain = iv(-4.0, 4.0);
    let f = DensityFn::new_1d(domain, |x: f64| (-x * x / 2.0).exp());
    cdf_from_density(&f, domain, DEFAULT_TOL).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Round trip: F(F⁻¹(u)) = u to the bisection resolution.
    #[test]
    fn inversion_round_trip(u in 0.001f64..0.999) {
        let cdf = gaussian_cdf();
        let x = invert_cdf(&cdf, u, DEFAULT_TOL_X);
        // |F(x) - u| ≤ sup|f| · tol_x · (b - a), with sup of the normalized
        // density ≈ 0.4.
        prop_assert!((cdf.eval(x) - u).abs() <= 1e-12);
    }

    /// Monotonicity: larger quantiles never map left.
    #[test]
    fn inversion_monotone(u1 in 0.001f64..0.999, u2 in 0.001f64..0.999) {
        let cdf = gaussian_cdf();
        let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
        let x1 = invert_cdf(&cdf, lo, DEFAULT_TOL_X);
        let x2 = invert_cdf(&cdf, hi, DEFAULT_TOL_X);
        prop_assert!(x1 <= x2 + DEFAULT_TOL_X * cdf.interval().length());
    }
}
