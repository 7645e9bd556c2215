//! Low-rank approximation of bivariate densities by Gaussian-elimination
//! cross approximation with complete pivoting, factors resolved as
//! Chebyshev series.

use crate::cheb::{chebyshev_points, tail_resolved, ChebSeries, Interval};
use crate::density::DensityFn;
use crate::error::{Error, Result};

/// Coarsest pivot grid: 2^5 + 1 = 33 points per axis.
const ACA_START_LOG2: u32 = 5;

/// Finest pivot grid: 2^11 + 1 = 2049 points per axis. A dense residual at
/// this size is ~34 MB; functions needing more are out of scope for a
/// low-rank representation.
const ACA_MAX_LOG2: u32 = 11;

/// Rank cap; a function needing more terms than this is not low rank.
pub const RANK_CAP: usize = 256;

/// A rectangle `[a,b] × [c,d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain2D {
    pub x_iv: Interval,
    pub y_iv: Interval,
}

impl Domain2D {
    pub fn new(x_iv: Interval, y_iv: Interval) -> Self {
        Domain2D { x_iv, y_iv }
    }
}

/// Rank-k representation `f̃(x,y) = Σ_j σ_j r_j(x) c_j(y)` with
/// nonincreasing `σ_j` and unit-sup-norm-on-grid factors (sign on `r_j`).
#[derive(Debug, Clone)]
pub struct LowRank2D {
    sigmas: Vec<f64>,
    rows: Vec<ChebSeries>,
    cols: Vec<ChebSeries>,
    domain: Domain2D,
    scale: f64,
    tol: f64,
}

impl LowRank2D {
    pub fn rank(&self) -> usize {
        self.sigmas.len()
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn rows(&self) -> &[ChebSeries] {
        &self.rows
    }

    pub fn cols(&self) -> &[ChebSeries] {
        &self.cols
    }

    pub fn domain(&self) -> Domain2D {
        self.domain
    }

    /// Maximum of `|f|` observed on the construction grid.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `Σ_j σ_j r_j(x) c_j(y)`; O(k(m+n)) per point.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.rank() {
            sum += self.sigmas[j] * self.rows[j].eval(x) * self.cols[j].eval(y);
        }
        sum
    }

    /// The marginal `∫_c^d f̃(x,y) dy` as a single series in x.
    pub fn marginal_x(&self) -> ChebSeries {
        let weights: Vec<f64> = (0..self.rank())
            .map(|j| self.sigmas[j] * self.cols[j].integrate())
            .collect();
        combine(&self.rows, &weights, self.domain.x_iv)
    }

    /// The unnormalized conditional slice `f̃(x0, ·)` as one series in y,
    /// plus its mass `∫_c^d f̃(x0, y) dy`. Errors with `ZeroSlice` when the
    /// mass is below `tol · scale · (d-c)`.
    pub fn conditional_slice(&self, x0: f64) -> Result<(ChebSeries, f64)> {
        let weights: Vec<f64> = (0..self.rank())
            .map(|j| self.sigmas[j] * self.rows[j].eval(x0))
            .collect();
        let slice = combine(&self.cols, &weights, self.domain.y_iv);
        let mass = slice.integrate();
        if mass <= self.tol * self.scale * self.domain.y_iv.length() {
            return Err(Error::ZeroSlice { x: x0 });
        }
        Ok((slice, mass))
    }
}

/// Coefficient-level linear combination `Σ_j w_j s_j` after degree padding.
fn combine(series: &[ChebSeries], weights: &[f64], iv: Interval) -> ChebSeries {
    let len = series.iter().map(|s| s.coeffs().len()).max().unwrap_or(1);
    let mut coeffs = vec![0.0; len];
    for (s, &w) in series.iter().zip(weights) {
        for (c, &sc) in coeffs.iter_mut().zip(s.coeffs()) {
            *c += w * sc;
        }
    }
    ChebSeries::new(iv, coeffs)
}

/// Adaptive cross approximation of a bivariate black box.
///
/// Pivots are found by complete pivoting on a tensor Chebyshev grid; the
/// grid doubles and the elimination restarts whenever a cross slice is not
/// resolved at the current size or the validation residual is too large.
pub fn aca_approximate(f: &DensityFn, dom: Domain2D, tol: f64) -> Result<LowRank2D> {
    let mut cache: Vec<f64> = Vec::new(); // row-major (x index major), reused across levels
    for level in ACA_START_LOG2..=ACA_MAX_LOG2 {
        let n = 1usize << level;
        let xs = chebyshev_points(n, dom.x_iv);
        let ys = chebyshev_points(n, dom.y_iv);
        cache = refine_values(f, &xs, &ys, cache)?;
        // `None` means a cross slice was unresolved at this grid size; a
        // failed validation likewise sends us to the next refinement level.
        if let Some(mut lr) = eliminate(&cache, &xs, &ys, dom, tol)? {
            if validate(f, &lr)? {
                // Term order in the sum is arbitrary; sort so pivot
                // magnitudes are nonincreasing.
                let mut order: Vec<usize> = (0..lr.rank()).collect();
                order.sort_by(|&a, &b| lr.sigmas[b].total_cmp(&lr.sigmas[a]));
                lr.sigmas = order.iter().map(|&i| lr.sigmas[i]).collect();
                lr.rows = order.iter().map(|&i| lr.rows[i].clone()).collect();
                lr.cols = order.iter().map(|&i| lr.cols[i].clone()).collect();
                return Ok(lr);
            }
        }
    }
    Err(Error::Unresolved {
        max_points: (1usize << ACA_MAX_LOG2) + 1,
    })
}

/// Fill the tensor value cache for the new grid, reusing the coarse grid at
/// even indices.
fn refine_values(f: &DensityFn, xs: &[f64], ys: &[f64], old: Vec<f64>) -> Result<Vec<f64>> {
    let nx = xs.len();
    let ny = ys.len();
    let mut values = vec![f64::NAN; nx * ny];
    if !old.is_empty() {
        let onx = (nx - 1) / 2 + 1;
        let ony = (ny - 1) / 2 + 1;
        for i in 0..onx {
            for j in 0..ony {
                values[2 * i * ny + 2 * j] = old[i * ony + j];
            }
        }
    }
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let slot = &mut values[i * ny + j];
            if slot.is_nan() {
                *slot = f.eval2(x, y);
            }
            if !slot.is_finite() {
                return Err(Error::NonFinite {
                    location: format!("(x, y) = ({x}, {y})"),
                });
            }
        }
    }
    Ok(values)
}

/// Gaussian elimination with complete pivoting on the grid. Returns `None`
/// when a cross slice needs a finer grid than available.
fn eliminate(
    values: &[f64],
    xs: &[f64],
    ys: &[f64],
    dom: Domain2D,
    tol: f64,
) -> Result<Option<LowRank2D>> {
    let nx = xs.len();
    let ny = ys.len();
    let fmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if fmax == 0.0 {
        return Err(Error::ZeroMass { mass: 0.0 });
    }
    // Elimination roundoff grows with the grid, so pivots below roughly
    // `n·ε·max|f|` are noise; stopping there keeps the rank free of spurious
    // noise terms without hurting the residual the validation grid checks.
    let tol = tol.max(nx.max(ny) as f64 * f64::EPSILON);
    let resolve_threshold = tol * fmax;
    // Truncate factors two digits below the resolution threshold so that
    // rank-many truncation errors stay under the validation budget.
    let chop_threshold = resolve_threshold / 100.0;

    let mut residual = values.to_vec();
    let mut sigmas: Vec<f64> = Vec::new();
    let mut rows: Vec<ChebSeries> = Vec::new();
    let mut cols: Vec<ChebSeries> = Vec::new();

    loop {
        let (mut pi, mut pj, mut pmax) = (0usize, 0usize, 0.0f64);
        for i in 0..nx {
            for j in 0..ny {
                let v = residual[i * ny + j].abs();
                if v > pmax {
                    pmax = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if pmax <= resolve_threshold {
            break;
        }
        if sigmas.len() == RANK_CAP {
            return Err(Error::RankOverflow { cap: RANK_CAP });
        }
        let pivot = residual[pi * ny + pj];

        let row_vals: Vec<f64> = (0..nx).map(|i| residual[i * ny + pj]).collect();
        let col_vals: Vec<f64> = (0..ny).map(|j| residual[pi * ny + j]).collect();

        let row_series = ChebSeries::from_values(dom.x_iv, &row_vals)?;
        let col_series = ChebSeries::from_values(dom.y_iv, &col_vals)?;
        if !tail_resolved(row_series.coeffs(), resolve_threshold)
            || !tail_resolved(col_series.coeffs(), resolve_threshold)
        {
            return Ok(None);
        }

        // σ = |pivot|; the sign and the 1/pivot scaling go into r.
        sigmas.push(pivot.abs());
        rows.push(scaled(&row_series.truncated(chop_threshold), 1.0 / pivot));
        cols.push(scaled(&col_series.truncated(chop_threshold), 1.0 / pivot.abs()));

        for i in 0..nx {
            let ri = row_vals[i] / pivot;
            if ri == 0.0 {
                continue;
            }
            for j in 0..ny {
                residual[i * ny + j] -= ri * col_vals[j];
            }
        }
    }

    if sigmas.is_empty() {
        // fmax > 0 guarantees at least one pivot above threshold
        unreachable!("positive scale but no pivot");
    }
    Ok(Some(LowRank2D {
        sigmas,
        rows,
        cols,
        domain: dom,
        scale: fmax,
        tol,
    }))
}

fn scaled(s: &ChebSeries, factor: f64) -> ChebSeries {
    ChebSeries::new(s.interval(), s.coeffs().iter().map(|c| c * factor).collect())
}

/// Off-grid residual check on a 64×64 equispaced grid.
fn validate(f: &DensityFn, lr: &LowRank2D) -> Result<bool> {
    const N: usize = 64;
    let dom = lr.domain();
    let mut worst = 0.0f64;
    for i in 0..N {
        let x = dom.x_iv.a() + (i as f64 + 0.5) / N as f64 * dom.x_iv.length();
        for j in 0..N {
            let y = dom.y_iv.a() + (j as f64 + 0.5) / N as f64 * dom.y_iv.length();
            let exact = f.eval2(x, y);
            if !exact.is_finite() {
                return Err(Error::NonFinite {
                    location: format!("(x, y) = ({x}, {y})"),
                });
            }
            worst = worst.max((exact - lr.eval(x, y)).abs());
        }
    }
    Ok(worst <= 10.0 * lr.tol * lr.scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::DEFAULT_TOL;
    use approx::assert_abs_diff_eq;

    fn iv(a: f64, b: f64) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn dom(a: f64, b: f64, c: f64, d: f64) -> Domain2D {
        Domain2D::new(iv(a, b), iv(c, d))
    }

    #[test]
    fn constant_is_rank_one() {
        let f = DensityFn::new_2d(iv(0.0, 1.0), iv(0.0, 1.0), |_, _| 1.0);
        let lr = aca_approximate(&f, dom(0.0, 1.0, 0.0, 1.0), DEFAULT_TOL).unwrap();
        assert_eq!(lr.rank(), 1);
        for (x, y) in [(0.0, 0.0), (0.3, 0.9), (1.0, 0.5)] {
            assert_abs_diff_eq!(lr.eval(x, y), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn quartic_ensemble_is_rank_three() {
        let f = DensityFn::new_2d(iv(-7.0, 7.0), iv(-7.0, 7.0), |x: f64, y: f64| {
            (-x.powi(4) / 2.0 - y.powi(4) / 2.0).exp() * (x - y) * (x - y)
        });
        let lr = aca_approximate(&f, dom(-7.0, 7.0, -7.0, 7.0), DEFAULT_TOL).unwrap();
        assert_eq!(lr.rank(), 3);
        assert_abs_diff_eq!(lr.eval(0.0, 0.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_rank_three_recovery() {
        // Random-ish low-degree separable terms.
        let g = |x: f64| 1.0 + 0.5 * x + 0.25 * x * x;
        let h = |y: f64| 2.0 - y;
        let g2 = |x: f64| x * x * x - 0.1;
        let h2 = |y: f64| 0.3 + y * y;
        let g3 = |x: f64| (0.7 * x).sin();
        let h3 = |y: f64| (0.4 * y).cos();
        let f = DensityFn::new_2d(iv(-1.0, 1.0), iv(-1.0, 1.0), move |x, y| {
            g(x) * h(y) + g2(x) * h2(y) + g3(x) * h3(y)
        });
        let lr = aca_approximate(&f, dom(-1.0, 1.0, -1.0, 1.0), DEFAULT_TOL).unwrap();
        assert_eq!(lr.rank(), 3);
        for (x, y) in [(0.11, -0.7), (-0.95, 0.3), (0.5, 0.5)] {
            let exact = g(x) * h(y) + g2(x) * h2(y) + g3(x) * h3(y);
            assert_abs_diff_eq!(lr.eval(x, y), exact, epsilon = 1e-12);
        }
    }

    #[test]
    fn pivot_magnitudes_nonincreasing() {
        let f = DensityFn::new_2d(iv(-3.0, 3.0), iv(-3.0, 3.0), |x: f64, y: f64| {
            (-x * x - 2.0 * y * y).exp() * crate::expr::sech(10.0 * x * y)
        });
        let lr = aca_approximate(&f, dom(-3.0, 3.0, -3.0, 3.0), DEFAULT_TOL).unwrap();
        for w in lr.sigmas().windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(*lr.sigmas().last().unwrap() > 0.0);
    }

    #[test]
    fn eval_matches_black_box() {
        let f = DensityFn::new_2d(iv(-3.0, 3.0), iv(-3.0, 3.0), |x: f64, y: f64| {
            (-x * x - 2.0 * y * y).exp() * crate::expr::sech(10.0 * x * y) * (x - y) * (x - y)
        });
        let lr = aca_approximate(&f, dom(-3.0, 3.0, -3.0, 3.0), DEFAULT_TOL).unwrap();
        assert!(
            (40..=70).contains(&lr.rank()),
            "butterfly rank {}",
            lr.rank()
        );
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut worst = 0.0f64;
        for _ in 0..200 {
            let x = -3.0 + 6.0 * next();
            let y = -3.0 + 6.0 * next();
            let exact =
                (-x * x - 2.0 * y * y).exp() * crate::expr::sech(10.0 * x * y) * (x - y) * (x - y);
            worst = worst.max((lr.eval(x, y) - exact).abs());
        }
        assert!(worst <= 100.0 * DEFAULT_TOL * lr.scale(), "worst {worst:e}");
    }

    #[test]
    fn marginal_of_constant() {
        let f = DensityFn::new_2d(iv(0.0, 1.0), iv(0.0, 1.0), |_, _| 1.0);
        let lr = aca_approximate(&f, dom(0.0, 1.0, 0.0, 1.0), DEFAULT_TOL).unwrap();
        let m = lr.marginal_x();
        for x in [0.0, 0.25, 0.8, 1.0] {
            assert_abs_diff_eq!(m.eval(x), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn marginal_of_separable_is_proportional() {
        let f = DensityFn::new_2d(iv(-1.0, 1.0), iv(0.0, 2.0), |x: f64, y: f64| {
            (1.0 + x * x) * (3.0 - y)
        });
        let lr = aca_approximate(&f, dom(-1.0, 1.0, 0.0, 2.0), DEFAULT_TOL).unwrap();
        let m = lr.marginal_x();
        let h_mass = 4.0; // ∫_0^2 (3 - y) dy
        for x in [-1.0, -0.4, 0.0, 0.9] {
            assert_abs_diff_eq!(m.eval(x), (1.0 + x * x) * h_mass, epsilon = 1e-12);
        }
    }

    #[test]
    fn slice_of_constant() {
        let f = DensityFn::new_2d(iv(0.0, 1.0), iv(0.0, 1.0), |_, _| 1.0);
        let lr = aca_approximate(&f, dom(0.0, 1.0, 0.0, 1.0), DEFAULT_TOL).unwrap();
        let (slice, mass) = lr.conditional_slice(0.37).unwrap();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-13);
        for y in [0.0, 0.5, 1.0] {
            assert_abs_diff_eq!(slice.eval(y), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn slices_of_separable_are_proportional() {
        let f = DensityFn::new_2d(iv(-1.0, 1.0), iv(0.0, 2.0), |x: f64, y: f64| {
            (1.0 + x * x) * (3.0 - y)
        });
        let lr = aca_approximate(&f, dom(-1.0, 1.0, 0.0, 2.0), DEFAULT_TOL).unwrap();
        let (s1, _) = lr.conditional_slice(0.2).unwrap();
        let (s2, _) = lr.conditional_slice(-0.8).unwrap();
        let ratio = (1.0 + 0.2f64 * 0.2) / (1.0 + 0.8f64 * 0.8);
        for y in [0.1, 1.0, 1.9] {
            assert_abs_diff_eq!(s1.eval(y), ratio * s2.eval(y), epsilon = 1e-12);
        }
    }

    #[test]
    fn butterfly_slice_at_zero_has_closed_form() {
        let f = DensityFn::new_2d(iv(-3.0, 3.0), iv(-3.0, 3.0), |x: f64, y: f64| {
            (-x * x - 2.0 * y * y).exp() * crate::expr::sech(10.0 * x * y) * (x - y) * (x - y)
        });
        let lr = aca_approximate(&f, dom(-3.0, 3.0, -3.0, 3.0), DEFAULT_TOL).unwrap();
        let (slice, _) = lr.conditional_slice(0.0).unwrap();
        // sech(0) = 1 and (0-y)^2 = y^2, so the slice is e^{-2y^2} y^2.
        for i in 0..100 {
            let y = -3.0 + 6.0 * i as f64 / 99.0;
            let exact = (-2.0 * y * y).exp() * y * y;
            let got = slice.eval(y);
            assert!(
                (got - exact).abs() <= 1e-8 * (1.0 + exact.abs()),
                "y={y}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn slice_and_eval_agree() {
        let f = DensityFn::new_2d(iv(-2.0, 2.0), iv(-2.0, 2.0), |x: f64, y: f64| {
            (-100.0 * (x - 1.0) * (x - 1.0)).exp()
                + (-100.0 * (y + 1.0) * (y + 1.0)).exp() * (1.0 + (20.0 * x).cos())
        });
        let lr = aca_approximate(&f, dom(-2.0, 2.0, -2.0, 2.0), DEFAULT_TOL).unwrap();
        assert_eq!(lr.rank(), 2);
        for (x0, y0) in [(0.5, -0.9), (-1.2, 0.1), (1.0, -1.0)] {
            let (slice, _) = lr.conditional_slice(x0).unwrap();
            assert_abs_diff_eq!(slice.eval(y0), lr.eval(x0, y0), epsilon = 1e-13);
        }
    }
}
