//! Chebyshev-basis polynomial approximants on arbitrary intervals:
//! construction from point values (fast DCT-I path with a direct fallback),
//! adaptive degree selection, Clenshaw evaluation, and integration.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// Default relative tolerance for adaptive construction.
///
/// Machine epsilon times 100: truncation plus integration consumes roughly
/// two digits, so targeting full epsilon buys nothing downstream.
pub const DEFAULT_TOL: f64 = f64::EPSILON * 100.0;

/// Coarsest adaptive grid: 2^3 + 1 = 9 points.
pub const MIN_GRID_LOG2: u32 = 3;

/// Finest adaptive grid: 2^16 + 1 points. Beyond this the function is
/// declared unresolved rather than burning unbounded time on a black box.
pub const MAX_GRID_LOG2: u32 = 16;

/// A finite interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// Map `x ∈ [a,b]` to the reference variable `t ∈ [-1,1]`.
    pub fn to_reference(&self, x: f64) -> f64 {
        2.0 * (x - self.a) / (self.b - self.a) - 1.0
    }

    /// Map `t ∈ [-1,1]` to `x ∈ [a,b]`.
    pub fn from_reference(&self, t: f64) -> f64 {
        self.midpoint() + 0.5 * self.length() * t
    }
}

/// Chebyshev points of the second kind for grid parameter `n`:
/// `(a+b)/2 + (b-a)/2 · cos(jπ/n)` for `j = 0..=n`, descending in `x`.
pub fn chebyshev_points(n: usize, iv: Interval) -> Vec<f64> {
    assert!(n >= 1, "grid parameter must be at least 1");
    let mid = iv.midpoint();
    let half = 0.5 * iv.length();
    (0..=n)
        .map(|j| mid + half * (j as f64 * PI / n as f64).cos())
        .collect()
}

/// A univariate polynomial in the Chebyshev basis on an interval:
/// `s(x) = Σ_k coeffs[k] · T_k(2(x-a)/(b-a) - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    interval: Interval,
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(interval: Interval, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "coefficient list must be non-empty");
        ChebSeries { interval, coeffs }
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Interpolant through values sampled at `chebyshev_points(n, iv)`,
    /// in that point order. Uses the fast transform when `n` is a power of
    /// two, the direct O(n²) cosine sum otherwise.
    pub fn from_values(iv: Interval, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::LengthMismatch {
                expected: 2,
                got: 0,
            });
        }
        let n = values.len() - 1;
        let coeffs = if n == 0 {
            vec![values[0]]
        } else if n.is_power_of_two() {
            cheb_transform_fast(values)
        } else {
            cheb_transform_direct(values)
        };
        Ok(ChebSeries::new(iv, coeffs))
    }

    /// Evaluate via the Clenshaw recurrence. Points outside the interval are
    /// extrapolated; no caller in this crate relies on that.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.interval.to_reference(x);
        clenshaw(&self.coeffs, t)
    }

    /// The antiderivative `F(x) = ∫_a^x s(t) dt` as a series of degree
    /// `n + 1`, computed coefficient-wise in O(n).
    pub fn antiderivative(&self) -> ChebSeries {
        let n = self.coeffs.len();
        let half_len = 0.5 * self.interval.length();
        let mut beta = vec![0.0; n + 1];
        #[allow(clippy::needless_range_loop)] // m is the index in the recurrence
        for m in 1..=n {
            // c_{m-1} with the zeroth coefficient doubled, minus c_{m+1}
            let lo = if m == 1 {
                2.0 * self.coeffs[0]
            } else {
                self.coeffs[m - 1]
            };
            let hi = if m + 1 < n { self.coeffs[m + 1] } else { 0.0 };
            beta[m] = half_len * (lo - hi) / (2.0 * m as f64);
        }
        // Fix the constant so F(a) = 0, i.e. Σ β_k (-1)^k = 0.
        let mut at_a = 0.0;
        for (k, b) in beta.iter().enumerate().skip(1) {
            at_a += if k % 2 == 0 { *b } else { -*b };
        }
        beta[0] = -at_a;
        ChebSeries::new(self.interval, beta)
    }

    /// `∫_a^b s(x) dx = (b-a)/2 · Σ_{k even} 2 c_k / (1 - k²)`.
    pub fn integrate(&self) -> f64 {
        let mut sum = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().step_by(2) {
            sum += 2.0 * c / (1.0 - (k * k) as f64);
        }
        0.5 * self.interval.length() * sum
    }

    /// Location and value of the maximum of `|s|`: grid scan over
    /// `oversample × (degree+1)` Chebyshev points, then golden-section
    /// refinement in the bracketing cell.
    pub fn max_abs(&self, oversample: usize) -> (f64, f64) {
        assert!(oversample >= 1);
        let n = (oversample * (self.degree() + 1)).max(2);
        let pts = chebyshev_points(n, self.interval);
        let mut best_j = 0;
        let mut best = f64::NEG_INFINITY;
        for (j, &x) in pts.iter().enumerate() {
            let v = self.eval(x).abs();
            if v > best {
                best = v;
                best_j = j;
            }
        }
        // Points descend in x; bracket with the neighbouring cells.
        let lo = pts[(best_j + 1).min(n)];
        let hi = pts[best_j.saturating_sub(1)];
        let (x, v) = golden_max(|x| self.eval(x).abs(), lo, hi);
        if v >= best {
            (x, v)
        } else {
            (pts[best_j], best)
        }
    }

    /// Drop trailing coefficients with magnitude at or below `threshold`,
    /// always keeping the constant term.
    pub fn truncated(&self, threshold: f64) -> ChebSeries {
        let mut last = 0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.abs() > threshold {
                last = k;
            }
        }
        ChebSeries::new(self.interval, self.coeffs[..=last].to_vec())
    }
}

/// Clenshaw's backward recurrence for `Σ c_k T_k(t)`.
pub fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs[0] + t * b1 - b2
}

/// Direct O(n²) Chebyshev transform: `c_k = (2/n) Σ'' v_j cos(jkπ/n)` with
/// the first and last terms of the sum halved, and `c_0`, `c_n` halved again.
pub fn cheb_transform_direct(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    debug_assert!(n >= 1);
    let mut coeffs = vec![0.0; n + 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let mut sum = 0.5 * values[0];
        for (j, &v) in values.iter().enumerate().take(n).skip(1) {
            sum += v * (PI * (j * k) as f64 / n as f64).cos();
        }
        sum += 0.5 * if k % 2 == 0 { values[n] } else { -values[n] };
        let scale = if k == 0 || k == n { 1.0 } else { 2.0 };
        *c = scale * sum / n as f64;
    }
    coeffs
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// DCT-I via an FFT of the even extension; requires `values.len() - 1` to be
/// a power of two. Agrees with `cheb_transform_direct` to rounding.
pub fn cheb_transform_fast(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    debug_assert!(n >= 1 && n.is_power_of_two());
    let mut buf: Vec<Complex<f64>> = Vec::with_capacity(2 * n);
    buf.extend(values.iter().map(|&v| Complex::new(v, 0.0)));
    buf.extend(values[1..n].iter().rev().map(|&v| Complex::new(v, 0.0)));
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(2 * n);
        fft.process(&mut buf);
    });
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = buf[0].re / (2 * n) as f64;
    for (k, c) in coeffs.iter_mut().enumerate().take(n).skip(1) {
        *c = buf[k].re / n as f64;
    }
    coeffs[n] = buf[n].re / (2 * n) as f64;
    coeffs
}

/// Number of trailing coefficients that must sit below the chop threshold
/// before a series of `len` coefficients counts as resolved.
pub(crate) fn chop_window(len: usize) -> usize {
    3.max(len.div_ceil(8))
}

/// Resolution check: the trailing `chop_window` coefficients all have
/// magnitude at or below `threshold`.
pub(crate) fn tail_resolved(coeffs: &[f64], threshold: f64) -> bool {
    let m = chop_window(coeffs.len()).min(coeffs.len());
    coeffs[coeffs.len() - m..]
        .iter()
        .all(|c| c.abs() <= threshold)
}

/// Adaptive Chebyshev fit of a black-box scalar function.
///
/// Samples `eval` on nested grids of `2^k + 1` points, `k = MIN_GRID_LOG2..`,
/// reusing coarse-grid values, until the coefficient tail drops below
/// `tol · max|f|` on the grid. The resolved series is truncated two orders
/// below that threshold so the discarded tail mass stays negligible next to
/// the approximation error itself.
pub fn adaptive_fit<F>(mut eval: F, iv: Interval, tol: f64, max_log2: u32) -> Result<ChebSeries>
where
    F: FnMut(f64) -> f64,
{
    let mut values: Vec<f64> = Vec::new();
    for k in MIN_GRID_LOG2..=max_log2 {
        let n = 1usize << k;
        let pts = chebyshev_points(n, iv);
        if values.is_empty() {
            values = pts.iter().map(|&x| eval(x)).collect();
        } else {
            // Coarse point j becomes fine point 2j; fill the odd slots.
            let mut refined = vec![0.0; n + 1];
            for (j, &v) in values.iter().enumerate() {
                refined[2 * j] = v;
            }
            for j in (1..n).step_by(2) {
                refined[j] = eval(pts[j]);
            }
            values = refined;
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                location: format!("x = {}", pts[j]),
            });
        }
        let fmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let series = ChebSeries::from_values(iv, &values)?;
        let threshold = tol * fmax;
        if tail_resolved(series.coeffs(), threshold) {
            return Ok(series.truncated(threshold / 100.0));
        }
    }
    Err(Error::Unresolved {
        max_points: (1usize << max_log2) + 1,
    })
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
