//! Reference quadrature, independent of the Chebyshev machinery. Used as
//! the oracle side of distributional checks: adaptive Simpson integration,
//! CDF evaluation at sample points, and tensor Gauss–Legendre cell masses.

/// Adaptive Simpson integration with Richardson acceptance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Integrate a spiky integrand over `[a, b]` by splitting at interior
/// breakpoints before going adaptive, so a symmetric peak cannot fool the
/// first Simpson estimate.
pub fn integrate_split(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + (b - a) * i as f64 / panels as f64;
        let hi = a + (b - a) * (i + 1) as f64 / panels as f64;
        total += adaptive_simpson(f, lo, hi, tol / panels as f64);
    }
    total
}

/// Normalized reference CDF values at each of the (not necessarily sorted)
/// query points, by sweeping adaptive Simpson over the sorted queries.
pub fn oracle_cdf_at(f: &dyn Fn(f64) -> f64, a: f64, b: f64, queries: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.sort_by(|&i, &j| queries[i].total_cmp(&queries[j]));
    let mut cumulative = vec![0.0; queries.len()];
    let mut acc = 0.0;
    let mut prev = a;
    for &idx in &order {
        let x = queries[idx].clamp(a, b);
        acc += adaptive_simpson(f, prev, x, 1e-13);
        cumulative[idx] = acc;
        prev = x;
    }
    let total = acc + adaptive_simpson(f, prev, b, 1e-13);
    for v in &mut cumulative {
        *v /= total;
    }
    cumulative
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integral of `f` over a rectangle with tensor Gauss–Legendre of the given
/// order per axis.
pub fn gl_integral_2d(
    f: &dyn Fn(f64, f64) -> f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    order: usize,
) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let hx = 0.5 * (x1 - x0);
    let hy = 0.5 * (y1 - y0);
    let mut sum = 0.0;
    for (ti, wi) in nodes.iter().zip(&weights) {
        let x = x0 + hx * (ti + 1.0);
        let mut inner = 0.0;
        for (tj, wj) in nodes.iter().zip(&weights) {
            let y = y0 + hy * (tj + 1.0);
            inner += wj * f(x, y);
        }
        sum += wi * inner;
    }
    sum * hx * hy
}

/// Normalized masses of an `nx × ny` equal-width cell grid over the box,
/// each cell integrated with composite tensor Gauss–Legendre.
#[allow(clippy::too_many_arguments)]
pub fn cell_masses_2d(
    f: &dyn Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    nx: usize,
    ny: usize,
    order: usize,
) -> Vec<f64> {
    let mut masses = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let x0 = a + (b - a) * i as f64 / nx as f64;
        let x1 = a + (b - a) * (i + 1) as f64 / nx as f64;
        for j in 0..ny {
            let y0 = c + (d - c) * j as f64 / ny as f64;
            let y1 = c + (d - c) * (j + 1) as f64 / ny as f64;
            // Two panels per axis per cell guard against centered peaks.
            let m = gl_integral_2d(f, x0, 0.5 * (x0 + x1), y0, 0.5 * (y0 + y1), order)
                + gl_integral_2d(f, 0.5 * (x0 + x1), x1, y0, 0.5 * (y0 + y1), order)
                + gl_integral_2d(f, x0, 0.5 * (x0 + x1), 0.5 * (y0 + y1), y1, order)
                + gl_integral_2d(f, 0.5 * (x0 + x1), x1, 0.5 * (y0 + y1), y1, order);
            masses.push(m);
        }
    }
    let total: f64 = masses.iter().sum();
    for m in &mut masses {
        *m /= total;
    }
    masses
}
