//! Benchmark suite and artifact emission: the eight reference densities,
//! timing/eval-count records for inverse transform vs rejection sampling,
//! eval-count sweeps, and histogram output.

use std::time::Instant;

use crate::cheb::{adaptive_fit, ChebSeries, Interval, MAX_GRID_LOG2};
use crate::error::{Error, Result};
use crate::expr::{compile, parse, Expr};
use crate::gof::{chi_square_test, GofReport, DEFAULT_ALPHA};
use crate::lowrank::{Domain2D, LowRank2D};
use crate::quad::{cell_masses_2d, oracle_cdf_at};
use crate::rejection::{rejection_sample_1d, rejection_sample_2d};
use crate::rng::UniformSource;
use crate::sampler1d::{cdf_from_density, sample_1d_from_cdf, DEFAULT_TOL_X};
use crate::sampler2d::{build_session, sample_2d};

/// Mass below which a chi-square cell is pooled into the tail cell.
pub const CHI_MERGE_BELOW: f64 = 1e-6;

/// A named density of the benchmark suite.
#[derive(Debug, Clone)]
pub struct SuiteDensity {
    pub label: &'static str,
    pub expr: &'static str,
    pub x: (f64, f64),
    pub y: Option<(f64, f64)>,
}

/// The four univariate and four bivariate reference densities with their
/// standard domains.
pub fn suite_densities() -> Vec<SuiteDensity> {
    vec![
        SuiteDensity {
            label: "multimodal",
            expr: "exp(-x^2/2)*(1+sin(3*x)^2)*(1+cos(5*x)^2)",
            x: (-8.0, 8.0),
            y: None,
        },
        SuiteDensity {
            label: "gue4",
            expr: "exp(-4*x^2)*(9+72*x^2-192*x^4+512*x^6)",
            x: (-4.0, 4.0),
            y: None,
        },
        SuiteDensity {
            label: "oscillatory",
            expr: "2+cos(100*x)",
            x: (-1.0, 1.0),
            y: None,
        },
        SuiteDensity {
            label: "sech200",
            expr: "sech(200*x)",
            x: (-1.0, 1.0),
            y: None,
        },
        SuiteDensity {
            label: "bimodal2d",
            expr: "exp(-100*(x-1)^2)+exp(-100*(y+1)^2)*(1+cos(20*x))",
            x: (-2.0, 2.0),
            y: Some((-2.0, 2.0)),
        },
        SuiteDensity {
            label: "quartic2d",
            expr: "exp(-x^4/2-y^4/2)*(x-y)^2",
            x: (-7.0, 7.0),
            y: Some((-7.0, 7.0)),
        },
        SuiteDensity {
            label: "sech2d",
            expr: "exp(-x^2-2*y^2)*sech(10*x*y)",
            x: (-5.0, 5.0),
            y: Some((-4.0, 4.0)),
        },
        SuiteDensity {
            label: "butterfly",
            expr: "exp(-x^2-2*y^2)*sech(10*x*y)*(x-y)^2",
            x: (-3.0, 3.0),
            y: Some((-3.0, 3.0)),
        },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Its,
    Rs,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Its => "ITS",
            Method::Rs => "RS",
        }
    }
}

/// One benchmark measurement: timings, density evaluation count, rank (2D),
/// and the statistical verdict.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub density: String,
    pub method: Method,
    pub n: usize,
    pub construct_s: f64,
    pub sample_s: f64,
    pub evals: u64,
    pub rank: Option<usize>,
    pub gof: GofReport,
}

impl BenchRecord {
    pub fn csv_header() -> &'static str {
        "density,method,n,construct_s,sample_s,total_s,evals,rank,gof_stat,gof_pass"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{},{},{:.6e},{}",
            self.density,
            self.method.name(),
            self.n,
            self.construct_s,
            self.sample_s,
            self.construct_s + self.sample_s,
            self.evals,
            self.rank.map_or(String::new(), |r| r.to_string()),
            self.gof.statistic,
            self.gof.pass,
        )
    }
}

/// Rectangular hat from the fitted approximant: refined grid maximum,
/// inflated a hair against rounding-level hat violations.
pub fn hat_height_1d(series: &ChebSeries) -> f64 {
    series.max_abs(10).1 * (1.0 + 1e-10)
}

/// 2D hat: grid argmax of the low-rank surrogate followed by
/// coordinate-wise golden refinement, same inflation as 1D.
pub fn hat_height_2d(lr: &LowRank2D) -> f64 {
    let dom = lr.domain();
    const N: usize = 256;
    let (mut bx, mut by, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=N {
        let x = dom.x_iv.a() + dom.x_iv.length() * i as f64 / N as f64;
        for j in 0..=N {
            let y = dom.y_iv.a() + dom.y_iv.length() * j as f64 / N as f64;
            let v = lr.eval(x, y).abs();
            if v > best {
                best = v;
                bx = x;
                by = y;
            }
        }
    }
    let dx = dom.x_iv.length() / N as f64;
    let dy = dom.y_iv.length() / N as f64;
    for _ in 0..6 {
        bx = golden_argmax(
            |x| lr.eval(x, by).abs(),
            (bx - dx).max(dom.x_iv.a()),
            (bx + dx).min(dom.x_iv.b()),
        );
        by = golden_argmax(
            |y| lr.eval(bx, y).abs(),
            (by - dy).max(dom.y_iv.a()),
            (by + dy).min(dom.y_iv.b()),
        );
        best = best.max(lr.eval(bx, by).abs());
    }
    best * (1.0 + 1e-10)
}

fn golden_argmax<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    for _ in 0..60 {
        let c = b - INV_PHI * (b - a);
        let d = a + INV_PHI * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Run inverse transform and rejection sampling on one suite density and
/// return both records.
pub fn run_density(d: &SuiteDensity, n: usize, seed: u64, tol: f64) -> Result<Vec<BenchRecord>> {
    let expr = parse(d.expr)?;
    let x_iv = Interval::new(d.x.0, d.x.1)?;
    match d.y {
        None => run_density_1d(d, &expr, x_iv, n, seed, tol),
        Some((c, dd)) => {
            let y_iv = Interval::new(c, dd)?;
            run_density_2d(d, &expr, x_iv, y_iv, n, seed, tol)
        }
    }
}

fn run_density_1d(
    d: &SuiteDensity,
    expr: &Expr,
    x_iv: Interval,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<BenchRecord>> {
    let oracle = |x: f64| expr.eval(x, f64::NAN);

    // Inverse transform.
    let f_its = compile(expr, x_iv, None)?;
    let t = Instant::now();
    let cdf = cdf_from_density(&f_its, x_iv, tol)?;
    let construct_s = t.elapsed().as_secs_f64();
    let mut rng = UniformSource::new(seed);
    let t = Instant::now();
    let batch = sample_1d_from_cdf(&cdf, n, &mut rng, DEFAULT_TOL_X);
    let sample_s = t.elapsed().as_secs_f64();
    let gof = ks_against_oracle(&batch.points, &oracle, x_iv);
    let its = BenchRecord {
        density: d.label.into(),
        method: Method::Its,
        n,
        construct_s,
        sample_s,
        evals: f_its.eval_count(),
        rank: None,
        gof,
    };

    // Rejection with a rectangular hat. The hat comes from an uncounted,
    // untimed fit; hat construction cost is excluded from the comparison.
    let hat_series = adaptive_fit(oracle, x_iv, tol, MAX_GRID_LOG2)?;
    let hat = hat_height_1d(&hat_series);
    let f_rs = compile(expr, x_iv, None)?;
    let mut rng = UniformSource::new(seed ^ 0x5DEECE66D);
    let t = Instant::now();
    let (rs_batch, stats) = rejection_sample_1d(&f_rs, x_iv, n, hat, &mut rng)?;
    let sample_s = t.elapsed().as_secs_f64();
    let gof = ks_against_oracle(&rs_batch.points, &oracle, x_iv);
    let rs = BenchRecord {
        density: d.label.into(),
        method: Method::Rs,
        n,
        construct_s: 0.0,
        sample_s,
        evals: stats.density_evals,
        rank: None,
        gof,
    };
    Ok(vec![its, rs])
}

fn ks_against_oracle(samples: &[f64], f: &dyn Fn(f64) -> f64, iv: Interval) -> GofReport {
    let cdf_values = oracle_cdf_at(f, iv.a(), iv.b(), samples);
    // ks_test wants a callable; feed it precomputed values keyed by sample.
    let mut pairs: Vec<(f64, f64)> = samples.iter().copied().zip(cdf_values).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len() as f64;
    let mut stat = 0.0f64;
    for (i, (_, fx)) in pairs.iter().enumerate() {
        stat = stat.max(((i + 1) as f64 / n - fx).abs());
        stat = stat.max((fx - i as f64 / n).abs());
    }
    let threshold = crate::gof::ks_critical(DEFAULT_ALPHA, pairs.len());
    GofReport {
        kind: crate::gof::GofKind::KolmogorovSmirnov,
        statistic: stat,
        threshold,
        p_value: None,
        pass: stat < threshold,
    }
}

fn run_density_2d(
    d: &SuiteDensity,
    expr: &Expr,
    x_iv: Interval,
    y_iv: Interval,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<BenchRecord>> {
    let dom = Domain2D::new(x_iv, y_iv);
    let oracle = |x: f64, y: f64| expr.eval(x, y);
    let masses = cell_masses_2d(
        &oracle,
        x_iv.a(),
        x_iv.b(),
        y_iv.a(),
        y_iv.b(),
        20,
        20,
        12,
    );

    let f_its = compile(expr, x_iv, Some(y_iv))?;
    let t = Instant::now();
    let session = build_session(&f_its, dom, tol)?;
    let construct_s = t.elapsed().as_secs_f64();
    let mut rng = UniformSource::new(seed);
    let t = Instant::now();
    let batch = sample_2d(&session, n, &mut rng, DEFAULT_TOL_X)?;
    let sample_s = t.elapsed().as_secs_f64();
    let gof = chi_square_pairs(&batch.points, &masses, x_iv, y_iv);
    let its = BenchRecord {
        density: d.label.into(),
        method: Method::Its,
        n,
        construct_s,
        sample_s,
        evals: f_its.eval_count(),
        rank: Some(session.low_rank().rank()),
        gof,
    };

    let hat = hat_height_2d(session.low_rank());
    let f_rs = compile(expr, x_iv, Some(y_iv))?;
    let mut rng = UniformSource::new(seed ^ 0x5DEECE66D);
    let t = Instant::now();
    let (rs_batch, stats) = rejection_sample_2d(&f_rs, dom, n, hat, &mut rng)?;
    let sample_s = t.elapsed().as_secs_f64();
    let gof = chi_square_pairs(&rs_batch.points, &masses, x_iv, y_iv);
    let rs = BenchRecord {
        density: d.label.into(),
        method: Method::Rs,
        n,
        construct_s: 0.0,
        sample_s,
        evals: stats.density_evals,
        rank: None,
        gof,
    };
    Ok(vec![its, rs])
}

/// Bin pairs on the 20×20 equal-width grid and run the chi-square gate
/// against the oracle cell masses.
pub fn chi_square_pairs(
    points: &[(f64, f64)],
    masses: &[f64],
    x_iv: Interval,
    y_iv: Interval,
) -> GofReport {
    const B: usize = 20;
    let mut observed = vec![0u64; B * B];
    for &(x, y) in points {
        let i = (((x - x_iv.a()) / x_iv.length() * B as f64) as usize).min(B - 1);
        let j = (((y - y_iv.a()) / y_iv.length() * B as f64) as usize).min(B - 1);
        observed[i * B + j] += 1;
    }
    // Cochran's rule: the asymptotic chi-square distribution needs expected
    // counts of at least ~5, so cells thinner than 5/n also go to the tail.
    let merge_below = CHI_MERGE_BELOW.max(5.0 / points.len().max(1) as f64);
    chi_square_test(&observed, masses, merge_below, DEFAULT_ALPHA)
}

/// One row of the eval-count sweep: how many density evaluations each
/// method spent to produce `n` samples.
#[derive(Debug, Clone, Copy)]
pub struct EvalCountRow {
    pub n: usize,
    pub evals_its: u64,
    pub evals_rs: u64,
}

/// Sweep sample counts for a univariate density, measuring density
/// evaluations. Inverse transform evaluates only during construction, so
/// its column is constant; rejection grows linearly.
pub fn evalcount_sweep(
    expr: &Expr,
    x_iv: Interval,
    ns: &[usize],
    seed: u64,
    tol: f64,
) -> Result<Vec<EvalCountRow>> {
    let oracle = |x: f64| expr.eval(x, f64::NAN);
    let hat_series = adaptive_fit(oracle, x_iv, tol, MAX_GRID_LOG2)?;
    let hat = hat_height_1d(&hat_series);
    let mut rows = Vec::with_capacity(ns.len());
    for (k, &n) in ns.iter().enumerate() {
        let f_its = compile(expr, x_iv, None)?;
        let cdf = cdf_from_density(&f_its, x_iv, tol)?;
        let mut rng = UniformSource::new(seed.wrapping_add(k as u64));
        let _ = sample_1d_from_cdf(&cdf, n, &mut rng, DEFAULT_TOL_X);
        let evals_its = f_its.eval_count();

        let f_rs = compile(expr, x_iv, None)?;
        let mut rng = UniformSource::new(seed.wrapping_add(k as u64) ^ 0xA5A5A5A5);
        let (_, stats) = rejection_sample_1d(&f_rs, x_iv, n, hat, &mut rng)?;
        rows.push(EvalCountRow {
            n,
            evals_its,
            evals_rs: stats.density_evals,
        });
    }
    Ok(rows)
}

/// Equal-width histogram of univariate samples.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

pub fn histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples to bin".into()));
    }
    assert!(bins >= 1);
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { hi - lo } else { 1.0 };
    let edges: Vec<f64> = (0..=bins)
        .map(|i| lo + width * i as f64 / bins as f64)
        .collect();
    let mut counts = vec![0u64; bins];
    for &x in samples {
        let i = (((x - lo) / width * bins as f64) as usize).min(bins - 1);
        counts[i] += 1;
    }
    Ok(Histogram { edges, counts })
}

/// Render a histogram as a standalone SVG bar chart, optionally overlaying
/// a curve of per-bin reference values (same vertical scale as the counts).
pub fn histogram_svg(h: &Histogram, overlay: Option<&[f64]>) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const MARGIN: f64 = 50.0;
    let max_count = h.counts.iter().copied().max().unwrap_or(1).max(1) as f64;
    let max_overlay = overlay
        .map(|o| o.iter().copied().fold(0.0f64, f64::max))
        .unwrap_or(0.0);
    let vmax = max_count.max(max_overlay) * 1.05;
    let x0 = h.edges[0];
    let x1 = *h.edges.last().unwrap();
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |v: f64| H - MARGIN - v / vmax * (H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    for (i, &count) in h.counts.iter().enumerate() {
        let xl = sx(h.edges[i]);
        let xr = sx(h.edges[i + 1]);
        let yt = sy(count as f64);
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#4878cf\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
            xl,
            yt,
            xr - xl,
            H - MARGIN - yt
        ));
    }
    if let Some(values) = overlay {
        let centers = h.bin_centers();
        let path: Vec<String> = centers
            .iter()
            .zip(values)
            .enumerate()
            .map(|(i, (&x, &v))| {
                format!("{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, sx(x), sy(v))
            })
            .collect();
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"#d65f5f\" stroke-width=\"2\"/>\n",
            path.join(" ")
        ));
    }
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">{:.3}</text>\n<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{:.3}</text>\n",
        MARGIN,
        H - MARGIN + 16.0,
        x0,
        W - MARGIN,
        H - MARGIN + 16.0,
        x1
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Parse a samples CSV produced by this crate (comment lines start with
/// `#`, first non-comment line is the header).
pub fn read_samples_1d(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut header_seen = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let first = line.split(',').next().unwrap();
        let v: f64 = first.parse().map_err(|_| Error::EmptyInput(
            format!("bad sample line `{line}`"),
        ))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptyInput("sample CSV holds no rows".into()));
    }
    Ok(values)
}
