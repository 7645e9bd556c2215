//! Goodness-of-fit gates: one- and two-sample Kolmogorov–Smirnov tests and
//! the chi-square test on binned counts.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Default significance level for all verdicts.
pub const DEFAULT_ALPHA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GofKind {
    KolmogorovSmirnov,
    ChiSquare,
}

/// Outcome of one statistical gate.
#[derive(Debug, Clone)]
pub struct GofReport {
    pub kind: GofKind,
    pub statistic: f64,
    /// KS: the critical statistic value; chi-square: the significance level.
    pub threshold: f64,
    /// Chi-square only.
    pub p_value: Option<f64>,
    pub pass: bool,
}

impl GofReport {
    pub fn summary(&self) -> String {
        match self.kind {
            GofKind::KolmogorovSmirnov => format!(
                "KS stat {:.4e} vs critical {:.4e}: {}",
                self.statistic,
                self.threshold,
                if self.pass { "pass" } else { "FAIL" }
            ),
            GofKind::ChiSquare => format!(
                "chi-square stat {:.4} p={:.4e} vs alpha {:.0e}: {}",
                self.statistic,
                self.p_value.unwrap_or(f64::NAN),
                self.threshold,
                if self.pass { "pass" } else { "FAIL" }
            ),
        }
    }
}

/// Survival function of the asymptotic Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2 k² λ²}`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Critical KS statistic at level `alpha` for sample size `n`
/// (asymptotic; ≈ 1.95/√n at alpha = 0.001).
pub fn ks_critical(alpha: f64, n: usize) -> f64 {
    let (mut lo, mut hi) = (0.1, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_sf(mid) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) / (n as f64).sqrt()
}

/// One-sample KS statistic of `samples` against the reference CDF values at
/// the sorted samples: `sup |F_emp - F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    d
}

/// One-sample KS gate.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> GofReport {
    let statistic = ks_statistic(samples, cdf);
    let threshold = ks_critical(alpha, samples.len());
    GofReport {
        kind: GofKind::KolmogorovSmirnov,
        statistic,
        threshold,
        p_value: None,
        pass: statistic < threshold,
    }
}

/// Two-sample KS gate: are `a` and `b` drawn from the same distribution?
pub fn ks2_test(a: &[f64], b: &[f64], alpha: f64) -> GofReport {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let mut d = 0.0f64;
    let (mut i, mut j) = (0usize, 0usize);
    while i < n && j < m {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let lambda = ks_critical(alpha, 1); // critical λ itself
    let threshold = lambda * ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    GofReport {
        kind: GofKind::KolmogorovSmirnov,
        statistic: d,
        threshold,
        p_value: None,
        pass: d < threshold,
    }
}

/// Chi-square gate on binned counts. `expected_masses` are reference cell
/// probabilities; cells with mass below `merge_below` are pooled into one
/// tail cell. Degrees of freedom: cells − 1.
pub fn chi_square_test(
    observed: &[u64],
    expected_masses: &[f64],
    merge_below: f64,
    alpha: f64,
) -> GofReport {
    assert_eq!(observed.len(), expected_masses.len());
    let n: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = Vec::new(); // (observed, expected mass)
    let mut tail = (0.0f64, 0.0f64);
    for (&o, &mass) in observed.iter().zip(expected_masses) {
        if mass < merge_below {
            tail.0 += o as f64;
            tail.1 += mass;
        } else {
            cells.push((o as f64, mass));
        }
    }
    if tail.1 > 0.0 || tail.0 > 0.0 {
        cells.push(tail);
    }
    let total_mass: f64 = cells.iter().map(|c| c.1).sum();
    let mut stat = 0.0;
    for (o, mass) in &cells {
        let e = n as f64 * mass / total_mass;
        if e > 0.0 {
            stat += (o - e) * (o - e) / e;
        } else if *o > 0.0 {
            stat = f64::INFINITY;
        }
    }
    let dof = (cells.len().saturating_sub(1)).max(1) as f64;
    let p_value = if stat.is_finite() {
        1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
    } else {
        0.0
    };
    GofReport {
        kind: GofKind::ChiSquare,
        statistic: stat,
        threshold: alpha,
        p_value: Some(p_value),
        pass: p_value >= alpha,
    }
}
