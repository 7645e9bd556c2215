//! Rejection sampling with a rectangular hat, instrumented for
//! evaluation-count and acceptance-ratio comparisons.

use std::io::Write;

use crate::cheb::Interval;
use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::lowrank::Domain2D;
use crate::rng::UniformSource;
use crate::sampler1d::{PairBatch, SampleBatch};

/// Abort when a single run needs more proposals than this.
const PROPOSAL_CAP: u64 = 1_000_000_000;

/// Relative slack before a density value above the hat counts as a
/// genuinely invalid hat rather than rounding.
const HAT_SLACK: f64 = 1e-12;

/// Counters for one rejection-sampling run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RejectionStats {
    pub proposals: u64,
    pub accepted: u64,
    pub density_evals: u64,
}

impl RejectionStats {
    pub fn acceptance_ratio(&self) -> f64 {
        self.accepted as f64 / self.proposals as f64
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "proposals,accepted,density_evals")?;
        writeln!(w, "{},{},{}", self.proposals, self.accepted, self.density_evals)
    }
}

/// Accept/reject with a constant hat over `[a, b]`: propose x uniformly,
/// accept when `u · hat_height ≤ f(x)`, repeat until `n` are accepted.
pub fn rejection_sample_1d(
    f: &DensityFn,
    iv: Interval,
    n: usize,
    hat_height: f64,
    rng: &mut UniformSource,
) -> Result<(SampleBatch, RejectionStats)> {
    let evals_before = f.eval_count();
    let mut points = Vec::with_capacity(n);
    let mut proposals = 0u64;
    while points.len() < n {
        if proposals >= PROPOSAL_CAP {
            return Err(Error::Runaway(PROPOSAL_CAP));
        }
        let x = iv.a() + iv.length() * rng.next_uniform();
        let fx = f.eval1(x);
        proposals += 1;
        if fx > hat_height * (1.0 + HAT_SLACK) {
            return Err(Error::HatViolation {
                hat: hat_height,
                value: fx,
                location: format!("x = {x}"),
            });
        }
        if rng.next_uniform() * hat_height <= fx {
            points.push(x);
        }
    }
    let stats = RejectionStats {
        proposals,
        accepted: n as u64,
        density_evals: f.eval_count() - evals_before,
    };
    Ok((
        SampleBatch {
            seed: rng.seed(),
            points,
        },
        stats,
    ))
}

/// 2D analogue with a constant hat over the box.
pub fn rejection_sample_2d(
    f: &DensityFn,
    dom: Domain2D,
    n: usize,
    hat_height: f64,
    rng: &mut UniformSource,
) -> Result<(PairBatch, RejectionStats)> {
    let evals_before = f.eval_count();
    let mut points = Vec::with_capacity(n);
    let mut proposals = 0u64;
    while points.len() < n {
        if proposals >= PROPOSAL_CAP {
            return Err(Error::Runaway(PROPOSAL_CAP));
        }
        let x = dom.x_iv.a() + dom.x_iv.length() * rng.next_uniform();
        let y = dom.y_iv.a() + dom.y_iv.length() * rng.next_uniform();
        let fxy = f.eval2(x, y);
        proposals += 1;
        if fxy > hat_height * (1.0 + HAT_SLACK) {
            return Err(Error::HatViolation {
                hat: hat_height,
                value: fxy,
                location: format!("(x, y) = ({x}, {y})"),
            });
        }
        if rng.next_uniform() * hat_height <= fxy {
            points.push((x, y));
        }
    }
    let stats = RejectionStats {
        proposals,
        accepted: n as u64,
        density_evals: f.eval_count() - evals_before,
    };
    Ok((
        PairBatch {
            seed: rng.seed(),
            points,
        },
        stats,
    ))
}
