//! Instrumented black-box densities: a function of one or two variables,
//! known only through pointwise evaluation, with a monotone call counter.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::cheb::Interval;

/// Number of free variables of a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    One,
    Two,
}

enum Eval {
    One(Box<dyn Fn(f64) -> f64 + Send + Sync>),
    Two(Box<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

/// A black-box density on its domain box. Every pointwise evaluation bumps
/// `eval_count` by exactly one, so construction cost is observable.
pub struct DensityFn {
    eval: Eval,
    x_iv: Interval,
    y_iv: Option<Interval>,
    count: AtomicU64,
    thread_safe: bool,
}

impl DensityFn {
    pub fn new_1d<F>(x_iv: Interval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DensityFn {
            eval: Eval::One(Box::new(f)),
            x_iv,
            y_iv: None,
            count: AtomicU64::new(0),
            thread_safe: false,
        }
    }

    pub fn new_2d<F>(x_iv: Interval, y_iv: Interval, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        DensityFn {
            eval: Eval::Two(Box::new(f)),
            x_iv,
            y_iv: Some(y_iv),
            count: AtomicU64::new(0),
            thread_safe: false,
        }
    }

    /// Declare the underlying black box safe to evaluate from several
    /// threads at once. Off by default: construction then evaluates serially.
    pub fn with_thread_safe(mut self, flag: bool) -> Self {
        self.thread_safe = flag;
        self
    }

    pub fn arity(&self) -> Arity {
        match self.eval {
            Eval::One(_) => Arity::One,
            Eval::Two(_) => Arity::Two,
        }
    }

    pub fn x_interval(&self) -> Interval {
        self.x_iv
    }

    /// Second-axis domain; `None` for univariate densities.
    pub fn y_interval(&self) -> Option<Interval> {
        self.y_iv
    }

    pub fn thread_safe(&self) -> bool {
        self.thread_safe
    }

    pub fn eval_count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    /// Evaluate a univariate density. Panics if the density is bivariate.
    pub fn eval1(&self, x: f64) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        match &self.eval {
            Eval::One(f) => f(x),
            Eval::Two(_) => panic!("eval1 called on a bivariate density"),
        }
    }

    /// Evaluate a bivariate density. Panics if the density is univariate.
    pub fn eval2(&self, x: f64, y: f64) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        match &self.eval {
            Eval::One(_) => panic!("eval2 called on a univariate density"),
            Eval::Two(f) => f(x, y),
        }
    }
}

impl std::fmt::Debug for DensityFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensityFn")
            .field("arity", &self.arity())
            .field("x_iv", &self.x_iv)
            .field("y_iv", &self.y_iv)
            .field("eval_count", &self.eval_count())
            .finish()
    }
}
