//! Alternating iteration `B_{2n+1} = T(B_{2n})`, `B_{2n+2} = S(B_{2n+1})`.
//!
//! Stopping uses two estimates of the distance from the current set to the
//! limit. The a priori Cauchy tail `alpha^n / (1 - alpha) * H(B_0, B_1)` and
//! the a posteriori `alpha / (1 - alpha) * H(B_{n-1}, B_n)`; iteration stops
//! once the first is below `tol` or the last successive distance is below
//! `tol * (1 - alpha)`.

use std::fmt::Write as _;

use super::system::{GifsSystem, Operator};
use crate::error::{Error, Result};
use crate::hausdorff::{check_snap, hausdorff_with, FiniteCompact, Strategy};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub snap: f64,
    pub strategy: Strategy,
}

impl IterationConfig {
    pub fn new(tol: f64, max_iter: usize, snap: f64) -> Self {
        IterationConfig {
            tol,
            max_iter,
            snap,
            strategy: Strategy::Accelerated,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        check_snap(self.snap)
    }
}

/// One application of `T` or `S`: `B_{n+1} = op(B_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub n: usize,
    pub operator: Operator,
    /// `|B_{n+1}|`.
    pub set_size: usize,
    /// `H(B_n, B_{n+1})`.
    pub successive_distance: f64,
    /// `alpha^n H(B_0, B_1)`.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    TailBound,
    SuccessiveFloor,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub steps: Vec<StepRecord>,
    pub attractor: FiniteCompact,
    pub converged: bool,
    pub stop: StopReason,
    /// Smaller of the a priori and a posteriori limit-distance estimates for
    /// the final set.
    pub tail_bound: f64,
    /// `H(A, T(A))` for the final set `A`.
    pub residual_t: f64,
    /// `H(A, S(A))` for the final set `A`.
    pub residual_s: f64,
    /// Both residuals within `2 tol`.
    pub fixed_set_ok: bool,
    pub tol: f64,
    pub snap: f64,
}

impl IterationTrace {
    /// Comma-delimited table `n,operator,set_size,successive_distance,bound`.
    pub fn to_table(&self) -> String {
        let mut out = String::from("n,operator,set_size,successive_distance,bound\n");
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{},{},{},{:e},{:e}",
                s.n, s.operator, s.set_size, s.successive_distance, s.bound
            );
        }
        out
    }
}

pub fn iterate_to_attractor(sys: &GifsSystem, seed: &FiniteCompact, cfg: &IterationConfig) -> Result<IterationTrace> {
    cfg.validate()?;
    let metric = sys.metric();
    let alpha = sys.alpha_star();
    let mut current = seed.clone();
    let mut steps = Vec::new();
    let mut first = 0.0;
    let mut stop = StopReason::MaxIter;
    let mut tail_bound = f64::INFINITY;
    let mut op = Operator::T;
    for n in 0..cfg.max_iter {
        let next = sys.apply(op, &current, cfg.snap)?;
        let d = hausdorff_with(metric, &current, &next, cfg.strategy)?;
        if n == 0 {
            first = d;
        }
        steps.push(StepRecord {
            n,
            operator: op,
            set_size: next.len(),
            successive_distance: d,
            bound: alpha.powi(n as i32) * first,
        });
        current = next;
        op = op.other();

        let a_priori = alpha.powi(n as i32 + 1) / (1.0 - alpha) * first;
        let a_posteriori = alpha / (1.0 - alpha) * d;
        tail_bound = a_priori.min(a_posteriori);
        if a_priori <= cfg.tol {
            stop = StopReason::TailBound;
            break;
        }
        if d <= cfg.tol * (1.0 - alpha) {
            stop = StopReason::SuccessiveFloor;
            break;
        }
    }
    let residual_t = hausdorff_with(
        metric,
        &current,
        &sys.apply(Operator::T, &current, cfg.snap)?,
        cfg.strategy,
    )?;
    let residual_s = hausdorff_with(
        metric,
        &current,
        &sys.apply(Operator::S, &current, cfg.snap)?,
        cfg.strategy,
    )?;
    Ok(IterationTrace {
        steps,
        attractor: current,
        converged: stop != StopReason::MaxIter,
        stop,
        tail_bound,
        residual_t,
        residual_s,
        fixed_set_ok: residual_t <= 2.0 * cfg.tol && residual_s <= 2.0 * cfg.tol,
        tol: cfg.tol,
        snap: cfg.snap,
    })
}

/// Like [`iterate_to_attractor`] but non-convergence is an error.
pub fn converged_attractor(sys: &GifsSystem, seed: &FiniteCompact, cfg: &IterationConfig) -> Result<IterationTrace> {
    let trace = iterate_to_attractor(sys, seed, cfg)?;
    if !trace.converged {
        return Err(Error::NonConvergence {
            iterations: trace.steps.len(),
            tail_bound: trace.tail_bound,
        });
    }
    Ok(trace)
}

/// Runs the iteration from two seeds and returns `H` between the two limits.
pub fn uniqueness_probe(
    sys: &GifsSystem,
    seed_a: &FiniteCompact,
    seed_b: &FiniteCompact,
    cfg: &IterationConfig,
) -> Result<f64> {
    let a = converged_attractor(sys, seed_a, cfg)?;
    let b = converged_attractor(sys, seed_b, cfg)?;
    hausdorff_with(sys.metric(), &a.attractor, &b.attractor, cfg.strategy)
}
