//! Estimators over planned observation sequences.
//!
//! Every estimator walks a plan (or a pool in native order), draws outcomes
//! lazily through the ledger, and records its running statistic at
//! power-of-two checkpoints plus the final step. The deterministic
//! companion `mean_trace` averages the cached means `p0(t)` along the same
//! plan; by construction the random running mean differs from it only by a
//! martingale fluctuation, which is the residual the diagnostics module
//! watches.

use crate::error::{Error, Result};
use crate::measures::IntervalRC;
use crate::planner::PermutationPlan;
use crate::process::{DrawLedger, ObservationPool, PoolScheme};

/// A running statistic sampled at checkpoints `n ∈ {1, 2, 4, …} ∪ {n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    checkpoints: Vec<(u64, f64)>,
}

impl ConvergenceTrace {
    pub(crate) fn from_checkpoints(checkpoints: Vec<(u64, f64)>) -> Self {
        ConvergenceTrace { checkpoints }
    }

    fn record(&mut self, n: u64, n_max: u64, value: f64) {
        if n.is_power_of_two() || n == n_max {
            self.checkpoints.push((n, value));
        }
    }

    pub fn checkpoints(&self) -> &[(u64, f64)] {
        &self.checkpoints
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }

    /// Value at the last checkpoint.
    pub fn final_value(&self) -> Result<f64> {
        self.checkpoints.last().map(|(_, v)| *v).ok_or(Error::EmptyTrace)
    }

    pub fn final_n(&self) -> Result<u64> {
        self.checkpoints.last().map(|(n, _)| *n).ok_or(Error::EmptyTrace)
    }
}

/// Relative frequency of successes along the plan:
/// `(1/n) Σ Y(t_{π(j)})`.
pub fn running_mean(
    plan: &PermutationPlan,
    pool: &ObservationPool,
    ledger: &mut DrawLedger,
) -> Result<ConvergenceTrace> {
    let n_max = plan.len() as u64;
    let mut trace = ConvergenceTrace { checkpoints: Vec::new() };
    let mut sum = 0u64;
    for (i, j) in plan.indices().enumerate() {
        sum += ledger.draw(pool, j)? as u64;
        let n = i as u64 + 1;
        trace.record(n, n_max, sum as f64 / n as f64);
    }
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace)
}

/// Deterministic companion of [`running_mean`]: the average of the cached
/// means `p0(t_{π(j)})` along the plan. No draws are made.
pub fn mean_trace(plan: &PermutationPlan, pool: &ObservationPool) -> Result<ConvergenceTrace> {
    let n_max = plan.len() as u64;
    let mut trace = ConvergenceTrace { checkpoints: Vec::new() };
    let mut sum = 0.0;
    for (i, j) in plan.indices().enumerate() {
        sum += pool.mark(j)?;
        let n = i as u64 + 1;
        trace.record(n, n_max, sum / n as f64);
    }
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(trace)
}

/// Frequency restricted to a time window, and how much of the plan lands
/// there.
#[derive(Debug, Clone)]
pub struct IntervalFrequency {
    /// Restricted relative frequency
    /// `n(a,b]^{-1} Σ_{t_{π(j)} ∈ (a,b]} Y(t_{π(j)})`.
    pub mean: ConvergenceTrace,
    /// `n(a,b]/n` at the same checkpoints.
    pub count_ratio: ConvergenceTrace,
    /// Checkpoints where no planned instant had entered the window yet, so
    /// the restricted mean was undefined and skipped.
    pub skipped_checkpoints: Vec<u64>,
}

/// Relative frequency among planned instants falling in `window`. Only
/// instants inside the window are drawn.
pub fn interval_frequency(
    plan: &PermutationPlan,
    pool: &ObservationPool,
    ledger: &mut DrawLedger,
    window: &IntervalRC,
) -> Result<IntervalFrequency> {
    let horizon = pool.horizon();
    if window.lo() < 0.0 || window.hi() > horizon {
        return Err(Error::IntervalOutsideDomain {
            lo: window.lo(),
            hi: window.hi(),
            dlo: 0.0,
            dhi: horizon,
        });
    }
    let n_max = plan.len() as u64;
    let mut mean = ConvergenceTrace { checkpoints: Vec::new() };
    let mut count_ratio = ConvergenceTrace { checkpoints: Vec::new() };
    let mut skipped = Vec::new();
    let mut inside = 0u64;
    let mut sum = 0u64;
    for (i, j) in plan.indices().enumerate() {
        if window.contains(pool.time(j)?) {
            inside += 1;
            sum += ledger.draw(pool, j)? as u64;
        }
        let n = i as u64 + 1;
        if n.is_power_of_two() || n == n_max {
            count_ratio.record(n, n_max, inside as f64 / n as f64);
            if inside > 0 {
                mean.record(n, n_max, sum as f64 / inside as f64);
            } else {
                skipped.push(n);
            }
        }
    }
    if count_ratio.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok(IntervalFrequency { mean, count_ratio, skipped_checkpoints: skipped })
}

/// Relative frequency over a pool accumulating at `t_star`, in native pool
/// order. The pool must be a `ConvergentTo` design for that point.
pub fn pointwise_estimate(
    t_star: f64,
    pool: &ObservationPool,
    ledger: &mut DrawLedger,
) -> Result<ConvergenceTrace> {
    match pool.scheme() {
        PoolScheme::ConvergentTo { t_star: s, .. } if *s == t_star => {}
        other => {
            return Err(Error::InvalidScheme(format!(
                "pointwise estimation at {t_star} needs a pool accumulating there, got {other:?}"
            )))
        }
    }
    running_mean(&PermutationPlan::identity(pool), pool, ledger)
}

/// Difference of one-sided relative frequencies around `t_star`, the
/// estimator of the jump `p0(t_star) - p0(t_star-)`. The trace index is the
/// number of draws per side.
pub fn jump_estimate(
    t_star: f64,
    right_pool: &ObservationPool,
    left_pool: &ObservationPool,
    ledger: &mut DrawLedger,
) -> Result<ConvergenceTrace> {
    if right_pool.is_empty() || left_pool.is_empty() {
        return Err(Error::InvalidScheme("jump estimation needs instants on both sides".into()));
    }
    if let Some(t) = right_pool.times().iter().find(|t| **t < t_star) {
        return Err(Error::InvalidScheme(format!(
            "right pool contains {t}, below the jump point {t_star}"
        )));
    }
    if let Some(t) = left_pool.times().iter().find(|t| **t >= t_star) {
        return Err(Error::InvalidScheme(format!(
            "left pool contains {t}, not strictly below the jump point {t_star}"
        )));
    }
    let pairs = right_pool.len().min(left_pool.len()) as u64;
    let mut trace = ConvergenceTrace { checkpoints: Vec::new() };
    let (mut right_sum, mut left_sum) = (0u64, 0u64);
    for k in 0..pairs as usize {
        right_sum += ledger.draw(right_pool, k)? as u64;
        left_sum += ledger.draw(left_pool, k)? as u64;
        let n = k as u64 + 1;
        trace.record(n, pairs, (right_sum as f64 - left_sum as f64) / n as f64);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{step_mean, MeanFunction};

    #[test]
    fn mean_trace_of_alternating_marks() {
        // marks alternate 0.8, 0.2 (two-sided pool over a step mean), so the
        // partial means settle at 0.5 with error exactly 0.3/n on odd n.
        let mean = step_mean(0.2, 0.8, 0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(
            PoolScheme::TwoSided { t_star: 0.5, rate: 0.4, n: 256 },
            &mean,
        )
        .unwrap();
        let plan = PermutationPlan::identity(&pool);
        let trace = mean_trace(&plan, &pool).unwrap();
        for (n, v) in trace.checkpoints() {
            assert!((v - 0.5).abs() <= 0.3 / *n as f64 + 1e-15);
        }
        assert_eq!(trace.final_n().unwrap(), 256);
        assert_eq!(trace.final_value().unwrap(), 0.5);
    }

    #[test]
    fn running_mean_checkpoints_are_powers_of_two_plus_final() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 100 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let mut ledger = DrawLedger::new(5);
        let trace = running_mean(&plan, &pool, &mut ledger).unwrap();
        let ns: Vec<u64> = trace.checkpoints().iter().map(|(n, _)| *n).collect();
        assert_eq!(ns, vec![1, 2, 4, 8, 16, 32, 64, 100]);
    }

    #[test]
    fn running_mean_tracks_constant_mean() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 4096 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let mut ledger = DrawLedger::new(11);
        let trace = running_mean(&plan, &pool, &mut ledger).unwrap();
        assert!((trace.final_value().unwrap() - 0.5).abs() < 0.03);
    }

    #[test]
    fn full_window_restriction_equals_running_mean() {
        let mean = MeanFunction::constant(0.3, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 512 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let seed = 99;
        let global = running_mean(&plan, &pool, &mut DrawLedger::new(seed)).unwrap();
        let window = IntervalRC::new(0.0, 1.0).unwrap();
        let restricted =
            interval_frequency(&plan, &pool, &mut DrawLedger::new(seed), &window).unwrap();
        assert_eq!(global.checkpoints(), restricted.mean.checkpoints());
        assert!(restricted.skipped_checkpoints.is_empty());
        for (_, ratio) in restricted.count_ratio.checkpoints() {
            assert_eq!(*ratio, 1.0);
        }
    }

    #[test]
    fn empty_window_checkpoints_are_skipped_and_flagged() {
        // equispaced times 0.25, 0.5, 0.75: nothing before 0.1 ever
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 3 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let window = IntervalRC::new(0.0, 0.1).unwrap();
        let r = interval_frequency(&plan, &pool, &mut DrawLedger::new(1), &window).unwrap();
        assert!(r.mean.is_empty());
        assert_eq!(r.skipped_checkpoints, vec![1, 2, 3]);
        assert_eq!(r.count_ratio.checkpoints().len(), 3);
    }

    #[test]
    fn window_outside_horizon_is_rejected() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 3 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let window = IntervalRC::new(0.5, 1.5).unwrap();
        assert!(matches!(
            interval_frequency(&plan, &pool, &mut DrawLedger::new(1), &window),
            Err(Error::IntervalOutsideDomain { .. })
        ));
    }

    #[test]
    fn pointwise_requires_matching_convergent_pool() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let wrong = ObservationPool::generate(PoolScheme::Equispaced { n: 8 }, &mean).unwrap();
        assert!(pointwise_estimate(0.3, &wrong, &mut DrawLedger::new(1)).is_err());

        let pool = ObservationPool::generate(
            PoolScheme::ConvergentTo { t_star: 0.3, rate: 0.1, n: 2048 },
            &mean,
        )
        .unwrap();
        let trace = pointwise_estimate(0.3, &pool, &mut DrawLedger::new(21)).unwrap();
        assert!((trace.final_value().unwrap() - 0.5).abs() < 0.05);
    }

    #[test]
    fn jump_estimate_validates_sides() {
        let mean = step_mean(0.2, 0.6, 0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(
            PoolScheme::TwoSided { t_star: 0.5, rate: 0.4, n: 64 },
            &mean,
        )
        .unwrap();
        let (right, left) = pool.split_at(0.5);
        // swapped sides must be rejected
        assert!(jump_estimate(0.5, &left, &right, &mut DrawLedger::new(1)).is_err());
        let trace = jump_estimate(0.5, &right, &left, &mut DrawLedger::new(1)).unwrap();
        assert_eq!(trace.final_n().unwrap(), 32);
    }

    #[test]
    fn jump_estimate_recovers_degenerate_jump() {
        // p0 jumps 0 -> 1 at 0.5: outcomes are deterministic, the estimate
        // is exactly 1 at every checkpoint.
        let mean = step_mean(0.0, 1.0, 0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(
            PoolScheme::TwoSided { t_star: 0.5, rate: 0.4, n: 128 },
            &mean,
        )
        .unwrap();
        let (right, left) = pool.split_at(0.5);
        let trace = jump_estimate(0.5, &right, &left, &mut DrawLedger::new(9)).unwrap();
        for (_, v) in trace.checkpoints() {
            assert_eq!(*v, 1.0);
        }
    }
}
