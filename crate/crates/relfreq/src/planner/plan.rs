//! Plan construction.
//!
//! `build_permutation` runs the greedy selection to completion: it verifies
//! the pool is rich enough for the target on every level the schedule will
//! activate, then decides all `n_max` placements and reports the base-level
//! discrepancy along power-of-two checkpoints. The resulting plan is an
//! injective list of pool indices plus per-step diagnostics; estimators only
//! consume the index order.

use crate::error::{Error, Result};
use crate::measures::{
    check_membership_up_to, CountingView, IntervalRC, ProgressivePartition, TargetMeasure,
};
use crate::planner::schedule::{NullSlotSchedule, RefinementSchedule};
use crate::planner::state::{Placement, PlannerState};
use crate::process::ObservationPool;

/// Cells of one partition level split by target charge.
#[derive(Debug, Clone)]
pub struct CellClasses {
    /// Cells with positive target mass, left to right.
    pub positive: Vec<IntervalRC>,
    /// Cells with zero target mass, left to right; their union is the null
    /// set whose marks only appear in reserved slots.
    pub null: Vec<IntervalRC>,
}

/// Splits the cells of `level` by whether the target charges them.
pub fn classify_cells(
    target: &TargetMeasure,
    psp: &ProgressivePartition,
    level: usize,
) -> Result<CellClasses> {
    let mut classes = CellClasses { positive: Vec::new(), null: Vec::new() };
    for iv in psp.cells(level)? {
        if target.measure_of(&iv)? > 0.0 {
            classes.positive.push(iv);
        } else {
            classes.null.push(iv);
        }
    }
    Ok(classes)
}

/// A finished plan: the order in which pool marks are to be observed.
#[derive(Debug, Clone)]
pub struct PermutationPlan {
    steps: Vec<Placement>,
    /// Base-level discrepancy at power-of-two checkpoints and at the end.
    pub base_discrepancy: Vec<(u64, f64)>,
    /// Final base-level discrepancy; `None` for identity plans.
    pub eps_report: Option<f64>,
}

impl PermutationPlan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Placement] {
        &self.steps
    }

    /// Pool indices in observation order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.pool_index)
    }

    /// The plan that observes a pool in its native order.
    pub fn identity(pool: &ObservationPool) -> Self {
        let steps = pool
            .times()
            .iter()
            .enumerate()
            .map(|(j, t)| Placement {
                step: j as u64 + 1,
                pool_index: j,
                value: *t,
                cell: 0,
                score: None,
            })
            .collect();
        PermutationPlan { steps, base_discrepancy: Vec::new(), eps_report: None }
    }
}

/// Builds a plan of `n_max` placements steering the pseudo-empirical measure
/// of `values` towards `target`.
///
/// Values are whatever axis the caller plans on: pool times for steering the
/// time distribution of observations, cached means for steering the
/// distribution of `p0` values. The membership check runs first over every
/// level the schedule can activate within `n_max` steps, so an impossible
/// request fails before any placement is decided.
pub fn build_permutation(
    target: &TargetMeasure,
    values: &[f64],
    psp: &ProgressivePartition,
    schedule: RefinementSchedule,
    null_slots: NullSlotSchedule,
    n_max: u64,
    membership_threshold: u64,
) -> Result<PermutationPlan> {
    if n_max == 0 {
        return Err(Error::InvalidSchedule("plan length must be positive".into()));
    }
    if n_max > values.len() as u64 {
        return Err(Error::PlanTooLong { requested: n_max, available: values.len() as u64 });
    }
    let deepest = schedule.level_for_step(n_max).min(psp.max_level());
    let view = CountingView::new(values);
    check_membership_up_to(target, &view, psp, membership_threshold, deepest)?;

    let base_level = schedule.base_level();
    let mut state = PlannerState::new(target, values, psp, schedule, null_slots)?;
    let mut steps = Vec::with_capacity(n_max as usize);
    let mut base_discrepancy = Vec::new();
    for _ in 0..n_max {
        let placement = state.next_index()?;
        steps.push(placement);
        let n = state.placed();
        if n.is_power_of_two() || n == n_max {
            base_discrepancy.push((n, base_level_discrepancy(&state, psp, base_level)));
        }
    }
    let eps = base_discrepancy.last().map(|(_, d)| *d);
    Ok(PermutationPlan { steps, base_discrepancy, eps_report: eps })
}

/// Worst gap between placed-count frequency and target mass over all cells
/// of levels `1..=base_level`, read directly off the planner counts.
fn base_level_discrepancy(
    state: &PlannerState,
    psp: &ProgressivePartition,
    base_level: usize,
) -> f64 {
    let n = state.placed() as f64;
    let mut worst = 0.0f64;
    for level in 1..=base_level {
        for id in psp.frontier(level).expect("base level exists") {
            let gap = (state.count(*id) as f64 / n - state.target_mass(*id)).abs();
            worst = worst.max(gap);
        }
    }
    worst
}
