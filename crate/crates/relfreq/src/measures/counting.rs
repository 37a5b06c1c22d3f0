//! Counting view of a mark pool and the pool-richness check.
//!
//! The planner can only steer a pseudo-empirical measure towards a target if
//! every cell the target charges contains, for practical purposes, an
//! unlimited supply of pool marks. `check_membership` enforces the finite
//! proxy of that condition: every positively charged cell of every built
//! partition level must hold at least `threshold` marks.

use crate::error::{Error, Result};
use crate::measures::{IntervalRC, ProgressivePartition, TargetMeasure};

/// Cells with positive target mass must hold at least this many pool marks
/// unless the caller overrides the threshold.
pub const DEFAULT_MEMBERSHIP_THRESHOLD: u64 = 32;

/// An immutable view of pool marks supporting fast interval counts.
#[derive(Debug, Clone)]
pub struct CountingView {
    sorted: Vec<f64>,
}

impl CountingView {
    pub fn new(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        CountingView { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Number of marks in `(lo, hi]`.
    pub fn count(&self, iv: &IntervalRC) -> u64 {
        let below_hi = self.sorted.partition_point(|v| *v <= iv.hi());
        let below_lo = self.sorted.partition_point(|v| *v <= iv.lo());
        (below_hi - below_lo) as u64
    }
}

/// Checks that the pool is rich enough for the target on every level of the
/// partition: each cell must be a continuity interval of `target`, and each
/// cell with positive target mass must contain at least `threshold` marks.
/// The first violating cell is reported.
pub fn check_membership(
    target: &TargetMeasure,
    pool: &CountingView,
    psp: &ProgressivePartition,
    threshold: u64,
) -> Result<()> {
    check_membership_up_to(target, pool, psp, threshold, psp.max_level())
}

/// Same check restricted to levels `1..=max_level`, for callers that will
/// never activate the deeper levels of an over-built partition.
pub(crate) fn check_membership_up_to(
    target: &TargetMeasure,
    pool: &CountingView,
    psp: &ProgressivePartition,
    threshold: u64,
    max_level: usize,
) -> Result<()> {
    for level in 1..=max_level.min(psp.max_level()) {
        for iv in psp.cells(level)? {
            if !target.is_continuity_interval(&iv) {
                return Err(Error::NotContinuityInterval { lo: iv.lo(), hi: iv.hi(), level });
            }
            let mass = target.measure_of(&iv)?;
            if mass > 0.0 {
                let count = pool.count(&iv);
                if count < threshold {
                    return Err(Error::MembershipViolation {
                        lo: iv.lo(),
                        hi: iv.hi(),
                        level,
                        mass,
                        count,
                        threshold,
                    });
                }
            }
        }
    }
    Ok(())
}
