//! Refinement and null-slot schedules.
//!
//! The planner scores candidates on a fixed base level but places marks in
//! cells of the active level, which deepens as the plan grows. The
//! refinement schedule says when: with thresholds `n0·2^i` the active level
//! increases by one every time the step count doubles, so each level stays
//! active for a constant fraction of the plan and cellwise frequencies have
//! time to settle before the next refinement.
//!
//! Marks living in cells the target does not charge still have to appear
//! somewhere or the permutation would not exhaust the pool. The null-slot
//! schedule reserves the perfect-square steps for them: about `sqrt(n)` of
//! the first `n` steps, a vanishing fraction, which is exactly the density
//! argument that keeps them from disturbing convergence.

use crate::error::{Error, Result};

/// Default first refinement threshold.
pub const DEFAULT_REFINEMENT_N0: u64 = 64;

/// When the active partition level deepens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementSchedule {
    base_level: usize,
    thresholds: Vec<u64>,
}

impl RefinementSchedule {
    /// Explicit thresholds; must be strictly increasing and positive.
    pub fn new(base_level: usize, thresholds: Vec<u64>) -> Result<Self> {
        if base_level == 0 {
            return Err(Error::InvalidSchedule("base level must be at least 1".into()));
        }
        if thresholds.first().is_some_and(|t| *t == 0) {
            return Err(Error::InvalidSchedule("thresholds must be positive".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule("thresholds must be strictly increasing".into()));
        }
        Ok(RefinementSchedule { base_level, thresholds })
    }

    /// Doubling thresholds `n0, 2·n0, 4·n0, …`, enough of them to cover
    /// plans of length `n_max`.
    pub fn doubling(base_level: usize, n0: u64, n_max: u64) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidSchedule("n0 must be positive".into()));
        }
        let mut thresholds = Vec::new();
        let mut t = n0;
        while t <= n_max {
            thresholds.push(t);
            match t.checked_mul(2) {
                Some(next) => t = next,
                None => break,
            }
        }
        Self::new(base_level, thresholds)
    }

    pub fn base_level(&self) -> usize {
        self.base_level
    }

    /// Active partition level when placing step `step` (1-based): the base
    /// level plus the number of thresholds at or below `step`.
    pub fn level_for_step(&self, step: u64) -> usize {
        self.base_level + self.thresholds.partition_point(|t| *t <= step)
    }

    /// Deepest level the schedule can ever activate.
    pub fn max_level(&self) -> usize {
        self.base_level + self.thresholds.len()
    }
}

/// Which steps are reserved for marks from null cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullSlotSchedule {
    /// Steps `1, 4, 9, 16, …`.
    Squares,
    /// No reserved steps; only usable when the target charges every cell.
    Never,
}

impl NullSlotSchedule {
    pub fn is_null_slot(&self, step: u64) -> bool {
        match self {
            NullSlotSchedule::Squares => {
                let r = step.isqrt();
                r * r == step
            }
            NullSlotSchedule::Never => false,
        }
    }

    /// Number of null slots among steps `1..=n`.
    pub fn slots_up_to(&self, n: u64) -> u64 {
        match self {
            NullSlotSchedule::Squares => n.isqrt(),
            NullSlotSchedule::Never => 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_levels_step_up_at_thresholds() {
        let s = RefinementSchedule::doubling(1, 64, 1 << 17).unwrap();
        assert_eq!(s.level_for_step(1), 1);
        assert_eq!(s.level_for_step(63), 1);
        assert_eq!(s.level_for_step(64), 2);
        assert_eq!(s.level_for_step(127), 2);
        assert_eq!(s.level_for_step(128), 3);
        assert_eq!(s.level_for_step(1 << 17), 13);
        assert_eq!(s.max_level(), 13);
    }

    #[test]
    fn explicit_thresholds_must_increase() {
        assert!(RefinementSchedule::new(2, vec![10, 10]).is_err());
        assert!(RefinementSchedule::new(2, vec![10, 5]).is_err());
        assert!(RefinementSchedule::new(0, vec![]).is_err());
        let fixed = RefinementSchedule::new(2, vec![]).unwrap();
        assert_eq!(fixed.level_for_step(1_000_000), 2);
    }

    #[test]
    fn square_slots() {
        let s = NullSlotSchedule::Squares;
        let squares: Vec<u64> = (1..=100).filter(|k| s.is_null_slot(*k)).collect();
        assert_eq!(squares, vec![1, 4, 9, 16, 25, 36, 49, 64, 81, 100]);
        assert_eq!(s.slots_up_to(100), 10);
        assert_eq!(s.slots_up_to(99), 9);
        assert!(!NullSlotSchedule::Never.is_null_slot(4));
    }

    #[test]
    fn slot_density_vanishes() {
        let s = NullSlotSchedule::Squares;
        for n in [100u64, 10_000, 1 << 17] {
            let density = s.slots_up_to(n) as f64 / n as f64;
            assert!(density <= 1.0 / (n as f64).sqrt() + 1e-12);
        }
    }
}
