//! Vague discrepancy between a pseudo-empirical measure and a target.
//!
//! Convergence is tested cellwise over the levels of a progressive
//! partition: the discrepancy at level `L` is the worst absolute gap between
//! pseudo-empirical and target mass over every cell of every level up to
//! `L`. Cells must be continuity intervals of the target, otherwise the gap
//! at that cell is not a meaningful convergence indicator and the call is
//! rejected.

use crate::error::{Error, Result};
use crate::measures::{ProgressivePartition, PseudoEmpiricalMeasure, TargetMeasure};

/// Max over all cells of levels `1..=level` of
/// `|E(cell) - P(cell)|`.
pub fn vague_discrepancy(
    pem: &PseudoEmpiricalMeasure,
    target: &TargetMeasure,
    psp: &ProgressivePartition,
    level: usize,
) -> Result<f64> {
    if level == 0 || level > psp.max_level() {
        return Err(Error::LevelUnavailable { level, max: psp.max_level() });
    }
    let mut worst = 0.0f64;
    for l in 1..=level {
        for iv in psp.cells(l)? {
            if !target.is_continuity_interval(&iv) {
                return Err(Error::NotContinuityInterval { lo: iv.lo(), hi: iv.hi(), level: l });
            }
            let gap = (pem.mass(&iv).as_f64() - target.measure_of(&iv)?).abs();
            worst = worst.max(gap);
        }
    }
    Ok(worst)
}
