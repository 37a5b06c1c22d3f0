//! Limit oracles and convergence reports.
//!
//! The limiting value of the planned running mean is the integral of the
//! mean function against the target measure. `oracle_limit` computes it by
//! quadrature (plus atom terms), independently of any plan or draw, so the
//! stochastic traces can be checked against a number that was produced by a
//! different code path.

use crate::error::{Error, Result};
use crate::estimators::ConvergenceTrace;
use crate::measures::TargetMeasure;
use crate::planner::PermutationPlan;
use crate::process::{DrawLedger, MeanFunction, ObservationPool};

/// Checkpoints below this index are treated as burn-in by default.
pub const DEFAULT_BURN_IN: u64 = 1024;

/// `∫ p0(t) P(dt)`: the deterministic limit the planned running mean
/// converges to.
pub fn oracle_limit(target: &TargetMeasure, mean: &MeanFunction) -> f64 {
    target.integral_of(|t| mean.eval(t), &mean.breakpoints())
}

/// Limit of the running mean for a two-atom target: `p1·l1 + p2·l2` where
/// `l_i = p0(location_i)`.
pub fn two_atom_oracle(l1: f64, l2: f64, w1: f64, w2: f64) -> Result<f64> {
    if !(w1.is_finite() && w2.is_finite()) || w1 < 0.0 || w2 < 0.0 {
        return Err(Error::InvalidWeights(format!("atom weights {w1}, {w2} must be nonnegative")));
    }
    if ((w1 + w2) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("atom weights {w1} + {w2} do not sum to 1")));
    }
    if !(0.0..=1.0).contains(&l1) || !(0.0..=1.0).contains(&l2) {
        return Err(Error::MeanOutOfRange { t: f64::NAN, value: if (0.0..=1.0).contains(&l1) { l2 } else { l1 } });
    }
    Ok(w1 * l1 + w2 * l2)
}

/// Trace of the centered running mean `(1/n) Σ (Y(t_{π(j)}) - p0(t_{π(j)}))`.
///
/// This is the fluctuation term; it vanishes in probability regardless of
/// the plan, which separates "the plan rearranged the means correctly" from
/// "the noise averaged out".
pub fn rajchman_residual(
    plan: &PermutationPlan,
    pool: &ObservationPool,
    ledger: &mut DrawLedger,
) -> Result<ConvergenceTrace> {
    let outcomes = crate::estimators::running_mean(plan, pool, ledger)?;
    let means = crate::estimators::mean_trace(plan, pool)?;
    let checkpoints = outcomes
        .checkpoints()
        .iter()
        .zip(means.checkpoints())
        .map(|((n, y), (m, p))| {
            debug_assert_eq!(n, m);
            (*n, y - p)
        })
        .collect();
    Ok(ConvergenceTrace::from_checkpoints(checkpoints))
}

/// Summary of a trace against its oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub oracle: f64,
    pub final_n: u64,
    pub final_value: f64,
    pub final_error: f64,
    /// Largest absolute error over checkpoints at or past the burn-in index.
    pub sup_error: f64,
    pub burn_in: u64,
}

/// Compare a trace to its oracle, ignoring checkpoints before `burn_in`.
pub fn convergence_report(
    trace: &ConvergenceTrace,
    oracle: f64,
    burn_in: u64,
) -> Result<ConvergenceReport> {
    let final_n = trace.final_n()?;
    if final_n < burn_in {
        return Err(Error::BurnInTooLate { burn_in, last: final_n });
    }
    let final_value = trace.final_value()?;
    let sup_error = trace
        .checkpoints()
        .iter()
        .filter(|(n, _)| *n >= burn_in)
        .map(|(_, v)| (v - oracle).abs())
        .fold(0.0f64, f64::max);
    Ok(ConvergenceReport {
        oracle,
        final_n,
        final_value,
        final_error: (final_value - oracle).abs(),
        sup_error,
        burn_in,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::running_mean;
    use crate::measures::{Atom, IntervalRC, MeasureKind, PiecewiseMonotone, TargetMeasure};
    use crate::process::{MeanFunction, MeanKind, ObservationPool, PoolScheme};

    fn unit() -> IntervalRC {
        IntervalRC::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn oracle_for_quadratic_mean_under_uniform_target() {
        // ∫_0^1 t^2 dt = 1/3
        let target = TargetMeasure::uniform(unit()).unwrap();
        let mean =
            MeanFunction::new(MeanKind::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }, 1.0).unwrap();
        assert!((oracle_limit(&target, &mean) - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn oracle_commutes_with_pushforward() {
        // ∫ p0 dP computed directly vs the identity integral of the image
        // measure p0#P: both are E[p0] and must agree to 1e-8.
        let target = TargetMeasure::uniform(unit()).unwrap();
        let mean =
            MeanFunction::new(MeanKind::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }, 1.0).unwrap();
        let direct = oracle_limit(&target, &mean);
        let image = target.pushforward(&PiecewiseMonotone::monotone(|t| t * t)).unwrap();
        assert!((direct - image.integral_identity()).abs() < 1e-8);
    }

    #[test]
    fn oracle_with_atoms_counts_point_masses() {
        // P = (δ_{0.25} + δ_{0.75})/2, p0(t) = t: oracle is 0.5 exactly
        let target = TargetMeasure::new(
            unit(),
            MeasureKind::Atomic(vec![
                Atom { location: 0.25, mass: 0.5 },
                Atom { location: 0.75, mass: 0.5 },
            ]),
        )
        .unwrap();
        let mean = MeanFunction::new(MeanKind::Polynomial { coeffs: vec![0.0, 1.0] }, 1.0).unwrap();
        assert_eq!(oracle_limit(&target, &mean), 0.5);
    }

    #[test]
    fn two_atom_oracle_matches_hand_value() {
        // 0.5·0.9 + 0.5·0.4 = 0.65
        assert_eq!(two_atom_oracle(0.9, 0.4, 0.5, 0.5).unwrap(), 0.65);
        assert!(two_atom_oracle(0.9, 0.4, 0.7, 0.7).is_err());
        assert!(two_atom_oracle(1.2, 0.4, 0.5, 0.5).is_err());
    }

    #[test]
    fn residual_vanishes_for_degenerate_means() {
        // p0 ≡ 1 makes every outcome 1, so residual is exactly 0 at all n.
        let mean = MeanFunction::constant(1.0, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 64 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let trace = rajchman_residual(&plan, &pool, &mut DrawLedger::new(3)).unwrap();
        for (_, v) in trace.checkpoints() {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn residual_shrinks_for_fair_coin() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 4096 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let trace = rajchman_residual(&plan, &pool, &mut DrawLedger::new(17)).unwrap();
        let (_, last) = trace.checkpoints().last().copied().unwrap();
        assert!(last.abs() < 0.05);
    }

    #[test]
    fn report_takes_sup_after_burn_in() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 2048 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let trace = running_mean(&plan, &pool, &mut DrawLedger::new(7)).unwrap();
        let report = convergence_report(&trace, 0.5, 1024).unwrap();
        assert_eq!(report.final_n, 2048);
        assert!(report.sup_error >= report.final_error);
        // only the n = 1024 and n = 2048 checkpoints survive the cut
        let manual = trace
            .checkpoints()
            .iter()
            .filter(|(n, _)| *n >= 1024)
            .map(|(_, v)| (v - 0.5).abs())
            .fold(0.0f64, f64::max);
        assert_eq!(report.sup_error, manual);
    }

    #[test]
    fn report_rejects_burn_in_past_the_trace() {
        let mean = MeanFunction::constant(0.5, 1.0).unwrap();
        let pool = ObservationPool::generate(PoolScheme::Equispaced { n: 16 }, &mean).unwrap();
        let plan = PermutationPlan::identity(&pool);
        let trace = running_mean(&plan, &pool, &mut DrawLedger::new(7)).unwrap();
        assert!(matches!(
            convergence_report(&trace, 0.5, 1024),
            Err(Error::BurnInTooLate { burn_in: 1024, last: 16 })
        ));
    }
}
