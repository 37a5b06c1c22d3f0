//! Randomized invariants of the measure layer: additivity, refinement
//! consistency, pushforward mass conservation, and discrepancy bounds.

use proptest::prelude::*;
use relfreq::measures::{
    vague_discrepancy, Atom, Density, IntervalRC, MeasureKind, PiecewiseMonotone,
    ProgressivePartition, PseudoEmpiricalMeasure, TargetMeasure,
};
use relfreq::process::radical_inverse;

fn unit() -> IntervalRC {
    IntervalRC::new(0.0, 1.0).unwrap()
}

/// Up to three atoms, strictly interior, padded apart, masses normalized.
fn atoms_strategy() -> impl Strategy<Value = Vec<Atom>> {
    (1usize..=3).prop_flat_map(|k| {
        let locs = prop::collection::vec(0.05..0.95f64, k);
        let weights = prop::collection::vec(0.1..1.0f64, k);
        (locs, weights).prop_filter_map("atom locations too close", |(mut locs, weights)| {
            locs.sort_by(f64::total_cmp);
            if locs.windows(2).any(|w| w[1] - w[0] < 1e-3) {
                return None;
            }
            let total: f64 = weights.iter().sum();
            Some(
                locs.iter()
                    .zip(&weights)
                    .map(|(l, w)| Atom { location: *l, mass: w / total })
                    .collect(),
            )
        })
    })
}

/// Uniform, affine densities, pure atoms, and uniform/atomic mixtures.
fn target_strategy() -> impl Strategy<Value = TargetMeasure> {
    prop_oneof![
        Just(TargetMeasure::uniform(unit()).unwrap()),
        (0.0..2.0f64).prop_map(|c1| {
            let c0 = 1.0 - c1 / 2.0;
            let density = Density::new(move |t| c0 + c1 * t, vec![]);
            TargetMeasure::new(unit(), MeasureKind::AbsolutelyContinuous(density)).unwrap()
        }),
        atoms_strategy()
            .prop_map(|atoms| TargetMeasure::new(unit(), MeasureKind::Atomic(atoms)).unwrap()),
        (0.1..0.9f64, atoms_strategy()).prop_map(|(w, atoms)| {
            let kind = MeasureKind::Mixture(vec![
                (w, MeasureKind::AbsolutelyContinuous(Density::new(|_| 1.0, vec![]))),
                (1.0 - w, MeasureKind::Atomic(atoms)),
            ]);
            TargetMeasure::new(unit(), kind).unwrap()
        }),
    ]
}

proptest! {
    // Each level is a partition, so target masses must sum to one and
    // pseudo-empirical counts must sum to n with no float slack at all.
    #[test]
    fn level_masses_sum_to_one(target in target_strategy(), depth in 2usize..10) {
        let psp = ProgressivePartition::build(unit(), depth, &target.atom_locations()).unwrap();
        for level in 1..=depth {
            let total: f64 = psp
                .cells(level)
                .unwrap()
                .iter()
                .map(|iv| target.measure_of(iv).unwrap())
                .sum();
            prop_assert!((total - 1.0).abs() <= 1e-9, "level {level}: total {total}");
        }
    }

    #[test]
    fn pem_counts_sum_exactly(
        marks in prop::collection::vec(1e-4..1.0f64, 1..200),
        depth in 2usize..9,
    ) {
        let pem = PseudoEmpiricalMeasure::new(marks).unwrap();
        let psp = ProgressivePartition::build(unit(), depth, &[]).unwrap();
        for level in 1..=depth {
            let count: u64 = psp.cells(level).unwrap().iter().map(|iv| pem.mass(iv).count).sum();
            prop_assert_eq!(count, pem.n());
        }
    }

    // One split refines a single cell; its mass must redistribute onto the
    // two children and nothing else.
    #[test]
    fn split_masses_add(target in target_strategy(), depth in 2usize..9) {
        let psp = ProgressivePartition::build(unit(), depth, &target.atom_locations()).unwrap();
        for level in 1..depth {
            let parent = psp.node(psp.split_creating(level).unwrap());
            let (l, r) = parent.children.unwrap();
            let whole = target.measure_of(&parent.iv).unwrap();
            let left = target.measure_of(&psp.node(l).iv).unwrap();
            let right = target.measure_of(&psp.node(r).iv).unwrap();
            prop_assert!((whole - (left + right)).abs() <= 1e-9);
        }
    }

    #[test]
    fn split_counts_add_exactly(
        marks in prop::collection::vec(1e-4..1.0f64, 1..200),
        depth in 2usize..9,
    ) {
        let pem = PseudoEmpiricalMeasure::new(marks).unwrap();
        let psp = ProgressivePartition::build(unit(), depth, &[]).unwrap();
        for level in 1..depth {
            let parent = psp.node(psp.split_creating(level).unwrap());
            let (l, r) = parent.children.unwrap();
            prop_assert_eq!(
                pem.mass(&parent.iv).count,
                pem.mass(&psp.node(l).iv).count + pem.mass(&psp.node(r).iv).count
            );
        }
    }

    #[test]
    fn pem_pushforward_keeps_n(
        marks in prop::collection::vec(1e-4..1.0f64, 1..200),
        a in -1.0..1.0f64,
        b in 0.2..3.0f64,
    ) {
        let pem = PseudoEmpiricalMeasure::new(marks).unwrap();
        prop_assert_eq!(pem.pushforward(|t| a + b * t).n(), pem.n());
    }

    // Deeper levels take the max over a superset of cells.
    #[test]
    fn discrepancy_is_monotone_in_level(
        target in target_strategy(),
        marks in prop::collection::vec(1e-4..1.0f64, 1..300),
    ) {
        let psp = ProgressivePartition::build(unit(), 6, &target.atom_locations()).unwrap();
        let pem = PseudoEmpiricalMeasure::new(marks).unwrap();
        let mut prev = 0.0;
        for level in 1..=6 {
            let d = vague_discrepancy(&pem, &target, &psp, level).unwrap();
            prop_assert!(d >= prev, "level {level}: {d} < {prev}");
            prev = d;
        }
    }

    // Van der Corput prefixes against the uniform target: each level-L cell
    // is dyadic, so the prefix counting error per cell stays far below the
    // generous 2^L / n envelope.
    #[test]
    fn vdc_prefix_discrepancy_bound(n in 1u64..=4096, level in 1usize..=6) {
        let marks: Vec<f64> = (1..=n).map(radical_inverse).collect();
        let pem = PseudoEmpiricalMeasure::new(marks).unwrap();
        let target = TargetMeasure::uniform(unit()).unwrap();
        let psp = ProgressivePartition::build(unit(), 6, &[]).unwrap();
        let d = vague_discrepancy(&pem, &target, &psp, level).unwrap();
        prop_assert!(d <= (1u64 << level) as f64 / n as f64, "n {n} level {level}: {d}");
    }
}

proptest! {
    // Sampled-CDF construction is expensive, so this one runs fewer cases.
    #![proptest_config(ProptestConfig::with_cases(24))]

    // Mapping a probability measure forward must not create or destroy mass.
    #[test]
    fn pushforward_conserves_mass(
        target in target_strategy(),
        a in -1.0..1.0f64,
        b in 0.2..3.0f64,
    ) {
        let affine = target.pushforward(&PiecewiseMonotone::monotone(move |t| a + b * t)).unwrap();
        prop_assert!((affine.total_mass() - 1.0).abs() <= 1e-9);

        // non-monotone map with an interior fold
        let fold = target
            .pushforward(&PiecewiseMonotone::new(move |t| (t - 0.5).abs(), vec![0.5]))
            .unwrap();
        prop_assert!((fold.total_mass() - 1.0).abs() <= 1e-9);
    }
}
