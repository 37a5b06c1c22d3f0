//! Incremental planner state.
//!
//! The state tracks, for every cell of the refinement tree, how many of the
//! placed marks fall inside it, plus the supply of unused pool marks per
//! active positive cell and a queue of marks stranded in null cells. Counts
//! are maintained along the whole root-to-leaf path of each placed mark, so
//! deeper levels already carry correct counts the moment the refinement
//! schedule activates them.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::measures::{NodeId, ProgressivePartition, TargetMeasure};
use crate::planner::schedule::{NullSlotSchedule, RefinementSchedule};

/// One placement decided by the planner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    /// 1-based step number.
    pub step: u64,
    /// Index of the mark in the pool.
    pub pool_index: usize,
    /// The mark's value in the planning space.
    pub value: f64,
    /// Cell (tree node) the placement was routed to.
    pub cell: NodeId,
    /// Selection score of the winning cell; `None` for null-slot placements.
    pub score: Option<f64>,
}

/// Mutable state of a plan under construction.
#[derive(Debug)]
pub struct PlannerState<'a> {
    psp: &'a ProgressivePartition,
    schedule: RefinementSchedule,
    null_slots: NullSlotSchedule,
    /// Target mass per tree node.
    p_mass: Vec<f64>,
    /// Placed-mark count per tree node.
    counts: Vec<u64>,
    /// Unused pool indices per node, ascending; maintained only for cells of
    /// the active frontier with positive mass.
    candidates: Vec<VecDeque<usize>>,
    /// Unused pool indices whose value lies in a null cell of the active
    /// frontier, dequeued lowest index first.
    null_queue: BTreeSet<usize>,
    values: Vec<f64>,
    used: Vec<bool>,
    placed: u64,
    active_level: usize,
    base_frontier: Vec<NodeId>,
}

impl<'a> PlannerState<'a> {
    /// Sets up counts, candidate lists, and the null queue for planning
    /// `values` towards `target` over `psp`. Every value must lie in the
    /// partition domain.
    pub fn new(
        target: &TargetMeasure,
        values: &[f64],
        psp: &'a ProgressivePartition,
        schedule: RefinementSchedule,
        null_slots: NullSlotSchedule,
    ) -> Result<Self> {
        if schedule.base_level() > psp.max_level() {
            return Err(Error::LevelUnavailable {
                level: schedule.base_level(),
                max: psp.max_level(),
            });
        }
        let domain = psp.domain();
        for v in values {
            if !domain.contains(*v) {
                return Err(Error::MarkOutsideDomain { value: *v, lo: domain.lo(), hi: domain.hi() });
            }
        }
        let mut p_mass = Vec::with_capacity(psp.num_nodes());
        for id in 0..psp.num_nodes() {
            p_mass.push(target.measure_of(&psp.node(id).iv)?);
        }

        let mut state = PlannerState {
            psp,
            schedule,
            null_slots,
            p_mass,
            counts: vec![0; psp.num_nodes()],
            candidates: vec![VecDeque::new(); psp.num_nodes()],
            null_queue: BTreeSet::new(),
            values: values.to_vec(),
            used: vec![false; values.len()],
            placed: 0,
            active_level: 0,
        base_frontier: Vec::new(),
        };
        state.base_frontier = psp.frontier(state.schedule.base_level())?.to_vec();

        // seed the base frontier with the full pool
        for (j, v) in state.values.iter().enumerate() {
            let cell = state
                .base_frontier
                .iter()
                .copied()
                .find(|id| psp.node(*id).iv.contains(*v))
                .expect("domain membership checked above");
            if state.p_mass[cell] > 0.0 {
                state.candidates[cell].push_back(j);
            } else {
                state.null_queue.insert(j);
            }
        }
        state.active_level = state.schedule.base_level();
        state.advance_to_level_for_step(1)?;
        Ok(state)
    }

    pub fn placed(&self) -> u64 {
        self.placed
    }

    pub fn active_level(&self) -> usize {
        self.active_level
    }

    pub fn base_frontier(&self) -> &[NodeId] {
        &self.base_frontier
    }

    pub fn count(&self, cell: NodeId) -> u64 {
        self.counts[cell]
    }

    pub fn target_mass(&self, cell: NodeId) -> f64 {
        self.p_mass[cell]
    }

    pub fn null_queue_len(&self) -> usize {
        self.null_queue.len()
    }

    /// Deviation sum over the positively charged base cells if the next mark
    /// were to land in `cell`: the candidate term uses count `+1` against
    /// `n+1` draws, every other positive base cell keeps its current count.
    /// Null cells never enter the sum; their counts are governed by the slot
    /// schedule alone.
    pub fn positive_cell_score(&self, cell: NodeId) -> Result<f64> {
        let pos = self
            .base_frontier
            .iter()
            .position(|id| *id == cell)
            .ok_or_else(|| Error::InvalidSchedule("cell is not on the base frontier".into()))?;
        Ok(self.score_for_position(pos))
    }

    fn score_for_position(&self, candidate: usize) -> f64 {
        let n1 = (self.placed + 1) as f64;
        let mut score = 0.0;
        for (i, id) in self.base_frontier.iter().enumerate() {
            let p = self.p_mass[*id];
            if p <= 0.0 {
                continue;
            }
            let c = self.counts[*id] as f64;
            let numerator = if i == candidate { c + 1.0 } else { c };
            score += (numerator / n1 - p).abs();
        }
        score
    }

    /// Chooses the cell for a positive pick: argmin of the base-level score
    /// over positively charged base cells (ties to the lowest cell index),
    /// then a drill-down through active splits, choosing the child whose
    /// hypothetical placement leaves the smaller deviation (ties to the left
    /// child). Null children are never entered.
    pub fn select_positive_cell(&self) -> (NodeId, f64) {
        let mut best: Option<(usize, f64)> = None;
        for (i, id) in self.base_frontier.iter().enumerate() {
            if self.p_mass[*id] <= 0.0 {
                continue;
            }
            let score = self.score_for_position(i);
            if best.map_or(true, |(_, s)| score < s) {
                best = Some((i, score));
            }
        }
        let (pos, mut score) =
            best.expect("a probability target charges at least one base cell");
        let mut cell = self.base_frontier[pos];

        while let Some((left, right)) = self.psp.node(cell).children {
            if self.psp.node(cell).split_level.expect("split node has level") > self.active_level {
                break;
            }
            let (pl, pr) = (self.p_mass[left], self.p_mass[right]);
            if pr <= 0.0 {
                cell = left;
                continue;
            }
            if pl <= 0.0 {
                cell = right;
                continue;
            }
            let n1 = (self.placed + 1) as f64;
            let (cl, cr) = (self.counts[left] as f64, self.counts[right] as f64);
            let b1 = ((cl + 1.0) / n1 - pl).abs() + (cr / n1 - pr).abs();
            let b2 = (cl / n1 - pl).abs() + ((cr + 1.0) / n1 - pr).abs();
            if b1 <= b2 {
                cell = left;
                score = b1;
            } else {
                cell = right;
                score = b2;
            }
        }
        (cell, score)
    }

    /// Decides and applies the next placement.
    pub fn next_index(&mut self) -> Result<Placement> {
        let step = self.placed + 1;
        self.advance_to_level_for_step(step)?;

        if self.null_slots.is_null_slot(step) {
            if let Some(j) = self.null_queue.pop_first() {
                let cell = self.active_cell_containing(self.values[j]);
                return Ok(self.place(step, j, cell, None));
            }
        }

        let (cell, score) = self.select_positive_cell();
        let j = loop {
            match self.candidates[cell].pop_front() {
                Some(j) if self.used[j] => continue,
                Some(j) => break j,
                None => {
                    let iv = self.psp.node(cell).iv;
                    return Err(Error::CellExhausted { lo: iv.lo(), hi: iv.hi(), step });
                }
            }
        };
        Ok(self.place(step, j, cell, Some(score)))
    }

    fn place(&mut self, step: u64, j: usize, cell: NodeId, score: Option<f64>) -> Placement {
        debug_assert!(!self.used[j]);
        self.used[j] = true;
        let value = self.values[j];
        for id in self.psp.path_containing(value) {
            self.counts[id] += 1;
        }
        self.placed = step;
        Placement { step, pool_index: j, value, cell, score }
    }

    /// The active-frontier cell containing `value`.
    fn active_cell_containing(&self, value: f64) -> NodeId {
        let path = self.psp.path_containing(value);
        for id in path {
            match (self.psp.node(id).children, self.psp.node(id).split_level) {
                (Some(_), Some(l)) if l <= self.active_level => continue,
                _ => return id,
            }
        }
        unreachable!("path always ends at an unsplit node");
    }

    fn advance_to_level_for_step(&mut self, step: u64) -> Result<()> {
        let wanted = self.schedule.level_for_step(step).min(self.psp.max_level());
        while self.active_level < wanted {
            let split = self.psp.split_creating(self.active_level)?;
            let (left, right) = self.psp.node(split).children.expect("logged split has children");
            let pending = std::mem::take(&mut self.candidates[split]);
            for j in pending {
                if self.used[j] {
                    continue;
                }
                let child = if self.psp.node(left).iv.contains(self.values[j]) { left } else { right };
                if self.p_mass[child] > 0.0 {
                    self.candidates[child].push_back(j);
                } else {
                    self.null_queue.insert(j);
                }
            }
            self.active_level += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::IntervalRC;

    fn unit() -> IntervalRC {
        IntervalRC::new(0.0, 1.0).unwrap()
    }

    /// Worked two-cell example: equal masses, empty state. Both candidate
    /// scores are |1/1 - 0.5| + |0/1 - 0.5| = 1, the tie goes to the first
    /// cell. After one mark in cell 1, the scores become
    /// a1 = |2/2 - 0.5| + |0/2 - 0.5| = 1 and a2 = |1/2 - 0.5| + |1/2 - 0.5|
    /// = 0, so cell 2 wins.
    #[test]
    fn two_cell_scores_follow_the_worked_example() {
        let psp = ProgressivePartition::build(unit(), 2, &[]).unwrap();
        let target = TargetMeasure::uniform(unit()).unwrap();
        let values = [0.25, 0.30, 0.75, 0.80];
        let schedule = RefinementSchedule::new(2, vec![]).unwrap();
        let mut state =
            PlannerState::new(&target, &values, &psp, schedule, NullSlotSchedule::Never).unwrap();

        let base = state.base_frontier().to_vec();
        assert_eq!(state.positive_cell_score(base[0]).unwrap(), 1.0);
        assert_eq!(state.positive_cell_score(base[1]).unwrap(), 1.0);
        let (cell, score) = state.select_positive_cell();
        assert_eq!(cell, base[0]);
        assert_eq!(score, 1.0);

        let p = state.next_index().unwrap();
        assert_eq!(p.pool_index, 0);
        assert_eq!(state.count(base[0]), 1);

        assert_eq!(state.positive_cell_score(base[0]).unwrap(), 1.0);
        assert_eq!(state.positive_cell_score(base[1]).unwrap(), 0.0);
        let (cell, score) = state.select_positive_cell();
        assert_eq!(cell, base[1]);
        assert_eq!(score, 0.0);
    }

    #[test]
    fn null_cells_feed_the_queue_and_square_slots() {
        // target supported on the left half; marks on the right are null
        let density = crate::measures::Density::new(|t| if t <= 0.5 { 2.0 } else { 0.0 }, vec![0.5]);
        let target = TargetMeasure::new(
            unit(),
            crate::measures::MeasureKind::AbsolutelyContinuous(density),
        )
        .unwrap();
        let psp = ProgressivePartition::build(unit(), 2, &[]).unwrap();
        let values = [0.7, 0.1, 0.9, 0.2, 0.3, 0.4, 0.45, 0.05, 0.15];
        let schedule = RefinementSchedule::new(2, vec![]).unwrap();
        let mut state =
            PlannerState::new(&target, &values, &psp, schedule, NullSlotSchedule::Squares).unwrap();
        assert_eq!(state.null_queue_len(), 2);

        // step 1 is a square: the lowest-index null mark (0, value 0.7) goes first
        let p1 = state.next_index().unwrap();
        assert_eq!(p1.pool_index, 0);
        assert_eq!(p1.score, None);
        // steps 2 and 3 are positive picks from the left half
        let p2 = state.next_index().unwrap();
        assert!(p2.value <= 0.5);
        assert!(p2.score.is_some());
        let p3 = state.next_index().unwrap();
        assert!(p3.value <= 0.5);
        // step 4 is a square: next null mark is index 2 (value 0.9)
        let p4 = state.next_index().unwrap();
        assert_eq!(p4.pool_index, 2);
        assert_eq!(p4.score, None);
        // queue exhausted: step 9 would be a null slot but falls through
        for _ in 5..=9 {
            let p = state.next_index().unwrap();
            assert!(p.score.is_some());
            assert!(p.value <= 0.5);
        }
    }

    #[test]
    fn exhausted_cell_is_reported() {
        let target = TargetMeasure::uniform(unit()).unwrap();
        let psp = ProgressivePartition::build(unit(), 2, &[]).unwrap();
        // only one mark on the right half: the second right-cell pick must fail
        let values = [0.1, 0.2, 0.3, 0.75];
        let schedule = RefinementSchedule::new(2, vec![]).unwrap();
        let mut state =
            PlannerState::new(&target, &values, &psp, schedule, NullSlotSchedule::Never).unwrap();
        let mut failed_at = None;
        for step in 1..=4 {
            match state.next_index() {
                Ok(_) => {}
                Err(Error::CellExhausted { lo, hi, step: s }) => {
                    assert_eq!((lo, hi), (0.5, 1.0));
                    assert_eq!(s, step);
                    failed_at = Some(step);
                    break;
                }
                Err(other) => panic!("unexpected error {other:?}"),
            }
        }
        assert_eq!(failed_at, Some(4));
    }

    #[test]
    fn refinement_activates_levels_and_reparents_candidates() {
        let target = TargetMeasure::uniform(unit()).unwrap();
        let psp = ProgressivePartition::build(unit(), 4, &[]).unwrap();
        let values: Vec<f64> = (1..=64u64).map(crate::process::radical_inverse).collect();
        // refine to level 3 at step 8, level 4 at step 16
        let schedule = RefinementSchedule::new(2, vec![8, 16]).unwrap();
        let mut state =
            PlannerState::new(&target, &values, &psp, schedule, NullSlotSchedule::Never).unwrap();
        for _ in 0..7 {
            state.next_index().unwrap();
        }
        assert_eq!(state.active_level(), 2);
        state.next_index().unwrap();
        assert_eq!(state.active_level(), 3);
        for _ in 8..16 {
            state.next_index().unwrap();
        }
        assert_eq!(state.active_level(), 4);
        // base frontier is unchanged by refinement
        assert_eq!(state.base_frontier().len(), 2);
    }
}
