//! Progressive sequences of partitions.
//!
//! Level `m` is a partition of the domain into `m` half-open cells; level
//! `m + 1` is obtained by splitting exactly one cell of level `m` in two, so
//! consecutive levels are nested and the whole construction is a binary
//! refinement tree. The builder always splits the longest cell (leftmost on
//! ties) at its midpoint, which makes the maximum cell length halve every
//! time the level doubles. When a prospective split point collides with an
//! atom of the intended target measure, it is shifted right by a seventh of
//! the cell length so every cell boundary stays a continuity point.

use crate::error::{Error, Result};
use crate::measures::{IntervalRC, ATOM_EPS};

pub type NodeId = usize;

/// One cell of the refinement tree.
#[derive(Debug, Clone)]
pub struct PspNode {
    pub iv: IntervalRC,
    pub parent: Option<NodeId>,
    /// Left and right children, once the node has been split.
    pub children: Option<(NodeId, NodeId)>,
    /// The level whose frontier first contains the children.
    pub split_level: Option<usize>,
}

/// A progressive sequence of partitions over a common domain.
#[derive(Debug, Clone)]
pub struct ProgressivePartition {
    domain: IntervalRC,
    nodes: Vec<PspNode>,
    /// `frontiers[m - 1]` lists the `m` cells of level `m` left to right.
    frontiers: Vec<Vec<NodeId>>,
    /// `split_log[k]` is the node split to create level `k + 2`.
    split_log: Vec<NodeId>,
}

impl ProgressivePartition {
    /// Builds `max_level` levels over `domain`, steering split points away
    /// from `avoid_atoms`. A midpoint within [`ATOM_EPS`] of an atom moves
    /// right by `length / 7`; if the shifted point still collides or leaves
    /// the cell, construction fails rather than searching further.
    pub fn build(domain: IntervalRC, max_level: usize, avoid_atoms: &[f64]) -> Result<Self> {
        if max_level == 0 {
            return Err(Error::InvalidSchedule("partition needs at least one level".into()));
        }
        let root = PspNode { iv: domain, parent: None, children: None, split_level: None };
        let mut psp = ProgressivePartition {
            domain,
            nodes: vec![root],
            frontiers: vec![vec![0]],
            split_log: Vec::new(),
        };
        for _ in 1..max_level {
            psp.refine_once(avoid_atoms)?;
        }
        Ok(psp)
    }

    fn refine_once(&mut self, avoid_atoms: &[f64]) -> Result<()> {
        let frontier = self.frontiers.last().expect("at least one level");
        let mut pos = 0;
        for (i, id) in frontier.iter().enumerate() {
            if self.nodes[*id].iv.length() > self.nodes[frontier[pos]].iv.length() {
                pos = i;
            }
        }
        let id = frontier[pos];
        let iv = self.nodes[id].iv;
        let split = split_point(&iv, avoid_atoms)?;
        let new_level = self.frontiers.len() + 1;

        let left_iv = IntervalRC::new(iv.lo(), split)?;
        let right_iv = IntervalRC::new(split, iv.hi())?;
        let left = self.nodes.len();
        let right = left + 1;
        self.nodes.push(PspNode { iv: left_iv, parent: Some(id), children: None, split_level: None });
        self.nodes.push(PspNode { iv: right_iv, parent: Some(id), children: None, split_level: None });
        self.nodes[id].children = Some((left, right));
        self.nodes[id].split_level = Some(new_level);

        let mut next = self.frontiers.last().unwrap().clone();
        next.splice(pos..=pos, [left, right]);
        self.frontiers.push(next);
        self.split_log.push(id);
        Ok(())
    }

    pub fn domain(&self) -> &IntervalRC {
        &self.domain
    }

    pub fn max_level(&self) -> usize {
        self.frontiers.len()
    }

    pub fn node(&self, id: NodeId) -> &PspNode {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Cell ids of level `level`, left to right.
    pub fn frontier(&self, level: usize) -> Result<&[NodeId]> {
        if level == 0 || level > self.frontiers.len() {
            return Err(Error::LevelUnavailable { level, max: self.frontiers.len() });
        }
        Ok(&self.frontiers[level - 1])
    }

    /// Cell intervals of level `level`, left to right.
    pub fn cells(&self, level: usize) -> Result<Vec<IntervalRC>> {
        Ok(self.frontier(level)?.iter().map(|id| self.nodes[*id].iv).collect())
    }

    /// The node split to create level `level + 1`.
    pub fn split_creating(&self, level: usize) -> Result<NodeId> {
        self.split_log
            .get(level - 1)
            .copied()
            .ok_or(Error::LevelUnavailable { level: level + 1, max: self.frontiers.len() })
    }

    /// Ids of every node whose cell contains `x`, from the root down to the
    /// deepest built cell. Empty when `x` is outside the domain.
    pub fn path_containing(&self, x: f64) -> Vec<NodeId> {
        let mut path = Vec::new();
        if !self.domain.contains(x) {
            return path;
        }
        let mut id = 0;
        loop {
            path.push(id);
            match self.nodes[id].children {
                Some((l, r)) => {
                    id = if self.nodes[l].iv.contains(x) { l } else { r };
                }
                None => return path,
            }
        }
    }

    /// Largest cell length of level `level`.
    pub fn max_cell_length(&self, level: usize) -> Result<f64> {
        Ok(self
            .frontier(level)?
            .iter()
            .map(|id| self.nodes[*id].iv.length())
            .fold(0.0, f64::max))
    }
}

/// Renders every built level as CSV rows `level,lo,hi,P_mass`, cells left to
/// right within a level, floats with 17 significant digits.
pub fn partition_csv(
    psp: &ProgressivePartition,
    target: &crate::measures::TargetMeasure,
) -> Result<String> {
    use std::fmt::Write as _;
    let mut s = String::from("level,lo,hi,P_mass\n");
    for level in 1..=psp.max_level() {
        for iv in psp.cells(level)? {
            let mass = target.measure_of(&iv)?;
            let _ = writeln!(s, "{level},{:.16e},{:.16e},{mass:.16e}", iv.lo(), iv.hi());
        }
    }
    Ok(s)
}

fn split_point(iv: &IntervalRC, avoid_atoms: &[f64]) -> Result<f64> {
    let collides = |x: f64| avoid_atoms.iter().any(|a| (a - x).abs() <= ATOM_EPS);
    let mid = 0.5 * (iv.lo() + iv.hi());
    if !collides(mid) {
        return Ok(mid);
    }
    let shifted = mid + iv.length() / 7.0;
    if collides(shifted) || shifted <= iv.lo() || shifted >= iv.hi() {
        return Err(Error::NoValidSplit { lo: iv.lo(), hi: iv.hi() });
    }
    Ok(shifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::TargetMeasure;

    fn unit() -> IntervalRC {
        IntervalRC::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn csv_export_lists_cells_per_level_with_masses() {
        let psp = ProgressivePartition::build(unit(), 3, &[]).unwrap();
        let target = TargetMeasure::uniform(unit()).unwrap();
        let csv = partition_csv(&psp, &target).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "level,lo,hi,P_mass");
        assert_eq!(lines.len(), 1 + 1 + 2 + 3);
        assert_eq!(lines[1], "1,0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0");
        assert_eq!(lines[2], "2,0.0000000000000000e0,5.0000000000000000e-1,5.0000000000000000e-1");
        assert!(lines[4].starts_with("3,0.0000000000000000e0,2.5000000000000000e-1,"));
    }

    #[test]
    fn level_two_splits_at_midpoint() {
        let psp = ProgressivePartition::build(unit(), 2, &[]).unwrap();
        let cells = psp.cells(2).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!((cells[0].lo(), cells[0].hi()), (0.0, 0.5));
        assert_eq!((cells[1].lo(), cells[1].hi()), (0.5, 1.0));
    }

    #[test]
    fn level_four_is_quarters() {
        let psp = ProgressivePartition::build(unit(), 4, &[]).unwrap();
        let cells = psp.cells(4).unwrap();
        let edges: Vec<(f64, f64)> = cells.iter().map(|c| (c.lo(), c.hi())).collect();
        assert_eq!(edges, vec![(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)]);
    }

    #[test]
    fn each_level_adds_one_cell_and_stays_nested() {
        let psp = ProgressivePartition::build(unit(), 9, &[]).unwrap();
        for level in 1..=9 {
            let cells = psp.cells(level).unwrap();
            assert_eq!(cells.len(), level);
            // exact partition: consecutive cells share endpoints, cover domain
            assert_eq!(cells[0].lo(), 0.0);
            assert_eq!(cells.last().unwrap().hi(), 1.0);
            for w in cells.windows(2) {
                assert_eq!(w[0].hi(), w[1].lo());
            }
        }
        // nesting: every level-3 cell is contained in some level-2 cell
        let coarse = psp.cells(2).unwrap();
        for fine in psp.cells(3).unwrap() {
            assert!(coarse.iter().any(|c| fine.subset_of(c)));
        }
    }

    #[test]
    fn max_length_halves_when_level_doubles() {
        let psp = ProgressivePartition::build(unit(), 16, &[]).unwrap();
        for g in 0..=4 {
            let level = 1usize << g;
            let expect = 1.0 / level as f64;
            assert_eq!(psp.max_cell_length(level).unwrap(), expect);
        }
        // monotone in between
        for level in 1..16 {
            assert!(psp.max_cell_length(level + 1).unwrap() <= psp.max_cell_length(level).unwrap());
        }
    }

    #[test]
    fn atom_on_midpoint_shifts_split() {
        // atom exactly at 0.5: level 2 split moves to 0.5 + 1/7
        let psp = ProgressivePartition::build(unit(), 2, &[0.5]).unwrap();
        let cells = psp.cells(2).unwrap();
        let expect = 0.5 + 1.0 / 7.0;
        assert!((cells[0].hi() - expect).abs() < 1e-15);
        // no cell boundary at any level sits on the atom
        let psp = ProgressivePartition::build(unit(), 12, &[0.5]).unwrap();
        for level in 1..=12 {
            for c in psp.cells(level).unwrap() {
                assert!((c.lo() - 0.5).abs() > ATOM_EPS || c.lo() == 0.0);
                assert!((c.hi() - 0.5).abs() > ATOM_EPS || c.hi() == 1.0);
            }
        }
    }

    #[test]
    fn double_collision_reports_no_valid_split() {
        // atoms at the midpoint and at the shifted candidate
        let atoms = [0.5, 0.5 + 1.0 / 7.0];
        assert!(matches!(
            ProgressivePartition::build(unit(), 2, &atoms),
            Err(Error::NoValidSplit { .. })
        ));
    }

    #[test]
    fn path_containing_descends_to_leaf() {
        let psp = ProgressivePartition::build(unit(), 4, &[]).unwrap();
        let path = psp.path_containing(0.3);
        // 0.3 lies in (0,1] -> (0,0.5] -> (0.25,0.5]
        let cells: Vec<IntervalRC> = path.iter().map(|id| psp.node(*id).iv).collect();
        assert!(cells.iter().all(|c| c.contains(0.3)));
        assert_eq!(cells.last().unwrap().lo(), 0.25);
        assert_eq!(cells.last().unwrap().hi(), 0.5);
        assert!(psp.path_containing(1.5).is_empty());
    }

    #[test]
    fn split_log_lines_up_with_levels() {
        let psp = ProgressivePartition::build(unit(), 5, &[]).unwrap();
        for level in 1..5 {
            let split = psp.split_creating(level).unwrap();
            assert_eq!(psp.node(split).split_level, Some(level + 1));
            // the split node is a cell of the level being refined
            assert!(psp.frontier(level).unwrap().contains(&split));
        }
    }
}
