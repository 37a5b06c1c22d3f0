//! The greedy permutation planner.
//!
//! Given a pool of marks and a target measure, the planner decides the order
//! in which marks are observed so that the pseudo-empirical measure of every
//! prefix tracks the target. Each step scores the base-level cells by the
//! total deviation a hypothetical placement would leave behind, takes the
//! argmin, and drills down through the active refinements by the analogous
//! two-candidate comparison. Marks in cells the target does not charge wait
//! in a queue that is served only on reserved steps of vanishing density.

mod plan;
mod schedule;
mod state;

pub use plan::{build_permutation, classify_cells, CellClasses, PermutationPlan};
pub use schedule::{NullSlotSchedule, RefinementSchedule, DEFAULT_REFINEMENT_N0};
pub use state::{Placement, PlannerState};
