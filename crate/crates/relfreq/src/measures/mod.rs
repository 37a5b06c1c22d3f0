//! Measures, partitions, and vague-convergence machinery.

mod counting;
mod discrepancy;
mod interval;
mod pem;
mod psp;
mod pushforward;
mod target;

pub(crate) use counting::check_membership_up_to;
pub use counting::{check_membership, CountingView, DEFAULT_MEMBERSHIP_THRESHOLD};
pub use discrepancy::vague_discrepancy;
pub use interval::IntervalRC;
pub use pem::{PemMass, PseudoEmpiricalMeasure};
pub use psp::{partition_csv, NodeId, ProgressivePartition, PspNode};
pub use pushforward::{PiecewiseMonotone, SampledMeasure, VALUE_GRID};
pub use target::{Atom, Density, MeasureKind, TargetMeasure, ATOM_EPS, MASS_TOL};
