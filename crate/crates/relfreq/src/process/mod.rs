//! The nonstationary dichotomous process: mean functions, observation
//! pools, and the one-outcome-per-instant draw ledger.

mod ledger;
mod mean;
mod pool;
mod rng;

pub use ledger::{DrawLedger, DrawRecord};
pub use mean::{step_mean, MeanFunction, MeanKind, MeanPiece};
pub use pool::{radical_inverse, ObservationPool, PoolScheme};
