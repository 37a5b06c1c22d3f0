//! Relative-frequency asymptotics for nonstationary dichotomous processes.
//!
//! A dichotomous process `Y(t)` takes values in `{0, 1}` with a time-varying
//! mean `p0(t) = P(Y(t) = 1)` over a finite horizon `(0, T]`. Each instant can
//! be observed at most once, so the classical i.i.d. limit theory does not
//! apply. This crate implements the constructive rearrangement approach: given
//! a pool of observable instants, a greedy planner produces a permutation of
//! the pool whose pseudo-empirical measure (equal weight `1/n` on the first
//! `n` planned marks) converges vaguely to a chosen target measure. Relative
//! frequencies of the drawn outcomes then converge to the integral of `p0`
//! against that target, which is the handle used by the estimators:
//!
//! * global running means steered to `∫ p0 dP` for a target `P`,
//! * interval-restricted frequencies (local time averages of `p0`),
//! * pointwise estimates `p0(t*)` from pools accumulating at `t*`,
//! * jump estimates `p0(t*) - p0(t*-)` from two-sided pools.
//!
//! The planner never invents randomness: outcomes are drawn once per instant
//! through a seeded ledger, and every deterministic quantity (pool, plan,
//! traces, CSV artifacts) is bit-reproducible for a fixed configuration.

pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod measures;
pub mod planner;
pub mod process;
pub mod quad;

pub use error::{Error, Result};
