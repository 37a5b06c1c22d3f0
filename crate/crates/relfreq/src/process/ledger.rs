//! The draw ledger: one Bernoulli outcome per instant, ever.
//!
//! Each instant `t` of the process can be observed exactly once, and its
//! outcome must not depend on when (or through which pool) it is drawn. The
//! ledger therefore derives the outcome from `(seed, bits(t))` with a
//! counter-based generator and keys its bookkeeping by the instant itself:
//! drawing the same instant twice is an error even if it is reached through
//! two different pools. Two ledgers with the same seed realize the same
//! underlying process.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::process::rng::{unit_uniform, STREAM_DRAW};
use crate::process::ObservationPool;

/// One recorded draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawRecord {
    /// Index into the pool the draw came through.
    pub index: usize,
    pub t: f64,
    pub outcome: bool,
}

/// Seeded outcome record for a realization of the process.
#[derive(Debug, Clone)]
pub struct DrawLedger {
    seed: u64,
    outcomes: HashMap<u64, bool>,
    log: Vec<DrawRecord>,
}

impl DrawLedger {
    pub fn new(seed: u64) -> Self {
        DrawLedger { seed, outcomes: HashMap::new(), log: Vec::new() }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draws `Y(t_j)` for pool index `j`. Fails if that instant was already
    /// drawn, through this or any other pool sharing the ledger.
    pub fn draw(&mut self, pool: &ObservationPool, index: usize) -> Result<bool> {
        let t = pool.time(index)?;
        let mark = pool.mark(index)?;
        let key = t.to_bits();
        if self.outcomes.contains_key(&key) {
            return Err(Error::DoubleDraw { t });
        }
        let outcome = unit_uniform(self.seed, STREAM_DRAW, key) < mark;
        self.outcomes.insert(key, outcome);
        self.log.push(DrawRecord { index, t, outcome });
        Ok(outcome)
    }

    /// Outcome of the instant `t` if it has been drawn.
    pub fn outcome_at(&self, t: f64) -> Option<bool> {
        self.outcomes.get(&t.to_bits()).copied()
    }

    pub fn draws(&self) -> &[DrawRecord] {
        &self.log
    }

    pub fn len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log.is_empty()
    }
}
