//! Half-open intervals `(lo, hi]`.
//!
//! Every cell, domain, and restriction window in the crate uses the
//! right-closed convention, so a point sitting exactly on a partition split
//! belongs to the cell on its left and each refinement stays an exact
//! partition with no double counting.

use crate::error::{Error, Result};

/// A half-open interval `(lo, hi]` with `lo < hi`, both finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalRC {
    lo: f64,
    hi: f64,
}

impl IntervalRC {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(IntervalRC { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Membership test, `lo < x <= hi`.
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x <= self.hi
    }

    /// True when `self` is contained in `other`.
    pub fn subset_of(&self, other: &IntervalRC) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl std::fmt::Display for IntervalRC {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}
