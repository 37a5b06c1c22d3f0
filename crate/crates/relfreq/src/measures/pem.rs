//! Pseudo-empirical measures.
//!
//! A pseudo-empirical measure puts mass `1/n` on each of `n` deterministic
//! marks. Unlike a true empirical measure the marks are not samples from
//! anything; they are chosen (usually by a planner) and the interesting
//! question is which target the prefix measures converge to. Interval masses
//! are kept exact as `count / n` so downstream identities can be checked in
//! integer arithmetic.

use crate::error::{Error, Result};
use crate::measures::IntervalRC;

/// An exact interval mass `count / n` of a pseudo-empirical measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PemMass {
    pub count: u64,
    pub n: u64,
}

impl PemMass {
    pub fn as_f64(&self) -> f64 {
        self.count as f64 / self.n as f64
    }
}

/// Equal mass `1/n` on each of `n` marks, in placement order.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoEmpiricalMeasure {
    marks: Vec<f64>,
}

impl PseudoEmpiricalMeasure {
    pub fn new(marks: Vec<f64>) -> Result<Self> {
        if marks.is_empty() {
            return Err(Error::EmptyPem);
        }
        Ok(PseudoEmpiricalMeasure { marks })
    }

    pub fn n(&self) -> u64 {
        self.marks.len() as u64
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    /// The measure of the first `n` marks only.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.marks.len() {
            return Err(Error::EmptyPem);
        }
        Ok(PseudoEmpiricalMeasure { marks: self.marks[..n].to_vec() })
    }

    /// Exact mass of `iv`: the number of marks with `lo < mark <= hi` over `n`.
    pub fn mass(&self, iv: &IntervalRC) -> PemMass {
        let count = self.marks.iter().filter(|m| iv.contains(**m)).count() as u64;
        PemMass { count, n: self.n() }
    }

    /// Pointwise pushforward: each mark `m` becomes `g(m)`, weights unchanged.
    pub fn pushforward<G: Fn(f64) -> f64>(&self, g: G) -> Self {
        PseudoEmpiricalMeasure { marks: self.marks.iter().map(|m| g(*m)).collect() }
    }

    /// `(1/n) Σ marks`, the integral of the identity against this measure.
    pub fn mean(&self) -> f64 {
        self.marks.iter().sum::<f64>() / self.marks.len() as f64
    }
}
