//! Observation pools.
//!
//! A pool is the ordered list of instants the experimenter is allowed to
//! observe, each usable at most once. The generation schemes cover the
//! designs the estimators need: space-filling pools (equispaced and base-2
//! radical inverse) for steering towards absolutely continuous targets,
//! pools accumulating at a point for pointwise estimation, two-sided pools
//! for jump estimation, and seeded uniform pools for stress tests. The mean
//! value `p0(t_j)` of every instant is cached on generation.

use crate::error::{Error, Result};
use crate::process::rng::{unit_uniform, STREAM_POOL};
use crate::process::MeanFunction;

/// Base-2 radical inverse of `j` (van der Corput point). The first values
/// for `j = 1, 2, 3, 4` are `0.5, 0.25, 0.75, 0.125`; every prefix fills
/// `(0, 1)` with low discrepancy.
pub fn radical_inverse(mut j: u64) -> f64 {
    let mut v = 0.0;
    let mut f = 0.5;
    while j > 0 {
        if j & 1 == 1 {
            v += f;
        }
        f *= 0.5;
        j >>= 1;
    }
    v
}

/// How pool instants are laid out over `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub enum PoolScheme {
    /// `t_j = j·T/(n+1)` for `j = 1..=n`.
    Equispaced { n: usize },
    /// `t_j = T·φ₂(j)` for `j = 1..=n`; dense and low-discrepancy.
    RadicalInverse { n: usize },
    /// `t_j = t* + T·rate/j`, accumulating at `t*` from above. Times beyond
    /// the horizon are clamped to it; clamping must not create duplicates.
    ConvergentTo { t_star: f64, rate: f64, n: usize },
    /// Interleaved `t* + T·rate/j`, `t* - T·rate/j`, accumulating at `t*`
    /// from both sides.
    TwoSided { t_star: f64, rate: f64, n: usize },
    /// `n` seeded uniform draws in `(0, T]`.
    SeededUniform { n: usize, seed: u64 },
}

impl PoolScheme {
    pub fn len(&self) -> usize {
        match self {
            PoolScheme::Equispaced { n }
            | PoolScheme::RadicalInverse { n }
            | PoolScheme::ConvergentTo { n, .. }
            | PoolScheme::TwoSided { n, .. }
            | PoolScheme::SeededUniform { n, .. } => *n,
        }
    }

    fn validate(&self, horizon: f64) -> Result<()> {
        if self.len() == 0 {
            return Err(Error::InvalidScheme("pool size must be positive".into()));
        }
        match self {
            PoolScheme::ConvergentTo { t_star, rate, .. } | PoolScheme::TwoSided { t_star, rate, .. } => {
                if !t_star.is_finite() || !(0.0 < *t_star && *t_star < horizon) {
                    return Err(Error::InvalidScheme(format!(
                        "accumulation point {t_star} must lie strictly inside (0, {horizon})"
                    )));
                }
                if !rate.is_finite() || *rate <= 0.0 {
                    return Err(Error::InvalidScheme(format!("rate {rate} must be positive")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn times(&self, horizon: f64) -> Vec<f64> {
        match self {
            PoolScheme::Equispaced { n } => {
                (1..=*n).map(|j| horizon * j as f64 / (*n as f64 + 1.0)).collect()
            }
            PoolScheme::RadicalInverse { n } => {
                (1..=*n as u64).map(|j| horizon * radical_inverse(j)).collect()
            }
            PoolScheme::ConvergentTo { t_star, rate, n } => (1..=*n)
                .map(|j| (t_star + horizon * rate / j as f64).min(horizon))
                .collect(),
            PoolScheme::TwoSided { t_star, rate, n } => (0..*n)
                .map(|k| {
                    let j = (k / 2 + 1) as f64;
                    let off = horizon * rate / j;
                    if k % 2 == 0 {
                        t_star + off
                    } else {
                        t_star - off
                    }
                })
                .collect(),
            PoolScheme::SeededUniform { n, seed } => (1..=*n as u64)
                .map(|j| horizon * (1.0 - unit_uniform(*seed, STREAM_POOL, j)))
                .collect(),
        }
    }
}

/// An ordered pool of distinct instants in `(0, T]` with cached means.
#[derive(Debug, Clone)]
pub struct ObservationPool {
    scheme: PoolScheme,
    horizon: f64,
    times: Vec<f64>,
    marks: Vec<f64>,
}

impl ObservationPool {
    /// Generates the pool and caches `p0(t_j)` for every instant.
    pub fn generate(scheme: PoolScheme, mean: &MeanFunction) -> Result<Self> {
        let horizon = mean.horizon();
        scheme.validate(horizon)?;
        let times = scheme.times(horizon);
        for (index, t) in times.iter().enumerate() {
            if !(0.0 < *t && *t <= horizon) {
                return Err(Error::TimeOutsideHorizon { index, t: *t, horizon });
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(times.len());
        for (index, t) in times.iter().enumerate() {
            if !seen.insert(t.to_bits()) {
                return Err(Error::DuplicateTime { index, t: *t });
            }
        }
        let marks = times.iter().map(|t| mean.eval(*t)).collect();
        Ok(ObservationPool { scheme, horizon, times, marks })
    }

    pub fn scheme(&self) -> &PoolScheme {
        &self.scheme
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn time(&self, index: usize) -> Result<f64> {
        self.times
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, len: self.times.len() })
    }

    pub fn mark(&self, index: usize) -> Result<f64> {
        self.marks
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange { index, len: self.marks.len() })
    }

    /// Splits into the subsequence of instants above `t` and the subsequence
    /// at or below `t`, both in original order. An instant exactly at `t`
    /// goes to the right pool, matching right continuity of the mean.
    pub fn split_at(&self, t: f64) -> (ObservationPool, ObservationPool) {
        let mut right = (Vec::new(), Vec::new());
        let mut left = (Vec::new(), Vec::new());
        for (tj, mj) in self.times.iter().zip(&self.marks) {
            let side = if *tj >= t { &mut right } else { &mut left };
            side.0.push(*tj);
            side.1.push(*mj);
        }
        let make = |(times, marks): (Vec<f64>, Vec<f64>)| ObservationPool {
            scheme: self.scheme.clone(),
            horizon: self.horizon,
            times,
            marks,
        };
        (make(right), make(left))
    }
}
