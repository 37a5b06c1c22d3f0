//! Time-varying success probabilities.
//!
//! A [`MeanFunction`] is the deterministic `p0(t) = P(Y(t) = 1)` of a
//! dichotomous process on `[0, T]`. The process itself is never stationary
//! or identically distributed; everything downstream only relies on `p0`
//! being evaluable, right-continuous, and `[0, 1]`-valued. Right continuity
//! is the tie-breaking convention at jump points, and the left limit is
//! exposed separately because jumps `p0(t) - p0(t-)` are an estimation
//! target of their own.

use crate::error::{Error, Result};

/// Grid resolution for the `[0, 1]` range check at construction.
const RANGE_CHECK_GRID: usize = 1 << 14;

/// One polynomial piece of a piecewise mean, active from `start` up to the
/// next piece's start (right-closed at the horizon for the last piece).
#[derive(Debug, Clone, PartialEq)]
pub struct MeanPiece {
    pub start: f64,
    /// Polynomial coefficients, constant term first.
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeanKind {
    /// `p0(t) = Σ coeffs[k] t^k`.
    Polynomial { coeffs: Vec<f64> },
    /// `p0(t) = offset + amplitude · sin(2π · frequency · t + phase)`.
    Sinusoid { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
    /// Right-continuous polynomial pieces; the value at a breakpoint is the
    /// incoming piece's value.
    PiecewiseRightContinuous { pieces: Vec<MeanPiece> },
    /// Linear interpolation through `(times[i], values[i])`.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

/// A mean function together with its horizon `T`; defined on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFunction {
    kind: MeanKind,
    horizon: f64,
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

impl MeanFunction {
    pub fn new(kind: MeanKind, horizon: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidMean(format!("horizon {horizon} must be positive")));
        }
        match &kind {
            MeanKind::Polynomial { coeffs } => {
                if coeffs.is_empty() {
                    return Err(Error::InvalidMean("polynomial needs coefficients".into()));
                }
            }
            MeanKind::Sinusoid { amplitude, frequency, phase, offset } => {
                for (name, v) in
                    [("amplitude", amplitude), ("frequency", frequency), ("phase", phase), ("offset", offset)]
                {
                    if !v.is_finite() {
                        return Err(Error::InvalidMean(format!("sinusoid {name} is {v}")));
                    }
                }
            }
            MeanKind::PiecewiseRightContinuous { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::InvalidMean("piecewise mean needs pieces".into()));
                }
                if pieces[0].start != 0.0 {
                    return Err(Error::InvalidMean("first piece must start at 0".into()));
                }
                for w in pieces.windows(2) {
                    if !(w[0].start < w[1].start) {
                        return Err(Error::InvalidMean("piece starts must be strictly increasing".into()));
                    }
                }
                if pieces.last().unwrap().start >= horizon {
                    return Err(Error::InvalidMean("last piece starts at or after the horizon".into()));
                }
            }
            MeanKind::Tabulated { times, values } => {
                if times.len() != values.len() || times.len() < 2 {
                    return Err(Error::InvalidMean(
                        "tabulated mean needs matching times/values with at least two entries".into(),
                    ));
                }
                if times[0] != 0.0 || *times.last().unwrap() != horizon {
                    return Err(Error::InvalidMean("tabulated grid must span [0, horizon]".into()));
                }
                for w in times.windows(2) {
                    if !(w[0] < w[1]) {
                        return Err(Error::InvalidMean("tabulated times must be strictly increasing".into()));
                    }
                }
            }
        }
        let mean = MeanFunction { kind, horizon };
        mean.check_range()?;
        Ok(mean)
    }

    /// Constant mean `p0 ≡ p`.
    pub fn constant(p: f64, horizon: f64) -> Result<Self> {
        Self::new(MeanKind::Polynomial { coeffs: vec![p] }, horizon)
    }

    fn check_range(&self) -> Result<()> {
        let probe = |t: f64| -> Result<()> {
            for v in [self.eval(t), self.left_limit(t)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::MeanOutOfRange { t, value: v });
                }
            }
            Ok(())
        };
        for k in 0..=RANGE_CHECK_GRID {
            probe(self.horizon * k as f64 / RANGE_CHECK_GRID as f64)?;
        }
        for b in self.breakpoints() {
            probe(b)?;
        }
        Ok(())
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn kind(&self) -> &MeanKind {
        &self.kind
    }

    /// `p0(t)`; right-continuous at piece boundaries.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            MeanKind::Polynomial { coeffs } => horner(coeffs, t),
            MeanKind::Sinusoid { amplitude, frequency, phase, offset } => {
                offset + amplitude * (2.0 * std::f64::consts::PI * frequency * t + phase).sin()
            }
            MeanKind::PiecewiseRightContinuous { pieces } => {
                let i = pieces.partition_point(|p| p.start <= t).saturating_sub(1);
                horner(&pieces[i].coeffs, t)
            }
            MeanKind::Tabulated { times, values } => {
                if t <= times[0] {
                    return values[0];
                }
                if t >= *times.last().unwrap() {
                    return *values.last().unwrap();
                }
                let i = times.partition_point(|x| *x <= t) - 1;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    /// `p0(t-)`: the left limit at `t`. Differs from `eval` only when `t` is
    /// exactly a breakpoint of a piecewise mean; continuous kinds return
    /// `eval(t)`.
    pub fn left_limit(&self, t: f64) -> f64 {
        if let MeanKind::PiecewiseRightContinuous { pieces } = &self.kind {
            if t > 0.0 {
                let i = pieces.partition_point(|p| p.start <= t).saturating_sub(1);
                if pieces[i].start == t {
                    return horner(&pieces[i - 1].coeffs, t);
                }
            }
        }
        self.eval(t)
    }

    /// Interior discontinuity points, for quadrature splitting.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            MeanKind::PiecewiseRightContinuous { pieces } => {
                pieces.iter().skip(1).map(|p| p.start).collect()
            }
            MeanKind::Tabulated { times, .. } => times[1..times.len() - 1].to_vec(),
            _ => vec![],
        }
    }

    /// The jump `p0(t) - p0(t-)`.
    pub fn jump_at(&self, t: f64) -> f64 {
        self.eval(t) - self.left_limit(t)
    }
}

/// A two-level mean: `lo` before `at`, `hi` from `at` on.
pub fn step_mean(lo: f64, hi: f64, at: f64, horizon: f64) -> Result<MeanFunction> {
    MeanFunction::new(
        MeanKind::PiecewiseRightContinuous {
            pieces: vec![
                MeanPiece { start: 0.0, coeffs: vec![lo] },
                MeanPiece { start: at, coeffs: vec![hi] },
            ],
        },
        horizon,
    )
}
