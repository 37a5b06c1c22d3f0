//! Declarative experiment configuration.
//!
//! A single TOML document describes one run end to end: process mean, pool
//! scheme, optional target (with the space the planner works in), planner
//! schedules, estimator selections, seed, and output directory. Everything a
//! run produces is derivable from this document, so rerunning the same file
//! yields byte-identical artifacts.
//!
//! Validation is strictly front-loaded: [`ExperimentConfig::validate`] and
//! the builders below fail with the offending field's name before anything
//! touches the filesystem.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    Atom, Density, IntervalRC, MeasureKind, ProgressivePartition, TargetMeasure,
};
use crate::planner::{NullSlotSchedule, RefinementSchedule, DEFAULT_REFINEMENT_N0};
use crate::process::{MeanFunction, MeanKind, MeanPiece, ObservationPool, PoolScheme};

fn default_burn_in() -> u64 {
    crate::diagnostics::DEFAULT_BURN_IN
}

/// Root of the experiment document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Plan length; must not exceed the pool size.
    pub n_max: u64,
    /// Process horizon `T`; the observable window is `(0, T]`.
    pub horizon: f64,
    pub output_dir: String,
    #[serde(default = "default_burn_in")]
    pub burn_in: u64,
    pub mean: MeanSpec,
    pub pool: PoolSpec,
    /// Absent for pointwise/jump-only runs, which need no planner.
    #[serde(default)]
    pub target: Option<TargetSpec>,
    #[serde(default)]
    pub planner: PlannerSpec,
    pub estimators: Vec<EstimatorSpec>,
}

/// Mean function `p0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeanSpec {
    Polynomial { coeffs: Vec<f64> },
    Sinusoid { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
    Piecewise { pieces: Vec<PieceSpec> },
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

/// One polynomial piece of a piecewise mean, valid from `start` rightwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PieceSpec {
    pub start: f64,
    pub coeffs: Vec<f64>,
}

/// Observation pool layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum PoolSpec {
    Equispaced { n: usize },
    RadicalInverse { n: usize },
    ConvergentTo { t_star: f64, rate: f64, n: usize },
    TwoSided { t_star: f64, rate: f64, n: usize },
    SeededUniform { n: usize, seed: u64 },
}

/// Which axis the planner steers: observation times or cached means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Time,
    Marks,
}

/// Target measure and planning space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetSpec {
    pub space: Space,
    /// Planner domain `(lo, hi]`; defaults to `(0, horizon]` in time space
    /// and `(0, 1]` in mark space.
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
    pub measure: TargetKindSpec,
}

/// Declarative measure shapes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetKindSpec {
    Uniform,
    /// Density given by polynomial coefficients (lowest power first).
    Polynomial { coeffs: Vec<f64> },
    /// Piecewise-constant density: `values[i]` from `starts[i]` up to the
    /// next start (or the domain end).
    Piecewise { starts: Vec<f64>, values: Vec<f64> },
    Atoms { locations: Vec<f64>, masses: Vec<f64> },
    Mixture { components: Vec<ComponentSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentSpec {
    pub weight: f64,
    pub measure: TargetKindSpec,
}

/// Planner schedules; every field has a default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerSpec {
    pub base_level: usize,
    /// First refinement threshold; level deepens at `n0 * 2^i`.
    pub n0: u64,
    pub membership_threshold: u64,
    pub null_slots: NullSlotsSpec,
    /// Partition depth; defaults to the deepest level the schedule can
    /// activate within `n_max` steps.
    pub max_level: Option<usize>,
}

impl Default for PlannerSpec {
    fn default() -> Self {
        PlannerSpec {
            base_level: 1,
            n0: DEFAULT_REFINEMENT_N0,
            membership_threshold: crate::measures::DEFAULT_MEMBERSHIP_THRESHOLD,
            null_slots: NullSlotsSpec::Squares,
            max_level: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullSlotsSpec {
    Squares,
    Never,
}

/// One estimator to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    /// Running mean over the full plan.
    Global,
    /// Frequency restricted to the time window `(lo, hi]`.
    Interval { lo: f64, hi: f64 },
    /// Relative frequency over a pool accumulating at `t_star`.
    Pointwise { t_star: f64 },
    /// One-sided frequency difference around `t_star`.
    Jump { t_star: f64 },
}

impl EstimatorSpec {
    /// Stable name used for trace filenames and report rows.
    pub fn label(&self) -> String {
        match self {
            EstimatorSpec::Global => "global".to_string(),
            EstimatorSpec::Interval { lo, hi } => format!("interval_{lo}_{hi}"),
            EstimatorSpec::Pointwise { t_star } => format!("pointwise_{t_star}"),
            EstimatorSpec::Jump { t_star } => format!("jump_{t_star}"),
        }
    }
}

fn named<T>(field: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::config(field, e.to_string()))
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.to_string().trim().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("config", e.to_string()))
    }

    /// Cheap structural checks that need no built objects.
    pub fn validate(&self) -> Result<()> {
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return Err(Error::config("horizon", "must be finite and positive"));
        }
        if self.n_max == 0 {
            return Err(Error::config("n_max", "must be positive"));
        }
        if self.n_max > self.pool_size() as u64 {
            return Err(Error::config(
                "n_max",
                format!("{} exceeds the pool size {}", self.n_max, self.pool_size()),
            ));
        }
        if self.burn_in == 0 {
            return Err(Error::config("burn_in", "must be positive"));
        }
        if self.output_dir.is_empty() {
            return Err(Error::config("output_dir", "must not be empty"));
        }
        if self.estimators.is_empty() {
            return Err(Error::config("estimators", "at least one estimator is required"));
        }
        let mut labels: Vec<String> = self.estimators.iter().map(|e| e.label()).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("estimators", "duplicate estimator entries"));
        }
        for (i, est) in self.estimators.iter().enumerate() {
            let field = format!("estimators[{i}]");
            match est {
                EstimatorSpec::Global | EstimatorSpec::Interval { .. } => {
                    if self.target.is_none() {
                        return Err(Error::config(
                            &field,
                            format!("{} requires a target", est.label()),
                        ));
                    }
                }
                EstimatorSpec::Pointwise { t_star } => match &self.pool {
                    PoolSpec::ConvergentTo { t_star: s, .. } if s == t_star => {}
                    _ => {
                        return Err(Error::config(
                            &field,
                            format!("pointwise at {t_star} needs pool scheme convergent_to with the same t_star"),
                        ))
                    }
                },
                EstimatorSpec::Jump { t_star } => match &self.pool {
                    PoolSpec::TwoSided { t_star: s, .. } if s == t_star => {}
                    _ => {
                        return Err(Error::config(
                            &field,
                            format!("jump at {t_star} needs pool scheme two_sided with the same t_star"),
                        ))
                    }
                },
            }
            if let EstimatorSpec::Interval { lo, hi } = est {
                let target = self.target.as_ref().expect("checked above");
                if target.space != Space::Time {
                    return Err(Error::config(
                        &field,
                        "interval estimation needs a time-space target",
                    ));
                }
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo < hi && *hi <= self.horizon)
                {
                    return Err(Error::config(
                        &field,
                        format!("window ({lo}, {hi}] must satisfy 0 <= lo < hi <= horizon"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn pool_size(&self) -> usize {
        match &self.pool {
            PoolSpec::Equispaced { n }
            | PoolSpec::RadicalInverse { n }
            | PoolSpec::ConvergentTo { n, .. }
            | PoolSpec::TwoSided { n, .. }
            | PoolSpec::SeededUniform { n, .. } => *n,
        }
    }

    pub fn build_mean(&self) -> Result<MeanFunction> {
        let kind = match &self.mean {
            MeanSpec::Polynomial { coeffs } => MeanKind::Polynomial { coeffs: coeffs.clone() },
            MeanSpec::Sinusoid { amplitude, frequency, phase, offset } => MeanKind::Sinusoid {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: *phase,
                offset: *offset,
            },
            MeanSpec::Piecewise { pieces } => MeanKind::PiecewiseRightContinuous {
                pieces: pieces
                    .iter()
                    .map(|p| MeanPiece { start: p.start, coeffs: p.coeffs.clone() })
                    .collect(),
            },
            MeanSpec::Tabulated { times, values } => {
                MeanKind::Tabulated { times: times.clone(), values: values.clone() }
            }
        };
        named("mean", MeanFunction::new(kind, self.horizon))
    }

    pub fn build_pool(&self, mean: &MeanFunction) -> Result<ObservationPool> {
        let scheme = match &self.pool {
            PoolSpec::Equispaced { n } => PoolScheme::Equispaced { n: *n },
            PoolSpec::RadicalInverse { n } => PoolScheme::RadicalInverse { n: *n },
            PoolSpec::ConvergentTo { t_star, rate, n } => {
                PoolScheme::ConvergentTo { t_star: *t_star, rate: *rate, n: *n }
            }
            PoolSpec::TwoSided { t_star, rate, n } => {
                PoolScheme::TwoSided { t_star: *t_star, rate: *rate, n: *n }
            }
            PoolSpec::SeededUniform { n, seed } => {
                PoolScheme::SeededUniform { n: *n, seed: *seed }
            }
        };
        named("pool", ObservationPool::generate(scheme, mean))
    }

    pub fn null_slot_schedule(&self) -> NullSlotSchedule {
        match self.planner.null_slots {
            NullSlotsSpec::Squares => NullSlotSchedule::Squares,
            NullSlotsSpec::Never => NullSlotSchedule::Never,
        }
    }

    pub fn build_schedule(&self) -> Result<RefinementSchedule> {
        named(
            "planner",
            RefinementSchedule::doubling(self.planner.base_level, self.planner.n0, self.n_max),
        )
    }
}

impl TargetSpec {
    /// Planner domain, defaulted by space.
    pub fn domain(&self, horizon: f64) -> Result<IntervalRC> {
        match self.domain {
            Some([lo, hi]) => named("target.domain", IntervalRC::new(lo, hi)),
            None => match self.space {
                Space::Time => named("target.domain", IntervalRC::new(0.0, horizon)),
                Space::Marks => Ok(IntervalRC::new(0.0, 1.0).expect("unit interval")),
            },
        }
    }

    pub fn build_measure(&self, domain: IntervalRC) -> Result<TargetMeasure> {
        let kind = build_kind(&self.measure, &domain)?;
        named("target.measure", TargetMeasure::new(domain, kind))
    }

    /// Partition over the domain, avoiding the target's atoms, deep enough
    /// for every level the schedule can activate (or as overridden).
    pub fn build_partition(
        &self,
        domain: IntervalRC,
        target: &TargetMeasure,
        schedule: &RefinementSchedule,
        max_level: Option<usize>,
    ) -> Result<ProgressivePartition> {
        let depth = max_level.unwrap_or_else(|| schedule.max_level());
        named(
            "planner.max_level",
            ProgressivePartition::build(domain, depth, &target.atom_locations()),
        )
    }
}

fn build_kind(spec: &TargetKindSpec, domain: &IntervalRC) -> Result<MeasureKind> {
    match spec {
        TargetKindSpec::Uniform => {
            let len = domain.length();
            Ok(MeasureKind::AbsolutelyContinuous(Density::new(move |_| 1.0 / len, vec![])))
        }
        TargetKindSpec::Polynomial { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::config("target.measure.coeffs", "must not be empty"));
            }
            let c = coeffs.clone();
            Ok(MeasureKind::AbsolutelyContinuous(Density::new(
                move |t| c.iter().rev().fold(0.0, |acc, k| acc * t + k),
                vec![],
            )))
        }
        TargetKindSpec::Piecewise { starts, values } => {
            if starts.len() != values.len() || starts.is_empty() {
                return Err(Error::config(
                    "target.measure.starts",
                    "starts and values must be nonempty and equally long",
                ));
            }
            if starts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(
                    "target.measure.starts",
                    "must be strictly increasing",
                ));
            }
            let (s, v) = (starts.clone(), values.clone());
            let breakpoints = starts.clone();
            Ok(MeasureKind::AbsolutelyContinuous(Density::new(
                move |t| match s.partition_point(|x| *x <= t) {
                    0 => 0.0,
                    i => v[i - 1],
                },
                breakpoints,
            )))
        }
        TargetKindSpec::Atoms { locations, masses } => {
            if locations.len() != masses.len() || locations.is_empty() {
                return Err(Error::config(
                    "target.measure.locations",
                    "locations and masses must be nonempty and equally long",
                ));
            }
            Ok(MeasureKind::Atomic(
                locations
                    .iter()
                    .zip(masses)
                    .map(|(l, m)| Atom { location: *l, mass: *m })
                    .collect(),
            ))
        }
        TargetKindSpec::Mixture { components } => {
            let mut parts = Vec::with_capacity(components.len());
            for c in components {
                if matches!(c.measure, TargetKindSpec::Mixture { .. }) {
                    return Err(Error::config(
                        "target.measure.components",
                        "mixtures cannot nest",
                    ));
                }
                parts.push((c.weight, build_kind(&c.measure, domain)?));
            }
            Ok(MeasureKind::Mixture(parts))
        }
    }
}
