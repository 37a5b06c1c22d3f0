//! Experiment configuration, execution, and artifact comparison.

mod compare;
mod config;
mod runner;

pub use compare::{compare_reports, render, Divergence};
pub use config::{
    ComponentSpec, EstimatorSpec, ExperimentConfig, MeanSpec, NullSlotsSpec, PieceSpec,
    PlannerSpec, PoolSpec, Space, TargetKindSpec, TargetSpec,
};
pub use runner::{preflight, run, summarize, EstimatorReport, RunArtifacts};
