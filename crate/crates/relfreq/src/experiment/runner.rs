//! Experiment execution and artifact writing.
//!
//! A run is built entirely in memory first: pool, plan, one trace per
//! estimator, reports. Only then does anything touch the filesystem, so an
//! invalid config or a failed plan writes nothing. Every CSV starts with a
//! comment line carrying the config digest, then a header row; all floats
//! are rendered with 17 significant digits so reruns are byte-identical.
//! The manifest lists `<sha256>  <name>` per artifact, in `sha256sum -c`
//! format.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::diagnostics::{convergence_report, oracle_limit, ConvergenceReport};
use crate::error::{Error, Result};
use crate::estimators::{
    interval_frequency, jump_estimate, pointwise_estimate, running_mean, ConvergenceTrace,
    IntervalFrequency,
};
use crate::experiment::config::{EstimatorSpec, ExperimentConfig, Space};
use crate::measures::IntervalRC;
use crate::planner::{build_permutation, PermutationPlan};
use crate::process::{DrawLedger, DrawRecord, ObservationPool};

/// Fixed-width float rendering: 17 significant decimal digits.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Everything a finished run produced.
#[derive(Debug)]
pub struct RunArtifacts {
    pub output_dir: PathBuf,
    pub config_digest: String,
    /// `(file name, sha256)` sorted by name; exactly the manifest content.
    pub files: Vec<(String, String)>,
    pub reports: Vec<EstimatorReport>,
    /// Final base-level plan discrepancy, when a planner ran.
    pub plan_discrepancy: Option<f64>,
}

/// Per-estimator summary row, as written to report.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub label: String,
    pub final_n: u64,
    pub final_value: f64,
    pub oracle: f64,
    pub final_error: f64,
    pub sup_error: f64,
    pub burn_in: u64,
}

impl EstimatorReport {
    fn from_report(label: String, r: &ConvergenceReport) -> Self {
        EstimatorReport {
            label,
            final_n: r.final_n,
            final_value: r.final_value,
            oracle: r.oracle,
            final_error: r.final_error,
            sup_error: r.sup_error,
            burn_in: r.burn_in,
        }
    }
}

enum TraceData {
    Plain(ConvergenceTrace),
    Windowed(IntervalFrequency),
}

struct EstimatorRun {
    label: String,
    oracle: f64,
    trace: TraceData,
    draws: Vec<DrawRecord>,
}

/// Full validation without planning or drawing: builds the mean, pool,
/// target, partition and schedule, runs the pool-membership pre-check, and
/// verifies every estimator's trace will reach the burn-in. Writes nothing.
pub fn preflight(config: &ExperimentConfig) -> Result<()> {
    config.validate()?;
    let mean = config.build_mean()?;
    let pool = config.build_pool(&mean)?;
    if let Some(spec) = &config.target {
        let domain = spec.domain(config.horizon)?;
        let target = spec.build_measure(domain)?;
        let schedule = config.build_schedule()?;
        let psp = spec.build_partition(domain, &target, &schedule, config.planner.max_level)?;
        let values: &[f64] = match spec.space {
            Space::Time => pool.times(),
            Space::Marks => pool.marks(),
        };
        let deepest = schedule.level_for_step(config.n_max).min(psp.max_level());
        let view = crate::measures::CountingView::new(values);
        crate::measures::check_membership_up_to(
            &target,
            &view,
            &psp,
            config.planner.membership_threshold,
            deepest,
        )?;
    }
    for (i, est) in config.estimators.iter().enumerate() {
        let trace_len = match est {
            EstimatorSpec::Global | EstimatorSpec::Interval { .. } => config.n_max,
            EstimatorSpec::Pointwise { .. } => pool.len() as u64,
            EstimatorSpec::Jump { t_star } => {
                let (right, left) = pool.split_at(*t_star);
                right.len().min(left.len()) as u64
            }
        };
        if trace_len < config.burn_in {
            return Err(Error::config(
                &format!("estimators[{i}]"),
                format!(
                    "trace ends at n = {trace_len}, before the burn-in {}",
                    config.burn_in
                ),
            ));
        }
    }
    Ok(())
}

/// Executes the experiment described by the config file and writes all
/// artifacts into its output directory.
pub fn run(config_path: &Path) -> Result<RunArtifacts> {
    let bytes = std::fs::read(config_path)?;
    let digest = sha256_hex(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|e| Error::config("config", format!("not valid UTF-8: {e}")))?;
    let config = ExperimentConfig::from_toml(&text)?;
    config.validate()?;

    let mean = config.build_mean()?;
    let pool = config.build_pool(&mean)?;

    // plan, when a target is configured
    let planned = match &config.target {
        Some(spec) => {
            let domain = spec.domain(config.horizon)?;
            let target = spec.build_measure(domain)?;
            let schedule = config.build_schedule()?;
            let psp =
                spec.build_partition(domain, &target, &schedule, config.planner.max_level)?;
            let values: &[f64] = match spec.space {
                Space::Time => pool.times(),
                Space::Marks => pool.marks(),
            };
            let plan = build_permutation(
                &target,
                values,
                &psp,
                schedule,
                config.null_slot_schedule(),
                config.n_max,
                config.planner.membership_threshold,
            )?;
            Some((target, plan, spec.space))
        }
        None => None,
    };

    // estimators, each on a fresh ledger with the run seed: outcomes are
    // keyed by instant, so shared instants agree across estimators
    let mut runs = Vec::with_capacity(config.estimators.len());
    for est in &config.estimators {
        let mut ledger = DrawLedger::new(config.seed);
        let label = est.label();
        let run = match est {
            EstimatorSpec::Global => {
                let (target, plan, space) = planned.as_ref().expect("validated");
                let oracle = match space {
                    Space::Time => oracle_limit(target, &mean),
                    Space::Marks => target.integral_identity(),
                };
                let trace = running_mean(plan, &pool, &mut ledger)?;
                EstimatorRun {
                    label,
                    oracle,
                    trace: TraceData::Plain(trace),
                    draws: ledger.draws().to_vec(),
                }
            }
            EstimatorSpec::Interval { lo, hi } => {
                let (target, plan, _) = planned.as_ref().expect("validated");
                let window = IntervalRC::new(*lo, *hi)
                    .map_err(|e| Error::config("estimators", e.to_string()))?;
                let mass = target
                    .measure_of(&window)
                    .map_err(|e| Error::config("estimators", e.to_string()))?;
                if mass <= 0.0 {
                    return Err(Error::config(
                        "estimators",
                        format!("window ({lo}, {hi}] carries no target mass"),
                    ));
                }
                // restricted limit: ∫ over the window of p0 dP, normalized
                let mut cuts = mean.breakpoints();
                cuts.extend([*lo, *hi]);
                let restricted = target
                    .integral_of(|t| if window.contains(t) { mean.eval(t) } else { 0.0 }, &cuts);
                let oracle = restricted / mass;
                let trace = interval_frequency(plan, &pool, &mut ledger, &window)?;
                EstimatorRun {
                    label,
                    oracle,
                    trace: TraceData::Windowed(trace),
                    draws: ledger.draws().to_vec(),
                }
            }
            EstimatorSpec::Pointwise { t_star } => {
                let trace = pointwise_estimate(*t_star, &pool, &mut ledger)?;
                EstimatorRun {
                    label,
                    oracle: mean.eval(*t_star),
                    trace: TraceData::Plain(trace),
                    draws: ledger.draws().to_vec(),
                }
            }
            EstimatorSpec::Jump { t_star } => {
                let (right, left) = pool.split_at(*t_star);
                let trace = jump_estimate(*t_star, &right, &left, &mut ledger)?;
                EstimatorRun {
                    label,
                    oracle: mean.jump_at(*t_star),
                    trace: TraceData::Plain(trace),
                    draws: ledger.draws().to_vec(),
                }
            }
        };
        runs.push(run);
    }

    let mut reports = Vec::with_capacity(runs.len());
    for r in &runs {
        let trace = match &r.trace {
            TraceData::Plain(t) => t,
            TraceData::Windowed(f) => &f.mean,
        };
        let report = convergence_report(trace, r.oracle, config.burn_in)
            .map_err(|e| Error::config("burn_in", format!("{} ({e})", r.label)))?;
        reports.push(EstimatorReport::from_report(r.label.clone(), &report));
    }

    // everything computed; only now touch the filesystem
    let out = PathBuf::from(&config.output_dir);
    std::fs::create_dir_all(&out)?;
    let head = format!("# config sha256: {digest}\n");
    let mut files: Vec<(String, String)> = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<()> {
        std::fs::write(out.join(name), body.as_bytes())?;
        files.push((name.to_string(), sha256_hex(body.as_bytes())));
        Ok(())
    };

    emit("pool.csv", pool_csv(&head, &pool))?;
    if let Some((_, plan, _)) = &planned {
        emit("plan.csv", plan_csv(&head, plan))?;
    }
    emit("ledger.csv", ledger_csv(&head, &pool, &runs))?;
    for (r, report) in runs.iter().zip(&reports) {
        emit(&format!("trace_{}.csv", r.label), trace_csv(&head, r, report.oracle))?;
    }
    emit("report.csv", report_csv(&head, &reports))?;

    files.sort();
    let manifest: String =
        files.iter().map(|(name, hash)| format!("{hash}  {name}\n")).collect();
    std::fs::write(out.join("manifest.txt"), manifest.as_bytes())?;
    files.push(("manifest.txt".to_string(), sha256_hex(manifest.as_bytes())));
    files.sort();

    Ok(RunArtifacts {
        output_dir: out,
        config_digest: digest,
        files,
        reports,
        plan_discrepancy: planned.as_ref().and_then(|(_, p, _)| p.eps_report),
    })
}

fn pool_csv(head: &str, pool: &ObservationPool) -> String {
    let mut s = String::from(head);
    s.push_str("j,t,mark\n");
    for (j, (t, m)) in pool.times().iter().zip(pool.marks()).enumerate() {
        let _ = writeln!(s, "{j},{},{}", fmt(*t), fmt(*m));
    }
    s
}

fn plan_csv(head: &str, plan: &PermutationPlan) -> String {
    let mut s = String::from(head);
    s.push_str("step,pool_index,mark,cell,score\n");
    for p in plan.steps() {
        let score = p.score.map(fmt).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{},{score}", p.step, p.pool_index, fmt(p.value), p.cell);
    }
    s
}

/// Draws of all estimators merged in execution order, first occurrence per
/// instant (repeat draws of a shared instant agree by construction).
fn ledger_csv(head: &str, pool: &ObservationPool, runs: &[EstimatorRun]) -> String {
    let index_of: HashMap<u64, usize> =
        pool.times().iter().enumerate().map(|(j, t)| (t.to_bits(), j)).collect();
    let mut s = String::from(head);
    s.push_str("order,j,t,outcome\n");
    let mut seen = HashSet::new();
    let mut order = 0usize;
    for run in runs {
        for d in &run.draws {
            if !seen.insert(d.t.to_bits()) {
                continue;
            }
            let j = index_of.get(&d.t.to_bits()).copied().expect("draw from this pool");
            let _ = writeln!(s, "{order},{j},{},{}", fmt(d.t), d.outcome as u8);
            order += 1;
        }
    }
    s
}

fn trace_csv(head: &str, run: &EstimatorRun, oracle: f64) -> String {
    let mut s = String::from(head);
    match &run.trace {
        TraceData::Plain(trace) => {
            s.push_str("n,value,oracle,abs_error\n");
            for (n, v) in trace.checkpoints() {
                let _ = writeln!(s, "{n},{},{},{}", fmt(*v), fmt(oracle), fmt((v - oracle).abs()));
            }
        }
        TraceData::Windowed(f) => {
            // checkpoints where no planned instant was inside the window yet
            // keep their count_ratio but leave the mean columns empty
            s.push_str("n,value,oracle,abs_error,count_ratio\n");
            let means: HashMap<u64, f64> = f.mean.checkpoints().iter().copied().collect();
            for (n, ratio) in f.count_ratio.checkpoints() {
                match means.get(n) {
                    Some(v) => {
                        let _ = writeln!(
                            s,
                            "{n},{},{},{},{}",
                            fmt(*v),
                            fmt(oracle),
                            fmt((v - oracle).abs()),
                            fmt(*ratio)
                        );
                    }
                    None => {
                        let _ = writeln!(s, "{n},,,,{}", fmt(*ratio));
                    }
                }
            }
        }
    }
    s
}

fn report_csv(head: &str, reports: &[EstimatorReport]) -> String {
    let mut s = String::from(head);
    s.push_str("estimator,final_n,final_value,oracle,final_error,sup_error,burn_in\n");
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.label,
            r.final_n,
            fmt(r.final_value),
            fmt(r.oracle),
            fmt(r.final_error),
            fmt(r.sup_error),
            r.burn_in
        );
    }
    s
}

/// Parses a report.csv produced by [`run`].
pub(crate) fn read_report(path: &Path) -> Result<Vec<EstimatorReport>> {
    let text = std::fs::read_to_string(path)
        .map_err(|_| Error::MissingArtifact(path.display().to_string()))?;
    let mut rows = Vec::new();
    for line in text.lines().skip(2) {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(Error::MalformedArtifact {
                path: path.display().to_string(),
                message: format!("expected 7 columns, got {}", parts.len()),
            });
        }
        let field = |i: usize| -> Result<f64> {
            parts[i].parse().map_err(|_| Error::MalformedArtifact {
                path: path.display().to_string(),
                message: format!("bad number in column {i}: {:?}", parts[i]),
            })
        };
        rows.push(EstimatorReport {
            label: parts[0].to_string(),
            final_n: field(1)? as u64,
            final_value: field(2)?,
            oracle: field(3)?,
            final_error: field(4)?,
            sup_error: field(5)?,
            burn_in: field(6)? as u64,
        });
    }
    Ok(rows)
}

/// Renders the human-readable summary block for a finished run.
pub fn summarize(artifacts: &RunArtifacts) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "run: {}", artifacts.output_dir.display());
    let _ = writeln!(s, "config sha256: {}", artifacts.config_digest);
    if let Some(eps) = artifacts.plan_discrepancy {
        let _ = writeln!(s, "plan base-level discrepancy: {}", fmt(eps));
    }
    for r in &artifacts.reports {
        let _ = writeln!(
            s,
            "  {:<24} n = {:<8} value = {:<24} oracle = {:<24} |err| = {:.3e} sup|err| = {:.3e}",
            r.label,
            r.final_n,
            fmt(r.final_value),
            fmt(r.oracle),
            r.final_error,
            r.sup_error
        );
    }
    let _ = writeln!(s, "  artifacts: {} files", artifacts.files.len());
    s
}
