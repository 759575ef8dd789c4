//! Monte Carlo sweep and condition-level statistics.
//!
//! Each (condition, trial) pair is one work item: it draws a patient field
//! and an outage pattern, then flies every configured policy through that
//! same environment. Work items run on a rayon pool and are gathered in
//! index order, so results do not depend on the number of workers.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SweepConfig;
use crate::engine::{run_mission, MissionStreams};
use crate::error::{Error, Result};
use crate::localization::outage_schedule;
use crate::metrics::{metric_vector, trial_metrics, MetricVector, TrialMetrics};
use crate::pareto::{effective_success, front_mask, CellKey, ParetoPoint};
use crate::policy::PolicyId;
use crate::scenario::generate_scenario;
use crate::stats::{boxplot_stats, confidence_interval, quantiles, std_dev, FiveNumber};
use crate::stream::{derive_stream, Purpose};

pub const CI_LEVEL: f64 = 0.95;

/// One mission's outcome together with its cell coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub policy: PolicyId,
    pub condition_id: u32,
    pub delta: f64,
    pub load: u32,
    pub trial: u32,
    pub metrics: TrialMetrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub n: usize,
    pub mean: f64,
    /// `None` below two samples.
    pub sd: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
}

impl MetricSummary {
    pub fn of(samples: &[f64]) -> Option<Self> {
        let n = samples.len();
        let mean = crate::stats::mean(samples).ok()?;
        let ci = confidence_interval(samples, CI_LEVEL).ok();
        Some(MetricSummary {
            n,
            mean,
            sd: std_dev(samples).ok(),
            ci_lo: ci.map(|c| c.0.min(mean)),
            ci_hi: ci.map(|c| c.1.max(mean)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayQuantiles {
    pub median: f64,
    pub p90: f64,
    pub p95: f64,
}

impl DelayQuantiles {
    pub fn of(samples: &[f64]) -> Option<Self> {
        let q = quantiles(samples, &[0.5, 0.9, 0.95]).ok()?;
        Some(DelayQuantiles {
            median: q[0],
            p90: q[1],
            p95: q[2],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub policy: PolicyId,
    pub delta: f64,
    pub load: u32,
    pub trials: usize,
    pub vector: MetricVector,
    /// Over pooled high-severity delays; `None` if there were none.
    pub t_int: Option<MetricSummary>,
    /// Per-mission ρ.
    pub rho: MetricSummary,
    /// Per-mission abort indicators.
    pub r_fail: MetricSummary,
    pub workload: MetricSummary,
    pub duration: MetricSummary,
    pub delay_quantiles: Option<DelayQuantiles>,
    pub delay_box: Option<FiveNumber>,
    pub workload_box: FiveNumber,
    pub mean_duration: f64,
}

/// Policy row of the rollup, pooled over every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRollup {
    pub policy: PolicyId,
    pub missions: usize,
    pub t_int_mean: Option<f64>,
    pub rho: f64,
    pub r_fail: f64,
    pub w_mean: f64,
    pub mission_time: f64,
    pub delay_quantiles: Option<DelayQuantiles>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParetoScope {
    /// Policies compared within one (δ, load) condition.
    Condition,
    /// Policies compared after pooling every condition.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoEntry {
    pub scope: ParetoScope,
    pub point: ParetoPoint,
    pub on_front: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<ConditionSummary>,
    pub rollup: Vec<PolicyRollup>,
    pub pareto: Vec<ParetoEntry>,
}

/// Runs the sweep on `workers` threads (`None`: rayon's default).
pub fn run_sweep(config: &SweepConfig, workers: Option<usize>) -> Result<SweepResult> {
    config.validate()?;
    let records = match workers {
        None => simulate(config)?,
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?
            .install(|| simulate(config))?,
    };
    analyze(records)
}

fn simulate(config: &SweepConfig) -> Result<Vec<TrialRecord>> {
    let setup = config.mission_setup();
    let seed = config.master_seed;
    let work: Vec<(crate::scenario::Condition, u32)> = config
        .conditions()
        .into_iter()
        .flat_map(|c| (0..config.trials_per_condition).map(move |t| (c, t)))
        .collect();

    let batches: Vec<Vec<TrialRecord>> = work
        .par_iter()
        .map(|&(cond, trial)| {
            let c = cond.condition_id;
            // patient field and outage pattern are shared by all policies
            let scenario = generate_scenario(cond, &config.scenario, &mut derive_stream(seed, c, trial, 0, Purpose::Scenario));
            let profile = outage_schedule(
                cond.delta,
                setup.platform.horizon,
                &setup.localization,
                &mut derive_stream(seed, c, trial, 0, Purpose::Outage),
            );
            config
                .policies
                .iter()
                .map(|&policy| {
                    let p = policy.index();
                    let mut streams = MissionStreams {
                        sensing: derive_stream(seed, c, trial, p, Purpose::Sensing),
                        operator: derive_stream(seed, c, trial, p, Purpose::Operator),
                    };
                    let trace = run_mission(&scenario, &profile, policy, &setup, trial, &mut streams)?;
                    Ok(TrialRecord {
                        policy,
                        condition_id: c,
                        delta: cond.delta,
                        load: cond.patient_load,
                        trial,
                        metrics: trial_metrics(&trace, &scenario, &config.metrics),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records: Vec<TrialRecord> = batches.into_iter().flatten().collect();
    let rank = |p: PolicyId| config.policies.iter().position(|&q| q == p);
    records.sort_by_key(|r| (rank(r.policy), r.condition_id, r.trial));
    Ok(records)
}

fn cell_summary(policy: PolicyId, delta: f64, load: u32, trials: &[&TrialRecord]) -> Result<ConditionSummary> {
    let metrics: Vec<&TrialMetrics> = trials.iter().map(|r| &r.metrics).collect();
    let vector = metric_vector(metrics.iter().copied())?;
    let delays: Vec<f64> = metrics
        .iter()
        .flat_map(|m| m.high_severity_delays.iter().map(|d| d.delay))
        .collect();
    let rho: Vec<f64> = metrics.iter().map(|m| m.rho()).collect();
    let fail: Vec<f64> = metrics.iter().map(|m| if m.aborted { 1.0 } else { 0.0 }).collect();
    let w: Vec<f64> = metrics.iter().map(|m| m.workload).collect();
    let dur: Vec<f64> = metrics.iter().map(|m| m.duration).collect();
    let nonempty = |s: Option<MetricSummary>| s.ok_or(Error::EmptySample("cell_summary"));
    let duration = nonempty(MetricSummary::of(&dur))?;
    Ok(ConditionSummary {
        policy,
        delta,
        load,
        trials: trials.len(),
        vector,
        t_int: MetricSummary::of(&delays),
        rho: nonempty(MetricSummary::of(&rho))?,
        r_fail: nonempty(MetricSummary::of(&fail))?,
        workload: nonempty(MetricSummary::of(&w))?,
        duration,
        delay_quantiles: DelayQuantiles::of(&delays),
        delay_box: boxplot_stats(&delays).ok(),
        workload_box: boxplot_stats(&w)?,
        mean_duration: duration.mean,
    })
}

/// Sort key that orders f64 cell coordinates exactly.
fn delta_key(d: f64) -> u64 {
    // all δ are in [0, 1], so the raw bits order like the values
    d.to_bits()
}

/// Summaries, rollup, and Pareto analysis from trial records alone. Cells
/// and policies appear in first-seen record order.
pub fn analyze(records: Vec<TrialRecord>) -> Result<SweepResult> {
    if records.is_empty() {
        return Err(Error::EmptySample("analyze"));
    }
    let mut policies: Vec<PolicyId> = Vec::new();
    let mut cells: BTreeMap<(usize, u64, u32), Vec<&TrialRecord>> = BTreeMap::new();
    for r in &records {
        let pi = match policies.iter().position(|&p| p == r.policy) {
            Some(i) => i,
            None => {
                policies.push(r.policy);
                policies.len() - 1
            }
        };
        cells.entry((pi, delta_key(r.delta), r.load)).or_default().push(r);
    }

    let summaries = cells
        .iter()
        .map(|(&(pi, _, load), trials)| cell_summary(policies[pi], trials[0].delta, load, trials))
        .collect::<Result<Vec<_>>>()?;

    let rollup = policies
        .iter()
        .map(|&policy| {
            let mine: Vec<&TrialMetrics> = records.iter().filter(|r| r.policy == policy).map(|r| &r.metrics).collect();
            let v = metric_vector(mine.iter().copied())?;
            let delays: Vec<f64> = mine
                .iter()
                .flat_map(|m| m.high_severity_delays.iter().map(|d| d.delay))
                .collect();
            Ok(PolicyRollup {
                policy,
                missions: mine.len(),
                t_int_mean: v.t_int_mean,
                rho: v.rho,
                r_fail: v.r_fail,
                w_mean: v.w_mean,
                mission_time: mine.iter().map(|m| m.duration).sum::<f64>() / mine.len() as f64,
                delay_quantiles: DelayQuantiles::of(&delays),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut pareto = Vec::new();
    // per condition: group summaries by (δ, load), one point per policy
    let mut by_condition: BTreeMap<(u64, u32), Vec<ParetoPoint>> = BTreeMap::new();
    for s in &summaries {
        if let Some(x) = s.vector.t_int_mean {
            by_condition.entry((delta_key(s.delta), s.load)).or_default().push(ParetoPoint {
                key: CellKey {
                    policy: s.policy,
                    delta: Some(s.delta),
                    load: Some(s.load),
                },
                x,
                y: s.vector.r_fail,
                size: effective_success(s.vector.rho, s.vector.r_fail),
            });
        }
    }
    for points in by_condition.values() {
        push_front(&mut pareto, ParetoScope::Condition, points);
    }
    let pooled: Vec<ParetoPoint> = rollup
        .iter()
        .filter_map(|r| {
            Some(ParetoPoint {
                key: CellKey {
                    policy: r.policy,
                    delta: None,
                    load: None,
                },
                x: r.t_int_mean?,
                y: r.r_fail,
                size: effective_success(r.rho, r.r_fail),
            })
        })
        .collect();
    push_front(&mut pareto, ParetoScope::Pooled, &pooled);

    Ok(SweepResult {
        records,
        summaries,
        rollup,
        pareto,
    })
}

fn push_front(out: &mut Vec<ParetoEntry>, scope: ParetoScope, points: &[ParetoPoint]) {
    for (point, on_front) in points.iter().zip(front_mask(points)) {
        out.push(ParetoEntry {
            scope,
            point: *point,
            on_front,
        });
    }
}

impl SweepResult {
    pub fn rollup_for(&self, policy: PolicyId) -> Option<&PolicyRollup> {
        self.rollup.iter().find(|r| r.policy == policy)
    }

    /// R_fail per δ for one policy, pooled over loads, in ascending δ.
    pub fn failure_by_delta(&self, policy: PolicyId) -> Vec<(f64, f64)> {
        let mut acc: BTreeMap<u64, (f64, usize, usize)> = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.policy == policy) {
            let e = acc.entry(delta_key(r.delta)).or_insert((r.delta, 0, 0));
            e.1 += usize::from(r.metrics.aborted);
            e.2 += 1;
        }
        acc.into_values().map(|(d, f, n)| (d, f as f64 / n as f64)).collect()
    }
}
