//! Per-mission metrics, per-cell metric vectors, and dominance.

use serde::{Deserialize, Serialize};

use crate::engine::{EventKind, MissionTrace, TaskLabel};
use crate::error::{Error, Result};
use crate::scenario::{PatientId, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HighSeverityDelay {
    pub patient_id: PatientId,
    /// Minutes from detection to first intervention, or to mission end when
    /// `censored`.
    pub delay: f64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    pub high_severity_delays: Vec<HighSeverityDelay>,
    pub served_count: u32,
    pub total_patients: u32,
    pub aborted: bool,
    pub lambda_sw: f64,
    pub lambda_int: f64,
    pub workload: f64,
    pub duration: f64,
}

impl TrialMetrics {
    pub fn rho(&self) -> f64 {
        if self.total_patients == 0 {
            0.0
        } else {
            f64::from(self.served_count) / f64::from(self.total_patients)
        }
    }

    /// Mean high-severity delay of this mission alone.
    pub fn t_int_mean(&self) -> Option<f64> {
        mean(self.high_severity_delays.iter().map(|d| d.delay))
    }
}

/// Weights and window used when reducing a trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    /// Clinically acceptable delay, minutes.
    pub tau_c: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl MetricParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_c > 0.0 && self.tau_c.is_finite()) {
            return Err(Error::config("metrics.tau_c", "must be positive"));
        }
        for (k, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("metrics.{k}"), "must be nonnegative"));
            }
        }
        Ok(())
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams {
            tau_c: 60.0,
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

/// Component-wise aggregate of one (policy, condition) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    /// Pooled mean of all high-severity delays; `None` when the cell saw no
    /// high-severity patient.
    pub t_int_mean: Option<f64>,
    pub rho: f64,
    pub r_fail: f64,
    pub w_mean: f64,
}

impl MetricVector {
    /// Minimization form `[T̄_int, 1 − ρ, R_fail, W̄]`.
    pub fn canonical(&self) -> Option<[f64; 4]> {
        Some([self.t_int_mean?, 1.0 - self.rho, self.r_fail, self.w_mean])
    }
}

fn mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn intervention_delays(trace: &MissionTrace, scenario: &Scenario) -> Vec<HighSeverityDelay> {
    scenario
        .patients
        .iter()
        .filter(|p| p.high_severity)
        .map(|p| match trace.intervention_time(p.id) {
            Some(t) => HighSeverityDelay {
                patient_id: p.id,
                delay: t - p.detect_time,
                censored: false,
            },
            None => HighSeverityDelay {
                patient_id: p.id,
                delay: trace.duration - p.detect_time,
                censored: true,
            },
        })
        .collect()
}

/// Patients whose first intervention came within `tau_c` of detection
/// (inclusive), and that count over the whole patient set.
pub fn served_within_window(trace: &MissionTrace, scenario: &Scenario, tau_c: f64) -> (u32, f64) {
    let count = scenario
        .patients
        .iter()
        .filter(|p| trace.intervention_time(p.id).is_some_and(|t| t - p.detect_time <= tau_c))
        .count() as u32;
    let total = scenario.patients.len();
    let rho = if total == 0 { 0.0 } else { f64::from(count) / total as f64 };
    (count, rho)
}

pub fn failure_rate(aborted: &[bool]) -> Result<f64> {
    if aborted.is_empty() {
        return Err(Error::EmptySample("failure_rate"));
    }
    Ok(aborted.iter().filter(|&&a| a).count() as f64 / aborted.len() as f64)
}

/// S₁…S_K: the policy's initial task followed by every switched-to label.
pub fn task_sequence(trace: &MissionTrace) -> Vec<TaskLabel> {
    std::iter::once(TaskLabel::initial(trace.policy))
        .chain(
            trace
                .events
                .iter()
                .filter(|e| e.kind == EventKind::TaskSwitch)
                .filter_map(|e| e.task_label),
        )
        .collect()
}

pub fn task_switch_rate(trace: &MissionTrace) -> f64 {
    if trace.duration <= 0.0 {
        return 0.0;
    }
    let seq = task_sequence(trace);
    let changes = seq.windows(2).filter(|w| w[0] != w[1]).count();
    changes as f64 / trace.duration
}

pub fn intervention_frequency(trace: &MissionTrace) -> f64 {
    if trace.duration <= 0.0 {
        return 0.0;
    }
    trace.count(EventKind::OperatorIntervention) as f64 / trace.duration
}

pub fn workload(lambda_sw: f64, lambda_int: f64, alpha: f64, beta: f64) -> f64 {
    alpha * lambda_sw + beta * lambda_int
}

/// Mean over missions; one operator per mission.
pub fn aggregate_workload(per_trial: &[f64]) -> Result<f64> {
    mean(per_trial.iter().copied()).ok_or(Error::EmptySample("aggregate_workload"))
}

pub fn trial_metrics(trace: &MissionTrace, scenario: &Scenario, params: &MetricParams) -> TrialMetrics {
    let (served_count, _) = served_within_window(trace, scenario, params.tau_c);
    let lambda_sw = task_switch_rate(trace);
    let lambda_int = intervention_frequency(trace);
    TrialMetrics {
        high_severity_delays: intervention_delays(trace, scenario),
        served_count,
        total_patients: scenario.patients.len() as u32,
        aborted: trace.aborted,
        lambda_sw,
        lambda_int,
        workload: workload(lambda_sw, lambda_int, params.alpha, params.beta),
        duration: trace.duration,
    }
}

/// Pools delays across missions for T̄_int; ρ and W̄ are per-mission means.
pub fn metric_vector<'a>(trials: impl IntoIterator<Item = &'a TrialMetrics>) -> Result<MetricVector> {
    let trials: Vec<&TrialMetrics> = trials.into_iter().collect();
    if trials.is_empty() {
        return Err(Error::EmptySample("metric_vector"));
    }
    let aborted: Vec<bool> = trials.iter().map(|t| t.aborted).collect();
    let w: Vec<f64> = trials.iter().map(|t| t.workload).collect();
    Ok(MetricVector {
        t_int_mean: mean(trials.iter().flat_map(|t| t.high_severity_delays.iter().map(|d| d.delay))),
        rho: mean(trials.iter().map(|t| t.rho())).unwrap_or(0.0),
        r_fail: failure_rate(&aborted)?,
        w_mean: aggregate_workload(&w)?,
    })
}

/// `a` dominates `b`: no worse anywhere in minimization form and strictly
/// better somewhere. Vectors without a delay component are incomparable.
pub fn dominates(a: &MetricVector, b: &MetricVector) -> bool {
    match (a.canonical(), b.canonical()) {
        (Some(a), Some(b)) => dominates_min(&a, &b),
        _ => false,
    }
}

pub(crate) fn dominates_min(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y) && a.iter().zip(b).any(|(x, y)| x < y)
}
